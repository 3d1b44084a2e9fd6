//! Building-centric tile extraction with void and event filtering.

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::raster::Raster;

pub const DEFAULT_TILE_SIZE: usize = 1024;

/// Hurricane events kept by default.
pub const DEFAULT_EVENTS: [&str; 5] = ["Harvey", "Michael", "Ida", "Ian", "Laura"];

/// Simple polygon in world coordinates, implicitly closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<(f64, f64)>,
}

impl Polygon {
    /// Drops a repeated closing vertex; needs at least three distinct vertices.
    pub fn new(mut vertices: Vec<(f64, f64)>) -> Result<Self> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::Contract(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Contract("polygon vertices must be finite".into()));
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Signed shoelace area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        let (x0, y0) = self.vertices[0];
        let n = self.vertices.len();
        let mut twice = 0.0;
        for i in 0..n {
            let (xa, ya) = self.vertices[i];
            let (xb, yb) = self.vertices[(i + 1) % n];
            twice += (xa - x0) * (yb - y0) - (xb - x0) * (ya - y0);
        }
        twice / 2.0
    }
}

/// Area-weighted centroid. Sums run relative to the first vertex so large
/// projected coordinates keep their precision.
pub fn polygon_centroid(p: &Polygon) -> Result<(f64, f64)> {
    let (x0, y0) = p.vertices[0];
    let n = p.vertices.len();
    let (mut twice_area, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (xa, ya) = p.vertices[i];
        let (xb, yb) = p.vertices[(i + 1) % n];
        let (xa, ya, xb, yb) = (xa - x0, ya - y0, xb - x0, yb - y0);
        let cross = xa * yb - xb * ya;
        twice_area += cross;
        cx += (xa + xb) * cross;
        cy += (ya + yb) * cross;
    }
    let area = twice_area / 2.0;
    if area.abs() < 1e-12 {
        return Err(Error::DegeneratePolygon(area));
    }
    Ok((x0 + cx / (6.0 * area), y0 + cy / (6.0 * area)))
}

/// A building footprint that may become a tile.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: String,
    pub center: (f64, f64),
    pub event: Option<String>,
}

/// Reads Polygon features from a GeoJSON FeatureCollection. Only the outer
/// ring is used; other geometry types and degenerate rings are skipped.
pub fn read_buildings(path: impl AsRef<Path>) -> Result<Vec<Candidate>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_buildings(&text).map_err(|e| match e {
        Error::Parse { line, message, .. } => Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        },
        other => other,
    })
}

pub fn parse_buildings(text: &str) -> Result<Vec<Candidate>> {
    let bad = |line: usize, message: String| Error::Parse {
        path: "<geojson>".into(),
        line,
        message,
    };
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.line(), e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(bad(0, "top-level object must be a FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| bad(0, "FeatureCollection has no 'features' array".into()))?;

    let mut out = Vec::new();
    for (index, feature) in features.iter().enumerate() {
        let id = match feature.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => format!("b{index:05}"),
        };
        let geometry = feature.get("geometry").unwrap_or(&Value::Null);
        let kind = geometry.get("type").and_then(Value::as_str).unwrap_or("none");
        if kind != "Polygon" {
            log::warn!("feature {id}: skipping {kind} geometry (only Polygon is supported)");
            continue;
        }
        let rings = geometry
            .get("coordinates")
            .and_then(Value::as_array)
            .ok_or_else(|| bad(0, format!("feature {id}: Polygon without coordinates")))?;
        if rings.len() > 1 {
            log::info!("feature {id}: ignoring {} interior ring(s) for the centroid", rings.len() - 1);
        }
        let ring = rings
            .first()
            .and_then(Value::as_array)
            .ok_or_else(|| bad(0, format!("feature {id}: empty Polygon")))?;
        let vertices = ring
            .iter()
            .map(|pt| {
                let xy = pt.as_array().filter(|a| a.len() >= 2)?;
                Some((xy[0].as_f64()?, xy[1].as_f64()?))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad(0, format!("feature {id}: malformed position in outer ring")))?;

        let center = match Polygon::new(vertices).and_then(|p| polygon_centroid(&p)) {
            Ok(c) => c,
            Err(e) => {
                log::warn!("feature {id}: skipped, {e}");
                continue;
            }
        };
        let event = feature
            .get("properties")
            .and_then(|p| p.get("event"))
            .and_then(Value::as_str)
            .map(str::to_string);
        out.push(Candidate { id, center, event });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rejection {
    OutOfBounds,
    VoidPixels,
    EventFiltered,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::OutOfBounds => "OUT_OF_BOUNDS",
            Rejection::VoidPixels => "VOID_PIXELS",
            Rejection::EventFiltered => "EVENT_FILTERED",
        })
    }
}

/// Pixel window of a tile in source coordinates. May extend past the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub col0: i64,
    pub row0: i64,
    pub width: usize,
    pub height: usize,
}

impl Window {
    /// Square window whose pixel `(size/2, size/2)` contains `center`.
    pub fn centered<R: Raster>(src: &R, center: (f64, f64), size: usize) -> Window {
        let (col, row) = src.grid().world_to_pixel(center.0, center.1);
        let half = (size / 2) as i64;
        Window {
            col0: col - half,
            row0: row - half,
            width: size,
            height: size,
        }
    }

    pub fn inside<R: Raster>(&self, src: &R) -> bool {
        let g = src.grid();
        self.col0 >= 0
            && self.row0 >= 0
            && self.col0 as usize + self.width <= g.ncols
            && self.row0 as usize + self.height <= g.nrows
    }

    pub fn intersects(&self, other: &Window) -> bool {
        self.col0 < other.col0 + other.width as i64
            && other.col0 < self.col0 + self.width as i64
            && self.row0 < other.row0 + other.height as i64
            && other.row0 < self.row0 + self.height as i64
    }
}

/// `size` x `size` crop centered on `center`, or `OutOfBounds`.
pub fn crop_tile<R: Raster>(src: &R, center: (f64, f64), size: usize) -> std::result::Result<(Window, R), Rejection> {
    let w = Window::centered(src, center, size);
    if size == 0 || !w.inside(src) {
        return Err(Rejection::OutOfBounds);
    }
    let tile = src.window(w.col0 as usize, w.row0 as usize, w.width, w.height);
    Ok((w, tile))
}

/// Rejects tiles whose nodata fraction exceeds `max_void_fraction`.
pub fn qc_void<R: Raster>(tile: &R, max_void_fraction: f64) -> std::result::Result<(), Rejection> {
    let n = tile.grid().len();
    let fraction = tile.nodata_count() as f64 / n as f64;
    if fraction > max_void_fraction {
        Err(Rejection::VoidPixels)
    } else {
        Ok(())
    }
}

/// Case-insensitive membership of `event` in `allowed`.
pub fn filter_event<S: AsRef<str>>(event: &str, allowed: &[S]) -> bool {
    allowed.iter().any(|a| a.as_ref().eq_ignore_ascii_case(event))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TilingOptions {
    pub size: usize,
    pub max_void_fraction: f64,
    /// Allowed events; candidates without an event are never filtered.
    pub events: Vec<String>,
}

impl Default for TilingOptions {
    fn default() -> Self {
        TilingOptions {
            size: DEFAULT_TILE_SIZE,
            max_void_fraction: 0.0,
            events: DEFAULT_EVENTS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub tile_id: String,
    pub center: (f64, f64),
    pub window: Window,
    pub rejection: Option<Rejection>,
    /// Earlier accepted tiles whose windows intersect this one.
    pub overlaps: Vec<String>,
}

impl ManifestEntry {
    pub fn accepted(&self) -> bool {
        self.rejection.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TileManifest {
    pub entries: Vec<ManifestEntry>,
}

impl TileManifest {
    pub fn accepted(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.accepted())
    }

    pub fn count(&self, reason: Option<Rejection>) -> usize {
        self.entries.iter().filter(|e| e.rejection == reason).count()
    }

    pub fn to_tsv(&self) -> String {
        let mut out =
            String::from("tile_id\tcenter_x\tcenter_y\tcol0\trow0\twidth\theight\taccepted\treason\toverlaps\n");
        for e in &self.entries {
            let reason = e.rejection.map_or_else(|| "-".to_string(), |r| r.to_string());
            let overlaps = if e.overlaps.is_empty() { "-".to_string() } else { e.overlaps.join(",") };
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.tile_id,
                e.center.0,
                e.center.1,
                e.window.col0,
                e.window.row0,
                e.window.width,
                e.window.height,
                e.accepted(),
                reason,
                overlaps
            );
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Runs every candidate through event filtering, bounds and void checks, in
/// input order. Each accepted tile is handed to `on_tile` as it is cut, so
/// large sources never hold more than one tile in memory.
pub fn tile_candidates<R: Raster>(
    src: &R,
    candidates: &[Candidate],
    opts: &TilingOptions,
    mut on_tile: impl FnMut(&ManifestEntry, R) -> Result<()>,
) -> Result<TileManifest> {
    let mut manifest = TileManifest::default();
    let mut seen = HashSet::new();
    for c in candidates {
        if !seen.insert(c.id.as_str()) {
            return Err(Error::Contract(format!("duplicate building id '{}'", c.id)));
        }
        let window = Window::centered(src, c.center, opts.size);
        let mut entry = ManifestEntry {
            tile_id: c.id.clone(),
            center: c.center,
            window,
            rejection: None,
            overlaps: Vec::new(),
        };
        let filtered = c.event.as_deref().is_some_and(|e| !filter_event(e, &opts.events));
        let outcome = if filtered {
            Err(Rejection::EventFiltered)
        } else {
            crop_tile(src, c.center, opts.size)
                .and_then(|(_, tile)| qc_void(&tile, opts.max_void_fraction).map(|()| tile))
        };
        match outcome {
            Ok(tile) => {
                entry.overlaps = manifest
                    .accepted()
                    .filter(|e| e.window.intersects(&window))
                    .map(|e| e.tile_id.clone())
                    .collect();
                on_tile(&entry, tile)?;
            }
            Err(reason) => entry.rejection = Some(reason),
        }
        manifest.entries.push(entry);
    }
    log::info!(
        "tiling: {} candidates, {} accepted, {} out of bounds, {} void, {} event-filtered",
        candidates.len(),
        manifest.count(None),
        manifest.count(Some(Rejection::OutOfBounds)),
        manifest.count(Some(Rejection::VoidPixels)),
        manifest.count(Some(Rejection::EventFiltered)),
    );
    Ok(manifest)
}
