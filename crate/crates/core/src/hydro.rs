//! Water-surface estimation and depth fill.
//!
//! Each 8-connected flood component is treated as a basin with one flat
//! water surface. The surface elevation is a high percentile of the terrain
//! under the component's waterline ring, and depth is the clamped difference
//! between that surface and the terrain.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mask::{self, ComponentLabelMap};
use crate::raster::{CodeRaster, ScalarRaster, DEFAULT_NODATA};

/// Depth raster in meters; nodata wherever no depth was assessed.
pub type DepthMap = ScalarRaster;

pub const DEFAULT_PERCENTILE: f64 = 95.0;

/// Linear interpolation between closest ranks: rank `p/100 * (n-1)` of the
/// ascending samples.
pub fn percentile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Contract("percentile of an empty sample set".into()));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Contract(format!("percentile {p} outside [0, 100]")));
    }
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(Error::Contract("percentile samples must be finite".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, p))
}

fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelStatus {
    Ok,
    /// Every waterline pixel was on the image frame or over DEM voids.
    NoValidBoundary,
    /// Component smaller than the configured minimum size.
    Skipped,
}

impl fmt::Display for LevelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LevelStatus::Ok => "OK",
            LevelStatus::NoValidBoundary => "NO_VALID_BOUNDARY",
            LevelStatus::Skipped => "SKIPPED_SMALL",
        })
    }
}

/// Water surface of one component.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterLevel {
    pub label: u32,
    pub pixels: usize,
    pub n_boundary: usize,
    /// Surface elevation in meters; `Some` exactly when `status` is `Ok`.
    pub z_water: Option<f64>,
    pub status: LevelStatus,
}

impl WaterLevel {
    fn from_samples(label: u32, pixels: usize, samples: &mut [f64], p: f64) -> Self {
        if samples.is_empty() {
            return WaterLevel {
                label,
                pixels,
                n_boundary: 0,
                z_water: None,
                status: LevelStatus::NoValidBoundary,
            };
        }
        samples.sort_by(f64::total_cmp);
        WaterLevel {
            label,
            pixels,
            n_boundary: samples.len(),
            z_water: Some(percentile_sorted(samples, p)),
            status: LevelStatus::Ok,
        }
    }
}

/// Per-component water levels, ordered by label.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WaterLevelTable {
    pub rows: Vec<WaterLevel>,
}

impl WaterLevelTable {
    pub fn get(&self, label: u32) -> Option<&WaterLevel> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Tab-separated report: one header line, then one line per component.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("label\tpixels\tn_boundary\tz_water\tstatus\n");
        for r in &self.rows {
            let z = r.z_water.map_or_else(|| "nan".to_string(), |z| z.to_string());
            let _ = writeln!(out, "{}\t{}\t{}\t{}\t{}", r.label, r.pixels, r.n_boundary, z, r.status);
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

fn ensure_percentile(p: f64) -> Result<()> {
    if (0.0..=100.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Contract(format!("percentile {p} outside [0, 100]")))
    }
}

/// Water level of component `k` from the DEM under its edge-filtered
/// waterline. DEM voids on the waterline are skipped.
pub fn component_water_level(
    k: u32,
    labels: &ComponentLabelMap,
    dem: &ScalarRaster,
    p: f64,
) -> Result<WaterLevel> {
    labels.grid().ensure_aligned(&dem.grid, "label map vs DEM")?;
    ensure_percentile(p)?;
    if k == 0 || k as usize > labels.count {
        return Err(Error::Contract(format!(
            "label {k} outside 1..={}",
            labels.count
        )));
    }
    let component = labels.component_mask(k);
    let ring = mask::reject_edge_pixels(&mask::inner_boundary(&component));
    let mut samples: Vec<f64> = ring
        .codes
        .iter()
        .zip(&dem.values)
        .filter(|&(&b, &z)| b != 0 && z != dem.nodata)
        .map(|(_, &z)| z)
        .collect();
    let pixels = component.count(1);
    Ok(WaterLevel::from_samples(k, pixels, &mut samples, p))
}

/// `max(0, z_water - DEM)` over every component with a valid level; nodata
/// elsewhere, including DEM voids.
pub fn compute_depth(
    labels: &ComponentLabelMap,
    dem: &ScalarRaster,
    table: &WaterLevelTable,
) -> Result<DepthMap> {
    labels.grid().ensure_aligned(&dem.grid, "label map vs DEM")?;
    let mut level_of: Vec<Option<f64>> = vec![None; labels.count + 1];
    let mut covered = vec![false; labels.count + 1];
    for row in &table.rows {
        let k = row.label as usize;
        if k == 0 || k > labels.count {
            return Err(Error::Contract(format!("table row for unknown label {k}")));
        }
        covered[k] = true;
        level_of[k] = row.z_water.filter(|_| row.status == LevelStatus::Ok);
    }
    if let Some(k) = (1..=labels.count).find(|&k| !covered[k]) {
        return Err(Error::Contract(format!("no water level for component {k}")));
    }

    let values = labels
        .labels
        .codes
        .iter()
        .zip(&dem.values)
        .map(|(&l, &z)| match level_of[l as usize] {
            Some(level) if l != 0 && z != dem.nodata => (level - z).max(0.0),
            _ => DEFAULT_NODATA,
        })
        .collect();
    ScalarRaster::new(dem.grid.clone(), values, DEFAULT_NODATA)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthConfig {
    pub percentile: f64,
    /// Components with fewer pixels are skipped. 1 disables the filter.
    pub min_component_size: usize,
}

impl Default for DepthConfig {
    fn default() -> Self {
        DepthConfig {
            percentile: DEFAULT_PERCENTILE,
            min_component_size: 1,
        }
    }
}

/// Everything the depth pipeline produces for one scene.
#[derive(Debug, Clone)]
pub struct DepthEstimate {
    pub depth: DepthMap,
    pub levels: WaterLevelTable,
    pub labels: ComponentLabelMap,
}

/// Binarize, label, extract waterlines and fill depth for an aggregated
/// semantic raster on the DEM's grid.
pub fn estimate_depth(sem: &CodeRaster, dem: &ScalarRaster, cfg: &DepthConfig) -> Result<DepthEstimate> {
    sem.grid.ensure_aligned(&dem.grid, "semantic mask vs DEM")?;
    ensure_percentile(cfg.percentile)?;

    let binary = mask::binarize_flood(sem);
    let labels = mask::label_components_8(&binary);
    // Distinct components are never 8-adjacent, so eroding the whole mask
    // erodes every component by itself.
    let ring = mask::reject_edge_pixels(&mask::inner_boundary(&binary));

    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); labels.count + 1];
    for ((&b, &l), &z) in ring.codes.iter().zip(&labels.labels.codes).zip(&dem.values) {
        if b != 0 && z != dem.nodata {
            samples[l as usize].push(z);
        }
    }
    let sizes = labels.sizes();

    let mut rows = Vec::with_capacity(labels.count);
    for k in 1..=labels.count {
        let row = if sizes[k] < cfg.min_component_size {
            WaterLevel {
                label: k as u32,
                pixels: sizes[k],
                n_boundary: samples[k].len(),
                z_water: None,
                status: LevelStatus::Skipped,
            }
        } else {
            WaterLevel::from_samples(k as u32, sizes[k], &mut samples[k], cfg.percentile)
        };
        match row.z_water {
            Some(z) => log::debug!(
                "component {k}: {} px, {} waterline samples, z_water {z:.3} m",
                row.pixels,
                row.n_boundary
            ),
            None => log::debug!("component {k}: {} px, {}", row.pixels, row.status),
        }
        rows.push(row);
    }
    let levels = WaterLevelTable { rows };
    let depth = compute_depth(&labels, dem, &levels)?;
    Ok(DepthEstimate { depth, levels, labels })
}
