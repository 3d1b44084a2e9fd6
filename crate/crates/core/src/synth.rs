//! Analytic terrain and ground-truth flood scenes.
//!
//! Bowls are inverted pyramids (Chebyshev distance to the basin center), so a
//! water level floods an axis-aligned square of exactly known pixels.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::hydro::DepthMap;
use crate::mask::SemanticClass;
use crate::raster::{CodeRaster, GridSpec, ScalarRaster, DEFAULT_NODATA, DEFAULT_NODATA_CODE};

/// Dry pixels required between any flooded pixel and the raster frame.
pub const DRY_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerrainKind {
    Plane,
    PyramidBowl,
    TwoBasins,
}

impl FromStr for TerrainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "plane" => Ok(TerrainKind::Plane),
            "pyramid_bowl" | "bowl" => Ok(TerrainKind::PyramidBowl),
            "two_basins" => Ok(TerrainKind::TwoBasins),
            other => Err(Error::Contract(format!(
                "unknown terrain kind '{other}' (expected plane, pyramid_bowl or two_basins)"
            ))),
        }
    }
}

impl fmt::Display for TerrainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TerrainKind::Plane => "plane",
            TerrainKind::PyramidBowl => "pyramid_bowl",
            TerrainKind::TwoBasins => "two_basins",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerrainParams {
    pub ncols: usize,
    pub nrows: usize,
    /// Meters of rise per pixel.
    pub slope: f64,
    pub base: f64,
    /// Height of the dividing ridge above `base` (two-basin terrain only).
    pub ridge_height: f64,
    pub pixel_size: f64,
    pub crs_id: String,
}

impl TerrainParams {
    pub fn square(size: usize, slope: f64) -> Self {
        TerrainParams {
            ncols: size,
            nrows: size,
            slope,
            base: 0.0,
            ridge_height: 5.0,
            pixel_size: 1.0,
            crs_id: String::new(),
        }
    }

    fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(
            self.ncols,
            self.nrows,
            (0.0, self.nrows as f64 * self.pixel_size),
            (self.pixel_size, self.pixel_size),
            self.crs_id.clone(),
        )
    }
}

/// A basin: the column range it owns and its lowest point.
#[derive(Debug, Clone, PartialEq)]
pub struct Basin {
    pub cols: std::ops::Range<usize>,
    pub center: (f64, f64),
    pub min_elevation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Terrain {
    pub kind: TerrainKind,
    pub params: TerrainParams,
    pub dem: ScalarRaster,
    pub basins: Vec<Basin>,
    /// Elevation of the dividing ridge, when there is one.
    pub ridge: Option<f64>,
}

/// Builds one of the analytic surfaces:
/// plane `base + slope*col`, a single pyramid bowl centered in the raster,
/// or two bowls split by a ridge column at `base + ridge_height`.
pub fn gen_terrain(kind: TerrainKind, params: &TerrainParams) -> Result<Terrain> {
    if !(params.slope.is_finite() && params.slope > 0.0) {
        return Err(Error::Contract(format!("slope must be positive, got {}", params.slope)));
    }
    let grid = params.grid()?;
    let (w, h) = (params.ncols, params.nrows);
    let (slope, base) = (params.slope, params.base);
    let cy = (h - 1) as f64 / 2.0;
    let bowl = move |col: usize, row: usize, cx: f64| {
        base + slope * (col as f64 - cx).abs().max((row as f64 - cy).abs())
    };

    match kind {
        TerrainKind::Plane => {
            let dem = ScalarRaster::from_fn(grid, DEFAULT_NODATA, |c, _| base + slope * c as f64)?;
            Ok(Terrain {
                kind,
                params: params.clone(),
                dem,
                basins: vec![Basin { cols: 0..w, center: (0.0, cy), min_elevation: base }],
                ridge: None,
            })
        }
        TerrainKind::PyramidBowl => {
            let cx = (w - 1) as f64 / 2.0;
            let dem = ScalarRaster::from_fn(grid, DEFAULT_NODATA, |c, r| bowl(c, r, cx))?;
            let min_elevation = dem.values.iter().copied().fold(f64::INFINITY, f64::min);
            Ok(Terrain {
                kind,
                params: params.clone(),
                dem,
                basins: vec![Basin { cols: 0..w, center: (cx, cy), min_elevation }],
                ridge: None,
            })
        }
        TerrainKind::TwoBasins => {
            if w < 5 {
                return Err(Error::Contract("two-basin terrain needs at least 5 columns".into()));
            }
            if !(params.ridge_height.is_finite() && params.ridge_height > 0.0) {
                return Err(Error::Contract("ridge height must be positive".into()));
            }
            let ridge_col = w / 2;
            let left_cx = ridge_col as f64 / 2.0;
            let right_cx = (ridge_col + w - 1) as f64 / 2.0;
            let ridge = base + params.ridge_height;
            let dem = ScalarRaster::from_fn(grid, DEFAULT_NODATA, |c, r| {
                if c < ridge_col {
                    bowl(c, r, left_cx)
                } else if c > ridge_col {
                    bowl(c, r, right_cx)
                } else {
                    bowl(c, r, left_cx).max(ridge)
                }
            })?;
            let min_of = |cols: std::ops::Range<usize>| {
                let mut m = f64::INFINITY;
                for r in 0..h {
                    for c in cols.clone() {
                        m = m.min(dem.get(c, r));
                    }
                }
                m
            };
            let basins = vec![
                Basin { cols: 0..ridge_col, center: (left_cx, cy), min_elevation: min_of(0..ridge_col) },
                Basin {
                    cols: ridge_col + 1..w,
                    center: (right_cx, cy),
                    min_elevation: min_of(ridge_col + 1..w),
                },
            ];
            Ok(Terrain { kind, params: params.clone(), dem, basins, ridge: Some(ridge) })
        }
    }
}

/// Terrain plus analytically flooded truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    /// Published DEM, carrying noise when `noise_sigma > 0`.
    pub dem: ScalarRaster,
    pub clean_dem: ScalarRaster,
    /// Aggregated semantic codes: FLOOD inside basins below their level.
    pub truth_mask: CodeRaster,
    pub truth_depth: DepthMap,
    pub truth_levels: Vec<f64>,
    /// 0 outside every flooded area, `b + 1` on basin `b`'s flooded pixels.
    pub basin_map: CodeRaster,
}

/// Floods each basin to its level. Truth comes from the clean terrain; the
/// published DEM gets seeded zero-mean Gaussian noise of `noise_sigma` meters.
pub fn make_scene(terrain: &Terrain, levels: &[f64], noise_sigma: f64, seed: u64) -> Result<SyntheticScene> {
    if levels.len() != terrain.basins.len() {
        return Err(Error::Scene(format!(
            "{} terrain has {} basin(s), got {} level(s)",
            terrain.kind,
            terrain.basins.len(),
            levels.len()
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::Scene(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    if let Some(ridge) = terrain.ridge {
        if let Some(&l) = levels.iter().find(|&&l| l >= ridge) {
            return Err(Error::Scene(format!(
                "level {l} reaches the ridge at {ridge}; the basins would merge"
            )));
        }
    }
    if let Some(&l) = levels.iter().find(|l| !l.is_finite()) {
        return Err(Error::Scene(format!("level {l} is not finite")));
    }

    let clean = &terrain.dem;
    let grid = clean.grid.clone();
    let (w, h) = (grid.ncols, grid.nrows);
    let mut mask = vec![SemanticClass::Background.code(); w * h];
    let mut depth = vec![DEFAULT_NODATA; w * h];
    let mut basin_map = vec![0u32; w * h];

    for (b, (basin, &level)) in terrain.basins.iter().zip(levels).enumerate() {
        for row in 0..h {
            for col in basin.cols.clone() {
                let i = grid.index(col, row);
                let z = clean.values[i];
                if z < level {
                    if col < DRY_MARGIN || row < DRY_MARGIN || col + DRY_MARGIN >= w || row + DRY_MARGIN >= h {
                        return Err(Error::Scene(format!(
                            "basin {} at level {level} floods pixel ({col}, {row}) within {DRY_MARGIN} px of the frame",
                            b + 1
                        )));
                    }
                    mask[i] = SemanticClass::Flood.code();
                    depth[i] = level - z;
                    basin_map[i] = b as u32 + 1;
                }
            }
        }
    }

    let dem = if noise_sigma > 0.0 {
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::Scene(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = clean.values.iter().map(|&z| z + normal.sample(&mut rng)).collect();
        ScalarRaster::new(grid.clone(), values, clean.nodata)?
    } else {
        clean.clone()
    };

    Ok(SyntheticScene {
        dem,
        clean_dem: clean.clone(),
        truth_mask: CodeRaster::new(grid.clone(), mask, DEFAULT_NODATA_CODE)?,
        truth_depth: ScalarRaster::new(grid.clone(), depth, DEFAULT_NODATA)?,
        truth_levels: levels.to_vec(),
        basin_map: CodeRaster::new(grid, basin_map, DEFAULT_NODATA_CODE)?,
    })
}
