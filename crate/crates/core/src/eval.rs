//! Depth accuracy against a reference depth raster.
//!
//! Scoring is restricted to open-flood pixels: predicted FLOOD with a valid
//! reference value. Tiles are combined with pixel-count weights.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hydro::DepthMap;
use crate::mask::SemanticClass;
use crate::raster::{CodeRaster, ScalarRaster};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileScore {
    pub tile_id: String,
    /// Scored pixels.
    pub n: usize,
    /// Mask pixels left out because the prediction was nodata there.
    pub excluded: usize,
    pub mse: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tile_count: usize,
    pub total_pixels: usize,
    pub total_excluded: usize,
    pub mse_weighted: f64,
    pub sqrt_mse: f64,
    pub rmse_bar: f64,
    pub tiles: Vec<TileScore>,
}

impl EvalReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: "<report>".into(),
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }
}

/// 1 where the semantic raster is FLOOD and the reference holds a value.
pub fn open_flood_mask(sem: &CodeRaster, reference: &ScalarRaster) -> Result<CodeRaster> {
    sem.grid.ensure_aligned(&reference.grid, "semantic mask vs reference")?;
    let flood = SemanticClass::Flood.code();
    let codes = sem
        .codes
        .iter()
        .zip(&reference.values)
        .map(|(&c, &d)| u32::from(c == flood && d != reference.nodata))
        .collect();
    CodeRaster::new(sem.grid.clone(), codes, sem.nodata_code)
}

pub fn tile_mse(
    pred: &DepthMap,
    reference: &ScalarRaster,
    mask: &CodeRaster,
    tile_id: &str,
) -> Result<TileScore> {
    pred.grid.ensure_aligned(&reference.grid, "prediction vs reference")?;
    pred.grid.ensure_aligned(&mask.grid, "prediction vs mask")?;

    let mut n = 0usize;
    let mut excluded = 0usize;
    let mut sum = 0.0;
    for ((&m, &p), &d) in mask.codes.iter().zip(&pred.values).zip(&reference.values) {
        if m == 0 {
            continue;
        }
        if p == pred.nodata || d == reference.nodata {
            excluded += 1;
            continue;
        }
        let e = p - d;
        sum += e * e;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyTile(tile_id.to_string()));
    }
    if excluded > 0 {
        log::info!("tile {tile_id}: {excluded} mask pixels without a prediction were excluded");
    }
    let mse = sum / n as f64;
    Ok(TileScore {
        tile_id: tile_id.to_string(),
        n,
        excluded,
        mse,
        rmse: mse.sqrt(),
    })
}

/// Pixel-count-weighted MSE, its square root, and the weighted mean of
/// per-tile RMSEs.
pub fn aggregate(scores: &[TileScore]) -> Result<EvalReport> {
    if scores.is_empty() {
        return Err(Error::Contract("cannot aggregate zero tiles".into()));
    }
    let total: usize = scores.iter().map(|s| s.n).sum();
    if total == 0 {
        return Err(Error::Contract("aggregate needs at least one scored pixel".into()));
    }
    let weight = total as f64;
    let mse_weighted = scores.iter().map(|s| s.n as f64 * s.mse).sum::<f64>() / weight;
    let rmse_bar = scores.iter().map(|s| s.n as f64 * s.mse.sqrt()).sum::<f64>() / weight;
    Ok(EvalReport {
        tile_count: scores.len(),
        total_pixels: total,
        total_excluded: scores.iter().map(|s| s.excluded).sum(),
        mse_weighted,
        sqrt_mse: mse_weighted.sqrt(),
        rmse_bar,
        tiles: scores.to_vec(),
    })
}

/// One line of a multi-tile manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTile {
    pub tile_id: String,
    pub pred: PathBuf,
    pub reference: PathBuf,
    pub mask: PathBuf,
}

/// Reads a whitespace-separated manifest of `tile_id pred ref mask` lines.
/// Relative paths resolve against the manifest's directory.
pub fn read_eval_manifest(path: impl AsRef<Path>) -> Result<Vec<EvalTile>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut tiles = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [id, pred, reference, mask] = fields[..] else {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                message: format!("expected 4 fields (tile_id pred ref mask), got {}", fields.len()),
            });
        };
        tiles.push(EvalTile {
            tile_id: id.to_string(),
            pred: base.join(pred),
            reference: base.join(reference),
            mask: base.join(mask),
        });
    }
    Ok(tiles)
}
