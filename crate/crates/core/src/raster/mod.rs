//! Grid model shared by every stage of the pipeline.
//!
//! Rasters are north-up, row-major, with the origin at the top-left corner
//! of pixel `(0, 0)`. Pixel cells are half-open, so every world point maps
//! to exactly one `(col, row)`.

mod ascii;
mod resample;

pub use ascii::{
    parse_ascii_body, read_ascii_grid, read_code_grid, read_semantic_grid, write_ascii_grid, write_code_grid,
};
pub use resample::{resample_to_grid, Resampling};

use crate::error::{Error, Result};

/// Nodata sentinel used for elevation and depth rasters unless a file says otherwise.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// Reserved code for missing cells in semantic rasters.
pub const DEFAULT_NODATA_CODE: u32 = 255;

/// Dimensions, affine geotransform and coordinate reference of a raster.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub ncols: usize,
    pub nrows: usize,
    pub origin_x: f64,
    pub origin_y: f64,
    pub pixel_size_x: f64,
    pub pixel_size_y: f64,
    /// Opaque CRS identifier, e.g. `EPSG:4326`. Empty when unknown.
    pub crs_id: String,
}

impl GridSpec {
    pub fn new(
        ncols: usize,
        nrows: usize,
        origin: (f64, f64),
        pixel_size: (f64, f64),
        crs_id: impl Into<String>,
    ) -> Result<Self> {
        let grid = GridSpec {
            ncols,
            nrows,
            origin_x: origin.0,
            origin_y: origin.1,
            pixel_size_x: pixel_size.0,
            pixel_size_y: pixel_size.1,
            crs_id: crs_id.into(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ncols == 0 || self.nrows == 0 {
            return Err(Error::Contract(format!(
                "grid must have at least one row and column, got {}x{}",
                self.ncols, self.nrows
            )));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.pixel_size_x) || !positive(self.pixel_size_y) {
            return Err(Error::Contract(format!(
                "pixel sizes must be positive, got ({}, {})",
                self.pixel_size_x, self.pixel_size_y
            )));
        }
        if !self.origin_x.is_finite() || !self.origin_y.is_finite() {
            return Err(Error::Contract("grid origin must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// True when every field matches, which is what fusing two rasters requires.
    pub fn is_aligned(&self, other: &GridSpec) -> bool {
        self == other
    }

    pub fn ensure_aligned(&self, other: &GridSpec, what: &str) -> Result<()> {
        if self.is_aligned(other) {
            Ok(())
        } else {
            Err(Error::Alignment(format!(
                "{what}: grids differ ({} vs {}); resample with `align` first",
                self.describe(),
                other.describe()
            )))
        }
    }

    fn describe(&self) -> String {
        format!(
            "{}x{} @ ({}, {}) px ({}, {}) crs '{}'",
            self.ncols,
            self.nrows,
            self.origin_x,
            self.origin_y,
            self.pixel_size_x,
            self.pixel_size_y,
            self.crs_id
        )
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.ncols + col
    }

    pub fn contains(&self, col: i64, row: i64) -> bool {
        col >= 0 && row >= 0 && (col as usize) < self.ncols && (row as usize) < self.nrows
    }

    /// Pixel containing the world point. The result may be out of range.
    pub fn world_to_pixel(&self, x: f64, y: f64) -> (i64, i64) {
        let col = ((x - self.origin_x) / self.pixel_size_x).floor();
        let row = ((self.origin_y - y) / self.pixel_size_y).floor();
        (col as i64, row as i64)
    }

    /// World coordinates of the pixel center.
    pub fn pixel_to_world(&self, col: i64, row: i64) -> (f64, f64) {
        (
            self.origin_x + (col as f64 + 0.5) * self.pixel_size_x,
            self.origin_y - (row as f64 + 0.5) * self.pixel_size_y,
        )
    }

    /// Sub-grid starting at `(col0, row0)`; world coordinates are preserved.
    pub fn window(&self, col0: usize, row0: usize, width: usize, height: usize) -> GridSpec {
        GridSpec {
            ncols: width,
            nrows: height,
            origin_x: self.origin_x + col0 as f64 * self.pixel_size_x,
            origin_y: self.origin_y - row0 as f64 * self.pixel_size_y,
            pixel_size_x: self.pixel_size_x,
            pixel_size_y: self.pixel_size_y,
            crs_id: self.crs_id.clone(),
        }
    }
}

/// Free-function form of [`GridSpec::world_to_pixel`].
pub fn world_to_pixel(grid: &GridSpec, x: f64, y: f64) -> (i64, i64) {
    grid.world_to_pixel(x, y)
}

/// Free-function form of [`GridSpec::pixel_to_world`].
pub fn pixel_to_world(grid: &GridSpec, col: i64, row: i64) -> (f64, f64) {
    grid.pixel_to_world(col, row)
}

/// Operations shared by scalar and code rasters.
pub trait Raster: Sized {
    fn grid(&self) -> &GridSpec;

    fn is_nodata_at(&self, idx: usize) -> bool;

    /// Copy of the `width` x `height` block starting at `(col0, row0)`.
    /// The block must lie inside the raster.
    fn window(&self, col0: usize, row0: usize, width: usize, height: usize) -> Self;

    fn nodata_count(&self) -> usize {
        (0..self.grid().len())
            .filter(|&i| self.is_nodata_at(i))
            .count()
    }
}

fn copy_window<T: Copy>(
    grid: &GridSpec,
    data: &[T],
    col0: usize,
    row0: usize,
    width: usize,
    height: usize,
) -> Vec<T> {
    assert!(col0 + width <= grid.ncols && row0 + height <= grid.nrows);
    let mut out = Vec::with_capacity(width * height);
    for row in row0..row0 + height {
        let start = grid.index(col0, row);
        out.extend_from_slice(&data[start..start + width]);
    }
    out
}

/// Gridded 64-bit reals: elevations or depths in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarRaster {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub nodata: f64,
}

impl ScalarRaster {
    pub fn new(grid: GridSpec, values: Vec<f64>, nodata: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Contract(format!(
                "raster has {} values, grid needs {}",
                values.len(),
                grid.len()
            )));
        }
        if !nodata.is_finite() {
            return Err(Error::Contract("nodata sentinel must be finite".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!(
                "non-finite value at index {i}; store nodata instead"
            )));
        }
        Ok(ScalarRaster {
            grid,
            values,
            nodata,
        })
    }

    pub fn filled(grid: GridSpec, value: f64, nodata: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![value; n], nodata)
    }

    /// Calls `f(col, row)` in raster order.
    pub fn from_fn(grid: GridSpec, nodata: f64, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let values = (0..grid.nrows)
            .flat_map(|row| (0..grid.ncols).map(move |col| (col, row)))
            .map(|(col, row)| f(col, row))
            .collect();
        Self::new(grid, values, nodata)
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.values[self.grid.index(col, row)]
    }

    /// Value at `(col, row)`, or `None` for nodata.
    pub fn value(&self, col: usize, row: usize) -> Option<f64> {
        let v = self.get(col, row);
        (v != self.nodata).then_some(v)
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata
    }
}

impl Raster for ScalarRaster {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn is_nodata_at(&self, idx: usize) -> bool {
        self.values[idx] == self.nodata
    }

    fn window(&self, col0: usize, row0: usize, width: usize, height: usize) -> Self {
        ScalarRaster {
            grid: self.grid.window(col0, row0, width, height),
            values: copy_window(&self.grid, &self.values, col0, row0, width, height),
            nodata: self.nodata,
        }
    }
}

/// Gridded non-negative integer codes: semantic classes, binary masks, labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeRaster {
    pub grid: GridSpec,
    pub codes: Vec<u32>,
    pub nodata_code: u32,
}

impl CodeRaster {
    pub fn new(grid: GridSpec, codes: Vec<u32>, nodata_code: u32) -> Result<Self> {
        grid.validate()?;
        if codes.len() != grid.len() {
            return Err(Error::Contract(format!(
                "raster has {} codes, grid needs {}",
                codes.len(),
                grid.len()
            )));
        }
        Ok(CodeRaster {
            grid,
            codes,
            nodata_code,
        })
    }

    pub fn filled(grid: GridSpec, code: u32, nodata_code: u32) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![code; n], nodata_code)
    }

    pub fn from_fn(grid: GridSpec, nodata_code: u32, mut f: impl FnMut(usize, usize) -> u32) -> Result<Self> {
        let codes = (0..grid.nrows)
            .flat_map(|row| (0..grid.ncols).map(move |col| (col, row)))
            .map(|(col, row)| f(col, row))
            .collect();
        Self::new(grid, codes, nodata_code)
    }

    pub fn get(&self, col: usize, row: usize) -> u32 {
        self.codes[self.grid.index(col, row)]
    }

    pub fn set(&mut self, col: usize, row: usize, code: u32) {
        let i = self.grid.index(col, row);
        self.codes[i] = code;
    }

    pub fn count(&self, code: u32) -> usize {
        self.codes.iter().filter(|&&c| c == code).count()
    }
}

impl Raster for CodeRaster {
    fn grid(&self) -> &GridSpec {
        &self.grid
    }

    fn is_nodata_at(&self, idx: usize) -> bool {
        self.codes[idx] == self.nodata_code
    }

    fn window(&self, col0: usize, row0: usize, width: usize, height: usize) -> Self {
        CodeRaster {
            grid: self.grid.window(col0, row0, width, height),
            codes: copy_window(&self.grid, &self.codes, col0, row0, width, height),
            nodata_code: self.nodata_code,
        }
    }
}
