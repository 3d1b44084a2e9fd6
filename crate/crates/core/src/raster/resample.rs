use super::{GridSpec, ScalarRaster};
use crate::error::{Error, Result};

/// Distance (in source pixels) below which a sample position is snapped onto
/// a pixel center, so that samples landing on centers reproduce them exactly.
const SNAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resampling {
    #[default]
    Bilinear,
    Nearest,
}

impl std::str::FromStr for Resampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bilinear" => Ok(Resampling::Bilinear),
            "nearest" => Ok(Resampling::Nearest),
            other => Err(Error::Contract(format!(
                "unknown resampling method '{other}' (expected bilinear or nearest)"
            ))),
        }
    }
}

/// Samples `src` at every pixel center of `target`.
///
/// Target centers outside the source extent are nodata. Inside the extent,
/// bilinear interpolation uses the surrounding source centers, clamped to the
/// outermost row/column in the half-pixel border band, and yields nodata if any
/// contributing neighbor is nodata.
pub fn resample_to_grid(src: &ScalarRaster, target: &GridSpec, method: Resampling) -> Result<ScalarRaster> {
    target.validate()?;
    if src.grid.crs_id != target.crs_id {
        return Err(Error::Alignment(format!(
            "source CRS '{}' differs from target CRS '{}'; reproject externally before resampling",
            src.grid.crs_id, target.crs_id
        )));
    }
    if src.grid.is_aligned(target) {
        return Ok(src.clone());
    }

    let sg = &src.grid;
    let mut values = Vec::with_capacity(target.len());
    for row in 0..target.nrows {
        for col in 0..target.ncols {
            let (x, y) = target.pixel_to_world(col as i64, row as i64);
            // Continuous pixel coordinates in the source; pixel (c, r) spans [c, c+1).
            let u = (x - sg.origin_x) / sg.pixel_size_x;
            let v = (sg.origin_y - y) / sg.pixel_size_y;
            let inside = u >= 0.0 && v >= 0.0 && u < sg.ncols as f64 && v < sg.nrows as f64;
            let value = if !inside {
                None
            } else {
                match method {
                    Resampling::Nearest => src.value(u.floor() as usize, v.floor() as usize),
                    Resampling::Bilinear => bilinear(src, u - 0.5, v - 0.5),
                }
            };
            values.push(value.unwrap_or(src.nodata));
        }
    }
    ScalarRaster::new(target.clone(), values, src.nodata)
}

/// Splits a center-relative coordinate into the lower neighbor index and the
/// weight of the upper neighbor, clamping into `[0, n-1]`.
fn axis(t: f64, n: usize) -> (usize, f64) {
    let max = (n - 1) as f64;
    let t = t.clamp(0.0, max);
    let nearest = t.round();
    let t = if (t - nearest).abs() < SNAP { nearest } else { t };
    let i0 = t.floor();
    let frac = t - i0;
    (i0 as usize, frac)
}

fn bilinear(src: &ScalarRaster, fc: f64, fr: f64) -> Option<f64> {
    let (c0, wx) = axis(fc, src.grid.ncols);
    let (r0, wy) = axis(fr, src.grid.nrows);
    let c1 = if wx > 0.0 { c0 + 1 } else { c0 };
    let r1 = if wy > 0.0 { r0 + 1 } else { r0 };

    // Neighbors carrying zero weight are not part of the stencil.
    let z00 = src.value(c0, r0)?;
    let z10 = src.value(c1, r0)?;
    let z01 = src.value(c0, r1)?;
    let z11 = src.value(c1, r1)?;

    let top = z00 + wx * (z10 - z00);
    let bottom = z01 + wx * (z11 - z01);
    Some(top + wy * (bottom - top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::DEFAULT_NODATA;

    fn raster(ncols: usize, nrows: usize, values: Vec<f64>) -> ScalarRaster {
        let g = GridSpec::new(ncols, nrows, (0.0, nrows as f64), (1.0, 1.0), "EPSG:32615").unwrap();
        ScalarRaster::new(g, values, DEFAULT_NODATA).unwrap()
    }

    #[test]
    fn identity_grid_is_value_identical() {
        let src = raster(3, 2, vec![1.5, -2.0, 3.25, 4.0, 5.0, 6.0]);
        for m in [Resampling::Bilinear, Resampling::Nearest] {
            assert_eq!(resample_to_grid(&src, &src.grid, m).unwrap(), src);
        }
    }

    #[test]
    fn midpoint_of_four_centers_is_their_mean() {
        let src = raster(2, 2, vec![0.0, 0.0, 2.0, 2.0]);
        // A single target pixel centered on (1, 1), the midpoint of the four centers.
        let target = GridSpec::new(1, 1, (0.5, 1.5), (1.0, 1.0), "EPSG:32615").unwrap();
        let out = resample_to_grid(&src, &target, Resampling::Bilinear).unwrap();
        assert_eq!(out.values, vec![1.0]);
    }

    #[test]
    fn nearest_picks_containing_pixel() {
        let src = raster(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let target = GridSpec::new(4, 4, (0.0, 2.0), (0.5, 0.5), "EPSG:32615").unwrap();
        let out = resample_to_grid(&src, &target, Resampling::Nearest).unwrap();
        assert_eq!(
            out.values,
            vec![1.0, 1.0, 2.0, 2.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0, 3.0, 3.0, 4.0, 4.0]
        );
    }

    #[test]
    fn outside_coverage_and_nodata_neighbors_yield_nodata() {
        let src = raster(3, 3, vec![1.0, 1.0, 1.0, 1.0, DEFAULT_NODATA, 1.0, 1.0, 1.0, 1.0]);
        let target = GridSpec::new(8, 8, (-1.0, 4.0), (0.5, 0.5), "EPSG:32615").unwrap();
        let out = resample_to_grid(&src, &target, Resampling::Bilinear).unwrap();
        // First target row lies above the source.
        assert!(out.values[..8].iter().all(|&v| v == DEFAULT_NODATA));
        // Target center (0.25, 2.75) sits in the border band next to a valid corner.
        assert_eq!(out.get(2, 2), 1.0);
        // Target center (1.75, 1.75) has the void pixel in its stencil.
        assert_eq!(out.get(5, 4), DEFAULT_NODATA);
    }

    #[test]
    fn crs_mismatch_is_alignment_error() {
        let src = raster(2, 2, vec![0.0; 4]);
        let mut target = src.grid.clone();
        target.crs_id = "EPSG:4326".into();
        assert!(matches!(
            resample_to_grid(&src, &target, Resampling::Bilinear),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn method_parses() {
        assert_eq!("Bilinear".parse::<Resampling>().unwrap(), Resampling::Bilinear);
        assert_eq!("nearest".parse::<Resampling>().unwrap(), Resampling::Nearest);
        assert!("cubic".parse::<Resampling>().is_err());
    }
}
