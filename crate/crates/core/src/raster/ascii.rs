//! ESRI ASCII Grid codec.
//!
//! ```text
//! ncols         4
//! nrows         2
//! xllcorner     0.0
//! yllcorner     0.0
//! cellsize      1.0
//! NODATA_value  -9999
//! 1 2 3 4
//! 5 6 -9999 8
//! ```
//!
//! The CRS identifier has no slot in the header, so it travels in a `.prj`
//! sidecar next to the grid when non-empty.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{CodeRaster, GridSpec, ScalarRaster, DEFAULT_NODATA, DEFAULT_NODATA_CODE};
use crate::error::{Error, Result};

fn prj_path(path: &Path) -> PathBuf {
    path.with_extension("prj")
}

#[derive(Default)]
struct Header {
    ncols: Option<usize>,
    nrows: Option<usize>,
    xll: Option<(f64, bool)>,
    yll: Option<(f64, bool)>,
    cellsize: Option<f64>,
    nodata: Option<f64>,
}

pub fn read_ascii_grid(path: impl AsRef<Path>) -> Result<ScalarRaster> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let crs_id = fs::read_to_string(prj_path(path))
        .map(|s| s.trim().to_string())
        .unwrap_or_default();
    parse_ascii_grid(&text, &path.display().to_string(), crs_id)
}

pub(crate) fn parse_ascii_grid(text: &str, source: &str, crs_id: String) -> Result<ScalarRaster> {
    let err = |line: usize, message: String| Error::Parse {
        path: source.to_string(),
        line,
        message,
    };

    let mut header = Header::default();
    let mut lines = text.lines().enumerate().peekable();

    while let Some(&(idx, line)) = lines.peek() {
        let mut tokens = line.split_whitespace();
        let Some(key) = tokens.next() else {
            lines.next();
            continue;
        };
        if key.parse::<f64>().is_ok() {
            break;
        }
        let lineno = idx + 1;
        let value = tokens
            .next()
            .ok_or_else(|| err(lineno, format!("header keyword '{key}' has no value")))?;
        if tokens.next().is_some() {
            return Err(err(lineno, format!("trailing tokens after header '{key}'")));
        }
        let real = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(lineno, format!("'{key}' value '{value}' is not a finite number")))
        };
        let count = || {
            value
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| err(lineno, format!("'{key}' value '{value}' is not a positive integer")))
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => header.ncols = Some(count()?),
            "nrows" => header.nrows = Some(count()?),
            "xllcorner" => header.xll = Some((real()?, false)),
            "xllcenter" => header.xll = Some((real()?, true)),
            "yllcorner" => header.yll = Some((real()?, false)),
            "yllcenter" => header.yll = Some((real()?, true)),
            "cellsize" => header.cellsize = Some(real()?),
            "nodata_value" => header.nodata = Some(real()?),
            _ => return Err(err(lineno, format!("unknown header keyword '{key}'"))),
        }
        lines.next();
    }

    let header_end = lines.peek().map_or(text.lines().count(), |&(i, _)| i) + 1;
    let missing = |name: &str| err(header_end, format!("header is missing '{name}'"));
    let ncols = header.ncols.ok_or_else(|| missing("ncols"))?;
    let nrows = header.nrows.ok_or_else(|| missing("nrows"))?;
    let cellsize = header.cellsize.ok_or_else(|| missing("cellsize"))?;
    let (xll, x_center) = header.xll.ok_or_else(|| missing("xllcorner"))?;
    let (yll, y_center) = header.yll.ok_or_else(|| missing("yllcorner"))?;
    let nodata = header.nodata.unwrap_or(DEFAULT_NODATA);
    if cellsize <= 0.0 {
        return Err(err(header_end, format!("cellsize must be positive, got {cellsize}")));
    }

    let origin_x = if x_center { xll - cellsize / 2.0 } else { xll };
    let yll = if y_center { yll - cellsize / 2.0 } else { yll };
    let origin_y = yll + nrows as f64 * cellsize;

    let mut values = Vec::with_capacity(ncols * nrows);
    let mut rows_read = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows_read == nrows {
            return Err(err(lineno, format!("more than {nrows} data rows")));
        }
        let before = values.len();
        for token in line.split_whitespace() {
            let v: f64 = token
                .parse()
                .map_err(|_| err(lineno, format!("non-numeric cell '{token}'")))?;
            if !v.is_finite() {
                return Err(err(lineno, format!("non-finite cell '{token}'")));
            }
            values.push(v);
        }
        let found = values.len() - before;
        if found != ncols {
            return Err(err(lineno, format!("row has {found} cells, expected {ncols}")));
        }
        rows_read += 1;
    }
    if rows_read != nrows {
        return Err(err(
            text.lines().count(),
            format!("found {rows_read} data rows, expected {nrows}"),
        ));
    }

    let grid = GridSpec {
        ncols,
        nrows,
        origin_x,
        origin_y,
        pixel_size_x: cellsize,
        pixel_size_y: cellsize,
        crs_id,
    };
    ScalarRaster::new(grid, values, nodata)
}

/// Parses grid text that did not come from a file, e.g. an HTTP body.
pub fn parse_ascii_body(text: &str, crs_id: &str) -> Result<ScalarRaster> {
    parse_ascii_grid(text, "<response>", crs_id.to_string())
}

/// Lower-left y whose read-back `yll + nrows * cellsize` reproduces `origin_y`
/// bit-for-bit, when such a value sits within a few ulps of the naive one.
fn lower_left_y(origin_y: f64, nrows: usize, cellsize: f64) -> f64 {
    let height = nrows as f64 * cellsize;
    let naive = origin_y - height;
    if naive + height == origin_y {
        return naive;
    }
    let (mut up, mut down) = (naive, naive);
    for _ in 0..64 {
        up = up.next_up();
        down = down.next_down();
        if up + height == origin_y {
            return up;
        }
        if down + height == origin_y {
            return down;
        }
    }
    log::warn!("origin y {origin_y} is not exactly representable through yllcorner; writing nearest");
    naive
}

pub(crate) fn format_ascii_grid(r: &ScalarRaster) -> Result<String> {
    let g = &r.grid;
    if g.pixel_size_x != g.pixel_size_y {
        return Err(Error::UnsupportedFormat(format!(
            "ASCII grid needs square cells, got {} x {}",
            g.pixel_size_x, g.pixel_size_y
        )));
    }
    let cellsize = g.pixel_size_x;
    let mut out = String::with_capacity(g.len() * 8 + 128);
    // Display for f64 prints the shortest decimal that parses back to the same bits.
    let _ = writeln!(out, "ncols {}", g.ncols);
    let _ = writeln!(out, "nrows {}", g.nrows);
    let _ = writeln!(out, "xllcorner {}", g.origin_x);
    let _ = writeln!(out, "yllcorner {}", lower_left_y(g.origin_y, g.nrows, cellsize));
    let _ = writeln!(out, "cellsize {cellsize}");
    let _ = writeln!(out, "NODATA_value {}", r.nodata);
    for row in r.values.chunks(g.ncols) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_ascii_grid(r: &ScalarRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = format_ascii_grid(r)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    let prj = prj_path(path);
    if r.grid.crs_id.is_empty() {
        if prj.exists() {
            fs::remove_file(&prj).map_err(|e| Error::io(&prj, e))?;
        }
    } else {
        fs::write(&prj, format!("{}\n", r.grid.crs_id)).map_err(|e| Error::io(&prj, e))?;
    }
    Ok(())
}

/// Reads an integer-coded grid. Cells equal to `NODATA_value` become
/// `nodata_code`; every other cell must be a non-negative integer.
pub fn read_code_grid(path: impl AsRef<Path>, nodata_code: u32) -> Result<CodeRaster> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let crs_id = fs::read_to_string(prj_path(path))
        .map(|s| s.trim().to_string())
        .unwrap_or_default();
    let scalar = parse_ascii_grid(&text, &path.display().to_string(), crs_id)?;
    let first_data_line = text
        .lines()
        .position(|l| l.split_whitespace().next().is_some_and(|t| t.parse::<f64>().is_ok()))
        .unwrap_or(0)
        + 1;
    let mut codes = Vec::with_capacity(scalar.values.len());
    for (i, &v) in scalar.values.iter().enumerate() {
        if v == scalar.nodata {
            codes.push(nodata_code);
        } else if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
            codes.push(v as u32);
        } else {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: first_data_line + i / scalar.grid.ncols,
                message: format!("cell {v} is not a non-negative integer code"),
            });
        }
    }
    CodeRaster::new(scalar.grid, codes, nodata_code)
}

pub fn read_semantic_grid(path: impl AsRef<Path>) -> Result<CodeRaster> {
    read_code_grid(path, DEFAULT_NODATA_CODE)
}

pub fn write_code_grid(r: &CodeRaster, path: impl AsRef<Path>) -> Result<()> {
    let scalar = ScalarRaster {
        grid: r.grid.clone(),
        values: r.codes.iter().map(|&c| c as f64).collect(),
        nodata: r.nodata_code as f64,
    };
    write_ascii_grid(&scalar, path)
}
