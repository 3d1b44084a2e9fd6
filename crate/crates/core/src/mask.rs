//! Semantic class aggregation and binary-mask morphology.
//!
//! Binary masks are [`CodeRaster`]s where any nonzero code counts as
//! foreground. The structuring element is the fixed 3x3 square anchored at its
//! center; pixels outside the raster are background.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::raster::{CodeRaster, GridSpec};

/// Aggregated semantic roles and their codes in an aggregated raster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemanticClass {
    Background = 0,
    Flood = 1,
    Building = 2,
}

impl SemanticClass {
    pub fn code(self) -> u32 {
        self as u32
    }
}

impl FromStr for SemanticClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "BACKGROUND" => Ok(SemanticClass::Background),
            "FLOOD" => Ok(SemanticClass::Flood),
            "BUILDING" => Ok(SemanticClass::Building),
            other => Err(Error::Contract(format!(
                "unknown semantic role '{other}' (expected FLOOD, BUILDING or BACKGROUND)"
            ))),
        }
    }
}

impl fmt::Display for SemanticClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticClass::Background => "BACKGROUND",
            SemanticClass::Flood => "FLOOD",
            SemanticClass::Building => "BUILDING",
        })
    }
}

/// FloodNet class names with their conventional label indices.
pub const FLOODNET_CLASS_MAP: &str = "\
# FloodNet label indices and their aggregated roles.
code.Background = 0
code.Building-Flooded = 1
code.Building-Non-Flooded = 2
code.Road-Flooded = 3
code.Road-Non-Flooded = 4
code.Water = 5
code.Tree = 6
code.Vehicle = 7
code.Pool = 8
code.Grass = 9

role.Water = FLOOD
role.Road-Flooded = FLOOD
role.Building-Flooded = BUILDING
role.Building-Non-Flooded = BUILDING
";

/// Mapping from source class codes to aggregated roles. Codes not declared in
/// the map are background.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMap {
    names: Vec<(String, u32)>,
    roles: HashMap<u32, SemanticClass>,
}

impl ClassMap {
    pub fn floodnet() -> Self {
        Self::parse(FLOODNET_CLASS_MAP).expect("built-in class map parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }

    /// Parses `code.<name> = <int>` and `role.<name> = FLOOD|BUILDING|BACKGROUND`
    /// lines. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: "<class map>".into(),
            line,
            message,
        };
        let mut codes: Vec<(String, u32)> = Vec::new();
        let mut named_roles: Vec<(String, SemanticClass, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(lineno, format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(name) = key.strip_prefix("code.") {
                let code: u32 = value
                    .parse()
                    .map_err(|_| err(lineno, format!("code '{value}' is not a non-negative integer")))?;
                if let Some((other, _)) = codes.iter().find(|(n, c)| *c == code || n == name) {
                    return Err(err(lineno, format!("'{name}' = {code} clashes with '{other}'")));
                }
                codes.push((name.to_string(), code));
            } else if let Some(name) = key.strip_prefix("role.") {
                let role = value.parse().map_err(|e: Error| err(lineno, e.to_string()))?;
                named_roles.push((name.to_string(), role, lineno));
            } else {
                return Err(err(lineno, format!("key '{key}' must start with 'code.' or 'role.'")));
            }
        }

        let mut roles = HashMap::new();
        for (name, role, lineno) in named_roles {
            let &(_, code) = codes
                .iter()
                .find(|(n, _)| *n == name)
                .ok_or_else(|| err(lineno, format!("role given for undeclared class '{name}'")))?;
            roles.insert(code, role);
        }
        Ok(ClassMap { names: codes, roles })
    }

    pub fn role(&self, code: u32) -> SemanticClass {
        self.roles.get(&code).copied().unwrap_or(SemanticClass::Background)
    }

    pub fn code_of(&self, name: &str) -> Option<u32> {
        self.names.iter().find(|(n, _)| n == name).map(|&(_, c)| c)
    }
}

/// Replaces every source code by its aggregated role code (0 background,
/// 1 flood, 2 building). Source nodata becomes background.
pub fn aggregate_classes(src: &CodeRaster, map: &ClassMap) -> CodeRaster {
    let codes = src
        .codes
        .iter()
        .map(|&c| {
            if c == src.nodata_code {
                SemanticClass::Background.code()
            } else {
                map.role(c).code()
            }
        })
        .collect();
    CodeRaster {
        grid: src.grid.clone(),
        codes,
        nodata_code: src.nodata_code,
    }
}

/// 1 where the aggregated raster is FLOOD, 0 elsewhere.
pub fn binarize_flood(sem: &CodeRaster) -> CodeRaster {
    let flood = SemanticClass::Flood.code();
    CodeRaster {
        grid: sem.grid.clone(),
        codes: sem.codes.iter().map(|&c| u32::from(c == flood)).collect(),
        nodata_code: sem.nodata_code,
    }
}

/// Raster of 8-connected component labels: 0 for background, 1..=count for
/// components in raster-scan order of their first pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLabelMap {
    pub labels: CodeRaster,
    pub count: usize,
}

impl ComponentLabelMap {
    pub fn grid(&self) -> &GridSpec {
        &self.labels.grid
    }

    /// Binary mask of a single component.
    pub fn component_mask(&self, k: u32) -> CodeRaster {
        CodeRaster {
            grid: self.labels.grid.clone(),
            codes: self.labels.codes.iter().map(|&l| u32::from(l == k)).collect(),
            nodata_code: self.labels.nodata_code,
        }
    }

    /// Pixel count per label; index 0 holds the background count.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count + 1];
        for &l in &self.labels.codes {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let (ra, rb) = (find(parent, a), find(parent, b));
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Two-pass union-find labeling with 8-connectivity.
pub fn label_components_8(mask: &CodeRaster) -> ComponentLabelMap {
    let (w, h) = (mask.grid.ncols, mask.grid.nrows);
    let mut provisional = vec![0u32; w * h];
    // parent[0] is the background sentinel.
    let mut parent: Vec<u32> = vec![0];

    for row in 0..h {
        for col in 0..w {
            let i = row * w + col;
            if mask.codes[i] == 0 {
                continue;
            }
            // Already-visited neighbors: W, NW, N, NE.
            let mut neighbors = [0u32; 4];
            if col > 0 {
                neighbors[0] = provisional[i - 1];
            }
            if row > 0 {
                let up = i - w;
                if col > 0 {
                    neighbors[1] = provisional[up - 1];
                }
                neighbors[2] = provisional[up];
                if col + 1 < w {
                    neighbors[3] = provisional[up + 1];
                }
            }
            let mut label = 0;
            for &n in neighbors.iter().filter(|&&n| n != 0) {
                label = if label == 0 { find(&mut parent, n) } else { union(&mut parent, label, n) };
            }
            if label == 0 {
                label = parent.len() as u32;
                parent.push(label);
            }
            provisional[i] = label;
        }
    }

    let mut final_label = vec![0u32; parent.len()];
    let mut count = 0u32;
    for p in provisional.iter_mut() {
        if *p == 0 {
            continue;
        }
        let root = find(&mut parent, *p) as usize;
        if final_label[root] == 0 {
            count += 1;
            final_label[root] = count;
        }
        *p = final_label[root];
    }

    ComponentLabelMap {
        labels: CodeRaster {
            grid: mask.grid.clone(),
            codes: provisional,
            nodata_code: mask.nodata_code,
        },
        count: count as usize,
    }
}

/// Erosion by the 3x3 square: a pixel survives iff its whole neighborhood is
/// foreground. Computed as a row pass followed by a column pass.
pub fn erode(mask: &CodeRaster) -> CodeRaster {
    let (w, h) = (mask.grid.ncols, mask.grid.nrows);
    let fg: Vec<bool> = mask.codes.iter().map(|&c| c != 0).collect();

    let mut horizontal = vec![false; w * h];
    for row in 0..h {
        let line = &fg[row * w..(row + 1) * w];
        for col in 1..w.saturating_sub(1) {
            horizontal[row * w + col] = line[col - 1] && line[col] && line[col + 1];
        }
    }
    let mut codes = vec![0u32; w * h];
    for row in 1..h.saturating_sub(1) {
        for col in 0..w {
            let i = row * w + col;
            codes[i] = u32::from(horizontal[i - w] && horizontal[i] && horizontal[i + w]);
        }
    }
    CodeRaster {
        grid: mask.grid.clone(),
        codes,
        nodata_code: mask.nodata_code,
    }
}

/// Foreground pixels removed by one erosion: the waterline ring.
pub fn inner_boundary(component: &CodeRaster) -> CodeRaster {
    let eroded = erode(component);
    let codes = component
        .codes
        .iter()
        .zip(&eroded.codes)
        .map(|(&c, &e)| u32::from(c != 0 && e == 0))
        .collect();
    CodeRaster {
        grid: component.grid.clone(),
        codes,
        nodata_code: component.nodata_code,
    }
}

pub fn is_frame_pixel(grid: &GridSpec, col: usize, row: usize) -> bool {
    col == 0 || row == 0 || col + 1 == grid.ncols || row + 1 == grid.nrows
}

/// Clears boundary pixels on the outermost rows and columns, which mark
/// where water meets the image edge rather than dry land.
pub fn reject_edge_pixels(boundary: &CodeRaster) -> CodeRaster {
    let mut out = boundary.clone();
    let g = &boundary.grid;
    for row in 0..g.nrows {
        for col in 0..g.ncols {
            if is_frame_pixel(g, col, row) {
                out.set(col, row, 0);
            }
        }
    }
    out
}
