//! Flood depth estimation from a semantic flood mask and a digital elevation
//! model.
//!
//! The pipeline treats every 8-connected flood component as a basin with a
//! flat water surface. The surface elevation is taken as a high percentile of
//! the terrain under the component's waterline (the pixels removed by one 3x3
//! erosion, minus those on the image frame), and depth is
//! `max(0, surface - terrain)` over the component.
//!
//! ```no_run
//! use flood_depth::hydro::{estimate_depth, DepthConfig};
//! use flood_depth::raster::{read_ascii_grid, read_semantic_grid, write_ascii_grid};
//!
//! let sem = read_semantic_grid("mask.asc")?;
//! let dem = read_ascii_grid("dem.asc")?;
//! let est = estimate_depth(&sem, &dem, &DepthConfig::default())?;
//! write_ascii_grid(&est.depth, "depth.asc")?;
//! # Ok::<(), flood_depth::Error>(())
//! ```

pub mod cli;
pub mod dem_fetch;
pub mod error;
pub mod eval;
pub mod hydro;
pub mod mask;
pub mod raster;
pub mod synth;
pub mod tiling;

pub use error::{Error, Result};
