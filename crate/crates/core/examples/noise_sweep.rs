// How DEM noise degrades the recovered water level and depth.

use flood_depth::eval::{open_flood_mask, tile_mse};
use flood_depth::hydro::{estimate_depth, DepthConfig};
use flood_depth::synth::{gen_terrain, make_scene, TerrainKind, TerrainParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let terrain = gen_terrain(TerrainKind::PyramidBowl, &TerrainParams::square(129, 0.1))?;
    println!("sigma_m\tp\tz_water\trmse_m");
    for sigma in [0.0, 0.05, 0.1, 0.25, 0.5] {
        let scene = make_scene(&terrain, &[3.0], sigma, 7)?;
        for p in [50.0, 95.0] {
            let cfg = DepthConfig { percentile: p, ..DepthConfig::default() };
            let est = estimate_depth(&scene.truth_mask, &scene.dem, &cfg)?;
            let open = open_flood_mask(&scene.truth_mask, &scene.truth_depth)?;
            let score = tile_mse(&est.depth, &scene.truth_depth, &open, "bowl")?;
            let z = est.levels.rows[0].z_water.unwrap_or(f64::NAN);
            println!("{sigma}\t{p}\t{z:.3}\t{:.3}", score.rmse);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
