// Flood a two-basin synthetic scene and recover its depth map.
//
// Run with `cargo run --example two_basin_depth`.

use flood_depth::hydro::{estimate_depth, DepthConfig};
use flood_depth::synth::{gen_terrain, make_scene, TerrainKind, TerrainParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let terrain = gen_terrain(TerrainKind::TwoBasins, &TerrainParams::square(129, 0.1))?;
    let scene = make_scene(&terrain, &[1.0, 2.5], 0.0, 42)?;

    let est = estimate_depth(&scene.truth_mask, &scene.dem, &DepthConfig::default())?;
    print!("{}", est.levels.to_tsv());

    for (b, level) in scene.truth_levels.iter().enumerate() {
        let basin = b as u32 + 1;
        let (mut sq, mut n, mut deepest) = (0.0, 0, 0.0f64);
        for i in 0..scene.basin_map.codes.len() {
            if scene.basin_map.codes[i] == basin {
                let d = est.depth.values[i];
                sq += (d - scene.truth_depth.values[i]).powi(2);
                deepest = deepest.max(d);
                n += 1;
            }
        }
        println!(
            "basin {basin}: level {level} m, {n} px, deepest {deepest:.2} m, rmse {:.3} m",
            (sq / n as f64).sqrt()
        );
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
