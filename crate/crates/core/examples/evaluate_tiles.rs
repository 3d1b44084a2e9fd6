// Score predictions against reference depth on several tiles.

use flood_depth::eval::{aggregate, open_flood_mask, tile_mse};
use flood_depth::hydro::{estimate_depth, DepthConfig};
use flood_depth::synth::{gen_terrain, make_scene, TerrainKind, TerrainParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut scores = Vec::new();
    for (i, (size, level, noise)) in [(65, 1.5, 0.0), (97, 2.0, 0.05), (129, 3.0, 0.2)].into_iter().enumerate() {
        let terrain = gen_terrain(TerrainKind::PyramidBowl, &TerrainParams::square(size, 0.1))?;
        let scene = make_scene(&terrain, &[level], noise, i as u64)?;
        let est = estimate_depth(&scene.truth_mask, &scene.dem, &DepthConfig::default())?;
        let open = open_flood_mask(&scene.truth_mask, &scene.truth_depth)?;
        scores.push(tile_mse(&est.depth, &scene.truth_depth, &open, &format!("tile{i}"))?);
    }
    let report = aggregate(&scores)?;
    print!("{}", report.to_toml());
    println!(
        "\nsqrt(MSE) {:.3} m >= mean tile RMSE {:.3} m",
        report.sqrt_mse, report.rmse_bar
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
