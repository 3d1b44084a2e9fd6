// Read and write ESRI ASCII grids, including raw segmentation codes.

use flood_depth::mask::{aggregate_classes, ClassMap};
use flood_depth::raster::{read_ascii_grid, read_semantic_grid, write_ascii_grid, GridSpec, ScalarRaster, DEFAULT_NODATA};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;

    // 4x3 UTM DEM, origin at the top-left corner.
    let grid = GridSpec::new(4, 3, (271_000.0, 3_290_030.0), (10.0, 10.0), "EPSG:32615")?;
    let dem = ScalarRaster::from_fn(grid, DEFAULT_NODATA, |c, r| if (c, r) == (3, 0) { DEFAULT_NODATA } else { 12.5 + 0.25 * c as f64 - 0.5 * r as f64 })?;
    let path = dir.path().join("dem.asc");
    write_ascii_grid(&dem, &path)?;
    println!("{}", std::fs::read_to_string(&path)?);
    println!("sidecar: {}", std::fs::read_to_string(path.with_extension("prj"))?);

    let back = read_ascii_grid(&path)?;
    assert_eq!(back, dem);
    println!("round trip ok, {} nodata cell(s)", back.values.iter().filter(|&&v| v == back.nodata).count());

    // A FloodNet-style label raster: 1 building-flooded, 3 road-flooded, 5 water, 9 grass.
    let labels = "ncols 4\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value 255\n1 3 5 9\n2 4 255 8\n";
    let lpath = dir.path().join("labels.asc");
    std::fs::write(&lpath, labels)?;
    let sem = aggregate_classes(&read_semantic_grid(&lpath)?, &ClassMap::floodnet());
    println!("aggregated: {:?} (0 background, 1 flood, 2 building)", sem.codes);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
