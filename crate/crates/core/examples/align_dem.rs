// Put a coarse DEM onto a finer mask grid before fusing them.

use flood_depth::raster::{resample_to_grid, GridSpec, ScalarRaster, Resampling, DEFAULT_NODATA};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // 30 m DEM (roughly SRTM spacing) over a 120 m square.
    let coarse = GridSpec::new(4, 4, (0.0, 120.0), (30.0, 30.0), "EPSG:32615")?;
    let dem = ScalarRaster::from_fn(coarse, DEFAULT_NODATA, |c, r| 10.0 + c as f64 + 2.0 * r as f64)?;

    // Mask grid at 7.5 m.
    let fine = GridSpec::new(16, 16, (0.0, 120.0), (7.5, 7.5), "EPSG:32615")?;
    for method in [Resampling::Nearest, Resampling::Bilinear] {
        let out = resample_to_grid(&dem, &fine, method)?;
        println!("{method:?}, row 6:");
        let row: Vec<String> = (0..16).map(|c| format!("{:5.2}", out.get(c, 6))).collect();
        println!("  {}", row.join(" "));
    }

    let other = GridSpec::new(16, 16, (0.0, 120.0), (7.5, 7.5), "EPSG:4326")?;
    match resample_to_grid(&dem, &other, Resampling::Bilinear) {
        Err(e) => println!("different CRS is refused: {e}"),
        Ok(_) => unreachable!(),
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
