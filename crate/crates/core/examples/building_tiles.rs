// Cut building-centered tiles out of a large raster.

use flood_depth::raster::{CodeRaster, GridSpec, DEFAULT_NODATA_CODE};
use flood_depth::tiling::{parse_buildings, tile_candidates, TilingOptions};

const BUILDINGS: &str = r#"{
  "type": "FeatureCollection",
  "features": [
    {"type": "Feature", "id": "h-001", "properties": {"event": "Harvey"},
     "geometry": {"type": "Polygon", "coordinates": [[[400,600],[420,600],[420,630],[400,630],[400,600]]]}},
    {"type": "Feature", "id": "h-002", "properties": {"event": "HARVEY"},
     "geometry": {"type": "Polygon", "coordinates": [[[470,590],[490,590],[480,610],[470,590]]]}},
    {"type": "Feature", "id": "h-003", "properties": {"event": "Harvey"},
     "geometry": {"type": "Polygon", "coordinates": [[[20,20],[30,20],[30,30],[20,30],[20,20]]]}},
    {"type": "Feature", "id": "h-004", "properties": {"event": "Harvey"},
     "geometry": {"type": "Polygon", "coordinates": [[[850,500],[860,500],[860,510],[850,510],[850,500]]]}},
    {"type": "Feature", "id": "k-001", "properties": {"event": "Katrina"},
     "geometry": {"type": "Polygon", "coordinates": [[[500,500],[510,500],[510,510],[500,510],[500,500]]]}}
  ]
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // 1000 x 1000 px orthomosaic labels at 1 m with a void wedge on the right.
    let grid = GridSpec::new(1000, 1000, (0.0, 1000.0), (1.0, 1.0), "EPSG:32615")?;
    let src = CodeRaster::from_fn(grid, DEFAULT_NODATA_CODE, |c, r| if c > 900 - r / 10 { DEFAULT_NODATA_CODE } else { 0 })?;

    let candidates = parse_buildings(BUILDINGS)?;
    let opts = TilingOptions { size: 256, ..TilingOptions::default() };
    let mut written = Vec::new();
    let manifest = tile_candidates(&src, &candidates, &opts, |entry, tile: CodeRaster| {
        written.push(format!("{} -> {}x{} at ({}, {})", entry.tile_id, tile.grid.ncols, tile.grid.nrows, tile.grid.origin_x, tile.grid.origin_y));
        Ok(())
    })?;
    print!("{}", manifest.to_tsv());
    for w in written {
        println!("{w}");
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
