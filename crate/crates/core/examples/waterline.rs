// Components, erosion and the waterline ring of a small flood mask.

use flood_depth::mask::{erode, inner_boundary, label_components_8, reject_edge_pixels};
use flood_depth::raster::{CodeRaster, GridSpec, DEFAULT_NODATA_CODE};

const MASK: &str = "\
##........
###...###.
####..###.
###...###.
......###.
.#........";

fn show(title: &str, r: &CodeRaster) {
    println!("{title}");
    for row in 0..r.grid.nrows {
        let line: String = (0..r.grid.ncols)
            .map(|c| match r.get(c, row) {
                0 => '.',
                v => char::from_digit(v, 36).unwrap_or('#'),
            })
            .collect();
        println!("  {line}");
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows: Vec<&str> = MASK.lines().collect();
    let grid = GridSpec::new(rows[0].len(), rows.len(), (0.0, rows.len() as f64), (1.0, 1.0), "")?;
    let mask = CodeRaster::from_fn(grid, DEFAULT_NODATA_CODE, |c, r| u32::from(rows[r].as_bytes()[c] == b'#'))?;

    let labels = label_components_8(&mask);
    println!("{} components, sizes {:?}", labels.count, &labels.sizes()[1..]);
    show("labels", &labels.labels);
    show("eroded", &erode(&mask));
    let ring = inner_boundary(&mask);
    show("inner boundary", &ring);
    // The left blob meets the image frame; those pixels say nothing about the shore.
    show("waterline after edge rejection", &reject_edge_pixels(&ring));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
