// Download a DEM tile with the OpenTopography client.
//
// A throwaway local server stands in for the real API: it fails once with
// a 500, then serves a grid. Point `DemClient::new` at the real endpoint and
// set `OPENTOPO_API_KEY` to fetch real data.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::time::Duration;

use flood_depth::dem_fetch::{BoundingBox, DemClient, FetchRequest};

const GRID: &str = "ncols 3\nnrows 2\nxllcorner -95.4\nyllcorner 29.7\ncellsize 0.0005\nNODATA_value -9999\n3.2 3.4 3.1\n2.9 3.0 2.8\n";

fn serve(listener: TcpListener) {
    for (i, stream) in listener.incoming().take(2).enumerate() {
        let mut stream = stream.unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut line = String::new();
        while reader.read_line(&mut line).is_ok_and(|n| n > 2) {
            line.clear();
        }
        let (status, body) = if i == 0 { ("500 Internal Server Error", "busy") } else { ("200 OK", GRID) };
        let _ = write!(stream, "HTTP/1.1 {status}\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}", body.len());
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let endpoint = format!("http://{}", listener.local_addr()?);
    let server = std::thread::spawn(move || serve(listener));

    let bbox = BoundingBox { west: -95.4, south: 29.7, east: -95.3985, north: 29.701 };
    let req = FetchRequest::new(bbox, "demo-key");
    println!("{req:?}");
    let client = DemClient::new(endpoint)?.backoff(Duration::from_millis(50));
    let dem = client.fetch_dem(&req)?;
    println!("{}x{} DEM in {}, values {:?}", dem.grid.ncols, dem.grid.nrows, dem.grid.crs_id, dem.values);
    server.join().unwrap();
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
