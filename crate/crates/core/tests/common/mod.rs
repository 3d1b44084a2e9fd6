//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;

use flood_depth::raster::{CodeRaster, GridSpec, ScalarRaster, DEFAULT_NODATA_CODE};
use rand::Rng;

pub fn grid(w: usize, h: usize) -> GridSpec {
    GridSpec::new(w, h, (0.0, h as f64), (1.0, 1.0), "").unwrap()
}

pub fn random_mask(rng: &mut impl Rng, w: usize, h: usize, density: f64) -> CodeRaster {
    let codes = (0..w * h).map(|_| u32::from(rng.random_bool(density))).collect();
    CodeRaster::new(grid(w, h), codes, DEFAULT_NODATA_CODE).unwrap()
}

/// Foreground made of random filled discs, which gives realistic blobs
/// with interiors (unlike independent per-pixel noise).
pub fn blob_mask(rng: &mut impl Rng, w: usize, h: usize, blobs: usize, max_r: f64) -> CodeRaster {
    let mut m = CodeRaster::filled(grid(w, h), 0, DEFAULT_NODATA_CODE).unwrap();
    for _ in 0..blobs {
        let cx = rng.random_range(0.0..w as f64);
        let cy = rng.random_range(0.0..h as f64);
        let r = rng.random_range(1.0..max_r);
        let (c0, c1) = ((cx - r).floor().max(0.0) as usize, ((cx + r).ceil() as usize).min(w - 1));
        let (r0, r1) = ((cy - r).floor().max(0.0) as usize, ((cy + r).ceil() as usize).min(h - 1));
        for row in r0..=r1 {
            for col in c0..=c1 {
                let (dx, dy) = (col as f64 - cx, row as f64 - cy);
                if dx * dx + dy * dy <= r * r {
                    m.set(col, row, 1);
                }
            }
        }
    }
    m
}

/// Breadth-first flood fill over 8-neighbors. Returns a label per pixel
/// (0 = background) in whatever order the fill visits components.
pub fn bfs_labels(mask: &CodeRaster) -> (Vec<u32>, usize) {
    let (w, h) = (mask.grid.ncols as i64, mask.grid.nrows as i64);
    let mut labels = vec![0u32; mask.codes.len()];
    let mut next = 0u32;
    for start in 0..mask.codes.len() {
        if mask.codes[start] == 0 || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let (c, r) = ((i as i64) % w, (i as i64) / w);
            for dr in -1..=1 {
                for dc in -1..=1 {
                    let (nc, nr) = (c + dc, r + dr);
                    if nc < 0 || nr < 0 || nc >= w || nr >= h {
                        continue;
                    }
                    let j = (nr * w + nc) as usize;
                    if mask.codes[j] != 0 && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    (labels, next as usize)
}

/// True when both labelings induce the same partition of the pixels.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    let mut ab: HashMap<u32, u32> = HashMap::new();
    let mut ba: HashMap<u32, u32> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if (x == 0) != (y == 0) {
            return false;
        }
        if *ab.entry(x).or_insert(y) != y || *ba.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

/// Erosion straight from set inclusion: the translated 3x3 square must sit
/// entirely on in-raster foreground pixels.
pub fn brute_erode(mask: &CodeRaster) -> Vec<u32> {
    let (w, h) = (mask.grid.ncols as i64, mask.grid.nrows as i64);
    let fg = |c: i64, r: i64| c >= 0 && r >= 0 && c < w && r < h && mask.codes[(r * w + c) as usize] != 0;
    let mut out = vec![0; mask.codes.len()];
    for r in 0..h {
        for c in 0..w {
            let fits = (-1..=1).all(|dr| (-1..=1).all(|dc| fg(c + dc, r + dr)));
            out[(r * w + c) as usize] = u32::from(fits);
        }
    }
    out
}

/// Order statistic by counting: the j-th smallest value is the one with
/// fewer than j+1 values strictly below it and at least j+1 at or below it.
fn order_statistic(samples: &[f64], j: usize) -> f64 {
    for &v in samples {
        let below = samples.iter().filter(|&&s| s < v).count();
        let at_or_below = samples.iter().filter(|&&s| s <= v).count();
        if below <= j && j < at_or_below {
            return v;
        }
    }
    unreachable!("every rank has an order statistic")
}

/// Closest-ranks linear interpolation computed from order statistics.
pub fn reference_percentile(samples: &[f64], p: f64) -> f64 {
    let n = samples.len();
    let rank = p / 100.0 * (n - 1) as f64;
    let (lo, hi) = (rank.floor() as usize, rank.ceil() as usize);
    let (a, b) = (order_statistic(samples, lo), order_statistic(samples, hi));
    a + (rank - lo as f64) * (b - a)
}

/// Bilinear value at world `(x, y)` from the four source centers around it,
/// located by scanning every source pixel center. `None` if the point is not
/// strictly surrounded by centers.
pub fn brute_bilinear(src: &ScalarRaster, x: f64, y: f64) -> Option<f64> {
    let g = &src.grid;
    let mut left: Option<(i64, f64)> = None;
    let mut right: Option<(i64, f64)> = None;
    for c in 0..g.ncols as i64 {
        let (cx, _) = g.pixel_to_world(c, 0);
        if cx <= x && left.is_none_or(|(_, lx)| cx > lx) {
            left = Some((c, cx));
        }
        if cx >= x && right.is_none_or(|(_, rx)| cx < rx) {
            right = Some((c, cx));
        }
    }
    let mut upper: Option<(i64, f64)> = None;
    let mut lower: Option<(i64, f64)> = None;
    for r in 0..g.nrows as i64 {
        let (_, cy) = g.pixel_to_world(0, r);
        if cy >= y && upper.is_none_or(|(_, uy)| cy < uy) {
            upper = Some((r, cy));
        }
        if cy <= y && lower.is_none_or(|(_, ly)| cy > ly) {
            lower = Some((r, cy));
        }
    }
    let ((c0, x0), (c1, x1), (r0, y0), (r1, y1)) = (left?, right?, upper?, lower?);
    let tx = if c1 == c0 { 0.0 } else { (x - x0) / (x1 - x0) };
    let ty = if r1 == r0 { 0.0 } else { (y0 - y) / (y0 - y1) };
    let z = |c: i64, r: i64| src.get(c as usize, r as usize);
    Some(
        (1.0 - tx) * (1.0 - ty) * z(c0, r0)
            + tx * (1.0 - ty) * z(c1, r0)
            + (1.0 - tx) * ty * z(c0, r1)
            + tx * ty * z(c1, r1),
    )
}

pub fn point_in_polygon(pts: &[(f64, f64)], x: f64, y: f64) -> bool {
    let mut inside = false;
    let n = pts.len();
    for i in 0..n {
        let (xi, yi) = pts[i];
        let (xj, yj) = pts[(i + n - 1) % n];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
    }
    inside
}

/// Mean of jittered-grid sample points that land inside the polygon: one
/// uniform point in each of `k` x `k` cells of the bounding box.
pub fn monte_carlo_centroid(rng: &mut impl Rng, pts: &[(f64, f64)], k: usize) -> (f64, f64) {
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let (dx, dy) = ((xmax - xmin) / k as f64, (ymax - ymin) / k as f64);
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for i in 0..k {
        for j in 0..k {
            let x = xmin + (i as f64 + rng.random::<f64>()) * dx;
            let y = ymin + (j as f64 + rng.random::<f64>()) * dy;
            if point_in_polygon(pts, x, y) {
                sx += x;
                sy += y;
                n += 1;
            }
        }
    }
    (sx / n as f64, sy / n as f64)
}

/// Star-shaped (hence simple) polygon around `center`. Angles are evenly
/// spaced with jitter, so no angular gap reaches pi.
pub fn random_star_polygon(rng: &mut impl Rng, center: (f64, f64), r_min: f64, r_max: f64) -> Vec<(f64, f64)> {
    let n = rng.random_range(4..14);
    let step = std::f64::consts::TAU / n as f64;
    let phase = rng.random_range(0.0..step);
    (0..n)
        .map(|i| {
            let a = phase + step * (i as f64 + rng.random_range(-0.4..0.4));
            let r = rng.random_range(r_min..r_max);
            (center.0 + r * a.cos(), center.1 + r * a.sin())
        })
        .collect()
}

/// Minimal HTTP/1.1 server that answers each request with the next scripted
/// `(status, body)` (the last one repeats) and records the request lines.
pub struct MockServer {
    pub base_url: String,
    requests: Arc<Mutex<Vec<String>>>,
}

impl MockServer {
    pub fn start(script: Vec<(u16, String)>) -> Self {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let base_url = format!("http://{}", listener.local_addr().unwrap());
        let requests = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&requests);
        thread::spawn(move || {
            for (i, stream) in listener.incoming().enumerate() {
                let Ok(mut stream) = stream else { break };
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut request_line = String::new();
                if reader.read_line(&mut request_line).is_err() {
                    continue;
                }
                let mut line = String::new();
                while reader.read_line(&mut line).is_ok() && line != "\r\n" && !line.is_empty() {
                    line.clear();
                }
                log.lock().unwrap().push(request_line.trim().to_string());
                let (status, body) = &script[i.min(script.len() - 1)];
                let reason = match status {
                    200 => "OK",
                    401 => "Unauthorized",
                    404 => "Not Found",
                    500 => "Internal Server Error",
                    _ => "Status",
                };
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} {reason}\r\nContent-Type: text/plain\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                    body.len()
                );
                let _ = stream.flush();
            }
        });
        MockServer { base_url, requests }
    }

    pub fn requests(&self) -> Vec<String> {
        self.requests.lock().unwrap().clone()
    }
}

pub const SMALL_GRID: &str = "ncols 3\nnrows 3\nxllcorner -95.4\nyllcorner 29.7\ncellsize 0.0003\nNODATA_value -9999\n1 2 3\n4 5 6\n7 8 9\n";
