//! OpenTopography global DEM client.
//!
//! One GET per request against `<endpoint>/API/globaldem`, asking for an
//! ESRI ASCII grid so the body goes straight through the raster codec.
//! Server errors and transport failures are retried with exponential
//! backoff; client errors are not. The API key is never logged.

use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::StatusCode;

use crate::error::{Error, Result};
use crate::raster::{self, GridSpec, ScalarRaster};

pub const DEFAULT_ENDPOINT: &str = "https://portal.opentopography.org";
pub const DEFAULT_DEM_TYPE: &str = "SRTMGL1";
pub const API_KEY_ENV: &str = "OPENTOPO_API_KEY";
pub const ENDPOINT_ENV: &str = "OPENTOPO_ENDPOINT";
const OUTPUT_FORMAT: &str = "AAIGrid";
/// Global DEM products are delivered in geographic WGS84 coordinates.
const RESPONSE_CRS: &str = "EPSG:4326";

/// Geographic bounding box in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub west: f64,
    pub south: f64,
    pub east: f64,
    pub north: f64,
}

impl BoundingBox {
    pub fn area(&self) -> f64 {
        (self.east - self.west) * (self.north - self.south)
    }
}

/// Extent of a geographic grid.
pub fn bbox_of(grid: &GridSpec) -> BoundingBox {
    BoundingBox {
        west: grid.origin_x,
        north: grid.origin_y,
        east: grid.origin_x + grid.ncols as f64 * grid.pixel_size_x,
        south: grid.origin_y - grid.nrows as f64 * grid.pixel_size_y,
    }
}

#[derive(Clone, PartialEq)]
pub struct FetchRequest {
    pub bbox: BoundingBox,
    pub dem_type: String,
    pub api_key: String,
}

// Hand-written so the key cannot leak through `{:?}`.
impl std::fmt::Debug for FetchRequest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FetchRequest")
            .field("bbox", &self.bbox)
            .field("dem_type", &self.dem_type)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

impl FetchRequest {
    pub fn new(bbox: BoundingBox, api_key: impl Into<String>) -> Self {
        FetchRequest {
            bbox,
            dem_type: DEFAULT_DEM_TYPE.to_string(),
            api_key: api_key.into(),
        }
    }

    /// Reads the key from `OPENTOPO_API_KEY`.
    pub fn from_env(bbox: BoundingBox) -> Result<Self> {
        let key = std::env::var(API_KEY_ENV)
            .map_err(|_| Error::Contract(format!("{API_KEY_ENV} is not set")))?;
        Ok(Self::new(bbox, key))
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.bbox;
        let lat = |v: f64| v.is_finite() && (-90.0..=90.0).contains(&v);
        let lon = |v: f64| v.is_finite() && (-180.0..=180.0).contains(&v);
        if !(lat(b.south) && lat(b.north) && lon(b.west) && lon(b.east)) {
            return Err(Error::Contract(format!(
                "bounding box outside geographic range: W {} S {} E {} N {}",
                b.west, b.south, b.east, b.north
            )));
        }
        if b.south >= b.north || b.west >= b.east {
            return Err(Error::Contract(format!(
                "bounding box must have south < north and west < east: W {} S {} E {} N {}",
                b.west, b.south, b.east, b.north
            )));
        }
        if self.api_key.is_empty() {
            return Err(Error::Contract(format!("empty API key (set {API_KEY_ENV})")));
        }
        if self.dem_type.is_empty() {
            return Err(Error::Contract("empty DEM product identifier".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DemClient {
    endpoint: String,
    /// Retries after the first attempt.
    max_retries: u32,
    backoff: Duration,
    http: Client,
}

impl DemClient {
    pub fn new(endpoint: impl Into<String>) -> Result<Self> {
        Self::with_timeout(endpoint, Duration::from_secs(120))
    }

    pub fn with_timeout(endpoint: impl Into<String>, timeout: Duration) -> Result<Self> {
        let http = Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| Error::Transport {
                attempts: 0,
                message: e.without_url().to_string(),
            })?;
        Ok(DemClient {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            max_retries: 3,
            backoff: Duration::from_secs(1),
            http,
        })
    }

    /// First retry delay; each further retry doubles it.
    pub fn backoff(mut self, first_delay: Duration) -> Self {
        self.backoff = first_delay;
        self
    }

    pub fn max_retries(mut self, retries: u32) -> Self {
        self.max_retries = retries;
        self
    }

    /// Sleep before each retry, in order.
    pub fn retry_delays(&self) -> Vec<Duration> {
        (0..self.max_retries).map(|k| self.backoff * 2u32.pow(k)).collect()
    }

    fn url(&self) -> String {
        format!("{}/API/globaldem", self.endpoint)
    }

    fn query(&self, req: &FetchRequest) -> Vec<(&'static str, String)> {
        let b = &req.bbox;
        vec![
            ("demtype", req.dem_type.clone()),
            ("south", b.south.to_string()),
            ("north", b.north.to_string()),
            ("west", b.west.to_string()),
            ("east", b.east.to_string()),
            ("outputFormat", OUTPUT_FORMAT.to_string()),
            ("API_Key", req.api_key.clone()),
        ]
    }

    pub fn fetch_dem(&self, req: &FetchRequest) -> Result<ScalarRaster> {
        req.validate()?;
        let redact = |s: &str| s.replace(&req.api_key, "<redacted>");
        let attempts_allowed = self.max_retries + 1;
        let mut last_failure = String::new();

        for attempt in 1..=attempts_allowed {
            if attempt > 1 {
                let delay = self.backoff * 2u32.pow(attempt - 2);
                log::warn!("DEM fetch attempt {} failed ({last_failure}); retrying in {delay:?}", attempt - 1);
                std::thread::sleep(delay);
            }
            log::info!(
                "GET {} demtype={} bbox W {} S {} E {} N {} (attempt {attempt}/{attempts_allowed})",
                self.url(),
                req.dem_type,
                req.bbox.west,
                req.bbox.south,
                req.bbox.east,
                req.bbox.north
            );
            let response = match self.http.get(self.url()).query(&self.query(req)).send() {
                Ok(r) => r,
                Err(e) => {
                    last_failure = redact(&e.without_url().to_string());
                    continue;
                }
            };
            let status = response.status();
            let body = match response.text() {
                Ok(b) => b,
                Err(e) => {
                    last_failure = redact(&e.without_url().to_string());
                    continue;
                }
            };
            if status.is_success() {
                let dem = raster::parse_ascii_body(&body, RESPONSE_CRS)
                    .map_err(|e| Error::Format(redact(&e.to_string())))?;
                log::info!("received {}x{} DEM", dem.grid.ncols, dem.grid.nrows);
                return Ok(dem);
            }
            if status == StatusCode::UNAUTHORIZED {
                return Err(Error::InvalidKey);
            }
            if status.is_server_error() {
                last_failure = format!("HTTP {}", status.as_u16());
                continue;
            }
            let message: String = redact(body.trim()).chars().take(500).collect();
            return Err(Error::Request {
                status: status.as_u16(),
                message,
            });
        }
        Err(Error::Transport {
            attempts: attempts_allowed,
            message: last_failure,
        })
    }
}

/// Fetches with the default client settings.
pub fn fetch_dem(req: &FetchRequest, endpoint: &str) -> Result<ScalarRaster> {
    DemClient::new(endpoint)?.fetch_dem(req)
}
