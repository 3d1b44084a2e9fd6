use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("grid alignment: {0}")]
    Alignment(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("degenerate polygon: signed area {0:e} is below 1e-12")]
    DegeneratePolygon(f64),

    #[error("invalid synthetic scene: {0}")]
    Scene(String),

    #[error("tile {0} has no scorable pixels")]
    EmptyTile(String),

    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),

    #[error("invalid OpenTopography API key (HTTP 401)")]
    InvalidKey,

    #[error("request rejected with HTTP {status}: {message}")]
    Request { status: u16, message: String },

    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },

    #[error("unparsable DEM response: {0}")]
    Format(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for this error: 2 for I/O and transport failures,
    /// 1 for everything caused by bad input or a broken contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Transport { .. } => 2,
            _ => 1,
        }
    }
}
