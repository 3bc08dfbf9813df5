use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sigma/m = {ratio} exceeds the hard paraxiality bound {bound}")]
    NotParaxial { ratio: f64, bound: f64 },

    #[error("the non-relativistic amplitude requires pbar = 0 (got pbar = {0})")]
    MovingPacket(f64),

    #[error("unsupported quadrature order {0}")]
    UnsupportedOrder(usize),

    #[error("oracle integrand too oscillatory: phase excursion {excursion:.1} needs order {needed} (max {max})")]
    Oscillatory {
        excursion: f64,
        needed: usize,
        max: usize,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
