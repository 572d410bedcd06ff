use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid root system: {0}")]
    InvalidSystem(String),

    #[error("Weyl group generation exceeded the cap of {cap} elements")]
    GroupTooLarge { cap: usize },

    #[error("multiplicity function invalid: {0}")]
    InvalidMultiplicity(String),

    #[error("input lies on the wall of root {root} (pairing {pairing:.3e})")]
    WallInput { root: usize, pairing: f64 },

    #[error("trajectory {trajectory} aborted at t={t:.6}: step left the chamber after {retries} halvings")]
    WallContact { trajectory: u64, t: f64, retries: u32 },

    #[error("invalid start point: {0}")]
    InvalidStart(String),

    #[error("root {root} produced more than {cap} jumps in one trajectory")]
    TooManyJumps { root: usize, cap: u32 },

    #[error("root order {0:?} is incompatible with the skew-product pass: reflection of root {1} does not stabilize the earlier roots")]
    InvalidRootOrder(Vec<usize>, usize),

    #[error("numerical failure: {0}")]
    Numerics(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{excluded} of {total} trajectories undetermined (limit {limit:.0}%); increase the horizon")]
    TooManyUndetermined { excluded: usize, total: usize, limit: f64 },

    #[error("ill-conditioned regression: {0}")]
    IllConditioned(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
