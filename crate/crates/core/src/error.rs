use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ray direction must be a unit vector (norm = {0})")]
    InvalidDirection(f64),

    #[error("pose at ({x:.3}, {y:.3}, {z:.3}) is outside the segment workspace")]
    OutsideWorkspace { x: f64, y: f64, z: f64 },

    #[error("unknown scenario `{0}` (expected scenario1, scenario2 or micro)")]
    UnknownScenario(String),

    #[error("unknown fruit id {0}")]
    UnknownFruit(u32),

    #[error("cannot pick from an empty target list")]
    NoTargets,

    #[error("unknown oracle suite `{0}` (expected search, raycast, frontier, knn or clustering)")]
    UnknownSuite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
