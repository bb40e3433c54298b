use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("timestamp {got} is not after the previous timestamp {previous}")]
    OutOfOrder { previous: f64, got: f64 },

    #[error("need at least {needed} anchors, got {got}")]
    InsufficientAnchors { needed: usize, got: usize },

    #[error("degenerate anchor geometry: {0}")]
    DegenerateGeometry(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("measurement for anchor {measurement} paired with anchor {anchor}")]
    AnchorMismatch { measurement: u32, anchor: u32 },

    #[error("unknown anchor id {0}")]
    UnknownAnchor(u32),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("quantile {0} outside [0, 1]")]
    QuantileOutOfRange(f64),
}
