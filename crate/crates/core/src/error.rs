use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index ({p}, {q}) outside a {rows}x{cols} array")]
    IndexOutOfRange {
        p: usize,
        q: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("channel has no line-of-sight path")]
    MissingLineOfSight,

    #[error("unsupported QAM order {0} (expected 4, 16 or 64)")]
    UnsupportedOrder(usize),

    #[error("non-finite observation")]
    NonFinite,

    #[error("singular channel: estimated response is zero")]
    SingularChannel,

    #[error("equalization singularity: |combined gain| = {0:e}")]
    EqualizationSingularity(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
