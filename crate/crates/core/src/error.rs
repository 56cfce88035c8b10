use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate secant: both points share abscissa {0}")]
    DegenerateSecant(f64),

    #[error("need at least {required} abscissae, got {got}")]
    TooFewAbscissae { required: usize, got: usize },

    #[error("abscissae must be strictly increasing and inside ({lo}, {hi})")]
    InvalidAbscissae { lo: f64, hi: f64 },

    #[error("invalid support interval [{0}, {1}]")]
    InvalidSupport(f64, f64),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error(
        "hull saturated at {cap} abscissae and rejected {rejections} consecutive draws; \
         the log-density is probably not log-concave or not supported by the hull"
    )]
    HullSaturated { cap: usize, rejections: usize },

    #[error("zero or non-finite direction vector")]
    ZeroDirection,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the bounding box")]
    OutsideBox,

    #[error("could not find a non-degenerate line through the current point after {0} directions")]
    DegenerateLine(usize),

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("starting point has zero target density")]
    InfeasibleStart,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("too few observations: {n} rows for {columns} columns")]
    TooFewObservations { n: usize, columns: usize },

    #[error("knot configuration violates interior/gap constraints")]
    InvalidKnots,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
