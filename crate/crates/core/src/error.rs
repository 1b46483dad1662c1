use thiserror::Error;

/// Errors raised by the library. Numeric payloads are widened to `f64` so
/// the type does not depend on the scalar parameter.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("map {index}: ratio {ratio} is not in (0, 1)")]
    InvalidRatio { index: usize, ratio: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("an IFS needs at least one map")]
    EmptyIfs,
    #[error("word letter {letter} out of range for an IFS with {k} maps")]
    InvalidWord { letter: usize, k: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("point budget must be positive")]
    ZeroBudget,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("interval [{lo}, {hi}] is not contained in [0, 1]")]
    OutsideUnitInterval { lo: f64, hi: f64 },
    #[error("base point ({x}, {y}) is not on the graph (vertical defect {defect})")]
    NotOnGraph { x: f64, y: f64, defect: f64 },
    #[error("every grid node lies inside the exclusion radius")]
    AllNodesExcluded,
    #[error("map {index}: rotation angle {angle} is neither 0 nor pi, image of the frame is not axis-aligned")]
    NotAxisAligned { index: usize, angle: f64 },
    #[error("the maps do not cover the target: first uncovered point {first_uncovered}")]
    NotCovering { first_uncovered: f64 },
    #[error("no word at depth {depth} has an interval containing {point}")]
    NoContainingWord { depth: usize, point: f64 },
    #[error("word search exceeded depth {0}")]
    DepthExceeded(usize),
    #[error("vertical chord at x = {0}")]
    VerticalChord(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
