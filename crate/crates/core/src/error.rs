use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanished under substitution")]
    VanishedDenominator,
    #[error("cannot substitute non-variable expression into argument {var} of opaque function {func}")]
    OpaqueSubstitution { func: String, var: String },
    #[error("unbound symbol {0}")]
    Unbound(String),
    #[error("pole at evaluation point")]
    Pole,
    #[error("chart mismatch: dimension {left} vs {right}")]
    ChartMismatch { left: usize, right: usize },
    #[error("size mismatch: {left}x{left} vs {right}x{right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix entries must share one degree, found {0} and {1}")]
    MixedDegree(usize, usize),
    #[error("determinant expansion needs even-degree entries, found degree {0}")]
    OddDegree(usize),
    #[error("non-invertible {0}")]
    NonInvertible(&'static str),
    #[error("transition inverse does not compose to the identity (coordinate {0})")]
    InverseMismatch(usize),
    #[error("transformed connection lost torsion-free symmetry at Γ'^{up}_{i}{j}")]
    AsymmetricTransition { up: usize, i: usize, j: usize },
    #[error("order k={k} outside 1..={n}")]
    InvalidOrder { k: usize, n: usize },
    #[error("index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("section expression for {slot} depends on fiber coordinate {var}")]
    FiberInSection { slot: String, var: String },
    #[error("connection slot {0} given more than once")]
    DuplicateSlot(String),
    #[error("metric is not symmetric at ({0}, {1})")]
    AsymmetricMetric(usize, usize),
    #[error("expected a form of degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("non-finite sample {value} at point {point:?}")]
    NonFinite { value: String, point: Vec<f64> },
    #[error("invalid integration domain: {0}")]
    InvalidDomain(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
