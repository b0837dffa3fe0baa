use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coordinate was NaN or infinite.
    NonFiniteCoordinate { id: usize },
    /// Stretch factors must exceed one.
    InvalidStretch(f64),
    /// Two arguments of a predicate that must be distinct refer to the same point.
    CoincidentArguments,
    InvalidPointId(usize),
    EmptyPointSet,
    InvalidCellSize(f64),
    NegativeRadius(f64),
    InvalidLambda(f64),
    InvalidSigma(f64),
    InvalidLambdaFactor(f64),
    /// A graph was paired with a point set it was not built on.
    PointSetMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFiniteCoordinate { id } => write!(f, "point {id} has a non-finite coordinate"),
            Error::InvalidStretch(t) => write!(f, "stretch factor must be > 1, got {t}"),
            Error::CoincidentArguments => f.write_str("predicate arguments must be pairwise distinct points"),
            Error::InvalidPointId(id) => write!(f, "point id {id} is out of range"),
            Error::EmptyPointSet => f.write_str("point set is empty"),
            Error::InvalidCellSize(c) => write!(f, "cell size must be positive and finite, got {c}"),
            Error::NegativeRadius(r) => write!(f, "radius must be non-negative, got {r}"),
            Error::InvalidLambda(l) => write!(f, "lambda must be positive, got {l}"),
            Error::InvalidSigma(s) => write!(f, "separation ratio must be positive, got {s}"),
            Error::InvalidLambdaFactor(x) => write!(f, "lambda factor must be positive, got {x}"),
            Error::PointSetMismatch { expected, found } => {
                write!(f, "graph has {found} vertices but the point set has {expected}")
            }
        }
    }
}

impl core::error::Error for Error {}
