use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument `{name}` = {value} is outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("non-finite input: `{0}`")]
    NonFinite(&'static str),

    #[error("{what} did not converge within {cap} iterations")]
    IterationCap { what: &'static str, cap: usize },

    #[error("no bracket for the inverse of {function} at {target} within [{lo:e}, {hi:e}]")]
    BracketNotFound {
        function: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("dimension {0} has no closed-form evaluator; plug one in or use n = 2")]
    AbstractEvaluation(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("points coincide; the invariant is infinite there")]
    CoincidentPoints,

    #[error("point lies on the domain boundary or outside the domain")]
    OutsideDomain,

    #[error("bounds {lower} > {upper} have an empty intersection")]
    EmptyIntersection { lower: f64, upper: f64 },

    #[error("level {0} is never crossed on a traced ray")]
    LevelNotCrossed(f64),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("map evaluation hit a pole at ({re}, {im})")]
    Pole { re: f64, im: f64 },

    #[error("not a certified isometry: discrepancy {0:e}")]
    NotIsometry(f64),

    #[error("invalid condenser: {0}")]
    Condenser(String),

    #[error("grid spacing {h} is too coarse: {reason}")]
    TooCoarse { h: f64, reason: String },

    #[error("linear solver stagnated after {iterations} iterations at residual {residual:e}")]
    SolverStagnation { iterations: usize, residual: f64 },

    #[error("condenser spec parse error: {0}")]
    Parse(String),
}

pub(crate) fn finite(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(name))
    }
}
