use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("vertices do not span a full-dimensional polytope")]
    NotFullDimensional,
    #[error("non-lattice vertex coordinate: {0}")]
    NonLatticeVertex(String),
    #[error("chart vertex {0:?} is not a vertex of the polytope")]
    NotAVertex(Vec<i64>),
    #[error("the cone at chart vertex {0:?} is not unimodular")]
    NonUnimodularChartVertex(Vec<i64>),
    #[error("point {point:?} lies outside {scale}·P")]
    PointOutsidePolytope { point: Vec<i64>, scale: i64 },
    #[error("expected {expected} coordinates, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("flag chain violated: I_{lower} is not contained in I_{upper}")]
    ChainViolation { lower: usize, upper: usize },
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("exceptional ray {0:?} has a non-positive coordinate")]
    NonPositiveExceptionalRay(Vec<i64>),
    #[error("exponent r = {r} is too small: {detail}")]
    ExponentTooSmall { r: u32, detail: String },
    #[error(transparent)]
    NotStabilized(#[from] NotStabilized),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Process exit code for this error (`1` bad input, `2` guard tripped).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotStabilized(_) | Error::ExponentTooSmall { .. } => 2,
            _ => 1,
        }
    }

    /// Short machine-readable tag used in JSON payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotFullDimensional => "not_full_dimensional",
            Error::NonLatticeVertex(_) => "non_lattice_vertex",
            Error::NotAVertex(_) => "not_a_vertex",
            Error::NonUnimodularChartVertex(_) => "non_unimodular_chart_vertex",
            Error::PointOutsidePolytope { .. } => "point_outside_polytope",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ChainViolation { .. } => "chain_violation",
            Error::UnsupportedMode(_) => "unsupported_mode",
            Error::NonPositiveExceptionalRay(_) => "non_positive_exceptional_ray",
            Error::ExponentTooSmall { .. } => "exponent_too_small",
            Error::NotStabilized(_) => "not_stabilized",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

/// Finite differences of a sampled sequence failed to vanish.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct NotStabilized {
    /// Sampled interval `[lo, hi]`.
    pub k_range: (u32, u32),
    pub degree: usize,
    /// Detected quasi-polynomial period (2..=4), if any.
    pub quasi_period: Option<u32>,
}

impl fmt::Display for NotStabilized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.k_range;
        match self.quasi_period {
            Some(p) => write!(
                f,
                "samples on K = {lo}..{hi} are quasi-polynomial with period {p}; \
                 the relative polarization is not semiample at this exponent, increase r"
            ),
            None => write!(
                f,
                "degree-{} differences do not vanish on K = {lo}..{hi}; extend K_range",
                self.degree
            ),
        }
    }
}
