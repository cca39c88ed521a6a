use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants split into precondition failures (bad input, unsupported
/// algebra, budget) and certification failures (a numerical identity
/// did not hold to its stated tolerance). The CLI maps the two groups to
/// distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Weyl group too large: order {order} exceeds bound {bound}")]
    WeylGroupTooLarge { order: u128, bound: u128 },

    #[error("weight {weight} is not dominant")]
    NonDominant { weight: String },

    #[error("weight {weight} is not integrable at level {level}")]
    NotIntegrable { weight: String, level: u32 },

    #[error("degenerate orbit unsupported: shifted label {label} is not regular")]
    DegenerateOrbit { label: String },

    #[error("point lies within {distance:e} of a singular wall of j^(-1/2) (root value {root_value})")]
    NearSingularWall { root_value: String, distance: f64 },

    #[error("divergent sum: heat-kernel sum requires genus >= 2, got {genus}")]
    DivergentSum { genus: u32 },

    #[error("cutoff {requested} insufficient for tolerance {target_tol:e}; suggested cutoff {suggested}")]
    CutoffInsufficient {
        requested: u64,
        suggested: u64,
        target_tol: f64,
    },

    #[error("budget exceeded: {needed} weight terms requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("unknown framing convention: {0}")]
    UnknownConvention(String),

    #[error("certification failed: {what} residual {residual:e} exceeds {tolerance:e}")]
    Certification {
        what: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("integrality failure: value {value} is {residual:e} away from the nearest integer")]
    Integrality { value: f64, residual: f64 },

    #[error("not quasi-polynomial within bounds (degree <= {degree_bound}, period <= {max_period}); best residual {best_residual}")]
    NotQuasiPolynomial {
        degree_bound: usize,
        max_period: usize,
        best_residual: String,
    },
}

impl Error {
    /// True for numerical certification and integrality failures, as
    /// opposed to violated preconditions.
    pub fn is_certification(&self) -> bool {
        matches!(
            self,
            Error::Certification { .. } | Error::Integrality { .. } | Error::NotQuasiPolynomial { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
