use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expression is singular at k = 0 (term |k|^{exponent})")]
    Domain { exponent: String },

    #[error("expression does not fit the general Hermite ladder: {0}")]
    Structure(String),

    #[error("gamma function pole at z = {0}")]
    Pole(f64),

    #[error("series did not converge after {terms} terms")]
    Convergence { terms: usize },

    #[error("no tabulated closed form for alpha = {0}")]
    UnsupportedAlpha(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("integrand |k|^{exponent} is not integrable at k = 0")]
    NonIntegrable { exponent: String },

    #[error("skewness theta = {0} gives an irrational symbol phase")]
    IrrationalPhase(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse rational {input:?}: {reason}")]
    ParseRational { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
