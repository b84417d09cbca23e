use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid interval [{lo}, {hi}]: lower end must be strictly below upper end")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("derivative order {order} outside supported range 1..={max}")]
    DerivativeOrder { order: usize, max: usize },

    #[error("integrand returned non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("least-squares fit is singular: {0}")]
    SingularFit(&'static str),

    #[error("rate fit needs at least two nonzero samples, got {usable}")]
    FitFailure { usable: usize },

    #[error("sequence cannot be differentiated: {0}")]
    NotDifferentiable(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}
