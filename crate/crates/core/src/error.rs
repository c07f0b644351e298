use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GseError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("duplicate coupling position {position} m")]
    DuplicatePosition { position: f64 },

    #[error("non-physical result: {0}")]
    NonPhysical(String),

    #[error("divergent at x = 0: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: residual {residual:e} exceeds {tolerance:e}")]
    QuadratureNotConverged { residual: f64, tolerance: f64 },

    #[error("fit did not converge after {iterations} iterations (cost {cost:e})")]
    NotConverged { iterations: usize, cost: f64 },

    #[error("unidentifiable parameters: {}", names.join(", "))]
    Unidentifiable { names: Vec<String> },

    #[error("degenerate data: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, GseError>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(GseError::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}
