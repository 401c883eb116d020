use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter is outside its allowed domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("level `{0}` is not defined in the dispersive-shift map")]
    UnknownLevel(crate::LevelLabel),

    #[error("diagonalization did not converge up to basis size {basis_size}: max level change {max_change_ghz:.3e} GHz")]
    Convergence { basis_size: usize, max_change_ghz: f64 },

    #[error("integration step {dt:.3e} s is too coarse for linewidth (need dt <= {max_dt:.3e} s)")]
    Discretization { dt: f64, max_dt: f64 },

    #[error("no finite temperature reproduces excited population {0}")]
    NoFiniteTemperature(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("conditional probability undefined: no M1 outcomes in class {0}")]
    UndefinedConditional(u8),

    #[error("fit failed: {reason} (residual norm {residual:.3e})")]
    Fit { reason: String, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("malformed batch file: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {value}")))
    }
}
