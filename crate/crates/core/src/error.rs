use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested configuration is valid physics but not handled here
    /// (asymmetric ends in a symmetric-only formula, out-of-validity expansions).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The boundary system is singular: an undamped resonance sits exactly on
    /// the requested frequency.
    #[error("boundary system singular at {frequency_hz} Hz (undamped resonance)")]
    ResonanceSingularity { frequency_hz: f64 },

    /// The integration band contains an undamped resonance; the integral of
    /// the phase spectrum diverges unless some damping is supplied.
    #[error("undamped resonance near {frequency_hz} Hz inside the band; supply damping > 0")]
    UndampedResonance { frequency_hz: f64 },

    /// A bracketed root search did not find a sign change or did not converge.
    #[error("root solver failed: {0}")]
    Solver(String),

    /// Malformed spectrum input.
    #[error("line {line} (data row {row}): {message}")]
    Parse {
        line: usize,
        row: usize,
        message: String,
    },

    /// A frequency is outside what a spectrum covers.
    #[error("{nu} Hz is outside the spectrum support [{lo}, {hi}] Hz")]
    OutOfRange { nu: f64, lo: f64, hi: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ResonanceSingularity { .. } | Error::UndampedResonance { .. } | Error::Solver(_)
        )
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and >= 0, got {value}")))
    }
}
