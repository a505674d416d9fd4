use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// The operation assumes an evanescent gap but n·sinθ ≤ 1.
    #[error(
        "incidence angle {theta_deg:.4}° is not beyond the critical angle {critical_deg:.2}°; \
         the gap field is not evanescent"
    )]
    BelowCriticalAngle { theta_deg: f64, critical_deg: f64 },

    #[error("grazing incidence: normal wavenumber in the prism vanishes")]
    Grazing,

    #[error("{channel} coefficient is identically zero; its phase is undefined")]
    DegenerateChannel { channel: &'static str },

    #[error("finite-difference step underflow at x = {x:e}")]
    StepUnderflow { x: f64 },

    #[error("quadrature failed to reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("synthesis grid guard violated: {0}")]
    Grid(String),

    #[error("sweep point d = {d:e} m failed: {source}")]
    SweepPoint { d: f64, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_config_error(&self) -> bool {
        match self {
            Error::InvalidInput { .. } | Error::BelowCriticalAngle { .. } | Error::Grid(_) => true,
            Error::SweepPoint { source, .. } => source.is_config_error(),
            _ => false,
        }
    }
}
