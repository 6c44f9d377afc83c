//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Photon energy is inside the guard band around the interband edge
    /// `hbar*omega = 2*mu_c`, where the log term of the conductivity diverges.
    #[error("photon energy within {rel:.1e} of the interband edge 2*mu_c")]
    InterbandEdge { rel: f64 },

    /// The Doppler-shifted frequency `omega - q_x*v_d` fell below the
    /// relative floor; the shifted conductivity is undefined there.
    #[error("Doppler-shifted frequency vanishes: |omega - q_x v_d| < 1e-12 omega")]
    DopplerSingularity,

    #[error("coincident source and observation points")]
    CoincidentPoints,

    #[error("quadrature did not converge; achieved error estimate {estimate:.3e}")]
    IntegrationFailure { estimate: f64 },

    #[error("dispersion root search did not converge; last iterate {re:.6e}{im:+.6e}i")]
    RootNotFound { re: f64, im: f64 },

    #[error("no SPP root: iterate collapsed onto the light line")]
    NoSppRoot,

    #[error("TM surface waves are not supported at this operating point")]
    NoTmSupport,

    #[error("steady state is not unique: singular-value ratio {ratio:.3e}")]
    DegenerateSteadyState { ratio: f64 },

    #[error("ODE tolerance not achievable; smallest stable step reached, error {achieved:.3e}")]
    IntegrationTolerance { achieved: f64 },

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn root_not_found(last: Complex64) -> Self {
        Error::RootNotFound {
            re: last.re,
            im: last.im,
        }
    }

    /// Stable machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::InterbandEdge { .. } => "interband_edge",
            Error::DopplerSingularity => "doppler_singularity",
            Error::CoincidentPoints => "coincident_points",
            Error::IntegrationFailure { .. } => "integration_failure",
            Error::RootNotFound { .. } => "root_not_found",
            Error::NoSppRoot => "no_spp_root",
            Error::NoTmSupport => "no_tm_support",
            Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
            Error::IntegrationTolerance { .. } => "integration_tolerance",
            Error::NumericalInstability(_) => "numerical_instability",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
