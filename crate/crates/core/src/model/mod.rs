//! Model parameters for the two-species branching process: offspring laws,
//! density-dependent survival functions, prey competition functions, and the
//! exact one-step conditional moments.

mod competition;
mod config;
mod law;
mod moments;
mod survival;

pub use competition::{CompetitionFamily, CompetitionFunction};
pub use config::{validate_config, ModelConfig, ValidationReport, Violation};
pub use law::{LawKind, OffspringLaw, MAX_EXPLICIT_SUPPORT};
pub use moments::{conditional_moments, ConditionalMoments, MomentPair};
pub use survival::{check_tail_decay, log_grid, SurvivalFamily, SurvivalFunction, TailDecayReport};

use thiserror::Error;

/// Absolute tolerance for identity checks on O(1) quantities
/// (pmf normalisation, the `r(gamma) = 1/mean` equilibrium identity).
pub const IDENTITY_TOL: f64 = 1e-12;

/// Which of the two species a parameter or report entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Species {
    Predator,
    Prey,
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Species::Predator => write!(f, "predator"),
            Species::Prey => write!(f, "prey"),
        }
    }
}

/// Preys-per-predator density, the argument of both survival functions.
///
/// The value is a non-negative real, with `INFINITE` standing for the
/// zero-predator boundary so that the boundary control laws fall out of
/// ordinary evaluation: survival functions return their upper limit at
/// infinite density.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Density(f64);

impl Density {
    /// Density when no predators are present.
    pub const INFINITE: Density = Density(f64::INFINITY);

    /// A finite non-negative density.
    pub fn new(value: f64) -> Result<Self, ModelError> {
        if value.is_nan() || value < 0.0 {
            return Err(ModelError::InvalidDensity { value });
        }
        Ok(Density(value))
    }

    /// Density of `preys / predators`, infinite when predators are zero.
    pub fn from_counts(predators: u64, preys: u64) -> Self {
        if predators == 0 {
            Density::INFINITE
        } else {
            Density(preys as f64 / predators as f64)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// Construction-time parameter errors. Each variant names the violated
/// constraint so that CLI validation can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("geometric success probability must lie strictly in (0,1), got {p}")]
    GeometricProbOutOfRange { p: f64 },
    #[error("explicit pmf must be non-empty with support at most {MAX_EXPLICIT_SUPPORT}")]
    ExplicitSupportInvalid,
    #[error("explicit pmf entries must be finite and non-negative, entry {index} is {value}")]
    PmfEntryInvalid { index: usize, value: f64 },
    #[error("explicit pmf must sum to 1 within {IDENTITY_TOL:e}, got {sum}")]
    PmfNotNormalized { sum: f64 },
    #[error("survival bounds must satisfy 0 < rho1 < rho2 < 1, got rho1={rho1}, rho2={rho2}")]
    SurvivalBoundsInvalid { rho1: f64, rho2: f64 },
    #[error("gamma must be a positive finite real, got {gamma}")]
    GammaInvalid { gamma: f64 },
    #[error("rho1*mu must be below 1, got rho1*mu={value}")]
    Rho1MuNotBelowOne { value: f64 },
    #[error("rho2*mu must exceed 1, got rho2*mu={value}")]
    Rho2MuNotAboveOne { value: f64 },
    #[error("offspring mean must be a positive finite real, got {mu}")]
    MeanInvalid { mu: f64 },
    #[error("g2 inapplicable for these parameters: exponent l={l} is not positive")]
    G2ExponentNotPositive { l: f64 },
    #[error("table survival function: {reason}")]
    TableInvalid { reason: String },
    #[error("carrying capacity must be a positive finite real, got {capacity}")]
    CapacityInvalid { capacity: f64 },
    #[error("Hassel exponent requires v >= 1, got {v}")]
    HasselExponentInvalid { v: f64 },
    #[error("Ricker base requires v > 1, got {v}")]
    RickerBaseInvalid { v: f64 },
    #[error("density must be non-negative, got {value}")]
    InvalidDensity { value: f64 },
    #[error("operation does not support carrying-capacity configurations")]
    CarryingUnsupported,
}
