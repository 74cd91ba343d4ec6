//! Exact one-step conditional moments of both species.

use super::{Density, ModelConfig, ModelError};

/// Mean and variance of one species' next-generation size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

/// One-step conditional moments for both species from a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalMoments {
    pub predator: MomentPair,
    pub prey: MomentPair,
}

/// Analytic one-step mean and variance from state `(predators, preys)`:
///
/// ```text
/// E[Z']   = z r(d) mu
/// Var[Z'] = z r(d) sigma^2 + z r(d) (1 - r(d)) mu^2
/// ```
///
/// with `d` the preys-per-predator density (infinite when predators are
/// absent, which routes the boundary control laws through ordinary
/// evaluation). Carrying-capacity configurations are not supported here;
/// the prey mean then involves an expectation over the competition
/// thinning, covered by the oracle module.
pub fn conditional_moments(
    cfg: &ModelConfig,
    predators: u64,
    preys: u64,
) -> Result<ConditionalMoments, ModelError> {
    if cfg.carrying.is_some() {
        return Err(ModelError::CarryingUnsupported);
    }
    let density = Density::from_counts(predators, preys);
    Ok(ConditionalMoments {
        predator: species_moments(
            predators,
            cfg.predator_survival.eval(density),
            cfg.predator_law.mean(),
            cfg.predator_law.variance(),
        ),
        prey: species_moments(
            preys,
            cfg.prey_survival.eval(density),
            cfg.prey_law.mean(),
            cfg.prey_law.variance(),
        ),
    })
}

fn species_moments(count: u64, r: f64, mu: f64, sigma2: f64) -> MomentPair {
    let z = count as f64;
    MomentPair {
        mean: z * r * mu,
        variance: z * r * sigma2 + z * r * (1.0 - r) * mu * mu,
    }
}
