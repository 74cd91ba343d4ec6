//! Shared fixtures for the engine benchmarks.

use ppbranch_core::model::{CompetitionFunction, ModelConfig, OffspringLaw, SurvivalFunction};

/// The exponential-growth example configuration.
pub fn exponential_config() -> ModelConfig {
    ModelConfig {
        predator_law: OffspringLaw::geometric(1.0 / 3.0).unwrap(),
        prey_law: OffspringLaw::geometric(0.4).unwrap(),
        predator_survival: SurvivalFunction::build_g1(0.1, 0.6, 0.5, 2.0).unwrap(),
        prey_survival: SurvivalFunction::build_g1(0.15, 0.9, 0.5, 1.5).unwrap(),
        carrying: None,
        initial: (5, 5),
    }
}

/// Same parameters with a Beverton-Holt carrying capacity of 1000.
pub fn carrying_config() -> ModelConfig {
    let mut cfg = exponential_config();
    cfg.carrying = Some(CompetitionFunction::beverton_holt(1000.0).unwrap());
    cfg
}
