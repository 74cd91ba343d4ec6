//! Simulation engine for predator-prey density-dependent branching
//! processes.
//!
//! The population model is a two-species discrete-time branching process.
//! Each generation runs a control phase, where every predator and every
//! prey independently survives with a probability that depends on the
//! current preys-per-predator density, followed by a reproduction phase,
//! where the survivors of each species produce i.i.d. offspring. An
//! optional carrying capacity adds a prey competition thinning in front of
//! the control phase, which changes the long-run behaviour from possible
//! coexistence to certain extinction.
//!
//! Modules:
//! - [`model`]: parameter types, survival/competition function families,
//!   validation of the standing assumptions, analytic one-step moments.
//! - [`sampling`]: reproducible per-replicate random streams and exact
//!   binomial / offspring-sum variates.
//! - [`simulator`]: generation-step engines and trajectory simulation with
//!   fate classification.
//! - [`montecarlo`]: replicated estimation of event-probability curves,
//!   growth-rate statistics, and empirical moment checks.
//! - [`oracle`]: brute-force exact one-step distributions for tiny states,
//!   the ground truth the samplers are tested against.

// `!(x > 0.0)` rejects NaN along with the out-of-range values; the
// suggested `partial_cmp` form does not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod sampling;
pub mod simulator;

pub use model::{
    check_tail_decay, conditional_moments, log_grid, validate_config, CompetitionFamily,
    CompetitionFunction, ConditionalMoments, Density, LawKind, ModelConfig, ModelError, MomentPair,
    OffspringLaw, Species, SurvivalFamily, SurvivalFunction, TailDecayReport, ValidationReport,
    Violation,
};
pub use montecarlo::{
    estimate_fate_curve, fixation_tally, growth_stats, moment_check, wilson_interval,
    FateCondition, FateCurve, FixationTally, GrowthStats, McError, MomentCheckReport, Quartiles,
};
pub use oracle::{
    distribution_distance, exact_carrying_prey_mean, exact_step_distribution, CarryingPreyMean,
    JointHistogram, OracleError, StepDistribution,
};
pub use sampling::{
    derive_stream, sample_binomial, sample_offspring_sum, Explosion, SeedStream, MAX_BINOMIAL_SIZE,
    MAX_POPULATION,
};
pub use simulator::{
    advance, simulate, step, step_carrying, Fate, GenerationRecord, PopulationState, RecordMode,
    Trajectory,
};
