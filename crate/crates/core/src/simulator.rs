//! Generation-step engines and full-trajectory simulation.
//!
//! A generation consists of a control phase (density-dependent binomial
//! survival, preceded by a competition thinning when a carrying capacity is
//! configured) and a reproduction phase (offspring sums over the
//! survivors). `(0, 0)` is absorbing; after a single species dies out the
//! simulation keeps running under the boundary control laws, so fixation
//! episodes are observable.

use crate::model::{Density, ModelConfig};
use crate::sampling::{sample_binomial, sample_offspring_sum, Explosion, SeedStream};

/// Current sizes of both populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PopulationState {
    pub predators: u64,
    pub preys: u64,
}

impl PopulationState {
    pub fn new(predators: u64, preys: u64) -> Self {
        PopulationState { predators, preys }
    }

    /// Whether the whole system is extinct (the absorbing state).
    pub fn is_extinct(self) -> bool {
        self.predators == 0 && self.preys == 0
    }

    pub fn both_alive(self) -> bool {
        self.predators > 0 && self.preys > 0
    }

    /// Preys-per-predator density before the control phase.
    pub fn density(self) -> Density {
        Density::from_counts(self.predators, self.preys)
    }
}

/// What happened during one executed generation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: u32,
    pub state_before: PopulationState,
    pub density_before_control: Density,
    pub predator_survivors: u64,
    pub prey_survivors: u64,
    /// Preys left after the competition stage (carrying-capacity model
    /// only); the interaction stage then runs on this count.
    pub competition_survivors: Option<u64>,
}

/// Final classification of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// `(0,0)` was reached at this generation.
    ExtinctAt(u32),
    /// Preys died at this generation and predators were still alive at the
    /// end of the run.
    PredatorOnlyAt(u32),
    /// Predators died at this generation and preys were still alive at the
    /// end of the run.
    PreyOnlyAt(u32),
    BothAliveAtHorizon,
    /// The step producing this generation left the exactly-simulable range.
    ExplodedAt(u32),
}

/// How much per-generation data a simulation keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordMode {
    /// Keep full generation records and the state sequence.
    Full,
    /// Keep only the state sequence.
    StatesOnly,
    /// Keep O(1) state; only the fate and final state survive.
    FateOnly,
}

/// One simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// One record per executed generation step (`Full` mode).
    pub records: Vec<GenerationRecord>,
    /// `states[n]` is the population at generation `n`
    /// (`Full` and `StatesOnly` modes).
    pub states: Vec<PopulationState>,
    pub final_state: PopulationState,
    pub fate: Fate,
    /// Number of executed generation steps.
    pub generations: u32,
}

/// One generation of the unconstrained model: binomial survival controls at
/// the current density, then independent offspring sums per species.
pub fn step(
    cfg: &ModelConfig,
    state: PopulationState,
    stream: &mut SeedStream,
    generation: u32,
) -> Result<(PopulationState, GenerationRecord), Explosion> {
    let density = state.density();
    let record = interaction_step(cfg, state, state.preys, density, None, stream, generation)?;
    Ok(record)
}

/// One generation of the carrying-capacity model: the preys are first
/// thinned by the competition stage, and the interaction stage then runs on
/// the surviving preys and the corresponding density.
pub fn step_carrying(
    cfg: &ModelConfig,
    state: PopulationState,
    stream: &mut SeedStream,
    generation: u32,
) -> Result<(PopulationState, GenerationRecord), Explosion> {
    let carrying = cfg
        .carrying
        .as_ref()
        .expect("step_carrying requires a carrying capacity");
    let mature = sample_binomial(state.preys, carrying.eval(state.preys), stream)?;
    let density = Density::from_counts(state.predators, mature);
    interaction_step(
        cfg,
        state,
        mature,
        density,
        Some(mature),
        stream,
        generation,
    )
}

#[allow(clippy::too_many_arguments)]
fn interaction_step(
    cfg: &ModelConfig,
    state: PopulationState,
    preys_at_control: u64,
    density: Density,
    competition_survivors: Option<u64>,
    stream: &mut SeedStream,
    generation: u32,
) -> Result<(PopulationState, GenerationRecord), Explosion> {
    let predator_survivors =
        sample_binomial(state.predators, cfg.predator_survival.eval(density), stream)?;
    let prey_survivors =
        sample_binomial(preys_at_control, cfg.prey_survival.eval(density), stream)?;
    let next = PopulationState {
        predators: sample_offspring_sum(&cfg.predator_law, predator_survivors, stream)?,
        preys: sample_offspring_sum(&cfg.prey_law, prey_survivors, stream)?,
    };
    let record = GenerationRecord {
        generation,
        state_before: state,
        density_before_control: state.density(),
        predator_survivors,
        prey_survivors,
        competition_survivors,
    };
    Ok((next, record))
}

/// Dispatches on the presence of a carrying capacity.
pub fn advance(
    cfg: &ModelConfig,
    state: PopulationState,
    stream: &mut SeedStream,
    generation: u32,
) -> Result<(PopulationState, GenerationRecord), Explosion> {
    if cfg.carrying.is_some() {
        step_carrying(cfg, state, stream, generation)
    } else {
        step(cfg, state, stream, generation)
    }
}

/// Summary handed back by [`drive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RunSummary {
    pub fate: Fate,
    pub final_state: PopulationState,
    pub generations: u32,
}

/// Runs one trajectory, invoking `on_state(n, state)` for every reached
/// generation (starting with generation 0) and `on_record` for every
/// executed step. Stops at the horizon, at absorption in `(0,0)`, or on
/// explosion.
pub(crate) fn drive(
    cfg: &ModelConfig,
    horizon: u32,
    stream: &mut SeedStream,
    mut on_state: impl FnMut(u32, PopulationState),
    mut on_record: impl FnMut(&GenerationRecord),
) -> RunSummary {
    let mut current = PopulationState::new(cfg.initial.0, cfg.initial.1);
    let mut first_pred_zero = zero_time(current.predators, 0);
    let mut first_prey_zero = zero_time(current.preys, 0);
    let mut first_both_zero = if current.is_extinct() { Some(0) } else { None };
    let mut exploded_at = None;
    let mut generations = 0;
    on_state(0, current);
    for n in 0..horizon {
        if current.is_extinct() {
            break;
        }
        match advance(cfg, current, stream, n) {
            Ok((next, record)) => {
                on_record(&record);
                current = next;
                generations = n + 1;
                if first_pred_zero.is_none() && next.predators == 0 {
                    first_pred_zero = Some(n + 1);
                }
                if first_prey_zero.is_none() && next.preys == 0 {
                    first_prey_zero = Some(n + 1);
                }
                if first_both_zero.is_none() && next.is_extinct() {
                    first_both_zero = Some(n + 1);
                }
                on_state(n + 1, next);
            }
            Err(Explosion) => {
                exploded_at = Some(n + 1);
                break;
            }
        }
        stream.advance_generation();
    }
    let fate = if let Some(e) = exploded_at {
        Fate::ExplodedAt(e)
    } else if current.is_extinct() {
        Fate::ExtinctAt(first_both_zero.expect("extinction time recorded"))
    } else if current.both_alive() {
        Fate::BothAliveAtHorizon
    } else if current.preys > 0 {
        Fate::PreyOnlyAt(first_pred_zero.expect("predator extinction time recorded"))
    } else {
        Fate::PredatorOnlyAt(first_prey_zero.expect("prey extinction time recorded"))
    };
    RunSummary {
        fate,
        final_state: current,
        generations,
    }
}

fn zero_time(count: u64, now: u32) -> Option<u32> {
    if count == 0 {
        Some(now)
    } else {
        None
    }
}

/// Simulates one trajectory for up to `horizon` generations.
pub fn simulate(
    cfg: &ModelConfig,
    horizon: u32,
    stream: &mut SeedStream,
    mode: RecordMode,
) -> Trajectory {
    assert!(horizon >= 1, "horizon must be at least 1");
    let mut records = Vec::new();
    let mut states = Vec::new();
    let summary = drive(
        cfg,
        horizon,
        stream,
        |_, state| {
            if !matches!(mode, RecordMode::FateOnly) {
                states.push(state);
            }
        },
        |record| {
            if matches!(mode, RecordMode::Full) {
                records.push(*record);
            }
        },
    );
    Trajectory {
        records,
        states,
        final_state: summary.final_state,
        fate: summary.fate,
        generations: summary.generations,
    }
}
