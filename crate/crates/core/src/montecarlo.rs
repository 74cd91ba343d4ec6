//! Replicated simulation: per-generation event-frequency curves, limiting
//! growth-rate statistics, and empirical moment checks.
//!
//! Replicates are embarrassingly parallel. Each one owns the stream derived
//! from `(root_seed, replicate_index)`, and aggregation is an associative,
//! commutative merge of per-category counts, so results are bit-identical
//! across any degree of parallelism.

use crate::model::{conditional_moments, ModelConfig, ModelError, MomentPair, Species};
use crate::sampling::SeedStream;
use crate::simulator::{advance, drive, Fate, PopulationState};
use rayon::prelude::*;
use statrs::distribution::ContinuousCDF;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("wilson interval undefined for zero trials")]
    UndefinedInterval,
    #[error("confidence level must lie strictly in (0,1), got {0}")]
    InvalidLevel(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Per-generation counts of the five trajectory categories across
/// replicates. Counts at generation `n` sum to `replicates` for every `n`;
/// extinction counts never decrease and coexistence counts never increase.
#[derive(Debug, Clone, PartialEq)]
pub struct FateCurve {
    pub horizon: u32,
    pub replicates: u64,
    pub root_seed: u64,
    pub both_alive: Vec<u64>,
    pub system_extinct: Vec<u64>,
    pub prey_only: Vec<u64>,
    pub predator_only: Vec<u64>,
    pub exploded: Vec<u64>,
}

impl FateCurve {
    fn zero(horizon: u32, replicates: u64, root_seed: u64) -> Self {
        let len = horizon as usize + 1;
        FateCurve {
            horizon,
            replicates,
            root_seed,
            both_alive: vec![0; len],
            system_extinct: vec![0; len],
            prey_only: vec![0; len],
            predator_only: vec![0; len],
            exploded: vec![0; len],
        }
    }

    fn merge(mut self, other: FateCurve) -> FateCurve {
        for (a, b) in [
            (&mut self.both_alive, &other.both_alive),
            (&mut self.system_extinct, &other.system_extinct),
            (&mut self.prey_only, &other.prey_only),
            (&mut self.predator_only, &other.predator_only),
            (&mut self.exploded, &other.exploded),
        ] {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self
    }

    fn tally(&mut self, cfg: &ModelConfig, replicate: u64) {
        let mut stream = SeedStream::derive(self.root_seed, replicate);
        let mut last_seen = 0u32;
        let horizon = self.horizon;
        let summary = drive(
            cfg,
            horizon,
            &mut stream,
            |n, state| {
                last_seen = n;
                let bucket = if state.is_extinct() {
                    &mut self.system_extinct
                } else if state.both_alive() {
                    &mut self.both_alive
                } else if state.preys > 0 {
                    &mut self.prey_only
                } else {
                    &mut self.predator_only
                };
                bucket[n as usize] += 1;
            },
            |_| {},
        );
        // Trajectories that stopped early stay in their terminal category.
        let fill = match summary.fate {
            Fate::ExplodedAt(_) => &mut self.exploded,
            _ => &mut self.system_extinct,
        };
        for n in (last_seen + 1)..=horizon {
            fill[n as usize] += 1;
        }
    }

    pub fn p_both_alive(&self, n: u32) -> f64 {
        self.both_alive[n as usize] as f64 / self.replicates as f64
    }

    pub fn p_extinct(&self, n: u32) -> f64 {
        self.system_extinct[n as usize] as f64 / self.replicates as f64
    }

    pub fn p_prey_only(&self, n: u32) -> f64 {
        self.prey_only[n as usize] as f64 / self.replicates as f64
    }

    pub fn p_predator_only(&self, n: u32) -> f64 {
        self.predator_only[n as usize] as f64 / self.replicates as f64
    }

    pub fn p_exploded(&self, n: u32) -> f64 {
        self.exploded[n as usize] as f64 / self.replicates as f64
    }
}

/// Estimates the fate curve over `replicates` independent trajectories.
/// Deterministic in `root_seed` regardless of `parallelism`.
pub fn estimate_fate_curve(
    cfg: &ModelConfig,
    horizon: u32,
    replicates: u64,
    root_seed: u64,
    parallelism: usize,
) -> FateCurve {
    assert!(replicates >= 1, "at least one replicate required");
    let zero = || FateCurve::zero(horizon, replicates, root_seed);
    let fold = |mut acc: FateCurve, replicate: u64| {
        acc.tally(cfg, replicate);
        acc
    };
    if parallelism <= 1 {
        (0..replicates).fold(zero(), fold)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .expect("thread pool");
        pool.install(|| {
            (0..replicates)
                .into_par_iter()
                .fold(zero, fold)
                .reduce(zero, FateCurve::merge)
        })
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, level: f64) -> Result<(f64, f64), McError> {
    if trials == 0 {
        return Err(McError::UndefinedInterval);
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(McError::InvalidLevel(level));
    }
    assert!(successes <= trials, "successes exceed trials");
    let z = statrs::distribution::Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

/// End-of-run condition used to retain trajectories for growth statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FateCondition {
    /// Both species alive at the horizon.
    Coexisting,
    /// Predators extinct, preys alive at the horizon.
    PreyOnly,
}

/// Quartiles of a cross-trajectory sample at one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub count: u64,
}

fn quartiles(values: &mut [f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in statistics"));
    let q = |frac: f64| -> f64 {
        let pos = frac * (values.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        if lo == hi {
            values[lo]
        } else {
            values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
        }
    };
    Some(Quartiles {
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        count: values.len() as u64,
    })
}

/// Cross-trajectory distribution summaries per generation, for trajectories
/// retained under a fate condition: one-generation growth ratios, the
/// normalised sequences `Z_n / (rho2 mu)^n`, and the prey-per-predator
/// density.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthStats {
    pub condition: FateCondition,
    pub horizon: u32,
    pub replicates: u64,
    pub retained: u64,
    /// `rho2 * mu` for predators and preys: the growth rates the retained
    /// ratio sequences should approach.
    pub rate_predator: f64,
    pub rate_prey: f64,
    /// Ratio quartiles at n cover `Z_{n+1} / Z_n` (length `horizon`),
    /// computed over retained trajectories with a positive denominator.
    pub predator_ratio: Vec<Option<Quartiles>>,
    pub prey_ratio: Vec<Option<Quartiles>>,
    /// Normalised-size quartiles (length `horizon + 1`).
    pub predator_normalized: Vec<Option<Quartiles>>,
    pub prey_normalized: Vec<Option<Quartiles>>,
    /// Density quartiles over finite densities (length `horizon + 1`).
    pub density: Vec<Option<Quartiles>>,
}

impl GrowthStats {
    /// No trajectory matched the condition.
    pub fn is_empty(&self) -> bool {
        self.retained == 0
    }
}

/// Runs `replicates` trajectories, keeps those matching `condition` at the
/// horizon, and summarises their growth statistics generation by
/// generation. The unconstrained model only: growth rates of the carrying
/// model have no `(rho2 mu)^n` normalisation to compare against.
pub fn growth_stats(
    cfg: &ModelConfig,
    horizon: u32,
    replicates: u64,
    root_seed: u64,
    condition: FateCondition,
) -> Result<GrowthStats, McError> {
    if cfg.carrying.is_some() {
        return Err(McError::Model(ModelError::CarryingUnsupported));
    }
    let retained: Vec<Vec<PopulationState>> = (0..replicates)
        .into_par_iter()
        .filter_map(|replicate| {
            let mut stream = SeedStream::derive(root_seed, replicate);
            let mut states = Vec::with_capacity(horizon as usize + 1);
            let summary = drive(
                cfg,
                horizon,
                &mut stream,
                |_, state| states.push(state),
                |_| {},
            );
            let keep = match condition {
                FateCondition::Coexisting => summary.fate == Fate::BothAliveAtHorizon,
                FateCondition::PreyOnly => matches!(summary.fate, Fate::PreyOnlyAt(_)),
            };
            keep.then_some(states)
        })
        .collect();

    let (rate_predator, rate_prey) = cfg.max_growth_rates();
    let n_gens = horizon as usize + 1;
    let mut predator_ratio = Vec::with_capacity(horizon as usize);
    let mut prey_ratio = Vec::with_capacity(horizon as usize);
    let mut predator_normalized = Vec::with_capacity(n_gens);
    let mut prey_normalized = Vec::with_capacity(n_gens);
    let mut density = Vec::with_capacity(n_gens);

    for n in 0..n_gens {
        let mut w_pred = Vec::new();
        let mut w_prey = Vec::new();
        let mut dens = Vec::new();
        for states in &retained {
            if let Some(s) = states.get(n) {
                w_pred.push(s.predators as f64 / rate_predator.powi(n as i32));
                w_prey.push(s.preys as f64 / rate_prey.powi(n as i32));
                let d = s.density().value();
                if d.is_finite() {
                    dens.push(d);
                }
            }
        }
        predator_normalized.push(quartiles(&mut w_pred));
        prey_normalized.push(quartiles(&mut w_prey));
        density.push(quartiles(&mut dens));
    }
    for n in 0..horizon as usize {
        let mut r_pred = Vec::new();
        let mut r_prey = Vec::new();
        for states in &retained {
            if let (Some(s0), Some(s1)) = (states.get(n), states.get(n + 1)) {
                if s0.predators > 0 {
                    r_pred.push(s1.predators as f64 / s0.predators as f64);
                }
                if s0.preys > 0 {
                    r_prey.push(s1.preys as f64 / s0.preys as f64);
                }
            }
        }
        predator_ratio.push(quartiles(&mut r_pred));
        prey_ratio.push(quartiles(&mut r_prey));
    }

    Ok(GrowthStats {
        condition,
        horizon,
        replicates,
        retained: retained.len() as u64,
        rate_predator,
        rate_prey,
        predator_ratio,
        prey_ratio,
        predator_normalized,
        prey_normalized,
        density,
    })
}

/// End-of-run tallies of the limit-event proxies: coexistence, prey
/// fixation, and growing predator fixation.
///
/// A trajectory that leaves the exactly-simulable range is classified by
/// the species alive when it did: diverging with predators extinct is the
/// prey-fixation event realised, and symmetrically for preys extinct. A
/// predator-only episode counts as fixation only when it is not dying out,
/// i.e. the final predator count is at least the count when preys vanished.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FixationTally {
    pub replicates: u64,
    pub coexisting: u64,
    pub prey_fixation: u64,
    pub predator_fixation_growing: u64,
    pub system_extinct: u64,
    /// Single-species episodes still shrinking at the horizon.
    pub lingering: u64,
}

impl FixationTally {
    fn merge(mut self, other: FixationTally) -> FixationTally {
        self.replicates += other.replicates;
        self.coexisting += other.coexisting;
        self.prey_fixation += other.prey_fixation;
        self.predator_fixation_growing += other.predator_fixation_growing;
        self.system_extinct += other.system_extinct;
        self.lingering += other.lingering;
        self
    }
}

/// Classifies `replicates` trajectories by their end-of-run limit-event
/// proxy at the horizon.
pub fn fixation_tally(
    cfg: &ModelConfig,
    horizon: u32,
    replicates: u64,
    root_seed: u64,
) -> FixationTally {
    (0..replicates)
        .into_par_iter()
        .fold(FixationTally::default, |mut acc, replicate| {
            let mut stream = SeedStream::derive(root_seed, replicate);
            let mut last_state = PopulationState::new(cfg.initial.0, cfg.initial.1);
            let mut preds_at_prey_death = None;
            let summary = drive(
                cfg,
                horizon,
                &mut stream,
                |_, state| {
                    if state.preys == 0 && preds_at_prey_death.is_none() {
                        preds_at_prey_death = Some(state.predators);
                    }
                    last_state = state;
                },
                |_| {},
            );
            acc.replicates += 1;
            match summary.fate {
                Fate::ExtinctAt(_) => acc.system_extinct += 1,
                Fate::BothAliveAtHorizon => acc.coexisting += 1,
                Fate::PreyOnlyAt(_) => acc.prey_fixation += 1,
                Fate::PredatorOnlyAt(_) => {
                    let start = preds_at_prey_death.unwrap_or(0);
                    if summary.final_state.predators >= start.max(1) {
                        acc.predator_fixation_growing += 1;
                    } else {
                        acc.lingering += 1;
                    }
                }
                Fate::ExplodedAt(_) => {
                    if last_state.predators == 0 {
                        acc.prey_fixation += 1;
                    } else if last_state.preys == 0 {
                        acc.predator_fixation_growing += 1;
                    } else {
                        acc.coexisting += 1;
                    }
                }
            }
            acc
        })
        .reduce(FixationTally::default, FixationTally::merge)
}

/// Verdict for one state and species in a moment check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheckEntry {
    pub state: (u64, u64),
    pub species: Species,
    pub analytic: MomentPair,
    pub empirical: MomentPair,
    pub mean_ok: bool,
    pub variance_ok: bool,
}

/// Empirical one-step moments versus the analytic formulas.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheckReport {
    pub draws: u64,
    pub entries: Vec<MomentCheckEntry>,
    /// Steps that signalled explosion (always a failure).
    pub explosions: u64,
}

impl MomentCheckReport {
    pub fn all_ok(&self) -> bool {
        self.explosions == 0 && self.entries.iter().all(|e| e.mean_ok && e.variance_ok)
    }
}

/// Tolerances of the moment check: empirical means must fall within
/// `4 * sqrt(var / draws)` of the analytic mean, and empirical variances
/// within 10% of the analytic variance; exact zeros must be hit exactly.
pub fn moment_check(
    cfg: &ModelConfig,
    states: &[(u64, u64)],
    draws: u64,
    root_seed: u64,
) -> Result<MomentCheckReport, McError> {
    assert!(draws >= 1, "at least one draw per state required");
    let mut entries = Vec::new();
    let mut explosions = 0u64;
    for (idx, &(z, zq)) in states.iter().enumerate() {
        let analytic = conditional_moments(cfg, z, zq)?;
        let mut stream = SeedStream::derive(root_seed, idx as u64);
        let state = PopulationState::new(z, zq);
        let mut acc = [OnlineMoments::default(), OnlineMoments::default()];
        for _ in 0..draws {
            match advance(cfg, state, &mut stream, 0) {
                Ok((next, _)) => {
                    acc[0].push(next.predators as f64);
                    acc[1].push(next.preys as f64);
                }
                Err(_) => explosions += 1,
            }
        }
        for (species, analytic, moments) in [
            (Species::Predator, analytic.predator, &acc[0]),
            (Species::Prey, analytic.prey, &acc[1]),
        ] {
            let empirical = moments.finish();
            entries.push(MomentCheckEntry {
                state: (z, zq),
                species,
                analytic,
                empirical,
                mean_ok: mean_within_tolerance(analytic, empirical, draws),
                variance_ok: variance_within_tolerance(analytic, empirical),
            });
        }
    }
    Ok(MomentCheckReport {
        draws,
        entries,
        explosions,
    })
}

fn mean_within_tolerance(analytic: MomentPair, empirical: MomentPair, draws: u64) -> bool {
    if analytic.variance == 0.0 {
        return empirical.mean == analytic.mean && empirical.variance == 0.0;
    }
    let se = (analytic.variance / draws as f64).sqrt();
    (empirical.mean - analytic.mean).abs() <= 4.0 * se
}

fn variance_within_tolerance(analytic: MomentPair, empirical: MomentPair) -> bool {
    if analytic.variance == 0.0 {
        return empirical.variance == 0.0;
    }
    (empirical.variance - analytic.variance).abs() <= 0.10 * analytic.variance
}

/// Streaming mean/variance accumulator (Welford).
#[derive(Debug, Clone, Copy, Default)]
struct OnlineMoments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl OnlineMoments {
    fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    fn finish(&self) -> MomentPair {
        MomentPair {
            mean: self.mean,
            variance: if self.count > 1 {
                self.m2 / (self.count - 1) as f64
            } else {
                0.0
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{OffspringLaw, SurvivalFunction};

    fn example1() -> ModelConfig {
        ModelConfig {
            predator_law: OffspringLaw::geometric(1.0 / 3.0).unwrap(),
            prey_law: OffspringLaw::geometric(0.4).unwrap(),
            predator_survival: SurvivalFunction::build_g1(0.1, 0.6, 0.5, 2.0).unwrap(),
            prey_survival: SurvivalFunction::build_g1(0.15, 0.9, 0.5, 1.5).unwrap(),
            carrying: None,
            initial: (5, 5),
        }
    }

    fn trivially_extinct() -> ModelConfig {
        let mut cfg = example1();
        cfg.predator_law = OffspringLaw::explicit(vec![1.0]).unwrap();
        cfg.prey_law = OffspringLaw::explicit(vec![1.0]).unwrap();
        cfg.initial = (1, 1);
        cfg
    }

    #[test]
    fn wilson_interval_edges() {
        let (lo, _) = wilson_interval(0, 100, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        let (_, hi) = wilson_interval(10, 10, 0.95).unwrap();
        assert_eq!(hi, 1.0);
        let (lo, hi) = wilson_interval(50, 100, 0.95).unwrap();
        assert!(lo < 0.5 && hi > 0.5);
        // At p = 1/2 the Wilson centre collapses to 1/2 exactly.
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!(matches!(
            wilson_interval(0, 0, 0.95),
            Err(McError::UndefinedInterval)
        ));
        assert!(matches!(
            wilson_interval(1, 2, 1.5),
            Err(McError::InvalidLevel(_))
        ));
    }

    #[test]
    fn trivially_extinct_curve_is_all_extinct_from_one() {
        let curve = estimate_fate_curve(&trivially_extinct(), 5, 1, 3, 1);
        assert_eq!(curve.both_alive[0], 1);
        for n in 1..=5 {
            assert_eq!(curve.system_extinct[n as usize], 1, "generation {n}");
            assert_eq!(curve.p_extinct(n), 1.0);
        }
    }

    #[test]
    fn fate_curve_counts_sum_and_are_monotone() {
        let cfg = example1();
        let curve = estimate_fate_curve(&cfg, 40, 500, 11, 1);
        for n in 0..=40usize {
            let total = curve.both_alive[n]
                + curve.system_extinct[n]
                + curve.prey_only[n]
                + curve.predator_only[n]
                + curve.exploded[n];
            assert_eq!(total, 500, "generation {n}");
        }
        for n in 1..=40usize {
            assert!(curve.system_extinct[n] >= curve.system_extinct[n - 1]);
            assert!(curve.both_alive[n] <= curve.both_alive[n - 1]);
        }
    }

    #[test]
    fn fate_curve_is_parallelism_invariant() {
        let cfg = example1();
        let sequential = estimate_fate_curve(&cfg, 30, 400, 123, 1);
        let four = estimate_fate_curve(&cfg, 30, 400, 123, 4);
        let sixteen = estimate_fate_curve(&cfg, 30, 400, 123, 16);
        assert_eq!(sequential, four);
        assert_eq!(sequential, sixteen);
    }

    #[test]
    fn growth_stats_empty_flag() {
        // Trivially extinct: nothing coexists at the horizon.
        let stats =
            growth_stats(&trivially_extinct(), 10, 20, 5, FateCondition::Coexisting).unwrap();
        assert!(stats.is_empty());
        assert_eq!(stats.retained, 0);
    }

    #[test]
    fn growth_stats_retains_coexisting_paths() {
        let cfg = example1();
        let stats = growth_stats(&cfg, 20, 400, 9, FateCondition::Coexisting).unwrap();
        assert!(stats.retained > 0);
        assert_eq!(stats.predator_ratio.len(), 20);
        assert_eq!(stats.predator_normalized.len(), 21);
        // Retained paths never die, so every generation has full counts.
        for q in &stats.predator_ratio {
            assert_eq!(q.unwrap().count, stats.retained);
        }
        assert!((stats.rate_predator - 1.2).abs() < 1e-12);
        assert!((stats.rate_prey - 1.35).abs() < 1e-12);
    }

    #[test]
    fn moment_check_zero_boundaries_are_exact() {
        let cfg = example1();
        let report = moment_check(&cfg, &[(0, 10), (7, 0)], 2000, 17).unwrap();
        assert_eq!(report.explosions, 0);
        let predator_at_0_10 = report
            .entries
            .iter()
            .find(|e| e.state == (0, 10) && e.species == Species::Predator)
            .unwrap();
        assert_eq!(predator_at_0_10.empirical.mean, 0.0);
        assert!(predator_at_0_10.mean_ok && predator_at_0_10.variance_ok);
        let prey_at_7_0 = report
            .entries
            .iter()
            .find(|e| e.state == (7, 0) && e.species == Species::Prey)
            .unwrap();
        assert_eq!(prey_at_7_0.empirical.mean, 0.0);
        assert!(prey_at_7_0.mean_ok && prey_at_7_0.variance_ok);
    }

    #[test]
    fn quartiles_interpolate() {
        let mut values = vec![4.0, 1.0, 3.0, 2.0];
        let q = quartiles(&mut values).unwrap();
        assert_eq!(q.median, 2.5);
        assert_eq!(q.q1, 1.75);
        assert_eq!(q.q3, 3.25);
        assert_eq!(q.count, 4);
        assert!(quartiles(&mut []).is_none());
    }
}
