//! Brute-force ground truth for tiny states.
//!
//! The one-step transition law implied by the model definition is
//! materialised exactly: binomial control weights are enumerated, offspring
//! pmfs are convolved survivor-by-survivor, and the species are combined as
//! a product measure. Offspring laws with infinite support are truncated at
//! a caller-chosen tail mass which is tracked, never silently dropped, so
//! every comparison against the oracle carries an explicit error budget.

use crate::model::{Density, ModelConfig, ModelError, MomentPair, OffspringLaw};
use std::collections::BTreeMap;
use thiserror::Error;

/// Largest per-species count enumerated exactly.
pub const MAX_ORACLE_STATE: u64 = 6;

/// Tail mass above which an oracle is not accepted as ground truth.
pub const MAX_ACCEPTED_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("state ({0}, {1}) too large for exact enumeration (both counts must be <= {MAX_ORACLE_STATE})")]
    StateTooLarge(u64, u64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Exact one-step distribution over next states `(predators, preys)`,
/// missing only the tracked truncation tail.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    support: BTreeMap<(u64, u64), f64>,
    truncation_tail_mass: f64,
}

impl StepDistribution {
    pub fn support(&self) -> &BTreeMap<(u64, u64), f64> {
        &self.support
    }

    pub fn truncation_tail_mass(&self) -> f64 {
        self.truncation_tail_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.support.values().sum()
    }

    /// Mean and variance of one species' marginal (renormalised over the
    /// retained mass).
    pub fn marginal_moments(&self, species: crate::model::Species) -> MomentPair {
        let mut mass = 0.0;
        let mut mean = 0.0;
        let mut second = 0.0;
        for (&(zp, zq), &p) in &self.support {
            let v = match species {
                crate::model::Species::Predator => zp as f64,
                crate::model::Species::Prey => zq as f64,
            };
            mass += p;
            mean += v * p;
            second += v * v * p;
        }
        mean /= mass;
        second /= mass;
        MomentPair {
            mean,
            variance: (second - mean * mean).max(0.0),
        }
    }

    /// Point-mass distribution, used as a fixture in tests.
    pub fn point_mass(state: (u64, u64)) -> Self {
        let mut support = BTreeMap::new();
        support.insert(state, 1.0);
        StepDistribution {
            support,
            truncation_tail_mass: 0.0,
        }
    }
}

/// Binomial pmf over `0..=n` computed by the multiplicative recurrence;
/// exact to double precision for the tiny `n` used here.
fn binomial_weights(n: u64, p: f64) -> Vec<f64> {
    let mut w = vec![0.0; n as usize + 1];
    if p <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if p >= 1.0 {
        w[n as usize] = 1.0;
        return w;
    }
    let q = 1.0 - p;
    let mut value = q.powi(n as i32);
    for (k, slot) in w.iter_mut().enumerate() {
        *slot = value;
        let k = k as f64;
        value *= (n as f64 - k) / (k + 1.0) * (p / q);
    }
    w
}

/// Iterated self-convolutions of `base`: returns `[base^(*0), ..., base^(*times)]`.
fn convolution_powers(base: &[f64], times: u64) -> Vec<Vec<f64>> {
    let mut powers = Vec::with_capacity(times as usize + 1);
    powers.push(vec![1.0]);
    for _ in 0..times {
        let prev = powers.last().expect("non-empty");
        let mut next = vec![0.0; prev.len() + base.len() - 1];
        for (i, &a) in prev.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in base.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        powers.push(next);
    }
    powers
}

/// Marginal distribution of one species' next count: binomial mixture of
/// offspring-sum convolutions.
fn species_marginal(law: &OffspringLaw, count: u64, survival: f64, truncation: f64) -> Vec<f64> {
    let (base, _) = law.truncated_pmf(truncation);
    let powers = convolution_powers(&base, count);
    let weights = binomial_weights(count, survival);
    let max_len = powers.last().map_or(1, Vec::len);
    let mut marginal = vec![0.0; max_len];
    for (survivors, w) in weights.iter().enumerate() {
        for (value, &p) in powers[survivors].iter().enumerate() {
            marginal[value] += w * p;
        }
    }
    marginal
}

/// Enumerates the exact one-step distribution from `state`, truncating
/// infinite-support offspring laws at per-individual tail mass
/// `offspring_truncation`. Both counts must be at most [`MAX_ORACLE_STATE`].
pub fn exact_step_distribution(
    cfg: &ModelConfig,
    state: (u64, u64),
    offspring_truncation: f64,
) -> Result<StepDistribution, OracleError> {
    let (z, zq) = state;
    if z > MAX_ORACLE_STATE || zq > MAX_ORACLE_STATE {
        return Err(OracleError::StateTooLarge(z, zq));
    }
    assert!(
        cfg.carrying.is_none(),
        "exact_step_distribution covers the unconstrained model"
    );
    let density = Density::from_counts(z, zq);
    let pred = species_marginal(
        &cfg.predator_law,
        z,
        cfg.predator_survival.eval(density),
        offspring_truncation,
    );
    let prey = species_marginal(
        &cfg.prey_law,
        zq,
        cfg.prey_survival.eval(density),
        offspring_truncation,
    );
    let mut support = BTreeMap::new();
    for (a, &pa) in pred.iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (b, &pb) in prey.iter().enumerate() {
            let p = pa * pb;
            if p > 0.0 {
                support.insert((a as u64, b as u64), p);
            }
        }
    }
    let mass: f64 = support.values().sum();
    Ok(StepDistribution {
        support,
        truncation_tail_mass: (1.0 - mass).max(0.0),
    })
}

/// Result of the exact carrying-model prey mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarryingPreyMean {
    /// `mu~ * sum_m BinPmf(z~, s~(z~, K))(m) * m * r~(m / z)`
    pub mean: f64,
    /// `rho2~ * mu~ * s~(z~, K) * z~`, which always dominates the mean.
    pub upper_bound: f64,
}

/// Exact conditional prey mean for the carrying-capacity model from state
/// `(predators, preys)`: a single binomial expectation over the competition
/// stage, evaluated term by term.
pub fn exact_carrying_prey_mean(cfg: &ModelConfig, state: (u64, u64)) -> CarryingPreyMean {
    let carrying = cfg
        .carrying
        .as_ref()
        .expect("exact_carrying_prey_mean requires a carrying capacity");
    let (z, zq) = state;
    let mu = cfg.prey_law.mean();
    let rho2 = cfg.prey_survival.rho2();
    if zq == 0 {
        return CarryingPreyMean {
            mean: 0.0,
            upper_bound: 0.0,
        };
    }
    let s = carrying.eval(zq);
    let thinning = statrs::distribution::Binomial::new(s, zq).expect("valid thinning binomial");
    use statrs::distribution::Discrete;
    let mut mean = 0.0;
    for m in 1..=zq {
        let weight = thinning.pmf(m);
        if weight == 0.0 {
            continue;
        }
        let density = Density::from_counts(z, m);
        mean += weight * m as f64 * cfg.prey_survival.eval(density);
    }
    mean *= mu;
    let upper_bound = rho2 * mu * s * zq as f64;
    // Tolerance covers pmf rounding accumulated over up to 10^4 terms.
    assert!(
        mean <= upper_bound * (1.0 + 1e-11) + 1e-300,
        "prey mean {mean} exceeded its bound {upper_bound}"
    );
    CarryingPreyMean { mean, upper_bound }
}

/// Empirical joint histogram over next states, for comparison against an
/// exact distribution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JointHistogram {
    counts: BTreeMap<(u64, u64), u64>,
    total: u64,
}

impl JointHistogram {
    pub fn record(&mut self, state: (u64, u64)) {
        *self.counts.entry(state).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<(u64, u64), u64> {
        &self.counts
    }
}

/// Total-variation distance between an empirical histogram and an exact
/// distribution. The exact distribution's truncated tail counts fully as
/// disagreement.
pub fn distribution_distance(empirical: &JointHistogram, exact: &StepDistribution) -> f64 {
    assert!(empirical.total > 0, "empty histogram");
    let n = empirical.total as f64;
    let mut acc = 0.0;
    for (&state, &count) in &empirical.counts {
        let p = exact.support.get(&state).copied().unwrap_or(0.0);
        acc += (count as f64 / n - p).abs();
    }
    for (&state, &p) in &exact.support {
        if !empirical.counts.contains_key(&state) {
            acc += p;
        }
    }
    0.5 * (acc + exact.truncation_tail_mass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        conditional_moments, CompetitionFunction, OffspringLaw, Species, SurvivalFunction,
    };

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

    #[test]
    fn binomial_weights_sum_to_one() {
        for (n, p) in [(0u64, 0.3), (1, 0.58), (6, 0.9), (4, 0.0), (4, 1.0)] {
            let w = binomial_weights(n, p);
            assert_eq!(w.len() as u64, n + 1);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "n={n} p={p} sum={sum}");
        }
    }

    #[test]
    fn absorbing_state_is_a_point_mass() {
        let d = exact_step_distribution(&example1(), (0, 0), 1e-9).unwrap();
        assert_eq!(d.support().len(), 1);
        assert!((d.support()[&(0, 0)] - 1.0).abs() < 1e-12);
        assert!(d.truncation_tail_mass() < 1e-12);
    }

    #[test]
    fn lone_predator_mixes_extinction_with_offspring() {
        // From (1, 0): prey marginal is a point mass at zero; the predator
        // marginal is (1 - rho1) delta_0 + rho1 * offspring pmf.
        let cfg = example1();
        let d = exact_step_distribution(&cfg, (1, 0), 1e-12).unwrap();
        for &(_, preys) in d.support().keys() {
            assert_eq!(preys, 0);
        }
        let rho1 = 0.1;
        let p0 = d.support()[&(0, 0)];
        let expected0 = (1.0 - rho1) + rho1 * cfg.predator_law.pmf(0);
        assert!((p0 - expected0).abs() < 1e-12);
        let p3 = d.support()[&(3, 0)];
        assert!((p3 - rho1 * cfg.predator_law.pmf(3)).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_analytic_moments() {
        let cfg = example1();
        let d = exact_step_distribution(&cfg, (2, 3), 1e-10).unwrap();
        assert!(d.truncation_tail_mass() < MAX_ACCEPTED_TAIL);
        let analytic = conditional_moments(&cfg, 2, 3).unwrap();
        let pred = d.marginal_moments(Species::Predator);
        let prey = d.marginal_moments(Species::Prey);
        assert!((pred.mean - analytic.predator.mean).abs() < 1e-6);
        assert!((pred.variance - analytic.predator.variance).abs() < 1e-5);
        assert!((prey.mean - analytic.prey.mean).abs() < 1e-6);
        assert!((prey.variance - analytic.prey.variance).abs() < 1e-5);
    }

    #[test]
    fn mass_accounting_is_consistent() {
        let d = exact_step_distribution(&example1(), (3, 2), 1e-9).unwrap();
        assert!((d.total_mass() + d.truncation_tail_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oversized_states_are_refused() {
        let err = exact_step_distribution(&example1(), (7, 1), 1e-9).unwrap_err();
        assert!(matches!(err, OracleError::StateTooLarge(7, 1)));
    }

    #[test]
    fn carrying_prey_mean_obeys_the_bound() {
        let mut cfg = example1();
        cfg.carrying = Some(CompetitionFunction::beverton_holt(1000.0).unwrap());
        for state in [(5u64, 5u64), (5, 500), (5, 5000), (1, 10_000), (50, 3)] {
            let result = exact_carrying_prey_mean(&cfg, state);
            assert!(result.mean <= result.upper_bound * (1.0 + 1e-11));
            assert!(result.mean >= 0.0);
        }
        assert_eq!(exact_carrying_prey_mean(&cfg, (5, 0)).mean, 0.0);
    }

    #[test]
    fn huge_capacity_recovers_plain_prey_mean() {
        let mut cfg = example1();
        cfg.carrying = Some(CompetitionFunction::beverton_holt(1e15).unwrap());
        let plain = {
            let mut plain_cfg = cfg.clone();
            plain_cfg.carrying = None;
            conditional_moments(&plain_cfg, 5, 40).unwrap().prey.mean
        };
        let carrying = exact_carrying_prey_mean(&cfg, (5, 40)).mean;
        assert!(
            (carrying - plain).abs() < 1e-9,
            "carrying {carrying} vs plain {plain}"
        );
    }

    #[test]
    fn tv_distance_edges() {
        let exact = StepDistribution::point_mass((1, 1));
        let mut same = JointHistogram::default();
        for _ in 0..100 {
            same.record((1, 1));
        }
        assert_eq!(distribution_distance(&same, &exact), 0.0);
        let mut disjoint = JointHistogram::default();
        for _ in 0..100 {
            disjoint.record((2, 2));
        }
        assert!((distribution_distance(&disjoint, &exact) - 1.0).abs() < 1e-12);
    }
}
