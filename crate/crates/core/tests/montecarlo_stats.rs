//! Monte Carlo layer: coupling sanity, moment checks, growth statistics.

use ppbranch_core::model::{ModelConfig, OffspringLaw, SurvivalFunction};
use ppbranch_core::montecarlo::{growth_stats, moment_check, FateCondition};
use ppbranch_core::sampling::SeedStream;
use ppbranch_core::simulator::{simulate, RecordMode};

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
fn degenerate_survival_reduces_to_galton_watson() {
    // With both survival probabilities pinned at 1 the control phase is a
    // no-op and the two species are independent Galton-Watson processes:
    // per-generation mean sizes are z0 * mu^n and z0 * mu~^n.
    const REPLICATES: u64 = 10_000;
    const HORIZON: u32 = 5;
    let mut cfg = example1();
    cfg.predator_survival = SurvivalFunction::table(1.0, 1.0, 0.5, vec![(0.0, 1.0)]).unwrap();
    cfg.prey_survival = SurvivalFunction::table(1.0, 1.0, 0.5, vec![(0.0, 1.0)]).unwrap();
    let mut pred_sum = vec![0.0; HORIZON as usize + 1];
    let mut pred_sumsq = vec![0.0; HORIZON as usize + 1];
    let mut prey_sum = vec![0.0; HORIZON as usize + 1];
    let mut prey_sumsq = vec![0.0; HORIZON as usize + 1];
    for rep in 0..REPLICATES {
        let mut stream = SeedStream::derive(31337, rep);
        let t = simulate(&cfg, HORIZON, &mut stream, RecordMode::StatesOnly);
        for n in 0..=HORIZON as usize {
            // Absorbed trajectories stop early; their missing states are
            // (0,0) and must still enter the averages.
            let (p, q) = t
                .states
                .get(n)
                .map_or((0.0, 0.0), |s| (s.predators as f64, s.preys as f64));
            pred_sum[n] += p;
            pred_sumsq[n] += p * p;
            prey_sum[n] += q;
            prey_sumsq[n] += q * q;
        }
    }
    for n in 0..=HORIZON as usize {
        for (sum, sumsq, mu) in [
            (&pred_sum, &pred_sumsq, 2.0f64),
            (&prey_sum, &prey_sumsq, 1.5),
        ] {
            let mean = sum[n] / REPLICATES as f64;
            let var = sumsq[n] / REPLICATES as f64 - mean * mean;
            let expected = 5.0 * mu.powi(n as i32);
            let se = (var / REPLICATES as f64).sqrt();
            assert!(
                (mean - expected).abs() <= 4.0 * se + 1e-9,
                "generation {n}: mean {mean} vs {expected} (4se {:.3})",
                4.0 * se
            );
        }
    }
}

#[test]
fn moment_check_passes_on_reference_states() {
    let cfg = example1();
    let report = moment_check(
        &cfg,
        &[(5, 5), (2, 3), (10, 1), (0, 10), (7, 0)],
        100_000,
        5,
    )
    .unwrap();
    assert_eq!(report.explosions, 0);
    for entry in &report.entries {
        assert!(
            entry.mean_ok && entry.variance_ok,
            "failed at {:?} {:?}: analytic {:?} empirical {:?}",
            entry.state,
            entry.species,
            entry.analytic,
            entry.empirical
        );
    }
}

#[test]
fn moment_check_is_mean_stable_at_density_gamma() {
    // At density gamma (preys = z/2 here) the predator chain is
    // mean-stable: the empirical one-step mean stays at z.
    let cfg = example1();
    let report = moment_check(&cfg, &[(10, 5)], 100_000, 8).unwrap();
    let predator = report
        .entries
        .iter()
        .find(|e| e.species == ppbranch_core::model::Species::Predator)
        .unwrap();
    assert!((predator.analytic.mean - 10.0).abs() < 1e-9);
    assert!(predator.mean_ok);
}

#[test]
fn degenerate_survival_ratio_means_match_offspring_mean() {
    // Survival pinned at 1: E[Z_{n+1}/Z_n | Z_n > 0] = mu exactly, so the
    // cross-path mean ratio converges on mu.
    const REPLICATES: u64 = 4_000;
    let mut cfg = example1();
    cfg.predator_survival = SurvivalFunction::table(1.0, 1.0, 0.5, vec![(0.0, 1.0)]).unwrap();
    cfg.prey_survival = SurvivalFunction::table(1.0, 1.0, 0.5, vec![(0.0, 1.0)]).unwrap();
    cfg.initial = (50, 50);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut count = 0u64;
    for rep in 0..REPLICATES {
        let mut stream = SeedStream::derive(2718, rep);
        let t = simulate(&cfg, 1, &mut stream, RecordMode::StatesOnly);
        let ratio = t.states[1].predators as f64 / t.states[0].predators as f64;
        sum += ratio;
        sumsq += ratio * ratio;
        count += 1;
    }
    let mean = sum / count as f64;
    let var = sumsq / count as f64 - mean * mean;
    let se = (var / count as f64).sqrt();
    assert!(
        (mean - 2.0).abs() <= 4.0 * se,
        "ratio mean {mean} vs 2.0 (4se {:.4})",
        4.0 * se
    );
}

#[test]
fn coexisting_density_median_exceeds_gamma() {
    // On coexisting paths the preys-per-predator density diverges, so by
    // the horizon its cross-path median clears the equilibrium gamma.
    let cfg = example1();
    let stats = growth_stats(&cfg, 40, 2_000, 21, FateCondition::Coexisting).unwrap();
    assert!(stats.retained > 0);
    let final_density = stats.density[40].unwrap();
    assert!(
        final_density.median > 0.5,
        "median density {} at the horizon should exceed gamma = 0.5",
        final_density.median
    );
    // And it grows along the way: median at 40 well above median at 5.
    let early = stats.density[5].unwrap().median;
    assert!(final_density.median > 4.0 * early);
}

#[test]
fn growth_stats_distinguishes_conditions() {
    let cfg = example1();
    let coexisting = growth_stats(&cfg, 30, 2_000, 77, FateCondition::Coexisting).unwrap();
    let prey_only = growth_stats(&cfg, 30, 2_000, 77, FateCondition::PreyOnly).unwrap();
    assert!(coexisting.retained > 0);
    assert!(prey_only.retained > 0);
    assert!(coexisting.retained + prey_only.retained <= 2_000);
    // Coexisting paths keep predators alive, so the final-generation
    // predator ratio exists for every retained path.
    let last = coexisting.predator_ratio.last().unwrap().unwrap();
    assert_eq!(last.count, coexisting.retained);
    // Prey-only paths lose their predators, so the predator ratio sample
    // eventually thins out.
    let last_prey_only = prey_only.predator_ratio.last().unwrap();
    assert!(last_prey_only.is_none() || last_prey_only.unwrap().count < prey_only.retained);
}
