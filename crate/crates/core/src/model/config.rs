//! Full model configuration and the standing-assumption validation report.

use super::{CompetitionFunction, Density, OffspringLaw, Species, SurvivalFunction, IDENTITY_TOL};

/// Complete parameterisation of one predator-prey process: both species'
/// offspring laws and survival functions, an optional prey carrying
/// capacity, and the initial population sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub predator_law: OffspringLaw,
    pub prey_law: OffspringLaw,
    pub predator_survival: SurvivalFunction,
    pub prey_survival: SurvivalFunction,
    pub carrying: Option<CompetitionFunction>,
    /// Initial (predators, preys).
    pub initial: (u64, u64),
}

impl ModelConfig {
    /// Maximum mean growth factor of each species, `rho2 * mean`.
    pub fn max_growth_rates(&self) -> (f64, f64) {
        (
            self.predator_survival.rho2() * self.predator_law.mean(),
            self.prey_survival.rho2() * self.prey_law.mean(),
        )
    }

    pub fn validate(&self) -> ValidationReport {
        validate_config(self)
    }
}

/// One violated standing assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Rho1MuNotBelowOne {
        species: Species,
        value: f64,
    },
    Rho2MuNotAboveOne {
        species: Species,
        value: f64,
    },
    MeanNotAboveOne {
        species: Species,
        mean: f64,
    },
    VarianceNotPositive {
        species: Species,
        variance: f64,
    },
    P0PlusP1NotBelowOne {
        species: Species,
        value: f64,
    },
    SurvivalBounds {
        species: Species,
        rho1: f64,
        rho2: f64,
    },
    EquilibriumIdentity {
        species: Species,
        at_gamma: f64,
        inverse_mean: f64,
    },
    NotIncreasing {
        species: Species,
        x_lo: f64,
        x_hi: f64,
    },
    OutOfBand {
        species: Species,
        x: f64,
        value: f64,
    },
    GammaMismatch {
        predator: f64,
        prey: f64,
    },
    InitialCountZero {
        species: Species,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::Rho1MuNotBelowOne { species, value } => {
                write!(f, "{species}: rho1*mu must be below 1, got {value}")
            }
            Violation::Rho2MuNotAboveOne { species, value } => {
                write!(f, "{species}: rho2*mu must exceed 1, got {value}")
            }
            Violation::MeanNotAboveOne { species, mean } => {
                write!(f, "{species}: offspring mean must exceed 1, got {mean}")
            }
            Violation::VarianceNotPositive { species, variance } => {
                write!(
                    f,
                    "{species}: offspring variance must be positive, got {variance}"
                )
            }
            Violation::P0PlusP1NotBelowOne { species, value } => {
                write!(f, "{species}: p0 + p1 must be below 1, got {value}")
            }
            Violation::SurvivalBounds {
                species,
                rho1,
                rho2,
            } => {
                write!(f, "{species}: survival bounds must satisfy 0 < rho1 < rho2 < 1, got rho1={rho1}, rho2={rho2}")
            }
            Violation::EquilibriumIdentity {
                species,
                at_gamma,
                inverse_mean,
            } => {
                write!(f, "{species}: survival at gamma must equal 1/mean, got {at_gamma} vs {inverse_mean}")
            }
            Violation::NotIncreasing {
                species,
                x_lo,
                x_hi,
            } => {
                write!(
                    f,
                    "{species}: survival function is not increasing between x={x_lo} and x={x_hi}"
                )
            }
            Violation::OutOfBand { species, x, value } => {
                write!(
                    f,
                    "{species}: survival value {value} at x={x} falls outside [rho1, rho2]"
                )
            }
            Violation::GammaMismatch { predator, prey } => {
                write!(
                    f,
                    "both species must share one gamma, got predator={predator}, prey={prey}"
                )
            }
            Violation::InitialCountZero { species } => {
                write!(f, "{species}: initial population must be at least 1")
            }
        }
    }
}

/// Result of checking a configuration against the standing assumptions.
/// Empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid: all standing assumptions hold");
        }
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

/// Checks every standing assumption of the model and lists all violations:
/// the growth-rate bracketing inequalities, offspring-law non-triviality,
/// the equilibrium identity `r(gamma) = 1/mean`, a monotonicity spot check
/// of both survival functions on a log-spaced grid, the shared-gamma
/// requirement, and positivity of the initial state.
pub fn validate_config(cfg: &ModelConfig) -> ValidationReport {
    let mut violations = Vec::new();
    for (species, law, survival) in [
        (Species::Predator, &cfg.predator_law, &cfg.predator_survival),
        (Species::Prey, &cfg.prey_law, &cfg.prey_survival),
    ] {
        let mu = law.mean();
        if !(mu > 1.0) {
            violations.push(Violation::MeanNotAboveOne { species, mean: mu });
        }
        if !(law.variance() > 0.0) {
            violations.push(Violation::VarianceNotPositive {
                species,
                variance: law.variance(),
            });
        }
        let p01 = law.p0_plus_p1();
        if !(p01 < 1.0) {
            violations.push(Violation::P0PlusP1NotBelowOne {
                species,
                value: p01,
            });
        }
        let (rho1, rho2) = (survival.rho1(), survival.rho2());
        let bounds_ok = rho1 > 0.0 && rho1 < rho2 && rho2 < 1.0;
        if !bounds_ok {
            violations.push(Violation::SurvivalBounds {
                species,
                rho1,
                rho2,
            });
        }
        if !(rho1 * mu < 1.0) {
            violations.push(Violation::Rho1MuNotBelowOne {
                species,
                value: rho1 * mu,
            });
        }
        if !(rho2 * mu > 1.0) {
            violations.push(Violation::Rho2MuNotAboveOne {
                species,
                value: rho2 * mu,
            });
        }
        let at_gamma = survival.eval(Density::new(survival.gamma()).expect("gamma"));
        if (at_gamma - 1.0 / mu).abs() > IDENTITY_TOL {
            violations.push(Violation::EquilibriumIdentity {
                species,
                at_gamma,
                inverse_mean: 1.0 / mu,
            });
        }
        if bounds_ok {
            spot_check_monotone(species, survival, &mut violations);
        }
    }
    let (gp, gq) = (cfg.predator_survival.gamma(), cfg.prey_survival.gamma());
    if gp != gq {
        violations.push(Violation::GammaMismatch {
            predator: gp,
            prey: gq,
        });
    }
    if cfg.initial.0 == 0 {
        violations.push(Violation::InitialCountZero {
            species: Species::Predator,
        });
    }
    if cfg.initial.1 == 0 {
        violations.push(Violation::InitialCountZero {
            species: Species::Prey,
        });
    }
    ValidationReport { violations }
}

/// Monotonicity and band spot check on a log-spaced grid around gamma.
/// Equality between consecutive values is tolerated only once both sit at
/// the rho2 saturation plateau of double precision.
fn spot_check_monotone(
    species: Species,
    survival: &SurvivalFunction,
    violations: &mut Vec<Violation>,
) {
    let mut grid: Vec<f64> = vec![1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 1e2, 1e3];
    grid.push(survival.gamma());
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let (rho1, rho2) = (survival.rho1(), survival.rho2());
    let saturated = |v: f64| rho2 - v < 1e-9 * (rho2 - rho1);
    let mut prev: Option<(f64, f64)> = None;
    for &x in &grid {
        let v = survival.eval(Density::new(x).expect("grid point"));
        if !(v >= rho1 && v <= rho2) {
            violations.push(Violation::OutOfBand {
                species,
                x,
                value: v,
            });
        }
        if let Some((px, pv)) = prev {
            let increased = v > pv || (saturated(pv) && saturated(v));
            if !increased {
                violations.push(Violation::NotIncreasing {
                    species,
                    x_lo: px,
                    x_hi: x,
                });
            }
        }
        prev = Some((x, v));
    }
}
