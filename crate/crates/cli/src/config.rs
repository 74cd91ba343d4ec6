//! JSON model configuration files.
//!
//! Schema (all numbers are plain JSON numbers):
//!
//! ```json
//! {
//!   "predator_law": {"kind": "geometric", "p": 0.3333333333333333},
//!   "prey_law": {"kind": "explicit", "pmf": [0.2, 0.3, 0.5]},
//!   "predator_survival": {"family": "g1", "rho1": 0.1, "rho2": 0.6, "gamma": 0.5},
//!   "prey_survival": {"family": "table", "rho1": 0.15, "rho2": 0.9, "gamma": 0.5,
//!                      "points": [[0.0, 0.15], [1.0, 0.6]]},
//!   "carrying": {"family": "beverton_holt", "K": 1000.0},
//!   "initial": {"z0": 5, "zt0": 5}
//! }
//! ```
//!
//! `carrying` is nullable. The derived constants of the `g1`/`g2` survival
//! families are computed from `(rho1, rho2, gamma)` and the mean of the
//! species' own offspring law.

use ppbranch_core::model::{
    CompetitionFunction, ModelConfig, ModelError, OffspringLaw, SurvivalFunction,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LawSpec {
    Geometric { p: f64 },
    Explicit { pmf: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurvivalSpec {
    G1 {
        rho1: f64,
        rho2: f64,
        gamma: f64,
    },
    G2 {
        rho1: f64,
        rho2: f64,
        gamma: f64,
    },
    Table {
        rho1: f64,
        rho2: f64,
        gamma: f64,
        points: Vec<(f64, f64)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CarryingSpec {
    BevertonHolt {
        #[serde(rename = "K")]
        k: f64,
    },
    Hassel {
        #[serde(rename = "K")]
        k: f64,
        v: f64,
    },
    Ricker {
        #[serde(rename = "K")]
        k: f64,
        v: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub z0: u64,
    pub zt0: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub predator_law: LawSpec,
    pub prey_law: LawSpec,
    pub predator_survival: SurvivalSpec,
    pub prey_survival: SurvivalSpec,
    pub carrying: Option<CarryingSpec>,
    pub initial: InitialSpec,
}

impl LawSpec {
    fn build(&self) -> Result<OffspringLaw, ModelError> {
        match self {
            LawSpec::Geometric { p } => OffspringLaw::geometric(*p),
            LawSpec::Explicit { pmf } => OffspringLaw::explicit(pmf.clone()),
        }
    }
}

impl SurvivalSpec {
    fn build(&self, law_mean: f64) -> Result<SurvivalFunction, ModelError> {
        match self {
            SurvivalSpec::G1 { rho1, rho2, gamma } => {
                SurvivalFunction::build_g1(*rho1, *rho2, *gamma, law_mean)
            }
            SurvivalSpec::G2 { rho1, rho2, gamma } => {
                SurvivalFunction::build_g2(*rho1, *rho2, *gamma, law_mean)
            }
            SurvivalSpec::Table {
                rho1,
                rho2,
                gamma,
                points,
            } => SurvivalFunction::table(*rho1, *rho2, *gamma, points.clone()),
        }
    }
}

impl CarryingSpec {
    fn build(&self) -> Result<CompetitionFunction, ModelError> {
        match self {
            CarryingSpec::BevertonHolt { k } => CompetitionFunction::beverton_holt(*k),
            CarryingSpec::Hassel { k, v } => CompetitionFunction::hassel(*k, *v),
            CarryingSpec::Ricker { k, v } => CompetitionFunction::ricker(*k, *v),
        }
    }
}

impl ConfigFile {
    /// Builds the domain configuration, deriving each survival function
    /// from its own species' offspring mean.
    pub fn build(&self) -> Result<ModelConfig, ModelError> {
        let predator_law = self.predator_law.build()?;
        let prey_law = self.prey_law.build()?;
        let predator_survival = self.predator_survival.build(predator_law.mean())?;
        let prey_survival = self.prey_survival.build(prey_law.mean())?;
        let carrying = self
            .carrying
            .as_ref()
            .map(CarryingSpec::build)
            .transpose()?;
        Ok(ModelConfig {
            predator_law,
            prey_law,
            predator_survival,
            prey_survival,
            carrying,
            initial: (self.initial.z0, self.initial.zt0),
        })
    }
}
