//! Prey competition (carrying-capacity) thinning probabilities.

use super::ModelError;

/// Parametric family of the competition function.
#[derive(Debug, Clone, PartialEq)]
pub enum CompetitionFamily {
    /// `K / (K + z)`
    BevertonHolt,
    /// `K^v / (K + z)^v` with `v >= 1`
    Hassel { v: f64 },
    /// `v^(-z/K)` with `v > 1`
    Ricker { v: f64 },
}

/// Probability that one prey survives the competition stage when `z` preys
/// share an environment with carrying capacity `K`. Strictly decreasing in
/// `z`, tending to 0 as `z` grows and to 1 as `K` grows.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitionFunction {
    family: CompetitionFamily,
    capacity: f64,
}

impl CompetitionFunction {
    pub fn beverton_holt(capacity: f64) -> Result<Self, ModelError> {
        Self::with_family(CompetitionFamily::BevertonHolt, capacity)
    }

    pub fn hassel(capacity: f64, v: f64) -> Result<Self, ModelError> {
        if !(v >= 1.0) || !v.is_finite() {
            return Err(ModelError::HasselExponentInvalid { v });
        }
        Self::with_family(CompetitionFamily::Hassel { v }, capacity)
    }

    pub fn ricker(capacity: f64, v: f64) -> Result<Self, ModelError> {
        if !(v > 1.0) || !v.is_finite() {
            return Err(ModelError::RickerBaseInvalid { v });
        }
        Self::with_family(CompetitionFamily::Ricker { v }, capacity)
    }

    fn with_family(family: CompetitionFamily, capacity: f64) -> Result<Self, ModelError> {
        if !(capacity > 0.0) || !capacity.is_finite() {
            return Err(ModelError::CapacityInvalid { capacity });
        }
        Ok(CompetitionFunction { family, capacity })
    }

    pub fn family(&self) -> &CompetitionFamily {
        &self.family
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    /// Survival probability of one prey among `preys` competitors.
    pub fn eval(&self, preys: u64) -> f64 {
        let z = preys as f64;
        let k = self.capacity;
        match &self.family {
            CompetitionFamily::BevertonHolt => k / (k + z),
            CompetitionFamily::Hassel { v } => (k / (k + z)).powf(*v),
            CompetitionFamily::Ricker { v } => v.powf(-z / k),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beverton_holt_closed_form() {
        let c = CompetitionFunction::beverton_holt(1000.0).unwrap();
        assert_eq!(c.eval(0), 1.0);
        assert!((c.eval(1000) - 0.5).abs() < 1e-15);
        assert!((c.eval(1_000_000) - 1000.0 / 1_001_000.0).abs() < 1e-15);
    }

    #[test]
    fn hassel_and_ricker_closed_forms() {
        let h = CompetitionFunction::hassel(1000.0, 2.0).unwrap();
        assert!((h.eval(1000) - 0.25).abs() < 1e-15);
        assert_eq!(h.eval(0), 1.0);
        let r = CompetitionFunction::ricker(1000.0, std::f64::consts::E).unwrap();
        // e^-1, frozen from the hand-check script
        assert!((r.eval(1000) - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(r.eval(0), 1.0);
    }

    #[test]
    fn eval_is_decreasing_and_vanishes() {
        for c in [
            CompetitionFunction::beverton_holt(50.0).unwrap(),
            CompetitionFunction::hassel(50.0, 3.0).unwrap(),
            CompetitionFunction::ricker(50.0, 2.0).unwrap(),
        ] {
            let mut prev = c.eval(0);
            assert_eq!(prev, 1.0);
            for z in [1u64, 5, 50, 500, 5_000, 50_000] {
                let cur = c.eval(z);
                assert!(cur < prev && cur >= 0.0);
                prev = cur;
            }
            assert!(c.eval(10_000_000) < 1e-3);
        }
    }

    #[test]
    fn large_capacity_removes_competition() {
        let c = CompetitionFunction::beverton_holt(1e12).unwrap();
        assert!(c.eval(100) > 1.0 - 1e-9);
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(CompetitionFunction::beverton_holt(0.0).is_err());
        assert!(CompetitionFunction::beverton_holt(-5.0).is_err());
        assert!(CompetitionFunction::hassel(10.0, 0.5).is_err());
        assert!(CompetitionFunction::ricker(10.0, 1.0).is_err());
    }
}
