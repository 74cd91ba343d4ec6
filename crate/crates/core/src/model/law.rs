//! Offspring (reproduction) laws for a single species.

use super::ModelError;

/// Largest support size accepted for explicit pmfs. Oracle enumeration
/// convolves these pmfs directly, so the support has to stay desk-sized.
pub const MAX_EXPLICIT_SUPPORT: usize = 10_001;

/// The shape of a reproduction law on the non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub enum LawKind {
    /// `P(X = k) = p (1-p)^k` for `k = 0, 1, 2, ...`
    Geometric { p: f64 },
    /// Finite pmf over `0..pmf.len()`.
    Explicit { pmf: Vec<f64> },
}

/// A reproduction law with its mean and variance.
///
/// Construction checks structural validity only (probabilities in range,
/// normalised pmf). Model-level constraints such as `mean > 1` are reported
/// by [`validate_config`](super::validate_config), because deliberately
/// degenerate laws (e.g. a point mass at zero) are useful in simulation
/// tests even though they violate the standing model assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    kind: LawKind,
    mean: f64,
    variance: f64,
}

impl OffspringLaw {
    /// Geometric law counting failures before the first success.
    pub fn geometric(p: f64) -> Result<Self, ModelError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(ModelError::GeometricProbOutOfRange { p });
        }
        let q = 1.0 - p;
        Ok(OffspringLaw {
            kind: LawKind::Geometric { p },
            mean: q / p,
            variance: q / (p * p),
        })
    }

    /// Law given by an explicit pmf over `0..pmf.len()`.
    pub fn explicit(pmf: Vec<f64>) -> Result<Self, ModelError> {
        if pmf.is_empty() || pmf.len() > MAX_EXPLICIT_SUPPORT {
            return Err(ModelError::ExplicitSupportInvalid);
        }
        for (index, &value) in pmf.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::PmfEntryInvalid { index, value });
            }
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > super::IDENTITY_TOL {
            return Err(ModelError::PmfNotNormalized { sum });
        }
        let mean: f64 = pmf.iter().enumerate().map(|(k, &q)| k as f64 * q).sum();
        let second: f64 = pmf
            .iter()
            .enumerate()
            .map(|(k, &q)| (k as f64) * (k as f64) * q)
            .sum();
        Ok(OffspringLaw {
            kind: LawKind::Explicit { pmf },
            mean,
            variance: (second - mean * mean).max(0.0),
        })
    }

    pub fn kind(&self) -> &LawKind {
        &self.kind
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// `P(X = k)`.
    pub fn pmf(&self, k: u64) -> f64 {
        match &self.kind {
            LawKind::Geometric { p } => p * (1.0 - p).powi(k.min(u32::MAX as u64) as i32),
            LawKind::Explicit { pmf } => {
                if (k as usize) < pmf.len() {
                    pmf[k as usize]
                } else {
                    0.0
                }
            }
        }
    }

    /// `P(X = 0) + P(X = 1)`, which the model requires to stay below 1.
    pub fn p0_plus_p1(&self) -> f64 {
        self.pmf(0) + self.pmf(1)
    }

    /// Finite pmf whose missing tail mass is at most `tail_bound`, together
    /// with the exact mass that was cut off. Explicit laws come back whole.
    pub fn truncated_pmf(&self, tail_bound: f64) -> (Vec<f64>, f64) {
        match &self.kind {
            LawKind::Explicit { pmf } => (pmf.clone(), 0.0),
            LawKind::Geometric { p } => {
                let q = 1.0 - p;
                // Tail mass after keeping 0..=kmax is q^(kmax+1).
                let kmax = (tail_bound.ln() / q.ln()).ceil().max(1.0) as usize;
                let mut pmf = Vec::with_capacity(kmax + 1);
                let mut term = *p;
                for _ in 0..=kmax {
                    pmf.push(term);
                    term *= q;
                }
                (pmf, q.powi(kmax as i32 + 1))
            }
        }
    }
}
