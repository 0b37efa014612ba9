use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::families::{sigma_conics_closed_form, FamilyDescriptor, FamilyKind, SigmaEstimate};

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaEntry {
    Exact(Ratio<u64>),
    Estimate { value: f64, std_error: f64, samples: u64 },
}

impl SigmaEntry {
    pub fn value(&self) -> f64 {
        match self {
            SigmaEntry::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            SigmaEntry::Estimate { value, .. } => *value,
        }
    }
}

/// σ_p per prime with prefix sums.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SigmaTable {
    entries: BTreeMap<u64, SigmaEntry>,
    primes: Vec<u64>,
    prefix: Vec<f64>,
}

impl SigmaTable {
    pub fn new(entries: BTreeMap<u64, SigmaEntry>) -> Self {
        let primes: Vec<u64> = entries.keys().copied().collect();
        let mut prefix = Vec::with_capacity(primes.len());
        let mut s = 0.0;
        for e in entries.values() {
            s += e.value();
            prefix.push(s);
        }
        SigmaTable {
            entries,
            primes,
            prefix,
        }
    }

    /// Exact σ_p for the family at the primes A < p ≤ limit.
    pub fn exact(family: &FamilyDescriptor, limit: u64) -> Result<Self> {
        if family.kind() != FamilyKind::DiagonalConics {
            return Err(Error::Unsupported {
                family: family.name().into(),
                what: "exact σ_p".into(),
            });
        }
        let mut m = BTreeMap::new();
        for p in arith::primes_up_to(limit) {
            if p > family.bad_bound() {
                m.insert(p, SigmaEntry::Exact(sigma_conics_closed_form(p)?));
            }
        }
        Ok(Self::new(m))
    }

    pub fn from_estimates(estimates: &[SigmaEstimate]) -> Self {
        Self::new(
            estimates
                .iter()
                .map(|e| {
                    (
                        e.p,
                        SigmaEntry::Estimate {
                            value: e.estimate,
                            std_error: e.std_error,
                            samples: e.samples,
                        },
                    )
                })
                .collect(),
        )
    }

    pub fn get(&self, p: u64) -> Result<&SigmaEntry> {
        self.entries.get(&p).ok_or(Error::MissingSigma(p))
    }

    pub fn entries(&self) -> &BTreeMap<u64, SigmaEntry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn max_prime(&self) -> u64 {
        self.primes.last().copied().unwrap_or(0)
    }

    /// Σ_{p ≤ x} σ_p over the tabulated primes.
    pub fn partial_sum(&self, x: f64) -> f64 {
        let idx = self.primes.partition_point(|&p| (p as f64) <= x);
        if idx == 0 {
            0.0
        } else {
            self.prefix[idx - 1]
        }
    }

    /// Σ_{t0 < p ≤ t1} σ_p, failing if some prime in the range is missing.
    pub fn window_sum(&self, t0: f64, t1: f64) -> Result<f64> {
        for p in arith::primes_up_to(t1.floor() as u64) {
            if (p as f64) > t0 && !self.entries.contains_key(&p) {
                return Err(Error::MissingSigma(p));
            }
        }
        Ok(self.partial_sum(t1) - self.partial_sum(t0))
    }
}

/// Fit of Σ_{p ≤ x} σ_p = Δ log log x + β over a grid of cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaFit {
    pub beta: f64,
    /// Free-slope regression of the partial sums on log log x.
    pub slope: f64,
    pub intercept: f64,
    /// (x, Σ_{p≤x} σ_p, residual of the fixed-slope fit, 1/log x)
    pub rows: Vec<(f64, f64, f64, f64)>,
    /// max − min of the pointwise β over the upper half of the grid.
    pub upper_half_spread: f64,
    /// Fixed-slope β refitted on the upper half of the grid.
    pub beta_upper: f64,
}

/// Cutoffs used by [`sigma_partial_sums`]: 64 points spaced evenly in
/// log x from 10 to the largest tabulated prime.
fn cutoff_grid(max: f64) -> Vec<f64> {
    let lo = 10f64.ln();
    let hi = max.ln();
    (0..64)
        .map(|i| (lo + (hi - lo) * i as f64 / 63.0).exp())
        .collect()
}

pub fn sigma_partial_sums(sigma: &SigmaTable, delta: f64) -> Result<BetaFit> {
    if delta <= 0.0 {
        return invalid("Δ must be positive for the β fit");
    }
    if sigma.len() < 25 {
        return invalid(format!("need at least 25 primes, have {}", sigma.len()));
    }
    let grid = cutoff_grid(sigma.max_prime() as f64);
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .map(|&x| (x, sigma.partial_sum(x)))
        .collect();
    let betas: Vec<f64> = pts.iter().map(|&(x, s)| s - delta * x.ln().ln()).collect();
    let beta = betas.iter().sum::<f64>() / betas.len() as f64;
    let upper = &betas[betas.len() / 2..];
    let beta_upper = upper.iter().sum::<f64>() / upper.len() as f64;
    let spread = upper.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - upper.iter().cloned().fold(f64::INFINITY, f64::min);
    let xs: Vec<f64> = pts.iter().map(|&(x, _)| x.ln().ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, s)| s).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let rows = pts
        .iter()
        .zip(&betas)
        .map(|(&(x, s), &b)| (x, s, b - beta, 1.0 / x.ln()))
        .collect();
    Ok(BetaFit {
        beta,
        slope,
        intercept: my - slope * mx,
        rows,
        upper_half_spread: spread,
        beta_upper,
    })
}
