use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::families::{local_insoluble_density, sigma_empirical, FamilyDescriptor};

/// ϑ_p(insoluble) per prime with a standard error (0 for exact values).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DensitySource {
    pub densities: BTreeMap<u64, (f64, f64)>,
}

impl DensitySource {
    /// Exact densities at every prime ≤ cutoff.
    pub fn exact(family: &FamilyDescriptor, cutoff: u64) -> Result<Self> {
        let mut m = BTreeMap::new();
        for p in arith::primes_up_to(cutoff) {
            let d = local_insoluble_density(family, p)?;
            if d.unknown != num_rational::Ratio::from_integer(0) {
                return Err(Error::Undecided {
                    p,
                    point: "part of the local density".into(),
                });
            }
            m.insert(p, (d.value(), 0.0));
        }
        Ok(DensitySource { densities: m })
    }

    /// Monte Carlo densities from [`sigma_empirical`]; prime p uses the
    /// ChaCha8 stream p of `seed`.
    pub fn empirical(
        family: &FamilyDescriptor,
        cutoff: u64,
        samples: u64,
        depth: u32,
        seed: u64,
    ) -> Result<Self> {
        let mut m = BTreeMap::new();
        for p in arith::primes_up_to(cutoff) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p);
            let e = sigma_empirical(family, p, samples, depth, &mut rng)?;
            m.insert(p, (e.estimate, e.std_error));
        }
        Ok(DensitySource { densities: m })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauPrediction {
    pub j: usize,
    pub prime_cutoff: u64,
    pub value: f64,
    /// Delta-method standard error from the per-prime standard errors.
    pub std_error: f64,
    /// Bound on the change from primes above the cutoff, using the envelope
    /// ϑ_p ≤ (d/p)².
    pub tail_bound: f64,
}

/// Distribution of the number of successes among independent events with
/// probabilities `q`, up to `max` successes.
fn poisson_binomial(q: &[f64], max: usize) -> Vec<f64> {
    let mut dist = vec![0.0; max + 1];
    dist[0] = 1.0;
    for &x in q {
        for k in (0..=max).rev() {
            let stay = dist[k] * (1.0 - x);
            let step = if k > 0 { dist[k - 1] * x } else { 0.0 };
            dist[k] = stay + step;
        }
    }
    dist
}

/// τ_π(j) = Σ_{p1<…<pj} Π_{p | p1…pj} ϑ_p(insoluble) Π_{p ∤ p1…pj} ϑ_p(soluble),
/// truncated to primes ≤ `prime_cutoff`.
pub fn tau_limit_prediction(
    family: &FamilyDescriptor,
    j: usize,
    prime_cutoff: u64,
    source: &DensitySource,
) -> Result<TauPrediction> {
    if *family.delta().numer() != 0 {
        return invalid("the τ limit law needs Δ = 0");
    }
    let primes = arith::primes_up_to(prime_cutoff);
    let mut q = Vec::with_capacity(primes.len());
    let mut se = Vec::with_capacity(primes.len());
    for &p in &primes {
        let &(v, s) = source.densities.get(&p).ok_or(Error::MissingSigma(p))?;
        if !(0.0..=1.0).contains(&v) {
            return invalid(format!("density {v} at p = {p} is not a probability"));
        }
        q.push(v);
        se.push(s);
    }
    let value = poisson_binomial(&q, j)[j];
    // ∂τ_j/∂q_p = P_{−p}(j−1) − P_{−p}(j)
    let mut var = 0.0;
    for i in 0..q.len() {
        if se[i] == 0.0 {
            continue;
        }
        let mut rest = q.clone();
        rest.remove(i);
        let d = poisson_binomial(&rest, j);
        let grad = if j > 0 { d[j - 1] } else { 0.0 } - d[j];
        var += grad * grad * se[i] * se[i];
    }
    let d = family.degree_f() as f64;
    Ok(TauPrediction {
        j,
        prime_cutoff,
        value,
        std_error: var.sqrt(),
        tail_bound: d * d / prime_cutoff.max(1) as f64,
    })
}
