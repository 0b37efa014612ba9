use std::fmt;

use statrs::function::erf::erf;

use super::{OmegaTally, SigmaTable};
use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::families::ObstructionRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Centering {
    /// Δ log log B (or Δ log log H(x) per point).
    LogLog,
    /// Σ_{p ≤ B} σ_p (or Σ_{p ≤ H(x)} σ_p per point).
    Empirical,
    /// The centred truncated count ω♭.
    Truncated,
}

impl fmt::Display for Centering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Centering::LogLog => "loglog",
            Centering::Empirical => "empirical",
            Centering::Truncated => "truncated",
        })
    }
}

impl std::str::FromStr for Centering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "loglog" => Ok(Centering::LogLog),
            "empirical" => Ok(Centering::Empirical),
            "truncated" => Ok(Centering::Truncated),
            _ => invalid(format!("unknown centering {s:?}")),
        }
    }
}

/// r-th moment of the standard normal.
pub fn normal_moment(r: u32) -> f64 {
    if r % 2 == 1 {
        return 0.0;
    }
    // (r−1)!! = r!/(2^{r/2}(r/2)!)
    (1..r).step_by(2).map(|k| k as f64).product()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub bound: u64,
    pub r: u32,
    pub value: f64,
    pub centering: Centering,
    pub mu_r_reference: f64,
    /// Records that entered the moment.
    pub count: u64,
}

/// Smallest height entering standardized statistics.
pub const MIN_HEIGHT: u64 = 3;

fn loglog(x: f64) -> f64 {
    x.ln().ln()
}

fn centre(bound: u64, delta: f64, centering: Centering, sigma: Option<&SigmaTable>) -> Result<f64> {
    match centering {
        Centering::LogLog => Ok(delta * loglog(bound as f64)),
        Centering::Empirical => {
            let t = sigma.ok_or_else(|| Error::InvalidArgument("empirical centering needs σ_p".into()))?;
            let last = arith::primes_up_to(bound).last().copied().unwrap_or(0);
            if t.max_prime() < last {
                return Err(Error::MissingSigma(last));
            }
            Ok(t.partial_sum(bound as f64))
        }
        Centering::Truncated => invalid("use truncated_moments for the truncated centring"),
    }
}

/// Untainted records with H ≥ 3 as (height, ω) pairs.
pub fn height_omega(records: &[ObstructionRecord]) -> Vec<(u64, u32)> {
    records
        .iter()
        .filter(|r| !r.tainted && r.point.height() >= MIN_HEIGHT)
        .map(|r| (r.point.height(), r.omega as u32))
        .collect()
}

/// Tally of ω over untainted records with H ≥ 3.
pub fn moment_tally(pairs: &[(u64, u32)]) -> OmegaTally {
    let mut t = OmegaTally::new();
    for &(h, w) in pairs {
        if h >= MIN_HEIGHT {
            t.add_omega(w as usize);
        }
    }
    t
}

fn standardized_moment(tally: &OmegaTally, c: f64, scale: f64, r: u32) -> f64 {
    let n = tally.total();
    if r == 0 {
        return 1.0;
    }
    if n == 0 {
        return f64::NAN;
    }
    tally
        .counts()
        .iter()
        .enumerate()
        .map(|(j, &k)| k as f64 * ((j as f64 - c) / scale).powi(r as i32))
        .sum::<f64>()
        / n as f64
}

/// M_r(π, B) / #records: the r-th moment of (ω − c)/√(Δ log log B).
pub fn moments(
    records: &[ObstructionRecord],
    bound: u64,
    delta: f64,
    r: u32,
    centering: Centering,
    sigma: Option<&SigmaTable>,
) -> Result<MomentReport> {
    moments_from_tally(&moment_tally(&height_omega(records)), bound, delta, r, centering, sigma)
}

pub fn moments_from_tally(
    tally: &OmegaTally,
    bound: u64,
    delta: f64,
    r: u32,
    centering: Centering,
    sigma: Option<&SigmaTable>,
) -> Result<MomentReport> {
    if delta <= 0.0 {
        return invalid("moments need Δ > 0 (use tau_histogram for Δ = 0)");
    }
    if bound < MIN_HEIGHT {
        return invalid("moments need B ≥ 3");
    }
    let c = centre(bound, delta, centering, sigma)?;
    let scale = (delta * loglog(bound as f64)).sqrt();
    Ok(MomentReport {
        bound,
        r,
        value: standardized_moment(tally, c, scale, r),
        centering,
        mu_r_reference: normal_moment(r),
        count: tally.total(),
    })
}

/// Cutoffs t0 < p ≤ t1 of the truncated count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWindow {
    pub r: u32,
    pub t0: f64,
    pub t1: f64,
}

impl TruncationWindow {
    /// t0 = (log log B)^{2r}, t1 = B^{1/(5r(n+1))}.
    pub fn standard(bound: u64, r: u32, n: usize) -> Result<Self> {
        if r == 0 {
            return invalid("window needs r ≥ 1");
        }
        let b = bound as f64;
        let t0 = loglog(b).powi(2 * r as i32);
        let t1 = b.powf(1.0 / (5.0 * r as f64 * (n as f64 + 1.0)));
        Self::custom(bound, r, t0, t1)
    }

    pub fn custom(bound: u64, r: u32, t0: f64, t1: f64) -> Result<Self> {
        if !(t0 > 1.0 && t0 < t1 && t1 < bound as f64) {
            return invalid(format!(
                "truncation window needs 1 < t0 < t1 < B, got t0 = {t0:.4}, t1 = {t1:.4}, B = {bound}"
            ));
        }
        Ok(TruncationWindow { r, t0, t1 })
    }

    pub fn contains(&self, p: u64) -> bool {
        let x = p as f64;
        self.t0 < x && x <= self.t1
    }
}

/// Number of insoluble primes of a record inside the window.
pub fn window_count(record: &ObstructionRecord, window: &TruncationWindow) -> u32 {
    record.insoluble_primes().filter(|&p| window.contains(p)).count() as u32
}

/// ω♭(x, B) = Σ_{t0 < p ≤ t1} (θ_p(x) − σ_p).
pub fn truncated_omega(
    record: &ObstructionRecord,
    window: &TruncationWindow,
    sigma: &SigmaTable,
) -> Result<f64> {
    let s = sigma.window_sum(window.t0, window.t1)?;
    Ok(window_count(record, window) as f64 - s)
}

/// M♭_r normalised by (Δ log log B)^{r/2}.
pub fn truncated_moments(
    records: &[ObstructionRecord],
    bound: u64,
    delta: f64,
    window: &TruncationWindow,
    sigma: &SigmaTable,
    r: u32,
) -> Result<MomentReport> {
    let mut t = OmegaTally::new();
    for rec in records {
        if !rec.tainted && rec.point.height() >= MIN_HEIGHT {
            t.add_omega(window_count(rec, window) as usize);
        }
    }
    truncated_moments_from_tally(&t, bound, delta, window, sigma, r)
}

/// As [`truncated_moments`] from a tally of per-record window counts.
pub fn truncated_moments_from_tally(
    window_counts: &OmegaTally,
    bound: u64,
    delta: f64,
    window: &TruncationWindow,
    sigma: &SigmaTable,
    r: u32,
) -> Result<MomentReport> {
    if delta <= 0.0 {
        return invalid("moments need Δ > 0");
    }
    let c = sigma.window_sum(window.t0, window.t1)?;
    let scale = (delta * loglog(bound as f64)).sqrt();
    Ok(MomentReport {
        bound,
        r,
        value: standardized_moment(window_counts, c, scale, r),
        centering: Centering::Truncated,
        mu_r_reference: normal_moment(r),
        count: window_counts.total(),
    })
}

/// Standard normal CDF.
pub fn phi(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// sup |F_N − Φ| for the empirical distribution of `values`.
pub fn ks_statistic(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &z) in values.iter().enumerate() {
        let f = phi(z);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Per-point standardized values (ω − c(H))/√(Δ log log H) with c(H) the
/// chosen centring at the point's own height.
pub fn standardized_values(
    pairs: &[(u64, u32)],
    delta: f64,
    centering: Centering,
    sigma: Option<&SigmaTable>,
) -> Result<Vec<f64>> {
    if delta <= 0.0 {
        return invalid("standardization needs Δ > 0");
    }
    let max_h = pairs.iter().map(|p| p.0).max().unwrap_or(0);
    if centering == Centering::Empirical {
        centre(max_h.max(MIN_HEIGHT), delta, centering, sigma)?;
    }
    let mut out = Vec::with_capacity(pairs.len());
    for &(h, w) in pairs {
        if h < MIN_HEIGHT {
            continue;
        }
        let ll = loglog(h as f64);
        let c = match centering {
            Centering::LogLog => delta * ll,
            Centering::Empirical => sigma.map(|s| s.partial_sum(h as f64)).unwrap_or(0.0),
            Centering::Truncated => return invalid("KS uses loglog or empirical centring"),
        };
        out.push((w as f64 - c) / (delta * ll).sqrt());
    }
    Ok(out)
}

/// Kolmogorov–Smirnov distance of the standardized ω to Φ.
pub fn gaussian_distance(
    records: &[ObstructionRecord],
    bound: u64,
    delta: f64,
    centering: Centering,
    sigma: Option<&SigmaTable>,
) -> Result<f64> {
    let pairs = height_omega(records);
    if pairs.iter().any(|p| p.0 > bound) {
        return invalid("record above the height bound");
    }
    gaussian_distance_pairs(&pairs, delta, centering, sigma)
}

pub fn gaussian_distance_pairs(
    pairs: &[(u64, u32)],
    delta: f64,
    centering: Centering,
    sigma: Option<&SigmaTable>,
) -> Result<f64> {
    let mut z = standardized_values(pairs, delta, centering, sigma)?;
    if z.len() < 100 {
        return invalid(format!("KS needs at least 100 records, have {}", z.len()));
    }
    Ok(ks_statistic(&mut z))
}

/// Equal-width histogram of standardized values on [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize, lo: f64, hi: f64) -> Self {
        let mut counts = vec![0u64; bins];
        let (mut under, mut over) = (0, 0);
        let w = (hi - lo) / bins as f64;
        for &v in values {
            if v < lo {
                under += 1;
            } else if v > hi {
                over += 1;
            } else {
                let i = (((v - lo) / w) as usize).min(bins - 1);
                counts[i] += 1;
            }
        }
        Histogram {
            lo,
            hi,
            counts,
            underflow: under,
            overflow: over,
        }
    }

    pub fn bin_edges(&self, i: usize) -> (f64, f64) {
        let w = (self.hi - self.lo) / self.counts.len() as f64;
        (self.lo + w * i as f64, self.lo + w * (i + 1) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::diagonal_conics;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Box–Muller.
    fn normal_sample<R: rand::Rng>(rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }

    #[test]
    fn normal_moments() {
        assert_eq!(normal_moment(0), 1.0);
        assert_eq!(normal_moment(2), 1.0);
        assert_eq!(normal_moment(3), 0.0);
        assert_eq!(normal_moment(4), 3.0);
        assert_eq!(normal_moment(6), 15.0);
    }

    #[test]
    fn ks_self_tests() {
        let mut zeros = vec![0.0; 1000];
        assert!((ks_statistic(&mut zeros) - 0.5).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| normal_sample(&mut rng)).collect();
        assert!(ks_statistic(&mut xs) < 2.0 / (n as f64).sqrt());
    }

    #[test]
    fn centering_identity() {
        let pairs: Vec<(u64, u32)> = (0..500).map(|i| (1000, (i % 5) as u32)).collect();
        let t = moment_tally(&pairs);
        let sigma = SigmaTable::exact(&diagonal_conics(), 1000).unwrap();
        let m = moments_from_tally(&t, 1000, 1.5, 1, Centering::Empirical, Some(&sigma)).unwrap();
        let sum: f64 = pairs.iter().map(|p| p.1 as f64).sum();
        let expect = (sum - 500.0 * sigma.partial_sum(1000.0))
            / (500.0 * (1.5 * (1000f64).ln().ln()).sqrt());
        assert!((m.value - expect).abs() < 1e-12);
        let m0 = moments_from_tally(&t, 1000, 1.5, 0, Centering::LogLog, None).unwrap();
        assert_eq!(m0.value, 1.0);
        assert!(moments_from_tally(&t, 1000, 0.0, 2, Centering::LogLog, None).is_err());
    }

    #[test]
    fn windows() {
        assert!(TruncationWindow::custom(100, 2, 2.0, 2.0).is_err());
        let w = TruncationWindow::custom(100, 2, 2.0, 10.0).unwrap();
        assert!(w.contains(3) && w.contains(7) && !w.contains(2) && !w.contains(11));
        // the standard window is empty at desk scale
        assert!(TruncationWindow::standard(100_000, 2, 2).is_err());
    }

    #[test]
    fn truncated_example() {
        let f = diagonal_conics();
        let x = crate::projective::ProjPoint::new(&[1, 1, 21]).unwrap();
        let rec = crate::families::omega_pi(&f, &x, &[crate::localsolve::Place::Infinity]).unwrap();
        let sigma = SigmaTable::exact(&f, 100).unwrap();
        let w = TruncationWindow::custom(1000, 2, 2.0, 10.0).unwrap();
        let s = sigma.get(3).unwrap().value() + sigma.get(5).unwrap().value() + sigma.get(7).unwrap().value();
        assert!((truncated_omega(&rec, &w, &sigma).unwrap() - (2.0 - s)).abs() < 1e-12);
        let none = crate::families::omega_pi(&f, &crate::projective::ProjPoint::new(&[1, 1, 1]).unwrap(), &[]).unwrap();
        assert!((truncated_omega(&none, &w, &sigma).unwrap() + s).abs() < 1e-12);
    }

    #[test]
    fn histogram_bins() {
        let h = Histogram::new(&[-6.0, -5.0, 0.0, 4.99, 5.0, 7.0], 41, -5.0, 5.0);
        assert_eq!(h.counts.iter().sum::<u64>(), 4);
        assert_eq!(h.underflow, 1);
        assert_eq!(h.overflow, 1);
        assert_eq!(h.counts[20], 1);
    }
}
