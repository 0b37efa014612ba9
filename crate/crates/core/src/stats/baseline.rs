//! The classic Erdős–Kac setting: ω(m), the number of distinct primes
//! dividing m, with σ_p = 1/p and Δ = 1.

use super::moments::{ks_statistic, normal_moment, phi};

/// ω(m) for 0 ≤ m ≤ limit (ω(0) = ω(1) = 0).
pub fn omega_table(limit: u64) -> Vec<u8> {
    let n = limit as usize;
    let mut w = vec![0u8; n + 1];
    for p in 2..=n {
        if w[p] == 0 {
            let mut m = p;
            while m <= n {
                w[m] += 1;
                m += p;
            }
        }
    }
    w
}

/// Moments and KS distance of ω(m) over 3 ≤ m ≤ N.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineReport {
    pub limit: u64,
    pub count: u64,
    /// Mean of ω − Σ_{p≤N} 1/p, divided by √(log log N).
    pub first_moment: f64,
    /// Second moment of (ω − Σ_{p≤N} 1/p)/√(log log N).
    pub second_moment: f64,
    pub mu2_reference: f64,
    /// KS distance of (ω(m) − Σ_{p≤m} 1/p)/√(log log m) to Φ.
    pub ks: f64,
}

pub fn baseline_report(omega: &[u8], limit: u64) -> BaselineReport {
    let n = (limit as usize).min(omega.len() - 1);
    // Σ_{p ≤ m} 1/p for every m
    let mut recip = vec![0.0f64; n + 1];
    let mut s = 0.0;
    let mut is_comp = vec![false; n + 1];
    for m in 2..=n {
        if !is_comp[m] {
            s += 1.0 / m as f64;
            let mut k = m * m;
            while k <= n {
                is_comp[k] = true;
                k += m;
            }
        }
        recip[m] = s;
    }
    let c = recip[n];
    let scale = (n as f64).ln().ln().sqrt();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut z = Vec::with_capacity(n);
    for m in 3..=n {
        let w = omega[m] as f64;
        let t = (w - c) / scale;
        m1 += t;
        m2 += t * t;
        z.push((w - recip[m]) / (m as f64).ln().ln().sqrt());
    }
    let count = z.len() as u64;
    BaselineReport {
        limit: n as u64,
        count,
        first_moment: m1 / count as f64,
        second_moment: m2 / count as f64,
        mu2_reference: normal_moment(2),
        ks: ks_statistic(&mut z),
    }
}

/// Φ itself, re-exported for callers standardizing by hand.
pub fn normal_cdf(z: f64) -> f64 {
    phi(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_small() {
        let w = omega_table(30);
        assert_eq!(&w[..13], &[0, 0, 1, 1, 1, 1, 2, 1, 1, 1, 2, 1, 2]);
        assert_eq!(w[30], 3);
    }

    #[test]
    fn baseline_shape() {
        let w = omega_table(100_000);
        let small = baseline_report(&w, 10_000);
        let r = baseline_report(&w, 100_000);
        assert!(r.first_moment.abs() < 0.1, "{r:?}");
        assert!(r.second_moment > 0.2 && r.second_moment < 1.1, "{r:?}");
        assert!(r.ks < small.ks);
    }
}
