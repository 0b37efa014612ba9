use num_rational::Ratio;
use rand::Rng;

use super::{FamilyDescriptor, FamilyKind};
use crate::arith;
use crate::error::{invalid, Error, Result};
use crate::localsolve::{cube_class, Place, Status};
use crate::projective::{proj_size, residue_classes};

/// Unit classes that local solubility can see at p, as (representative,
/// valuation period): square classes for conics, cube classes for cubics.
fn unit_reps(family: &FamilyDescriptor, p: u64) -> (Vec<i64>, u32) {
    match family.kind() {
        FamilyKind::DiagonalConics => {
            if p == 2 {
                (vec![1, 3, 5, 7], 2)
            } else {
                let n = (2..p as i64)
                    .find(|&u| arith::pow_mod(u as u64, (p - 1) / 2, p) != 1)
                    .unwrap_or(2);
                (vec![1, n], 2)
            }
        }
        FamilyKind::DiagonalCubics => {
            let mut tags: Vec<u64> = Vec::new();
            let mut reps = Vec::new();
            let mut u = 1i64;
            let want = if p == 3 || p % 3 == 1 { 3 } else { 1 };
            while reps.len() < want {
                if u as u64 % p != 0 {
                    let t = cube_class(u as i128, p);
                    if !tags.contains(&t) {
                        tags.push(t);
                        reps.push(u);
                    }
                }
                u += 1;
            }
            (reps, 3)
        }
    }
}

/// Haar measures on P^n(Q_p) of the insoluble locus and of the locus the
/// search left undecided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDensity {
    pub p: u64,
    pub insoluble: Ratio<u128>,
    pub unknown: Ratio<u128>,
}

impl LocalDensity {
    pub fn value(&self) -> f64 {
        ratio_f64(&self.insoluble)
    }
}

pub(crate) fn ratio_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// ϑ_p(insoluble) exactly.
///
/// Solubility of a fibre over Q_p only depends on each coefficient's
/// valuation modulo e (2 for conics, 3 for cubics) and on its unit part up to
/// e-th powers, and these are independent under Haar measure on Z_p^{n+1}.
/// The cone of insoluble fibres is invariant under scaling, so its measure in
/// Z_p^{n+1} equals its density on P^n(Q_p). Summing over the finitely many
/// classes gives an exact rational.
pub fn local_insoluble_density(family: &FamilyDescriptor, p: u64) -> Result<LocalDensity> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let (reps, e) = unit_reps(family, p);
    let k = family.n() + 1;
    let g = reps.len() as u128;
    let pp = p as u128;
    let overflow = || Error::Overflow(format!("exact density at p = {p}"));
    // mass of valuation ≡ r mod e is (p−1)p^(e−1−r)/(p^e−1); every unit class
    // has mass 1/g.
    let pe = pp.checked_pow(e).ok_or_else(overflow)?;
    let mut weights = Vec::with_capacity(e as usize);
    for r in 0..e {
        weights.push((pp - 1) * pp.pow(e - 1 - r));
    }
    let denom = ((pe - 1) * g).checked_pow(k as u32).ok_or_else(overflow)?;
    let mut insoluble: u128 = 0;
    let mut unknown: u128 = 0;
    let cells = (e as usize) * reps.len();
    let mut idx = vec![0usize; k];
    let mut coeffs = vec![0i64; k];
    loop {
        let mut w: u128 = 1;
        for (i, &c) in idx.iter().enumerate() {
            let r = (c / reps.len()) as u32;
            let u = reps[c % reps.len()];
            coeffs[i] = u * (p as i64).pow(r);
            w = w.checked_mul(weights[r as usize]).ok_or_else(overflow)?;
        }
        match family.theta_coeffs(&coeffs, Place::Prime(p))? {
            Status::Insoluble => insoluble += w,
            Status::Unknown => unknown += w,
            Status::Soluble => {}
        }
        let mut s = 0;
        loop {
            if s == k {
                return Ok(LocalDensity {
                    p,
                    insoluble: Ratio::new(insoluble, denom),
                    unknown: Ratio::new(unknown, denom),
                });
            }
            idx[s] += 1;
            if idx[s] < cells {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
    }
}

/// Masses of residue disks mod p^k on which θ_p is constant and insoluble,
/// and of the disks it does not determine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiskDensity {
    pub p: u64,
    pub k: u32,
    pub classes: u64,
    pub insoluble: Ratio<u64>,
    pub undetermined: Ratio<u64>,
}

/// Classifies every point of P^n(Z/p^k). A disk is determined when every
/// coordinate's valuation and unit class can be read off mod p^k.
pub fn disk_density(family: &FamilyDescriptor, p: u64, k: u32) -> Result<DiskDensity> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if k == 0 {
        return invalid("depth must be positive");
    }
    // digits of the unit part needed to know its class
    let need = match (family.kind(), p) {
        (FamilyKind::DiagonalConics, 2) => 3,
        (FamilyKind::DiagonalCubics, 3) => 2,
        _ => 1,
    };
    let pk = p.checked_pow(k).ok_or_else(|| Error::Overflow("p^k".into()))?;
    let total = proj_size(family.n(), pk)?;
    let classes = residue_classes(family.n(), p, k)?;
    let mut insoluble = 0u64;
    let mut undetermined = 0u64;
    for x in &classes {
        let determined = x
            .iter()
            .all(|&c| c != 0 && arith::valuation(c as i128, p) + need <= k);
        if !determined {
            undetermined += 1;
            continue;
        }
        let coeffs: Vec<i64> = x.iter().map(|&c| c as i64).collect();
        match family.theta_coeffs(&coeffs, Place::Prime(p))? {
            Status::Insoluble => insoluble += 1,
            Status::Unknown => undetermined += 1,
            Status::Soluble => {}
        }
    }
    Ok(DiskDensity {
        p,
        k,
        classes: total,
        insoluble: Ratio::new(insoluble, total),
        undetermined: Ratio::new(undetermined, total),
    })
}

/// Monte Carlo estimate of ϑ_p(insoluble).
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaEstimate {
    pub p: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub insoluble: u64,
    pub unknown: u64,
}

/// Lifts tested per sampled disk.
const LIFTS: usize = 3;

/// Samples uniform residue disks mod p^depth and counts those on which every
/// tested lift is insoluble. Disks whose lifts are never decided soluble but
/// include an Unknown verdict are counted separately and left out of the
/// estimate.
pub fn sigma_empirical<R: Rng + ?Sized>(
    family: &FamilyDescriptor,
    p: u64,
    sample_size: u64,
    depth: u32,
    rng: &mut R,
) -> Result<SigmaEstimate> {
    if sample_size == 0 {
        return invalid("sample size must be at least 1");
    }
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if depth == 0 {
        return invalid("precision depth must be positive");
    }
    let pk = match p.checked_pow(depth) {
        Some(q) if q <= 1 << 40 => q as i64,
        _ => return invalid(format!("p^depth too large for p = {p}, depth = {depth}")),
    };
    let k = family.n() + 1;
    let mut insoluble = 0u64;
    let mut unknown = 0u64;
    let mut v = vec![0i64; k];
    let mut lift = vec![0i64; k];
    for _ in 0..sample_size {
        loop {
            for c in v.iter_mut() {
                *c = rng.random_range(0..pk);
            }
            if v.iter().any(|&c| c as u64 % p != 0) {
                break;
            }
        }
        let mut all_insoluble = true;
        let mut saw_unknown = false;
        for j in 0..LIFTS {
            for (l, &c) in lift.iter_mut().zip(&v) {
                let t = if j == 0 { 0 } else { rng.random_range(0..p as i64) };
                *l = c + pk * t;
                if *l == 0 {
                    *l = pk;
                }
            }
            match family.theta_coeffs(&lift, Place::Prime(p))? {
                Status::Insoluble => {}
                Status::Soluble => {
                    all_insoluble = false;
                    saw_unknown = false;
                    break;
                }
                Status::Unknown => {
                    all_insoluble = false;
                    saw_unknown = true;
                }
            }
        }
        if all_insoluble {
            insoluble += 1;
        } else if saw_unknown {
            unknown += 1;
        }
    }
    let decided = sample_size - unknown;
    let q = if decided == 0 {
        0.0
    } else {
        insoluble as f64 / decided as f64
    };
    Ok(SigmaEstimate {
        p,
        estimate: q,
        std_error: (q * (1.0 - q) / decided.max(1) as f64).sqrt(),
        samples: sample_size,
        insoluble,
        unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{diagonal_conics, diagonal_cubics};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conic_density_brackets() {
        let f = diagonal_conics();
        let exact = local_insoluble_density(&f, 5).unwrap();
        assert_eq!(exact.unknown, Ratio::from_integer(0));
        let disks = disk_density(&f, 5, 2).unwrap();
        let lo = *disks.insoluble.numer() as f64 / *disks.insoluble.denom() as f64;
        let und = *disks.undetermined.numer() as f64 / *disks.undetermined.denom() as f64;
        assert!(exact.value() >= lo && exact.value() <= lo + und);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let est = sigma_empirical(&f, 5, 10_000, 3, &mut rng).unwrap();
        assert!(est.estimate >= lo - 3.0 * est.std_error);
        assert!(est.estimate <= lo + und + 3.0 * est.std_error);
        assert!((est.estimate - exact.value()).abs() < 4.0 * est.std_error + 0.01);
    }

    #[test]
    fn cubic_density_positive() {
        let f = diagonal_cubics();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let est = sigma_empirical(&f, 7, 10_000, 4, &mut rng).unwrap();
        assert!(est.estimate > 0.0);
        let exact = local_insoluble_density(&f, 7).unwrap();
        assert!(exact.value() > 0.0);
        assert!((est.estimate - exact.value()).abs() < 4.0 * est.std_error + 0.005);
        // p ≡ 2 mod 3 never obstructs
        assert_eq!(local_insoluble_density(&f, 5).unwrap().insoluble, Ratio::from_integer(0));
    }

    #[test]
    fn rejects_zero_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sigma_empirical(&diagonal_conics(), 5, 0, 3, &mut rng).is_err());
    }
}
