use num_rational::Ratio;

use super::{FamilyDescriptor, FamilyKind};
use crate::arith::{self, gcd};
use crate::error::{invalid, Error, Result};
use crate::localsolve::legendre;
use crate::projective::{proj_size, residue_classes};

/// ω for a diagonal conic from the Legendre-symbol formula
/// ½Σ_{p|a}(1 − (bc/p)) + ½Σ_{p|b}(1 − (ac/p)) + ½Σ_{p|c}(1 − (−ab/p)),
/// valid for pairwise coprime squarefree a, b, c ≡ 1 mod 4.
pub fn omega_formula_conics(a: i64, b: i64, c: i64) -> Result<u32> {
    for (name, v) in [("a", a), ("b", b), ("c", c)] {
        if v.rem_euclid(4) != 1 {
            return invalid(format!("{name} = {v} is not 1 mod 4"));
        }
        if !arith::is_squarefree(v) {
            return invalid(format!("{name} = {v} is not squarefree"));
        }
    }
    if gcd(a, b) != 1 || gcd(a, c) != 1 || gcd(b, c) != 1 {
        return invalid(format!("({a}, {b}, {c}) are not pairwise coprime"));
    }
    let mut twice = 0i64;
    let terms = [
        (a, b as i128 * c as i128),
        (b, a as i128 * c as i128),
        (c, -(a as i128) * b as i128),
    ];
    for (m, other) in terms {
        for p in arith::prime_factors(m.unsigned_abs() as u128) {
            let r = arith::rem(other, p) as i64;
            twice += 1 - legendre(r, p)? as i64;
        }
    }
    Ok((twice / 2) as u32)
}

/// Whether the reduction ax² + by² + cz² mod an odd prime p has no
/// geometrically integral component defined over F_p: rank 3 is a smooth
/// conic (split), rank 2 splits iff −(product of the unit coefficients) is a
/// square, rank 1 is a double line.
pub fn conic_non_split(coeffs: &[u64], p: u64) -> Result<bool> {
    if p == 2 || !arith::is_prime(p) {
        return invalid(format!("non-split test needs an odd prime, got {p}"));
    }
    let units: Vec<u64> = coeffs.iter().map(|c| c % p).filter(|&c| c != 0).collect();
    Ok(match units.len() {
        3 => false,
        2 => {
            let prod = arith::mul_mod(units[0], units[1], p);
            legendre(-(prod as i64), p)? != 1
        }
        _ => true,
    })
}

/// σ_p: the proportion of non-split fibres over P^n(F_p), by classifying
/// every point.
pub fn sigma_exact(family: &FamilyDescriptor, p: u64) -> Result<Ratio<u64>> {
    if family.kind() != FamilyKind::DiagonalConics {
        return Err(Error::Unsupported {
            family: family.name().into(),
            what: "exact non-split test (use sigma_empirical)".into(),
        });
    }
    let classes = residue_classes(family.n(), p, 1)?;
    let mut non_split = 0u64;
    for x in &classes {
        if conic_non_split(x, p)? {
            non_split += 1;
        }
    }
    Ok(Ratio::new(non_split, proj_size(family.n(), p)?))
}

/// The same count in closed form: 3(p−1)/2 rank-2 fibres with non-square
/// discriminant plus 3 double lines, out of p² + p + 1.
pub fn sigma_conics_closed_form(p: u64) -> Result<Ratio<u64>> {
    if p == 2 || !arith::is_prime(p) {
        return invalid(format!("σ_p for conics needs an odd prime, got {p}"));
    }
    Ok(Ratio::new(3 * (p + 1), 2 * (p * p + p + 1)))
}
