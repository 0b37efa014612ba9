use std::collections::BTreeSet;

use super::{Place, SolubilityVerdict};
use crate::arith::{self, gcd, pow_mod, squarefree_part};
use crate::error::{invalid, Error, Result};

/// A nonzero rational number; only its square class matters to the symbols
/// computed here.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if num == 0 || den == 0 {
            return invalid("Hilbert symbols need nonzero rationals");
        }
        Ok(Rational { num, den })
    }

    /// Squarefree integer in the same square class.
    fn square_class(&self) -> i128 {
        let a = squarefree_part(self.num as i128);
        let b = squarefree_part(self.den as i128);
        let g = gcd(a as i64, b as i64) as i128;
        (a / g) * (b / g)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }
}

/// Legendre symbol (a/p) for an odd prime p, via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    if p == 2 || !arith::is_prime(p) {
        return invalid(format!("Legendre symbol needs an odd prime, got {p}"));
    }
    Ok(legendre_unchecked(a as i128, p))
}

pub(crate) fn legendre_unchecked(a: i128, p: u64) -> i8 {
    let r = arith::rem(a, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Hilbert symbol (a, b)_v.
pub fn hilbert(a: Rational, b: Rational, v: Place) -> Result<i8> {
    if a.num == 0 || a.den == 0 || b.num == 0 || b.den == 0 {
        return invalid("Hilbert symbols need nonzero rationals");
    }
    Ok(hilbert_int(a.square_class(), b.square_class(), v))
}

/// Hilbert symbol of two nonzero integers (any size up to i128).
pub(crate) fn hilbert_int(a: i128, b: i128, v: Place) -> i8 {
    debug_assert!(a != 0 && b != 0);
    match v {
        Place::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (alpha, u) = arith::split_valuation(a, 2);
            let (beta, w) = arith::split_valuation(b, 2);
            let eps = |x: i128| (x.rem_euclid(4) == 3) as u32;
            let omega = |x: i128| {
                let r = x.rem_euclid(8);
                (r == 3 || r == 5) as u32
            };
            let e = eps(u) * eps(w) + alpha * omega(w) + beta * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let (alpha, u) = arith::split_valuation(a, p);
            let (beta, w) = arith::split_valuation(b, p);
            let mut s: i8 = if (alpha * beta) % 2 == 1 && p % 4 == 3 {
                -1
            } else {
                1
            };
            if beta % 2 == 1 {
                s *= legendre_unchecked(u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre_unchecked(w, p);
            }
            s
        }
    }
}

/// ∞, 2 and every odd prime dividing a numerator or denominator.
pub fn relevant_places(a: Rational, b: Rational) -> Vec<Place> {
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    primes.insert(2);
    for n in [a.num, a.den, b.num, b.den] {
        primes.extend(arith::prime_factors(n.unsigned_abs() as u128));
    }
    let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
    out.push(Place::Infinity);
    out
}

/// Whether the product of (a, b)_v over the relevant places is +1.
pub fn hilbert_reciprocity_check(a: Rational, b: Rational) -> Result<bool> {
    let mut prod = 1i8;
    for v in relevant_places(a, b) {
        prod *= hilbert(a, b, v)?;
    }
    Ok(prod == 1)
}

/// Whether `a ≡ x^k (mod p)` for some x, with p ∤ a.
pub fn is_kth_power_residue(a: i64, p: u64, k: u64) -> Result<bool> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    if k == 0 {
        return invalid("k must be positive");
    }
    let r = arith::rem(a as i128, p);
    if r == 0 {
        return invalid(format!("{p} divides {a}"));
    }
    let g = arith::gcd_u64(k, p - 1);
    Ok(pow_mod(r, (p - 1) / g, p) == 1)
}

/// Whether ax² + by² = cz² has a nontrivial Q_v point: (a/c, b/c)_v = 1,
/// computed on the square classes of ac and bc.
pub fn conic_soluble(a: i64, b: i64, c: i64, v: Place) -> Result<bool> {
    if a == 0 || b == 0 || c == 0 {
        return invalid("conic coefficients must be nonzero");
    }
    Ok(conic_soluble_unchecked(a, b, c, v))
}

pub(crate) fn conic_soluble_unchecked(a: i64, b: i64, c: i64, v: Place) -> bool {
    let ac = a as i128 * c as i128;
    let bc = b as i128 * c as i128;
    hilbert_int(ac, bc, v) == 1
}

/// Fibre data for the implemented families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fibre {
    /// ax² + by² = cz²
    Conic { a: i64, b: i64, c: i64 },
    /// Σ yᵢxᵢ³ = 0
    DiagonalCubic([i64; 4]),
    /// Anything else: real solubility is not implemented.
    Other(String),
}

/// Real solubility of a fibre.
pub fn real_soluble(fibre: &Fibre) -> Result<bool> {
    match fibre {
        Fibre::Conic { a, b, c } => {
            let signs = [a.signum(), b.signum(), (-c).signum()];
            if signs.contains(&0) {
                return invalid("conic coefficients must be nonzero");
            }
            Ok(!(signs.iter().all(|&s| s > 0) || signs.iter().all(|&s| s < 0)))
        }
        Fibre::DiagonalCubic(_) => Ok(true),
        Fibre::Other(name) => Err(Error::Unsupported {
            family: name.clone(),
            what: "real solubility".into(),
        }),
    }
}

impl From<bool> for SolubilityVerdict {
    fn from(soluble: bool) -> Self {
        SolubilityVerdict::exact(soluble, "hilbert symbol")
    }
}
