use crate::arith::{self, pow_mod};

/// The sufficient insolubility criterion for Σ yᵢxᵢ³ at p ≡ 1 mod 3:
/// p ∤ y₀y₁, p ‖ y₂, p ‖ y₃, and neither −y₁/y₀ nor −y₃/y₂ is a cube mod p.
pub fn cubic_criterion(y: [i64; 4], p: u64) -> bool {
    if !arith::is_prime(p) || p % 3 != 1 {
        return false;
    }
    let v = |a: i64| arith::valuation(a as i128, p);
    if v(y[0]) != 0 || v(y[1]) != 0 || v(y[2]) != 1 || v(y[3]) != 1 {
        return false;
    }
    let ratio_is_cube = |num: i128, den: i128| {
        let n = arith::rem(-num, p);
        let d = arith::rem(den, p);
        let q = arith::mul_mod(n, pow_mod(d, p - 2, p), p);
        pow_mod(q, (p - 1) / 3, p) == 1
    };
    let pp = p as i128;
    !ratio_is_cube(y[1] as i128, y[0] as i128)
        && !ratio_is_cube(y[3] as i128 / pp, y[2] as i128 / pp)
}

/// Class of a p-adic unit u in Z_p^×/(Z_p^×)³, as a small integer tag.
///
/// For p ≢ 1 mod 3 (p ≠ 3) every unit is a cube and the tag is 1. For
/// p ≡ 1 mod 3 the tag is u^((p−1)/3) mod p. For p = 3 cubes of units are
/// ±1 mod 9, and the tag is min(u, 9 − u) for u mod 9.
pub fn cube_class(u: i128, p: u64) -> u64 {
    if p == 3 {
        let r = arith::rem(u, 9);
        return r.min(9 - r);
    }
    if p % 3 != 1 {
        return 1;
    }
    pow_mod(arith::rem(u, p), (p - 1) / 3, p)
}

fn class_mul(a: u64, b: u64, p: u64) -> u64 {
    if p == 3 {
        let r = a * b % 9;
        r.min(9 - r)
    } else if p % 3 != 1 {
        1
    } else {
        a * b % p
    }
}

/// The cube classes (tags) of units at p.
fn unit_classes(p: u64) -> Vec<u64> {
    if p == 3 {
        return vec![1, 2, 4];
    }
    if p % 3 != 1 {
        return vec![1];
    }
    let mut out: Vec<u64> = (1..p).map(|u| cube_class(u as i128, p)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Smallest positive integer in a cube class.
fn class_rep(class: u64, p: u64) -> i64 {
    (1..)
        .find(|&u: &i64| u as u64 % p != 0 && cube_class(u as i128, p) == class)
        .unwrap_or(1)
}

/// Normal form of Σ yᵢxᵢ³ over Q_p up to the moves that preserve local
/// solubility: permuting variables, replacing yᵢ by p³yᵢ or by a cube
/// multiple, and scaling the whole form by p or a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubicKey {
    pub p: u64,
    /// (valuation mod 3 after shifting, cube class of the unit part), sorted.
    pub entries: [(u32, u64); 4],
}

impl CubicKey {
    pub fn new(y: [i64; 4], p: u64) -> Self {
        let mut base = [(0u32, 0u64); 4];
        for (slot, &yi) in base.iter_mut().zip(&y) {
            let (v, u) = arith::split_valuation(yi as i128, p);
            *slot = (v % 3, cube_class(u, p));
        }
        let mut best: Option<(u32, [(u32, u64); 4])> = None;
        for shift in 0..3 {
            for &lam in &unit_classes(p) {
                let mut e = base;
                for s in e.iter_mut() {
                    *s = ((s.0 + shift) % 3, class_mul(s.1, lam, p));
                }
                e.sort_unstable();
                let weight: u32 = e.iter().map(|s| s.0).sum();
                let cand = (weight, e);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        CubicKey {
            p,
            entries: best.map(|b| b.1).unwrap_or(base),
        }
    }

    /// Integer coefficients realizing this normal form.
    pub fn representative(&self) -> [i64; 4] {
        let mut out = [0i64; 4];
        for (o, &(v, c)) in out.iter_mut().zip(&self.entries) {
            *o = class_rep(c, self.p) * (self.p as i64).pow(v);
        }
        out
    }
}
