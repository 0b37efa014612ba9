//! Rational points of projective space ordered by naive height, their
//! reductions modulo integers, and counts of points in residue classes.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::arith::{self, gcd, gcd_slice, mobius_table};
use crate::error::{invalid, Error, Result};
use crate::par;

/// A point of P^n(Q) stored as its canonical primitive integer vector: gcd 1,
/// first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<i64>,
    height: u64,
}

impl ProjPoint {
    /// Normalises any nonzero integer vector to its canonical representative.
    pub fn new(coords: &[i64]) -> Result<Self> {
        if coords.len() < 2 {
            return invalid("a projective point needs at least two coordinates");
        }
        let g = gcd_slice(coords);
        if g == 0 {
            return invalid("the zero vector is not a projective point");
        }
        let lead = coords.iter().find(|&&c| c != 0).copied().unwrap_or(1);
        let s = if lead < 0 { -g } else { g };
        let coords: Vec<i64> = coords.iter().map(|&c| c / s).collect();
        Ok(Self::from_canonical(coords))
    }

    /// Wraps a vector already known to be canonical.
    pub(crate) fn from_canonical(coords: Vec<i64>) -> Self {
        debug_assert!(is_canonical(&coords));
        let height = coords.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0);
        ProjPoint { coords, height }
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn height(&self) -> u64 {
        self.height
    }

    /// Dimension n of the ambient P^n.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn is_canonical(v: &[i64]) -> bool {
    gcd_slice(v) == 1 && v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

/// A point of P^n(Z/mZ): a coordinate vector primitive modulo every prime
/// dividing `m`. Equality and hashing are up to multiplication by units.
#[derive(Debug, Clone)]
pub struct ResidueClass {
    modulus: u64,
    coords: Vec<u64>,
    canonical: Vec<u64>,
}

impl ResidueClass {
    pub fn new(modulus: u64, coords: &[i64]) -> Result<Self> {
        if modulus == 0 {
            return invalid("modulus must be positive");
        }
        let coords: Vec<u64> = coords
            .iter()
            .map(|&c| arith::rem(c as i128, modulus))
            .collect();
        let primes = arith::prime_factors(modulus as u128);
        for &p in &primes {
            if coords.iter().all(|&c| c % p == 0) {
                return invalid(format!(
                    "coordinates {coords:?} are not primitive modulo {p}"
                ));
            }
        }
        let canonical = canonical_scaling(modulus, &primes, &coords);
        Ok(ResidueClass {
            modulus,
            coords,
            canonical,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Coordinates as reduced, before any unit rescaling.
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    /// The representative whose first unit coordinate (per prime-power
    /// component) equals 1.
    pub fn canonical(&self) -> &[u64] {
        &self.canonical
    }
}

impl PartialEq for ResidueClass {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.canonical == other.canonical
    }
}

impl Eq for ResidueClass {}

impl Hash for ResidueClass {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.canonical.hash(state);
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}", self.canonical, self.modulus)
    }
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(m as i128) as u64
}

/// Chooses a unit λ mod `modulus` so that, in each prime-power component, the
/// first coordinate that is a unit becomes 1; returns λ·coords.
fn canonical_scaling(modulus: u64, primes: &[u64], coords: &[u64]) -> Vec<u64> {
    if modulus == 1 {
        return vec![0; coords.len()];
    }
    // CRT assembly of λ from its prime-power components.
    let mut lambda: u64 = 0;
    let mut acc_mod: u64 = 1;
    for &p in primes {
        let mut q = 1u64;
        while modulus % (q * p) == 0 {
            q *= p;
        }
        let unit = coords
            .iter()
            .map(|&c| c % q)
            .find(|&c| c % p != 0)
            .expect("primitivity checked");
        let lam_q = mod_inverse(unit, q);
        // combine x ≡ lambda (acc_mod), x ≡ lam_q (q)
        let inv = mod_inverse(acc_mod % q, q);
        let diff = (lam_q + q - lambda % q) % q;
        let t = arith::mul_mod(diff, inv, q);
        lambda += acc_mod * t;
        acc_mod *= q;
    }
    coords
        .iter()
        .map(|&c| arith::mul_mod(c, lambda, modulus))
        .collect()
}

/// c_n = 2^n / ζ(n+1), the leading constant of #{x ∈ P^n(Q) : H(x) ≤ B} / B^{n+1}.
pub fn c_n(n: usize) -> f64 {
    2f64.powi(n as i32) / arith::zeta(n as f64 + 1.0)
}

fn check_dim_bound(n: usize, bound: u64) -> Result<()> {
    if n < 1 {
        return invalid("dimension must be at least 1");
    }
    if bound < 1 {
        return invalid("height bound must be at least 1");
    }
    if bound > (1u64 << 31) {
        return invalid("height bounds above 2^31 are not supported");
    }
    Ok(())
}

/// Lexicographic odometer over a box with cached prefix gcds.
struct Odometer {
    bound: i64,
    cur: Vec<i64>,
    prefix_gcd: Vec<i64>,
    done: bool,
}

impl Odometer {
    /// Coordinates `fixed` followed by `free` coordinates in [-B, B].
    fn new(fixed: &[i64], free: usize, bound: i64) -> Self {
        let mut cur = fixed.to_vec();
        cur.extend(std::iter::repeat_n(-bound, free));
        let mut prefix_gcd = Vec::with_capacity(cur.len());
        let mut g = 0;
        for &c in &cur {
            g = gcd(g, c);
            prefix_gcd.push(g);
        }
        Odometer {
            bound,
            cur,
            prefix_gcd,
            done: free == 0 && fixed.is_empty(),
        }
    }

    fn advance(&mut self, first_free: usize) -> bool {
        let len = self.cur.len();
        let mut i = len;
        loop {
            if i == first_free {
                self.done = true;
                return false;
            }
            i -= 1;
            if self.cur[i] < self.bound {
                self.cur[i] += 1;
                break;
            }
            self.cur[i] = -self.bound;
        }
        let mut g = if i == 0 { 0 } else { self.prefix_gcd[i - 1] };
        for j in i..len {
            g = gcd(g, self.cur[j]);
            self.prefix_gcd[j] = g;
        }
        true
    }
}

/// Streams the points of P^n(Q) of height ≤ B whose first coordinate is
/// `lead` (0 ≤ lead ≤ B). The slabs for lead = 0..=B partition the points.
pub struct SlabPoints {
    n: usize,
    bound: i64,
    odo: Odometer,
    // number of leading zero coordinates in the current sub-slab
    zeros: usize,
    fresh: bool,
}

impl SlabPoints {
    fn new(n: usize, bound: u64, lead: u64) -> Self {
        let bound = bound as i64;
        if lead == 0 {
            // Points (0 : x'), recursively: leading zeros then a positive coordinate.
            let odo = Odometer::new(&[0, 1], n - 1, bound);
            SlabPoints {
                n,
                bound,
                odo,
                zeros: 1,
                fresh: true,
            }
        } else {
            SlabPoints {
                n,
                bound,
                odo: Odometer::new(&[lead as i64], n, bound),
                zeros: 0,
                fresh: true,
            }
        }
    }

    /// Moves to the next lead value; returns false when the slab is exhausted.
    fn next_lead(&mut self) -> bool {
        if self.zeros == 0 {
            return false;
        }
        let lead_idx = self.zeros;
        let lead = self.odo.cur[lead_idx];
        if lead < self.bound {
            let mut fixed = vec![0; self.zeros];
            fixed.push(lead + 1);
            self.odo = Odometer::new(&fixed, self.n - self.zeros, self.bound);
            return true;
        }
        // lead exhausted: one more leading zero
        if self.zeros + 1 > self.n {
            return false;
        }
        self.zeros += 1;
        let mut fixed = vec![0; self.zeros];
        fixed.push(1);
        self.odo = Odometer::new(&fixed, self.n - self.zeros, self.bound);
        true
    }
}

impl Iterator for SlabPoints {
    type Item = ProjPoint;

    fn next(&mut self) -> Option<ProjPoint> {
        loop {
            if self.fresh {
                self.fresh = false;
            } else {
                let first_free = self.zeros + 1;
                if !self.odo.advance(first_free) && !(self.next_lead()) {
                    return None;
                }
            }
            if self.odo.done {
                return None;
            }
            if *self.odo.prefix_gcd.last().unwrap() == 1 {
                return Some(ProjPoint::from_canonical(self.odo.cur.clone()));
            }
        }
    }
}

/// Every point of P^n(Q) with H(x) ≤ B exactly once, in canonical form,
/// ordered lexicographically by canonical coordinates with the first
/// coordinate slab 0 first.
pub fn enumerate_points(n: usize, bound: u64) -> Result<impl Iterator<Item = ProjPoint>> {
    check_dim_bound(n, bound)?;
    Ok((0..=bound).flat_map(move |lead| SlabPoints::new(n, bound, lead)))
}

/// Points of one first-coordinate slab (`0 ≤ lead ≤ B`).
pub fn enumerate_slab(n: usize, bound: u64, lead: u64) -> Result<SlabPoints> {
    check_dim_bound(n, bound)?;
    if lead > bound {
        return invalid("slab lead exceeds height bound");
    }
    Ok(SlabPoints::new(n, bound, lead))
}

/// Folds every point of height ≤ B into per-slab accumulators in parallel and
/// merges them in slab order.
pub fn fold_points<A, I, F, M>(n: usize, bound: u64, init: I, fold: F, merge: M) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, ProjPoint) + Sync + Send,
    M: Fn(A, A) -> A,
{
    check_dim_bound(n, bound)?;
    Ok(par::fold_chunks(
        0..bound + 1,
        1,
        init,
        |acc, lead| {
            for x in SlabPoints::new(n, bound, lead) {
                fold(acc, x);
            }
        },
        merge,
    ))
}

/// #{x ∈ P^n(Q) : H(x) ≤ B}, by enumerating the first n coordinates and
/// counting the admissible last coordinates with inclusion-exclusion over the
/// prime divisors of the prefix gcd.
pub fn count_points(n: usize, bound: u64) -> Result<u64> {
    check_dim_bound(n, bound)?;
    let b = bound as i64;
    let mu = mobius_table(bound as usize);
    // coprime[g] = #{t ∈ [-B, B] : gcd(g, t) = 1} for 1 ≤ g ≤ B
    let mut coprime = vec![0u64; bound as usize + 1];
    for d in 1..=bound as usize {
        if mu[d] == 0 {
            continue;
        }
        let term = 2 * (bound / d as u64) as i64 + 1;
        let mut g = d;
        while g <= bound as usize {
            coprime[g] = (coprime[g] as i64 + mu[d] as i64 * term) as u64;
            g += d;
        }
    }
    let count_for = |free: usize, fixed: &[i64]| -> u64 {
        if free == 0 {
            let g = gcd_slice(fixed);
            return if g == 0 { 0 } else { coprime[g as usize] };
        }
        let mut odo = Odometer::new(fixed, free, b);
        let mut total = 0u64;
        loop {
            let g = *odo.prefix_gcd.last().unwrap();
            total += if g == 0 { 2 } else { coprime[g as usize] };
            if !odo.advance(fixed.len()) {
                break;
            }
        }
        total
    };
    // x0 ranges over 1..=B (each counts the x0 > 0 half), plus x0 = 0 which
    // reduces to P^{n-1}.
    let positive: u64 = par::fold_chunks(
        1..bound + 1,
        1,
        || 0u64,
        |acc, x0| *acc += count_for(n - 1, &[x0 as i64]),
        |a, c| a + c,
    );
    let zero_slab = if n == 1 { 1 } else { count_points(n - 1, bound)? };
    Ok(positive + zero_slab)
}

/// Closed-form Möbius count ½ Σ_d μ(d)((2⌊B/d⌋+1)^{n+1} − 1); an independent
/// route to `count_points`.
pub fn count_points_mobius(n: usize, bound: u64) -> Result<u128> {
    check_dim_bound(n, bound)?;
    let mu = mobius_table(bound as usize);
    let mut total: i128 = 0;
    for d in 1..=bound as usize {
        if mu[d] == 0 {
            continue;
        }
        let side = 2 * (bound / d as u64) as i128 + 1;
        let mut pow: i128 = 1;
        for _ in 0..=n {
            pow = pow
                .checked_mul(side)
                .ok_or_else(|| Error::Overflow("box size".into()))?;
        }
        total += mu[d] as i128 * (pow - 1);
    }
    Ok((total / 2) as u128)
}

/// #P^n(Z/QZ) = Π_{p^k ‖ Q} p^{n(k-1)} (p^{n+1} − 1)/(p − 1).
pub fn proj_size(n: usize, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return invalid("modulus must be positive");
    }
    let overflow = || Error::Overflow(format!("#P^{n}(Z/{modulus}Z) exceeds 64 bits"));
    let mut total: u64 = 1;
    for (p, k) in arith::factorize(modulus) {
        let geometric = (0..=n as u32).try_fold(0u64, |acc, i| {
            p.checked_pow(i).and_then(|t| acc.checked_add(t))
        });
        let lift = p.checked_pow(n as u32 * (k - 1));
        let local = geometric
            .zip(lift)
            .and_then(|(g, l)| g.checked_mul(l))
            .ok_or_else(overflow)?;
        total = total.checked_mul(local).ok_or_else(overflow)?;
    }
    Ok(total)
}

/// Reduction of a rational point modulo a prime power.
pub fn reduce_point(x: &ProjPoint, m: u64) -> Result<ResidueClass> {
    let f = arith::factorize(m);
    if f.len() != 1 {
        return invalid(format!("{m} is not a prime power"));
    }
    ResidueClass::new(m, x.coords())
}

/// Canonical representatives of P^n(Z/p^kZ): first unit coordinate equal to 1,
/// earlier coordinates divisible by p.
pub fn residue_classes(n: usize, p: u64, k: u32) -> Result<Vec<Vec<u64>>> {
    if !arith::is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    let q = p
        .checked_pow(k)
        .ok_or_else(|| Error::Overflow(format!("{p}^{k}")))?;
    let size = proj_size(n, q)?;
    if size > 50_000_000 {
        return invalid(format!("#P^{n}(Z/{q}) = {size} is too large to list"));
    }
    let mut out = Vec::with_capacity(size as usize);
    for lead in 0..=n {
        // coords before `lead` range over p·(Z/q), coordinate `lead` is 1,
        // coords after range over Z/q.
        let mut v = vec![0u64; n + 1];
        v[lead] = 1;
        loop {
            out.push(v.clone());
            // odometer over free positions
            let mut i = n + 1;
            let mut carried = true;
            while carried {
                if i == 0 {
                    break;
                }
                i -= 1;
                if i == lead {
                    continue;
                }
                let (inc, lim) = if i < lead { (p, q) } else { (1, q) };
                v[i] += inc;
                if v[i] >= lim {
                    v[i] = 0;
                } else {
                    carried = false;
                }
            }
            if carried {
                break;
            }
        }
    }
    debug_assert_eq!(out.len() as u64, size);
    Ok(out)
}

/// Outcome of a congruence count.
#[derive(Debug, Clone, PartialEq)]
pub struct CongruenceCount {
    pub count: u64,
    pub main_term: f64,
    pub relative_error: f64,
    /// #Υ, the number of classes of P^n(Z/Q) accepted by the predicate.
    pub classes: u64,
}

pub(crate) fn relative_error(count: f64, main: f64) -> f64 {
    if main == 0.0 {
        if count == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (count - main).abs() / main
    }
}

/// Counts x ∈ P^n(Q) with H(x) ≤ B whose reduction mod the squarefree
/// modulus Q satisfies `predicate`, together with the main term
/// c_n·(#Υ/#P^n(Z/Q))·B^{n+1}.
///
/// The count is exact: by Möbius inversion over the gcd of the coordinates it
/// equals ½ Σ_{(d,Q)=1} μ(d)·N(⌊B/d⌋), where N(b) counts integer vectors in
/// [-b, b]^{n+1} lying in the affine cone of the accepted classes.
pub fn count_congruence<P, E>(
    n: usize,
    bound: u64,
    modulus: u64,
    mut predicate: P,
) -> Result<CongruenceCount>
where
    P: FnMut(&ResidueClass) -> std::result::Result<bool, E>,
    E: fmt::Display,
{
    check_dim_bound(n, bound)?;
    if bound < 2 {
        return invalid("congruence counting needs B ≥ 2");
    }
    if modulus == 0 || !arith::is_squarefree(modulus as i64) {
        return invalid(format!("modulus {modulus} is not squarefree"));
    }
    let total_classes = proj_size(n, modulus)?;
    let q = modulus;
    let mu = mobius_table(bound as usize);

    if q == 1 {
        let class = ResidueClass::new(1, &vec![0; n + 1])?;
        let accepted = predicate(&class).map_err(|e| Error::Predicate {
            class: class.to_string(),
            reason: e.to_string(),
        })?;
        let count = if accepted {
            count_points_mobius(n, bound)? as u64
        } else {
            0
        };
        let classes = accepted as u64;
        let main = c_n(n) * classes as f64 * (bound as f64).powi(n as i32 + 1);
        return Ok(CongruenceCount {
            count,
            main_term: main,
            relative_error: relative_error(count as f64, main),
            classes,
        });
    }

    // Affine cone of the accepted classes, as residue vectors mod Q.
    let cone_size = (q as u128).pow(n as u32 + 1);
    if cone_size > 20_000_000 {
        return invalid(format!("(Z/{q})^{} is too large to scan", n + 1));
    }
    let primes = arith::prime_factors(q as u128);
    let mut verdicts: HashMap<ResidueClass, bool> = HashMap::new();
    let mut cone: Vec<Vec<u64>> = Vec::new();
    let mut v = vec![0u64; n + 1];
    loop {
        if primes.iter().all(|&p| v.iter().any(|&c| c % p != 0)) {
            let rc = ResidueClass {
                modulus: q,
                coords: v.clone(),
                canonical: canonical_scaling(q, &primes, &v),
            };
            let accepted = match verdicts.get(&rc) {
                Some(&b) => b,
                None => {
                    let b = predicate(&rc).map_err(|e| Error::Predicate {
                        class: rc.to_string(),
                        reason: e.to_string(),
                    })?;
                    verdicts.insert(rc, b);
                    b
                }
            };
            if accepted {
                cone.push(v.clone());
            }
        }
        let mut i = n + 1;
        let mut carried = true;
        while carried && i > 0 {
            i -= 1;
            v[i] += 1;
            if v[i] == q {
                v[i] = 0;
            } else {
                carried = false;
            }
        }
        if carried {
            break;
        }
    }
    let classes = verdicts.values().filter(|&&b| b).count() as u64;

    // residue_count(b, r) = #{t ∈ [-b, b] : t ≡ r mod q}
    let residue_count = |b: i64, r: u64| -> i64 {
        let qi = q as i64;
        let upto = |t: i64| (t - r as i64).div_euclid(qi);
        upto(b) - upto(-b - 1)
    };
    let mut by_b: HashMap<u64, i64> = HashMap::new();
    let mut total: i128 = 0;
    for d in 1..=bound {
        let m = mu[d as usize];
        if m == 0 || arith::gcd_u64(d, q) != 1 {
            continue;
        }
        let b = bound / d;
        let nb = *by_b.entry(b).or_insert_with(|| {
            let counts: Vec<i64> = (0..q).map(|r| residue_count(b as i64, r)).collect();
            cone.iter()
                .map(|rho| rho.iter().map(|&r| counts[r as usize]).product::<i64>())
                .sum()
        });
        total += m as i128 * nb as i128;
    }
    debug_assert!(total >= 0 && total % 2 == 0);
    let count = (total / 2) as u64;
    let main =
        c_n(n) * (classes as f64 / total_classes as f64) * (bound as f64).powi(n as i32 + 1);
    Ok(CongruenceCount {
        count,
        main_term: main,
        relative_error: relative_error(count as f64, main),
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn naive_points(n: usize, b: i64) -> HashSet<Vec<i64>> {
        let side = 2 * b + 1;
        let total = (side as u64).pow(n as u32 + 1);
        let mut out = HashSet::new();
        for idx in 0..total {
            let mut v = Vec::with_capacity(n + 1);
            let mut t = idx;
            for _ in 0..=n {
                v.push((t % side as u64) as i64 - b);
                t /= side as u64;
            }
            if gcd_slice(&v) == 1 && v.iter().find(|&&c| c != 0).unwrap() > &0 {
                out.insert(v);
            }
        }
        out
    }

    #[test]
    fn p1_height_one() {
        let pts: Vec<_> = enumerate_points(1, 1).unwrap().collect();
        let coords: Vec<_> = pts.iter().map(|p| p.coords().to_vec()).collect();
        assert_eq!(coords.len(), 4);
        let set: HashSet<_> = coords.into_iter().collect();
        let expect: HashSet<Vec<i64>> =
            [vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]].into_iter().collect();
        assert_eq!(set, expect);
    }

    #[test]
    fn p1_height_three_has_sixteen_points() {
        // oracle: naive box scan with gcd and sign filters
        assert_eq!(naive_points(1, 3).len(), 16);
        assert_eq!(enumerate_points(1, 3).unwrap().count(), 16);
    }

    #[test]
    fn enumeration_matches_naive_listing() {
        for (n, b) in [(1, 7), (2, 4), (3, 2), (4, 1)] {
            let got: Vec<Vec<i64>> = enumerate_points(n, b as u64)
                .unwrap()
                .map(|p| p.coords().to_vec())
                .collect();
            let set: HashSet<_> = got.iter().cloned().collect();
            assert_eq!(set.len(), got.len(), "duplicates for n={n} B={b}");
            assert_eq!(set, naive_points(n, b), "n={n} B={b}");
            let mut sorted = got.clone();
            sorted.sort();
            // within each slab the order is lexicographic
            for lead in 1..=b {
                let slab: Vec<_> = got.iter().filter(|v| v[0] == lead).cloned().collect();
                let mut s = slab.clone();
                s.sort();
                assert_eq!(slab, s);
            }
        }
    }

    #[test]
    fn counts_agree_three_ways() {
        for (n, b) in [(1, 20), (2, 15), (3, 6)] {
            let e = enumerate_points(n, b).unwrap().count() as u64;
            assert_eq!(count_points(n, b).unwrap(), e);
            assert_eq!(count_points_mobius(n, b).unwrap() as u64, e);
            let f = fold_points(n, b, || 0u64, |a, _| *a += 1, |a, c| a + c).unwrap();
            assert_eq!(f, e);
        }
    }

    #[test]
    fn plane_count_ratio_near_c2() {
        let b = 1000u64;
        let c = count_points(2, b).unwrap() as f64 / (b as f64).powi(3);
        assert!((c / c_n(2) - 1.0).abs() < 0.01, "ratio {c}");
        assert!((c_n(2) - 3.3277).abs() < 1e-4);
    }

    #[test]
    fn proj_size_examples() {
        assert_eq!(proj_size(2, 5).unwrap(), 31);
        assert_eq!(proj_size(2, 4).unwrap(), 28);
        assert_eq!(proj_size(1, 6).unwrap(), 12);
        assert_eq!(proj_size(3, 1).unwrap(), 1);
        assert!(matches!(proj_size(12, 1 << 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn proj_size_matches_class_listing() {
        for (n, p, k) in [(1, 2, 3), (2, 3, 2), (2, 5, 1), (3, 2, 2)] {
            let q = (p as u64).pow(k);
            let classes = residue_classes(n, p, k).unwrap();
            assert_eq!(classes.len() as u64, proj_size(n, q).unwrap());
            let distinct: HashSet<_> = classes
                .iter()
                .map(|c| {
                    let v: Vec<i64> = c.iter().map(|&x| x as i64).collect();
                    ResidueClass::new(q, &v).unwrap()
                })
                .collect();
            assert_eq!(distinct.len(), classes.len());
        }
    }

    #[test]
    fn reduce_examples() {
        let x = ProjPoint::new(&[1, 1, 21]).unwrap();
        let r = reduce_point(&x, 3).unwrap();
        assert_eq!(r.coords(), &[1, 1, 0]);
        let x = ProjPoint::new(&[2, 1, 1]).unwrap();
        assert_eq!(reduce_point(&x, 4).unwrap().coords(), &[2, 1, 1]);
        let x = ProjPoint::new(&[0, 5, 7]).unwrap();
        assert_eq!(reduce_point(&x, 25).unwrap().coords(), &[0, 5, 7]);
        assert!(reduce_point(&x, 6).is_err());
    }

    #[test]
    fn residue_class_equality_up_to_units() {
        let a = ResidueClass::new(7, &[1, 2, 3]).unwrap();
        let b = ResidueClass::new(7, &[3, 6, 9]).unwrap();
        assert_eq!(a, b);
        let c = ResidueClass::new(35, &[2, 4, 6]).unwrap();
        let d = ResidueClass::new(35, &[1, 2, 3]).unwrap();
        assert_eq!(c, d);
        assert!(ResidueClass::new(9, &[3, 6, 0]).is_err());
    }

    #[test]
    fn point_normalisation() {
        let p = ProjPoint::new(&[0, -4, 6]).unwrap();
        assert_eq!(p.coords(), &[0, 2, -3]);
        assert_eq!(p.height(), 3);
        assert!(ProjPoint::new(&[0, 0]).is_err());
    }

    #[test]
    fn congruence_trivial_modulus() {
        let r = count_congruence(1, 1000, 1, |_| Ok::<_, String>(true)).unwrap();
        assert_eq!(r.count, enumerate_points(1, 1000).unwrap().count() as u64);
        assert!(r.relative_error < 0.01);
    }

    #[test]
    fn congruence_first_coordinate_zero_mod_3() {
        let r = count_congruence(2, 500, 3, |c| Ok::<_, String>(c.coords()[0] == 0)).unwrap();
        // oracle: P^2(F_3) points with x0 = 0 form a copy of P^1(F_3)
        let listed = residue_classes(2, 3, 1)
            .unwrap()
            .into_iter()
            .filter(|v| v[0] == 0)
            .count();
        assert_eq!(listed, 4);
        assert_eq!(r.classes, 4);
        assert!(r.relative_error < 0.05, "{r:?}");
    }

    #[test]
    fn congruence_empty_predicate() {
        let r = count_congruence(2, 500, 35, |_| Ok::<_, String>(false)).unwrap();
        assert_eq!(r.count, 0);
        assert_eq!(r.main_term, 0.0);
        assert_eq!(r.relative_error, 0.0);
    }

    #[test]
    fn congruence_matches_enumeration() {
        for (n, b, q) in [(2u64, 30u64, 5u64), (1, 60, 6), (3, 8, 3), (2, 25, 15)] {
            let n = n as usize;
            let target = ResidueClass::new(q, &{
                let mut v = vec![0i64; n + 1];
                v[n] = 1;
                v[0] = 1;
                v
            })
            .unwrap();
            let brute = enumerate_points(n, b)
                .unwrap()
                .filter(|x| ResidueClass::new(q, x.coords()).unwrap() == target)
                .count() as u64;
            let r = count_congruence(n, b, q, |c| Ok::<_, String>(*c == target)).unwrap();
            assert_eq!(r.count, brute, "n={n} B={b} Q={q}");
        }
    }

    #[test]
    fn predicate_failure_is_reported() {
        let r = count_congruence(2, 10, 3, |_| Err::<bool, _>("boom"));
        assert!(matches!(r, Err(Error::Predicate { .. })));
    }
}
