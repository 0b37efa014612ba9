//! Concrete fibrations π: V → P^n packaged as data: the discriminant form,
//! the bad-prime bound A, Δ(π), per-place solubility θ_v and σ_p.

mod calibrate;
mod conics;
mod density;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_rational::Ratio;

pub use calibrate::{calibrate_a, Calibration};
pub use conics::{conic_non_split, omega_formula_conics, sigma_conics_closed_form, sigma_exact};
pub use density::{
    disk_density, local_insoluble_density, sigma_empirical, DiskDensity, LocalDensity,
    SigmaEstimate,
};

use crate::arith::{self, Sieve};
use crate::error::{invalid, Error, Result};
use crate::grouptheory::{delta_total, ComponentAction, DivisorAction};
use crate::localsolve::{
    self, conic_soluble, default_depth, max_depth, padic_point_search, CubicKey, Fibre,
    HomogeneousForm, Place, Status,
};
use crate::projective::ProjPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    /// ax² + by² = cz² over (a:b:c) ∈ P².
    DiagonalConics,
    /// Σ yᵢxᵢ³ = 0 over (y₀:y₁:y₂:y₃) ∈ P³.
    DiagonalCubics,
}

/// A family with its invariants and a memo of local verdicts.
///
/// Cubic verdicts are cached by [`CubicKey`], the normal form of the fibre
/// over Q_p; the cache is shared between clones.
#[derive(Clone)]
pub struct FamilyDescriptor {
    kind: FamilyKind,
    bad_bound: u64,
    depth: Option<u32>,
    cache: Arc<RwLock<HashMap<CubicKey, Status>>>,
}

impl fmt::Debug for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyDescriptor")
            .field("name", &self.name())
            .field("bad_bound", &self.bad_bound)
            .field("depth", &self.depth)
            .finish()
    }
}

pub fn diagonal_conics() -> FamilyDescriptor {
    FamilyDescriptor::new(FamilyKind::DiagonalConics, 2)
}

pub fn diagonal_cubics() -> FamilyDescriptor {
    FamilyDescriptor::new(FamilyKind::DiagonalCubics, 3)
}

pub const FAMILY_NAMES: [&str; 2] = ["diagonal-conics", "diagonal-cubics"];

pub fn family_by_name(name: &str) -> Result<FamilyDescriptor> {
    match name {
        "diagonal-conics" | "conics" => Ok(diagonal_conics()),
        "diagonal-cubics" | "cubics" => Ok(diagonal_cubics()),
        _ => invalid(format!(
            "unknown family {name:?} (expected one of {})",
            FAMILY_NAMES.join(", ")
        )),
    }
}

impl FamilyDescriptor {
    fn new(kind: FamilyKind, bad_bound: u64) -> Self {
        FamilyDescriptor {
            kind,
            bad_bound,
            depth: None,
            cache: Arc::new(RwLock::new(HashMap::new())),
        }
    }

    pub fn with_bad_bound(mut self, a: u64) -> Self {
        self.bad_bound = a;
        self
    }

    /// Overrides the residue depth of the p-adic search (cubics only).
    pub fn with_depth(mut self, depth: Option<u32>) -> Self {
        if depth != self.depth {
            self.cache = Arc::new(RwLock::new(HashMap::new()));
        }
        self.depth = depth;
        self
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::DiagonalConics => FAMILY_NAMES[0],
            FamilyKind::DiagonalCubics => FAMILY_NAMES[1],
        }
    }

    /// Dimension n of the base P^n.
    pub fn n(&self) -> usize {
        match self.kind {
            FamilyKind::DiagonalConics => 2,
            FamilyKind::DiagonalCubics => 3,
        }
    }

    pub fn depth(&self) -> Option<u32> {
        self.depth
    }

    /// The discriminant form f: the product of the base coordinates.
    pub fn f(&self) -> HomogeneousForm {
        let k = self.n() + 1;
        HomogeneousForm::new(k, &[(1, vec![1; k])]).expect("monomial is a valid form")
    }

    pub fn degree_f(&self) -> u32 {
        self.n() as u32 + 1
    }

    pub fn f_value(&self, x: &ProjPoint) -> i128 {
        x.coords().iter().map(|&c| c as i128).product()
    }

    /// Bad-prime bound A: θ_p(x) can only hold for p ≤ A or p | f(x).
    pub fn bad_bound(&self) -> u64 {
        self.bad_bound
    }

    /// Δ(π) as declared for the family.
    pub fn delta(&self) -> Ratio<u64> {
        match self.kind {
            FamilyKind::DiagonalConics => Ratio::new(3, 2),
            FamilyKind::DiagonalCubics => Ratio::from_integer(0),
        }
    }

    /// Group actions on the components of the fibres over the generic points
    /// of the divisors a = 0, b = 0, … . Each conic divisor carries a pair of
    /// conjugate lines swapped by Z/2; each cubic divisor carries a cone over
    /// a smooth plane cubic, geometrically integral.
    pub fn divisor_actions(&self) -> Vec<DivisorAction> {
        let names = ["a", "b", "c", "d"];
        (0..=self.n())
            .map(|i| {
                let action = match self.kind {
                    FamilyKind::DiagonalConics => {
                        ComponentAction::new(vec![vec![0, 1], vec![1, 0]], vec![1, 1])
                    }
                    FamilyKind::DiagonalCubics => ComponentAction::trivial(vec![1]),
                }
                .expect("bundled actions are valid");
                let name = match self.kind {
                    FamilyKind::DiagonalConics => format!("{}=0", names[i]),
                    FamilyKind::DiagonalCubics => format!("y{i}=0"),
                };
                DivisorAction { name, action }
            })
            .collect()
    }

    /// Δ recomputed from [`Self::divisor_actions`].
    pub fn delta_from_actions(&self) -> Ratio<u64> {
        let actions: Vec<ComponentAction> =
            self.divisor_actions().into_iter().map(|d| d.action).collect();
        delta_total(&actions)
    }

    fn check_dim(&self, coords: &[i64]) -> Result<()> {
        if coords.len() != self.n() + 1 {
            return invalid(format!(
                "{} expects {} coordinates, got {}",
                self.name(),
                self.n() + 1,
                coords.len()
            ));
        }
        Ok(())
    }

    pub fn smooth(&self, x: &ProjPoint) -> bool {
        x.coords().len() == self.n() + 1 && x.coords().iter().all(|&c| c != 0)
    }

    pub fn fibre(&self, x: &ProjPoint) -> Fibre {
        let c = x.coords();
        match self.kind {
            FamilyKind::DiagonalConics => Fibre::Conic {
                a: c[0],
                b: c[1],
                c: c[2],
            },
            FamilyKind::DiagonalCubics => Fibre::DiagonalCubic([c[0], c[1], c[2], c[3]]),
        }
    }

    /// Local solubility of the fibre over x at v. `Status::Insoluble` is
    /// θ_v(x) = true.
    pub fn theta(&self, x: &ProjPoint, v: Place) -> Result<Status> {
        self.check_dim(x.coords())?;
        if !self.smooth(x) {
            return invalid(format!("fibre over {x} is singular"));
        }
        self.theta_coeffs(x.coords(), v)
    }

    /// θ on raw nonzero coefficients (not necessarily primitive).
    pub(crate) fn theta_coeffs(&self, c: &[i64], v: Place) -> Result<Status> {
        let to_status = |soluble: bool| {
            if soluble {
                Status::Soluble
            } else {
                Status::Insoluble
            }
        };
        match (self.kind, v) {
            (FamilyKind::DiagonalConics, v) => Ok(to_status(conic_soluble(c[0], c[1], c[2], v)?)),
            (FamilyKind::DiagonalCubics, Place::Infinity) => Ok(Status::Soluble),
            (FamilyKind::DiagonalCubics, Place::Prime(p)) => {
                self.cubic_status([c[0], c[1], c[2], c[3]], p)
            }
        }
    }

    fn cubic_status(&self, y: [i64; 4], p: u64) -> Result<Status> {
        let key = CubicKey::new(y, p);
        if let Some(&s) = self.cache.read().map_err(poisoned)?.get(&key) {
            return Ok(s);
        }
        let rep = key.representative();
        let form = HomogeneousForm::diagonal(&rep, 3)?;
        let depth = self
            .depth
            .unwrap_or_else(|| default_depth(&form, p))
            .min(max_depth(p));
        let status = padic_point_search(&form, p, depth)?.status;
        self.cache.write().map_err(poisoned)?.insert(key, status);
        Ok(status)
    }

    /// Places that can obstruct: ∞, the primes ≤ A, and the primes dividing
    /// f(x). Prime factors come from `sieve` when it covers the coordinates.
    pub fn candidate_places(&self, x: &ProjPoint, sieve: Option<&Sieve>) -> Vec<Place> {
        let mut primes: Vec<u64> = arith::primes_up_to(self.bad_bound);
        for &c in x.coords() {
            let m = c.unsigned_abs();
            match sieve {
                Some(s) if m <= s.limit() => s.push_prime_factors(m, &mut primes),
                _ => primes.extend(arith::prime_factors(m as u128)),
            }
        }
        primes.sort_unstable();
        primes.dedup();
        let mut out: Vec<Place> = primes.into_iter().map(Place::Prime).collect();
        out.push(Place::Infinity);
        out
    }
}

fn poisoned<T>(_: T) -> Error {
    Error::InvalidArgument("verdict cache lock poisoned".into())
}

/// The places where one fibre has no local point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionRecord {
    pub point: ProjPoint,
    /// Sorted, primes first then ∞.
    pub insoluble_places: Vec<Place>,
    pub omega: usize,
    /// Places whose verdict was Unknown.
    pub unknown_places: Vec<Place>,
    pub tainted: bool,
}

impl ObstructionRecord {
    /// Insoluble primes (finite places only).
    pub fn insoluble_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.insoluble_places.iter().filter_map(Place::as_prime)
    }
}

/// ω_{π,S}(x): the candidate places outside S where the fibre over x is
/// insoluble.
pub fn omega_pi(family: &FamilyDescriptor, x: &ProjPoint, s: &[Place]) -> Result<ObstructionRecord> {
    omega_pi_with(family, x, s, None)
}

/// [`omega_pi`] factoring coordinates with a precomputed sieve.
pub fn omega_pi_with(
    family: &FamilyDescriptor,
    x: &ProjPoint,
    s: &[Place],
    sieve: Option<&Sieve>,
) -> Result<ObstructionRecord> {
    family.check_dim(x.coords())?;
    if !family.smooth(x) {
        return invalid(format!("fibre over {x} is singular"));
    }
    let mut insoluble = Vec::new();
    let mut unknown = Vec::new();
    for v in family.candidate_places(x, sieve) {
        if s.contains(&v) {
            continue;
        }
        match family.theta_coeffs(x.coords(), v)? {
            Status::Insoluble => insoluble.push(v),
            Status::Unknown => unknown.push(v),
            Status::Soluble => {}
        }
    }
    Ok(ObstructionRecord {
        point: x.clone(),
        omega: insoluble.len(),
        tainted: !unknown.is_empty(),
        insoluble_places: insoluble,
        unknown_places: unknown,
    })
}

/// Real solubility of the fibre over x.
pub fn real_soluble_at(family: &FamilyDescriptor, x: &ProjPoint) -> Result<bool> {
    localsolve::real_soluble(&family.fibre(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[i64]) -> ProjPoint {
        ProjPoint::new(c).unwrap()
    }

    #[test]
    fn conic_examples() {
        let f = diagonal_conics();
        assert_eq!(f.theta(&pt(&[1, 1, 21]), Place::Prime(3)).unwrap(), Status::Insoluble);
        assert!(!f.smooth(&pt(&[1, 0, 1])));
        assert_eq!(f.delta(), Ratio::new(3, 2));
        assert_eq!(f.delta_from_actions(), f.delta());
    }

    #[test]
    fn cubic_examples() {
        let f = diagonal_cubics();
        assert_eq!(f.theta(&pt(&[1, 2, 7, 14]), Place::Prime(7)).unwrap(), Status::Insoluble);
        for p in arith::primes_up_to(50) {
            assert_eq!(f.theta(&pt(&[1, 1, 1, 1]), Place::Prime(p)).unwrap(), Status::Soluble);
        }
        assert_eq!(f.delta(), Ratio::from_integer(0));
        assert_eq!(f.delta_from_actions(), f.delta());
    }

    #[test]
    fn omega_examples() {
        let f = diagonal_conics();
        let r = omega_pi(&f, &pt(&[1, 1, 21]), &[Place::Infinity]).unwrap();
        assert_eq!(r.insoluble_places, vec![Place::Prime(3), Place::Prime(7)]);
        assert_eq!(r.omega, 2);
        assert_eq!(omega_pi(&f, &pt(&[1, 1, 1]), &[Place::Infinity]).unwrap().omega, 0);
        let all = omega_pi(&f, &pt(&[1, 1, 21]), &[]).unwrap();
        assert_eq!(all.omega, 2);
        assert_eq!(all.omega % 2, 0);
        assert!(omega_pi(&f, &pt(&[1, 0, 21]), &[]).is_err());
    }

    #[test]
    fn cached_cubic_verdicts_match_direct_search() {
        let f = diagonal_cubics();
        let ys = [[1i64, 2, 7, 14], [1, 1, 1, 1], [3, 5, 9, 27], [2, 4, 8, 17], [1, 6, 12, 18]];
        for y in ys {
            for p in [2u64, 3, 5, 7, 13] {
                let form = HomogeneousForm::diagonal(&y, 3).unwrap();
                let d = default_depth(&form, p).min(max_depth(p));
                let direct = padic_point_search(&form, p, d).unwrap().status;
                let cached = f.theta(&pt(&y), Place::Prime(p)).unwrap();
                if direct != Status::Unknown {
                    assert_eq!(cached, direct, "{y:?} at {p}");
                }
            }
        }
    }

    #[test]
    fn by_name() {
        assert_eq!(family_by_name("diagonal-conics").unwrap().n(), 2);
        assert_eq!(family_by_name("cubics").unwrap().n(), 3);
        assert!(family_by_name("quartics").is_err());
    }
}
