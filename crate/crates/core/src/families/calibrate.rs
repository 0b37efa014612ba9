use super::FamilyDescriptor;
use crate::arith::{self, Sieve};
use crate::error::{invalid, Result};
use crate::localsolve::{Place, Status};
use crate::projective::{fold_points, ProjPoint};

/// Witnesses kept per calibration.
const MAX_WITNESSES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calibration {
    /// Smallest A with θ(x, p) false for every tested x and prime
    /// p ∈ (A, p_max] not dividing f(x).
    pub a: u64,
    /// Exceptional pairs (x, p) with p ∤ f(x) and θ(x, p) true (truncated).
    pub exceptions: Vec<(ProjPoint, u64)>,
    pub exception_count: u64,
    /// Primes skipped because some verdict was Unknown, with a diagnostic.
    pub aborted: Vec<(u64, String)>,
}

#[derive(Default)]
struct Acc {
    max_p: u64,
    exceptions: Vec<(ProjPoint, u64)>,
    count: u64,
    unknown: Vec<(u64, ProjPoint)>,
}

/// Determines A by testing every smooth x with H(x) ≤ B_cal at every prime
/// p ≤ p_max not dividing f(x).
pub fn calibrate_a(family: &FamilyDescriptor, p_max: u64, b_cal: u64) -> Result<Calibration> {
    if p_max < 2 || b_cal < 1 {
        return invalid("calibration needs p_max ≥ 2 and B_cal ≥ 1");
    }
    let primes = arith::primes_up_to(p_max);
    let sieve = Sieve::new(b_cal);
    let acc = fold_points(
        family.n(),
        b_cal,
        Acc::default,
        |acc: &mut Acc, x| {
            if !family.smooth(&x) {
                return;
            }
            let mut divisors = Vec::new();
            for &c in x.coords() {
                sieve.push_prime_factors(c.unsigned_abs(), &mut divisors);
            }
            for &p in &primes {
                if divisors.contains(&p) || acc.unknown.iter().any(|(q, _)| *q == p) {
                    continue;
                }
                match family.theta_coeffs(x.coords(), Place::Prime(p)) {
                    Ok(Status::Insoluble) => {
                        acc.max_p = acc.max_p.max(p);
                        acc.count += 1;
                        if acc.exceptions.len() < MAX_WITNESSES {
                            acc.exceptions.push((x.clone(), p));
                        }
                    }
                    Ok(Status::Soluble) => {}
                    Ok(Status::Unknown) | Err(_) => acc.unknown.push((p, x.clone())),
                }
            }
        },
        |mut a, b| {
            a.max_p = a.max_p.max(b.max_p);
            a.count += b.count;
            for e in b.exceptions {
                if a.exceptions.len() < MAX_WITNESSES {
                    a.exceptions.push(e);
                }
            }
            for u in b.unknown {
                if !a.unknown.iter().any(|(q, _)| *q == u.0) {
                    a.unknown.push(u);
                }
            }
            a
        },
    )?;
    let mut aborted: Vec<(u64, String)> = acc
        .unknown
        .iter()
        .map(|(p, x)| (*p, format!("undecided local solubility at p = {p} for {x}")))
        .collect();
    aborted.sort();
    let aborted_primes: Vec<u64> = aborted.iter().map(|a| a.0).collect();
    let exceptions: Vec<(ProjPoint, u64)> = acc
        .exceptions
        .into_iter()
        .filter(|(_, p)| !aborted_primes.contains(p))
        .collect();
    Ok(Calibration {
        a: acc.max_p.max(1),
        exceptions,
        exception_count: acc.count,
        aborted,
    })
}
