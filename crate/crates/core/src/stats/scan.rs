use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{gcd_slice, Sieve};
use crate::error::{invalid, Error, Result};
use crate::families::{omega_pi_with, FamilyDescriptor, ObstructionRecord};
use crate::localsolve::Place;
use crate::par;
use crate::projective::{fold_points, ProjPoint};

/// Name of the generator behind [`sample_fold`], recorded in manifests.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = batch index";

/// Points drawn per RNG stream in [`sample_fold`].
pub const SAMPLE_BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanSummary {
    pub bound: u64,
    /// Points visited: every point of height ≤ B, or every accepted sample.
    pub point_count: u64,
    pub singular: u64,
    pub tainted: u64,
}

impl ScanSummary {
    fn merge(mut self, o: ScanSummary) -> Self {
        self.point_count += o.point_count;
        self.singular += o.singular;
        self.tainted += o.tainted;
        self
    }

    pub fn untainted(&self) -> u64 {
        self.point_count - self.singular - self.tainted
    }
}

struct Slot<A> {
    summary: ScanSummary,
    acc: A,
    error: Option<Error>,
}

fn visit<A, F>(
    family: &FamilyDescriptor,
    s: &[Place],
    sieve: &Sieve,
    slot: &mut Slot<A>,
    x: &ProjPoint,
    fold: &F,
) where
    F: Fn(&mut A, &ObstructionRecord),
{
    if slot.error.is_some() {
        return;
    }
    slot.summary.point_count += 1;
    if !family.smooth(x) {
        slot.summary.singular += 1;
        return;
    }
    match omega_pi_with(family, x, s, Some(sieve)) {
        Ok(rec) => {
            if rec.tainted {
                slot.summary.tainted += 1;
            }
            fold(&mut slot.acc, &rec);
        }
        Err(e) => slot.error = Some(e),
    }
}

fn merge_slots<A, M: Fn(A, A) -> A>(a: Slot<A>, b: Slot<A>, merge: &M) -> Slot<A> {
    Slot {
        summary: a.summary.merge(b.summary),
        acc: merge(a.acc, b.acc),
        error: a.error.or(b.error),
    }
}

/// Visits the record of every smooth point of height ≤ B (tainted records
/// included, flagged) and folds them in parallel. Singular fibres are only
/// counted. The result does not depend on the thread count.
pub fn scan_fold<A, I, F, M>(
    family: &FamilyDescriptor,
    bound: u64,
    s: &[Place],
    init: I,
    fold: F,
    merge: M,
) -> Result<(ScanSummary, A)>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, &ObstructionRecord) + Sync + Send,
    M: Fn(A, A) -> A,
{
    if bound < 3 {
        return invalid("scans need B ≥ 3");
    }
    let sieve = Sieve::new(bound);
    let empty = || Slot {
        summary: ScanSummary {
            bound,
            ..Default::default()
        },
        acc: init(),
        error: None,
    };
    let slot = fold_points(
        family.n(),
        bound,
        empty,
        |slot, x| visit(family, s, &sieve, slot, &x, &fold),
        |a, b| merge_slots(a, b, &merge),
    )?;
    match slot.error {
        Some(e) => Err(e),
        None => Ok((
            ScanSummary {
                bound,
                ..slot.summary
            },
            slot.acc,
        )),
    }
}

/// All records of height ≤ B in enumeration order.
pub fn scan(
    family: &FamilyDescriptor,
    bound: u64,
    s: &[Place],
) -> Result<(ScanSummary, Vec<ObstructionRecord>)> {
    scan_fold(
        family,
        bound,
        s,
        Vec::new,
        |v, r| v.push(r.clone()),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}

/// Like [`scan_fold`] over `samples` points drawn uniformly from the points
/// of height ≤ B: integer vectors uniform in [−B, B]^{n+1}, rejecting zero
/// and non-primitive vectors. Batch `i` draws from its own ChaCha8 stream
/// `i`, so the sample is the same for any thread count.
pub fn sample_fold<A, I, F, M>(
    family: &FamilyDescriptor,
    bound: u64,
    s: &[Place],
    samples: u64,
    seed: u64,
    init: I,
    fold: F,
    merge: M,
) -> Result<(ScanSummary, A)>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, &ObstructionRecord) + Sync + Send,
    M: Fn(A, A) -> A,
{
    if bound < 3 {
        return invalid("scans need B ≥ 3");
    }
    if bound > 1 << 31 {
        return invalid("B must be at most 2^31");
    }
    let sieve = Sieve::new(bound);
    let k = family.n() + 1;
    let b = bound as i64;
    let batches = samples.div_ceil(SAMPLE_BATCH);
    let parts = par::map_collect(0..batches, |batch| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(batch);
        let mut slot = Slot {
            summary: ScanSummary {
                bound,
                ..Default::default()
            },
            acc: init(),
            error: None,
        };
        let n = SAMPLE_BATCH.min(samples - batch * SAMPLE_BATCH);
        let mut v = vec![0i64; k];
        for _ in 0..n {
            loop {
                for c in v.iter_mut() {
                    *c = rng.random_range(-b..=b);
                }
                if gcd_slice(&v) == 1 {
                    break;
                }
            }
            let x = match ProjPoint::new(&v) {
                Ok(x) => x,
                Err(e) => {
                    slot.error = Some(e);
                    break;
                }
            };
            visit(family, s, &sieve, &mut slot, &x, &fold);
        }
        slot
    });
    let mut total = Slot {
        summary: ScanSummary {
            bound,
            ..Default::default()
        },
        acc: init(),
        error: None,
    };
    for p in parts {
        total = merge_slots(total, p, &merge);
    }
    match total.error {
        Some(e) => Err(e),
        None => Ok((
            ScanSummary {
                bound,
                ..total.summary
            },
            total.acc,
        )),
    }
}
