use num_rational::Ratio;

use super::ScanSummary;
use crate::error::{invalid, Result};
use crate::families::ObstructionRecord;

/// Counts of untainted records by ω.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OmegaTally {
    counts: Vec<u64>,
}

impl OmegaTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ObstructionRecord>) -> Self {
        let mut t = Self::new();
        for r in records {
            t.add(r);
        }
        t
    }

    /// Adds a record; tainted records are skipped.
    pub fn add(&mut self, r: &ObstructionRecord) {
        if !r.tainted {
            self.add_omega(r.omega);
        }
    }

    pub fn add_omega(&mut self, omega: usize) {
        if self.counts.len() <= omega {
            self.counts.resize(omega + 1, 0);
        }
        self.counts[omega] += 1;
    }

    pub fn merge(mut self, other: OmegaTally) -> Self {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Σ_j j^r·count(j), exactly.
    pub fn power_sum(&self, r: u32) -> u128 {
        self.counts
            .iter()
            .enumerate()
            .map(|(j, &c)| (j as u128).pow(r) * c as u128)
            .sum()
    }
}

/// τ_π(j, B): the proportion of points of height ≤ B whose fibre is smooth,
/// decided everywhere, and insoluble at exactly j places.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauHistogram {
    pub bound: u64,
    pub point_count: u64,
    pub singular: u64,
    pub tainted_count: u64,
    pub counts: Vec<u64>,
}

impl TauHistogram {
    pub fn new(summary: &ScanSummary, tally: &OmegaTally) -> Result<Self> {
        let h = TauHistogram {
            bound: summary.bound,
            point_count: summary.point_count,
            singular: summary.singular,
            tainted_count: summary.tainted,
            counts: tally.counts().to_vec(),
        };
        if h.singular + h.tainted_count + tally.total() != h.point_count {
            return invalid(format!(
                "partition identity fails: {} singular + {} tainted + {} decided ≠ {} points",
                h.singular,
                h.tainted_count,
                tally.total(),
                h.point_count
            ));
        }
        Ok(h)
    }

    pub fn untainted(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn mass(&self, j: usize) -> Ratio<u64> {
        Ratio::new(
            self.counts.get(j).copied().unwrap_or(0),
            self.point_count.max(1),
        )
    }

    pub fn masses(&self) -> Vec<Ratio<u64>> {
        (0..self.counts.len()).map(|j| self.mass(j)).collect()
    }

    pub fn total_mass(&self) -> Ratio<u64> {
        Ratio::new(self.untainted(), self.point_count.max(1))
    }

    pub fn tainted_fraction(&self) -> f64 {
        self.tainted_count as f64 / self.point_count.max(1) as f64
    }

    /// Σ_j j^r τ(j, B) · point_count / untainted, exactly.
    pub fn moment(&self, r: u32) -> Ratio<u128> {
        let mut acc = Ratio::from_integer(0u128);
        for (j, &c) in self.counts.iter().enumerate() {
            acc += Ratio::new((j as u128).pow(r) * c as u128, self.point_count.max(1) as u128);
        }
        acc * Ratio::new(self.point_count as u128, self.untainted().max(1) as u128)
    }
}

/// N_r / #records: the mean of ω^r over untainted records, exactly.
pub fn n_moments(records: &[ObstructionRecord], r: u32) -> Result<Ratio<u128>> {
    n_moments_tally(&OmegaTally::from_records(records), r)
}

pub fn n_moments_tally(tally: &OmegaTally, r: u32) -> Result<Ratio<u128>> {
    if r == 0 {
        return invalid("n_moments needs r ≥ 1");
    }
    Ok(Ratio::new(tally.power_sum(r), tally.total().max(1) as u128))
}

/// Floating-point version of [`n_moments_tally`].
pub fn n_moments_f64(tally: &OmegaTally, r: u32) -> f64 {
    let n = tally.total().max(1) as f64;
    tally
        .counts()
        .iter()
        .enumerate()
        .map(|(j, &c)| (j as f64).powi(r as i32) * c as f64)
        .sum::<f64>()
        / n
}

pub fn tau_histogram(summary: &ScanSummary, records: &[ObstructionRecord]) -> Result<TauHistogram> {
    TauHistogram::new(summary, &OmegaTally::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::ProjPoint;

    fn rec(omega: usize, tainted: bool) -> ObstructionRecord {
        ObstructionRecord {
            point: ProjPoint::new(&[1, 1, 1]).unwrap(),
            insoluble_places: vec![],
            omega,
            unknown_places: vec![],
            tainted,
        }
    }

    #[test]
    fn all_soluble() {
        let recs: Vec<_> = (0..8).map(|_| rec(0, false)).collect();
        let s = ScanSummary {
            bound: 10,
            point_count: 10,
            singular: 2,
            tainted: 0,
        };
        let h = tau_histogram(&s, &recs).unwrap();
        assert_eq!(h.mass(0), Ratio::new(4, 5));
        assert_eq!(h.mass(1), Ratio::from_integer(0));
        assert_eq!(h.total_mass(), Ratio::new(4, 5));
        assert_eq!(n_moments(&recs, 1).unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn moment_identity() {
        let recs = vec![rec(0, false), rec(1, false), rec(3, false), rec(2, true), rec(1, false)];
        let s = ScanSummary {
            bound: 10,
            point_count: 7,
            singular: 2,
            tainted: 1,
        };
        let h = tau_histogram(&s, &recs).unwrap();
        for r in 1..=3 {
            assert_eq!(n_moments(&recs, r).unwrap(), h.moment(r));
        }
        let bad = ScanSummary { point_count: 9, ..s };
        assert!(tau_histogram(&bad, &recs).is_err());
    }
}
