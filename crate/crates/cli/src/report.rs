//! Row types of every table the tool writes, with conversions back into the
//! library's report types.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::Ratio;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use fibstat_core::stats::{
    BaselineReport, Histogram, MomentReport, SigmaEntry, SigmaTable, TauHistogram, TauPrediction,
};

use crate::error::CliError;
use crate::SCHEMA;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub r: u32,
    pub value: f64,
    pub reference: f64,
    pub centering: String,
    pub bound: u64,
    pub count: u64,
}

impl From<&MomentReport> for MomentRow {
    fn from(m: &MomentReport) -> Self {
        MomentRow {
            r: m.r,
            value: m.value,
            reference: m.mu_r_reference,
            centering: m.centering.to_string(),
            bound: m.bound,
            count: m.count,
        }
    }
}

impl MomentRow {
    pub fn to_report(&self) -> Result<MomentReport, CliError> {
        Ok(MomentReport {
            bound: self.bound,
            r: self.r,
            value: self.value,
            centering: self.centering.parse()?,
            mu_r_reference: self.reference,
            count: self.count,
        })
    }
}

/// A histogram bin, or the underflow/overflow counts (kind "under"/"over").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub kind: String,
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

pub fn histogram_rows(h: &Histogram) -> Vec<HistogramRow> {
    let mut rows = vec![HistogramRow {
        kind: "under".into(),
        lo: f64::NEG_INFINITY,
        hi: h.lo,
        count: h.underflow,
    }];
    for (i, &c) in h.counts.iter().enumerate() {
        let (lo, hi) = h.bin_edges(i);
        rows.push(HistogramRow {
            kind: "bin".into(),
            lo,
            hi,
            count: c,
        });
    }
    rows.push(HistogramRow {
        kind: "over".into(),
        lo: h.hi,
        hi: f64::INFINITY,
        count: h.overflow,
    });
    rows
}

pub fn histogram_from_rows(rows: &[HistogramRow]) -> Result<Histogram, CliError> {
    let find = |k: &str| {
        rows.iter()
            .find(|r| r.kind == k)
            .ok_or_else(|| CliError::Invariant(format!("histogram lacks the {k} row")))
    };
    let (under, over) = (find("under")?, find("over")?);
    Ok(Histogram {
        lo: under.hi,
        hi: over.lo,
        counts: rows.iter().filter(|r| r.kind == "bin").map(|r| r.count).collect(),
        underflow: under.count,
        overflow: over.count,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub key: String,
    pub value: String,
}

pub fn summary_map(rows: &[SummaryRow]) -> BTreeMap<String, String> {
    rows.iter().map(|r| (r.key.clone(), r.value.clone())).collect()
}

fn summary_u64(map: &BTreeMap<String, String>, key: &str) -> Result<u64, CliError> {
    map.get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Invariant(format!("summary lacks {key}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauRow {
    pub j: usize,
    pub count: u64,
    pub mass_num: u64,
    pub mass_den: u64,
    pub mass: f64,
}

pub fn tau_rows(h: &TauHistogram) -> Vec<TauRow> {
    h.masses()
        .iter()
        .enumerate()
        .map(|(j, m)| TauRow {
            j,
            count: h.counts[j],
            mass_num: *m.numer(),
            mass_den: *m.denom(),
            mass: *m.numer() as f64 / *m.denom() as f64,
        })
        .collect()
}

/// Rebuilds the histogram from the τ table and the run summary
/// (bound, point_count, singular, tainted).
pub fn tau_histogram_from_rows(
    rows: &[TauRow],
    summary: &[SummaryRow],
) -> Result<TauHistogram, CliError> {
    let map = summary_map(summary);
    let h = TauHistogram {
        bound: summary_u64(&map, "bound")?,
        point_count: summary_u64(&map, "point_count")?,
        singular: summary_u64(&map, "singular")?,
        tainted_count: summary_u64(&map, "tainted")?,
        counts: rows.iter().map(|r| r.count).collect(),
    };
    for (j, r) in rows.iter().enumerate() {
        if r.j != j || h.mass(j) != Ratio::new(r.mass_num, r.mass_den.max(1)) {
            return Err(CliError::Invariant(format!("τ row {j} is inconsistent")));
        }
    }
    if h.singular + h.tainted_count + h.untainted() != h.point_count {
        return Err(CliError::Invariant("τ table breaks the partition identity".into()));
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub j: usize,
    pub prediction: f64,
    pub std_error: f64,
    pub tail_bound: f64,
    pub prime_cutoff: u64,
}

impl From<&TauPrediction> for PredictionRow {
    fn from(p: &TauPrediction) -> Self {
        PredictionRow {
            j: p.j,
            prediction: p.value,
            std_error: p.std_error,
            tail_bound: p.tail_bound,
            prime_cutoff: p.prime_cutoff,
        }
    }
}

impl From<&PredictionRow> for TauPrediction {
    fn from(r: &PredictionRow) -> Self {
        TauPrediction {
            j: r.j,
            prime_cutoff: r.prime_cutoff,
            value: r.prediction,
            std_error: r.std_error,
            tail_bound: r.tail_bound,
        }
    }
}

/// σ_p with the running sum. `exact` is "num/den" for exact entries and
/// empty for estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub p: u64,
    pub sigma: f64,
    pub exact: String,
    pub std_error: f64,
    pub samples: u64,
    pub partial_sum: f64,
}

pub fn sigma_rows(t: &SigmaTable) -> Vec<SigmaRow> {
    let mut acc = 0.0;
    t.entries()
        .iter()
        .map(|(&p, e)| {
            acc += e.value();
            let (exact, std_error, samples) = match e {
                SigmaEntry::Exact(r) => (r.to_string(), 0.0, 0),
                SigmaEntry::Estimate {
                    std_error, samples, ..
                } => (String::new(), *std_error, *samples),
            };
            SigmaRow {
                p,
                sigma: e.value(),
                exact,
                std_error,
                samples,
                partial_sum: acc,
            }
        })
        .collect()
}

pub fn sigma_table_from_rows(rows: &[SigmaRow]) -> Result<SigmaTable, CliError> {
    let mut entries = BTreeMap::new();
    for r in rows {
        let e = if r.exact.is_empty() {
            SigmaEntry::Estimate {
                value: r.sigma,
                std_error: r.std_error,
                samples: r.samples,
            }
        } else {
            let q: Ratio<u64> = r
                .exact
                .parse()
                .map_err(|_| CliError::Invariant(format!("bad exact σ {:?}", r.exact)))?;
            SigmaEntry::Exact(q)
        };
        entries.insert(r.p, e);
    }
    Ok(SigmaTable::new(entries))
}

/// One cutoff of the β fit: x, Σ_{p≤x} σ_p, fixed-slope residual, 1/log x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub x: f64,
    pub partial_sum: f64,
    pub residual: f64,
    pub inv_log_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub divisor: String,
    pub delta: String,
    pub value: f64,
}

impl DeltaRow {
    pub fn new(divisor: &str, q: Ratio<u64>) -> Self {
        DeltaRow {
            divisor: divisor.to_string(),
            delta: q.to_string(),
            value: *q.numer() as f64 / *q.denom() as f64,
        }
    }

    pub fn ratio(&self) -> Result<Ratio<u64>, CliError> {
        self.delta
            .parse()
            .map_err(|_| CliError::Invariant(format!("bad δ {:?}", self.delta)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub limit: u64,
    pub count: u64,
    pub first_moment: f64,
    pub second_moment: f64,
    pub mu2_reference: f64,
    pub ks: f64,
}

impl From<&BaselineReport> for BaselineRow {
    fn from(b: &BaselineReport) -> Self {
        BaselineRow {
            limit: b.limit,
            count: b.count,
            first_moment: b.first_moment,
            second_moment: b.second_moment,
            mu2_reference: b.mu2_reference,
            ks: b.ks,
        }
    }
}

impl From<&BaselineRow> for BaselineReport {
    fn from(b: &BaselineRow) -> Self {
        BaselineReport {
            limit: b.limit,
            count: b.count,
            first_moment: b.first_moment,
            second_moment: b.second_moment,
            mu2_reference: b.mu2_reference,
            ks: b.ks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertRow {
    pub query: String,
    pub place: String,
    /// +1/−1 for symbols, 1/0 for conic solubility.
    pub value: i8,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerateRow {
    pub n: usize,
    pub bound: u64,
    pub count: u64,
    pub normalized: f64,
    pub c_n: f64,
    pub smooth: u64,
}

/// Serializes rows as CSV under the `# fibstat v1 <command>` header and any
/// further comment lines.
pub fn to_csv<R: Serialize>(command: &str, comments: &[String], rows: &[R]) -> Vec<u8> {
    let mut out = format!("# {SCHEMA} {command}\n").into_bytes();
    for c in comments {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    w.into_inner().expect("in-memory writer")
}

#[derive(Serialize, Deserialize)]
struct JsonTable<R> {
    schema: String,
    comments: Vec<String>,
    rows: Vec<R>,
}

pub fn to_json<R: Serialize + Clone>(command: &str, comments: &[String], rows: &[R]) -> Vec<u8> {
    let t = JsonTable {
        schema: format!("{SCHEMA} {command}"),
        comments: comments.to_vec(),
        rows: rows.to_vec(),
    };
    let mut v = serde_json::to_vec_pretty(&t).expect("rows serialize");
    v.push(b'\n');
    v
}

/// Reads a table written by [`to_csv`]; returns the command named in the
/// header and the rows.
pub fn read_csv<R: DeserializeOwned>(path: &Path) -> Result<(String, Vec<R>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let err = |msg: String| CliError::Read {
        path: path.to_path_buf(),
        msg,
    };
    let first = bytes.split(|&b| b == b'\n').next().unwrap_or(&[]);
    let first = std::str::from_utf8(first).map_err(|e| err(e.to_string()))?;
    let command = first
        .strip_prefix(&format!("# {SCHEMA} "))
        .ok_or_else(|| err(format!("missing \"# {SCHEMA}\" header")))?
        .trim()
        .to_string();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(bytes.as_slice());
    let rows = rdr
        .deserialize()
        .collect::<Result<Vec<R>, _>>()
        .map_err(|e| err(e.to_string()))?;
    Ok((command, rows))
}

pub fn read_json<R: DeserializeOwned>(path: &Path) -> Result<(String, Vec<R>), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let t: JsonTable<R> = serde_json::from_slice(&bytes).map_err(|e| CliError::Read {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let command = t
        .schema
        .strip_prefix(&format!("{SCHEMA} "))
        .unwrap_or(&t.schema)
        .to_string();
    Ok((command, t.rows))
}

/// The part of a CSV file after its comment lines.
pub fn csv_body(bytes: &[u8]) -> &[u8] {
    let mut i = 0;
    while i < bytes.len() && bytes[i] == b'#' {
        match bytes[i..].iter().position(|&b| b == b'\n') {
            Some(k) => i += k + 1,
            None => return &[],
        }
    }
    &bytes[i..]
}
