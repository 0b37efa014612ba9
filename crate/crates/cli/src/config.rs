use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use fibstat_core::families::{family_by_name, FamilyDescriptor, FAMILY_NAMES};
use fibstat_core::localsolve::Place;
use fibstat_core::stats::Centering;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Enumerate,
    Sigma,
    Ekac,
    Tau,
    Delta,
    Hilbert,
    Baseline,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Enumerate => "enumerate",
            Command::Sigma => "sigma",
            Command::Ekac => "ekac",
            Command::Tau => "tau",
            Command::Delta => "delta",
            Command::Hilbert => "hilbert",
            Command::Baseline => "baseline",
        }
    }

    fn statistical(self) -> bool {
        matches!(
            self,
            Command::Enumerate | Command::Sigma | Command::Ekac | Command::Tau | Command::Baseline
        )
    }

    fn default_bound(self) -> u64 {
        match self {
            Command::Enumerate => 100,
            Command::Sigma => 1000,
            Command::Ekac => 1000,
            Command::Tau => 40,
            Command::Baseline => 1_000_000,
            Command::Delta | Command::Hilbert => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMode {
    Exact,
    Empirical,
}

/// One run of the tool. Field order is the serialization order used for the
/// config hash.
#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "fibstat", version, about = "Local obstructions in families of varieties")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// diagonal-conics or diagonal-cubics
    #[arg(long, default_value = "diagonal-conics")]
    pub family: String,

    /// Height bound (prime limit for sigma, N for baseline)
    #[arg(long = "B", alias = "bound")]
    pub bound: Option<u64>,

    /// Places always skipped, comma separated (e.g. "inf,2"); "none" for the empty set
    #[arg(long = "S", default_value = "inf")]
    pub places: String,

    #[arg(long, default_value_t = 4)]
    pub r_max: u32,

    /// p-adic search depth override
    #[arg(long)]
    pub depth: Option<u32>,

    /// Worker threads (default: all cores)
    #[arg(long, env = "FIBSTAT_THREADS")]
    #[serde(skip)]
    pub threads: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output path prefix; files are <prefix>.<table>.csv and <prefix>.manifest.json
    #[arg(long, default_value = "fibstat-out/run")]
    pub output: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// ekac: Monte Carlo sample size; 0 forces exhaustive enumeration (default: automatic)
    #[arg(long)]
    pub samples: Option<u64>,

    /// ekac: loglog, empirical or truncated
    #[arg(long, default_value = "empirical")]
    pub centering: String,

    /// ekac: truncation window (t0, t1]
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,

    /// tau: primes used in the limit prediction
    #[arg(long, default_value_t = 100)]
    pub prime_cutoff: u64,

    /// tau: local densities for the prediction
    #[arg(long, value_enum, default_value_t = DensityMode::Exact)]
    pub density: DensityMode,

    /// tau: samples per prime for empirical densities
    #[arg(long, default_value_t = 20_000)]
    pub density_samples: u64,

    /// Largest tolerated tainted fraction before exiting with status 3
    #[arg(long, default_value_t = 0.001)]
    pub taint_ceiling: f64,

    /// delta: action document
    #[arg(long)]
    pub actions: Option<PathBuf>,

    /// delta: bundled action document (trivial, conic-line-pair, genus1-double-fibre, diagonal-conics)
    #[arg(long)]
    pub bundled: Option<String>,

    /// hilbert: solubility of ax² + by² = cz²
    #[arg(long, num_args = 3, value_names = ["A", "B", "C"], allow_negative_numbers = true)]
    pub conic: Option<Vec<i64>>,

    /// hilbert: the symbol (a, b)_v of two rationals p/q
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub symbol: Option<Vec<String>>,

    /// hilbert: place (prime or inf); default: every relevant place
    #[arg(long)]
    pub place: Option<String>,
}

impl RunConfig {
    /// A config for `command` with every other field at its default.
    pub fn new(command: Command) -> Self {
        RunConfig::parse_from(["fibstat", command.name()])
    }

    /// Hex SHA-256 of the canonical JSON form of the config. The thread count
    /// is not part of it.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<Validated, CliError> {
        if self.r_max > 12 {
            return Err(CliError::Config(format!("r_max = {} exceeds 12", self.r_max)));
        }
        let family = family_by_name(&self.family)
            .map_err(|_| {
                CliError::Config(format!(
                    "unknown family {:?}; known: {}",
                    self.family,
                    FAMILY_NAMES.join(", ")
                ))
            })?
            .with_depth(self.depth);
        let places = parse_places(&self.places)?;
        let bound = self.bound.unwrap_or(self.command.default_bound());
        if self.command.statistical() && bound < 3 {
            return Err(CliError::Config(format!(
                "{} needs B ≥ 3, got {bound}",
                self.command.name()
            )));
        }
        let centering: Centering = self
            .centering
            .parse()
            .map_err(|_| CliError::Config(format!("unknown centering {:?}", self.centering)))?;
        if !(0.0..=1.0).contains(&self.taint_ceiling) {
            return Err(CliError::Config("taint ceiling must lie in [0, 1]".into()));
        }
        if self.t0.is_some() != self.t1.is_some() {
            return Err(CliError::Config("give both --t0 and --t1 or neither".into()));
        }
        let threads = match self.threads {
            Some(0) => return Err(CliError::Config("threads must be positive".into())),
            Some(t) => t,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(Validated {
            family,
            places,
            bound,
            centering,
            threads,
        })
    }
}

/// Config values after parsing and checking.
#[derive(Debug, Clone)]
pub struct Validated {
    pub family: FamilyDescriptor,
    pub places: Vec<Place>,
    pub bound: u64,
    pub centering: Centering,
    pub threads: usize,
}

pub fn parse_places(s: &str) -> Result<Vec<Place>, CliError> {
    let t = s.trim();
    if t.is_empty() || t == "none" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for tok in t.split(',') {
        let p: Place = tok
            .parse()
            .map_err(|_| CliError::Config(format!("malformed place list {s:?}: bad entry {tok:?}")))?;
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        let mut c = RunConfig::new(Command::Ekac);
        c.family = "quartic".into();
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = RunConfig::new(Command::Ekac);
        c.places = "inf,4".into();
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = RunConfig::new(Command::Ekac);
        c.r_max = 13;
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = RunConfig::new(Command::Tau);
        c.bound = Some(2);
        assert!(c.validate().is_err());
    }

    #[test]
    fn places_parse() {
        assert_eq!(parse_places("none").unwrap(), vec![]);
        assert_eq!(
            parse_places("inf, 2,inf").unwrap(),
            vec![Place::Prime(2), Place::Infinity]
        );
    }

    #[test]
    fn hash_ignores_threads() {
        let mut a = RunConfig::new(Command::Ekac);
        let mut b = a.clone();
        a.threads = Some(1);
        b.threads = Some(4);
        assert_eq!(a.hash(), b.hash());
        b.seed = 7;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn parses_flags() {
        let c = RunConfig::try_parse_from([
            "fibstat", "hilbert", "--conic", "1", "-1", "21", "--place", "3",
        ])
        .unwrap();
        assert_eq!(c.conic, Some(vec![1, -1, 21]));
        let c = RunConfig::try_parse_from(["fibstat", "tau", "--family", "diagonal-cubics", "--B", "40"])
            .unwrap();
        assert_eq!(c.bound, Some(40));
    }
}
