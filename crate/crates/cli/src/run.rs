use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_rational::Ratio;
use serde::Serialize;

use fibstat_core::families::{local_insoluble_density, FamilyDescriptor, FamilyKind};
use fibstat_core::grouptheory::{delta, delta_total, parse_actions, DivisorAction};
use fibstat_core::localsolve::{
    conic_soluble, hilbert, relevant_places, Place, Rational,
};
use fibstat_core::par;
use fibstat_core::projective::{c_n, count_points, fold_points};
use fibstat_core::stats::{
    baseline_report, ks_statistic, moments_from_tally, n_moments_tally, omega_table,
    sample_fold, scan_fold, sigma_partial_sums, standardized_values, tau_limit_prediction,
    truncated_moments_from_tally, Centering, DensitySource, Histogram, OmegaTally, ScanSummary,
    SigmaEntry, SigmaTable, TauHistogram, TruncationWindow, MIN_HEIGHT, RNG_NAME,
};

use crate::config::{Command, DensityMode, Format, RunConfig, Validated};
use crate::error::CliError;
use crate::output::{table_path, Artifacts, FamilyInfo, Manifest};
use crate::report::*;
use crate::SCHEMA;

/// Bundled action documents, by name.
pub const BUNDLED_ACTIONS: [(&str, &str); 4] = [
    ("trivial", include_str!("../data/trivial.actions")),
    ("conic-line-pair", include_str!("../data/conic-line-pair.actions")),
    ("genus1-double-fibre", include_str!("../data/genus1-double-fibre.actions")),
    ("diagonal-conics", include_str!("../data/diagonal-conics.actions")),
];

/// Above this many expected points `ekac` samples instead of enumerating.
const EXHAUSTIVE_LIMIT: f64 = 4.0e6;
const AUTO_SAMPLES: u64 = 1_000_000;
pub const HISTOGRAM_BINS: usize = 41;

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
    /// Human-readable summary lines.
    pub lines: Vec<String>,
    /// Set when the run completed but must report a nonzero status.
    pub error: Option<CliError>,
}

struct Ctx<'a> {
    config: &'a RunConfig,
    v: &'a Validated,
    artifacts: Artifacts,
    comments: Vec<String>,
    lines: Vec<String>,
    notes: Vec<String>,
    tainted_fraction: Option<f64>,
    samples: Option<u64>,
    window: Option<[f64; 2]>,
}

impl Ctx<'_> {
    fn table<R: Serialize + Clone>(&mut self, name: &str, rows: &[R]) {
        let command = self.config.command.name();
        let (bytes, ext) = match self.config.format {
            Format::Csv => (to_csv(command, &self.comments, rows), "csv"),
            Format::Json => (to_json(command, &self.comments, rows), "json"),
        };
        self.artifacts
            .add(table_path(&self.config.output, name, ext), bytes);
    }

    fn say(&mut self, line: String) {
        self.lines.push(line);
    }
}

fn places_text(places: &[Place]) -> Vec<String> {
    places.iter().map(|p| p.to_string()).collect()
}

fn summary(pairs: Vec<(&str, String)>) -> Vec<SummaryRow> {
    pairs
        .into_iter()
        .map(|(k, v)| SummaryRow {
            key: k.to_string(),
            value: v,
        })
        .collect()
}

fn u64_ratio_f64(q: &Ratio<u64>) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Runs one command. Config errors are returned before anything is written;
/// a run that finishes writes all of its files or none of them.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let v = config.validate()?;
    let start = Instant::now();
    let mut ctx = Ctx {
        config,
        v: &v,
        artifacts: Artifacts::default(),
        comments: vec![
            format!("family={}", v.family.name()),
            format!("B={}", v.bound),
            format!("S={}", places_text(&v.places).join(",")),
            format!("seed={}", config.seed),
        ],
        lines: Vec::new(),
        notes: Vec::new(),
        tainted_fraction: None,
        samples: None,
        window: None,
    };
    par::with_threads(v.threads, || dispatch(&mut ctx))?;

    let mut error = None;
    if let Some(f) = ctx.tainted_fraction {
        if f > config.taint_ceiling {
            error = Some(CliError::Taint {
                fraction: f,
                ceiling: config.taint_ceiling,
            });
        }
    }
    let exit_code = error.as_ref().map_or(0, |e| e.exit_code());
    let manifest_path = table_path(&config.output, "manifest", "json");
    let mut outputs: Vec<String> = ctx
        .artifacts
        .paths()
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    outputs.push(manifest_path.display().to_string());
    let f = &v.family;
    let manifest = Manifest {
        schema: format!("{SCHEMA} {}", config.command.name()),
        command: config.command.name().into(),
        family: FamilyInfo {
            name: f.name().into(),
            n: f.n(),
            bad_bound: f.bad_bound(),
            delta: f.delta().to_string(),
            depth: f.depth(),
        },
        bound: v.bound,
        places: places_text(&v.places),
        centering: (config.command == Command::Ekac).then(|| v.centering.to_string()),
        window: ctx.window,
        seed: config.seed,
        rng: RNG_NAME.into(),
        threads: v.threads,
        samples: ctx.samples,
        tainted_fraction: ctx.tainted_fraction,
        config_hash: config.hash(),
        config: serde_json::to_value(config).expect("config serializes"),
        outputs,
        notes: ctx.notes.clone(),
        exit_code,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    ctx.artifacts.add(manifest_path, manifest.to_bytes());
    let files = ctx.artifacts.commit()?;
    Ok(RunOutcome {
        exit_code,
        files,
        manifest,
        lines: ctx.lines,
        error,
    })
}

fn dispatch(ctx: &mut Ctx) -> Result<(), CliError> {
    match ctx.config.command {
        Command::Enumerate => enumerate(ctx),
        Command::Sigma => sigma(ctx),
        Command::Ekac => ekac(ctx),
        Command::Tau => tau(ctx),
        Command::Delta => delta_cmd(ctx),
        Command::Hilbert => hilbert_cmd(ctx),
        Command::Baseline => baseline(ctx),
    }
}

fn enumerate(ctx: &mut Ctx) -> Result<(), CliError> {
    let f = &ctx.v.family;
    let (n, b) = (f.n(), ctx.v.bound);
    let count = count_points(n, b)?;
    let smooth = fold_points(
        n,
        b,
        || 0u64,
        |acc, x| *acc += f.smooth(&x) as u64,
        |a, b| a + b,
    )?;
    if smooth > count {
        return Err(CliError::Invariant("more smooth points than points".into()));
    }
    let row = EnumerateRow {
        n,
        bound: b,
        count,
        normalized: count as f64 / (b as f64).powi(n as i32 + 1),
        c_n: c_n(n),
        smooth,
    };
    ctx.say(format!(
        "#P^{n}(Q)[H ≤ {b}] = {count}; count/B^{} = {:.6} (c_n = {:.6}); smooth fibres: {smooth}",
        n + 1,
        row.normalized,
        row.c_n
    ));
    ctx.table("enumerate", &[row]);
    Ok(())
}

/// Exact local insoluble densities as a σ table, for Δ = 0 families.
fn density_table(family: &FamilyDescriptor, limit: u64) -> Result<SigmaTable, CliError> {
    let mut m = std::collections::BTreeMap::new();
    for p in fibstat_core::arith::primes_up_to(limit) {
        let d = local_insoluble_density(family, p)?;
        let q = &d.insoluble;
        let (num, den) = (u64::try_from(*q.numer()), u64::try_from(*q.denom()));
        let entry = match (num, den) {
            (Ok(a), Ok(b)) => SigmaEntry::Exact(Ratio::new(a, b)),
            _ => SigmaEntry::Estimate {
                value: d.value(),
                std_error: 0.0,
                samples: 0,
            },
        };
        m.insert(p, entry);
    }
    Ok(SigmaTable::new(m))
}

fn sigma(ctx: &mut Ctx) -> Result<(), CliError> {
    let f = ctx.v.family.clone();
    let limit = ctx.v.bound;
    let delta = u64_ratio_f64(&f.delta());
    let table = match f.kind() {
        FamilyKind::DiagonalConics => SigmaTable::exact(&f, limit)?,
        FamilyKind::DiagonalCubics => {
            ctx.notes.push(
                "diagonal-cubics: the table lists the exact local insoluble densities; \
                 Δ = 0 so there is no β fit"
                    .into(),
            );
            density_table(&f, limit)?
        }
    };
    let rows = sigma_rows(&table);
    let last = rows.last().map_or(0.0, |r| r.partial_sum);
    ctx.say(format!(
        "{} primes ≤ {limit}; Σ σ_p = {last:.6}",
        rows.len()
    ));
    ctx.table("sigma", &rows);
    if delta > 0.0 {
        let fit = sigma_partial_sums(&table, delta)?;
        ctx.say(format!(
            "β = {:.6} (upper half {:.6}, spread {:.6}); free slope {:.6} vs Δ = {delta}",
            fit.beta, fit.beta_upper, fit.upper_half_spread, fit.slope
        ));
        let beta_rows: Vec<BetaRow> = fit
            .rows
            .iter()
            .map(|&(x, s, r, i)| BetaRow {
                x,
                partial_sum: s,
                residual: r,
                inv_log_x: i,
            })
            .collect();
        ctx.table("beta", &beta_rows);
        ctx.table(
            "fit",
            &summary(vec![
                ("delta", delta.to_string()),
                ("beta", fit.beta.to_string()),
                ("beta_upper", fit.beta_upper.to_string()),
                ("upper_half_spread", fit.upper_half_spread.to_string()),
                ("slope", fit.slope.to_string()),
                ("intercept", fit.intercept.to_string()),
            ]),
        );
    }
    Ok(())
}

/// (height, ω, ω in the truncation window) of an untainted record.
type EkacPoint = (u64, u32, u32);

fn ekac(ctx: &mut Ctx) -> Result<(), CliError> {
    let f = ctx.v.family.clone();
    let b = ctx.v.bound;
    let delta = u64_ratio_f64(&f.delta());
    if delta <= 0.0 {
        return Err(CliError::Config(format!(
            "ekac needs Δ > 0; {} has Δ = 0 (use tau)",
            f.name()
        )));
    }
    let centering = ctx.v.centering;
    let window = match (centering, ctx.config.t0, ctx.config.t1) {
        (Centering::Truncated, Some(t0), Some(t1)) => {
            Some(TruncationWindow::custom(b, ctx.config.r_max.max(1), t0, t1)?)
        }
        (Centering::Truncated, _, _) => Some(
            TruncationWindow::standard(b, ctx.config.r_max.max(1), f.n()).map_err(|e| {
                CliError::Config(format!("{e}; give the window with --t0 and --t1"))
            })?,
        ),
        _ => None,
    };
    ctx.window = window.map(|w| [w.t0, w.t1]);
    let sigma = match centering {
        Centering::LogLog => None,
        _ => Some(SigmaTable::exact(&f, b)?),
    };

    let expected = c_n(f.n()) * (b as f64).powi(f.n() as i32 + 1);
    let samples = match ctx.config.samples {
        Some(0) => None,
        Some(s) => Some(s),
        None if expected <= EXHAUSTIVE_LIMIT => None,
        None => Some(AUTO_SAMPLES),
    };
    ctx.samples = samples;
    let w = window;
    let fold = move |acc: &mut Vec<EkacPoint>, r: &fibstat_core::stats::ObstructionRecord| {
        let h = r.point.height();
        if !r.tainted && h >= MIN_HEIGHT {
            let wc = w.map_or(0, |w| fibstat_core::stats::window_count(r, &w));
            acc.push((h, r.omega as u32, wc));
        }
    };
    let merge = |mut a: Vec<EkacPoint>, mut b: Vec<EkacPoint>| {
        a.append(&mut b);
        a
    };
    let places = ctx.v.places.clone();
    let (scan, points): (ScanSummary, Vec<EkacPoint>) = match samples {
        None => scan_fold(&f, b, &places, Vec::new, fold, merge)?,
        Some(s) => sample_fold(&f, b, &places, s, ctx.config.seed, Vec::new, fold, merge)?,
    };
    let tainted_fraction = scan.tainted as f64 / scan.point_count.max(1) as f64;
    ctx.tainted_fraction = Some(tainted_fraction);

    let mut tally = OmegaTally::new();
    let mut wtally = OmegaTally::new();
    for &(_, om, wc) in &points {
        tally.add_omega(om as usize);
        wtally.add_omega(wc as usize);
    }
    let mut moment_rows = Vec::new();
    for r in 0..=ctx.config.r_max {
        let m = match (&window, &sigma) {
            (Some(w), Some(s)) => truncated_moments_from_tally(&wtally, b, delta, w, s, r)?,
            _ => moments_from_tally(&tally, b, delta, r, centering, sigma.as_ref())?,
        };
        moment_rows.push(MomentRow::from(&m));
    }

    let ks_centering = match centering {
        Centering::LogLog => Centering::LogLog,
        _ => Centering::Empirical,
    };
    if centering == Centering::Truncated {
        ctx.notes
            .push("KS and histogram use empirical centring; moments use the truncated count".into());
    }
    let pairs: Vec<(u64, u32)> = points.iter().map(|&(h, om, _)| (h, om)).collect();
    let mut z = standardized_values(&pairs, delta, ks_centering, sigma.as_ref())?;
    let hist = Histogram::new(&z, HISTOGRAM_BINS, -5.0, 5.0);
    if z.len() < 100 {
        return Err(CliError::Config(format!(
            "KS needs at least 100 records, have {}",
            z.len()
        )));
    }
    let ks = ks_statistic(&mut z);

    let m1 = moment_rows.get(1).map_or(f64::NAN, |m| m.value);
    let m2 = moment_rows.get(2).map_or(f64::NAN, |m| m.value);
    ctx.say(format!(
        "{} records (B = {b}, {}): m1 = {m1:.4}, m2 = {m2:.4}, KS = {ks:.4}, tainted = {tainted_fraction:.2e}",
        points.len(),
        match samples {
            Some(s) => format!("{s} samples"),
            None => "exhaustive".into(),
        }
    ));
    ctx.table("moments", &moment_rows);
    ctx.table("histogram", &histogram_rows(&hist));
    ctx.table(
        "summary",
        &summary(vec![
            ("bound", b.to_string()),
            ("mode", if samples.is_some() { "sampled" } else { "exhaustive" }.into()),
            ("point_count", scan.point_count.to_string()),
            ("singular", scan.singular.to_string()),
            ("tainted", scan.tainted.to_string()),
            ("records", points.len().to_string()),
            ("centering", centering.to_string()),
            ("ks_centering", ks_centering.to_string()),
            ("ks", ks.to_string()),
            ("tainted_fraction", tainted_fraction.to_string()),
        ]),
    );
    Ok(())
}

fn tau(ctx: &mut Ctx) -> Result<(), CliError> {
    let f = ctx.v.family.clone();
    let b = ctx.v.bound;
    let places = ctx.v.places.clone();
    let (scan, tally) = scan_fold(
        &f,
        b,
        &places,
        OmegaTally::new,
        |t, r| t.add(r),
        |a, b| a.merge(b),
    )?;
    let h = TauHistogram::new(&scan, &tally).map_err(|e| CliError::Invariant(e.to_string()))?;
    ctx.tainted_fraction = Some(h.tainted_fraction());
    let mut moments = Vec::new();
    for r in 1..=3u32 {
        let direct = n_moments_tally(&tally, r)?;
        if direct != h.moment(r) {
            return Err(CliError::Invariant(format!(
                "moment identity fails at r = {r}: {direct} ≠ {}",
                h.moment(r)
            )));
        }
        moments.push((r, direct));
    }
    let rows = tau_rows(&h);
    ctx.say(format!(
        "{} points of height ≤ {b}: {} singular, {} tainted; Σ τ(j) = {} (untainted smooth fraction)",
        h.point_count,
        h.singular,
        h.tainted_count,
        h.total_mass()
    ));
    for r in &rows {
        ctx.say(format!("τ({}) = {} ≈ {:.6}", r.j, Ratio::new(r.mass_num, r.mass_den), r.mass));
    }
    ctx.table("tau", &rows);
    let mut sum = vec![
        ("bound", b.to_string()),
        ("point_count", h.point_count.to_string()),
        ("singular", h.singular.to_string()),
        ("tainted", h.tainted_count.to_string()),
        ("untainted", h.untainted().to_string()),
        ("total_mass", h.total_mass().to_string()),
        ("tainted_fraction", h.tainted_fraction().to_string()),
    ];
    let names = ["n_moment_1", "n_moment_2", "n_moment_3"];
    for (name, (_, m)) in names.iter().zip(&moments) {
        sum.push((name, m.to_string()));
    }
    ctx.table("summary", &summary(sum));

    if *f.delta().numer() == 0 {
        let cutoff = ctx.config.prime_cutoff;
        let source = match ctx.config.density {
            // limit densities use the default depth, not the scan override
            DensityMode::Exact => DensitySource::exact(&f.clone().with_depth(None), cutoff)?,
            DensityMode::Empirical => DensitySource::empirical(
                &f,
                cutoff,
                ctx.config.density_samples,
                ctx.config.depth.unwrap_or(4),
                ctx.config.seed,
            )?,
        };
        let jmax = rows.len().max(4) - 1;
        let mut preds = Vec::new();
        for j in 0..=jmax {
            let p = tau_limit_prediction(&f, j, cutoff, &source)?;
            preds.push(PredictionRow::from(&p));
        }
        for p in &preds {
            ctx.say(format!(
                "prediction τ({}) = {:.6} ± {:.2e} (primes ≤ {}, tail ≤ {:.3})",
                p.j, p.prediction, p.std_error, p.prime_cutoff, p.tail_bound
            ));
        }
        ctx.table("prediction", &preds);
    } else {
        ctx.notes
            .push("Δ > 0: no τ limit prediction (ω grows like Δ log log B)".into());
    }
    Ok(())
}

fn delta_cmd(ctx: &mut Ctx) -> Result<(), CliError> {
    let (source, divisors): (String, Vec<DivisorAction>) =
        match (&ctx.config.actions, &ctx.config.bundled) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config("give --actions or --bundled, not both".into()))
            }
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                (path.display().to_string(), parse_actions(&text)?)
            }
            (None, Some(name)) => {
                let text = BUNDLED_ACTIONS
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, t)| *t)
                    .ok_or_else(|| {
                        let known: Vec<&str> = BUNDLED_ACTIONS.iter().map(|(n, _)| *n).collect();
                        CliError::Config(format!(
                            "unknown bundled action file {name:?}; known: {}",
                            known.join(", ")
                        ))
                    })?;
                (format!("bundled:{name}"), parse_actions(text)?)
            }
            (None, None) => (
                format!("family:{}", ctx.v.family.name()),
                ctx.v.family.divisor_actions(),
            ),
        };
    ctx.comments.push(format!("source={source}"));
    let mut rows = Vec::new();
    for d in &divisors {
        let q = delta(&d.action);
        ctx.say(format!("δ({}) = {q}", d.name));
        rows.push(DeltaRow::new(&d.name, q));
    }
    let actions: Vec<_> = divisors.into_iter().map(|d| d.action).collect();
    let total = delta_total(&actions);
    ctx.say(format!("Δ = {total}"));
    rows.push(DeltaRow::new("Delta", total));
    ctx.table("delta", &rows);
    Ok(())
}

fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let bad = || CliError::Config(format!("cannot parse rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        ),
        None => (s.trim().parse().map_err(|_| bad())?, 1),
    };
    Ok(Rational::new(n, d)?)
}

fn hilbert_cmd(ctx: &mut Ctx) -> Result<(), CliError> {
    let place = match &ctx.config.place {
        Some(s) => Some(
            s.parse::<Place>()
                .map_err(|e| CliError::Config(e.to_string()))?,
        ),
        None => None,
    };
    let mut rows = Vec::new();
    match (&ctx.config.conic, &ctx.config.symbol) {
        (Some(c), None) => {
            let (a, b, cc) = (c[0], c[1], c[2]);
            if a == 0 || b == 0 || cc == 0 {
                return Err(CliError::Config("conic coefficients must be nonzero".into()));
            }
            let places = match place {
                Some(p) => vec![p],
                None => relevant_places(Rational::from(a * cc), Rational::from(b * cc)),
            };
            let query = format!("conic {a} {b} {cc}");
            for v in places {
                let ok = conic_soluble(a, b, cc, v)?;
                let verdict = if ok { "soluble" } else { "insoluble" };
                ctx.say(format!("{a}x² + {b}y² = {cc}z² over Q_{v}: {verdict}"));
                rows.push(HilbertRow {
                    query: query.clone(),
                    place: v.to_string(),
                    value: ok as i8,
                    verdict: verdict.into(),
                });
            }
        }
        (None, Some(s)) => {
            let (a, b) = (parse_rational(&s[0])?, parse_rational(&s[1])?);
            let places = match place {
                Some(p) => vec![p],
                None => relevant_places(a, b),
            };
            let query = format!("symbol {} {}", s[0], s[1]);
            let mut product = 1i8;
            for v in places {
                let h = hilbert(a, b, v)?;
                product *= h;
                ctx.say(format!("({}, {})_{v} = {h}", s[0], s[1]));
                rows.push(HilbertRow {
                    query: query.clone(),
                    place: v.to_string(),
                    value: h,
                    verdict: if h == 1 { "+1" } else { "-1" }.into(),
                });
            }
            if place.is_none() && product != 1 {
                return Err(CliError::Invariant(format!(
                    "Hilbert reciprocity fails for {query}"
                )));
            }
        }
        _ => {
            return Err(CliError::Config(
                "hilbert needs exactly one of --conic A B C or --symbol A B".into(),
            ))
        }
    }
    ctx.table("hilbert", &rows);
    Ok(())
}

fn baseline(ctx: &mut Ctx) -> Result<(), CliError> {
    let n = ctx.v.bound;
    if n < 1000 {
        return Err(CliError::Config("baseline needs B ≥ 1000".into()));
    }
    if n > 2_000_000_000 {
        return Err(CliError::Config("baseline is limited to B ≤ 2·10^9".into()));
    }
    let omega = omega_table(n);
    let mut limits = Vec::new();
    let mut l = 1000u64;
    while l <= n {
        limits.push(l);
        l = match l.checked_mul(10) {
            Some(x) => x,
            None => break,
        };
    }
    if limits.last() != Some(&n) {
        limits.push(n);
    }
    let mut rows = Vec::new();
    for &l in &limits {
        let r = BaselineRow::from(&baseline_report(&omega, l));
        ctx.say(format!(
            "N = {}: m1 = {:.4}, m2 = {:.4}, KS = {:.4}",
            r.limit, r.first_moment, r.second_moment, r.ks
        ));
        rows.push(r);
    }
    ctx.table("baseline", &rows);
    Ok(())
}
