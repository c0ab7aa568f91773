//! Subcommand implementations. Each returns the process exit code or a
//! [`Failure`] carrying one.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use serde::Serialize;

use frobenius_core::analytic::{density_p, DensityCdf, GArgs};
use frobenius_core::cf::{cf_expand, convergents, stop_index};
use frobenius_core::ensemble::{
    read_rows_csv, sample_records, summarize_rows, write_records_csv, EnsembleKind, SampleConfig,
    SampleRecord, SampleRow,
};
use frobenius_core::frobenius::{frobenius_apery, frobenius_rotation_maxmin, frobenius_sieve};
use frobenius_core::verify::{run_suite_with, CountingSetup, Suite, DEFAULT_SEED};
use frobenius_core::{Error, IntTuple, Rational, SCHEMA_TAG};

use crate::config::ConfigFile;
use crate::{
    Algorithm, CfArgs, DensityArgs, Failure, Format, FrobeniusArgs, ReportArgs, SampleArgs,
    VerifyArgs,
};

type Outcome = Result<u8, Failure>;

/// Exit code for a library error: bad input is 2, an unmet algorithm
/// precondition is 3, anything else 1.
fn classify(e: Error) -> Failure {
    match e {
        Error::Domain(_) | Error::NotCoprime { .. } | Error::EmptySample => Failure::invalid(e),
        Error::NoInverse { .. }
        | Error::ExpansionTooShort { .. }
        | Error::SieveBound { .. }
        | Error::LevelOutOfRange { .. } => Failure::precondition(e),
        _ => Failure::runtime(e),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .map_err(Failure::runtime)?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut out = open_out(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(Failure::runtime)?;
    writeln!(out).and_then(|_| out.flush()).map_err(Failure::runtime)
}

fn joined<T: ToString>(values: &[T], sep: &str) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

#[derive(Serialize)]
struct FrobeniusOutput {
    schema: u32,
    a: Vec<u64>,
    algorithm: &'static str,
    #[serde(rename = "F")]
    frobenius: i64,
    #[serde(rename = "F1")]
    f1: i64,
    t: Option<f64>,
    #[serde(rename = "N")]
    n_bound: Option<u64>,
    #[serde(rename = "fN")]
    f_n: Option<f64>,
}

pub fn frobenius(args: &FrobeniusArgs, cfg: &ConfigFile) -> Outcome {
    let algorithm = cfg.pick(args.algorithm, "algorithm", Algorithm::Auto).map_err(Failure::invalid)?;
    let format = cfg.pick(args.format, "format", Format::Text).map_err(Failure::invalid)?;
    let n_bound: Option<u64> = cfg.pick_opt(args.n_bound, "n").map_err(Failure::invalid)?;

    let a = IntTuple::new(args.generators.clone()).map_err(classify)?;
    if !a.is_coprime() {
        return Err(classify(Error::NotCoprime { gcd: a.gcd() }));
    }
    if let Some(n) = n_bound {
        if a.max() > n {
            return Err(Failure::invalid(anyhow!("component {} exceeds --n {n}", a.max())));
        }
    }
    let c = a.components();

    let start = Instant::now();
    let (name, f) = match algorithm {
        Algorithm::Apery | Algorithm::Auto => ("apery", frobenius_apery(&a).map_err(classify)?),
        Algorithm::Sieve => ("sieve", frobenius_sieve(&a, None).map_err(classify)?),
        Algorithm::Rotation => {
            if c.len() != 3 {
                return Err(Failure::precondition(anyhow!(
                    "the rotation algorithm needs exactly three generators"
                )));
            }
            let opt = frobenius_rotation_maxmin(c[0], c[1], c[2]).map_err(Failure::precondition)?;
            ("rotation", opt.frobenius(c[2]))
        }
    };
    let elapsed = start.elapsed();

    let t = (c.len() == 3).then(|| f as f64 / (c[0] as f64 * c[1] as f64 * c[2] as f64).sqrt());
    let f_n = match (n_bound, c.len()) {
        (Some(n), len) if len >= 2 => Some(f as f64 / (n as f64).powf(1.0 + 1.0 / (len as f64 - 1.0))),
        _ => None,
    };
    let output = FrobeniusOutput {
        schema: 1,
        a: c.to_vec(),
        algorithm: name,
        frobenius: f,
        f1: f + *c.last().unwrap() as i64,
        t,
        n_bound,
        f_n,
    };

    let mut out = open_out(None)?;
    let written = match format {
        Format::Json => serde_json::to_writer_pretty(&mut out, &output)
            .map_err(io::Error::from)
            .and_then(|_| writeln!(out)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["a", "algorithm", "F", "F1", "t", "fN"])
                .and_then(|_| {
                    w.write_record([
                        joined(c, " "),
                        name.to_string(),
                        f.to_string(),
                        output.f1.to_string(),
                        t.map_or(String::new(), |v| v.to_string()),
                        f_n.map_or(String::new(), |v| v.to_string()),
                    ])
                })
                .and_then(|_| w.flush().map_err(csv::Error::from))
                .map_err(io::Error::from)
        }
        Format::Text => {
            let mut text = format!("a = {}\nalgorithm = {name}\nF = {f}\nF1 = {}\n", joined(c, " "), output.f1);
            if let Some(t) = t {
                text.push_str(&format!("t = {t}\n"));
            }
            if let (Some(n), Some(v)) = (n_bound, f_n) {
                text.push_str(&format!("fN = {v} (N = {n})\n"));
            }
            out.write_all(text.as_bytes())
        }
    };
    written.and_then(|_| out.flush()).map_err(Failure::runtime)?;
    eprintln!("elapsed: {:.6}s", elapsed.as_secs_f64());
    Ok(0)
}

fn parse_prefix(flag: Option<&Vec<u64>>, cfg: &ConfigFile) -> Result<Vec<u64>, Failure> {
    if let Some(p) = flag {
        return Ok(p.clone());
    }
    match cfg.get::<String>("prefix").map_err(Failure::invalid)? {
        None => Ok(Vec::new()),
        Some(text) => text
            .split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|e| Failure::invalid(anyhow!("prefix entry {s:?}: {e}"))))
            .collect(),
    }
}

pub fn sample(args: &SampleArgs, cfg: &ConfigFile) -> Outcome {
    let bad = Failure::invalid;
    let n_bound = cfg.pick(args.n_bound, "n", 4000u64).map_err(bad)?;
    let count = cfg.pick(args.count, "count", 10_000usize).map_err(bad)?;
    let seed = cfg.pick(args.seed, "seed", 1u64).map_err(bad)?;
    let window = cfg.pick(args.window, "window", 2usize).map_err(bad)?;
    let format = cfg.pick(args.format, "format", Format::Csv).map_err(bad)?;
    let ensemble: EnsembleKind = cfg
        .pick(args.ensemble.clone(), "ensemble", "QN".to_string())
        .map_err(bad)?
        .parse()
        .map_err(classify)?;
    let prefix = parse_prefix(args.prefix.as_ref(), cfg)?;

    let mut config = SampleConfig::new(n_bound, count, seed)
        .with_ensemble(ensemble)
        .with_window(window);
    if !prefix.is_empty() {
        config = config.with_prefix(prefix);
    }
    config.validate().map_err(classify)?;

    let records = sample_records(&config, !args.cf_only).map_err(|e| match e {
        Error::LowAcceptance { .. } => Failure::invalid(e),
        e => classify(e),
    })?;
    match format {
        Format::Json => write_json(args.out.as_deref(), &summary(&records)?)?,
        Format::Csv | Format::Text => {
            let mut out = open_out(args.out.as_deref())?;
            write_records_csv(&mut out, &records).map_err(Failure::runtime)?;
            out.flush().map_err(Failure::runtime)?;
            if let Some(path) = &args.summary {
                write_json(Some(path), &summary(&records)?)?;
            }
        }
    }
    Ok(0)
}

fn summary(records: &[SampleRecord]) -> Result<frobenius_core::ensemble::SampleSummary, Failure> {
    let rows: Vec<SampleRow> = records.iter().map(SampleRow::from).collect();
    summarize_rows(&rows).map_err(classify)
}

#[derive(Serialize)]
struct CfOutput {
    num: u64,
    den: u64,
    quotients: Vec<u64>,
    p: Vec<u64>,
    q: Vec<u64>,
    radius: Option<f64>,
    stop_index: Option<usize>,
    window_start: Option<usize>,
    window: Option<Vec<u64>>,
}

fn parse_rational(text: &str) -> Result<Rational, Failure> {
    let (num, den) = text
        .split_once('/')
        .ok_or_else(|| Failure::invalid(anyhow!("expected num/den, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|e| Failure::invalid(anyhow!("{s:?} in {text:?}: {e}")))
    };
    Rational::new(parse(num)?, parse(den)?).map_err(classify)
}

pub fn cf(args: &CfArgs, cfg: &ConfigFile) -> Outcome {
    let radius: Option<f64> = cfg.pick_opt(args.radius, "radius").map_err(Failure::invalid)?;
    let window = cfg.pick(args.window, "window", 2usize).map_err(Failure::invalid)?;
    let format = cfg.pick(args.format, "format", Format::Text).map_err(Failure::invalid)?;
    let x = parse_rational(&args.value)?;
    let expansion = cf_expand(x).map_err(classify)?;
    let table = convergents(&expansion);

    let stop = radius.map(|r| stop_index(&table, r)).transpose().map_err(classify)?;
    let (window_start, window_values) = match stop {
        Some(s) if s > 0 => {
            let (start, values) = expansion.window(s, window);
            (Some(start), Some(values))
        }
        _ => (None, None),
    };
    let output = CfOutput {
        num: x.num(),
        den: x.den(),
        quotients: expansion.quotients().to_vec(),
        p: table.p.clone(),
        q: table.q.clone(),
        radius,
        stop_index: stop,
        window_start,
        window: window_values,
    };

    match format {
        Format::Json => write_json(None, &output)?,
        Format::Csv => {
            let mut out = open_out(None)?;
            let mut w = csv::Writer::from_writer(&mut out);
            let mut rows = vec![["s".to_string(), "h".into(), "p".into(), "q".into()]];
            for s in 0..output.q.len() {
                let h = s.checked_sub(1).map_or(String::new(), |i| output.quotients[i].to_string());
                rows.push([s.to_string(), h, output.p[s].to_string(), output.q[s].to_string()]);
            }
            rows.iter()
                .try_for_each(|r| w.write_record(r))
                .and_then(|_| w.flush().map_err(csv::Error::from))
                .map_err(Failure::runtime)?;
        }
        Format::Text => {
            let mut text = format!(
                "{}/{} = [{}]\np = {}\nq = {}\n",
                output.num,
                output.den,
                joined(&output.quotients, ", "),
                joined(&output.p, " "),
                joined(&output.q, " ")
            );
            if let (Some(r), Some(s)) = (radius, stop) {
                text.push_str(&format!("stop index (first q_s >= {r}) = {s}, q_s = {}\n", output.q[s]));
            }
            if let (Some(start), Some(values)) = (window_start, &output.window) {
                text.push_str(&format!("window from h_{start} = {}\n", joined(values, " ")));
            }
            let mut out = open_out(None)?;
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(Failure::runtime)?;
        }
    }
    Ok(0)
}

/// Grid points `from + k step` plus the branch points `sqrt 3` and `2` when
/// they fall in range; points closer than `1e-9` are merged.
pub fn density_grid(from: f64, to: f64, step: f64) -> anyhow::Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) {
        anyhow::bail!("grid bounds and step must be finite");
    }
    if from < 0.0 || to < from || step <= 0.0 {
        anyhow::bail!("need 0 <= from <= to and step > 0 (got {from}, {to}, {step})");
    }
    let steps = ((to - from) / step + 1e-9).floor();
    if steps > 1e7 {
        anyhow::bail!("grid would have more than 10^7 points");
    }
    let mut grid: Vec<f64> = (0..=steps as u64).map(|k| from + k as f64 * step).collect();
    grid.extend([3f64.sqrt(), 2.0].into_iter().filter(|&b| (from..=to).contains(&b)));
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|b, a| (*b - *a).abs() < 1e-9);
    Ok(grid)
}

#[derive(Serialize)]
struct DensityRow {
    t: f64,
    p: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct DensityTable {
    schema: u32,
    rows: Vec<DensityRow>,
}

pub fn density(args: &DensityArgs, cfg: &ConfigFile) -> Outcome {
    let bad = Failure::invalid;
    let from = cfg.pick(args.from, "from", 0.0).map_err(bad)?;
    let to = cfg.pick(args.to, "to", 5.0).map_err(bad)?;
    let step = cfg.pick(args.step, "step", 0.01).map_err(bad)?;
    let format = cfg.pick(args.format, "format", Format::Csv).map_err(bad)?;
    let grid = density_grid(from, to, step).map_err(bad)?;

    let cdf = DensityCdf::new();
    let rows: Vec<DensityRow> = grid
        .iter()
        .map(|&t| DensityRow { t, p: density_p(t), cdf: cdf.eval(t) })
        .collect();
    match format {
        Format::Json => write_json(args.out.as_deref(), &DensityTable { schema: 1, rows })?,
        Format::Csv | Format::Text => {
            let mut out = open_out(args.out.as_deref())?;
            writeln!(out, "# {SCHEMA_TAG}").map_err(Failure::runtime)?;
            let mut w = csv::Writer::from_writer(&mut out);
            rows.iter()
                .try_for_each(|r| w.serialize(r))
                .and_then(|_| w.flush().map_err(csv::Error::from))
                .map_err(Failure::runtime)?;
            drop(w);
            out.flush().map_err(Failure::runtime)?;
        }
    }
    Ok(0)
}

pub fn verify(args: &VerifyArgs, cfg: &ConfigFile) -> Outcome {
    let bad = Failure::invalid;
    let suite: Suite = args.target.parse().map_err(classify)?;
    let seed = cfg.pick(args.seed, "seed", DEFAULT_SEED).map_err(bad)?;
    let coords = [
        cfg.pick_opt(args.x1, "x1").map_err(bad)?,
        cfg.pick_opt(args.x2, "x2").map_err(bad)?,
        cfg.pick_opt(args.y1, "y1").map_err(bad)?,
        cfg.pick_opt(args.y2, "y2").map_err(bad)?,
    ];
    let given = coords.iter().filter(|c| c.is_some()).count();
    let setup_args = match given {
        0 => None,
        4 => {
            let [x1, x2, y1, y2] = coords.map(Option::unwrap);
            GArgs::new(x1, x2, y1, y2).map_err(classify)?;
            Some([x1, x2, y1, y2])
        }
        _ => return Err(bad(anyhow!("--x1, --x2, --y1 and --y2 must be given together"))),
    };
    let radius: Option<f64> = cfg.pick_opt(args.radius, "radius").map_err(bad)?;
    if let Some(r) = radius {
        if !(r.is_finite() && r > 1.0) {
            return Err(bad(anyhow!("--radius must be finite and greater than 1")));
        }
    }
    let z: Option<f64> = cfg.pick_opt(args.z, "z").map_err(bad)?;
    if let Some(z) = z {
        if !(z > 0.0 && z <= 1.0) {
            return Err(bad(anyhow!("--z must lie in (0, 1]")));
        }
    }
    let out = cfg.pick_opt(args.out.clone(), "out").map_err(bad)?;

    let setup = CountingSetup { args: setup_args, radius, z };
    let report = run_suite_with(suite, seed, &setup).map_err(classify)?;
    write_json(out.as_deref(), &report)?;
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    eprintln!(
        "{}: {} of {} checks passed",
        report.suite,
        report.checks.len() - failed,
        report.checks.len()
    );
    Ok(if report.pass { 0 } else { 1 })
}

pub fn report(args: &ReportArgs) -> Outcome {
    let file = File::open(&args.input)
        .with_context(|| format!("opening {}", args.input.display()))
        .map_err(Failure::invalid)?;
    let rows = read_rows_csv(file).map_err(Failure::invalid)?;
    let summary = summarize_rows(&rows).map_err(classify)?;
    write_json(args.out.as_deref(), &summary)?;
    Ok(0)
}
