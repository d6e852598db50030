//! `kstab` command line: `compute`, `verify` and `search`.
//!
//! Exit codes: 0 success, 1 invalid input, 2 not stabilized or exponent too
//! small, 3 an exact identity or cross-pipeline check failed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::{self, Cache};
use crate::error::Error;
use crate::exact;
use crate::flag::FlagIdeal;
use crate::io::{self, Format, Job};
use crate::lab::{self, CandidateResult};
use crate::lattice::{library, PolarizedToricVariety};
use crate::poly::fit_polynomial;
use crate::report::{self, DfReport, Pipeline};
use crate::weight::{self, CountingFit, CountingResult, FitOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Environment variable overriding the job's `workers` key.
pub const WORKERS_ENV: &str = "KSTAB_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "kstab", version, about = "Exact Donaldson-Futaki invariants of toric flag-ideal configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the invariant of one configuration.
    Compute {
        /// Job file; reads stdin when omitted or `-`.
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Ignore `cache_dir` for this run.
        #[arg(long)]
        no_cache: bool,
    },
    /// Run the exact identity checks.
    Verify {
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Bounded search for destabilizing flag ideals.
    Search {
        input: Option<PathBuf>,
        /// Append one JSON line per evaluation; an existing file is resumed.
        #[arg(long)]
        stream: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let (input, format) = match &cli.command {
        Command::Compute { input, format, .. } | Command::Verify { input, format } | Command::Search { input, format, .. } => {
            (input.clone(), *format)
        }
    };
    let job = match read_input(input.as_deref(), stdin).and_then(|t| Job::from_json(&t)) {
        Ok(j) => j,
        Err(e) => return fail(&e, stdout, stderr),
    };
    let format = match format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Table) => Format::Table,
        None => job.format,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers(&job)).build() {
        Ok(p) => p,
        Err(e) => return fail(&Error::InvalidInput(format!("thread pool: {e}")), stdout, stderr),
    };
    // the pool needs Send closures, so output is buffered
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = pool.install(|| match cli.command {
        Command::Compute { no_cache, .. } => cmd_compute(&job, format, no_cache, &mut out, &mut err),
        Command::Verify { .. } => cmd_verify(&job, format, &mut out, &mut err),
        Command::Search { stream, .. } => cmd_search(&job, format, stream.as_deref(), &mut out, &mut err),
    });
    let _ = stdout.write_all(&out).and_then(|_| stdout.flush());
    let _ = stderr.write_all(&err);
    code
}

fn workers(job: &Job) -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|w| w.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .or(job.workers)
        .unwrap_or(0)
}

fn read_input(path: Option<&Path>, stdin: &mut dyn Read) -> Result<String, Error> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            stdin.read_to_string(&mut s).map_err(|e| Error::InvalidInput(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn error_payload(e: &Error) -> Value {
    let mut err = json!({"kind": e.kind(), "message": e.to_string()});
    if let Error::NotStabilized(ns) = e {
        err["K_range"] = json!([ns.k_range.0, ns.k_range.1]);
        err["quasi_period"] = json!(ns.quasi_period);
    }
    json!({ "error": err })
}

fn fail(e: &Error, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let _ = write!(stdout, "{}", io::to_json(&error_payload(e)));
    let _ = writeln!(stderr, "kstab: {e}");
    e.exit_code()
}

fn emit<T: Serialize>(value: &T, format: Format, table: impl FnOnce() -> String, stdout: &mut dyn Write) {
    let _ = match format {
        Format::Json => write!(stdout, "{}", io::to_json(value)),
        Format::Table => write!(stdout, "{}", table()),
    };
}

/// Counting fit for one exponent, through the cache when configured.
fn cached_fit(job: &Job, flag: &FlagIdeal, r: u32, use_cache: bool) -> Option<(Cache, String, Option<CountingFit>)> {
    let dir = job.cache_dir.as_ref().filter(|_| use_cache)?;
    let cache = Cache::new(dir).ok()?;
    let raw = job.raw_flag.clone().unwrap_or_else(|| flag.to_raw());
    let key = cache::key(&job.variety, &raw, r, &job.options);
    let fit = cache.get(&key);
    Some((cache, key, fit))
}

fn cmd_compute(job: &Job, format: Format, no_cache: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let flag = match job.require_flag() {
        Ok(f) => f,
        Err(e) => return fail(&e, stdout, stderr),
    };
    let mut reports = Vec::new();
    for &r in &job.r {
        let cached = cached_fit(job, flag, r, !no_cache);
        let fit = cached.as_ref().and_then(|c| c.2.clone());
        match report::compute_with_fit(&job.variety, flag, r, job.pipeline, &job.options, fit) {
            Ok(rep) => {
                if let (Some((cache, key, None)), Some(fit)) = (&cached, &rep.fit) {
                    cache.put(key, fit);
                }
                reports.push(rep);
            }
            Err(e) => return fail(&e, stdout, stderr),
        }
    }
    let failed = reports.iter().any(DfReport::cross_check_failed);
    if reports.len() == 1 {
        emit(&reports[0], format, || report_table(&reports[0]), stdout);
    } else {
        emit(&json!({ "reports": reports }), format, || reports.iter().map(report_table).collect::<Vec<_>>().join("\n"), stdout);
    }
    if failed {
        let _ = writeln!(stderr, "kstab: cross-pipeline check failed");
        return EXIT_CHECK_FAILED;
    }
    EXIT_OK
}

fn opt(q: &Option<exact::Rational>) -> String {
    q.as_ref().map(exact::to_string).unwrap_or_else(|| "-".into())
}

fn report_table(rep: &DfReport) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("flag_ideal".into(), rep.flag_ideal.clone()),
        ("r".into(), rep.r.to_string()),
        ("pipeline".into(), format!("{:?}", rep.pipeline).to_lowercase()),
        ("DF".into(), exact::to_string(&rep.df)),
        ("DF (counting)".into(), opt(&rep.df_counting)),
        ("DF (intersection)".into(), opt(&rep.df_intersection)),
        ("chow".into(), opt(&rep.chow)),
    ];
    if let Some(d) = &rep.decomposition {
        rows.push(("T1".into(), exact::to_string(&d.t1)));
        rows.push(("T2".into(), exact::to_string(&d.t2)));
        rows.push(("T3".into(), exact::to_string(&d.t3)));
    }
    rows.push(("consistent".into(), rep.consistent.to_string()));
    for w in &rep.warnings {
        rows.push(("warning".into(), w.clone()));
    }
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

fn check(name: impl Into<String>, pass: bool) -> Check {
    Check { name: name.into(), pass, detail: None }
}

/// Ehrhart fit of `P` against `n!·vol` and the boundary volume.
fn ehrhart_check(name: &str, variety: &PolarizedToricVariety) -> Result<Check, Error> {
    let n = variety.dim();
    let samples: Vec<(i64, num::BigInt)> =
        (0..=(n as i64 + 4)).map(|k| (k, num::BigInt::from(variety.ehrhart_count(k as u64)))).collect();
    let h = fit_polynomial(&samples, n, 2)?;
    Ok(check(format!("ehrhart {name}"), h.threshold() == 0 && weight::weak_riemann_roch_check(variety, &h, 1)))
}

fn cmd_verify(job: &Job, format: Format, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match verify_checks(job) {
        Ok(checks) => {
            let all_pass = checks.iter().all(|c| c.pass);
            let doc = json!({ "checks": checks, "all_pass": all_pass });
            emit(
                &doc,
                format,
                || {
                    checks
                        .iter()
                        .map(|c| format!("{}  {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name))
                        .collect()
                },
                stdout,
            );
            if all_pass {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "kstab: exact identity check failed");
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => fail(&e, stdout, stderr),
    }
}

fn verify_checks(job: &Job) -> Result<Vec<Check>, Error> {
    let mut checks = vec![ehrhart_check("job variety", &job.variety)?];
    if job.verify.library {
        for (name, v) in library::all() {
            checks.push(ehrhart_check(name, &v)?);
        }
    }
    let Some(flag) = &job.flag else { return Ok(checks) };
    let n = job.variety.dim();
    for &r in &job.verify.r {
        let cached = cached_fit(job, flag, r, true);
        let fit = match cached.as_ref().and_then(|c| c.2.clone()) {
            Some(fit) => fit,
            None => {
                let fit = weight::fit_counting(&job.variety, flag, r, &job.options)?;
                if let Some((cache, key, _)) = &cached {
                    cache.put(key, &fit);
                }
                fit
            }
        };
        checks.push(check(format!("r={r} fit reproduces samples"), weight::fit_matches_samples(&job.variety, flag, r, &fit)?));
        checks.push(check(format!("r={r} weak riemann-roch"), weight::weak_riemann_roch_check(&job.variety, &fit.hilbert, r)));
        checks.push(check(format!("r={r} normalized weight"), weight::normalized_weight_check(n, &fit, r as i64)));
        for &k in job.verify.k.iter().filter(|&&k| k > 0 && k % r as i64 == 0) {
            for &k2 in &job.verify.k_prime {
                checks.push(check(
                    format!("r={r} mabuchi k={k} k'={k2}"),
                    weight::mabuchi_check(&fit.weight, &fit.hilbert, r as i64, k, k2),
                ));
            }
        }
        let base = CountingResult::from_fit(n, fit);
        let raw = job.raw_flag.clone().unwrap_or_else(|| flag.to_raw());
        for &c in &job.verify.t_powers {
            let shifted = FlagIdeal::validate(raw.times_t_power(c), &job.variety)?;
            let other = weight::df_counting(&job.variety, &shifted, r, &job.options)?;
            let (lo, hi) = other.fit.k_range;
            let ws = weight::weight_sequence(&job.variety, flag, r, (lo, hi))?;
            let wt = weight::weight_sequence(&job.variety, &shifted, r, (lo, hi))?;
            let hs = weight::hilbert_sequence(&job.variety, r, (lo, hi));
            let shift_law = (lo..=hi).enumerate().all(|(i, k)| wt[i] == &ws[i] - num::BigInt::from(c as u64 * k as u64) * &hs[i]);
            checks.push(check(format!("r={r} t^{c} invariance"), other.df == base.df && shift_law));
        }
        if job.pipeline != Pipeline::Counting {
            match report::compute_with_fit(&job.variety, flag, r, Pipeline::Both, &job.options, Some(base.fit.clone())) {
                Ok(rep) if rep.decomposition.is_some() => checks.push(check(format!("r={r} pipelines"), rep.consistent)),
                Ok(_) | Err(Error::ExponentTooSmall { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(checks)
}

fn cmd_search(job: &Job, format: Format, stream: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some(bounds) = &job.search else {
        return fail(&Error::InvalidInput("search needs a \"search\" object with bounds".into()), stdout, stderr);
    };
    let done = match stream.map(load_stream).transpose() {
        Ok(d) => d.unwrap_or_default(),
        Err(e) => return fail(&e, stdout, stderr),
    };
    let mut writer = match stream.map(|p| open_stream(p, &done)).transpose() {
        Ok(w) => w,
        Err(e) => return fail(&e, stdout, stderr),
    };
    let mut sink = |res: &CandidateResult| -> Result<(), Error> {
        if let Some(w) = writer.as_mut() {
            writeln!(w, "{}", io::to_json_line(res))
                .and_then(|_| w.flush())
                .map_err(|e| Error::InvalidInput(format!("stream write failed: {e}")))?;
        }
        Ok(())
    };
    let options: &FitOptions = &job.options;
    match lab::search_destabilizers_with(&job.variety, bounds, options, &done, &mut sink) {
        Ok(rep) => {
            emit(&rep, format, || search_table(&rep), stdout);
            EXIT_OK
        }
        Err(e) => fail(&e, stdout, stderr),
    }
}

fn search_table(rep: &lab::SearchReport) -> String {
    let mut out = format!(
        "candidates  {}\nevaluations {}\nmin DF      {}\nnegatives   {}\nundecided   {}\nmismatches  {}\n",
        rep.candidates,
        rep.evaluations,
        opt(&rep.min_df),
        rep.negatives,
        rep.undecided.len(),
        rep.mismatches.len()
    );
    for w in &rep.witnesses {
        out.push_str(&format!("witness     {} at r={}\n", w.flag_ideal, w.r));
    }
    out
}

/// Complete lines of an earlier stream; a torn last line is ignored.
fn load_stream(path: &Path) -> Result<BTreeMap<(usize, u32), CandidateResult>, Error> {
    let mut out = BTreeMap::new();
    let Ok(file) = fs::File::open(path) else { return Ok(out) };
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::InvalidInput(format!("cannot read stream: {e}")))?;
        if let Ok(res) = serde_json::from_str::<CandidateResult>(&line) {
            out.insert(res.key(), res);
        }
    }
    Ok(out)
}

/// Rewrites the stream with the parsed lines, then appends.
fn open_stream(path: &Path, done: &BTreeMap<(usize, u32), CandidateResult>) -> Result<fs::File, Error> {
    let err = |e: std::io::Error| Error::InvalidInput(format!("cannot write stream {}: {e}", path.display()));
    let mut f = fs::File::create(path).map_err(err)?;
    for res in done.values() {
        writeln!(f, "{}", io::to_json_line(res)).map_err(err)?;
    }
    Ok(f)
}
