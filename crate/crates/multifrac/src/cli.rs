//! Command execution behind the binary: simulate to CSV, audit suites to
//! JSON, LRD scans and estimator runs. Flag parsing lives in the binary;
//! everything here works off a serializable `RunConfig` so that a config
//! echoed into a JSON report reproduces the run exactly.

use crate::analysis::{
    self, holder_bounds_audit, lass_covariance_limit, lrd_increment_audit, lrd_process_audit,
    memory_classification, prop2_constants, quasi_helix_audit,
};
use crate::error::Error;
use crate::estimate::{self, LocalExponentEstimate};
use crate::hurst::HurstFunction;
use crate::kernels::{decomposition_residual, tk_identity_residual, ProcessSpec};
use crate::report::{inputs_of, Target, VerificationReport};
use crate::rng::NormalStream;
use crate::simulate::{
    assemble_covariance, check_psd, cholesky_with_jitter, sample_paths, JitterPolicy, TimeGrid,
};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Grid selection: regular start:end:n (n+1 points inclusive) or explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Regular { start: f64, end: f64, n: usize },
    Explicit { times: Vec<f64> },
}

impl GridSpec {
    pub fn to_grid(&self) -> Result<TimeGrid, Error> {
        match self {
            GridSpec::Regular { start, end, n } => TimeGrid::regular(*start, *end, *n),
            GridSpec::Explicit { times } => TimeGrid::new(times.clone()),
        }
    }

    /// Parse "start:end:n" or a comma-separated list of times.
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() == 3 {
            let start: f64 = parts[0].parse().map_err(|e| format!("bad grid start: {e}"))?;
            let end: f64 = parts[1].parse().map_err(|e| format!("bad grid end: {e}"))?;
            let n: usize = parts[2].parse().map_err(|e| format!("bad grid count: {e}"))?;
            Ok(GridSpec::Regular { start, end, n })
        } else if parts.len() == 1 {
            let times = parse_f64_list(text)?;
            Ok(GridSpec::Explicit { times })
        } else {
            Err(format!("grid must be start:end:n or a comma-separated list, got '{text}'"))
        }
    }
}

pub fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad number '{p}': {e}")))
        .collect()
}

/// Parse a Hurst-function spec of the form `kind:key=value,...`.
///
/// Kinds: `const:h=0.5`, `sine:mu=0.3,nu=0.7,period=1,phase=0`,
/// `linear:a=0.2,b=0.3[,mu=0.05,nu=0.95]`,
/// `logistic:mu=0.35,nu=0.75,center=1.5,steepness=3`.
pub fn parse_hurst(text: &str) -> Result<HurstFunction, String> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut kv = std::collections::BTreeMap::new();
    if !rest.is_empty() {
        for item in rest.split(',') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got '{item}'"))?;
            let v: f64 = v.trim().parse().map_err(|e| format!("bad value in '{item}': {e}"))?;
            kv.insert(k.trim().to_string(), v);
        }
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| format!("missing '{k}' in '{text}'"));
    let res = match kind {
        "const" | "constant" => HurstFunction::constant(get("h")?),
        "sine" => HurstFunction::sine(get("mu")?, get("nu")?, get("period")?, get("phase")?),
        "linear" => HurstFunction::linear(
            get("a")?,
            get("b")?,
            kv.get("mu").copied().unwrap_or(0.05),
            kv.get("nu").copied().unwrap_or(0.95),
        ),
        "logistic" => {
            HurstFunction::logistic(get("mu")?, get("nu")?, get("center")?, get("steepness")?)
        }
        other => return Err(format!("unknown Hurst kind '{other}'")),
    };
    res.map_err(|e| e.to_string())
}

/// Fully serializable description of one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_terms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            audit: None,
            process: None,
            grid: None,
            seed: 0,
            n_paths: None,
            out: None,
            s: None,
            t: None,
            delta: None,
            n_terms: None,
            pairs: None,
            sweep: None,
            window: None,
            scales: None,
            times: None,
            input: None,
            tolerance: None,
            threads: None,
        }
    }
}

/// JSON envelope written by every report-producing command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: RunConfig,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<VerificationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<LocalExponentEstimate>,
    pub version: String,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub summary: String,
    pub out_path: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Config(e.to_string())
    }
}

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Resolve the output path: an explicit flag wins; otherwise the default
/// file name lands in $MULTIFRAC_OUT_DIR (or the working directory).
fn resolve_out(flag: Option<&str>, default_name: &str) -> PathBuf {
    match flag {
        Some(p) => PathBuf::from(p),
        None => match std::env::var_os("MULTIFRAC_OUT_DIR") {
            Some(dir) => PathBuf::from(dir).join(default_name),
            None => PathBuf::from(default_name),
        },
    }
}

/// Write through a temp file in the same directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}tmp{}",
        path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default(),
        std::process::id()
    ));
    let io = |source| CliError::Io { path: path.to_path_buf(), source };
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)?;
    Ok(())
}

/// Entry point used by the binary and by integration tests.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    match config.threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(config))
        }
        _ => dispatch(config),
    }
}

fn dispatch(config: &RunConfig) -> Result<RunOutcome, CliError> {
    match config.command.as_str() {
        "simulate" => cmd_simulate(config),
        "check-psd" => cmd_check_psd(config),
        "verify" => cmd_verify(config),
        "lrd" => cmd_lrd(config),
        "estimate" => cmd_estimate(config),
        other => config_err(format!("unknown command '{other}'")),
    }
}

fn require_process(config: &RunConfig) -> Result<ProcessSpec, CliError> {
    config.process.clone().ok_or_else(|| CliError::Config("a process spec is required".into()))
}

fn require_grid(config: &RunConfig) -> Result<TimeGrid, CliError> {
    let gs = config.grid.clone().ok_or_else(|| CliError::Config("a grid is required".into()))?;
    Ok(gs.to_grid()?)
}

/// Render one path ensemble as CSV: header `t,path_0..`, one row per grid
/// time, every float at 17 significant digits, LF line endings.
pub fn ensemble_to_csv(ensemble: &crate::simulate::PathEnsemble) -> String {
    let n = ensemble.n_times();
    let mut out = String::with_capacity((ensemble.n_paths + 1) * n * 26);
    out.push('t');
    for i in 0..ensemble.n_paths {
        let _ = write!(out, ",path_{i}");
    }
    out.push('\n');
    for (row, &t) in ensemble.grid.points().iter().enumerate().take(n) {
        let _ = write!(out, "{t:.16e}");
        for p in 0..ensemble.n_paths {
            let _ = write!(out, ",{:.16e}", ensemble.path(p)[row]);
        }
        out.push('\n');
    }
    out
}

/// Parse the CSV format written by `ensemble_to_csv`.
pub fn parse_paths_csv(text: &str) -> Result<(Vec<f64>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty CSV")?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") {
        return Err(format!("expected header starting with 't', got '{header}'"));
    }
    let n_paths = cols.len() - 1;
    let mut times = Vec::new();
    let mut paths: Vec<Vec<f64>> = vec![Vec::new(); n_paths];
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let t: f64 = it
            .next()
            .ok_or_else(|| format!("line {}: missing t", lineno + 2))?
            .parse()
            .map_err(|e| format!("line {}: {e}", lineno + 2))?;
        times.push(t);
        for p in paths.iter_mut() {
            let v: f64 = it
                .next()
                .ok_or_else(|| format!("line {}: short row", lineno + 2))?
                .parse()
                .map_err(|e| format!("line {}: {e}", lineno + 2))?;
            p.push(v);
        }
    }
    Ok((times, paths))
}

fn cmd_simulate(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let spec = require_process(config)?;
    let grid = require_grid(config)?;
    let n_paths = config.n_paths.unwrap_or(100);

    let cov = assemble_covariance(&spec, &grid)?;
    let factor = cholesky_with_jitter(&cov, &JitterPolicy::default())?;
    let ensemble = sample_paths(&factor, n_paths, config.seed);

    let csv = ensemble_to_csv(&ensemble);
    let path = resolve_out(config.out.as_deref(), "paths.csv");
    write_atomic(&path, &csv)?;

    let summary = format!(
        "wrote {}: n_paths={} n_times={} jitter={:.3e} wall_ms={}",
        path.display(),
        n_paths,
        grid.len(),
        factor.jitter,
        start.elapsed().as_millis()
    );
    Ok(RunOutcome { exit_code: 0, summary, out_path: Some(path) })
}

fn psd_report(config: &RunConfig, spec: &ProcessSpec, grid: &TimeGrid) -> Result<VerificationReport, CliError> {
    let tol = config.tolerance.unwrap_or(1e-10);
    let cov = assemble_covariance(spec, grid)?;
    let rep = check_psd(&cov, tol)?;
    let scale = (rep.trace / rep.n as f64).max(1.0);
    Ok(VerificationReport::evaluate(
        "psd",
        inputs_of(&[
            ("family", json!(spec.family_name())),
            ("process", serde_json::to_value(spec).unwrap_or(json!(null))),
            ("n", json!(rep.n)),
        ]),
        vec![
            ("min_eigenvalue_relative".into(), rep.min_eigenvalue / scale),
            ("min_eigenvalue".into(), rep.min_eigenvalue),
            ("trace".into(), rep.trace),
        ],
        Target::Interval { lo: 0.0, hi: f64::MAX },
        tol,
        "",
    ))
}

fn cmd_check_psd(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let spec = require_process(config)?;
    let grid = require_grid(config)?;
    let report = psd_report(config, &spec, &grid)?;
    finish_reports(config, vec![report], "check-psd.json")
}

/// Deterministic random built-in Hurst functions for sweep audits.
fn random_hurst(u: &mut NormalStream) -> HurstFunction {
    let lo = 0.1 + 0.3 * u.next_uniform();
    let hi = 0.55 + 0.35 * u.next_uniform();
    match (u.next_uniform() * 4.0) as usize {
        0 => HurstFunction::constant(lo + (hi - lo) * u.next_uniform()),
        1 => HurstFunction::sine(lo, hi, 0.5 + 3.5 * u.next_uniform(), std::f64::consts::TAU * u.next_uniform()),
        2 => HurstFunction::linear(lo, (hi - lo) * (2.0 * u.next_uniform() - 1.0), lo, hi),
        _ => HurstFunction::logistic(lo, hi, 5.0 * u.next_uniform(), 0.5 + 4.0 * u.next_uniform()),
    }
    .expect("parameters are in range by construction")
}

fn cmd_verify(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let audit = config.audit.clone().unwrap_or_default();
    let reports = match audit.as_str() {
        "psd" => verify_psd_sweep(config)?,
        "quasi-helix" => vec![verify_quasi_helix(config)?],
        "holder" => vec![verify_holder(config)?],
        "prop2" => vec![verify_prop2(config)?],
        "lass" => vec![verify_lass(config)?],
        "decomposition" => vec![verify_decomposition(config)?],
        "tk-identity" => vec![verify_tk_identity(config)?],
        other => {
            return config_err(format!(
                "unknown audit '{other}'; expected psd | quasi-helix | holder | prop2 | lass | \
                 decomposition | tk-identity"
            ))
        }
    };
    finish_reports(config, reports, &format!("verify-{audit}.json"))
}

fn verify_psd_sweep(config: &RunConfig) -> Result<Vec<VerificationReport>, CliError> {
    if let (Some(_), Some(_)) = (&config.process, &config.grid) {
        let spec = require_process(config)?;
        let grid = require_grid(config)?;
        return Ok(vec![psd_report(config, &spec, &grid)?]);
    }
    let sweep = config.sweep.unwrap_or(50);
    let mut u = NormalStream::new(config.seed, 0x505344);
    let ks = [0.3, 0.6, 1.0];
    let mut out = Vec::with_capacity(sweep);
    for i in 0..sweep {
        let hf = random_hurst(&mut u);
        let k = ks[i % ks.len()];
        let spec = ProcessSpec::ext_bfbm(hf, k)?;
        let n = 16 + (u.next_uniform() * 112.0) as usize;
        let lo = if u.next_uniform() < 0.3 { 0.0 } else { 0.05 + 0.5 * u.next_uniform() };
        let grid = TimeGrid::regular(lo, 10.0, n.max(2) - 1)?;
        out.push(psd_report(config, &spec, &grid)?);
    }
    Ok(out)
}

fn verify_quasi_helix(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let (h, k) = match config.process {
        Some(ProcessSpec::Bfbm { h, k }) => (h, k),
        Some(ProcessSpec::Fbm { h }) => (h, 1.0),
        _ => (0.7, 0.4),
    };
    let grid = match &config.grid {
        Some(g) => g.to_grid()?,
        None => TimeGrid::regular(0.0, 10.0, 63)?,
    };
    Ok(quasi_helix_audit(h, k, &grid)?)
}

fn verify_holder(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let (hf, k) = hurst_and_k(config, 0.5)?;
    let n_pairs = config.pairs.unwrap_or(10_000);
    let mut u = NormalStream::new(config.seed, 0x484f4c);
    let pairs: Vec<(f64, f64)> =
        (0..n_pairs).map(|_| (u.next_uniform(), u.next_uniform())).collect();
    Ok(holder_bounds_audit(&hf, k, &pairs)?)
}

fn verify_prop2(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let (a, b) = (0.05, 2.0);
    let (alpha, gamma) = (0.3, 0.8);
    let k = match &config.process {
        Some(p) => p.k(),
        None => config.tolerance.map(|_| 0.5).unwrap_or(0.5),
    };
    let k = if k >= 1.0 { 0.999 } else { k };
    let consts = prop2_constants(a, b, alpha, gamma, k)?;
    let bound = consts.c_final();
    let mut u = NormalStream::new(config.seed, 0x503232);
    let mut min_margin = f64::INFINITY;
    for _ in 0..100 {
        let t = a + (b - a) * u.next_uniform();
        let h = alpha + (gamma - alpha) * u.next_uniform();
        let h2 = alpha + (gamma - alpha) * u.next_uniform();
        let lhs = analysis::x_displacement_variance(t, h, h2, k)?;
        let rhs = bound * (h - h2) * (h - h2);
        min_margin = min_margin.min(rhs - lhs);
    }
    Ok(VerificationReport::evaluate(
        "prop2_bound",
        inputs_of(&[
            ("a", json!(a)),
            ("b", json!(b)),
            ("alpha", json!(alpha)),
            ("gamma", json!(gamma)),
            ("K", json!(k)),
        ]),
        vec![
            ("min_margin".into(), min_margin),
            ("c1".into(), consts.c1),
            ("c2".into(), consts.c2),
            ("c3".into(), consts.c3),
            ("c_final".into(), bound),
        ],
        Target::Interval { lo: 0.0, hi: f64::MAX },
        1e-12,
        "displacement variance vs c_final |H - H'|^2 on 100 random draws",
    ))
}

fn hurst_and_k(config: &RunConfig, default_k: f64) -> Result<(HurstFunction, f64), CliError> {
    match &config.process {
        Some(ProcessSpec::ExtBfbm { hurst, k }) => Ok((hurst.clone(), *k)),
        Some(ProcessSpec::Mbm { hurst }) => Ok((hurst.clone(), 1.0)),
        Some(ProcessSpec::Bfbm { h, k }) => Ok((HurstFunction::constant(*h)?, *k)),
        Some(ProcessSpec::Fbm { h }) => Ok((HurstFunction::constant(*h)?, 1.0)),
        Some(ProcessSpec::Xk { .. }) => {
            config_err("this audit needs a process with a Hurst exponent")
        }
        None => Ok((HurstFunction::sine(0.3, 0.7, 1.0, 0.0)?, default_k)),
    }
}

fn verify_lass(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let (hf, k) = hurst_and_k(config, 0.6)?;
    let t = config.t.unwrap_or(1.0);
    let u_grid = config.times.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let ladder: Vec<f64> = (0..12).map(|j| 1e-2 / 2f64.powi(j)).collect();
    Ok(lass_covariance_limit(&hf, k, t, &u_grid, &ladder)?.report)
}

fn verify_decomposition(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let (hf, k) = hurst_and_k(config, 0.4)?;
    let n = config.sweep.unwrap_or(1000);
    let mut u = NormalStream::new(config.seed, 0x444543);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let t = 20.0 * u.next_uniform();
        let s = 20.0 * u.next_uniform();
        let kk = if k < 1.0 { k } else { 0.05 + 0.9 * u.next_uniform() };
        worst = worst.max(decomposition_residual(t, s, &hf, kk)?);
    }
    Ok(VerificationReport::evaluate(
        "decomposition_identity",
        inputs_of(&[("K", json!(k)), ("samples", json!(n))]),
        vec![("max_relative_residual".into(), worst)],
        Target::Value(0.0),
        1e-12,
        "covariance identity linking the X process, the extended kernel and the \
         reduced-exponent kernel (K-free coefficient)",
    ))
}

fn verify_tk_identity(config: &RunConfig) -> Result<VerificationReport, CliError> {
    let mut worst = 0.0f64;
    let ts: Vec<f64> = std::iter::once(0.0)
        .chain((0..13).map(|i| 0.01 * (100.0f64 / 0.01).powf(i as f64 / 12.0)))
        .collect();
    let ks: Vec<f64> = (1..20).map(|i| 0.05 * i as f64).collect();
    for &t in &ts {
        for &k in &ks {
            worst = worst.max(tk_identity_residual(t, k)?);
        }
    }
    Ok(VerificationReport::evaluate(
        "tk_identity",
        inputs_of(&[("t_max", json!(100.0)), ("k_grid", json!(ks.len()))]),
        vec![("max_abs_residual".into(), worst)],
        Target::Value(0.0),
        config.tolerance.unwrap_or(1e-8),
        "t^K against the subordinator integral on a log grid",
    ))
}

fn cmd_lrd(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let spec = require_process(config)?;
    let s = config.s.unwrap_or(1.0);
    let t_grid: Vec<f64> = match &config.grid {
        Some(g) => g.to_grid()?.points().to_vec(),
        None => TimeGrid::log_spaced(1e2, 1e5, 25)?.points().to_vec(),
    };
    let delta = config.delta.unwrap_or(1.0);
    let n_terms = config.n_terms.unwrap_or(2000);

    let mut reports = vec![lrd_process_audit(&spec, s, &t_grid)?];
    reports.push(lrd_increment_audit(&spec, s, &t_grid)?);
    reports.push(memory_classification(&spec, s, delta, n_terms)?);
    finish_reports(config, reports, "lrd.json")
}

fn cmd_estimate(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let input = config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Config("estimate needs --input <paths.csv>".into()))?;
    let text = std::fs::read_to_string(input)
        .map_err(|source| CliError::Io { path: PathBuf::from(input), source })?;
    let (times, paths) = parse_paths_csv(&text).map_err(CliError::Config)?;
    if times.len() < 2 {
        return config_err("need at least two rows of path data");
    }

    let window = config.window.unwrap_or_else(|| estimate::default_window(times.len()));
    let scales = config.scales.clone().unwrap_or_else(|| estimate::DEFAULT_SCALES.to_vec());
    let t_list = match &config.times {
        Some(ts) => ts.clone(),
        None => {
            // interior points clear of the window and largest scale
            let dt = times[1] - times[0];
            let margin = (window / 2 + scales.last().copied().unwrap_or(8) + 1) as f64 * dt;
            let (lo, hi) = (times[0] + margin, times[times.len() - 1] - margin);
            (0..8).map(|i| lo + (hi - lo) * i as f64 / 7.0).collect()
        }
    };

    let path_refs: Vec<&[f64]> = paths.iter().map(|p| p.as_slice()).collect();
    let estimates = estimate::hurst_profile_raw(&times, &path_refs, &t_list, window, &scales)?;

    let envelope = JsonReport {
        config: config.clone(),
        reports: Vec::new(),
        estimates,
        version: VERSION.to_string(),
    };
    let path = resolve_out(config.out.as_deref(), "estimate.json");
    let json = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    write_atomic(&path, &json)?;
    let summary = format!(
        "wrote {}: {} local exponent estimates from {} paths",
        path.display(),
        envelope.estimates.len(),
        paths.len()
    );
    Ok(RunOutcome { exit_code: 0, summary, out_path: Some(path) })
}

fn finish_reports(
    config: &RunConfig,
    reports: Vec<VerificationReport>,
    default_name: &str,
) -> Result<RunOutcome, CliError> {
    let all_pass = reports.iter().all(|r| r.pass);
    let n_fail = reports.iter().filter(|r| !r.pass).count();
    let envelope = JsonReport {
        config: config.clone(),
        reports,
        estimates: Vec::new(),
        version: VERSION.to_string(),
    };
    let path = resolve_out(config.out.as_deref(), default_name);
    let json = serde_json::to_string_pretty(&envelope)
        .map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    write_atomic(&path, &json)?;
    let summary = format!(
        "wrote {}: {} reports, {}",
        path.display(),
        envelope.reports.len(),
        if all_pass { "all pass".to_string() } else { format!("{n_fail} FAILED") }
    );
    Ok(RunOutcome { exit_code: i32::from(!all_pass), summary, out_path: Some(path) })
}
