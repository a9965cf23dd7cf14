use clap::{Args, Parser, Subcommand};
use multifrac::cli::{self, parse_f64_list, parse_hurst, GridSpec, RunConfig};
use multifrac::kernels::ProcessSpec;

#[derive(Parser)]
#[command(
    name = "multifrac",
    version,
    about = "Exact simulation and numerical verification of fractional, bifractional and \
             multifractional Brownian motion kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ProcessArgs {
    /// Process family: fbm | bfbm | mbm | ext | xk
    #[arg(long)]
    process: Option<String>,
    /// Hurst exponent for fbm/bfbm
    #[arg(long = "H")]
    h: Option<f64>,
    /// Bifractional parameter K
    #[arg(long = "K")]
    k: Option<f64>,
    /// Hurst function, e.g. sine:mu=0.3,nu=0.7,period=1,phase=0
    #[arg(long)]
    hurst: Option<String>,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Master seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (default: into $MULTIFRAC_OUT_DIR or the working directory)
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (default: rayon's choice)
    #[arg(long)]
    threads: Option<usize>,
    /// Tolerance override where an audit takes one
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample exact Gaussian paths and write them as CSV
    Simulate {
        #[command(flatten)]
        process: ProcessArgs,
        /// Grid as start:end:n (n+1 points) or comma-separated times
        #[arg(long)]
        grid: String,
        /// Number of paths
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Assemble a covariance matrix and check positive-semidefiniteness
    CheckPsd {
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a verification audit: psd | quasi-helix | holder | prop2 | lass |
    /// decomposition | tk-identity
    Verify {
        audit: String,
        #[command(flatten)]
        process: ProcessArgs,
        #[arg(long)]
        grid: Option<String>,
        /// Zoom time for lass
        #[arg(long)]
        t: Option<f64>,
        /// Pair count for holder
        #[arg(long)]
        pairs: Option<usize>,
        /// Sweep size for psd / decomposition
        #[arg(long)]
        sweep: Option<usize>,
        /// Comma-separated u grid for lass
        #[arg(long)]
        u_grid: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Long-range-dependence scan: process and increment exponents plus
    /// memory classification
    Lrd {
        #[command(flatten)]
        process: ProcessArgs,
        /// Fixed second argument s
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Fit grid as start:end:n or comma-separated times (log-spaced
        /// spanning at least 3 decades)
        #[arg(long)]
        grid: Option<String>,
        /// Lag step for the memory classification
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        /// Number of correlation terms
        #[arg(long, default_value_t = 2000)]
        n_terms: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Estimate local regularity exponents from a CSV of sampled paths
    Estimate {
        /// CSV produced by `simulate`
        #[arg(long)]
        input: String,
        /// Times at which to estimate (default: 8 interior points)
        #[arg(long)]
        times: Option<String>,
        /// Window length in samples (default: about n/16)
        #[arg(long)]
        window: Option<usize>,
        /// Comma-separated dyadic scales in grid steps
        #[arg(long)]
        scales: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn build_process(args: &ProcessArgs) -> Result<Option<ProcessSpec>, String> {
    // infer the family when only parameters are given: a Hurst function
    // means the multifractional side, a bare H the two-parameter side
    let inferred;
    let fam = match args.process.as_deref() {
        Some(f) => f,
        None if args.hurst.is_some() => {
            inferred = if args.k.is_some() { "ext" } else { "mbm" };
            inferred
        }
        None if args.h.is_some() => {
            inferred = if args.k.is_some() { "bfbm" } else { "fbm" };
            inferred
        }
        None => return Ok(None),
    };
    let need_h = || args.h.ok_or_else(|| format!("--H is required for {fam}"));
    let need_k = || args.k.ok_or_else(|| format!("--K is required for {fam}"));
    let need_hurst = || {
        args.hurst
            .as_deref()
            .ok_or_else(|| format!("--hurst is required for {fam}"))
            .and_then(parse_hurst)
    };
    let spec = match fam {
        "fbm" => ProcessSpec::fbm(need_h()?),
        "bfbm" => ProcessSpec::bfbm(need_h()?, need_k()?),
        "mbm" => Ok(ProcessSpec::mbm(need_hurst()?)),
        "ext" => ProcessSpec::ext_bfbm(need_hurst()?, need_k()?),
        "xk" => ProcessSpec::xk(need_k()?),
        other => return Err(format!("unknown process family '{other}'")),
    };
    spec.map(Some).map_err(|e| e.to_string())
}

fn apply_common(cfg: &mut RunConfig, common: &CommonArgs) {
    cfg.seed = common.seed;
    cfg.out = common.out.clone();
    cfg.threads = common.threads;
    cfg.tolerance = common.tolerance;
}

fn to_config(cmd: &Command) -> Result<RunConfig, String> {
    match cmd {
        Command::Simulate { process, grid, paths, common } => {
            let mut cfg = RunConfig::new("simulate");
            cfg.process = build_process(process)?;
            cfg.grid = Some(GridSpec::parse(grid)?);
            cfg.n_paths = Some(*paths);
            apply_common(&mut cfg, common);
            Ok(cfg)
        }
        Command::CheckPsd { process, grid, common } => {
            let mut cfg = RunConfig::new("check-psd");
            cfg.process = build_process(process)?;
            cfg.grid = Some(GridSpec::parse(grid)?);
            apply_common(&mut cfg, common);
            Ok(cfg)
        }
        Command::Verify { audit, process, grid, t, pairs, sweep, u_grid, common } => {
            let mut cfg = RunConfig::new("verify");
            cfg.audit = Some(audit.clone());
            cfg.process = build_process(process)?;
            cfg.grid = grid.as_deref().map(GridSpec::parse).transpose()?;
            cfg.t = *t;
            cfg.pairs = *pairs;
            cfg.sweep = *sweep;
            cfg.times = u_grid.as_deref().map(parse_f64_list).transpose()?;
            apply_common(&mut cfg, common);
            Ok(cfg)
        }
        Command::Lrd { process, s, grid, delta, n_terms, common } => {
            let mut cfg = RunConfig::new("lrd");
            cfg.process = build_process(process)?;
            cfg.s = Some(*s);
            cfg.grid = grid.as_deref().map(GridSpec::parse).transpose()?;
            cfg.delta = Some(*delta);
            cfg.n_terms = Some(*n_terms);
            apply_common(&mut cfg, common);
            Ok(cfg)
        }
        Command::Estimate { input, times, window, scales, common } => {
            let mut cfg = RunConfig::new("estimate");
            cfg.input = Some(input.clone());
            cfg.times = times.as_deref().map(parse_f64_list).transpose()?;
            cfg.window = *window;
            cfg.scales = scales
                .as_deref()
                .map(|s| {
                    s.split(',')
                        .map(|p| p.trim().parse::<usize>().map_err(|e| e.to_string()))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?;
            apply_common(&mut cfg, common);
            Ok(cfg)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let config = match to_config(&cli.command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    };
    match cli::run(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            std::process::exit(outcome.exit_code);
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(2);
        }
    }
}
