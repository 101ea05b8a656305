//! `skewsim` — command-line front end for the exact-simulation library.
//!
//! Subcommands: `density` (grid evaluation of the series correction and
//! transition/bridge densities with certified-remainder columns), `sample`
//! (terminal batches by SRRS, RRS, or Euler), `path` (skeleton simulation
//! plus bridge refinement to a regular grid), `benchmark` (wall-clock cost
//! tables), and `verify` (the library's named check suites).
//!
//! All tabular output is headered CSV; batch commands write a JSON metadata
//! sidecar next to the data file. Relative output paths land in
//! `$SKEWSIM_OUT_DIR` when that variable is set.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use skewsim::analysis::{benchmark, kde, kde_default_grid, SampleBatch};
use skewsim::density::{
    bridge_density_q, series, transition_density_p, SkewParams, ThetaParams, DEFAULT_N_CAP,
    DEFAULT_TOL,
};
use skewsim::drift::{load_drift, DriftSpec};
use skewsim::output::{
    kde_rows, sidecar_path, skeleton_rows, terminal_rows, write_csv, write_json, BatchMetadata,
    BridgeRow, DensityRow,
};
use skewsim::sim::{
    batch_terminal, fill_path_shifted, rrs_with_stats, srrs_with_stats, stream_rng, Method,
    SimConfig,
};
use skewsim::verify::{all_passed, suite_all, suite_normalization, suite_oracle, suite_sampler,
    suite_sim, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "skewsim",
    version,
    about = "Exact simulation of diffusions with two-valued, discontinuous drift"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the series correction and transition density on a y-grid.
    Density(DensityArgs),
    /// Draw a batch of exact (or Euler) terminal samples.
    Sample(SampleArgs),
    /// Simulate one skeleton and optionally refine it to a regular grid.
    Path(PathArgs),
    /// Time terminal sampling across horizons.
    Benchmark(BenchmarkArgs),
    /// Run the named verification suites and print one line per check.
    Verify(VerifyArgs),
}

/// Drift selection shared by the simulation subcommands.
#[derive(Args)]
struct DriftArgs {
    /// Builtin drift (`b1`, `b2`, `constant`) or path to a TOML drift file.
    #[arg(long, default_value = "b1")]
    drift: String,
    /// Drift value when `--drift constant` is selected.
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
}

impl DriftArgs {
    fn load(&self) -> anyhow::Result<DriftSpec> {
        load_drift(&self.drift, self.mu).with_context(|| format!("drift {:?}", self.drift))
    }
}

/// Sampler tuning shared by `sample`, `path`, and `benchmark`.
#[derive(Args)]
struct TuningArgs {
    /// Elementary interval length for SRRS.
    #[arg(long = "T-el", default_value_t = 0.55)]
    t_el: f64,
    /// Instrumental widening parameter in (0,1).
    #[arg(long, default_value_t = 0.75)]
    delta: f64,
    /// Base RNG seed; sample i uses stream i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Series truncation tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Series term cap.
    #[arg(long = "n-cap", default_value_t = DEFAULT_N_CAP)]
    n_cap: usize,
}

impl TuningArgs {
    fn config(&self, t: f64) -> SimConfig {
        SimConfig {
            t,
            t_el: self.t_el,
            delta: self.delta,
            seed: self.seed,
            n_cap: self.n_cap,
            tol: self.tol,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Srrs,
    Rrs,
    Euler,
}

#[derive(Args)]
struct DensityArgs {
    /// Skew parameters `theta1,theta2`.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    /// Upper barrier position (barriers sit at 0 and z).
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    /// Evaluation time.
    #[arg(long, default_value_t = 0.55)]
    t: f64,
    /// Start point x.
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    /// Evaluation grid `lo:hi:step`.
    #[arg(long = "y-grid", allow_hyphen_values = true)]
    y_grid: String,
    /// Evaluate the bridge density instead: `T,x2` pins the endpoint
    /// (the bridge runs from x at time 0 to x2 at time T; `--t` is the
    /// interior time).
    #[arg(long, allow_hyphen_values = true)]
    bridge: Option<String>,
    /// Series truncation tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Series term cap.
    #[arg(long = "n-cap", default_value_t = DEFAULT_N_CAP)]
    n_cap: usize,
    /// Output CSV path.
    #[arg(long, default_value = "density.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    drift: DriftArgs,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Number of terminal samples.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Sampling method.
    #[arg(long, value_enum, default_value_t = MethodArg::Srrs)]
    method: MethodArg,
    /// Euler step (only with `--method euler`).
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// Start point.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    x0: f64,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Also emit a kernel density estimate with this bandwidth.
    #[arg(long)]
    kde: Option<f64>,
    /// Output CSV path (metadata sidecar lands next to it).
    #[arg(long, default_value = "terminal.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct PathArgs {
    #[command(flatten)]
    drift: DriftArgs,
    /// Horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Skeleton method (`euler` is not a path sampler).
    #[arg(long, value_enum, default_value_t = MethodArg::Srrs)]
    method: MethodArg,
    /// Start point.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    x0: f64,
    /// Refine the skeleton onto a regular grid of this step via bridge
    /// sampling.
    #[arg(long = "refine-step")]
    refine_step: Option<f64>,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Output CSV path (metadata sidecar lands next to it).
    #[arg(long, default_value = "path.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[command(flatten)]
    drift: DriftArgs,
    /// Comma-separated methods; Euler takes its step after a colon, e.g.
    /// `srrs,rrs,euler:1e-2`.
    #[arg(long, default_value = "srrs,rrs")]
    methods: String,
    /// Comma-separated horizons.
    #[arg(long, default_value = "1,2,4")]
    horizons: String,
    /// Timed samples per horizon (after ten warm-up draws).
    #[arg(long, default_value_t = 40)]
    n: usize,
    /// Start point.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    x0: f64,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Output CSV path.
    #[arg(long, default_value = "benchmark.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which check suite to run.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Additive slack for the series-versus-oracle comparison.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
}

fn parse_pair(s: &str, what: &str) -> anyhow::Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        bail!("{what} must be two comma-separated numbers, got {s:?}");
    }
    Ok((
        parts[0].trim().parse().with_context(|| format!("{what}: {:?}", parts[0]))?,
        parts[1].trim().parse().with_context(|| format!("{what}: {:?}", parts[1]))?,
    ))
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("--y-grid must be lo:hi:step, got {s:?}");
    }
    let lo: f64 = parts[0].trim().parse().context("grid lo")?;
    let hi: f64 = parts[1].trim().parse().context("grid hi")?;
    let step: f64 = parts[2].trim().parse().context("grid step")?;
    if !(step > 0.0) || !lo.is_finite() || !hi.is_finite() || hi < lo {
        bail!("--y-grid needs finite lo <= hi and step > 0, got {s:?}");
    }
    let n = ((hi - lo) / step).round() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).filter(|y| *y <= hi + 1e-12 * step).collect())
}

fn parse_horizons(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            let t: f64 = p.trim().parse().with_context(|| format!("horizon {p:?}"))?;
            if !(t > 0.0) {
                bail!("horizons must be positive, got {t}");
            }
            Ok(t)
        })
        .collect()
}

fn parse_methods(s: &str) -> anyhow::Result<Vec<Method>> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            if let Some(step) = p.strip_prefix("euler:") {
                let step: f64 = step.parse().with_context(|| format!("euler step {step:?}"))?;
                return Ok(Method::Euler { step });
            }
            match p {
                "srrs" => Ok(Method::Srrs),
                "rrs" => Ok(Method::Rrs),
                other => bail!("unknown method {other:?} (srrs, rrs, or euler:STEP)"),
            }
        })
        .collect()
}

fn run_density(args: &DensityArgs) -> anyhow::Result<()> {
    let (t1, t2) = parse_pair(&args.theta, "--theta")?;
    let params = ThetaParams::with_default_shift(t1, t2, args.z)?;
    let ys = parse_grid(&args.y_grid)?;

    if let Some(bridge) = &args.bridge {
        let (t_total, x2) = parse_pair(bridge, "--bridge")?;
        let mut rows = Vec::with_capacity(ys.len());
        for &y in &ys {
            let q = bridge_density_q(args.t, t_total, args.x, x2, y, &params, args.tol, args.n_cap)?;
            rows.push(BridgeRow {
                t: args.t,
                t_total,
                x1: args.x,
                x2,
                y,
                q: q.value,
                n_terms: q.n_terms,
                remainder_bound: q.remainder_bound,
            });
        }
        let path = write_csv(&args.out, &rows)?;
        eprintln!("wrote {} bridge rows to {}", rows.len(), path.display());
        return Ok(());
    }

    let wrapped = SkewParams::Theta(params);
    let mut rows = Vec::with_capacity(ys.len());
    for &y in &ys {
        let v = series::v_theta(args.t, args.x, y, &params, args.tol, args.n_cap)?;
        let p = transition_density_p(args.t, args.x, y, &wrapped, args.tol, args.n_cap)?;
        rows.push(DensityRow {
            t: args.t,
            x: args.x,
            y,
            v: v.value,
            p: p.value,
            n_terms: p.n_terms,
            remainder_bound: p.remainder_bound,
        });
    }
    let path = write_csv(&args.out, &rows)?;
    eprintln!("wrote {} density rows to {}", rows.len(), path.display());
    Ok(())
}

fn run_sample(args: &SampleArgs) -> anyhow::Result<()> {
    let spec = args.drift.load()?;
    let cfg = args.tuning.config(args.t);
    let method = match args.method {
        MethodArg::Srrs => Method::Srrs,
        MethodArg::Rrs => Method::Rrs,
        MethodArg::Euler => Method::Euler { step: args.step },
    };
    let batch = batch_terminal(&spec, args.x0, method, args.n, &cfg)?;
    let rows = terminal_rows(args.t, &batch);
    let path = write_csv(&args.out, &rows)?;
    let meta = BatchMetadata::new(
        "sample",
        &args.drift.drift,
        method.to_string(),
        args.x0,
        args.n,
        &cfg,
        &batch.stats,
    );
    write_json(sidecar_path(&path), &meta)?;
    eprintln!("wrote {} terminal samples to {}", rows.len(), path.display());

    if let Some(bandwidth) = args.kde {
        let sample = SampleBatch::new(batch.values.clone(), method.to_string())?;
        let grid = kde_default_grid(&sample, bandwidth, 512);
        let estimate = kde(&sample, bandwidth, &grid)?;
        let kde_path = path.with_extension("kde.csv");
        write_csv(&kde_path, &kde_rows(&estimate))?;
        eprintln!("wrote KDE to {}", kde_path.display());
    }
    Ok(())
}

fn run_path(args: &PathArgs) -> anyhow::Result<()> {
    let spec = args.drift.load()?;
    let cfg = args.tuning.config(args.t);
    let mut rng = stream_rng(args.tuning.seed, 0);
    let (skeleton, stats) = match args.method {
        MethodArg::Srrs => srrs_with_stats(&spec, args.x0, 0.0, args.t, &cfg, &mut rng)?,
        MethodArg::Rrs => rrs_with_stats(&spec, args.x0, 0.0, args.t, &cfg, &mut rng)?,
        MethodArg::Euler => bail!("path needs an exact method (srrs or rrs), not euler"),
    };
    let skeleton = match args.refine_step {
        Some(h) if h > 0.0 => {
            let theta = ThetaParams::from_drift(&spec)?;
            let n = (args.t / h).floor() as usize;
            let times: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
            fill_path_shifted(&skeleton, &times, &theta, spec.z1(), &mut rng)?
        }
        Some(h) => bail!("--refine-step must be positive, got {h}"),
        None => skeleton,
    };
    let rows = skeleton_rows(0, &skeleton);
    let path = write_csv(&args.out, &rows)?;
    let meta = BatchMetadata::new(
        "path",
        &args.drift.drift,
        match args.method {
            MethodArg::Srrs => "srrs",
            MethodArg::Rrs => "rrs",
            MethodArg::Euler => unreachable!(),
        },
        args.x0,
        1,
        &cfg,
        &stats,
    );
    write_json(sidecar_path(&path), &meta)?;
    eprintln!("wrote {} path points to {}", rows.len(), path.display());
    Ok(())
}

fn run_benchmark(args: &BenchmarkArgs) -> anyhow::Result<()> {
    let spec = args.drift.load()?;
    let methods = parse_methods(&args.methods)?;
    let horizons = parse_horizons(&args.horizons)?;
    let cfg = args.tuning.config(horizons.iter().cloned().fold(1.0, f64::max));
    let mut rows = Vec::new();
    for method in methods {
        rows.extend(benchmark(&spec, method, args.x0, &horizons, args.n, &cfg)?);
    }
    let path = write_csv(&args.out, &rows)?;
    eprintln!("wrote {} benchmark rows to {}", rows.len(), path.display());
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let opts = VerifyOptions {
        oracle_slack: args.tol,
    };
    let reports = match args.suite.as_str() {
        "oracle" => suite_oracle(&opts),
        "normalization" => suite_normalization(&opts),
        "sampler" => suite_sampler(&opts),
        "sim" => suite_sim(&opts),
        "all" => suite_all(&opts),
        other => bail!("unknown suite {other:?} (oracle, normalization, sampler, sim, all)"),
    };
    for report in &reports {
        println!("{}", report.line());
    }
    let (passed, total) = (reports.iter().filter(|r| r.passed).count(), reports.len());
    println!("{passed}/{total} checks passed");
    Ok(if all_passed(&reports) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();

    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Density(args) => run_density(args).map(|()| ExitCode::SUCCESS),
        Command::Sample(args) => run_sample(args).map(|()| ExitCode::SUCCESS),
        Command::Path(args) => run_path(args).map(|()| ExitCode::SUCCESS),
        Command::Benchmark(args) => run_benchmark(args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => run_verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
