use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use uncertainty_core::gaussian::{realize, GaussianSpec};
use uncertainty_core::grid::io::{export, Encoding};
use uncertainty_core::radial::RadialQuadrature;
use uncertainty_core::search::{
    minimize_product_functional, minimize_sum_functional, probe_nonattainment, trace_csv, SearchOptions, SearchResult,
};
use uncertainty_core::suite::{refinement_study, run_suite, Suite, SuiteConfig, ANNULUS_RADII, MIN_FIDELITY};
use uncertainty_core::{Error, GridSpec, Scheme};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Numerical verification of equality-form uncertainty relations.
#[derive(Parser, Debug)]
#[command(name = "uncertainty", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and emit reports. Exit 0 iff every report passed.
    Verify(VerifyArgs),
    /// Run a variational search or the non-attainment probe.
    Search(SearchArgs),
    /// Fit the convergence order of one identity over a sequence of grids.
    Refine(RefineArgs),
    /// Work with sampled states.
    State {
        #[command(subcommand)]
        command: StateCommand,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// appendix | section2 | momentum-position | dilation | hardy | coulomb | search | all
    #[arg(value_name = "SUITE")]
    suite: Option<String>,
    /// Same as the positional suite.
    #[arg(long = "suite", value_name = "SUITE", conflicts_with = "suite")]
    suite_flag: Option<String>,
    /// JSON scenario file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spatial dimension [default: 3 for hardy, coulomb and radial dilation; 1 otherwise]
    #[arg(long)]
    n: Option<usize>,
    /// Points per grid axis [default: 256 for n=1; 64 otherwise]
    #[arg(long = "N")]
    points_per_axis: Option<usize>,
    /// Half width of the box [-L, L)^n [default: 12 for n=1; 10 for n=2; 6 for hardy and coulomb; 8 otherwise]
    #[arg(long = "L")]
    half_width: Option<f64>,
    /// Grid offset as a fraction of the spacing [default: 0.5]
    #[arg(long)]
    offset: Option<f64>,
    /// spectral | cd2 | cd4 [default: spectral]
    #[arg(long)]
    scheme: Option<String>,
    /// Relative tolerance [default: 1e-12 algebraic; 1e-8 spectral and radial; 1e-3 for cd4 and
    /// hardy/coulomb grids; 5e-2 for cd2; 1e-4 search]
    #[arg(long)]
    tol: Option<f64>,
    /// Random pairs, states or search seeds [default: 1000 algebraic; 5 search; 4 on 3-D grids; 20 otherwise]
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed of every random generator [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Use the one-dimensional radial quadrature for dilation, hardy and coulomb
    #[arg(long)]
    radial: bool,
    /// Outer radius of the radial quadrature [default: 40]
    #[arg(long = "R")]
    r_max: Option<f64>,
    /// Nodes of the radial quadrature [default: 20000]
    #[arg(long)]
    points: Option<usize>,
    /// Vector dimension of the algebraic suites [default: random in 2..=64]
    #[arg(long)]
    dim: Option<usize>,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the residual table (CSV) here
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SearchKind {
    Sum,
    Product,
    Nonattainment,
}

#[derive(Args, Debug)]
struct SearchArgs {
    kind: SearchKind,
    /// Spatial dimension; at most 2 for sum and product, at least 3 for nonattainment
    /// [default: 1, or 3 for nonattainment]
    #[arg(long)]
    n: Option<usize>,
    /// Points per grid axis
    #[arg(long = "N", default_value_t = 256)]
    points_per_axis: usize,
    /// Half width of the box
    #[arg(long = "L", default_value_t = 12.0)]
    half_width: f64,
    /// Grid offset as a fraction of the spacing
    #[arg(long, default_value_t = 0.5)]
    offset: f64,
    /// spectral | cd2 | cd4
    #[arg(long, default_value = "spectral")]
    scheme: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Allowed distance of the converged value from n
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// First trial step of each line search
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Backtracking factor
    #[arg(long, default_value_t = 0.5)]
    backtrack: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Relative functional change that counts as converged
    #[arg(long, default_value_t = 1e-10)]
    rel_change: f64,
    /// Annulus radii of the non-attainment probe
    #[arg(long = "R", value_delimiter = ',', default_values_t = ANNULUS_RADII)]
    r_values: Vec<f64>,
    /// Nodes of the log-radial quadrature of the probe
    #[arg(long, default_value_t = 20000)]
    points: usize,
    /// Write the descent trace (CSV) here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write a JSON summary here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StateKind {
    Coherent,
    Squeezed,
    SqueezedGen,
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// Gaussian family
    #[arg(long, value_enum, default_value_t = StateKind::Coherent)]
    kind: StateKind,
    /// Ratio ‖∇φ‖/‖xφ‖ of squeezed states
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Global phase
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Argument of the unimodular sign factor of generalized squeezed states
    #[arg(long, default_value_t = std::f64::consts::PI)]
    sigma_arg: f64,
    /// Target norm
    #[arg(long, default_value_t = 1.0)]
    norm: f64,
    /// JSON GaussianSpec file; replaces the flags above
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RefineArgs {
    /// Identity to track, e.g. pm.trace, dil.pythagoras, dl.quadratic_form, hardy.equality
    #[arg(long, default_value = "pm.trace")]
    identity: String,
    /// Points per axis of each grid, comma separated, increasing
    #[arg(long = "N", value_delimiter = ',', default_values_t = [128usize, 256, 512])]
    points: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long = "L", default_value_t = 12.0)]
    half_width: f64,
    #[arg(long, default_value_t = 0.5)]
    offset: f64,
    /// spectral | cd2 | cd4
    #[arg(long, default_value = "cd2")]
    scheme: String,
    #[command(flatten)]
    state: StateArgs,
    /// Write the table (CSV) here
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum StateCommand {
    /// Sample a Gaussian on a grid and write header plus data
    Export {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long = "N", default_value_t = 256)]
        points_per_axis: usize,
        #[arg(long = "L", default_value_t = 12.0)]
        half_width: f64,
        #[arg(long, default_value_t = 0.5)]
        offset: f64,
        #[arg(long, default_value = "spectral")]
        scheme: String,
        #[command(flatten)]
        state: StateArgs,
        /// binary or csv data file
        #[arg(long, default_value = "binary")]
        format: String,
        /// Path of the JSON header; the data file sits next to it
        #[arg(long)]
        out: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Verification(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn scheme(s: &str) -> Result<Scheme, Failure> {
    Ok(s.parse()?)
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str::<SuiteConfig>(&text).map_err(|e| usage(format!("bad config {}: {e}", p.display())))?
        }
        None => SuiteConfig::default(),
    };
    match a.suite.or(a.suite_flag) {
        Some(s) => cfg.suite = s.parse::<Suite>()?,
        None if a.config.is_none() => return Err(usage("no suite given")),
        None => {}
    }
    cfg.n = a.n.or(cfg.n);
    cfg.points_per_axis = a.points_per_axis.or(cfg.points_per_axis);
    cfg.half_width = a.half_width.or(cfg.half_width);
    cfg.tol = a.tol.or(cfg.tol);
    cfg.trials = a.trials.or(cfg.trials);
    cfg.dim = a.dim.or(cfg.dim);
    cfg.radial |= a.radial;
    if let Some(v) = a.offset {
        cfg.offset = v;
    }
    if let Some(v) = &a.scheme {
        cfg.scheme = scheme(v)?;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.r_max {
        cfg.r_max = v;
    }
    if let Some(v) = a.points {
        cfg.points = v;
    }

    let out = run_suite(&cfg)?;
    if let Some(p) = &a.out {
        write_file(p, &out.to_json()?)?;
    }
    if let Some(p) = &a.csv {
        write_file(p, &out.residual_csv())?;
    }
    let mut summary: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
    for r in &out.reports {
        let e = summary.entry(&r.identity_id).or_insert((0, 0, 0.0));
        e.0 += 1;
        e.1 += usize::from(!r.passed);
        e.2 = e.2.max(r.rel_residual);
    }
    println!("{:<40} {:>7} {:>7} {:>12}", "identity_id", "reports", "failed", "max_rel");
    for (id, (count, failed, max)) in &summary {
        println!("{id:<40} {count:>7} {failed:>7} {max:>12.3e}");
    }
    if out.passed() {
        println!("all {} reports passed", out.reports.len());
        Ok(())
    } else {
        Err(Failure::Verification(out.failing_ids()))
    }
}

fn print_result(r: &SearchResult, n: usize) {
    println!("functional   {:?}", r.functional);
    println!("value        {:.12}", r.value);
    println!("value - n    {:.3e}", r.value - n as f64);
    println!("fidelity     {:.9}", r.fidelity);
    println!("lambda_est   {:.9}", r.lambda_est);
    println!("iterations   {}", r.iterations);
    println!("converged    {}", r.converged);
}

fn search(a: SearchArgs) -> Result<(), Failure> {
    if let SearchKind::Nonattainment = a.kind {
        let n = a.n.unwrap_or(3);
        let quad = RadialQuadrature::new(n, a.r_values.iter().cloned().fold(1.0, f64::max), a.points)?;
        let table = probe_nonattainment(&quad, &a.r_values, 1e-8)?;
        println!("{:>12} {:>16} {:>16}", "R", "rho", "gap");
        for row in &table.rows {
            println!("{:>12} {:>16.12} {:>16.6e}", row.r_max, row.rho, row.gap);
        }
        println!("fitted c     {:.6}", table.fitted_c);
        if let Some(p) = &a.out {
            write_file(p, &serde_json::to_string_pretty(&table).map_err(Error::from)?)?;
        }
        let mut failed = Vec::new();
        if !table.strictly_decreasing {
            failed.push("nonattainment.decreasing".to_string());
        }
        if !table.all_above_one {
            failed.push("nonattainment.above_one".to_string());
        }
        return if failed.is_empty() { Ok(()) } else { Err(Failure::Verification(failed)) };
    }
    let n = a.n.unwrap_or(1);
    let grid = GridSpec::new(n, a.points_per_axis, a.half_width, a.offset, scheme(&a.scheme)?)?;
    let opts = SearchOptions {
        step: a.step,
        backtrack: a.backtrack,
        max_iters: a.max_iters,
        rel_change: a.rel_change,
        ..SearchOptions::default()
    };
    let (res, id) = match a.kind {
        SearchKind::Sum => (minimize_sum_functional(&grid, a.seed, &opts)?, "search.sum"),
        _ => (minimize_product_functional(&grid, a.seed, &opts)?, "search.product"),
    };
    print_result(&res, n);
    if let Some(p) = &a.trace {
        write_file(p, &trace_csv(&res.trace))?;
    }
    if let Some(p) = &a.out {
        let summary = serde_json::json!({
            "functional": res.functional,
            "grid": grid,
            "seed": a.seed,
            "value": res.value,
            "fidelity": res.fidelity,
            "lambda_est": res.lambda_est,
            "iterations": res.iterations,
            "converged": res.converged,
        });
        write_file(p, &serde_json::to_string_pretty(&summary).map_err(Error::from)?)?;
    }
    let mut failed = Vec::new();
    if (res.value - n as f64).abs() > a.tol {
        failed.push(format!("{id}_value"));
    }
    if res.fidelity < MIN_FIDELITY {
        failed.push(format!("{id}_fidelity"));
    }
    if !res.converged {
        failed.push(format!("{id}_converged"));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed))
    }
}

fn gaussian(a: &StateArgs, n: usize) -> Result<GaussianSpec, Failure> {
    if let Some(p) = &a.spec {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
        let spec: GaussianSpec = serde_json::from_str(&text).map_err(|e| usage(format!("bad spec: {e}")))?;
        spec.validate()?;
        return Ok(spec);
    }
    Ok(match a.kind {
        StateKind::Coherent => GaussianSpec::coherent(n, a.norm, a.theta)?,
        StateKind::Squeezed => GaussianSpec::squeezed(n, a.norm, a.lambda, a.theta)?,
        StateKind::SqueezedGen => {
            GaussianSpec::squeezed_gen(n, a.norm, a.lambda, a.theta, Complex64::from_polar(1.0, a.sigma_arg))?
        }
    })
}

fn refine(a: RefineArgs) -> Result<(), Failure> {
    let s = scheme(&a.scheme)?;
    let grids = a
        .points
        .iter()
        .map(|&p| GridSpec::new(a.n, p, a.half_width, a.offset, s))
        .collect::<Result<Vec<_>, _>>()?;
    let study = refinement_study(&a.identity, &grids, &gaussian(&a.state, a.n)?)?;
    let csv = study.to_csv();
    print!("{csv}");
    if let Some(p) = &a.csv {
        write_file(p, &csv)?;
    }
    Ok(())
}

fn state(c: StateCommand) -> Result<(), Failure> {
    match c {
        StateCommand::Export { n, points_per_axis, half_width, offset, scheme: sch, state, format, out } => {
            let grid = GridSpec::new(n, points_per_axis, half_width, offset, scheme(&sch)?)?;
            let field = realize(&gaussian(&state, n)?, &grid)?;
            let enc = match format.as_str() {
                "binary" | "bin" => Encoding::Binary,
                "csv" => Encoding::Csv,
                other => return Err(usage(format!("unknown format `{other}`"))),
            };
            let data = export(&field, &out, enc)?;
            println!("header {}", out.display());
            println!("data   {}", data.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
        Command::Refine(a) => refine(a),
        Command::State { command } => state(command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(ids)) => {
            eprintln!("FAILED: {}", ids.join(", "));
            ExitCode::from(EXIT_FAIL)
        }
    }
}
