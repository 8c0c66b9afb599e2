//! `renyi-sc`: Rényi entropies, protocol simulations, converse bounds and
//! the randomized verification suites from the command line.
//!
//! Exit codes: 0 on success, 1 when a suite fails or a bound is violated,
//! 2 on usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use renyi_sc::bounds::{exponent_curve, vn_limit_check, AlphaGrid, BoundProblem, BoundSource};
use renyi_sc::entropy::{
    cmi_generalizations, conditional_entropy, conditional_mutual_information, mutual_information, renyi_entropy,
    sandwiched_divergence, OptConfig, OptimizedValue,
};
use renyi_sc::harness::{check_protocol_bounds, falsify_bound_comparison, run_inequality_suite, Direction, SUITES};
use renyi_sc::protocol::file::read_instance;
use renyi_sc::protocol::ProtocolKind;
use renyi_sc::tensor::io::{read_state, StateFile};
use renyi_sc::tensor::DensityOperator;

#[derive(Parser)]
#[command(name = "renyi-sc", version, about = "Sandwiched Rényi entropies and strong-converse bounds (all values in bits)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rényi entropy S_α of a state or one of its marginals.
    Entropy(EntropyArgs),
    /// Sandwiched Rényi divergence D̃_α(ρ‖σ).
    Divergence(DivergenceArgs),
    /// Optimized conditional entropy S̃_α(A|B).
    ConditionalEntropy(PairArgs),
    /// Optimized mutual information Ĩ_α(A;B).
    MutualInfo(PairArgs),
    /// Rényi conditional mutual information and its two generalizations.
    Cmi(CmiArgs),
    /// Converse exponents of a protocol instance over an α-grid.
    ExponentCurve(CurveArgs),
    /// Run a protocol instance and report its merit and costs.
    Simulate(SimulateArgs),
    /// Run an inequality suite or a protocol soundness sweep.
    Verify(VerifyArgs),
    /// Search for classical witnesses that the two extraction bounds are incomparable.
    Falsify(FalsifyArgs),
    /// Gaps between the bound expressions near α = 1 and their von Neumann values.
    Limits(LimitsArgs),
}

#[derive(Args)]
struct OptArgs {
    /// Seed for the optimizer's random starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of optimizer starts.
    #[arg(long, default_value_t = 8)]
    starts: usize,
}

impl OptArgs {
    fn config(&self) -> OptConfig {
        OptConfig { seed: self.seed, starts: self.starts, ..OptConfig::default() }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EntropyArgs {
    /// State file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: f64,
    /// Comma-separated labels of the marginal (default: the whole state).
    #[arg(long, value_delimiter = ',')]
    labels: Vec<String>,
}

#[derive(Args)]
struct DivergenceArgs {
    #[arg(long)]
    rho: PathBuf,
    #[arg(long)]
    sigma: PathBuf,
    #[arg(long)]
    alpha: f64,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: f64,
    /// Comma-separated labels of the first system.
    #[arg(long, value_delimiter = ',', required = true)]
    a: Vec<String>,
    /// Comma-separated labels of the second system.
    #[arg(long, value_delimiter = ',', required = true)]
    b: Vec<String>,
    /// Print the optimizer, residual and method as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum CmiVariant {
    /// The norm expression Ĩ_α(A;B|C).
    Renyi,
    /// S̃_α(A|C) − S̃_β(A|BC).
    First,
    /// Ĩ_α(A;BC) − Ĩ_β(A;C).
    Second,
}

#[derive(Args)]
struct CmiArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    a: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    b: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    c: Vec<String>,
    #[arg(long, value_enum, default_value = "renyi")]
    variant: CmiVariant,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct CurveArgs {
    /// Protocol instance file; its simulated costs are the rates.
    #[arg(long)]
    instance: PathBuf,
    /// Override a rate, as `key=value` (repeatable).
    #[arg(long = "rate", value_parser = parse_rate)]
    rates: Vec<(String, f64)>,
    /// α-grid as `start:end:count`.
    #[arg(long, default_value = "0.51:0.99:25")]
    grid: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Also evaluate every bound on this α-grid and exit 1 if one is violated.
    #[arg(long)]
    check_bounds: Option<String>,
    /// Slack allowed between the merit and a bound.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Inequality suite id, or `all`.
    #[arg(long, conflicts_with = "protocol", required_unless_present_any = ["protocol", "list"])]
    suite: Option<String>,
    /// Protocol kind for a soundness sweep.
    #[arg(long)]
    protocol: Option<String>,
    /// List the suite ids and exit.
    #[arg(long)]
    list: bool,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subsystem dimensions, reused cyclically.
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    dims: Vec<usize>,
    /// Tolerance for closed-form checks; optimizer-backed checks use at least 1e-6.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// α-grid for protocol sweeps.
    #[arg(long, default_value = "0.51:0.99:25")]
    grid: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FalsifyArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "0.51:0.99:25")]
    grid: String,
    /// Directory for the counterexample state files and the report.
    #[arg(long, default_value = "counterexamples")]
    out_dir: PathBuf,
    /// Optimizer starts for the cross-checks and the re-verification.
    #[arg(long, default_value_t = 8)]
    starts: usize,
}

#[derive(Args)]
struct LimitsArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Distance of the first order from 1.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    opt: OptArgs,
}

fn parse_rate(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("`{s}` should read key=value"))?;
    let v: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.to_string(), v))
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Check(String),
    Usage(String),
}

impl From<renyi_sc::Error> for Failure {
    fn from(e: renyi_sc::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = Result<(), Failure>;

fn emit(text: &str, output: Option<&Path>) -> Run {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn state(path: &Path) -> Result<DensityOperator, Failure> {
    Ok(read_state(path)?)
}

fn optimized(v: &OptimizedValue, json: bool) -> String {
    if json {
        to_json(&json!({
            "value": v.value,
            "residual": v.residual,
            "method": v.method,
            "optimizer": StateFile::from_state(&v.optimizer),
        }))
    } else {
        format!("{:?}\n", v.value)
    }
}

fn entropy(a: &EntropyArgs) -> Run {
    let rho = state(&a.input)?;
    let rho = if a.labels.is_empty() { rho } else { rho.partial_trace(&a.labels)? };
    println!("{:?}", renyi_entropy(&rho, a.alpha)?);
    Ok(())
}

fn divergence(a: &DivergenceArgs) -> Run {
    let rho = state(&a.rho)?;
    let sigma = state(&a.sigma)?;
    println!("{:?}", sandwiched_divergence(&rho, &sigma.as_operator(), a.alpha)?);
    Ok(())
}

fn pair(a: &PairArgs, mutual: bool) -> Run {
    let rho = state(&a.input)?;
    let cfg = a.opt.config();
    let v = if mutual {
        mutual_information(&rho, &a.a, &a.b, a.alpha, &cfg)?
    } else {
        conditional_entropy(&rho, &a.a, &a.b, a.alpha, &cfg)?
    };
    print!("{}", optimized(&v, a.json));
    Ok(())
}

fn cmi(a: &CmiArgs) -> Run {
    let rho = state(&a.input)?;
    let v = match a.variant {
        CmiVariant::Renyi => conditional_mutual_information(&rho, &a.a, &a.b, &a.c, a.alpha)?,
        CmiVariant::First => cmi_generalizations(&rho, &a.a, &a.b, &a.c, a.alpha, &a.opt.config())?.0,
        CmiVariant::Second => cmi_generalizations(&rho, &a.a, &a.b, &a.c, a.alpha, &a.opt.config())?.1,
    };
    println!("{v:?}");
    Ok(())
}

fn exponent(a: &CurveArgs) -> Run {
    let grid = AlphaGrid::parse(&a.grid)?;
    let inst = read_instance(&a.instance)?;
    let cfg = a.opt.config();
    let out = inst.run(&cfg)?;
    let mut problem = BoundProblem::for_outcome(BoundSource::of_instance(&inst), &out);
    for (k, v) in &a.rates {
        problem.rates.insert(k.clone(), *v);
    }
    let curve = exponent_curve(&problem, &grid, &cfg)?;
    let text = match a.format {
        Format::Csv => curve.to_csv(),
        Format::Json => to_json(&curve),
    };
    emit(&text, a.output.as_deref())
}

fn simulate(a: &SimulateArgs) -> Run {
    let inst = read_instance(&a.instance)?;
    let cfg = a.opt.config();
    let out = inst.run(&cfg)?;
    let mut report = json!({
        "kind": out.kind,
        "copies": out.copies,
        "merit": out.merit,
        "costs": out.costs,
    });
    let mut violated = Vec::new();
    if let Some(spec) = &a.check_bounds {
        let grid = AlphaGrid::parse(spec)?;
        let problem = BoundProblem::for_outcome(BoundSource::of_instance(&inst), &out);
        let curve = exponent_curve(&problem, &grid, &cfg)?;
        for e in &curve.entries {
            if out.merit > e.merit_bound() + a.tol {
                violated.push(json!({ "bound_id": e.bound_id, "alpha": e.alpha, "merit_bound": e.merit_bound() }));
            }
        }
        report["bounds_checked"] = json!(curve.entries.len());
        report["violations"] = json!(violated);
    }
    emit(&to_json(&report), a.output.as_deref())?;
    if violated.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} bound violations", violated.len())))
    }
}

fn verify(a: &VerifyArgs) -> Run {
    if a.list {
        for s in SUITES {
            println!("{}\t{}", s.id, s.about);
        }
        return Ok(());
    }
    let reports = if let Some(kind) = &a.protocol {
        let kind = ProtocolKind::parse(kind)?;
        vec![check_protocol_bounds(kind, a.trials, &a.dims, a.seed, &AlphaGrid::parse(&a.grid)?)?]
    } else {
        let id = a.suite.as_deref().unwrap_or("all");
        let ids: Vec<&str> = if id == "all" { SUITES.iter().map(|s| s.id).collect() } else { vec![id] };
        ids.into_iter()
            .map(|id| run_inequality_suite(id, a.trials, &a.dims, a.seed, a.tol))
            .collect::<Result<Vec<_>, _>>()?
    };
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.suite.as_str()).collect();
    let text = if reports.len() == 1 { to_json(&reports[0]) } else { to_json(&reports) };
    emit(&text, a.output.as_deref())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("failing suites: {}", failed.join(", "))))
    }
}

fn falsify(a: &FalsifyArgs) -> Run {
    let grid = AlphaGrid::parse(&a.grid)?;
    let cfg = OptConfig { seed: a.seed, starts: a.starts, ..OptConfig::default() };
    let report = falsify_bound_comparison(a.trials, a.seed, &grid, &cfg)?;
    fs::create_dir_all(&a.out_dir)?;
    for c in &report.counterexamples {
        let dir = match c.direction {
            Direction::LeftViolated => "left",
            Direction::RightViolated => "right",
        };
        fs::write(a.out_dir.join(format!("counterexample-{dir}-{}.json", c.trial)), to_json(&c.state))?;
    }
    fs::write(a.out_dir.join("report.json"), to_json(&report))?;
    println!(
        "{} trials: {} left-violated, {} right-violated; cross-check gap {:e}",
        report.trials,
        report.found(Direction::LeftViolated),
        report.found(Direction::RightViolated),
        report.max_cross_check_gap
    );
    if report.cross_check_failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "closed form and optimizer disagree on trials {:?}",
            report.cross_check_failures
        )))
    }
}

fn limits(a: &LimitsArgs) -> Run {
    let inst = read_instance(&a.instance)?;
    let report = vn_limit_check(inst.kind(), &BoundSource::of_instance(&inst), a.eps, &a.opt.config())?;
    emit(&to_json(&report), a.output.as_deref())?;
    let stuck: Vec<&str> = report.entries.iter().filter(|e| !e.shrinks()).map(|e| e.bound_id.as_str()).collect();
    if stuck.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("gap does not shrink for {}", stuck.join(", "))))
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("RENYI_SC_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("RENYI_SC_THREADS must be a nonnegative integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Entropy(a) => entropy(a),
        Command::Divergence(a) => divergence(a),
        Command::ConditionalEntropy(a) => pair(a, false),
        Command::MutualInfo(a) => pair(a, true),
        Command::Cmi(a) => cmi(a),
        Command::ExponentCurve(a) => exponent(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Falsify(a) => falsify(a),
        Command::Limits(a) => limits(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("renyi-sc: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("renyi-sc: error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}
