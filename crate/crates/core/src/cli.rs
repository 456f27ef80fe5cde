//! Command-line front end. Every subcommand reads its inputs, calls one
//! library operation and writes the result; no numerics live here.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dictlearn::{sparse_factorization, FactorOptions};
use crate::error::{Error, Result};
use crate::harness::{run_experiment, ExperimentConfig};
use crate::io::{read_matrix_file, read_vector_file, write_matrix, write_matrix_file, write_vector_file};
use crate::l1::{basis_pursuit, SolverOptions};
use crate::linalg::{rip_constant, rip_constant_sampled, support_size};
use crate::models::{
    gen_component_matrix, gen_gaussian_sensing, gen_sparse_combinator, gen_training_matrix, ModelSpec,
};
use crate::pipeline::{train, train_and_recover, PipelineOptions};
use crate::rng::RngStream;
use crate::DenseMatrix;

#[derive(Parser, Debug)]
#[command(name = "cstrain", version, about = "Compressed sensing with learned sparse components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded random matrix or vector.
    Gen(GenArgs),
    /// Basis pursuit: min ‖x‖₁ subject to Mx = b.
    Recover(RecoverArgs),
    /// Sparse factorization Y = X̄ Z̄.
    Factorize(FactorizeArgs),
    /// Learn X̄ from training right-hand sides B = A X Z.
    Train(TrainArgs),
    /// Train and recover b over a sweep of sparsity levels u.
    Pipeline(PipelineArgs),
    /// RIP constant of a matrix at sparsity t.
    Rip(RipArgs),
    /// Run a seeded Monte-Carlo experiment from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenKind {
    Component,
    Combinator,
    Training,
    Sensing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Dist {
    Gaussian,
    Rademacher,
    Uniform,
}

#[derive(Args, Debug)]
struct SeedArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream id under the master seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
}

impl SeedArgs {
    fn stream(&self) -> RngStream {
        RngStream::new(self.seed, self.stream)
    }
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long)]
    feas_tol: Option<f64>,
    #[arg(long)]
    gap_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Skip the support least-squares polish.
    #[arg(long)]
    no_polish: bool,
}

impl SolverArgs {
    fn options(&self) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            feas_tol: self.feas_tol.unwrap_or(d.feas_tol),
            gap_tol: self.gap_tol.unwrap_or(d.gap_tol),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            polish: !self.no_polish,
            support_rel_tol: d.support_rel_tol,
        }
    }
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Rows of a component matrix, columns of a sensing matrix.
    #[arg(long)]
    n: Option<usize>,
    /// Number of components.
    #[arg(long)]
    p: Option<usize>,
    /// Training columns.
    #[arg(long)]
    q: Option<usize>,
    /// Nonzeros per combinator column.
    #[arg(long)]
    k: Option<usize>,
    /// Rows of a sensing matrix.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Dist::Gaussian)]
    dist: Dist,
    #[arg(long, default_value_t = 1.0)]
    nu: f64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    /// Solution file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON status file; defaults to `<out>.json`, or standard error.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FactorizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    sensing: PathBuf,
    #[arg(long)]
    training: PathBuf,
    #[arg(long)]
    u: usize,
    /// Rank the kept training solutions must reach.
    #[arg(long)]
    expected_rank: Option<usize>,
    #[command(flatten)]
    seed: SeedArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[arg(long)]
    sensing: PathBuf,
    #[arg(long)]
    training: PathBuf,
    #[arg(long)]
    rhs: PathBuf,
    /// Comma-separated sparsity levels; all of 1..=n when absent.
    #[arg(long, value_delimiter = ',')]
    u: Option<Vec<usize>>,
    #[arg(long)]
    expected_rank: Option<usize>,
    #[command(flatten)]
    seed: SeedArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RipArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    t: usize,
    /// Largest number of supports enumerated.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    /// Sample this many random supports instead of enumerating (lower bound).
    #[arg(long)]
    sampled: Option<usize>,
    #[command(flatten)]
    seed: SeedArgs,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    verify_rip: Option<bool>,
    #[arg(long)]
    rip_budget: Option<u64>,
    #[arg(long)]
    verify_uniqueness: Option<bool>,
    #[arg(long, value_delimiter = ',')]
    u_candidates: Option<Vec<usize>>,
    #[arg(long)]
    record_timings: Option<bool>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes a vector to `out` (standard output when absent) and the JSON
/// report to `report`, `<out>.json` or standard error.
fn emit<T: Serialize>(x: &[f64], out: Option<&Path>, report: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_vector_file(p, x)?,
        None => write_matrix(std::io::stdout().lock(), &DenseMatrix::column_vector(x)?)?,
    }
    match (report, out) {
        (Some(r), _) => write_json(r, value),
        (None, Some(o)) => write_json(&sidecar(o), value),
        (None, None) => {
            writeln!(std::io::stderr(), "{}", serde_json::to_string(value)?)?;
            Ok(())
        }
    }
}

fn need(v: Option<usize>, flag: &str, kind: GenKind) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for --kind {kind:?}")))
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let stream = a.seed.stream();
    let k = a.kind;
    let m = match k {
        GenKind::Component => {
            let theta =
                a.theta.ok_or_else(|| Error::InvalidArgument("--theta is required for --kind component".into()))?;
            let spec = match a.dist {
                Dist::Gaussian => ModelSpec::gaussian(theta),
                Dist::Rademacher => ModelSpec::rademacher(theta),
                Dist::Uniform => ModelSpec::uniform_sym(theta, a.nu),
            };
            gen_component_matrix(need(a.n, "n", k)?, need(a.p, "p", k)?, &spec, &stream)?
        }
        GenKind::Combinator => {
            DenseMatrix::column_vector(&gen_sparse_combinator(need(a.p, "p", k)?, need(a.k, "k", k)?, &stream)?)?
        }
        GenKind::Training => gen_training_matrix(need(a.p, "p", k)?, need(a.q, "q", k)?, need(a.k, "k", k)?, &stream)?,
        GenKind::Sensing => gen_gaussian_sensing(need(a.m, "m", k)?, need(a.n, "n", k)?, &stream)?,
    };
    write_matrix_file(&a.out, &m)?;
    let meta = json!({
        "kind": format!("{:?}", a.kind).to_lowercase(),
        "rows": m.rows(),
        "cols": m.cols(),
        "seed": a.seed.seed,
        "stream": a.seed.stream,
        "theta": a.theta,
        "dist": format!("{:?}", a.dist).to_lowercase(),
        "nu": a.nu,
        "k": a.k,
    });
    write_json(&sidecar(&a.out), &meta)
}

fn cmd_recover(a: &RecoverArgs) -> Result<()> {
    let m = read_matrix_file(&a.matrix)?;
    let b = read_vector_file(&a.rhs)?;
    let opts = a.solver.options();
    let sol = basis_pursuit(&m, &b, &opts)?;
    let report = json!({
        "status": sol.status,
        "objective": sol.objective,
        "feas_residual": sol.feas_residual,
        "iterations": sol.iterations,
        "support": support_size(&sol.x, opts.tau_supp(&sol.x)),
    });
    emit(&sol.x, a.out.as_deref(), a.report.as_deref(), &report)
}

fn cmd_factorize(a: &FactorizeArgs) -> Result<()> {
    let y = read_matrix_file(&a.input)?;
    let mut opts = FactorOptions::default();
    if let Some(t) = a.rank_tol {
        opts.rank_tol = t;
    }
    let f = sparse_factorization(&y, &a.seed.stream(), &opts)?;
    fs::create_dir_all(&a.out_dir)?;
    write_matrix_file(&a.out_dir.join("x_bar.txt"), &f.x_bar)?;
    write_matrix_file(&a.out_dir.join("z_bar.txt"), &f.z_bar)?;
    write_json(&a.out_dir.join("factorize.json"), &f.report())
}

fn pipeline_options(solver: SolverOptions, expected_rank: Option<usize>) -> PipelineOptions {
    PipelineOptions { factor: FactorOptions { solver, ..FactorOptions::default() }, expected_rank }
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let am = read_matrix_file(&a.sensing)?;
    let bm = read_matrix_file(&a.training)?;
    let opts = pipeline_options(a.solver.options(), a.expected_rank);
    let t = train(&am, &bm, a.u, &a.seed.stream(), &opts)?;
    fs::create_dir_all(&a.out_dir)?;
    write_matrix_file(&a.out_dir.join("x_bar.txt"), &t.factorization.x_bar)?;
    write_matrix_file(&a.out_dir.join("z_bar.txt"), &t.factorization.z_bar)?;
    write_json(&a.out_dir.join("train.json"), &t.report())
}

fn cmd_pipeline(a: &PipelineArgs) -> Result<()> {
    let am = read_matrix_file(&a.sensing)?;
    let bm = read_matrix_file(&a.training)?;
    let b = read_vector_file(&a.rhs)?;
    let u: Vec<usize> = a.u.clone().unwrap_or_else(|| (1..=am.cols()).collect());
    let opts = pipeline_options(a.solver.options(), a.expected_rank);
    let sweep = train_and_recover(&am, &b, &bm, &u, &a.seed.stream(), &opts)?;
    emit(&sweep.recovery.x, a.out.as_deref(), a.report.as_deref(), &sweep.report())
}

fn cmd_rip(a: &RipArgs) -> Result<()> {
    let m = read_matrix_file(&a.matrix)?;
    let est = match a.sampled {
        Some(k) => rip_constant_sampled(&m, a.t, k, &mut a.seed.stream().rng())?,
        None => rip_constant(&m, a.t, a.budget as u128)?,
    };
    writeln!(std::io::stdout(), "{}", est.epsilon)?;
    Ok(())
}

fn cmd_experiment(a: &ExperimentArgs) -> Result<()> {
    let mut cfg = ExperimentConfig::from_file(&a.config)?;
    if let Some(v) = a.trials {
        cfg.trials = v;
    }
    if let Some(v) = a.master_seed {
        cfg.master_seed = v;
    }
    if let Some(v) = &a.output_dir {
        cfg.output_dir = Some(v.clone());
    }
    if let Some(v) = a.workers {
        cfg.workers = Some(v);
    }
    if let Some(v) = a.verify_rip {
        cfg.checks.verify_rip = v;
    }
    if let Some(v) = a.rip_budget {
        cfg.checks.rip_budget = v;
    }
    if let Some(v) = a.verify_uniqueness {
        cfg.checks.verify_uniqueness = v;
    }
    if let Some(v) = &a.u_candidates {
        cfg.u_candidates = Some(v.clone());
    }
    if let Some(v) = a.record_timings {
        cfg.record_timings = v;
    }
    if cfg.output_dir.is_none() {
        cfg.output_dir = Some(PathBuf::from("."));
    }
    let summary = run_experiment(&cfg)?;
    let mut err = std::io::stderr().lock();
    for r in &summary.records {
        writeln!(
            err,
            "trial {}: pipeline_exact={} direct_l1_exact={} factorization_matched={}{}",
            r.trial_index,
            r.pipeline_exact,
            r.direct_l1_exact,
            r.factorization_matched,
            r.error.as_ref().map(|e| format!(" error={e}")).unwrap_or_default()
        )?;
    }
    writeln!(
        std::io::stdout(),
        "trials={} pipeline_rate={} direct_rate={} factorization_rate={}",
        summary.trials,
        summary.pipeline_rate,
        summary.direct_rate,
        summary.factorization_rate
    )?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Recover(a) => cmd_recover(a),
        Command::Factorize(a) => cmd_factorize(a),
        Command::Train(a) => cmd_train(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Rip(a) => cmd_rip(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

/// Exit code 0 on success, 1 on a domain error (its name goes to standard
/// error), 2 on a usage error.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: InvalidArgument: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        assert_eq!(dispatch(["cstrain", "rip", "--bogus"]), 2);
        assert_eq!(dispatch(["cstrain"]), 2);
    }
}
