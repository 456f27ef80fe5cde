//! Seeded Monte-Carlo experiments: generate model instances, run the
//! trained pipeline next to a direct ℓ1 baseline, check the size and
//! uniqueness assumptions, and aggregate the trials into CSV and JSON.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l1::{basis_pursuit, SolveStatus};
use crate::linalg::{
    binomial, match_up_to_signed_scaled_permutation, numerical_rank, rip_constant, scaling_matrix, singular_values,
    stable_rank, support_size, DenseMatrix,
};
use crate::models::{
    gen_component_matrix, gen_gaussian_sensing, gen_sparse_combinator, gen_training_matrix, EntryLaw, ModelSpec,
};
use crate::pipeline::{suggest_parameters, train_and_recover, PipelineOptions, SuggestKnobs, SuggestedDims};
use crate::rng::{Phase, RngStream};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "CSTRAIN_THREADS";

/// Relative error under which a recovered vector counts as exact.
pub const EXACT_TOL: f64 = 1e-6;

/// Largest `2u` for which uniqueness of `u`-sparse solutions is enumerated.
pub const UNIQUENESS_MAX_COLS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitDims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub s: usize,
    pub t: usize,
    pub t_bar: usize,
    pub u: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuggestRequest {
    pub p: usize,
    pub t: usize,
    #[serde(default)]
    pub knobs: SuggestKnobs,
}

/// Either explicit sizes or a request for [`suggest_parameters`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DimsSpec {
    Explicit(ExplicitDims),
    Suggest { suggest: SuggestRequest },
}

impl DimsSpec {
    pub fn resolve(&self) -> Result<SuggestedDims> {
        let d = match *self {
            DimsSpec::Explicit(e) => SuggestedDims::explicit(e.m, e.n, e.p, e.q, e.s, e.t, e.t_bar, e.u),
            DimsSpec::Suggest { suggest } => suggest_parameters(suggest.p, suggest.t, &suggest.knobs)?,
        };
        d.validate()?;
        Ok(d)
    }
}

/// Entry law of the component matrix; the density defaults to `s/n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub theta: Option<f64>,
    pub dist: EntryLaw,
    pub nu: f64,
    pub k_psi2: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { theta: None, dist: EntryLaw::StandardGaussian, nu: 1.0, k_psi2: 1.0 }
    }
}

impl ModelConfig {
    pub fn spec(&self, dims: &SuggestedDims) -> ModelSpec {
        ModelSpec { theta: self.theta.unwrap_or(dims.theta), dist: self.dist, nu: self.nu, k_psi2: self.k_psi2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Checks {
    pub verify_rip: bool,
    /// Largest number of supports enumerated by any exhaustive check.
    pub rip_budget: u64,
    pub verify_uniqueness: bool,
}

impl Default for Checks {
    fn default() -> Self {
        Checks { verify_rip: true, rip_budget: 100_000, verify_uniqueness: false }
    }
}

/// Constants of the size and stable-rank assumptions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssumptionConstants {
    pub c1: f64,
    pub c2: f64,
    /// Constant `C` of the stable-rank bound.
    pub c_rank: f64,
    /// Target RIP constant `ε` of the stable-rank bound.
    pub epsilon: f64,
}

impl Default for AssumptionConstants {
    fn default() -> Self {
        AssumptionConstants { c1: 1.0, c2: 1.0, c_rank: 1.0, epsilon: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dims: DimsSpec,
    #[serde(default)]
    pub model: ModelConfig,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Values of `u` swept by the pipeline; all of `1..=n` when absent.
    #[serde(default)]
    pub u_candidates: Option<Vec<usize>>,
    #[serde(default)]
    pub workers: Option<usize>,
    /// When false the timing columns are written as 0 so that output files
    /// are reproducible byte for byte.
    #[serde(default = "default_true")]
    pub record_timings: bool,
    #[serde(default)]
    pub constants: AssumptionConstants,
    #[serde(default)]
    pub pipeline: PipelineOptions,
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Checks the configuration and returns the resolved dimensions.
    pub fn validate(&self) -> Result<SuggestedDims> {
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be at least 1".into()));
        }
        let dims = self.dims.resolve()?;
        self.model.spec(&dims).validate()?;
        self.pipeline.factor.solver.validate()?;
        if let Some(u) = &self.u_candidates {
            if u.is_empty() || u.iter().any(|&v| v == 0 || v > dims.n) {
                return Err(Error::InvalidSpec(format!("u_candidates must be nonempty and within [1, {}]", dims.n)));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidSpec("workers must be at least 1".into()));
        }
        Ok(dims)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Assumed,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `p ≤ q`, `n > c₁ p² ln²p`, `2/p ≤ s/n ≤ c₂/√p`.
    pub sizes: Verdict,
    /// `srank(A) ≥ C K⁴ (n t / (s ε²)) ln(3p/(ε t))`.
    pub stable_rank: Verdict,
    pub stable_rank_value: f64,
    pub stable_rank_required: f64,
    /// `u ≥ s t` and every `2u` columns of `A` independent.
    pub uniqueness: Verdict,
    /// Every column of `X` has at most `2s` nonzeros.
    pub component_sparsity: Verdict,
    /// `X` has numerical rank `p`.
    pub component_rank: Verdict,
}

impl AssumptionReport {
    pub fn any_failed(&self) -> bool {
        [self.sizes, self.stable_rank, self.uniqueness, self.component_sparsity, self.component_rank]
            .contains(&Verdict::Fail)
    }
}

fn columns_independent(a: &DenseMatrix, cols: &[usize]) -> bool {
    let sv = singular_values(&a.as_dmatrix().select_columns(cols));
    let smax = sv[0];
    smax > 0.0 && sv[sv.len() - 1] > 1e-10 * smax
}

/// Evaluates the size, stable-rank and uniqueness assumptions for one
/// instance. Uniqueness is enumerated only when `2u ≤ 14` and the number of
/// `2u`-subsets fits the budget; otherwise it is reported as assumed unless
/// `2u > m` already rules it out.
pub fn check_assumptions(
    dims: &SuggestedDims,
    model: &ModelSpec,
    constants: &AssumptionConstants,
    checks: &Checks,
    a: &DenseMatrix,
    x: &DenseMatrix,
) -> AssumptionReport {
    let (p, n, s, t) = (dims.p as f64, dims.n as f64, dims.s as f64, dims.t as f64);
    let ratio = s / n;
    let lp = p.ln();
    let sizes =
        dims.p <= dims.q && n > constants.c1 * p * p * lp * lp && 2.0 / p <= ratio && ratio <= constants.c2 / p.sqrt();

    let k = model.k_psi2 * model.nu;
    let eps = constants.epsilon;
    let required = constants.c_rank * k.powi(4) * (n * t / (s * eps * eps)) * (3.0 * p / (eps * t)).ln();
    let value = stable_rank(a).unwrap_or(0.0);

    let two_u = 2 * dims.u;
    let uniqueness = if dims.u < dims.s * dims.t || two_u > a.rows() {
        Verdict::Fail
    } else if checks.verify_uniqueness
        && two_u <= UNIQUENESS_MAX_COLS
        && binomial(a.cols(), two_u) <= checks.rip_budget as u128
    {
        Verdict::from_bool((0..a.cols()).combinations(two_u).all(|c| columns_independent(a, &c)))
    } else {
        Verdict::Assumed
    };

    let max_support = x.columns().map(|c| support_size(&c, 0.0)).max().unwrap_or(0);
    AssumptionReport {
        sizes: Verdict::from_bool(sizes),
        stable_rank: Verdict::from_bool(value >= required),
        stable_rank_value: value,
        stable_rank_required: required,
        uniqueness,
        component_sparsity: Verdict::from_bool(max_support <= 2 * dims.s),
        component_rank: Verdict::from_bool(numerical_rank(x, 1e-10) == dims.p),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// Master seed; the trial is reproduced by `(seed, trial_index)`.
    pub seed: u64,
    pub factorization_matched: bool,
    /// Exhaustive RIP constant of `(√n/‖A‖_F)·A·X·S_X` at sparsity `t`.
    pub rip_epsilon: Option<f64>,
    pub pipeline_exact: bool,
    pub direct_l1_exact: bool,
    pub supp_true: Option<usize>,
    pub supp_pipeline: Option<usize>,
    pub supp_direct: Option<usize>,
    pub t_train_s: f64,
    pub t_recover_s: f64,
    pub u_used: Option<usize>,
    pub assumptions: Option<AssumptionReport>,
    /// `stable_rank(A) ≥ ½·(1-ε)/(1+ε)·st` with `ε` the exhaustive RIP
    /// constant of the normalized `A` at sparsity `st`; small sizes only.
    pub srank_lemma_holds: Option<bool>,
    pub pipeline_error: Option<String>,
    pub error: Option<String>,
}

impl TrialRecord {
    fn failed(cfg: &ExperimentConfig, trial_index: u64, err: &Error) -> Self {
        TrialRecord {
            trial_index,
            seed: cfg.master_seed,
            factorization_matched: false,
            rip_epsilon: None,
            pipeline_exact: false,
            direct_l1_exact: false,
            supp_true: None,
            supp_pipeline: None,
            supp_direct: None,
            t_train_s: 0.0,
            t_recover_s: 0.0,
            u_used: None,
            assumptions: None,
            srank_lemma_holds: None,
            pipeline_error: None,
            error: Some(format!("{}: {err}", err.name())),
        }
    }
}

fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn normalized(a: &DenseMatrix) -> Result<DenseMatrix> {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    Ok(a.scaled((a.cols() as f64).sqrt() / fro))
}

/// Generated data of one trial.
#[derive(Clone, Debug)]
pub struct TrialInstance {
    pub a: DenseMatrix,
    pub x: DenseMatrix,
    pub z_train: DenseMatrix,
    pub z: Vec<f64>,
    pub training: DenseMatrix,
    pub x_true: Vec<f64>,
    pub b: Vec<f64>,
}

/// `A`, `X`, `Z`, `z` from their per-trial streams, `B = A X Z`, `b = A X z`.
pub fn generate_instance(
    dims: &SuggestedDims,
    model: &ModelSpec,
    master_seed: u64,
    trial_index: u64,
) -> Result<TrialInstance> {
    let stream = |phase| RngStream::for_trial(master_seed, trial_index, phase);
    let a = gen_gaussian_sensing(dims.m, dims.n, &stream(Phase::Sensing))?;
    let x = gen_component_matrix(dims.n, dims.p, model, &stream(Phase::Components))?;
    let z_train = gen_training_matrix(dims.p, dims.q, dims.k_easy(), &stream(Phase::Training))?;
    let z = gen_sparse_combinator(dims.p, dims.k_target(), &stream(Phase::Combinator))?;
    let training = a.matmul(&x.matmul(&z_train)?)?;
    let x_true = x.matvec(&z)?;
    let b = a.matvec(&x_true)?;
    Ok(TrialInstance { a, x, z_train, z, training, x_true, b })
}

/// Runs one trial. Generation and solver failures become a record with the
/// `error` field set.
pub fn run_trial(cfg: &ExperimentConfig, trial_index: u64) -> TrialRecord {
    match try_run_trial(cfg, trial_index) {
        Ok(r) => r,
        Err(e) => TrialRecord::failed(cfg, trial_index, &e),
    }
}

fn try_run_trial(cfg: &ExperimentConfig, trial_index: u64) -> Result<TrialRecord> {
    let dims = cfg.validate()?;
    let model = cfg.model.spec(&dims);
    let inst = generate_instance(&dims, &model, cfg.master_seed, trial_index)?;
    let solver = cfg.pipeline.factor.solver;
    let tau = |v: &[f64]| solver.tau_supp(v);

    let u_candidates: Vec<usize> = cfg.u_candidates.clone().unwrap_or_else(|| (1..=dims.n).collect());
    let opts = PipelineOptions { expected_rank: Some(dims.p), ..cfg.pipeline };
    let pairing = RngStream::for_trial(cfg.master_seed, trial_index, Phase::Pairing);
    let sweep = train_and_recover(&inst.a, &inst.b, &inst.training, &u_candidates, &pairing, &opts);

    let clock = Instant::now();
    let direct = basis_pursuit(&inst.a, &inst.b, &solver);
    let t_direct = clock.elapsed().as_secs_f64();

    let (mut t_train_s, mut t_recover_s) = (0.0, t_direct);
    let mut record = TrialRecord::failed(cfg, trial_index, &Error::AllFailed);
    record.error = None;
    record.supp_true = Some(support_size(&inst.x_true, tau(&inst.x_true)));
    match &sweep {
        Ok(sw) => {
            let rec = &sw.recovery;
            record.pipeline_exact = rel_err(&rec.x, &inst.x_true) <= EXACT_TOL && rec.residual <= solver.feas_tol;
            record.supp_pipeline = Some(rec.support);
            record.u_used = rec.u_used;
            let x_bar = &sw.train.factorization.x_bar;
            record.factorization_matched = x_bar.shape() == inst.x.shape()
                && match_up_to_signed_scaled_permutation(&inst.x, x_bar, EXACT_TOL).is_ok_and(|r| r.matched);
            t_train_s = sw.train_seconds;
            t_recover_s += sw.recover_seconds;
        }
        Err(e) => record.pipeline_error = Some(e.name().to_string()),
    }
    if let Ok(d) = &direct {
        record.direct_l1_exact = d.status == SolveStatus::Optimal && rel_err(&d.x, &inst.x_true) <= EXACT_TOL;
        record.supp_direct = Some(support_size(&d.x, tau(&d.x)));
    }
    if cfg.record_timings {
        record.t_train_s = t_train_s;
        record.t_recover_s = t_recover_s;
    }

    let budget = cfg.checks.rip_budget as u128;
    if cfg.checks.verify_rip && binomial(dims.p, dims.t) <= budget {
        if let Ok(s) = scaling_matrix(&inst.x) {
            let prod = normalized(&inst.a)?.matmul(&s.apply_right(&inst.x)?)?;
            record.rip_epsilon = rip_constant(&prod, dims.t, budget).ok().map(|r| r.epsilon);
        }
    }
    let st = dims.s * dims.t;
    if cfg.checks.verify_rip && st <= dims.m && binomial(dims.n, st) <= budget {
        let an = normalized(&inst.a)?;
        if let Ok(r) = rip_constant(&an, st, budget) {
            let lower = 0.5 * (1.0 - r.epsilon) / (1.0 + r.epsilon) * st as f64;
            record.srank_lemma_holds = Some(stable_rank(&an)? >= lower);
        }
    }
    record.assumptions = Some(check_assumptions(&dims, &model, &cfg.constants, &cfg.checks, &inst.a, &inst.x));
    Ok(record)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub trials: usize,
    pub master_seed: u64,
    pub dims: SuggestedDims,
    pub factorization_rate: f64,
    pub pipeline_rate: f64,
    pub direct_rate: f64,
    /// Mean over trials with a computed RIP constant.
    pub mean_rip_epsilon: Option<f64>,
    pub mean_t_train_s: f64,
    pub mean_t_recover_s: f64,
    /// Trials whose generation or checks failed outright.
    pub failed_trials: usize,
    pub assumption_failures: usize,
    pub records: Vec<TrialRecord>,
}

/// Fixed-order CSV row.
#[derive(Serialize)]
struct CsvRow {
    trial_index: u64,
    seed: u64,
    factorization_matched: bool,
    rip_epsilon: Option<f64>,
    pipeline_exact: bool,
    direct_l1_exact: bool,
    supp_true: Option<usize>,
    supp_pipeline: Option<usize>,
    supp_direct: Option<usize>,
    t_train_s: f64,
    t_recover_s: f64,
}

impl From<&TrialRecord> for CsvRow {
    fn from(r: &TrialRecord) -> Self {
        CsvRow {
            trial_index: r.trial_index,
            seed: r.seed,
            factorization_matched: r.factorization_matched,
            rip_epsilon: r.rip_epsilon,
            pipeline_exact: r.pipeline_exact,
            direct_l1_exact: r.direct_l1_exact,
            supp_true: r.supp_true,
            supp_pipeline: r.supp_pipeline,
            supp_direct: r.supp_direct,
            t_train_s: r.t_train_s,
            t_recover_s: r.t_recover_s,
        }
    }
}

pub fn write_csv<W: std::io::Write>(w: W, records: &[TrialRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(CsvRow::from(r))?;
    }
    out.flush()?;
    Ok(())
}

fn summarize(cfg: &ExperimentConfig, dims: SuggestedDims, records: Vec<TrialRecord>) -> ExperimentSummary {
    let n = records.len() as f64;
    let rate = |f: fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as f64 / n;
    let eps: Vec<f64> = records.iter().filter_map(|r| r.rip_epsilon).collect();
    ExperimentSummary {
        trials: records.len(),
        master_seed: cfg.master_seed,
        dims,
        factorization_rate: rate(|r| r.factorization_matched),
        pipeline_rate: rate(|r| r.pipeline_exact),
        direct_rate: rate(|r| r.direct_l1_exact),
        mean_rip_epsilon: (!eps.is_empty()).then(|| eps.iter().sum::<f64>() / eps.len() as f64),
        mean_t_train_s: records.iter().map(|r| r.t_train_s).sum::<f64>() / n,
        mean_t_recover_s: records.iter().map(|r| r.t_recover_s).sum::<f64>() / n,
        failed_trials: records.iter().filter(|r| r.error.is_some()).count(),
        assumption_failures: records.iter().filter(|r| r.assumptions.as_ref().is_some_and(|a| a.any_failed())).count(),
        records,
    }
}

/// Worker count: the configured value (default: available parallelism),
/// capped by `CSTRAIN_THREADS` when set.
pub fn worker_count(requested: Option<usize>) -> usize {
    let base = requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cap = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&c| c > 0);
    cap.map_or(base, |c| base.min(c)).max(1)
}

/// Runs every trial on a worker pool and writes `trials.csv` and
/// `summary.json` to `output_dir` when one is configured. Records are
/// ordered by trial index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary> {
    let dims = cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(cfg.workers))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    let records: Vec<TrialRecord> =
        pool.install(|| (0..cfg.trials as u64).into_par_iter().map(|i| run_trial(cfg, i)).collect());
    let summary = summarize(cfg, dims, records);
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
        write_csv(fs::File::create(dir.join("trials.csv"))?, &summary.records)?;
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            dims: DimsSpec::Explicit(ExplicitDims { m: 24, n: 40, p: 4, q: 8, s: 8, t: 2, t_bar: 2, u: 16 }),
            model: ModelConfig::default(),
            trials: 2,
            master_seed: 5,
            checks: Checks::default(),
            output_dir: None,
            u_candidates: None,
            workers: Some(1),
            record_timings: false,
            constants: AssumptionConstants::default(),
            pipeline: PipelineOptions::default(),
        }
    }

    #[test]
    fn suggested_sizes_pass_the_size_inequalities() {
        let dims = suggest_parameters(8, 2, &SuggestKnobs::default()).unwrap();
        let model = ModelSpec::gaussian(dims.theta);
        let a = DenseMatrix::identity(4);
        let x = DenseMatrix::identity(4);
        let r = check_assumptions(&dims, &model, &AssumptionConstants::default(), &Checks::default(), &a, &x);
        assert_eq!(r.sizes, Verdict::Pass);
    }

    #[test]
    fn p_above_q_fails_sizes() {
        let dims = SuggestedDims::explicit(10, 277, 8, 4, 70, 2, 1, 140);
        let model = ModelSpec::gaussian(dims.theta);
        let a = DenseMatrix::identity(4);
        let r = check_assumptions(&dims, &model, &AssumptionConstants::default(), &Checks::default(), &a, &a);
        assert_eq!(r.sizes, Verdict::Fail);
    }

    #[test]
    fn identity_sensing_has_unique_sparse_solutions() {
        let dims = SuggestedDims::explicit(6, 6, 2, 2, 1, 2, 1, 2);
        let model = ModelSpec::gaussian(dims.theta);
        let checks = Checks { verify_uniqueness: true, ..Checks::default() };
        let a = DenseMatrix::identity(6);
        let r =
            check_assumptions(&dims, &model, &AssumptionConstants::default(), &checks, &a, &DenseMatrix::identity(6));
        assert_eq!(r.uniqueness, Verdict::Pass);
    }

    #[test]
    fn too_few_rows_flag_uniqueness() {
        let mut cfg = small_config();
        cfg.dims = DimsSpec::Explicit(ExplicitDims { m: 10, n: 40, p: 4, q: 8, s: 8, t: 2, t_bar: 2, u: 16 });
        let r = run_trial(&cfg, 0);
        assert_eq!(r.assumptions.unwrap().uniqueness, Verdict::Fail);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = small_config();
        assert_eq!(run_trial(&cfg, 1), run_trial(&cfg, 1));
    }

    #[test]
    fn single_trial_summary_matches_record() {
        let mut cfg = small_config();
        cfg.trials = 1;
        let s = run_experiment(&cfg).unwrap();
        let r = &s.records[0];
        assert_eq!(s.pipeline_rate, r.pipeline_exact as u8 as f64);
        assert_eq!(s.direct_rate, r.direct_l1_exact as u8 as f64);
        assert_eq!(s.factorization_rate, r.factorization_matched as u8 as f64);
        assert_eq!(s.mean_rip_epsilon, r.rip_epsilon);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = small_config();
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let sugg = r#"{"dims": {"suggest": {"p": 8, "t": 2}}, "trials": 1, "master_seed": 0}"#;
        let c = ExperimentConfig::from_json(sugg).unwrap();
        assert_eq!(c.validate().unwrap().n, 277);
    }

    #[test]
    fn zero_trials_rejected() {
        let mut cfg = small_config();
        cfg.trials = 0;
        assert!(matches!(run_experiment(&cfg), Err(Error::InvalidSpec(_))));
    }
}
