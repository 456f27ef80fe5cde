//! Top-level algorithms: sparse recovery with a learned component matrix,
//! training from easy problems, the sparsity sweep over `u`, and a
//! parameter-suggestion recipe for experiment sizes.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictlearn::{sparse_factorization, FactorOptions, FactorizationReport, FactorizationResult};
use crate::error::{Error, Result};
use crate::l1::{basis_pursuit, SolveStatus, SolverOptions};
use crate::linalg::{numerical_rank, scaling_matrix, support_size, DenseMatrix};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub factor: FactorOptions,
    /// Rank `p` the kept training solutions must reach; `None` only
    /// requires a nonempty kept set.
    pub expected_rank: Option<usize>,
}

impl PipelineOptions {
    pub fn solver(&self) -> &SolverOptions {
        &self.factor.solver
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub x: Vec<f64>,
    /// Combinator in the normalized learned coordinates, `x = X̄ S z`.
    pub z: Vec<f64>,
    pub u_used: Option<usize>,
    pub support: usize,
    pub solver_status: SolveStatus,
    /// `‖Ax - b‖₂ / max(‖b‖₂, 1)`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub factorization: FactorizationResult,
    pub kept_columns: Vec<usize>,
    pub discarded: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainReport {
    pub factorization: FactorizationReport,
    pub kept_columns: Vec<usize>,
    pub discarded: Vec<usize>,
}

impl TrainResult {
    pub fn report(&self) -> TrainReport {
        TrainReport {
            factorization: self.factorization.report(),
            kept_columns: self.kept_columns.clone(),
            discarded: self.discarded.clone(),
        }
    }
}

fn rel_residual(a: &DenseMatrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = a.matvec(x)?;
    let num = ax.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(num / bn.max(1.0))
}

/// `min ‖z‖₁ s.t. c·A X̄ S z = c·b` with `S = diag(1/‖X̄_k‖)` and
/// `c = √n / ‖A‖_F`; returns `x = X̄ S z`.
pub fn sparse_recovery(
    a: &DenseMatrix,
    b: &[f64],
    x_bar: &DenseMatrix,
    opts: &SolverOptions,
) -> Result<RecoveryResult> {
    if a.cols() != x_bar.rows() {
        return Err(Error::ShapeMismatch(format!("A is {:?} but X̄ is {:?}", a.shape(), x_bar.shape())));
    }
    if a.rows() != b.len() {
        return Err(Error::ShapeMismatch(format!("A has {} rows, b has length {}", a.rows(), b.len())));
    }
    let s = scaling_matrix(x_bar)?;
    let a_fro = a.frobenius_norm();
    if a_fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let c = (a.cols() as f64).sqrt() / a_fro;
    let m = a.scaled(c).matmul(&s.apply_right(x_bar)?)?;
    let rhs: Vec<f64> = b.iter().map(|v| c * v).collect();
    let sol = basis_pursuit(&m, &rhs, opts)?;
    let x = x_bar.matvec(&s.apply_vec(&sol.x))?;
    let support = support_size(&x, opts.tau_supp(&x));
    let residual = rel_residual(a, &x, b)?;
    Ok(RecoveryResult { x, z: sol.x, u_used: None, support, solver_status: sol.status, residual })
}

/// ℓ1 solution of one training column; `None` when the solve failed or was
/// not certified optimal.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSolution {
    pub y: Vec<f64>,
    pub support: usize,
}

/// Basis pursuit on every column of `B`, in column order.
pub fn solve_training_columns(
    a: &DenseMatrix,
    b: &DenseMatrix,
    opts: &SolverOptions,
) -> Result<Vec<Option<TrainingSolution>>> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!("A has {} rows, B has {}", a.rows(), b.rows())));
    }
    opts.validate()?;
    let cols: Vec<Vec<f64>> = b.columns().collect();
    Ok(cols
        .par_iter()
        .map(|bl| match basis_pursuit(a, bl, opts) {
            Ok(sol) if sol.status == SolveStatus::Optimal => {
                let support = support_size(&sol.x, opts.tau_supp(&sol.x));
                Some(TrainingSolution { y: sol.x, support })
            }
            _ => None,
        })
        .collect())
}

fn filter_columns(solutions: &[Option<TrainingSolution>], u: usize) -> (Vec<usize>, Vec<usize>) {
    let mut kept = Vec::new();
    let mut discarded = Vec::new();
    for (l, s) in solutions.iter().enumerate() {
        match s {
            Some(sol) if sol.support <= u => kept.push(l),
            _ => discarded.push(l),
        }
    }
    (kept, discarded)
}

fn factor_kept(
    n: usize,
    solutions: &[Option<TrainingSolution>],
    kept: Vec<usize>,
    discarded: Vec<usize>,
    stream: &RngStream,
    opts: &PipelineOptions,
) -> Result<TrainResult> {
    let need = opts.expected_rank.unwrap_or(1).max(1);
    if kept.len() < need {
        return Err(Error::NotEnoughEasy(format!("{} columns kept, need {need}", kept.len())));
    }
    let cols: Vec<Vec<f64>> =
        kept.iter().map(|&l| solutions[l].as_ref().expect("kept column solved").y.clone()).collect();
    let y_bar = DenseMatrix::from_columns(n, &cols)?;
    let rank = numerical_rank(&y_bar, opts.factor.rank_tol);
    if rank < need {
        return Err(Error::NotEnoughEasy(format!("kept columns have rank {rank}, need {need}")));
    }
    let factorization = sparse_factorization(&y_bar, stream, &opts.factor)?;
    Ok(TrainResult { factorization, kept_columns: kept, discarded })
}

/// Basis pursuit on each training column, the `‖Y_l‖₀ ≤ u` filter, then
/// sparse factorization of the kept solutions.
pub fn train(
    a: &DenseMatrix,
    b: &DenseMatrix,
    u: usize,
    stream: &RngStream,
    opts: &PipelineOptions,
) -> Result<TrainResult> {
    let solutions = solve_training_columns(a, b, opts.solver())?;
    let (kept, discarded) = filter_columns(&solutions, u);
    factor_kept(a.cols(), &solutions, kept, discarded, stream, opts)
}

/// Outcome of one `u` in the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepAttempt {
    pub u: usize,
    pub kept: usize,
    /// `None` on success, otherwise the error name.
    pub error: Option<String>,
    pub support: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub recovery: RecoveryResult,
    /// Training result of `recovery.u_used`.
    pub train: TrainResult,
    pub attempts: Vec<SweepAttempt>,
    pub train_seconds: f64,
    pub recover_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub u_used: Option<usize>,
    pub support: usize,
    pub residual: f64,
    pub solver_status: SolveStatus,
    pub train: TrainReport,
    pub attempts: Vec<SweepAttempt>,
    pub train_seconds: f64,
    pub recover_seconds: f64,
}

impl SweepResult {
    pub fn report(&self) -> SweepReport {
        SweepReport {
            u_used: self.recovery.u_used,
            support: self.recovery.support,
            residual: self.recovery.residual,
            solver_status: self.recovery.solver_status,
            train: self.train.report(),
            attempts: self.attempts.clone(),
            train_seconds: self.train_seconds,
            recover_seconds: self.recover_seconds,
        }
    }
}

/// Train and recover for every `u` in `u_candidates` and keep the sparsest
/// recovered `x` (ties go to the smallest `u`).
///
/// The training solves do not depend on `u` and run once. Every `u` uses the
/// same pairing stream, so two values of `u` with the same kept set give the
/// same factorization, which is computed once.
pub fn train_and_recover(
    a: &DenseMatrix,
    b: &[f64],
    training: &DenseMatrix,
    u_candidates: &[usize],
    stream: &RngStream,
    opts: &PipelineOptions,
) -> Result<SweepResult> {
    let n = a.cols();
    if u_candidates.is_empty() {
        return Err(Error::InvalidArgument("u_candidates is empty".into()));
    }
    if let Some(&u) = u_candidates.iter().find(|&&u| u == 0 || u > n) {
        return Err(Error::InvalidArgument(format!("u = {u} outside [1, {n}]")));
    }
    let clock = Instant::now();
    let solutions = solve_training_columns(a, training, opts.solver())?;
    let mut train_seconds = clock.elapsed().as_secs_f64();
    let mut recover_seconds = 0.0;

    let mut outcomes: Vec<(TrainResult, RecoveryResult)> = Vec::new();
    let mut memo: HashMap<Vec<usize>, std::result::Result<usize, String>> = HashMap::new();
    let mut attempts = Vec::with_capacity(u_candidates.len());
    let mut best: Option<(usize, usize, usize)> = None; // (support, u, outcome index)

    for &u in u_candidates {
        let (kept, discarded) = filter_columns(&solutions, u);
        let n_kept = kept.len();
        let entry = match memo.get(&kept) {
            Some(e) => e.clone(),
            None => {
                let clock = Instant::now();
                let trained = factor_kept(n, &solutions, kept.clone(), discarded, stream, opts);
                train_seconds += clock.elapsed().as_secs_f64();
                let e = trained.and_then(|t| {
                    let clock = Instant::now();
                    let rec = sparse_recovery(a, b, &t.factorization.x_bar, opts.solver());
                    recover_seconds += clock.elapsed().as_secs_f64();
                    let rec = rec?;
                    if rec.solver_status != SolveStatus::Optimal {
                        return Err(Error::MaxIters(0));
                    }
                    outcomes.push((t, rec));
                    Ok(outcomes.len() - 1)
                });
                let e = e.map_err(|err| err.name().to_string());
                memo.insert(kept, e.clone());
                e
            }
        };
        match entry {
            Ok(i) => {
                let support = outcomes[i].1.support;
                attempts.push(SweepAttempt { u, kept: n_kept, error: None, support: Some(support) });
                if best.is_none_or(|(bs, bu, _)| (support, u) < (bs, bu)) {
                    best = Some((support, u, i));
                }
            }
            Err(name) => attempts.push(SweepAttempt { u, kept: n_kept, error: Some(name), support: None }),
        }
    }

    let (_, u, i) = best.ok_or(Error::AllFailed)?;
    let (train, mut recovery) = outcomes.swap_remove(i);
    recovery.u_used = Some(u);
    Ok(SweepResult { recovery, train, attempts, train_seconds, recover_seconds })
}

/// Constants of the size recipe. Defaults are all 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuggestKnobs {
    pub c_n: f64,
    pub c2: f64,
    pub beta_m: f64,
}

impl Default for SuggestKnobs {
    fn default() -> Self {
        SuggestKnobs { c_n: 1.0, c2: 1.0, beta_m: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuggestedDims {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub s: usize,
    pub t: usize,
    pub t_bar: usize,
    pub u: usize,
    pub theta: f64,
}

impl SuggestedDims {
    /// Explicit dimensions with `theta = s/n`.
    #[allow(clippy::too_many_arguments)]
    pub fn explicit(m: usize, n: usize, p: usize, q: usize, s: usize, t: usize, t_bar: usize, u: usize) -> Self {
        SuggestedDims { m, n, p, q, s, t, t_bar, u, theta: s as f64 / n.max(1) as f64 }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self;
        if [d.m, d.n, d.p, d.q, d.s, d.t, d.t_bar, d.u].contains(&0) {
            return Err(Error::InvalidSpec(format!("all dimensions must be positive: {d:?}")));
        }
        if d.q < d.p {
            return Err(Error::InvalidSpec(format!("q = {} < p = {}", d.q, d.p)));
        }
        if d.s > d.n {
            return Err(Error::InvalidSpec(format!("s = {} > n = {}", d.s, d.n)));
        }
        if d.t > d.p || d.t_bar > d.t {
            return Err(Error::InvalidSpec(format!(
                "need t_bar ≤ t ≤ p, got t_bar = {}, t = {}, p = {}",
                d.t_bar, d.t, d.p
            )));
        }
        if d.u > d.n {
            return Err(Error::InvalidSpec(format!("u = {} > n = {}", d.u, d.n)));
        }
        Ok(())
    }

    /// Nonzeros of a target combinator `z`.
    pub fn k_target(&self) -> usize {
        (self.t / 2).max(1)
    }

    /// Nonzeros of a training combinator column.
    pub fn k_easy(&self) -> usize {
        (self.t_bar / 2).max(1)
    }
}

/// `n = ⌈c_n p² ln²p⌉`, `s = ⌈2n/p⌉`, `u = s t`, `m = ⌈β_m t √n ln n⌉`,
/// `q = 2p`, `t̄ = max(1, min(t, ⌊m/(2s)⌋))`.
pub fn suggest_parameters(p: usize, t: usize, knobs: &SuggestKnobs) -> Result<SuggestedDims> {
    if p < 2 || t < 1 {
        return Err(Error::InvalidArgument(format!("need p ≥ 2 and t ≥ 1, got p = {p}, t = {t}")));
    }
    if !(knobs.c_n > 0.0 && knobs.c2 > 0.0 && knobs.beta_m > 0.0) {
        return Err(Error::InvalidArgument(format!("knobs must be positive: {knobs:?}")));
    }
    let pf = p as f64;
    let lp = pf.ln();
    let n = ((knobs.c_n * pf * pf * lp * lp).ceil() as usize).max(1);
    let s = (2 * n).div_ceil(p);
    let theta = s as f64 / n as f64;
    let bound = knobs.c2 / pf.sqrt();
    if theta > bound {
        return Err(Error::InfeasibleKnobs(format!("s/n = {theta:.4} exceeds c2/√p = {bound:.4}")));
    }
    let nf = n as f64;
    let m = ((knobs.beta_m * t as f64 * nf.sqrt() * nf.ln()).ceil() as usize).max(1);
    let t_bar = (m / (2 * s)).min(t).max(1);
    Ok(SuggestedDims { m, n, p, q: 2 * p, s, t, t_bar, u: s * t, theta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suggested_sizes_for_p8_t2() {
        let d = suggest_parameters(8, 2, &SuggestKnobs::default()).unwrap();
        assert_eq!((d.n, d.s, d.q, d.u), (277, 70, 16, 140));
        assert!((d.theta - 70.0 / 277.0).abs() < 1e-15);
        assert!(d.theta <= 1.0 / 8f64.sqrt());
        let m = (2.0 * 277f64.sqrt() * 277f64.ln()).ceil() as usize;
        assert_eq!(d.m, m);
        assert_eq!(d.t_bar, 1);
    }

    #[test]
    fn p2_is_infeasible() {
        assert!(matches!(suggest_parameters(2, 1, &SuggestKnobs::default()), Err(Error::InfeasibleKnobs(_))));
    }

    #[test]
    fn n_is_monotone_in_p() {
        let knobs = SuggestKnobs { c2: 10.0, ..SuggestKnobs::default() };
        let ns: Vec<usize> = (3..30).map(|p| suggest_parameters(p, 1, &knobs).unwrap().n).collect();
        assert!(ns.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_rhs_recovers_zero() {
        let a = DenseMatrix::from_row_major(2, 3, vec![1.0, 0.0, 2.0, 0.0, 1.0, -1.0]).unwrap();
        let r = sparse_recovery(&a, &[0.0, 0.0], &DenseMatrix::identity(3), &SolverOptions::default()).unwrap();
        assert!(r.x.iter().all(|v| *v == 0.0));
        assert_eq!(r.support, 0);
    }

    #[test]
    fn zero_column_in_components() {
        let x = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = sparse_recovery(&DenseMatrix::identity(2), &[1.0, 0.0], &x, &SolverOptions::default());
        assert!(matches!(r, Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn u_zero_discards_everything() {
        let a = DenseMatrix::identity(4);
        let b = DenseMatrix::identity(4);
        let opts = PipelineOptions { expected_rank: Some(4), ..Default::default() };
        let r = train(&a, &b, 0, &RngStream::new(0, 0), &opts);
        assert!(matches!(r, Err(Error::NotEnoughEasy(_))));
    }

    #[test]
    fn sweep_rejects_bad_candidates() {
        let a = DenseMatrix::identity(3);
        let o = PipelineOptions::default();
        let s = RngStream::new(0, 0);
        assert!(matches!(train_and_recover(&a, &[1.0, 0.0, 0.0], &a, &[], &s, &o), Err(Error::InvalidArgument(_))));
        assert!(matches!(train_and_recover(&a, &[1.0, 0.0, 0.0], &a, &[4], &s, &o), Err(Error::InvalidArgument(_))));
    }
}
