//! Sparse matrix factorization `Y = X Z` up to signed scaled permutation.
//!
//! Candidate sparse columns come from ER-SpUD(DC): the rows of `Y` are
//! paired at random and each pair `(j1, j2)` yields one ℓ1 problem
//! `min ‖Yw‖₁ s.t. (e_j1 + e_j2)ᵀ Y w = 1` with candidate `s = Yw`. The
//! factor `X̄` is then built greedily from the sparsest candidates that keep
//! full column rank, and `Z̄` is the least-squares solution of `X̄ Z̄ = Y`.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::l1::{HyperplaneSolver, SolverOptions};
use crate::linalg::{default_support_threshold, lstsq, singular_values, support_size, DenseMatrix};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FactorOptions {
    pub solver: SolverOptions,
    /// Relative singular value threshold of the greedy rank test.
    pub rank_tol: f64,
    /// Largest accepted `‖X̄Z̄ - Y‖_F / ‖Y‖_F`.
    pub max_residual: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions { solver: SolverOptions::default(), rank_tol: 1e-8, max_residual: 1e-8 }
    }
}

/// Output of [`er_spud_dc`]. `candidates[i]` was produced from
/// `pairings[i]`; pairings whose subproblem failed are listed in `skipped`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Vec<f64>>,
    pub pairings: Vec<(usize, usize)>,
    pub skipped: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub x_bar: DenseMatrix,
    pub z_bar: DenseMatrix,
    pub residual: f64,
    pub candidates_kept: usize,
    pub candidates_skipped: usize,
    /// Support size of every selected column of `X̄`.
    pub selected_supports: Vec<usize>,
}

/// Serializable summary of a factorization run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub rows: usize,
    pub rank: usize,
    pub residual: f64,
    pub candidates_kept: usize,
    pub candidates_skipped: usize,
    pub selected_supports: Vec<usize>,
}

impl FactorizationResult {
    pub fn report(&self) -> FactorizationReport {
        FactorizationReport {
            rows: self.x_bar.rows(),
            rank: self.x_bar.cols(),
            residual: self.residual,
            candidates_kept: self.candidates_kept,
            candidates_skipped: self.candidates_skipped,
            selected_supports: self.selected_supports.clone(),
        }
    }
}

/// Random disjoint row pairs; the last row of the permutation is dropped
/// when `n` is odd.
pub fn random_row_pairs(n: usize, stream: &RngStream) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut stream.rng());
    perm.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// ER-SpUD(DC) candidate generation. The pairing is drawn before any solve
/// and results are ordered by pairing index, so the output does not depend
/// on the thread schedule.
pub fn er_spud_dc(y: &DenseMatrix, stream: &RngStream, opts: &SolverOptions) -> Result<CandidateSet> {
    let n = y.rows();
    if n < 2 {
        return Err(Error::BadShape(format!("need at least 2 rows, got {n}")));
    }
    let pairs = random_row_pairs(n, stream);
    if y.max_abs() == 0.0 {
        return Err(Error::AllDegenerate);
    }
    let solver = HyperplaneSolver::new(y, opts)?;
    let outcomes: Vec<Result<Vec<f64>>> = pairs
        .par_iter()
        .map(|&(j1, j2)| {
            let mut r = vec![0.0; n];
            r[j1] = 1.0;
            r[j2] = 1.0;
            solver.solve(&r).map(|sol| sol.s)
        })
        .collect();

    let mut set = CandidateSet::default();
    for (pair, out) in pairs.into_iter().zip(outcomes) {
        match out {
            Ok(s) => {
                set.candidates.push(s);
                set.pairings.push(pair);
            }
            Err(Error::DegenerateConstraint(_)) | Err(Error::MaxIters(_)) => set.skipped.push(pair),
            Err(e) => return Err(e),
        }
    }
    if set.candidates.is_empty() {
        return Err(Error::AllDegenerate);
    }
    Ok(set)
}

fn min_over_max_singular(cols: &[DVector<f64>]) -> f64 {
    let m = DMatrix::from_columns(cols);
    let sv = singular_values(&m);
    let smax = sv[0];
    if smax == 0.0 {
        return 0.0;
    }
    let smin = if cols.len() > m.nrows() { 0.0 } else { sv[sv.len() - 1] };
    smin / smax
}

/// Greedy selection of the sparsest candidates that keep full column rank.
///
/// Support sizes use the per-candidate threshold
/// `support_rel_tol · max(max_i |s_i|, 1)`. Candidates are visited by
/// increasing support size (ties by index); a candidate is taken when the
/// unit-normalized selection stays well conditioned,
/// `σ_min > rank_tol · σ_max`. A candidate rejected once stays dependent as
/// the selection grows, so one ordered pass is the full greedy loop.
pub fn greedy_sparsest_full_rank(cands: &CandidateSet, support_rel_tol: f64, rank_tol: f64) -> Result<DenseMatrix> {
    let usable: Vec<(usize, usize)> = cands
        .candidates
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|v| *v != 0.0))
        .map(|(i, s)| (support_size(s, default_support_threshold(s, support_rel_tol)), i))
        .collect();
    if usable.is_empty() {
        return Err(Error::NoCandidates);
    }
    let rows = cands.candidates[usable[0].1].len();
    let mut order = usable;
    order.sort();

    let mut selected: Vec<usize> = Vec::new();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for (_, i) in order {
        if basis.len() == rows {
            break;
        }
        let v = DVector::from_column_slice(&cands.candidates[i]);
        let unit = &v / v.norm();
        basis.push(unit);
        if min_over_max_singular(&basis) > rank_tol {
            selected.push(i);
        } else {
            basis.pop();
        }
    }
    let columns: Vec<Vec<f64>> = selected.iter().map(|&i| cands.candidates[i].clone()).collect();
    DenseMatrix::from_columns(rows, &columns)
}

/// `Y ≈ X̄ Z̄` with `X̄` from greedy selection over ER-SpUD(DC) candidates.
pub fn sparse_factorization(y: &DenseMatrix, stream: &RngStream, opts: &FactorOptions) -> Result<FactorizationResult> {
    let y_norm = y.frobenius_norm();
    if y_norm == 0.0 {
        return Err(Error::FactorizationFailed("input matrix is zero".into()));
    }
    let cands = er_spud_dc(y, stream, &opts.solver)?;
    let x_bar = greedy_sparsest_full_rank(&cands, opts.solver.support_rel_tol, opts.rank_tol)?;
    if x_bar.cols() == 0 {
        return Err(Error::FactorizationFailed("selected rank is zero".into()));
    }
    let z = lstsq(x_bar.as_dmatrix(), y.as_dmatrix(), 0.0)?;
    let residual = (x_bar.as_dmatrix() * &z - y.as_dmatrix()).norm() / y_norm;
    // a NaN residual must fail
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(residual <= opts.max_residual) {
        return Err(Error::FactorizationFailed(format!("residual {residual:.3e} exceeds {:.1e}", opts.max_residual)));
    }
    let selected_supports =
        x_bar.columns().map(|c| support_size(&c, default_support_threshold(&c, opts.solver.support_rel_tol))).collect();
    Ok(FactorizationResult {
        z_bar: DenseMatrix::from_dmatrix(z)?,
        x_bar,
        residual,
        candidates_kept: cands.candidates.len(),
        candidates_skipped: cands.skipped.len(),
        selected_supports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    fn set(c: Vec<Vec<f64>>) -> CandidateSet {
        let pairings = (0..c.len()).map(|i| (2 * i, 2 * i + 1)).collect();
        CandidateSet { candidates: c, pairings, skipped: vec![] }
    }

    #[test]
    fn duplicates_are_skipped() {
        let x = greedy_sparsest_full_rank(&set(vec![e(3, 0), e(3, 0), e(3, 1)]), 1e-6, 1e-8).unwrap();
        assert_eq!(x.cols(), 2);
        assert_eq!(x.column(0), e(3, 0));
        assert_eq!(x.column(1), e(3, 1));
    }

    #[test]
    fn sparser_candidates_first() {
        let sum = vec![1.0, 1.0, 0.0];
        let x = greedy_sparsest_full_rank(&set(vec![sum, e(3, 0), e(3, 1)]), 1e-6, 1e-8).unwrap();
        assert_eq!(x.cols(), 2);
        assert_eq!(x.column(0), e(3, 0));
        assert_eq!(x.column(1), e(3, 1));
    }

    #[test]
    fn parallel_candidates_give_rank_one() {
        let c = vec![vec![1.0, 2.0, 0.0], vec![-2.0, -4.0, 0.0], vec![0.5, 1.0, 0.0]];
        let x = greedy_sparsest_full_rank(&set(c), 1e-6, 1e-8).unwrap();
        assert_eq!(x.cols(), 1);
    }

    #[test]
    fn no_candidates() {
        assert!(matches!(greedy_sparsest_full_rank(&set(vec![vec![0.0; 3]]), 1e-6, 1e-8), Err(Error::NoCandidates)));
    }

    #[test]
    fn two_rows_give_one_pair() {
        let y = DenseMatrix::from_row_major(2, 2, vec![1.0, 0.5, -0.3, 2.0]).unwrap();
        let c = er_spud_dc(&y, &RngStream::new(1, 0), &SolverOptions::default()).unwrap();
        assert_eq!(c.candidates.len(), 1);
        assert_eq!(c.pairings.len(), 1);
        let (a, b) = c.pairings[0];
        assert_eq!(a + b, 1);
    }

    #[test]
    fn zero_input_is_all_degenerate() {
        let y = DenseMatrix::zeros(4, 2);
        assert!(matches!(er_spud_dc(&y, &RngStream::new(1, 0), &SolverOptions::default()), Err(Error::AllDegenerate)));
    }

    #[test]
    fn odd_row_count_drops_one_row() {
        let pairs = random_row_pairs(7, &RngStream::new(3, 3));
        assert_eq!(pairs.len(), 3);
        let mut seen: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 6);
    }
}
