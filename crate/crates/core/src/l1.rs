//! Equality-constrained ℓ1 minimization.
//!
//! * [`basis_pursuit`]: `min ‖x‖₁ s.t. Mx = b`
//! * [`min_l1_hyperplane`]: `min ‖Yw‖₁ s.t. rᵀYw = 1`
//! * [`l1_oracle_bruteforce`]: vertex enumeration for small instances
//!
//! Both solvers first orthogonalize the constraint data with an SVD, run the
//! interior-point method of [`crate::lp`], then polish the iterate by an
//! exact least-squares solve on the detected support.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{default_support_threshold, lstsq, support, thin_svd, DenseMatrix};
use crate::lp::{self, LpProblem};

/// Tolerances for the ℓ1 solvers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative feasibility tolerance, `‖Mx-b‖₂ / max(‖b‖₂, 1)`.
    pub feas_tol: f64,
    /// Relative optimality gap.
    pub gap_tol: f64,
    pub max_iters: usize,
    pub polish: bool,
    /// Numerical zero relative to `max(max_i |x_i|, 1)`.
    pub support_rel_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { feas_tol: 1e-9, gap_tol: 1e-9, max_iters: 50_000, polish: true, support_rel_tol: 1e-6 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.feas_tol > 0.0 && self.gap_tol > 0.0 && self.support_rel_tol >= 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidArgument(format!("bad solver options {self:?}")));
        }
        Ok(())
    }

    /// Support threshold for a vector produced under these options.
    pub fn tau_supp(&self, x: &[f64]) -> f64 {
        default_support_threshold(x, self.support_rel_tol)
    }

    // tighter than the user tolerances; polishing recovers the last digits
    fn ipm_tol(&self) -> f64 {
        (0.1 * self.feas_tol.min(self.gap_tol)).clamp(1e-13, 1e-8)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    MaxIters,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L1Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub feas_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
}

fn l1_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn rel_residual(m: &DMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (m * x - b).norm() / b.norm().max(1.0)
}

/// Thin SVD pieces of a matrix restricted to its numerical rank.
struct RankReveal {
    u: DMatrix<f64>,
    sigma: DVector<f64>,
    v_t: DMatrix<f64>,
}

fn rank_reveal(m: &DMatrix<f64>) -> Result<RankReveal> {
    let svd = thin_svd(m)?;
    let smax = svd.sigma.iter().copied().fold(0.0, f64::max);
    let tol = smax * f64::EPSILON * m.nrows().max(m.ncols()) as f64;
    let r = svd.sigma.iter().filter(|&&s| s > tol && smax > 0.0).count();
    Ok(RankReveal {
        u: svd.u.columns(0, r).into_owned(),
        sigma: svd.sigma.rows(0, r).into_owned(),
        v_t: svd.v_t.rows(0, r).into_owned(),
    })
}

/// Least squares on the columns `cols`; `None` if they are numerically
/// dependent.
fn restricted_lstsq(m: &DMatrix<f64>, cols: &[usize], b: &DVector<f64>) -> Option<DVector<f64>> {
    if cols.is_empty() || cols.len() > m.nrows() {
        return None;
    }
    let sub = m.select_columns(cols);
    let svd = thin_svd(&sub).ok()?;
    let smax = svd.sigma[0];
    let smin = svd.sigma[svd.sigma.len() - 1];
    // NaN singular values count as dependent
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(smin > 1e-11 * smax) {
        return None;
    }
    let x = svd.v_t.transpose() * (svd.u.transpose() * b).component_div(&svd.sigma);
    Some(x)
}

/// `min ‖x‖₁ subject to Mx = b`.
///
/// Returns `Err(Infeasible)` when `b` is not in the range of `M`. A run that
/// cannot certify optimality within the tolerances is reported through
/// `status = MaxIters` together with the best iterate.
pub fn basis_pursuit(m: &DenseMatrix, b: &[f64], opts: &SolverOptions) -> Result<L1Solution> {
    opts.validate()?;
    if m.rows() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} rows vs rhs of length {}", m.rows(), b.len())));
    }
    let mm = m.as_dmatrix();
    let bv = DVector::from_column_slice(b);
    let n = m.cols();
    if bv.amax() == 0.0 {
        return Ok(L1Solution {
            x: vec![0.0; n],
            objective: 0.0,
            feas_residual: 0.0,
            iterations: 0,
            status: SolveStatus::Optimal,
        });
    }

    let rr = rank_reveal(mm)?;
    let r = rr.sigma.len();
    if r == 0 {
        return Err(Error::Infeasible { residual: 1.0 });
    }
    // M = U Σ Vᵀ; on the feasible set Mx = b  ⇔  Vᵀx = Σ⁻¹Uᵀb
    let b_red = (rr.u.transpose() * &bv).component_div(&rr.sigma);
    let x_ls = rr.v_t.transpose() * &b_red;
    let ls_res = rel_residual(mm, &x_ls, &bv);
    if ls_res > opts.feas_tol {
        return Err(Error::Infeasible { residual: ls_res });
    }

    let mut a_lp = DMatrix::zeros(r, 2 * n);
    a_lp.columns_mut(0, n).copy_from(&rr.v_t);
    a_lp.columns_mut(n, n).copy_from(&(-&rr.v_t));
    let c = DVector::from_element(2 * n, 1.0);
    let upper = vec![f64::INFINITY; 2 * n];
    let lp_sol = lp::solve(&LpProblem { a: &a_lp, b: &b_red, c: &c, upper: &upper }, opts.ipm_tol(), opts.max_iters);

    let (x_ipm, y, iterations) = match lp_sol {
        Some(sol) => {
            let x = DVector::from_iterator(n, (0..n).map(|i| sol.x[i] - sol.x[n + i]));
            (x, Some(sol.y), sol.iterations)
        }
        None => (x_ls.clone(), None, 0),
    };

    // dual lower bound: any y with ‖V yᵀ‖∞ ≤ 1 certifies bᵀy ≤ ‖x*‖₁
    let lower_bound = y.map(|y| {
        let vy = rr.v_t.transpose() * &y;
        let s = vy.amax().max(1.0);
        b_red.dot(&y) / s
    });

    let mut x = x_ipm.clone();
    if opts.polish {
        if let Some(xp) = polish_basis_pursuit(mm, &bv, &x_ipm, r, opts) {
            x = xp;
        }
    }

    let xs: Vec<f64> = x.iter().copied().collect();
    let objective = l1_norm(&xs);
    let feas_residual = rel_residual(mm, &x, &bv);
    let certified = match lower_bound {
        Some(lb) => objective - lb <= opts.gap_tol * objective.max(1.0),
        None => false,
    };
    let status = if feas_residual <= opts.feas_tol && certified { SolveStatus::Optimal } else { SolveStatus::MaxIters };
    Ok(L1Solution { x: xs, objective, feas_residual, iterations, status })
}

fn polish_basis_pursuit(
    m: &DMatrix<f64>,
    b: &DVector<f64>,
    x: &DVector<f64>,
    rank: usize,
    opts: &SolverOptions,
) -> Option<DVector<f64>> {
    let xs: Vec<f64> = x.iter().copied().collect();
    let base = l1_norm(&xs);
    let slack = opts.gap_tol * base.max(1.0);
    let tau = opts.tau_supp(&xs);
    let mut attempts = vec![support(&xs, tau)];
    // a non-vertex iterate: fall back to the `rank` largest entries
    let mut by_mag: Vec<usize> = (0..xs.len()).collect();
    by_mag.sort_by(|&i, &j| xs[j].abs().total_cmp(&xs[i].abs()).then(i.cmp(&j)));
    by_mag.truncate(rank);
    by_mag.sort_unstable();
    attempts.push(by_mag);

    for supp in attempts {
        let Some(sol) = restricted_lstsq(m, &supp, b) else { continue };
        let mut full = DVector::zeros(x.len());
        for (k, &i) in supp.iter().enumerate() {
            full[i] = sol[k];
        }
        let fv: Vec<f64> = full.iter().copied().collect();
        if rel_residual(m, &full, b) <= opts.feas_tol && l1_norm(&fv) <= base + slack {
            return Some(full);
        }
    }
    None
}

/// Precomputed data for repeated `min ‖Yw‖₁ s.t. rᵀYw = 1` solves with a
/// fixed `Y` and varying `r`.
pub struct HyperplaneSolver {
    q: DMatrix<f64>,
    v_sigma_inv: DMatrix<f64>,
    y_t: DMatrix<f64>,
    opts: SolverOptions,
}

/// Solution of one hyperplane-constrained problem.
#[derive(Clone, Debug)]
pub struct HyperplaneSolution {
    pub w: Vec<f64>,
    /// `Y w`, computed in the orthonormal basis of `range(Y)`.
    pub s: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl HyperplaneSolver {
    pub fn new(y: &DenseMatrix, opts: &SolverOptions) -> Result<Self> {
        opts.validate()?;
        let rr = rank_reveal(y.as_dmatrix())?;
        let v_sigma_inv = {
            let mut v = rr.v_t.transpose();
            for (k, mut col) in v.column_iter_mut().enumerate() {
                col /= rr.sigma[k];
            }
            v
        };
        Ok(HyperplaneSolver { q: rr.u, v_sigma_inv, y_t: y.as_dmatrix().transpose(), opts: *opts })
    }

    pub fn solve(&self, r: &[f64]) -> Result<HyperplaneSolution> {
        let n = self.q.nrows();
        if r.len() != n {
            return Err(Error::ShapeMismatch(format!("{n} rows vs r of length {}", r.len())));
        }
        let rv = DVector::from_column_slice(r);
        let yr = &self.y_t * &rv;
        let reach = yr.amax();
        if reach <= 1e-12 || self.q.ncols() == 0 {
            return Err(Error::DegenerateConstraint(reach));
        }
        let k = self.q.ncols();
        let c_hat = self.q.transpose() * &rv;

        // dual LP: min -λ  s.t. Qᵀg - ĉλ = Qᵀ1,  0 ≤ g ≤ 2,  λ ≥ 0   (y = g - 1)
        // its equality multipliers are the primal ω with s = Qω
        let mut a_lp = DMatrix::zeros(k, n + 1);
        a_lp.columns_mut(0, n).copy_from(&self.q.transpose());
        a_lp.set_column(n, &(-&c_hat));
        let b_lp = self.q.transpose() * DVector::from_element(n, 1.0);
        let mut c_lp = DVector::zeros(n + 1);
        c_lp[n] = -1.0;
        let mut upper = vec![2.0; n + 1];
        upper[n] = f64::INFINITY;
        let sol = lp::solve(
            &LpProblem { a: &a_lp, b: &b_lp, c: &c_lp, upper: &upper },
            self.opts.ipm_tol(),
            self.opts.max_iters,
        )
        .ok_or(Error::MaxIters(0))?;

        let mut omega = sol.y.clone();
        let normalize = |om: &mut DVector<f64>| {
            let ct = c_hat.dot(om);
            if ct.abs() > 1e-300 {
                *om /= ct;
            }
        };
        normalize(&mut omega);
        let s_ipm = &self.q * &omega;
        let obj_ipm = s_ipm.iter().map(|v| v.abs()).sum::<f64>();
        let dual_value = -sol.primal_obj;

        let mut best = omega;
        let mut best_obj = obj_ipm;
        if self.opts.polish {
            if let Some(om) = self.polish(&s_ipm, &c_hat) {
                let obj = (&self.q * &om).iter().map(|v| v.abs()).sum::<f64>();
                if obj <= obj_ipm + self.opts.gap_tol * obj_ipm.max(1.0) {
                    best = om;
                    best_obj = obj;
                }
            }
        }
        let converged = sol.converged || (best_obj - dual_value).abs() <= self.opts.gap_tol * best_obj.max(1.0);
        if !converged {
            return Err(Error::MaxIters(sol.iterations));
        }
        let s = &self.q * &best;
        let w = &self.v_sigma_inv * &best;
        Ok(HyperplaneSolution {
            w: w.iter().copied().collect(),
            s: s.iter().copied().collect(),
            objective: best_obj,
            iterations: sol.iterations,
        })
    }

    /// Solve `Q_Z ω = 0, ĉᵀω = 1` on the zero set `Z` of the iterate.
    fn polish(&self, s: &DVector<f64>, c_hat: &DVector<f64>) -> Option<DVector<f64>> {
        let sv: Vec<f64> = s.iter().copied().collect();
        let tau = self.opts.tau_supp(&sv);
        let zeros: Vec<usize> = (0..sv.len()).filter(|&i| sv[i].abs() <= tau).collect();
        let k = self.q.ncols();
        let mut sys = DMatrix::zeros(zeros.len() + 1, k);
        for (row, &i) in zeros.iter().enumerate() {
            sys.set_row(row, &self.q.row(i));
        }
        sys.set_row(zeros.len(), &c_hat.transpose());
        let mut rhs = DVector::zeros(zeros.len() + 1);
        rhs[zeros.len()] = 1.0;
        let rhs_m = DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice());
        let mut om = DVector::from_column_slice(lstsq(&sys, &rhs_m, 1e-12).ok()?.as_slice());
        if (&sys * &om - &rhs).norm() > self.opts.feas_tol {
            return None;
        }
        let ct = c_hat.dot(&om);
        om /= ct;
        Some(om)
    }
}

/// `argmin_w ‖Yw‖₁ subject to rᵀYw = 1`.
pub fn min_l1_hyperplane(y: &DenseMatrix, r: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    if y.rows() != r.len() {
        return Err(Error::ShapeMismatch(format!("{} rows vs r of length {}", y.rows(), r.len())));
    }
    Ok(HyperplaneSolver::new(y, opts)?.solve(r)?.w)
}

/// Largest column count accepted by [`l1_oracle_bruteforce`].
pub const ORACLE_MAX_COLS: usize = 14;

/// Exact ℓ1 minimizer by enumerating every column support of size at most
/// `rows(M)` and solving the restricted system exactly. Feasibility of a
/// candidate uses the relative tolerance `1e-9`.
pub fn l1_oracle_bruteforce(m: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if m.cols() > ORACLE_MAX_COLS {
        return Err(Error::TooLarge { cols: m.cols(), limit: ORACLE_MAX_COLS });
    }
    if m.rows() != b.len() {
        return Err(Error::ShapeMismatch(format!("{} rows vs rhs of length {}", m.rows(), b.len())));
    }
    let n = m.cols();
    let bv = DVector::from_column_slice(b);
    if bv.amax() == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mm = m.as_dmatrix();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for size in 1..=m.rows().min(n) {
        for supp in (0..n).combinations(size) {
            let Some(sol) = restricted_lstsq(mm, &supp, &bv) else { continue };
            let mut full = DVector::zeros(n);
            for (k, &i) in supp.iter().enumerate() {
                full[i] = sol[k];
            }
            if rel_residual(mm, &full, &bv) > 1e-9 {
                continue;
            }
            let x: Vec<f64> = full.iter().copied().collect();
            let obj = l1_norm(&x);
            if best.as_ref().is_none_or(|(o, _)| obj < *o) {
                best = Some((obj, x));
            }
        }
    }
    match best {
        Some((_, x)) => Ok(x),
        None => {
            let rr = rank_reveal(mm)?;
            let b_red = (rr.u.transpose() * &bv).component_div(&rr.sigma);
            let x_ls = rr.v_t.transpose() * &b_red;
            Err(Error::Infeasible { residual: rel_residual(mm, &x_ls, &bv) })
        }
    }
}
