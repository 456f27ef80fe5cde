//! Dense matrices and the matrix quantities used throughout the pipeline:
//! column scaling, stable rank, support counting, brute-force RIP constants
//! and equivalence up to signed scaled column permutation.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column count up to which the spectral norm comes from a full SVD.
pub const SVD_SPECTRAL_LIMIT: usize = 512;

/// Real dense matrix with finite entries.
///
/// Storage is delegated to [`nalgebra::DMatrix`]; the logical layout exposed
/// through [`DenseMatrix::from_row_major`] and the text format is row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::BadShape(format!("{rows}x{cols} matrix")));
        }
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Wraps an nalgebra matrix, rejecting NaN and infinities.
    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if !m[(r, c)].is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(DenseMatrix(m))
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::ShapeMismatch("columns of unequal length".into()));
        }
        let cols: Vec<DVector<f64>> = columns.iter().map(|c| DVector::from_column_slice(c)).collect();
        if cols.is_empty() || rows == 0 {
            return Err(Error::BadShape(format!("{rows}x{} matrix", cols.len())));
        }
        Self::from_dmatrix(DMatrix::from_columns(&cols))
    }

    pub fn column_vector(v: &[f64]) -> Result<Self> {
        Self::from_row_major(v.len(), 1, v.to_vec())
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.0.column(k).iter().copied().collect()
    }

    pub fn columns(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.cols()).map(move |k| self.column(k))
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    /// Submatrix formed by the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        DenseMatrix(self.0.select_columns(idx))
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix(self.0.transpose())
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != other.rows() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(DenseMatrix(&self.0 * &other.0))
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.cols() != x.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows(),
                self.cols(),
                x.len()
            )));
        }
        Ok((&self.0 * DVector::from_column_slice(x)).iter().copied().collect())
    }

    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix(&self.0 * c)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn column_norms(&self) -> Vec<f64> {
        self.0.column_iter().map(|c| c.norm()).collect()
    }
}

/// `diag(1/‖X_1‖₂, …, 1/‖X_p‖₂)` for a matrix `X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingDiagonal {
    pub inverse_norms: Vec<f64>,
}

impl ScalingDiagonal {
    /// `X · diag(self)`.
    pub fn apply_right(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.cols() != self.inverse_norms.len() {
            return Err(Error::ShapeMismatch(format!(
                "scaling of length {} for {} columns",
                self.inverse_norms.len(),
                x.cols()
            )));
        }
        let mut m = x.as_dmatrix().clone();
        for (k, s) in self.inverse_norms.iter().enumerate() {
            m.column_mut(k).scale_mut(*s);
        }
        Ok(DenseMatrix(m))
    }

    /// `diag(self) · z`.
    pub fn apply_vec(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.inverse_norms).map(|(a, s)| a * s).collect()
    }
}

pub fn scaling_matrix(x: &DenseMatrix) -> Result<ScalingDiagonal> {
    let norms = x.column_norms();
    let mut inverse_norms = Vec::with_capacity(norms.len());
    for (k, nrm) in norms.into_iter().enumerate() {
        if nrm < 1e-300 {
            return Err(Error::ZeroColumn(k));
        }
        inverse_norms.push(1.0 / nrm);
    }
    Ok(ScalingDiagonal { inverse_norms })
}

/// Thin SVD `A = U diag(σ) Vᵀ`, `σ` nonincreasing.
#[derive(Clone, Debug)]
pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

fn to_faer(a: &DMatrix<f64>) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Backed by faer: nalgebra's SVD loses accuracy on some rank-deficient
/// inputs.
pub(crate) fn thin_svd(a: &DMatrix<f64>) -> Result<ThinSvd> {
    let svd = to_faer(a).thin_svd().map_err(|e| Error::FactorizationFailed(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    Ok(ThinSvd {
        u: from_faer(svd.U()),
        sigma: DVector::from_fn(s.nrows(), |i, _| s[i]),
        v_t: from_faer(svd.V()).transpose(),
    })
}

/// Singular values in nonincreasing order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    match to_faer(a).singular_values() {
        Ok(sv) => sv,
        Err(_) => {
            let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
            sv.sort_by(|x, y| y.total_cmp(x));
            sv
        }
    }
}

/// Minimum-norm least squares `argmin ‖A X - B‖_F`, discarding singular
/// values at or below `rcond · σ_max`.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    let svd = thin_svd(a)?;
    let smax = svd.sigma.iter().copied().fold(0.0, f64::max);
    let mut ut_b = svd.u.transpose() * b;
    for (k, s) in svd.sigma.iter().enumerate() {
        let inv = if *s > rcond * smax && *s > 0.0 { 1.0 / s } else { 0.0 };
        ut_b.row_mut(k).scale_mut(inv);
    }
    Ok(svd.v_t.transpose() * ut_b)
}

/// Largest singular value. Full SVD up to [`SVD_SPECTRAL_LIMIT`] columns,
/// power iteration on `AᵀA` beyond.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    if a.cols() <= SVD_SPECTRAL_LIMIT {
        singular_values(a.as_dmatrix()).first().copied().unwrap_or(0.0)
    } else {
        power_iteration_norm(a.as_dmatrix(), 1e-12, 10_000)
    }
}

fn power_iteration_norm(a: &DMatrix<f64>, tol: f64, max_iters: usize) -> f64 {
    let n = a.ncols();
    // deterministic, non-degenerate start
    let mut v = DVector::from_fn(n, |i, _| 1.0 + (i as f64 * 0.618_033_988_749_895).fract());
    v /= v.norm();
    let mut sigma = 0.0;
    for _ in 0..max_iters {
        let av = a * &v;
        let mut w = a.transpose() * &av;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        w /= nw;
        let next = (a * &w).norm();
        let done = (next - sigma).abs() <= tol * next.max(1e-300);
        sigma = next;
        v = w;
        if done {
            break;
        }
    }
    sigma
}

/// `‖A‖_F² / ‖A‖²`.
pub fn stable_rank(a: &DenseMatrix) -> Result<f64> {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let spec = spectral_norm(a);
    Ok((fro * fro) / (spec * spec))
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(a.as_dmatrix());
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Count of entries with `|x_i| > tau_supp`.
pub fn support_size(x: &[f64], tau_supp: f64) -> usize {
    x.iter().filter(|v| v.abs() > tau_supp).count()
}

/// Indices of entries with `|x_i| > tau_supp`.
pub fn support(x: &[f64], tau_supp: f64) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, v)| v.abs() > tau_supp).map(|(i, _)| i).collect()
}

/// Default numerical zero: `rel · max(max_i |x_i|, 1)`.
pub fn default_support_threshold(x: &[f64], rel: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    rel * m.max(1.0)
}

pub fn column_supports(x: &DenseMatrix, tau_supp: f64) -> Vec<usize> {
    x.as_dmatrix().column_iter().map(|c| c.iter().filter(|v| v.abs() > tau_supp).count()).collect()
}

/// Result of a RIP computation. Sampled estimates are lower bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate {
    pub sparsity_t: usize,
    pub epsilon: f64,
    pub supports_checked: u64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub exhaustive: bool,
}

/// `binomial(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn extreme_singular_values(m: &DenseMatrix, cols: &[usize]) -> (f64, f64) {
    let sub = m.as_dmatrix().select_columns(cols);
    let sv = singular_values(&sub);
    let smax = sv.first().copied().unwrap_or(0.0);
    // more columns than rows: a zero singular value is implied
    let smin = if cols.len() > m.rows() { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
    (smin, smax)
}

struct RipAccumulator {
    sigma_min: f64,
    sigma_max: f64,
    checked: u64,
}

impl RipAccumulator {
    fn new() -> Self {
        RipAccumulator { sigma_min: f64::INFINITY, sigma_max: 0.0, checked: 0 }
    }

    fn push(&mut self, (lo, hi): (f64, f64)) {
        self.sigma_min = self.sigma_min.min(lo);
        self.sigma_max = self.sigma_max.max(hi);
        self.checked += 1;
    }

    fn finish(self, t: usize, exhaustive: bool) -> RipEstimate {
        let epsilon = (1.0 - self.sigma_min).max(self.sigma_max - 1.0).max(0.0);
        RipEstimate {
            sparsity_t: t,
            epsilon,
            supports_checked: self.checked,
            sigma_min: self.sigma_min,
            sigma_max: self.sigma_max,
            exhaustive,
        }
    }
}

fn check_rip_args(m: &DenseMatrix, t: usize) -> Result<()> {
    if t == 0 || t > m.cols() {
        return Err(Error::InvalidArgument(format!("sparsity {t} must lie in 1..={}", m.cols())));
    }
    Ok(())
}

/// Exact `(t, ε)`-RIP constant by enumerating every `t`-column submatrix.
pub fn rip_constant(m: &DenseMatrix, t: usize, max_supports: u128) -> Result<RipEstimate> {
    check_rip_args(m, t)?;
    let needed = binomial(m.cols(), t);
    if needed > max_supports {
        return Err(Error::TooManySupports { needed, budget: max_supports });
    }
    let mut acc = RipAccumulator::new();
    for cols in (0..m.cols()).combinations(t) {
        acc.push(extreme_singular_values(m, &cols));
    }
    Ok(acc.finish(t, true))
}

/// Lower bound on the RIP constant from `samples` uniformly drawn supports.
pub fn rip_constant_sampled<R: Rng + ?Sized>(
    m: &DenseMatrix,
    t: usize,
    samples: usize,
    rng: &mut R,
) -> Result<RipEstimate> {
    check_rip_args(m, t)?;
    let mut acc = RipAccumulator::new();
    for _ in 0..samples.max(1) {
        let mut cols = index::sample(rng, m.cols(), t).into_vec();
        cols.sort_unstable();
        acc.push(extreme_singular_values(m, &cols));
    }
    Ok(acc.finish(t, false))
}

/// Column correspondence between a reference and a candidate matrix:
/// `cand[:, j] ≈ signs[j] · scales[j] · ref[:, permutation[j]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub matched: bool,
    pub permutation: Vec<usize>,
    pub signs: Vec<f64>,
    pub scales: Vec<f64>,
    pub max_residual: f64,
}

/// Greedy one-to-one matching on |cosine similarity|; ties go to the lowest
/// (reference, candidate) index pair.
pub fn match_up_to_signed_scaled_permutation(
    x_ref: &DenseMatrix,
    x_cand: &DenseMatrix,
    tol: f64,
) -> Result<EquivalenceReport> {
    if x_ref.shape() != x_cand.shape() {
        return Err(Error::ShapeMismatch(format!("reference {:?} vs candidate {:?}", x_ref.shape(), x_cand.shape())));
    }
    let p = x_ref.cols();
    let ref_norms = x_ref.column_norms();
    let cand_norms = x_cand.column_norms();
    for (k, n) in ref_norms.iter().chain(cand_norms.iter()).enumerate() {
        if *n < 1e-300 {
            return Err(Error::ZeroColumn(k % p));
        }
    }
    let gram = x_ref.as_dmatrix().transpose() * x_cand.as_dmatrix();

    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(p * p);
    for i in 0..p {
        for j in 0..p {
            pairs.push(((gram[(i, j)] / (ref_norms[i] * cand_norms[j])).abs(), i, j));
        }
    }
    // stable sort keeps (i, j) order among equal similarities
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut ref_used = vec![false; p];
    let mut permutation = vec![usize::MAX; p];
    let mut assigned = 0;
    for (_, i, j) in pairs {
        if ref_used[i] || permutation[j] != usize::MAX {
            continue;
        }
        ref_used[i] = true;
        permutation[j] = i;
        assigned += 1;
        if assigned == p {
            break;
        }
    }

    let mut signs = Vec::with_capacity(p);
    let mut scales = Vec::with_capacity(p);
    let mut max_residual: f64 = 0.0;
    for (j, &i) in permutation.iter().enumerate() {
        let ip = gram[(i, j)];
        let sign = if ip < 0.0 { -1.0 } else { 1.0 };
        let scale = ip.abs() / (ref_norms[i] * ref_norms[i]);
        let resid =
            (x_cand.as_dmatrix().column(j) - x_ref.as_dmatrix().column(i) * (sign * scale)).norm() / cand_norms[j];
        signs.push(sign);
        scales.push(scale);
        max_residual = max_residual.max(resid);
    }
    Ok(EquivalenceReport { matched: max_residual <= tol, permutation, signs, scales, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: usize, cols: usize, v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_row_major(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn scaling_of_pythagorean_column() {
        let x = m(3, 2, &[3.0, 0.0, 4.0, 0.0, 0.0, 1.0]);
        let s = scaling_matrix(&x).unwrap();
        assert_relative_eq!(s.inverse_norms[0], 0.2, max_relative = 1e-15);
        assert_relative_eq!(s.inverse_norms[1], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn scaling_of_identity_is_identity() {
        let s = scaling_matrix(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(s.inverse_norms, vec![1.0; 4]);
    }

    #[test]
    fn scaling_rejects_zero_column() {
        let x = m(2, 2, &[1.0, 0.0, 2.0, 0.0]);
        assert!(matches!(scaling_matrix(&x), Err(Error::ZeroColumn(1))));
    }

    #[test]
    fn stable_rank_examples() {
        assert_relative_eq!(stable_rank(&DenseMatrix::identity(4)).unwrap(), 4.0, max_relative = 1e-12);
        assert_relative_eq!(stable_rank(&m(2, 2, &[1.0, 1.0, 1.0, 1.0])).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(stable_rank(&m(2, 2, &[2.0, 0.0, 0.0, 1.0])).unwrap(), 1.25, max_relative = 1e-12);
        assert!(matches!(stable_rank(&DenseMatrix::zeros(2, 3)), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let a = DMatrix::from_fn(40, 30, |i, j| ((i * 7 + j * 13) % 11) as f64 - 5.0 + 0.1 * j as f64);
        let svd = singular_values(&a)[0];
        let pw = power_iteration_norm(&a, 1e-12, 10_000);
        assert_relative_eq!(svd, pw, max_relative = 1e-9);
    }

    #[test]
    fn support_examples() {
        assert_eq!(support_size(&[1e-12, 0.5, -2.0], 1e-9), 2);
        assert_eq!(support_size(&[0.0; 4], 0.0), 0);
        assert_eq!(support_size(&[1.0, 0.0, 3.0], 0.0), 2);
        assert_eq!(default_support_threshold(&[0.1, -0.2], 1e-6), 1e-6);
        assert_relative_eq!(default_support_threshold(&[10.0, -20.0], 1e-6), 2e-5, max_relative = 1e-15);
    }

    #[test]
    fn column_support_examples() {
        assert_eq!(column_supports(&DenseMatrix::identity(3), 0.0), vec![1, 1, 1]);
        assert_eq!(column_supports(&DenseMatrix::zeros(4, 2), 0.0), vec![0, 0]);
    }

    #[test]
    fn rip_of_orthonormal_columns_is_zero() {
        let q = m(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let est = rip_constant(&q, 2, 100).unwrap();
        assert!(est.epsilon < 1e-14);
        assert!(est.exhaustive);
        assert_eq!(est.supports_checked, 1);
    }

    #[test]
    fn rip_of_sixty_degree_pair() {
        let c = 60f64.to_radians().cos();
        let s = 60f64.to_radians().sin();
        let a = m(2, 2, &[1.0, c, 0.0, s]);
        let est = rip_constant(&a, 2, 10).unwrap();
        // Gram eigenvalues 1 ± cos 60°, so σ_min = √0.5
        assert_relative_eq!(est.epsilon, 1.0 - 0.5f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(est.epsilon, 0.292_893_218_813_452_5, max_relative = 1e-12);
        let est1 = rip_constant(&a, 1, 10).unwrap();
        assert!(est1.epsilon < 1e-14);
    }

    #[test]
    fn rip_budget_is_enforced() {
        let a = DenseMatrix::identity(20);
        assert!(matches!(rip_constant(&a, 10, 1000), Err(Error::TooManySupports { needed: 184_756, .. })));
        let mut rng = rand::rng();
        let est = rip_constant_sampled(&a, 10, 5, &mut rng).unwrap();
        assert!(!est.exhaustive);
        assert_eq!(est.supports_checked, 5);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(18, 3), 816);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(100, 50), 100_891_344_545_564_193_334_812_497_256);
        assert_eq!(binomial(400, 200), u128::MAX);
    }

    #[test]
    fn match_global_sign_flip() {
        let x = m(3, 2, &[1.0, 2.0, 0.0, -1.0, 3.0, 0.5]);
        let rep = match_up_to_signed_scaled_permutation(&x, &x.scaled(-1.0), 1e-12).unwrap();
        assert!(rep.matched);
        assert_eq!(rep.signs, vec![-1.0, -1.0]);
        assert_eq!(rep.permutation, vec![0, 1]);
    }

    #[test]
    fn match_identity() {
        let x = m(3, 3, &[1.0, 2.0, 0.0, -1.0, 3.0, 0.5, 0.0, 0.0, 2.0]);
        let rep = match_up_to_signed_scaled_permutation(&x, &x, 1e-12).unwrap();
        assert!(rep.matched);
        assert_eq!(rep.permutation, vec![0, 1, 2]);
        assert_eq!(rep.signs, vec![1.0; 3]);
        for s in rep.scales {
            assert_relative_eq!(s, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn match_errors() {
        let a = DenseMatrix::identity(3);
        let b = DenseMatrix::zeros(3, 2);
        assert!(matches!(match_up_to_signed_scaled_permutation(&a, &b, 1e-6), Err(Error::ShapeMismatch(_))));
        let z = m(2, 2, &[1.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            match_up_to_signed_scaled_permutation(&DenseMatrix::identity(2), &z, 1e-6),
            Err(Error::ZeroColumn(1))
        ));
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(
            DenseMatrix::from_row_major(2, 2, vec![1.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0]).is_err());
        assert!(DenseMatrix::from_row_major(0, 2, vec![]).is_err());
    }
}
