//! Seeded generators for the data model: Bernoulli-subgaussian component
//! matrices, sparse combinators, training combinator matrices and Gaussian
//! sensing matrices.
//!
//! All generators draw entries in row-major order from a single stream.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::rng::RngStream;

/// Law of the nonzero values `R` of a Bernoulli-subgaussian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntryLaw {
    StandardGaussian,
    Rademacher,
    /// Uniform on `[-√3·ν, √3·ν]`, which has `E R² = ν²`.
    UniformSym,
}

/// Parameters of the Bernoulli-subgaussian model `X_jk = Ω_jk R_jk` with
/// `Ω ~ Bernoulli(theta)`, `E R² = nu²` and ψ2-norm at most `nu · k_psi2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub theta: f64,
    pub dist: EntryLaw,
    pub nu: f64,
    pub k_psi2: f64,
}

impl ModelSpec {
    pub fn gaussian(theta: f64) -> Self {
        ModelSpec { theta, dist: EntryLaw::StandardGaussian, nu: 1.0, k_psi2: 1.0 }
    }

    pub fn rademacher(theta: f64) -> Self {
        ModelSpec { theta, dist: EntryLaw::Rademacher, nu: 1.0, k_psi2: 1.0 }
    }

    pub fn uniform_sym(theta: f64, nu: f64) -> Self {
        ModelSpec { theta, dist: EntryLaw::UniformSym, nu, k_psi2: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidSpec(format!("theta = {} outside (0, 1]", self.theta)));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::InvalidSpec(format!("nu = {} must be positive", self.nu)));
        }
        if !(self.k_psi2 > 0.0 && self.k_psi2.is_finite()) {
            return Err(Error::InvalidSpec(format!("k_psi2 = {} must be positive", self.k_psi2)));
        }
        match self.dist {
            EntryLaw::StandardGaussian | EntryLaw::Rademacher if self.nu != 1.0 => {
                Err(Error::InvalidSpec(format!("{:?} has nu = 1, got {}", self.dist, self.nu)))
            }
            _ => Ok(()),
        }
    }

    /// `E|R|` of the entry law.
    pub fn mean_abs(&self) -> f64 {
        match self.dist {
            EntryLaw::StandardGaussian => (2.0 / std::f64::consts::PI).sqrt(),
            EntryLaw::Rademacher => 1.0,
            EntryLaw::UniformSym => 3f64.sqrt() * self.nu / 2.0,
        }
    }

    /// `P(|R| > tau)` of the entry law.
    pub fn tail(&self, tau: f64) -> f64 {
        match self.dist {
            EntryLaw::StandardGaussian => erfc(tau / std::f64::consts::SQRT_2),
            EntryLaw::Rademacher => {
                if tau < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            EntryLaw::UniformSym => {
                let a = 3f64.sqrt() * self.nu;
                (1.0 - tau / a).clamp(0.0, 1.0)
            }
        }
    }

    /// Whether the entry law meets the restricted model: symmetric, no atom
    /// at zero, `E|R| ∈ [1/10, 1]`, `E R² ≤ 1` and
    /// `P(|R| > τ) ≤ 2 exp(-τ²/2)`. The tail bound is checked on a grid
    /// `τ ∈ [0, 10]` with step `1e-3`.
    pub fn is_restricted(&self) -> bool {
        if self.validate().is_err() {
            return false;
        }
        let m1 = self.mean_abs();
        if !(0.1..=1.0).contains(&m1) || self.nu * self.nu > 1.0 + 1e-15 {
            return false;
        }
        (0..=10_000).all(|i| {
            let tau = i as f64 * 1e-3;
            self.tail(tau) <= 2.0 * (-tau * tau / 2.0).exp() + 1e-15
        })
    }

    fn sample_entry<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.dist {
            EntryLaw::StandardGaussian => StandardNormal.sample(rng),
            EntryLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryLaw::UniformSym => {
                let a = 3f64.sqrt() * self.nu;
                rng.random_range(-a..a)
            }
        }
    }
}

// Numerical Recipes `erfcc`, relative error below 1.2e-7.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

/// `n×p` Bernoulli-subgaussian matrix. Each entry draws the mask bit and
/// the value, in that order, so the value matrix does not depend on theta.
pub fn gen_component_matrix(n: usize, p: usize, spec: &ModelSpec, stream: &RngStream) -> Result<DenseMatrix> {
    spec.validate()?;
    if n == 0 || p == 0 {
        return Err(Error::BadShape(format!("{n}x{p} component matrix")));
    }
    let mut rng = stream.rng();
    let mut entries = Vec::with_capacity(n * p);
    for _ in 0..n * p {
        let keep = rng.random::<f64>() < spec.theta;
        let v = spec.sample_entry(&mut rng);
        entries.push(if keep { v } else { 0.0 });
    }
    DenseMatrix::from_row_major(n, p, entries)
}

fn sparse_vector_into<R: Rng + ?Sized>(p: usize, k: usize, rng: &mut R) -> Vec<f64> {
    let mut z = vec![0.0; p];
    let mut supp = index::sample(rng, p, k).into_vec();
    supp.sort_unstable();
    for i in supp {
        z[i] = signed_magnitude(rng, 1.0, 2.0);
    }
    z
}

fn signed_magnitude<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let mag = rng.random_range(lo..=hi);
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

/// `k`-sparse vector of length `p`: uniform support, magnitudes uniform in
/// `[1, 2]`, random signs.
pub fn gen_sparse_combinator(p: usize, k: usize, stream: &RngStream) -> Result<Vec<f64>> {
    if k == 0 || k > p {
        return Err(Error::BadSparsity { k, p });
    }
    Ok(sparse_vector_into(p, k, &mut stream.rng()))
}

/// Training combinators `Z ∈ ℝ^{p×q}` with `k_easy`-sparse columns.
///
/// Column `i < p` contains index `i` with magnitude in `[2k-1, 2k]` plus
/// `k-1` further indices with magnitudes in `[1, 2]`. The leading `p×p`
/// block is then strictly column diagonally dominant and hence nonsingular.
/// The remaining `q-p` columns are ordinary sparse combinators.
pub fn gen_training_matrix(p: usize, q: usize, k_easy: usize, stream: &RngStream) -> Result<DenseMatrix> {
    if q < p {
        return Err(Error::BadShape(format!("q = {q} < p = {p}")));
    }
    if k_easy == 0 || k_easy > p {
        return Err(Error::BadSparsity { k: k_easy, p });
    }
    let mut rng = stream.rng();
    let mut columns = Vec::with_capacity(q);
    let k = k_easy as f64;
    for i in 0..p {
        let mut col = vec![0.0; p];
        col[i] = signed_magnitude(&mut rng, 2.0 * k - 1.0, 2.0 * k);
        let mut others = index::sample(&mut rng, p - 1, k_easy - 1).into_vec();
        others.sort_unstable();
        for j in others {
            let idx = if j >= i { j + 1 } else { j };
            col[idx] = signed_magnitude(&mut rng, 1.0, 2.0);
        }
        columns.push(col);
    }
    for _ in p..q {
        columns.push(sparse_vector_into(p, k_easy, &mut rng));
    }
    DenseMatrix::from_columns(p, &columns)
}

/// `m×n` matrix with i.i.d. `N(0, 1/m)` entries.
pub fn gen_gaussian_sensing(m: usize, n: usize, stream: &RngStream) -> Result<DenseMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::BadShape(format!("{m}x{n} sensing matrix")));
    }
    let mut rng = stream.rng();
    let scale = 1.0 / (m as f64).sqrt();
    let entries: Vec<f64> = (0..m * n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            g * scale
        })
        .collect();
    DenseMatrix::from_row_major(m, n, entries)
}
