//! Primal-dual interior-point method (Mehrotra predictor-corrector) for
//!
//! ```text
//!   min cᵀx   s.t.   A x = b,   0 ≤ x ≤ u
//! ```
//!
//! where `u_i` may be `+∞`. Upper bounds are handled with slacks
//! `s = u - x` and eliminated from the Newton system, so every iteration
//! factors one `m×m` normal matrix `A Θ Aᵀ`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

pub(crate) struct LpProblem<'a> {
    pub a: &'a DMatrix<f64>,
    pub b: &'a DVector<f64>,
    pub c: &'a DVector<f64>,
    pub upper: &'a [f64],
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub primal_obj: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub dual_obj: f64,
    pub iterations: usize,
    pub converged: bool,
}

const STEP_FRACTION: f64 = 0.995;

/// Cholesky of a symmetric positive semidefinite matrix with escalating
/// diagonal regularization for rank-deficient or badly scaled systems.
fn factor(mut m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let scale = m.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    for _ in 0..12 {
        if let Some(ch) = Cholesky::new(m.clone()) {
            return Some(ch);
        }
        let next = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
        for i in 0..m.nrows() {
            m[(i, i)] += next - reg;
        }
        reg = next;
    }
    None
}

fn normal_matrix(a: &DMatrix<f64>, theta: &DVector<f64>) -> DMatrix<f64> {
    let mut ad = a.clone();
    for (j, mut col) in ad.column_iter_mut().enumerate() {
        col.scale_mut(theta[j].sqrt());
    }
    &ad * ad.transpose()
}

fn max_step(v: &DVector<f64>, dv: &DVector<f64>, mask: Option<&[bool]>) -> f64 {
    let mut alpha: f64 = 1.0;
    for i in 0..v.len() {
        if let Some(m) = mask {
            if !m[i] {
                continue;
            }
        }
        if dv[i] < 0.0 {
            alpha = alpha.min(-v[i] / dv[i]);
        }
    }
    alpha
}

pub(crate) fn solve(p: &LpProblem<'_>, tol: f64, max_iters: usize) -> Option<LpSolution> {
    let a = p.a;
    let n = a.ncols();
    let bounded: Vec<bool> = p.upper.iter().map(|u| u.is_finite()).collect();
    let nb = bounded.iter().filter(|&&f| f).count();
    let u = DVector::from_iterator(n, p.upper.iter().map(|&v| if v.is_finite() { v } else { 0.0 }));
    let bmask = DVector::from_iterator(n, bounded.iter().map(|&f| if f { 1.0 } else { 0.0 }));

    // Mehrotra-style starting point from least-squares estimates.
    let aat = factor(a * a.transpose())?;
    let x_ls = a.transpose() * aat.solve(p.b);
    let y0 = aat.solve(&(a * p.c));
    let z_ls = p.c - a.transpose() * &y0;

    let mut x = DVector::zeros(n);
    let mut z = DVector::zeros(n);
    let mut s = DVector::zeros(n);
    let mut w = DVector::zeros(n);
    let min_free = |v: &DVector<f64>| (0..n).filter(|&i| !bounded[i]).map(|i| v[i]).fold(f64::INFINITY, f64::min);
    let dx = (-1.5 * min_free(&x_ls)).max(0.0);
    let dz = (-1.5 * min_free(&z_ls)).max(0.0);
    for i in 0..n {
        if bounded[i] {
            x[i] = 0.5 * u[i];
            s[i] = 0.5 * u[i];
            z[i] = z_ls[i].max(0.0) + 1.0;
            w[i] = (-z_ls[i]).max(0.0) + 1.0;
        } else {
            x[i] = x_ls[i] + dx;
            z[i] = z_ls[i] + dz;
        }
    }
    let xz: f64 = (0..n).filter(|&i| !bounded[i]).map(|i| x[i] * z[i]).sum();
    let sum_x: f64 = (0..n).filter(|&i| !bounded[i]).map(|i| x[i]).sum();
    let sum_z: f64 = (0..n).filter(|&i| !bounded[i]).map(|i| z[i]).sum();
    for i in 0..n {
        if !bounded[i] {
            if sum_z > 0.0 {
                x[i] += 0.5 * xz / sum_z;
            }
            if sum_x > 0.0 {
                z[i] += 0.5 * xz / sum_x;
            }
            x[i] = x[i].max(1e-2);
            z[i] = z[i].max(1e-2);
        }
    }
    let mut y = y0;

    let bnorm = p.b.norm();
    let cnorm = p.c.norm();
    let unorm = u.norm();
    let ncomp = (n + nb) as f64;
    let mut iterations = 0;
    let mut converged = false;

    for it in 0..max_iters {
        iterations = it;
        let r_b = p.b - a * &x;
        let r_u = (&u - &x - &s).component_mul(&bmask);
        let r_c = p.c - a.transpose() * &y - &z + &w;
        let pobj = p.c.dot(&x);
        let dobj = p.b.dot(&y) - u.dot(&w);
        let rel_p = (r_b.norm() + r_u.norm()) / (1.0 + bnorm + unorm);
        let rel_d = r_c.norm() / (1.0 + cnorm);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        if rel_p <= tol && rel_d <= tol && rel_gap <= tol {
            converged = true;
            break;
        }
        let mu = (x.dot(&z) + s.dot(&w)) / ncomp;
        if !mu.is_finite() {
            break;
        }

        let mut theta_inv = DVector::zeros(n);
        for i in 0..n {
            theta_inv[i] = z[i] / x[i] + if bounded[i] { w[i] / s[i] } else { 0.0 };
        }
        let theta = theta_inv.map(|t| 1.0 / t);
        let chol = factor(normal_matrix(a, &theta))?;

        let direction = |r_xz: &DVector<f64>, r_sw: &DVector<f64>| {
            let mut r_hat = r_c.clone();
            for i in 0..n {
                r_hat[i] -= r_xz[i] / x[i];
                if bounded[i] {
                    r_hat[i] += (r_sw[i] - w[i] * r_u[i]) / s[i];
                }
            }
            let rhs = &r_b + a * theta.component_mul(&r_hat);
            let dy = chol.solve(&rhs);
            let dx = theta.component_mul(&(a.transpose() * &dy - &r_hat));
            let mut dz = DVector::zeros(n);
            let mut ds = DVector::zeros(n);
            let mut dw = DVector::zeros(n);
            for i in 0..n {
                dz[i] = (r_xz[i] - z[i] * dx[i]) / x[i];
                if bounded[i] {
                    ds[i] = r_u[i] - dx[i];
                    dw[i] = (r_sw[i] - w[i] * ds[i]) / s[i];
                }
            }
            (dx, dy, dz, ds, dw)
        };

        // predictor
        let r_xz = -x.component_mul(&z);
        let r_sw = -s.component_mul(&w).component_mul(&bmask);
        let (dx_a, _, dz_a, ds_a, dw_a) = direction(&r_xz, &r_sw);
        let ap = max_step(&x, &dx_a, None).min(max_step(&s, &ds_a, Some(&bounded)));
        let ad = max_step(&z, &dz_a, None).min(max_step(&w, &dw_a, Some(&bounded)));
        let mu_aff = ((&x + &dx_a * ap).dot(&(&z + &dz_a * ad))
            + (&s + &ds_a * ap).component_mul(&bmask).dot(&(&w + &dw_a * ad)))
            / ncomp;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let r_xz = DVector::from_element(n, sigma * mu) - x.component_mul(&z) - dx_a.component_mul(&dz_a);
        let r_sw = (DVector::from_element(n, sigma * mu) - s.component_mul(&w) - ds_a.component_mul(&dw_a))
            .component_mul(&bmask);
        let (dx, dy, dz, ds, dw) = direction(&r_xz, &r_sw);
        let ap = (STEP_FRACTION * max_step(&x, &dx, None).min(max_step(&s, &ds, Some(&bounded)))).min(1.0);
        let ad = (STEP_FRACTION * max_step(&z, &dz, None).min(max_step(&w, &dw, Some(&bounded)))).min(1.0);
        if ap < 1e-14 && ad < 1e-14 {
            break;
        }
        x += &dx * ap;
        s = (s + &ds * ap).component_mul(&bmask);
        y += &dy * ad;
        z += &dz * ad;
        w = (w + &dw * ad).component_mul(&bmask);
        iterations = it + 1;
    }

    let primal_obj = p.c.dot(&x);
    let dual_obj = p.b.dot(&y) - u.dot(&w);
    Some(LpSolution { x, y, primal_obj, dual_obj, iterations, converged })
}
