use cstrain::l1::{basis_pursuit, SolveStatus, SolverOptions};
use cstrain::linalg::{match_up_to_signed_scaled_permutation, rip_constant, scaling_matrix, support_size};
use cstrain::models::{
    gen_component_matrix, gen_gaussian_sensing, gen_sparse_combinator, gen_training_matrix, ModelSpec,
};
use cstrain::pipeline::{sparse_recovery, train, train_and_recover, PipelineOptions};
use cstrain::rng::RngStream;
use cstrain::{DenseMatrix, Error};
use rand::seq::SliceRandom;
use rand::Rng;

const RECOVERY_THRESHOLD: f64 = 0.624_695_047_554_424_3; // 4/√41

fn rel_err(x: &[f64], y: &[f64]) -> f64 {
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let den: f64 = y.iter().map(|b| b * b).sum::<f64>().sqrt();
    num / den.max(1e-300)
}

/// `X P Γ` for a random permutation `P` and random signed scaling `Γ`.
fn permute_and_scale(x: &DenseMatrix, stream: &RngStream) -> DenseMatrix {
    let mut rng = stream.rng();
    let mut perm: Vec<usize> = (0..x.cols()).collect();
    perm.shuffle(&mut rng);
    let cols: Vec<Vec<f64>> = perm
        .iter()
        .map(|&k| {
            let g = rng.random_range(0.2..5.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            x.column(k).iter().map(|v| v * g).collect()
        })
        .collect();
    DenseMatrix::from_columns(x.rows(), &cols).unwrap()
}

fn normalized_product(a: &DenseMatrix, x: &DenseMatrix) -> DenseMatrix {
    let c = (a.cols() as f64).sqrt() / a.frobenius_norm();
    a.scaled(c).matmul(&scaling_matrix(x).unwrap().apply_right(x).unwrap()).unwrap()
}

#[test]
fn learned_components_reproduce_the_solution_under_rip() {
    let (m, n, p, t) = (32, 64, 8, 4);
    let opts = SolverOptions::default();
    let mut verified = 0;
    let mut seed = 0;
    while verified < 50 {
        seed += 1;
        assert!(seed < 500, "too few RIP-verified instances");
        let a = gen_gaussian_sensing(m, n, &RngStream::new(seed, 1)).unwrap();
        let x = gen_component_matrix(n, p, &ModelSpec::gaussian(0.25), &RngStream::new(seed, 2)).unwrap();
        if x.column_norms().contains(&0.0) {
            continue;
        }
        let rip = rip_constant(&normalized_product(&a, &x), t, 10_000).unwrap();
        if rip.epsilon >= RECOVERY_THRESHOLD {
            continue;
        }
        verified += 1;
        let z = gen_sparse_combinator(p, t / 2, &RngStream::new(seed, 4)).unwrap();
        let x_true = x.matvec(&z).unwrap();
        let b = a.matvec(&x_true).unwrap();
        let mut first: Option<Vec<f64>> = None;
        for k in 0..5 {
            let x_bar = permute_and_scale(&x, &RngStream::new(seed, 100 + k));
            let r = sparse_recovery(&a, &b, &x_bar, &opts).unwrap();
            assert_eq!(r.solver_status, SolveStatus::Optimal);
            assert!(rel_err(&r.x, &x_true) <= 1e-6, "seed {seed}: error {}", rel_err(&r.x, &x_true));
            match &first {
                None => first = Some(r.x),
                Some(f) => {
                    for (u, v) in r.x.iter().zip(f) {
                        assert!((u - v).abs() <= 1e-9 * (1.0 + v.abs()));
                    }
                }
            }
        }
    }
}

#[test]
fn identity_components_reduce_to_basis_pursuit() {
    let opts = SolverOptions::default();
    let mut checked = 0;
    for seed in 0..200 {
        let a = gen_gaussian_sensing(8, 12, &RngStream::new(seed, 1)).unwrap();
        let rip = rip_constant(&a, 2, 1_000).unwrap();
        if rip.epsilon >= RECOVERY_THRESHOLD {
            continue;
        }
        checked += 1;
        let x0 = gen_sparse_combinator(12, 1, &RngStream::new(seed, 2)).unwrap();
        let b = a.matvec(&x0).unwrap();
        let r = sparse_recovery(&a, &b, &DenseMatrix::identity(12), &opts).unwrap();
        assert!(rel_err(&r.x, &x0) <= 1e-6);
    }
    assert!(checked >= 10);
}

struct Instance {
    a: DenseMatrix,
    x: DenseMatrix,
    training: DenseMatrix,
    x_true: Vec<f64>,
    b: Vec<f64>,
}

fn instance(seed: u64, m: usize, n: usize, p: usize, q: usize, theta: f64, k: usize) -> Instance {
    let a = gen_gaussian_sensing(m, n, &RngStream::new(seed, 1)).unwrap();
    let x = gen_component_matrix(n, p, &ModelSpec::gaussian(theta), &RngStream::new(seed, 2)).unwrap();
    let z = gen_training_matrix(p, q, 1, &RngStream::new(seed, 3)).unwrap();
    let training = a.matmul(&x.matmul(&z).unwrap()).unwrap();
    let zc = gen_sparse_combinator(p, k, &RngStream::new(seed, 4)).unwrap();
    let x_true = x.matvec(&zc).unwrap();
    let b = a.matvec(&x_true).unwrap();
    Instance { a, x, training, x_true, b }
}

fn max_column_support(x: &DenseMatrix) -> usize {
    x.columns().map(|c| support_size(&c, 1e-12)).max().unwrap()
}

#[test]
fn training_recovers_components() {
    let opts = PipelineOptions { expected_rank: Some(4), ..Default::default() };
    let mut matched = 0;
    for seed in 0..20 {
        let inst = instance(seed, 48, 64, 4, 8, 0.2, 2);
        let u = max_column_support(&inst.x);
        if let Ok(t) = train(&inst.a, &inst.training, u, &RngStream::new(seed, 5), &opts) {
            assert_eq!(t.kept_columns.len() + t.discarded.len(), 8);
            if t.factorization.x_bar.cols() == 4
                && match_up_to_signed_scaled_permutation(&inst.x, &t.factorization.x_bar, 1e-6).unwrap().matched
            {
                matched += 1;
            }
        }
    }
    assert!(matched >= 16, "matched {matched}/20");
}

#[test]
fn dense_training_column_is_discarded() {
    let opts = PipelineOptions { expected_rank: Some(4), ..Default::default() };
    for seed in 0..5 {
        let inst = instance(seed, 48, 64, 4, 8, 0.2, 2);
        let u = max_column_support(&inst.x);
        // a right-hand side off the sparse model: its ℓ1 solution has support m
        let mut rng = RngStream::new(seed, 9).rng();
        let junk: Vec<f64> = (0..48).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut cols: Vec<Vec<f64>> = inst.training.columns().collect();
        cols.push(junk);
        let training = DenseMatrix::from_columns(48, &cols).unwrap();
        let t = train(&inst.a, &training, u, &RngStream::new(seed, 5), &opts).unwrap();
        assert!(t.discarded.contains(&8), "seed {seed}");
        for &l in &t.kept_columns {
            let sol = basis_pursuit(&inst.a, &cols[l], &opts.factor.solver).unwrap();
            assert!(sol.feas_residual <= opts.factor.solver.feas_tol);
            assert!(support_size(&sol.x, opts.factor.solver.tau_supp(&sol.x)) <= u);
        }
    }
}

#[test]
fn sweep_finds_the_sparse_solution() {
    let opts = PipelineOptions { expected_rank: Some(4), ..Default::default() };
    let mut exact = 0;
    for seed in 0..10 {
        let inst = instance(seed, 48, 64, 4, 8, 0.2, 2);
        let u = max_column_support(&inst.x);
        let truth = support_size(&inst.x_true, 1e-12);
        let Ok(single) = train_and_recover(&inst.a, &inst.b, &inst.training, &[u], &RngStream::new(seed, 5), &opts)
        else {
            continue;
        };
        assert_eq!(single.recovery.u_used, Some(u));
        let sweep =
            train_and_recover(&inst.a, &inst.b, &inst.training, &[u - 2, u, u + 2], &RngStream::new(seed, 5), &opts)
                .unwrap();
        for att in &sweep.attempts {
            if let Some(s) = att.support {
                assert!(sweep.recovery.support <= s);
            }
        }
        if rel_err(&sweep.recovery.x, &inst.x_true) <= 1e-6 {
            assert_eq!(sweep.recovery.support, truth);
            exact += 1;
        }
    }
    assert!(exact >= 8, "exact {exact}/10");
}

#[test]
fn sweep_below_every_training_support_fails() {
    let inst = instance(3, 48, 64, 4, 8, 0.2, 2);
    let opts = PipelineOptions { expected_rank: Some(4), ..Default::default() };
    let r = train_and_recover(&inst.a, &inst.b, &inst.training, &[1, 2], &RngStream::new(3, 5), &opts);
    assert!(matches!(r, Err(Error::AllFailed)));
}
