use cstrain::l1::{basis_pursuit, l1_oracle_bruteforce, min_l1_hyperplane, SolveStatus, SolverOptions};
use cstrain::linalg::support_size;
use cstrain::models::{gen_gaussian_sensing, gen_sparse_combinator};
use cstrain::rng::RngStream;
use cstrain::DenseMatrix;
use proptest::prelude::*;
use rand::Rng;

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn random_instance(seed: u64, m: usize, n: usize) -> (DenseMatrix, Vec<f64>) {
    let a = gen_gaussian_sensing(m, n, &RngStream::new(seed, 0)).unwrap();
    let mut rng = RngStream::new(seed, 1).rng();
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let b = a.matvec(&x).unwrap();
    (a, b)
}

#[test]
fn agrees_with_vertex_enumeration() {
    let opts = SolverOptions::default();
    for seed in 0..100 {
        let (a, b) = random_instance(1000 + seed, 5, 10);
        let sol = basis_pursuit(&a, &b, &opts).unwrap();
        let oracle = l1_oracle_bruteforce(&a, &b).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");
        assert!(sol.feas_residual <= 1e-9);
        assert!((sol.objective - l1(&oracle)).abs() <= 1e-7, "seed {seed}: {} vs {}", sol.objective, l1(&oracle));
        // generic data: the minimizer is a vertex
        assert!(support_size(&sol.x, opts.tau_supp(&sol.x)) <= 5);
    }
}

#[test]
fn scale_equivariance() {
    let opts = SolverOptions::default();
    for seed in 0..20 {
        let (a, b) = random_instance(2000 + seed, 6, 12);
        let base = basis_pursuit(&a, &b, &opts).unwrap();
        for c in [-1.0, 2.0] {
            let bc: Vec<f64> = b.iter().map(|v| v * c).collect();
            let sc = basis_pursuit(&a, &bc, &opts).unwrap();
            for (u, v) in sc.x.iter().zip(&base.x) {
                assert!((u - c * v).abs() <= 1e-8 * (1.0 + v.abs()));
            }
        }
    }
}

#[test]
fn recovers_sparse_vectors_from_gaussian_measurements() {
    let opts = SolverOptions::default();
    for seed in 0..20 {
        let a = gen_gaussian_sensing(40, 100, &RngStream::new(seed, 0)).unwrap();
        let x0 = gen_sparse_combinator(100, 5, &RngStream::new(seed, 1)).unwrap();
        let b = a.matvec(&x0).unwrap();
        let sol = basis_pursuit(&a, &b, &opts).unwrap();
        let err: f64 = sol.x.iter().zip(&x0).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-9 * l1(&x0), "seed {seed}: err {err}");
    }
}

#[test]
fn hyperplane_solution_is_feasible_and_minimal_on_small_instances() {
    let opts = SolverOptions::default();
    for seed in 0..30 {
        let y = gen_gaussian_sensing(8, 3, &RngStream::new(seed, 7)).unwrap();
        let mut r = vec![0.0; 8];
        r[seed as usize % 8] = 1.0;
        r[(seed as usize + 3) % 8] = 1.0;
        let w = min_l1_hyperplane(&y, &r, &opts).unwrap();
        let s = y.matvec(&w).unwrap();
        let lhs: f64 = r.iter().zip(&s).map(|(a, b)| a * b).sum();
        assert!((lhs - 1.0).abs() <= 1e-9);
        // the optimum is attained where s vanishes on k-1 = 2 rows; enumerate them
        let mut best = f64::INFINITY;
        for i in 0..8 {
            for j in (i + 1)..8 {
                let rows = [i, j];
                let mut sys = nalgebra::DMatrix::zeros(3, 3);
                for (k, &row) in rows.iter().enumerate() {
                    for c in 0..3 {
                        sys[(k, c)] = y.get(row, c);
                    }
                }
                for c in 0..3 {
                    sys[(2, c)] = (0..8).map(|row| r[row] * y.get(row, c)).sum::<f64>();
                }
                let rhs = nalgebra::DVector::from_vec(vec![0.0, 0.0, 1.0]);
                if let Some(wv) = sys.lu().solve(&rhs) {
                    let sv = y.matvec(wv.as_slice()).unwrap();
                    best = best.min(l1(&sv));
                }
            }
        }
        assert!(l1(&s) <= best + 1e-8, "seed {seed}: {} vs {best}", l1(&s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn optimal_solutions_are_feasible(seed in any::<u64>(), m in 2usize..7, extra in 1usize..8) {
        let (a, b) = random_instance(seed, m, m + extra);
        let opts = SolverOptions::default();
        let sol = basis_pursuit(&a, &b, &opts).unwrap();
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        prop_assert!(sol.feas_residual <= opts.feas_tol);
    }
}
