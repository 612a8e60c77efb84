use interp_select::dataset::{generate_toy, ToyConfig};
use interp_select::solver::{
    fit_lasso, fit_lasso_from, kkt_violation_scaled, lasso_coordinate_descent, objective, LassoSpec,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

/// Closed form for a design with orthonormal columns:
/// `theta_j = sign(q_j . y) max(|q_j . y| - lambda / 2, 0)`.
fn soft_threshold_oracle(q: &DMatrix<f64>, y: &[f64], lambda: f64) -> Vec<f64> {
    let yv = DVector::from_column_slice(y);
    q.column_iter()
        .map(|c| {
            let z = c.dot(&yv);
            z.signum() * (z.abs() - lambda / 2.0).max(0.0)
        })
        .collect()
}

fn orthonormal_5x3(entries: &[f64]) -> Option<DMatrix<f64>> {
    let a = DMatrix::from_column_slice(5, 3, entries);
    let qr = a.qr();
    // Skip nearly rank-deficient draws.
    if qr.r().diagonal().iter().any(|d| d.abs() < 1e-3) {
        return None;
    }
    Some(qr.q())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_soft_threshold_on_orthonormal_designs(
        entries in prop::collection::vec(-3.0..3.0f64, 15),
        y in prop::collection::vec(-5.0..5.0f64, 5),
        lambda in 0.0..6.0f64,
    ) {
        let Some(q) = orthonormal_5x3(&entries) else { return Ok(()) };
        let w = lasso_coordinate_descent(&q, &y, &LassoSpec::default().with_lambda(lambda), None).unwrap();
        let oracle = soft_threshold_oracle(&q, &y, lambda);
        for (a, b) in w.theta.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-8, "{:?} vs {:?}", w.theta, oracle);
        }
    }

    #[test]
    fn objective_never_increases_per_sweep(
        entries in prop::collection::vec(-3.0..3.0f64, 24),
        y in prop::collection::vec(-2.0..2.0f64, 8),
        lambda in 0.0..4.0f64,
    ) {
        let x = DMatrix::from_column_slice(8, 3, &entries);
        let mut theta = vec![0.0; 3];
        let mut prev = objective(&x, &y, &theta, 0.0, lambda);
        for _ in 0..30 {
            let spec = LassoSpec { lambda, max_iter: 1, ..LassoSpec::default() };
            theta = lasso_coordinate_descent(&x, &y, &spec, Some(&theta)).unwrap().theta;
            let obj = objective(&x, &y, &theta, 0.0, lambda);
            prop_assert!(obj <= prev + 1e-10 * prev.max(1.0));
            prev = obj;
        }
    }

    #[test]
    fn lambda_zero_matches_normal_equations(
        entries in prop::collection::vec(-3.0..3.0f64, 30),
        y in prop::collection::vec(-2.0..2.0f64, 10),
    ) {
        let x = DMatrix::from_column_slice(10, 3, &entries);
        let gram = x.transpose() * &x;
        // Keep the problem well conditioned so CD converges within max_iter.
        let eig = gram.clone().symmetric_eigenvalues();
        prop_assume!(eig.min() > 0.05 * eig.max());
        let direct = gram.lu().solve(&(x.transpose() * DVector::from_column_slice(&y))).unwrap();
        let w = lasso_coordinate_descent(&x, &y, &LassoSpec { tol: 1e-12, ..LassoSpec::default() }, None).unwrap();
        prop_assert!(w.converged);
        for (a, b) in w.theta.iter().zip(direct.iter()) {
            prop_assert!((a - b).abs() <= 1e-6 * b.abs().max(1e-3));
        }
    }
}

#[test]
fn hundred_orthonormal_problems() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut solved = 0;
    while solved < 100 {
        let entries: Vec<f64> = (0..15).map(|_| rng.random_range(-1.0..1.0)).collect();
        let Some(q) = orthonormal_5x3(&entries) else { continue };
        let y: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        let lambda = rng.random_range(0.0..4.0);
        let w = lasso_coordinate_descent(&q, &y, &LassoSpec::default().with_lambda(lambda), None).unwrap();
        let oracle = soft_threshold_oracle(&q, &y, lambda);
        for (a, b) in w.theta.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8);
        }
        solved += 1;
    }
}

#[test]
fn regularisation_path_shrinks_l1_norm() {
    let data = generate_toy(&ToyConfig::default()).unwrap();
    let lambdas = [0.0, 0.001, 0.01, 0.1, 1.0, 10.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 2000.0, 3500.0];
    let norms: Vec<f64> = lambdas
        .iter()
        .map(|&l| fit_lasso(&data, &LassoSpec::default().with_lambda(l)).unwrap().l1_norm())
        .collect();
    for w in norms.windows(2) {
        assert!(w[0] + 1e-9 >= w[1], "{norms:?}");
    }
    assert_eq!(*norms.last().unwrap(), 0.0);
}

#[test]
fn warm_started_path_agrees_with_cold_starts() {
    let data = generate_toy(&ToyConfig::default()).unwrap();
    let mut prev: Option<Vec<f64>> = None;
    for l in [1000.0, 500.0, 250.0, 100.0, 10.0, 0.0] {
        let spec = LassoSpec::default().with_lambda(l);
        let warm = fit_lasso_from(&data, &spec, prev.as_deref()).unwrap();
        let cold = fit_lasso(&data, &spec).unwrap();
        for (a, b) in warm.theta.iter().zip(&cold.theta) {
            assert!((a - b).abs() < 1e-6);
        }
        prev = Some(warm.theta);
    }
}

#[test]
fn kkt_holds_across_the_toy_grid() {
    let data = generate_toy(&ToyConfig::default()).unwrap();
    let spec = LassoSpec::default();
    for l in interp_select::selection::DEFAULT_LAMBDAS {
        let w = fit_lasso(&data, &spec.with_lambda(l)).unwrap();
        assert!(w.converged);
        let v = kkt_violation_scaled(data.x(), data.y(), &w, l);
        assert!(v < 10.0 * spec.tol, "lambda {l}: {v:e}");
    }
}
