//! L1-penalised least squares by cyclic coordinate descent.
//!
//! The objective is the plain sum of squared errors plus an L1 penalty,
//!
//! ```text
//! f(theta) = ||X theta - y||^2 + lambda * ||theta||_1
//! ```
//!
//! with no `1/n` factor. Each coordinate update is the exact minimiser of
//! `f` along that axis:
//!
//! ```text
//! theta_j <- soft(x_j . r_j, lambda / 2) / ||x_j||^2,   r_j = y - X theta + x_j theta_j
//! ```

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoSpec {
    pub lambda: f64,
    pub max_iter: usize,
    /// Convergence threshold on the largest coordinate change in a sweep.
    pub tol: f64,
    /// Fit an unpenalised intercept. Off by default.
    #[serde(default)]
    pub fit_intercept: bool,
}

impl Default for LassoSpec {
    fn default() -> Self {
        LassoSpec {
            lambda: 0.0,
            max_iter: 10_000,
            tol: 1e-8,
            fit_intercept: false,
        }
    }
}

impl LassoSpec {
    pub fn with_lambda(self, lambda: f64) -> Self {
        LassoSpec { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Config(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub theta: Vec<f64>,
    #[serde(default)]
    pub intercept: f64,
    pub converged: bool,
    /// Completed coordinate sweeps.
    pub iterations: usize,
}

impl WeightVector {
    pub fn new(theta: Vec<f64>) -> Self {
        WeightVector { theta, intercept: 0.0, converged: true, iterations: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|&v| v == 0.0)
    }

    pub fn l1_norm(&self) -> f64 {
        self.theta.iter().map(|v| v.abs()).sum()
    }
}

/// Unit-norm direction of a weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mbm {
    direction: Vec<f64>,
}

impl Mbm {
    /// Normalises any nonzero finite vector.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(Mbm { direction: v.iter().map(|x| x / norm).collect() })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn len(&self) -> usize {
        self.direction.len()
    }

    pub fn is_empty(&self) -> bool {
        self.direction.is_empty()
    }
}

pub fn normalize(w: &WeightVector) -> Result<Mbm> {
    Mbm::from_vector(&w.theta)
}

/// `||X theta + b - y||^2 + lambda ||theta||_1`.
pub fn objective(x: &DMatrix<f64>, y: &[f64], theta: &[f64], intercept: f64, lambda: f64) -> f64 {
    let resid = residual(x, y, theta, intercept);
    resid.norm_squared() + lambda * theta.iter().map(|v| v.abs()).sum::<f64>()
}

fn residual(x: &DMatrix<f64>, y: &[f64], theta: &[f64], intercept: f64) -> DVector<f64> {
    let t = DVector::from_column_slice(theta);
    DVector::from_column_slice(y) - x * t - DVector::repeat(y.len(), intercept)
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

pub fn fit_lasso(data: &Dataset, spec: &LassoSpec) -> Result<WeightVector> {
    fit_lasso_from(data, spec, None)
}

/// Coordinate descent on a labelled dataset, started from `init` (zeros when `None`).
pub fn fit_lasso_from(data: &Dataset, spec: &LassoSpec, init: Option<&[f64]>) -> Result<WeightVector> {
    lasso_coordinate_descent(data.x(), data.y(), spec, init)
}

/// Coordinate descent on an arbitrary real-valued response.
pub fn lasso_coordinate_descent(
    x: &DMatrix<f64>,
    y: &[f64],
    spec: &LassoSpec,
    init: Option<&[f64]>,
) -> Result<WeightVector> {
    spec.validate()?;
    let p = x.ncols();
    if x.nrows() != y.len() {
        return Err(Error::Input(format!("X has {} rows but y has {} entries", x.nrows(), y.len())));
    }
    if y.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite values in X or y".into()));
    }
    if let Some(init) = init {
        if init.len() != p {
            return Err(Error::Input(format!("warm start has {} entries, expected {p}", init.len())));
        }
        if init.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("warm start contains non-finite values".into()));
        }
    }

    let col_sq: Vec<f64> = x.column_iter().map(|c| c.norm_squared()).collect();

    // Below the all-zero threshold the minimiser is exactly zero.
    if !spec.fit_intercept {
        let yv = DVector::from_column_slice(y);
        let grad0 = 2.0 * (x.transpose() * &yv).amax();
        if grad0 <= spec.lambda {
            return Ok(WeightVector { theta: vec![0.0; p], intercept: 0.0, converged: true, iterations: 0 });
        }
    }

    let mut theta: Vec<f64> = init.map_or_else(|| vec![0.0; p], <[f64]>::to_vec);
    let mut intercept = 0.0;
    let mut resid = residual(x, y, &theta, intercept);
    let half_lambda = spec.lambda / 2.0;
    let n = y.len() as f64;

    #[cfg(debug_assertions)]
    let mut prev_obj = objective(x, y, &theta, intercept, spec.lambda);

    let mut converged = false;
    let mut iterations = 0;
    while iterations < spec.max_iter {
        iterations += 1;
        let mut max_change = 0.0_f64;

        if spec.fit_intercept {
            let shift = resid.sum() / n;
            if shift != 0.0 {
                intercept += shift;
                resid.add_scalar_mut(-shift);
                max_change = max_change.max(shift.abs());
            }
        }

        for j in 0..p {
            if col_sq[j] == 0.0 {
                max_change = max_change.max(theta[j].abs());
                theta[j] = 0.0;
                continue;
            }
            let col = x.column(j);
            let old = theta[j];
            let rho = col.dot(&resid) + col_sq[j] * old;
            let new = soft_threshold(rho, half_lambda) / col_sq[j];
            let delta = new - old;
            if delta != 0.0 {
                resid.axpy(-delta, &col, 1.0);
                theta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }

        #[cfg(debug_assertions)]
        {
            let obj = objective(x, y, &theta, intercept, spec.lambda);
            debug_assert!(
                obj <= prev_obj + 1e-10 * prev_obj.abs().max(1.0),
                "objective increased from {prev_obj} to {obj} in sweep {iterations}"
            );
            prev_obj = obj;
        }

        if max_change < spec.tol {
            converged = true;
            break;
        }
    }

    Ok(WeightVector { theta, intercept, converged, iterations })
}

/// Largest violation of the Lasso optimality conditions.
///
/// For `theta_j != 0` the residual is `|g_j + lambda sign(theta_j)|`, for
/// `theta_j == 0` it is `max(|g_j| - lambda, 0)`, where
/// `g_j = 2 x_j . (X theta - y)`.
pub fn kkt_violation(x: &DMatrix<f64>, y: &[f64], w: &WeightVector, lambda: f64) -> f64 {
    let resid = residual(x, y, &w.theta, w.intercept);
    x.column_iter()
        .zip(&w.theta)
        .map(|(col, &t)| {
            let g = -2.0 * col.dot(&resid);
            if t != 0.0 {
                (g + lambda * t.signum()).abs()
            } else {
                (g.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// [`kkt_violation`] with each coordinate divided by its curvature
/// `2 ||x_j||^2`, which expresses the residual in coefficient units so it is
/// comparable with [`LassoSpec::tol`]. Zero columns are skipped.
pub fn kkt_violation_scaled(x: &DMatrix<f64>, y: &[f64], w: &WeightVector, lambda: f64) -> f64 {
    let resid = residual(x, y, &w.theta, w.intercept);
    x.column_iter()
        .zip(&w.theta)
        .filter_map(|(col, &t)| {
            let curvature = 2.0 * col.norm_squared();
            if curvature == 0.0 {
                return None;
            }
            let g = -2.0 * col.dot(&resid);
            let v = if t != 0.0 { (g + lambda * t.signum()).abs() } else { (g.abs() - lambda).max(0.0) };
            Some(v / curvature)
        })
        .fold(0.0, f64::max)
}

/// Labels `sign(x . theta + b)` with an exact zero mapped to `+1`.
pub fn predict(w: &WeightVector, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    if x.ncols() != w.theta.len() {
        return Err(Error::Input(format!(
            "model has {} coefficients but data has {} features",
            w.theta.len(),
            x.ncols()
        )));
    }
    let t = DVector::from_column_slice(&w.theta);
    let scores = x * t;
    Ok(scores.iter().map(|&s| if s + w.intercept >= 0.0 { 1.0 } else { -1.0 }).collect())
}

/// Fraction of samples whose predicted label matches.
pub fn accuracy(w: &WeightVector, data: &Dataset) -> Result<f64> {
    let pred = predict(w, data.x())?;
    let hits = pred.iter().zip(data.y()).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / data.n() as f64)
}
