//! Interpretability, out-of-bag performance, the scalarised selection
//! criterion, and Pareto bookkeeping over `(eta, delta)`.

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, ReferenceSolution};
use crate::error::{Error, Result};
use crate::perturbation::ReplicateSet;
use crate::solver::{predict, Mbm, WeightVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Weight on interpretability.
    pub omega1: f64,
    /// Weight on performance.
    pub omega2: f64,
    /// Performance floor; candidates below it score zero.
    pub kappa: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig { omega1: 1.0, omega2: 1.0, kappa: 0.6 }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        let (w1, w2) = (self.omega1, self.omega2);
        if w1.is_nan() || w2.is_nan() || w1 < 0.0 || w2 < 0.0 || w1 + w2 <= 0.0 {
            return Err(Error::Config(format!(
                "weights must be >= 0 with a positive sum, got omega1 = {}, omega2 = {}",
                self.omega1, self.omega2
            )));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::Config(format!("kappa must lie in [0, 1], got {}", self.kappa)));
        }
        Ok(())
    }
}

/// Scores for one regularisation strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEvaluation {
    pub lambda: f64,
    pub delta: f64,
    pub eta: f64,
    pub zeta: f64,
    /// Direction of the fit on the full dataset; `None` when that fit is all zero.
    pub full_fit_mbm: Option<Mbm>,
    /// One entry per replicate; `None` marks a zero weight vector.
    pub replicate_mbms: Vec<Option<Mbm>>,
    pub degenerate_replicates: usize,
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!("vector lengths differ ({} vs {})", a.len(), b.len())));
    }
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na.is_nan() || nb.is_nan() || na <= 0.0 || nb <= 0.0 {
        return Err(Error::DegenerateModel);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Mean cosine between each usable replicate direction and the reference.
///
/// Returns `(eta, degenerate_count)`. `None` entries are skipped and counted.
/// The mean is not clamped to `[0, 1]`.
pub fn interpretability(replicate_mbms: &[Option<Mbm>], reference: &ReferenceSolution) -> Result<(f64, usize)> {
    let mut sum = 0.0;
    let mut used = 0usize;
    for mbm in replicate_mbms.iter().flatten() {
        sum += cosine(mbm.direction(), &reference.mbm_star)?;
        used += 1;
    }
    let degenerate = replicate_mbms.len() - used;
    if used == 0 {
        return Err(Error::Metric(format!(
            "all {} replicate fits are degenerate; interpretability is undefined",
            replicate_mbms.len()
        )));
    }
    Ok((sum / used as f64, degenerate))
}

/// `delta = 1 - EPE`, with EPE the mean over replicates of each model's
/// misclassification rate on its own out-of-bag samples.
pub fn performance(replicates: &[ReplicateSet], models: &[WeightVector], data: &Dataset) -> Result<f64> {
    if replicates.is_empty() {
        return Err(Error::Metric("no replicates to evaluate".into()));
    }
    if replicates.len() != models.len() {
        return Err(Error::Metric(format!(
            "{} replicates but {} fitted models",
            replicates.len(),
            models.len()
        )));
    }
    let mut epe = 0.0;
    for (rep, model) in replicates.iter().zip(models) {
        if rep.out_of_bag.is_empty() {
            return Err(Error::Metric(format!("replicate {} has no out-of-bag samples", rep.replicate_id)));
        }
        let oob = data.select_rows(&rep.out_of_bag);
        let pred = predict(model, oob.x())?;
        let errors = pred.iter().zip(oob.y()).filter(|(a, b)| a != b).count();
        epe += errors as f64 / oob.n() as f64;
    }
    Ok(1.0 - epe / replicates.len() as f64)
}

/// Weighted mean of `eta` and `delta`, or zero when `delta < kappa`.
pub fn scalarize(eta: f64, delta: f64, config: &MetricConfig) -> f64 {
    if delta < config.kappa {
        0.0
    } else {
        (config.omega1 * eta + config.omega2 * delta) / (config.omega1 + config.omega2)
    }
}

/// True when the direction matches the reference up to a positive scale,
/// i.e. `cosine >= 1 - tol`.
pub fn is_strongly_interpretable(mbm: &Mbm, reference: &ReferenceSolution, tol: f64) -> bool {
    cosine(mbm.direction(), &reference.mbm_star).is_ok_and(|c| c >= 1.0 - tol)
}

/// `a` dominates `b` in `(eta, delta)`.
pub fn dominates(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 >= b.0 && a.1 >= b.1 && (a.0 > b.0 || a.1 > b.1)
}

/// Indices of the non-dominated points, ascending.
pub fn pareto_front_points(points: &[(f64, f64)]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|&q| dominates(q, points[i])))
        .collect()
}

pub fn pareto_front(candidates: &[CandidateEvaluation]) -> Vec<usize> {
    let points: Vec<(f64, f64)> = candidates.iter().map(|c| (c.eta, c.delta)).collect();
    pareto_front_points(&points)
}
