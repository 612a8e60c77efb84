//! Grid search over the L1 strength.
//!
//! Every candidate is scored on the same bootstrap replicates, so differences
//! in `eta` and `delta` across the grid come from the penalty alone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, ReferenceSolution};
use crate::error::{Error, Result};
use crate::metrics::{interpretability, pareto_front, performance, scalarize, CandidateEvaluation, MetricConfig};
use crate::perturbation::{make_replicates, make_replicates_par, PerturbationPlan, ReplicateSet};
use crate::solver::{fit_lasso, normalize, LassoSpec, WeightVector};

/// Candidates whose criterion is within this distance of the best are tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// The grid used for the two-dimensional toy problem, with `0` prepended.
pub const DEFAULT_LAMBDAS: [f64; 11] = [0.0, 0.001, 0.01, 0.1, 1.0, 10.0, 50.0, 100.0, 250.0, 500.0, 1000.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lambdas: Vec<f64>,
    pub plan: PerturbationPlan,
    pub metric_config: MetricConfig,
    /// Solver settings; `lambda` is overridden per candidate.
    pub solver_spec: LassoSpec,
    /// Fan candidate and replicate fits out over the rayon pool. Results do
    /// not depend on it, so it is not serialised.
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lambdas: DEFAULT_LAMBDAS.to_vec(),
            plan: PerturbationPlan::default(),
            metric_config: MetricConfig::default(),
            solver_spec: LassoSpec::default(),
            parallel: false,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::Config("lambda grid is empty".into()));
        }
        if self.lambdas.iter().any(|&l| !l.is_finite() || l < 0.0) {
            return Err(Error::Config("lambda values must be finite and >= 0".into()));
        }
        if self.lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("lambda grid must be strictly ascending".into()));
        }
        self.plan.validate()?;
        self.metric_config.validate()?;
        self.solver_spec.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// One entry per grid value, in grid order.
    pub candidates: Vec<CandidateEvaluation>,
    pub selected_lambda: f64,
    pub selected_index: usize,
    pub pareto_indices: Vec<usize>,
    pub tie_note: Option<String>,
}

impl SelectionReport {
    pub fn selected(&self) -> &CandidateEvaluation {
        &self.candidates[self.selected_index]
    }
}

fn fit_replicate(data: &Dataset, rep: &ReplicateSet, spec: &LassoSpec) -> Result<WeightVector> {
    fit_lasso(&data.select_rows(&rep.in_bag), spec).map_err(|e| e.at_candidate(spec.lambda, Some(rep.replicate_id)))
}

/// Scores one `lambda` against pre-built replicates.
pub fn evaluate_with_replicates(
    data: &Dataset,
    lambda: f64,
    replicates: &[ReplicateSet],
    solver_spec: &LassoSpec,
    metric_config: &MetricConfig,
    reference: &ReferenceSolution,
    parallel: bool,
) -> Result<CandidateEvaluation> {
    let spec = solver_spec.with_lambda(lambda);
    let models: Vec<WeightVector> = if parallel {
        replicates.par_iter().map(|rep| fit_replicate(data, rep, &spec)).collect::<Result<_>>()?
    } else {
        replicates.iter().map(|rep| fit_replicate(data, rep, &spec)).collect::<Result<_>>()?
    };

    let full = fit_lasso(data, &spec).map_err(|e| e.at_candidate(lambda, None))?;
    let full_fit_mbm = normalize(&full).ok();
    let replicate_mbms: Vec<_> = models.iter().map(|w| normalize(w).ok()).collect();

    let delta = performance(replicates, &models, data).map_err(|e| e.at_candidate(lambda, None))?;
    let (eta, degenerate_replicates) =
        interpretability(&replicate_mbms, reference).map_err(|e| e.at_candidate(lambda, None))?;
    let zeta = scalarize(eta, delta, metric_config);

    Ok(CandidateEvaluation {
        lambda,
        delta,
        eta,
        zeta,
        full_fit_mbm,
        replicate_mbms,
        degenerate_replicates,
    })
}

/// Builds the replicates from `plan` and scores one `lambda`.
pub fn evaluate_candidate(
    data: &Dataset,
    lambda: f64,
    plan: &PerturbationPlan,
    solver_spec: &LassoSpec,
    metric_config: &MetricConfig,
    reference: &ReferenceSolution,
) -> Result<CandidateEvaluation> {
    let replicates = make_replicates(data.y(), plan)?;
    evaluate_with_replicates(data, lambda, &replicates, solver_spec, metric_config, reference, false)
}

/// Scores every grid value and picks the one maximising the criterion.
///
/// Ties (within [`TIE_TOLERANCE`]) go to the largest `lambda`.
pub fn select(data: &Dataset, grid: &GridSpec, reference: &ReferenceSolution) -> Result<SelectionReport> {
    grid.validate()?;
    if reference.mbm_star.len() != data.p() {
        return Err(Error::Input(format!(
            "reference has {} entries but data has {} features",
            reference.mbm_star.len(),
            data.p()
        )));
    }
    let replicates = if grid.parallel {
        make_replicates_par(data.y(), &grid.plan)?
    } else {
        make_replicates(data.y(), &grid.plan)?
    };
    let eval = |&lambda: &f64| {
        evaluate_with_replicates(
            data,
            lambda,
            &replicates,
            &grid.solver_spec,
            &grid.metric_config,
            reference,
            grid.parallel,
        )
    };
    let candidates: Vec<CandidateEvaluation> = if grid.parallel {
        grid.lambdas.par_iter().map(eval).collect::<Result<_>>()?
    } else {
        grid.lambdas.iter().map(eval).collect::<Result<_>>()?
    };
    choose(candidates, &grid.metric_config)
}

/// Selection over already-scored candidates (ascending in `lambda`).
pub fn choose(candidates: Vec<CandidateEvaluation>, metric_config: &MetricConfig) -> Result<SelectionReport> {
    if candidates.is_empty() {
        return Err(Error::Selection("no candidates".into()));
    }
    if candidates.iter().all(|c| c.delta < metric_config.kappa) {
        return Err(Error::Selection(format!(
            "no candidate above performance floor kappa = {}",
            metric_config.kappa
        )));
    }
    let best = candidates.iter().map(|c| c.zeta).fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..candidates.len())
        .filter(|&i| candidates[i].zeta >= best - TIE_TOLERANCE)
        .collect();
    let selected_index = *tied.last().expect("at least one candidate attains the maximum");
    let tie_note = (tied.len() > 1).then(|| {
        let lambdas: Vec<String> = tied.iter().map(|&i| candidates[i].lambda.to_string()).collect();
        format!(
            "zeta tied within {TIE_TOLERANCE:e} at lambda = {}; selected the largest",
            lambdas.join(", ")
        )
    });
    let pareto_indices = pareto_front(&candidates);
    Ok(SelectionReport {
        selected_lambda: candidates[selected_index].lambda,
        selected_index,
        pareto_indices,
        tie_note,
        candidates,
    })
}
