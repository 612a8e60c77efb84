//! Interpretability-aware model selection for sparse linear classifiers.
//!
//! The crate fits L1-penalised least-squares classifiers over a grid of
//! regularisation strengths and scores each candidate on two axes:
//!
//! - **performance** `delta`, one minus the out-of-bag misclassification
//!   rate averaged over bootstrap replicates;
//! - **interpretability** `eta`, the mean cosine similarity between each
//!   replicate's unit-norm weight map and a known reference direction.
//!
//! The two are combined into a single criterion `zeta` (a weighted mean that
//! drops to zero below a performance floor) whose maximiser is Pareto optimal
//! in `(eta, delta)`.
//!
//! ```
//! use interp_select::dataset::{generate_toy, generative_reference, ToyConfig};
//! use interp_select::selection::{select, GridSpec};
//!
//! let config = ToyConfig { n_per_class: 200, ..ToyConfig::default() };
//! let data = generate_toy(&config)?;
//! let reference = generative_reference(&config)?;
//! let report = select(&data, &GridSpec::default(), &reference)?;
//! assert!(report.selected().eta > 0.95);
//! # Ok::<(), interp_select::Error>(())
//! ```
//!
//! The `book/` directory at the repository root walks through each piece in
//! more detail; its code listings are compiled and run as doctests.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod perturbation;
pub mod selection;
pub mod solver;

pub use dataset::{Dataset, ReferenceSolution, ToyConfig};
pub use error::{Error, Result};
pub use metrics::{CandidateEvaluation, MetricConfig};
pub use perturbation::{PerturbationPlan, ReplicateSet};
pub use selection::{GridSpec, SelectionReport};
pub use solver::{LassoSpec, Mbm, WeightVector};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/toy-data.md")]
    mod toy_data {}
    #[doc = include_str!("../../../book/src/lasso.md")]
    mod lasso {}
    #[doc = include_str!("../../../book/src/bootstrap.md")]
    mod bootstrap {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
