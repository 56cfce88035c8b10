//! Desk-scale studies: synthetic spline datasets, knot-likelihood grid scans,
//! the four-mode mixture comparison, free-knot posterior fits and
//! information-criterion model selection.
//!
//! Independent cells (seeds, knot counts, grid rows) run on the rayon pool
//! when the `parallel` feature is on. Results are collected in input order,
//! so outputs do not depend on scheduling.

mod config;
mod datasets;
mod grid;
mod knots;
mod mixture;
mod univariate;

pub use self::config::{
    DatasetConfig, DatasetSource, ExperimentConfig, FitConfig, GridConfig, MixtureConfig, SelectionConfig,
    Target1dConfig,
};
pub use self::datasets::{dataset_1_spec, dataset_2_spec, gen_dataset_1, gen_dataset_2, simulate};
pub use self::grid::{grid_loglik, GridSpec, GridTable, LocalMaximum, LOCAL_MAX_TOL};
pub use self::knots::{
    fit_free_knot, fit_knot_range, information_criteria, model_selection, parameter_count, CriterionRow, FitSettings,
    KnotFit, KnotFitReport, LikelihoodIncrement, SelectionReport, CREDIBLE_LEVELS, MAX_KNOTS,
};
pub use self::mixture::{
    assign_component, run_mixture_chain, run_mixture_comparison, summarize, trapping_study, ComponentSummary,
    MixtureComparison, MixtureExperiment, MixtureReport, MixtureRun, ReplicateCounts, TrappingReport,
    ASSIGNMENT_RADIUS,
};
pub use self::univariate::{sample_univariate, Family, Method, UnivariateExperiment, UnivariateReport, UnivariateRun};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}
