use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::quantile_sorted;
use crate::samplers::{run_chain_on_stream, SamplerConfig, SamplerKind, Samples};
use crate::spline::{ols_fit, Dataset, KnotLikelihood, SplineSpec};

/// Largest knot count a free-knot fit accepts.
pub const MAX_KNOTS: usize = 10;

/// Chain count and line search used by free-knot fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitSettings {
    /// Independent chains, pooled after completion.
    pub chains: usize,
    /// Overrides the sampler's golden-section evaluations per line. The
    /// knot likelihood is sharply peaked along most lines, and evenly spread
    /// abscissae alone leave the peak under the hull.
    pub mode_search: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self {
            chains: 4,
            mode_search: 8,
        }
    }
}

/// Lower and upper credible quantiles reported per knot.
pub const CREDIBLE_LEVELS: (f64, f64) = (0.05, 0.95);

/// Summary of a free-knot posterior fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotFitReport {
    pub n_knots: usize,
    pub degree: u32,
    /// Highest-likelihood posterior sample, sorted.
    pub knots: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub log_likelihood: f64,
    /// Spline coefficients plus knot locations plus the noise variance.
    pub n_parameters: usize,
    pub aic: f64,
    pub bic: f64,
    pub n_observations: usize,
    /// Retained samples pooled over all chains.
    pub n_samples: usize,
    pub chains: usize,
    pub acceptance_rate: f64,
    /// Best log-likelihood reached by each chain.
    pub chain_best: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct KnotFit {
    pub report: KnotFitReport,
    /// Retained knot samples, each row sorted.
    pub samples: Samples,
}

/// `(c + K + 1)` with `c = degree + 1 + K` spline coefficients.
pub fn parameter_count(degree: u32, n_knots: usize) -> usize {
    degree as usize + 1 + 2 * n_knots + 1
}

/// `(AIC, BIC)` for a log-likelihood with `p` parameters and `n` observations.
pub fn information_criteria(log_likelihood: f64, p: usize, n: usize) -> (f64, f64) {
    let p = p as f64;
    (
        -2.0 * log_likelihood + 2.0 * p,
        -2.0 * log_likelihood + (n as f64).ln() * p,
    )
}

/// HARARMS over the knot box `[min x + δ, max x - δ]^K`, started from evenly
/// spaced knots. `settings.chains` independent chains run on separate RNG
/// streams of `sampler.seed` and their retained samples are pooled. The point estimate
/// is the best pooled sample; the bounds are per-coordinate quantiles of the
/// sorted samples.
pub fn fit_free_knot(
    data: &Dataset,
    n_knots: usize,
    degree: u32,
    sampler: &SamplerConfig,
    settings: &FitSettings,
) -> Result<KnotFit> {
    if !(1..=MAX_KNOTS).contains(&n_knots) {
        return Err(Error::InvalidConfig(format!(
            "knot count must be in 1..={MAX_KNOTS}, got {n_knots}"
        )));
    }
    let chains = settings.chains;
    if chains == 0 {
        return Err(Error::InvalidConfig("chains must be positive".into()));
    }
    let sampler = &SamplerConfig {
        mode_search: settings.mode_search,
        ..sampler.clone()
    };
    sampler.validate()?;
    let target = KnotLikelihood::new(data, degree, n_knots)?;
    let start = data.knot_interval().interior_grid(n_knots);
    let outputs = super::par_map((0..chains as u64).collect(), |stream| {
        run_chain_on_stream(SamplerKind::Hararms, &target, sampler, &start, stream)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let best_of = |lds: &[f64]| lds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let chain_best: Vec<f64> = outputs.iter().map(|o| best_of(&o.log_densities)).collect();
    let (best_chain, best) = outputs
        .iter()
        .enumerate()
        .flat_map(|(c, o)| o.log_densities.iter().enumerate().map(move |(i, &v)| ((c, i), v)))
        .fold(((0, 0), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0;
    let mut knots = outputs[best_chain].samples.row(best).to_vec();
    knots.sort_by(f64::total_cmp);

    let mut sorted_rows = Samples::new(n_knots);
    let mut row = vec![0.0; n_knots];
    for r in outputs.iter().flat_map(|o| o.samples.rows()) {
        row.copy_from_slice(r);
        row.sort_by(f64::total_cmp);
        sorted_rows.push(&row);
    }
    let (lower, upper): (Vec<f64>, Vec<f64>) = (0..n_knots)
        .map(|k| {
            let mut col = sorted_rows.column(k);
            col.sort_by(f64::total_cmp);
            (
                quantile_sorted(&col, CREDIBLE_LEVELS.0),
                quantile_sorted(&col, CREDIBLE_LEVELS.1),
            )
        })
        .unzip();

    let fit = ols_fit(&SplineSpec::new(degree, knots.clone())?, data)?;
    let n_parameters = parameter_count(degree, n_knots);
    let (aic, bic) = information_criteria(fit.log_likelihood, n_parameters, data.len());
    let report = KnotFitReport {
        n_knots,
        degree,
        knots,
        lower,
        upper,
        log_likelihood: fit.log_likelihood,
        n_parameters,
        aic,
        bic,
        n_observations: data.len(),
        n_samples: sorted_rows.len(),
        chains,
        acceptance_rate: outputs.iter().map(|o| o.acceptance_rate()).sum::<f64>() / chains as f64,
        chain_best,
    };
    Ok(KnotFit {
        report,
        samples: sorted_rows,
    })
}

/// Independent fits for each knot count, in the order given.
pub fn fit_knot_range(
    data: &Dataset,
    degree: u32,
    counts: &[usize],
    sampler: &SamplerConfig,
    settings: &FitSettings,
) -> Result<Vec<KnotFit>> {
    super::par_map(counts.to_vec(), |k| fit_free_knot(data, k, degree, sampler, settings))
        .into_iter()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionRow {
    pub n_knots: usize,
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LikelihoodIncrement {
    pub from: usize,
    pub to: usize,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionReport {
    pub aic_knots: usize,
    pub bic_knots: usize,
    pub rows: Vec<CriterionRow>,
    pub increments: Vec<LikelihoodIncrement>,
}

/// AIC and BIC winners (ties go to fewer knots) and the log-likelihood gain
/// of each extra knot. Reports must cover consecutive knot counts.
pub fn model_selection(reports: &[KnotFitReport]) -> Result<SelectionReport> {
    if reports.is_empty() {
        return Err(Error::InvalidConfig("model selection needs at least one fit".into()));
    }
    let mut sorted: Vec<&KnotFitReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.n_knots);
    if sorted.windows(2).any(|w| w[1].n_knots != w[0].n_knots + 1) {
        return Err(Error::InvalidConfig("fits must cover consecutive knot counts".into()));
    }
    let argmin = |f: fn(&KnotFitReport) -> f64| {
        sorted
            .iter()
            .fold((sorted[0].n_knots, f64::INFINITY), |best, r| {
                if f(r) < best.1 {
                    (r.n_knots, f(r))
                } else {
                    best
                }
            })
            .0
    };
    Ok(SelectionReport {
        aic_knots: argmin(|r| r.aic),
        bic_knots: argmin(|r| r.bic),
        rows: sorted
            .iter()
            .map(|r| CriterionRow {
                n_knots: r.n_knots,
                log_likelihood: r.log_likelihood,
                aic: r.aic,
                bic: r.bic,
            })
            .collect(),
        increments: sorted
            .windows(2)
            .map(|w| LikelihoodIncrement {
                from: w[0].n_knots,
                to: w[1].n_knots,
                delta: w[1].log_likelihood - w[0].log_likelihood,
            })
            .collect(),
    })
}
