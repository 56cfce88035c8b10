use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::{Abscissae, PiecewiseHull};
use crate::interval::Interval;
use crate::math::{ks_distance, NumericalCdf};
use crate::samplers::{arms_step_1d, seeded_rng, AdaptiveRejectionSampler};

/// Grid intervals used for the reference CDF.
pub const CDF_GRID: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `Exp(1)` truncated to the support.
    Exponential,
    /// Standard normal clipped to the support.
    Normal,
    /// Equal mixture of `N(-3, 0.5²)` and `N(3, 0.5²)`.
    Bimodal,
}

impl Family {
    pub fn log_density(self, x: f64) -> f64 {
        match self {
            Family::Exponential => -x,
            Family::Normal => -0.5 * x * x,
            Family::Bimodal => {
                let a = -2.0 * (x + 3.0) * (x + 3.0);
                let b = -2.0 * (x - 3.0) * (x - 3.0);
                let m = a.max(b);
                m + ((a - m).exp() + (b - m).exp()).ln()
            }
        }
    }

    pub fn default_support(self) -> Interval {
        match self {
            Family::Exponential => Interval { lo: 0.0, hi: 10.0 },
            Family::Normal => Interval { lo: -5.0, hi: 5.0 },
            Family::Bimodal => Interval { lo: -10.0, hi: 10.0 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ars,
    Arms,
}

/// A univariate sampling run: exact ARS draws, or an ARMS chain that
/// rebuilds its hull every step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnivariateExperiment {
    pub family: Family,
    pub method: Method,
    #[serde(default)]
    pub support: Option<Interval>,
    pub n_samples: usize,
    /// ARMS only.
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "default_initial")]
    pub initial_abscissae: usize,
    #[serde(default = "default_cap")]
    pub abscissae_cap: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_initial() -> usize {
    crate::hull::DEFAULT_INITIAL_ABSCISSAE
}
fn default_cap() -> usize {
    crate::hull::DEFAULT_ABSCISSAE_CAP
}

impl UnivariateExperiment {
    pub fn new(family: Family, method: Method, n_samples: usize, seed: u64) -> Self {
        Self {
            family,
            method,
            support: None,
            n_samples,
            burn_in: 0,
            initial_abscissae: default_initial(),
            abscissae_cap: default_cap(),
            seed,
        }
    }

    pub fn support(&self) -> Interval {
        self.support.unwrap_or_else(|| self.family.default_support())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnivariateReport {
    pub family: Family,
    pub method: Method,
    pub support: Interval,
    pub n_samples: usize,
    /// KS distance to the tabulated CDF of the truncated target.
    pub ks_distance: f64,
    /// ARS: accepted / proposed. ARMS: fraction of steps that moved.
    pub acceptance_rate: f64,
    pub final_abscissae: usize,
}

#[derive(Clone, Debug)]
pub struct UnivariateRun {
    pub report: UnivariateReport,
    pub samples: Vec<f64>,
    /// The ARS hull after sampling, or the ARMS hull of the last step.
    pub hull: PiecewiseHull,
}

pub fn sample_univariate(exp: &UnivariateExperiment) -> Result<UnivariateRun> {
    if exp.n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be positive".into()));
    }
    let support = Interval::new(exp.support().lo, exp.support().hi)?;
    let family = exp.family;
    let logf = move |x: f64| family.log_density(x);
    let mut rng = seeded_rng(exp.seed, 0);
    let (samples, acceptance_rate, abscissae) = match exp.method {
        Method::Ars => {
            let a = Abscissae::initial(support, exp.initial_abscissae, exp.abscissae_cap, logf)?;
            let mut ars = AdaptiveRejectionSampler::new(a)?;
            let samples = (0..exp.n_samples)
                .map(|_| ars.sample(logf, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            (samples, ars.acceptance_rate(), ars.abscissae().clone())
        }
        Method::Arms => {
            let grid = support.interior_grid(101);
            let mut z = grid
                .iter()
                .copied()
                .fold(grid[0], |a, b| if logf(b) > logf(a) { b } else { a });
            let mut lz = logf(z);
            let mut samples = Vec::with_capacity(exp.n_samples);
            let mut moved = 0usize;
            let mut last = None;
            for i in 0..exp.burn_in + exp.n_samples {
                let mut a = Abscissae::initial(support, exp.initial_abscissae, exp.abscissae_cap, logf)?;
                let step = arms_step_1d(logf, z, lz, &mut a, &mut rng)?;
                if step.accepted {
                    z = step.z;
                    lz = step.log_density;
                    moved += 1;
                }
                if i >= exp.burn_in {
                    samples.push(z);
                }
                last = Some(a);
            }
            let steps = (exp.burn_in + exp.n_samples) as f64;
            (samples, moved as f64 / steps, last.expect("at least one step"))
        }
    };
    let hull = match exp.method {
        Method::Ars => PiecewiseHull::ars(&abscissae)?,
        Method::Arms => PiecewiseHull::arms(&abscissae)?,
    };
    let cdf = NumericalCdf::new(logf, support.lo, support.hi, CDF_GRID);
    let report = UnivariateReport {
        family,
        method: exp.method,
        support,
        n_samples: samples.len(),
        ks_distance: ks_distance(&samples, |x| cdf.cdf(x)),
        acceptance_rate,
        final_abscissae: abscissae.len(),
    };
    Ok(UnivariateRun { report, samples, hull })
}
