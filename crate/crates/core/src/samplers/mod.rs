//! ARS, Metropolis-Hastings, univariate ARMS, Gibbs-embedded ARMS and
//! hit-and-run ARMS, plus a seeded chain driver.

mod arms;
mod ars;
mod gibbs;
mod hit_and_run;
mod metropolis;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use self::arms::{arms_log_acceptance, arms_step_1d, ArmsStep, INFEASIBLE_DROP};
pub use self::ars::{ars_sample, AdaptiveRejectionSampler, MAX_IDLE_REJECTIONS};
pub use self::gibbs::gibbs_arms_step;
pub use self::hit_and_run::{hararms_step, random_direction, MAX_DIRECTION_ATTEMPTS, MIN_LINE_WIDTH};
pub use self::metropolis::{mh_step, GaussianRandomWalk, Proposal};

use crate::error::{Error, Result};
use crate::hull::{Abscissae, DEFAULT_ABSCISSAE_CAP, DEFAULT_INITIAL_ABSCISSAE, MIN_ABSCISSAE};
use crate::interval::Interval;
use crate::targets::TargetDensity;

/// Builds a reproducible generator for stream `stream` of `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Current position of a chain together with its generator.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub x: Vec<f64>,
    /// Cached `ln f(x)`; always finite.
    pub log_density: f64,
    pub iteration: u64,
    pub rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new<T: TargetDensity + ?Sized>(target: &T, x: Vec<f64>, seed: u64) -> Result<Self> {
        Self::with_rng(target, x, seeded_rng(seed, 0))
    }

    pub fn with_rng<T: TargetDensity + ?Sized>(target: &T, x: Vec<f64>, rng: ChaCha8Rng) -> Result<Self> {
        if x.len() != target.dim() {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                got: x.len(),
            });
        }
        if !target.bounding_box().contains(&x) {
            return Err(Error::OutsideBox);
        }
        let log_density = target.log_density(&x);
        if !log_density.is_finite() {
            return Err(Error::InfeasibleStart);
        }
        Ok(Self {
            x,
            log_density,
            iteration: 0,
            rng,
        })
    }
}

/// Initial abscissae and cap for the per-step ARMS hulls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullSettings {
    pub initial_abscissae: usize,
    pub cap: usize,
    /// Extra evaluations spent locating the line maximum before sampling.
    pub mode_search: usize,
}

impl Default for HullSettings {
    fn default() -> Self {
        Self {
            initial_abscissae: DEFAULT_INITIAL_ABSCISSAE,
            cap: DEFAULT_ABSCISSAE_CAP,
            mode_search: 0,
        }
    }
}

impl HullSettings {
    /// Fresh abscissae for one univariate subproblem on `support`.
    pub fn abscissae<F>(&self, support: Interval, logf: F) -> Result<Abscissae>
    where
        F: Fn(f64) -> f64,
    {
        let mut a = Abscissae::initial(support, self.initial_abscissae, self.cap, &logf)?;
        a.refine_toward_max(&logf, self.mode_search)?;
        Ok(a)
    }
}

/// Diagnostics for a single sampler step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub proposal: Vec<f64>,
    pub accepted: bool,
    pub hull_rebuilds: usize,
    /// Present only for hit-and-run steps.
    pub direction: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    GibbsArms,
    Hararms,
    Metropolis,
}

fn default_n_iterations() -> usize {
    11_000
}
fn default_burn_in() -> usize {
    1_000
}
fn default_initial_abscissae() -> usize {
    DEFAULT_INITIAL_ABSCISSAE
}
fn default_cap() -> usize {
    DEFAULT_ABSCISSAE_CAP
}
fn default_scale() -> f64 {
    1.0
}

/// Chain length and hull settings. `n_iterations` counts every step; the
/// first `burn_in` of them are discarded, leaving `n_iterations - burn_in`
/// retained samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    #[serde(default = "default_n_iterations")]
    pub n_iterations: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_initial_abscissae")]
    pub initial_abscissae: usize,
    #[serde(default = "default_cap")]
    pub abscissae_cap: usize,
    #[serde(default)]
    pub seed: u64,
    /// Golden-section evaluations toward the maximum of each line before
    /// its hull is built. Zero keeps the evenly spread abscissae only.
    #[serde(default)]
    pub mode_search: usize,
    /// Random-walk standard deviation, used by the Metropolis sampler only.
    #[serde(default = "default_scale")]
    pub proposal_scale: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_iterations: default_n_iterations(),
            burn_in: default_burn_in(),
            initial_abscissae: default_initial_abscissae(),
            abscissae_cap: default_cap(),
            seed: 0,
            mode_search: 0,
            proposal_scale: default_scale(),
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_iterations == 0 {
            return bad("n_iterations must be positive");
        }
        if self.burn_in >= self.n_iterations {
            return bad("burn_in must be smaller than n_iterations");
        }
        if self.initial_abscissae < MIN_ABSCISSAE {
            return bad("initial_abscissae must be at least 4");
        }
        if self.abscissae_cap < self.initial_abscissae {
            return bad("abscissae_cap must be at least initial_abscissae");
        }
        if !(self.proposal_scale > 0.0 && self.proposal_scale.is_finite()) {
            return bad("proposal_scale must be positive");
        }
        Ok(())
    }

    pub fn hull_settings(&self) -> HullSettings {
        HullSettings {
            initial_abscissae: self.initial_abscissae,
            cap: self.abscissae_cap,
            mode_search: self.mode_search,
        }
    }

    pub fn retained(&self) -> usize {
        self.n_iterations.saturating_sub(self.burn_in)
    }
}

/// Row-major matrix of retained samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    dim: usize,
    values: Vec<f64>,
}

impl Samples {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            values: Vec::new(),
        }
    }

    pub fn from_rows(dim: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len() % dim.max(1), 0, "ragged sample matrix");
        Self { dim, values }
    }

    pub fn push(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.dim);
        self.values.extend_from_slice(row);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows().map(|r| r[k]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub samples: Samples,
    /// Log-density of each retained sample.
    pub log_densities: Vec<f64>,
    /// One record per executed step, burn-in included.
    pub records: Vec<StepRecord>,
}

impl ChainOutput {
    pub fn acceptance_rate(&self) -> f64 {
        let n = self.records.len().max(1);
        self.records.iter().filter(|r| r.accepted).count() as f64 / n as f64
    }
}

/// Runs `config.n_iterations` steps of `kind` from `start`, keeping the
/// samples after burn-in. Deterministic given `config.seed`.
pub fn run_chain<T>(kind: SamplerKind, target: &T, config: &SamplerConfig, start: &[f64]) -> Result<ChainOutput>
where
    T: TargetDensity + ?Sized,
{
    run_chain_on_stream(kind, target, config, start, 0)
}

/// [`run_chain`] on RNG stream `stream` of `config.seed`. Distinct streams
/// give independent chains from one seed.
pub fn run_chain_on_stream<T>(
    kind: SamplerKind,
    target: &T,
    config: &SamplerConfig,
    start: &[f64],
    stream: u64,
) -> Result<ChainOutput>
where
    T: TargetDensity + ?Sized,
{
    config.validate()?;
    let mut state = ChainState::with_rng(target, start.to_vec(), seeded_rng(config.seed, stream))?;
    let settings = config.hull_settings();
    let walk = GaussianRandomWalk {
        scale: config.proposal_scale,
    };
    let mut samples = Samples::new(target.dim());
    let mut log_densities = Vec::with_capacity(config.retained());
    let mut records = Vec::with_capacity(config.n_iterations);
    for i in 0..config.n_iterations {
        let record = match kind {
            SamplerKind::GibbsArms => gibbs_arms_step(&mut state, target, &settings)?,
            SamplerKind::Hararms => hararms_step(&mut state, target, &settings)?,
            SamplerKind::Metropolis => mh_step(&mut state, &walk, target),
        };
        records.push(record);
        if i >= config.burn_in {
            samples.push(&state.x);
            log_densities.push(state.log_density);
        }
    }
    Ok(ChainOutput {
        samples,
        log_densities,
        records,
    })
}
