use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::knots::FitSettings;
use super::mixture::{MixtureExperiment, ASSIGNMENT_RADIUS};
use super::univariate::{Family, Method, UnivariateExperiment};
use super::{gen_dataset_1, gen_dataset_2};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::samplers::SamplerConfig;
use crate::spline::Dataset;
use crate::targets::{BoundingBox, MixtureSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetSource {
    /// Linear spline, six knots, `x = 1..1000`.
    #[default]
    One,
    /// Quadratic spline, five knots, `x = 0.001..1`.
    Two,
    /// A CSV file with an optional JSON sidecar.
    File,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default)]
    pub source: DatasetSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Noise seed for synthetic data; defaults to the top-level seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Spline degree; synthetic sources and sidecars supply their own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
}

impl DatasetConfig {
    /// Builds or reads the dataset. Relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Dataset> {
        let seed = self.seed.unwrap_or(0);
        match self.source {
            DatasetSource::One => Ok(gen_dataset_1(seed)),
            DatasetSource::Two => Ok(gen_dataset_2(seed)),
            DatasetSource::File => {
                let path = self
                    .path
                    .as_ref()
                    .ok_or_else(|| Error::InvalidConfig("dataset.path is required for file datasets".into()))?;
                Dataset::load(&base.join(path))
            }
        }
    }

    /// Degree from the config, else from the dataset's generating spec.
    pub fn degree(&self, data: &Dataset) -> Result<u32> {
        self.degree
            .or_else(|| data.generating().map(|g| g.spec.degree))
            .ok_or_else(|| Error::InvalidConfig("dataset.degree is required when the data has no sidecar".into()))
    }
}

fn default_box() -> [f64; 2] {
    [-30.0, 30.0]
}
fn default_start() -> Vec<f64> {
    vec![-5.0, 5.0]
}
fn default_radius() -> f64 {
    ASSIGNMENT_RADIUS
}
fn default_means() -> Vec<Vec<f64>> {
    MixtureSpec::four_modes().means
}
fn default_cov_diag() -> Vec<f64> {
    MixtureSpec::four_modes().cov_diag
}
fn default_weights() -> Vec<f64> {
    MixtureSpec::four_modes().weights
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureConfig {
    #[serde(default = "default_means")]
    pub means: Vec<Vec<f64>>,
    #[serde(default = "default_cov_diag")]
    pub cov_diag: Vec<f64>,
    #[serde(default = "default_weights")]
    pub weights: Vec<f64>,
    /// Every coordinate shares these bounds.
    #[serde(default = "default_box")]
    pub bounds: [f64; 2],
    #[serde(default = "default_start")]
    pub start: Vec<f64>,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Seeds per start in the trapping study; zero skips it.
    #[serde(default)]
    pub replicates: usize,
    /// Starts for the trapping study; defaults to every component mean.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trapping_starts: Option<Vec<Vec<f64>>>,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        let spec = MixtureSpec::four_modes();
        Self {
            means: spec.means,
            cov_diag: spec.cov_diag,
            weights: spec.weights,
            bounds: default_box(),
            start: default_start(),
            radius: default_radius(),
            replicates: 0,
            trapping_starts: None,
        }
    }
}

impl MixtureConfig {
    pub fn spec(&self) -> MixtureSpec {
        MixtureSpec {
            means: self.means.clone(),
            cov_diag: self.cov_diag.clone(),
            weights: self.weights.clone(),
        }
    }
}

fn default_orders() -> Vec<usize> {
    vec![1, 2]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "GridConfig::default_start")]
    pub start: f64,
    #[serde(default = "GridConfig::default_step")]
    pub step: f64,
    #[serde(default = "GridConfig::default_count")]
    pub count: usize,
    /// Knot counts to scan, each 1 or 2.
    #[serde(default = "default_orders")]
    pub knots: Vec<usize>,
}

impl GridConfig {
    fn default_start() -> f64 {
        GridSpec::default().start
    }
    fn default_step() -> f64 {
        GridSpec::default().step
    }
    fn default_count() -> usize {
        GridSpec::default().count
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            start: self.start,
            step: self.step,
            count: self.count,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            start: g.start,
            step: g.step,
            count: g.count,
            knots: default_orders(),
        }
    }
}

fn one() -> usize {
    1
}
fn ten() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default = "one")]
    pub knots: usize,
    /// Independent chains pooled per fit; also used by model selection.
    #[serde(default = "default_chains")]
    pub chains: usize,
    #[serde(default = "default_mode_search")]
    pub mode_search: usize,
}

fn default_chains() -> usize {
    FitSettings::default().chains
}
fn default_mode_search() -> usize {
    FitSettings::default().mode_search
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            knots: 1,
            chains: default_chains(),
            mode_search: default_mode_search(),
        }
    }
}

impl FitConfig {
    pub fn settings(&self) -> FitSettings {
        FitSettings {
            chains: self.chains,
            mode_search: self.mode_search,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default = "one")]
    pub min_knots: usize,
    #[serde(default = "ten")]
    pub max_knots: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            min_knots: 1,
            max_knots: 10,
        }
    }
}

fn default_family() -> Family {
    Family::Bimodal
}
fn default_method() -> Method {
    Method::Arms
}
fn default_n_samples() -> usize {
    50_000
}
fn default_1d_burn_in() -> usize {
    1_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target1dConfig {
    #[serde(default = "default_family")]
    pub family: Family,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<[f64; 2]>,
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default = "default_1d_burn_in")]
    pub burn_in: usize,
}

impl Default for Target1dConfig {
    fn default() -> Self {
        Self {
            family: default_family(),
            method: default_method(),
            support: None,
            n_samples: default_n_samples(),
            burn_in: default_1d_burn_in(),
        }
    }
}

/// Everything one CLI invocation needs. Missing sections take defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub mixture: MixtureConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub target1d: Target1dConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Applies the seed override, propagates the seed to the sampler and the
    /// dataset, and validates.
    pub fn resolve(mut self, seed_override: Option<u64>) -> Result<Self> {
        if let Some(s) = seed_override {
            self.seed = s;
        }
        self.sampler.seed = self.seed;
        if self.dataset.source != DatasetSource::File && self.dataset.seed.is_none() {
            self.dataset.seed = Some(self.seed);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        self.sampler.validate()?;
        self.grid.spec().validate()?;
        if self.grid.knots.is_empty() || self.grid.knots.iter().any(|&k| k != 1 && k != 2) {
            return bad("grid.knots entries must be 1 or 2");
        }
        if self.fit.chains == 0 {
            return bad("fit.chains must be positive");
        }
        if self.selection.min_knots == 0 || self.selection.min_knots > self.selection.max_knots {
            return bad("selection needs 1 <= min_knots <= max_knots");
        }
        if self.dataset.source == DatasetSource::File && self.dataset.path.is_none() {
            return bad("dataset.path is required for file datasets");
        }
        self.mixture.spec().validate()?;
        Interval::new(self.mixture.bounds[0], self.mixture.bounds[1])?;
        if self.target1d.n_samples == 0 {
            return bad("target1d.n_samples must be positive");
        }
        Ok(())
    }

    pub fn mixture_experiment(&self) -> Result<MixtureExperiment> {
        let m = &self.mixture;
        let spec = m.spec();
        Ok(MixtureExperiment {
            bbox: BoundingBox::cube(spec.dim(), m.bounds[0], m.bounds[1])?,
            spec,
            start: m.start.clone(),
            radius: m.radius,
            sampler: self.sampler.clone(),
        })
    }

    pub fn univariate_experiment(&self) -> Result<UnivariateExperiment> {
        let t = &self.target1d;
        let support = t.support.map(|[lo, hi]| Interval::new(lo, hi)).transpose()?;
        Ok(UnivariateExperiment {
            family: t.family,
            method: t.method,
            support,
            n_samples: t.n_samples,
            burn_in: t.burn_in,
            initial_abscissae: self.sampler.initial_abscissae,
            abscissae_cap: self.sampler.abscissae_cap,
            seed: self.seed,
        })
    }
}
