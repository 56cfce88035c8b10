use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::{run_chain, SamplerConfig, SamplerKind, Samples};
use crate::targets::{BoundingBox, GaussianMixture, MixtureSpec};

/// Default radius for assigning a sample to its nearest component mean.
pub const ASSIGNMENT_RADIUS: f64 = 3.0;

/// A mixture target, its sampling box, a common start, and the chain
/// settings shared by both samplers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureExperiment {
    pub spec: MixtureSpec,
    pub bbox: BoundingBox,
    pub start: Vec<f64>,
    pub radius: f64,
    pub sampler: SamplerConfig,
}

impl MixtureExperiment {
    /// Four well separated modes on `[-30, 30]²`, started at `(-5, 5)`.
    pub fn four_modes(seed: u64) -> Self {
        Self {
            spec: MixtureSpec::four_modes(),
            bbox: BoundingBox::cube(2, -30.0, 30.0).expect("valid box"),
            start: vec![-5.0, 5.0],
            radius: ASSIGNMENT_RADIUS,
            sampler: SamplerConfig {
                n_iterations: 11_000,
                burn_in: 1_000,
                seed,
                ..SamplerConfig::default()
            },
        }
    }

    pub fn target(&self) -> Result<GaussianMixture> {
        if self.radius.is_nan() || self.radius <= 0.0 {
            return Err(Error::InvalidConfig("assignment radius must be positive".into()));
        }
        GaussianMixture::new(self.spec.clone(), Some(self.bbox.clone()))
    }
}

/// Index of the nearest component mean, if it lies within `radius`.
pub fn assign_component(spec: &MixtureSpec, x: &[f64], radius: f64) -> Option<usize> {
    let dist2 = |m: &Vec<f64>| m.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let (best, d2) = spec
        .means
        .iter()
        .enumerate()
        .map(|(k, m)| (k, dist2(m)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    (d2 <= radius * radius).then_some(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub true_mean: Vec<f64>,
    pub weight: f64,
    pub count: usize,
    pub fraction: f64,
    /// Mean of the assigned samples; `None` when nothing was assigned.
    pub mean: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureReport {
    pub sampler: SamplerKind,
    pub seed: u64,
    pub start: Vec<f64>,
    pub n_samples: usize,
    pub components: Vec<ComponentSummary>,
    pub unassigned_fraction: f64,
    pub modes_visited: usize,
    pub acceptance_rate: f64,
}

/// Per-component counts, fractions and means of `samples`.
pub fn summarize(spec: &MixtureSpec, samples: &Samples, radius: f64) -> (Vec<ComponentSummary>, f64) {
    let k = spec.means.len();
    let dim = spec.dim();
    let mut counts = vec![0usize; k];
    let mut sums = vec![vec![0.0; dim]; k];
    for row in samples.rows() {
        if let Some(c) = assign_component(spec, row, radius) {
            counts[c] += 1;
            sums[c].iter_mut().zip(row).for_each(|(s, v)| *s += v);
        }
    }
    let n = samples.len().max(1) as f64;
    let comps: Vec<ComponentSummary> = (0..k)
        .map(|c| ComponentSummary {
            true_mean: spec.means[c].clone(),
            weight: spec.weights[c],
            count: counts[c],
            fraction: counts[c] as f64 / n,
            mean: (counts[c] > 0).then(|| sums[c].iter().map(|s| s / counts[c] as f64).collect()),
        })
        .collect();
    let assigned: usize = counts.iter().sum();
    (comps, 1.0 - assigned as f64 / n)
}

#[derive(Clone, Debug)]
pub struct MixtureRun {
    pub report: MixtureReport,
    pub samples: Samples,
}

/// Runs one sampler on the mixture and summarizes the retained samples.
pub fn run_mixture_chain(kind: SamplerKind, exp: &MixtureExperiment) -> Result<MixtureRun> {
    let target = exp.target()?;
    let out = run_chain(kind, &target, &exp.sampler, &exp.start)?;
    let (components, unassigned_fraction) = summarize(&exp.spec, &out.samples, exp.radius);
    let report = MixtureReport {
        sampler: kind,
        seed: exp.sampler.seed,
        start: exp.start.clone(),
        n_samples: out.samples.len(),
        modes_visited: components.iter().filter(|c| c.count > 0).count(),
        components,
        unassigned_fraction,
        acceptance_rate: out.acceptance_rate(),
    };
    Ok(MixtureRun {
        report,
        samples: out.samples,
    })
}

#[derive(Clone, Debug)]
pub struct MixtureComparison {
    pub gibbs_arms: MixtureRun,
    pub hararms: MixtureRun,
}

/// Gibbs-ARMS and HARARMS from the same start with the same budget and seed.
pub fn run_mixture_comparison(exp: &MixtureExperiment) -> Result<MixtureComparison> {
    let mut runs = super::par_map(vec![SamplerKind::GibbsArms, SamplerKind::Hararms], |k| {
        run_mixture_chain(k, exp)
    })
    .into_iter();
    let gibbs_arms = runs.next().expect("two runs")?;
    let hararms = runs.next().expect("two runs")?;
    Ok(MixtureComparison { gibbs_arms, hararms })
}

/// Component sample counts for one seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicateCounts {
    pub seed: u64,
    pub gibbs_arms: Vec<usize>,
    pub hararms: Vec<usize>,
}

/// Replicated comparison from a single start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrappingReport {
    pub start: Vec<f64>,
    pub replicates: Vec<ReplicateCounts>,
    /// Per component, the number of seeds in which Gibbs-ARMS never reached it.
    pub gibbs_arms_missed: Vec<usize>,
    pub hararms_missed: Vec<usize>,
}

/// Runs both samplers from `start` for seeds `seed, seed + 1, …`.
pub fn trapping_study(exp: &MixtureExperiment, start: &[f64], replicates: usize) -> Result<TrappingReport> {
    let base = exp.sampler.seed;
    let cells: Vec<(u64, SamplerKind)> = (0..replicates as u64)
        .flat_map(|i| {
            [
                (base.wrapping_add(i), SamplerKind::GibbsArms),
                (base.wrapping_add(i), SamplerKind::Hararms),
            ]
        })
        .collect();
    let counts = super::par_map(cells, |(seed, kind)| {
        let mut cell = exp.clone();
        cell.start = start.to_vec();
        cell.sampler.seed = seed;
        run_mixture_chain(kind, &cell).map(|r| r.report.components.iter().map(|c| c.count).collect::<Vec<_>>())
    });
    let mut counts = counts.into_iter();
    let mut reps = Vec::with_capacity(replicates);
    for i in 0..replicates as u64 {
        let gibbs_arms = counts.next().expect("cell")?;
        let hararms = counts.next().expect("cell")?;
        reps.push(ReplicateCounts {
            seed: base.wrapping_add(i),
            gibbs_arms,
            hararms,
        });
    }
    let k = exp.spec.means.len();
    let missed = |f: fn(&ReplicateCounts) -> &Vec<usize>| -> Vec<usize> {
        (0..k).map(|c| reps.iter().filter(|r| f(r)[c] == 0).count()).collect()
    };
    Ok(TrappingReport {
        start: start.to_vec(),
        gibbs_arms_missed: missed(|r| &r.gibbs_arms),
        hararms_missed: missed(|r| &r.hararms),
        replicates: reps,
    })
}
