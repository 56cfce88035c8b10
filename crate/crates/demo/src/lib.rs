//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each exported function returns a JSON string. The plain Rust functions
//! behind them are public so they can be tested natively.

use hararms::experiments::{gen_dataset_1, gen_dataset_2, grid_loglik, Family, GridSpec, GridTable};
use hararms::hull::{Abscissae, HullKind, HullSegment, PiecewiseHull};
use hararms::samplers::{run_chain, seeded_rng, SamplerConfig, SamplerKind};
use hararms::spline::{ols_fit, SplineSpec};
use hararms::targets::{BoundingBox, GaussianMixture, MixtureSpec};
use hararms::{Error, Result};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const CURVE_POINTS: usize = 400;
const BINS: usize = 40;

#[derive(Serialize)]
pub struct HullProfile {
    pub kind: HullKind,
    pub points: Vec<f64>,
    pub log_values: Vec<f64>,
    pub segments: Vec<HullSegment>,
    /// `[x, log f(x), h(x)]` on an even grid.
    pub curve: Vec<[f64; 3]>,
    /// Whether `h >= log f` everywhere on the grid.
    pub covers_target: bool,
    /// `[bin centre, empirical density, normalised hull density]`.
    pub histogram: Vec<[f64; 3]>,
}

fn parse_family(name: &str) -> Result<Family> {
    match name {
        "exponential" => Ok(Family::Exponential),
        "normal" => Ok(Family::Normal),
        "bimodal" => Ok(Family::Bimodal),
        _ => Err(Error::InvalidConfig(format!("unknown family {name:?}"))),
    }
}

fn parse_hull(name: &str) -> Result<HullKind> {
    match name {
        "ars" => Ok(HullKind::Ars),
        "arms" => Ok(HullKind::Arms),
        _ => Err(Error::InvalidConfig(format!("unknown hull {name:?}"))),
    }
}

/// Hull over `n_points` evenly spread abscissae of a univariate family,
/// with a histogram of `n_draws` draws from the normalised hull.
pub fn hull_profile(family: &str, hull: &str, n_points: usize, n_draws: usize, seed: u64) -> Result<HullProfile> {
    let family = parse_family(family)?;
    let kind = parse_hull(hull)?;
    let support = family.default_support();
    let abscissae = Abscissae::initial(support, n_points, n_points.max(3), |x| family.log_density(x))?;
    let built = PiecewiseHull::build(&abscissae, kind)?;

    let curve: Vec<[f64; 3]> = (0..CURVE_POINTS)
        .map(|i| {
            let x = support.lo + support.width() * i as f64 / (CURVE_POINTS - 1) as f64;
            [x, family.log_density(x), built.value_at(x)]
        })
        .collect();
    let covers_target = curve.iter().all(|[_, f, h]| h >= &(f - 1e-9 * (1.0 + f.abs())));

    let mut rng = seeded_rng(seed, 0);
    let width = support.width() / BINS as f64;
    let mut counts = vec![0usize; BINS];
    for _ in 0..n_draws {
        let b = ((built.sample(&mut rng) - support.lo) / width) as usize;
        counts[b.min(BINS - 1)] += 1;
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let centre = support.lo + (b as f64 + 0.5) * width;
            let empirical = c as f64 / (n_draws.max(1) as f64 * width);
            [centre, empirical, (built.value_at(centre) - built.total_log_mass).exp()]
        })
        .collect();

    Ok(HullProfile {
        kind,
        points: abscissae.points().to_vec(),
        log_values: abscissae.log_values().to_vec(),
        segments: built.segments.clone(),
        curve,
        covers_target,
        histogram,
    })
}

#[derive(Serialize)]
pub struct MixtureRun {
    pub sampler: SamplerKind,
    pub means: Vec<Vec<f64>>,
    /// Retained draws as `[x, y]` pairs.
    pub samples: Vec<[f64; 2]>,
    pub acceptance_rate: f64,
    /// Share of retained draws nearest to each mixture mean.
    pub occupancy: Vec<f64>,
}

/// One chain on the four-mode mixture, started at the origin.
pub fn sample_mixture(sampler: &str, n_iterations: usize, seed: u64) -> Result<MixtureRun> {
    let kind = match sampler {
        "hararms" => SamplerKind::Hararms,
        "gibbs-arms" => SamplerKind::GibbsArms,
        "metropolis" => SamplerKind::Metropolis,
        _ => return Err(Error::InvalidConfig(format!("unknown sampler {sampler:?}"))),
    };
    let spec = MixtureSpec::four_modes();
    let target = GaussianMixture::new(spec.clone(), Some(BoundingBox::cube(2, -30.0, 30.0)?))?;
    let config = SamplerConfig {
        n_iterations,
        burn_in: n_iterations / 10,
        seed,
        ..Default::default()
    };
    let out = run_chain(kind, &target, &config, &[0.0, 0.0])?;

    let mut occupancy = vec![0.0; spec.means.len()];
    let samples: Vec<[f64; 2]> = out.samples.rows().map(|r| [r[0], r[1]]).collect();
    for s in &samples {
        let nearest = spec
            .means
            .iter()
            .map(|m| (m[0] - s[0]).powi(2) + (m[1] - s[1]).powi(2))
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(0, |(i, _)| i);
        occupancy[nearest] += 1.0 / samples.len() as f64;
    }
    Ok(MixtureRun {
        sampler: kind,
        means: spec.means,
        samples,
        acceptance_rate: out.acceptance_rate(),
        occupancy,
    })
}

#[derive(Serialize)]
pub struct KnotCurve {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `[knot, profile log-likelihood]` over the grid.
    pub curve: Vec<[f64; 2]>,
    pub best_knot: f64,
    pub best_log_likelihood: f64,
    /// Single-knot spline at the best knot, evaluated at `x`.
    pub fitted: Vec<f64>,
    /// Noise-free generating mean at `x`.
    pub truth: Vec<f64>,
}

/// Single-knot likelihood scan over one of the two synthetic datasets.
pub fn knot_curve(dataset: u32, seed: u64, step: f64) -> Result<KnotCurve> {
    let data = match dataset {
        1 => gen_dataset_1(seed),
        2 => gen_dataset_2(seed),
        _ => return Err(Error::InvalidConfig(format!("no dataset {dataset}"))),
    };
    let generating = data
        .generating()
        .ok_or(Error::InvalidConfig("dataset lacks a generating spec".into()))?;
    let degree = generating.spec.degree;
    let x_range = data.x_range();
    let grid = GridSpec {
        start: x_range.lo + step,
        step,
        count: ((x_range.width() / step).floor() as usize).saturating_sub(1).max(1),
    };
    let table = grid_loglik(&data, degree, 1, &grid)?;
    let GridTable::One { points, values } = &table else {
        unreachable!("a one-knot scan gives a one-dimensional table")
    };
    let best = table.argmax();
    let spec = SplineSpec::new(degree, best.knots.clone())?;
    let fit = ols_fit(&spec, &data)?;
    Ok(KnotCurve {
        x: data.x().to_vec(),
        y: data.y().to_vec(),
        curve: points.iter().zip(values).map(|(&k, &v)| [k, v]).collect(),
        best_knot: best.knots[0],
        best_log_likelihood: best.log_likelihood,
        fitted: data.x().iter().map(|&v| spec.evaluate(&fit.coefficients, v)).collect(),
        truth: data.x().iter().map(|&v| generating.mean(v)).collect(),
    })
}

fn to_js<T: Serialize>(result: Result<T>) -> std::result::Result<String, JsError> {
    let value = result.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = hullProfile)]
pub fn hull_profile_js(
    family: &str,
    hull: &str,
    n_points: usize,
    n_draws: usize,
    seed: u32,
) -> std::result::Result<String, JsError> {
    to_js(hull_profile(family, hull, n_points, n_draws, seed.into()))
}

#[wasm_bindgen(js_name = sampleMixture)]
pub fn sample_mixture_js(sampler: &str, n_iterations: usize, seed: u32) -> std::result::Result<String, JsError> {
    to_js(sample_mixture(sampler, n_iterations, seed.into()))
}

#[wasm_bindgen(js_name = knotCurve)]
pub fn knot_curve_js(dataset: u32, seed: u32, step: f64) -> std::result::Result<String, JsError> {
    to_js(knot_curve(dataset, seed.into(), step))
}
