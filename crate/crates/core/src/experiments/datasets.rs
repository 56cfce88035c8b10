use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::samplers::seeded_rng;
use crate::spline::{Dataset, GeneratingSpec, SplineSpec};

/// Draws `y = spline(x) + N(0, noise_sd²)` at the given abscissae.
pub fn simulate(x: Vec<f64>, generating: GeneratingSpec) -> Result<Dataset> {
    let mut rng = seeded_rng(generating.seed, 0);
    let y = x
        .iter()
        .map(|&xi| {
            let e: f64 = rng.sample(StandardNormal);
            generating.mean(xi) + generating.noise_sd * e
        })
        .collect();
    Ok(Dataset::new(x, y)?.with_generating(generating))
}

/// Linear spline with six knots on `x = 1, …, 1000`, noise sd 30.
pub fn dataset_1_spec(seed: u64) -> GeneratingSpec {
    GeneratingSpec {
        spec: SplineSpec {
            degree: 1,
            knots: vec![200.0, 300.0, 400.0, 500.0, 700.0, 900.0],
        },
        polynomial: vec![-0.5, -0.5],
        knot_coefficients: vec![0.5, 1.0, -2.0, 2.5, -3.0, 3.5],
        noise_sd: 30.0,
        seed,
    }
}

/// Quadratic spline with five knots on `x = 0.001, …, 1`, noise sd 0.3.
pub fn dataset_2_spec(seed: u64) -> GeneratingSpec {
    GeneratingSpec {
        spec: SplineSpec {
            degree: 2,
            knots: vec![0.2, 0.4, 0.5, 0.7, 0.9],
        },
        polynomial: vec![-0.5, 0.5, -0.5],
        knot_coefficients: vec![1.0, -3.0, 5.0, -7.0, 15.0],
        noise_sd: 0.3,
        seed,
    }
}

pub fn gen_dataset_1(seed: u64) -> Dataset {
    let x = (1..=1000).map(f64::from).collect();
    simulate(x, dataset_1_spec(seed)).expect("dataset 1 abscissae are valid")
}

pub fn gen_dataset_2(seed: u64) -> Dataset {
    let x = (1..=1000).map(|i| f64::from(i) / 1000.0).collect();
    simulate(x, dataset_2_spec(seed)).expect("dataset 2 abscissae are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn dataset_1_noiseless_means() {
        let g = dataset_1_spec(0);
        assert!((g.mean(100.0) + 50.5).abs() < 1e-12);
        assert!((g.mean(250.0) + 100.5).abs() < 1e-12);
    }

    #[test]
    fn dataset_2_noiseless_means() {
        let g = dataset_2_spec(0);
        assert!((g.mean(0.1) + 0.455).abs() < 1e-12);
        assert!((g.mean(0.3) + 0.385).abs() < 1e-12);
        // Below the first knot only the quadratic is active.
        for x in [0.05, 0.15, 0.2] {
            let poly = -0.5 + 0.5 * x - 0.5 * x * x;
            assert!((g.mean(x) - poly).abs() < 1e-15);
        }
    }

    #[test]
    fn dataset_1_noise_variance_in_chi_square_band() {
        // 0.001 / 0.999 quantiles of σ²χ²₁₀₀₀/1000 with σ² = 900.
        let chi = ChiSquared::new(1000.0).unwrap();
        let (lo, hi) = (
            900.0 * chi.inverse_cdf(0.001) / 1000.0,
            900.0 * chi.inverse_cdf(0.999) / 1000.0,
        );
        assert!(lo > 750.0 && hi < 1050.0);
        for seed in 0..5 {
            let d = gen_dataset_1(seed);
            let g = d.generating().unwrap();
            let ss: f64 = d.x().iter().zip(d.y()).map(|(&x, &y)| (y - g.mean(x)).powi(2)).sum();
            let v = ss / 1000.0;
            assert!((750.0..=1050.0).contains(&v), "seed {seed}: {v}");
        }
    }

    #[test]
    fn generation_is_seeded() {
        assert_eq!(gen_dataset_2(4), gen_dataset_2(4));
        assert_ne!(gen_dataset_2(4).y(), gen_dataset_2(5).y());
        let d = gen_dataset_2(1);
        assert_eq!(d.len(), 1000);
        assert_eq!(d.x()[0], 0.001);
        assert_eq!(d.x()[999], 1.0);
    }
}
