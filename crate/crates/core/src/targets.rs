//! Target densities: the evaluation contract, the Gaussian-mixture target and
//! one-dimensional restrictions along a line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::math::log_sum_exp;

/// Per-dimension bounds of a target's support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BoundingBox(pub Vec<Interval>);

impl BoundingBox {
    pub fn new(intervals: Vec<Interval>) -> Self {
        Self(intervals)
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        let iv = Interval::new(lo, hi)?;
        Ok(Self(vec![iv; dim]))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn interval(&self, k: usize) -> Interval {
        self.0[k]
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.0.len() && self.0.iter().zip(x).all(|(iv, &v)| iv.contains(v))
    }
}

/// An unnormalised log-density on a bounded box.
///
/// `log_density` may return `-inf` to signal a hard constraint violation;
/// samplers treat such points as having zero density.
pub trait TargetDensity {
    fn dim(&self) -> usize;
    fn log_density(&self, x: &[f64]) -> f64;
    fn bounding_box(&self) -> &BoundingBox;
}

impl<T: TargetDensity + ?Sized> TargetDensity for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (**self).log_density(x)
    }
    fn bounding_box(&self) -> &BoundingBox {
        (**self).bounding_box()
    }
}

/// Wraps a closure as a [`TargetDensity`].
pub struct FnTarget<F> {
    bbox: BoundingBox,
    f: F,
}

impl<F: Fn(&[f64]) -> f64> FnTarget<F> {
    pub fn new(bbox: BoundingBox, f: F) -> Self {
        Self { bbox, f }
    }
}

impl<F: Fn(&[f64]) -> f64> TargetDensity for FnTarget<F> {
    fn dim(&self) -> usize {
        self.bbox.dim()
    }
    fn log_density(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }
}

/// Gaussian mixture with a shared diagonal covariance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub means: Vec<Vec<f64>>,
    pub cov_diag: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MixtureSpec {
    /// The four-mode bivariate mixture: means (5,-5), (5,5), (-5,5), (13,13),
    /// variances 0.5, weights (0.2, 0.3, 0.2, 0.3).
    pub fn four_modes() -> Self {
        Self {
            means: vec![vec![5.0, -5.0], vec![5.0, 5.0], vec![-5.0, 5.0], vec![13.0, 13.0]],
            cov_diag: vec![0.5, 0.5],
            weights: vec![0.2, 0.3, 0.2, 0.3],
        }
    }

    pub fn dim(&self) -> usize {
        self.cov_diag.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidMixture(msg.to_string()));
        if self.means.is_empty() || self.means.len() != self.weights.len() {
            return bad("need one weight per component");
        }
        if self.cov_diag.is_empty() || self.cov_diag.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return bad("variances must be positive and finite");
        }
        if self
            .means
            .iter()
            .any(|m| m.len() != self.dim() || m.iter().any(|v| !v.is_finite()))
        {
            return bad("every mean must be a finite vector of the covariance dimension");
        }
        if self.weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
            return bad("weights must lie in [0, 1]");
        }
        if (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return bad("weights must sum to 1");
        }
        Ok(())
    }

    /// `[min mean - 8 sd, max mean + 8 sd]` per dimension.
    pub fn default_box(&self) -> BoundingBox {
        let intervals = (0..self.dim())
            .map(|k| {
                let sd = self.cov_diag[k].sqrt();
                let lo = self.means.iter().map(|m| m[k]).fold(f64::INFINITY, f64::min);
                let hi = self.means.iter().map(|m| m[k]).fold(f64::NEG_INFINITY, f64::max);
                Interval {
                    lo: lo - 8.0 * sd,
                    hi: hi + 8.0 * sd,
                }
            })
            .collect();
        BoundingBox(intervals)
    }
}

/// `ln Σ_i p_i N(x | μ_i, diag(σ²))`.
pub fn mixture_log_density(spec: &MixtureSpec, x: &[f64]) -> f64 {
    let log_norm = -0.5 * spec.dim() as f64 * (2.0 * PI).ln() - 0.5 * spec.cov_diag.iter().map(|v| v.ln()).sum::<f64>();
    log_sum_exp(spec.means.iter().zip(&spec.weights).map(|(mean, &w)| {
        let quad: f64 = mean
            .iter()
            .zip(x)
            .zip(&spec.cov_diag)
            .map(|((m, xi), v)| (xi - m) * (xi - m) / v)
            .sum();
        w.ln() + log_norm - 0.5 * quad
    }))
}

/// A validated mixture bound to a box, ready for sampling.
#[derive(Clone, Debug)]
pub struct GaussianMixture {
    spec: MixtureSpec,
    bbox: BoundingBox,
    log_weights: Vec<f64>,
    inv_var: Vec<f64>,
    log_norm: f64,
}

impl GaussianMixture {
    pub fn new(spec: MixtureSpec, bbox: Option<BoundingBox>) -> Result<Self> {
        spec.validate()?;
        let bbox = bbox.unwrap_or_else(|| spec.default_box());
        if bbox.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: bbox.dim(),
            });
        }
        let log_norm =
            -0.5 * spec.dim() as f64 * (2.0 * PI).ln() - 0.5 * spec.cov_diag.iter().map(|v| v.ln()).sum::<f64>();
        Ok(Self {
            log_weights: spec.weights.iter().map(|w| w.ln()).collect(),
            inv_var: spec.cov_diag.iter().map(|v| 1.0 / v).collect(),
            log_norm,
            spec,
            bbox,
        })
    }

    pub fn spec(&self) -> &MixtureSpec {
        &self.spec
    }
}

impl TargetDensity for GaussianMixture {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let terms = self.spec.means.iter().zip(&self.log_weights).map(|(mean, lw)| {
            let quad: f64 = mean
                .iter()
                .zip(x)
                .zip(&self.inv_var)
                .map(|((m, xi), iv)| (xi - m) * (xi - m) * iv)
                .sum();
            lw + self.log_norm - 0.5 * quad
        });
        log_sum_exp(terms)
    }

    fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }
}

/// The line `origin + z * direction`, `z ∈ z_interval`, clipped to a box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineRestriction {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
    /// Maximal interval of `z` keeping the point inside the box. May be
    /// degenerate (zero width) when the origin sits on the boundary.
    pub z_min: f64,
    pub z_max: f64,
}

impl LineRestriction {
    /// Clips the line through `origin` along `direction` to `bbox`. The
    /// direction is normalised; a zero direction is an error.
    pub fn new(bbox: &BoundingBox, origin: &[f64], direction: &[f64]) -> Result<Self> {
        let dim = bbox.dim();
        for len in [origin.len(), direction.len()] {
            if len != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: len,
                });
            }
        }
        if !bbox.contains(origin) {
            return Err(Error::OutsideBox);
        }
        let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::ZeroDirection);
        }
        let direction: Vec<f64> = direction.iter().map(|d| d / norm).collect();

        let mut z_min = f64::NEG_INFINITY;
        let mut z_max = f64::INFINITY;
        for ((iv, &o), &d) in bbox.intervals().iter().zip(origin).zip(&direction) {
            if d == 0.0 {
                continue;
            }
            let a = (iv.lo - o) / d;
            let b = (iv.hi - o) / d;
            z_min = z_min.max(a.min(b));
            z_max = z_max.min(a.max(b));
        }
        Ok(Self {
            origin: origin.to_vec(),
            direction,
            z_min: z_min.min(0.0),
            z_max: z_max.max(0.0),
        })
    }

    pub fn width(&self) -> f64 {
        self.z_max - self.z_min
    }

    pub fn z_interval(&self) -> Result<Interval> {
        Interval::new(self.z_min, self.z_max)
    }

    pub fn point(&self, z: f64) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.direction)
            .map(|(o, d)| o + z * d)
            .collect()
    }
}

/// A target viewed along one line: `f*(z) = f(origin + z * direction)`.
pub struct RestrictedLine<'a, T: ?Sized> {
    target: &'a T,
    pub line: LineRestriction,
}

impl<'a, T: TargetDensity + ?Sized> RestrictedLine<'a, T> {
    pub fn log_density(&self, z: f64) -> f64 {
        self.target.log_density(&self.line.point(z))
    }
}

pub fn line_restriction<'a, T: TargetDensity + ?Sized>(
    target: &'a T,
    origin: &[f64],
    direction: &[f64],
) -> Result<RestrictedLine<'a, T>> {
    let line = LineRestriction::new(target.bounding_box(), origin, direction)?;
    Ok(RestrictedLine { target, line })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Direct summation of the mixture density in linear space.
    fn mixture_density_naive(spec: &MixtureSpec, x: &[f64]) -> f64 {
        spec.means
            .iter()
            .zip(&spec.weights)
            .map(|(m, w)| {
                (0..x.len()).fold(*w, |acc, k| {
                    let v = spec.cov_diag[k];
                    acc * (-(x[k] - m[k]).powi(2) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
                })
            })
            .sum()
    }

    #[test]
    fn mixture_values_at_modes() {
        let spec = MixtureSpec::four_modes();
        let target = GaussianMixture::new(spec.clone(), None).unwrap();
        let at_mu1 = mixture_log_density(&spec, &[5.0, -5.0]);
        assert_relative_eq!(at_mu1, (0.2 / PI).ln(), epsilon = 1e-6);
        assert_relative_eq!(at_mu1, -2.754167, epsilon = 1e-6);
        assert_relative_eq!(at_mu1, mixture_density_naive(&spec, &[5.0, -5.0]).ln(), epsilon = 1e-12);
        let at_mu2 = mixture_log_density(&spec, &[5.0, 5.0]);
        assert_relative_eq!(at_mu2, -2.348702, epsilon = 1e-6);
        assert_relative_eq!(target.log_density(&[5.0, 5.0]), at_mu2, epsilon = 1e-13);
    }

    #[test]
    fn single_component_mode_value() {
        let spec = MixtureSpec {
            means: vec![vec![1.0, 2.0, 3.0]],
            cov_diag: vec![0.5, 2.0, 3.0],
            weights: vec![1.0],
        };
        let expected = -1.5 * (2.0 * PI).ln() - 0.5 * (0.5f64 * 2.0 * 3.0).ln();
        assert_relative_eq!(mixture_log_density(&spec, &[1.0, 2.0, 3.0]), expected, epsilon = 1e-14);
    }

    #[test]
    fn mixture_validation() {
        let mut spec = MixtureSpec::four_modes();
        spec.weights[0] = 0.25;
        assert!(GaussianMixture::new(spec, None).is_err());
        let mut spec = MixtureSpec::four_modes();
        spec.cov_diag[1] = 0.0;
        assert!(spec.validate().is_err());
        let spec = MixtureSpec::four_modes();
        let bbox = spec.default_box();
        assert_relative_eq!(bbox.interval(0).lo, -5.0 - 8.0 * 0.5f64.sqrt());
        assert_relative_eq!(bbox.interval(1).hi, 13.0 + 8.0 * 0.5f64.sqrt());
    }

    #[test]
    fn line_clipping_examples() {
        let bbox = BoundingBox::cube(2, -30.0, 30.0).unwrap();
        let l = LineRestriction::new(&bbox, &[0.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!((l.z_min, l.z_max), (-30.0, 30.0));

        let s = 0.5f64.sqrt();
        let l = LineRestriction::new(&bbox, &[15.0, 0.0], &[s, s]).unwrap();
        assert_relative_eq!(l.z_min, -30.0 / s, epsilon = 1e-9);
        assert_relative_eq!(l.z_max, 15.0 / s, epsilon = 1e-9);
        assert_relative_eq!(l.z_min, -42.4264, epsilon = 1e-4);
        assert_relative_eq!(l.z_max, 21.2132, epsilon = 1e-4);

        assert_eq!(
            LineRestriction::new(&bbox, &[0.0, 0.0], &[0.0, 0.0]),
            Err(Error::ZeroDirection)
        );
        assert_eq!(
            LineRestriction::new(&bbox, &[40.0, 0.0], &[1.0, 0.0]),
            Err(Error::OutsideBox)
        );
    }

    #[test]
    fn mixture_restriction_is_bimodal() {
        let target = GaussianMixture::new(
            MixtureSpec::four_modes(),
            Some(BoundingBox::cube(2, -30.0, 30.0).unwrap()),
        )
        .unwrap();
        let r = line_restriction(&target, &[0.0, 5.0], &[1.0, 0.0]).unwrap();
        let grid: Vec<f64> = (0..=6000).map(|i| -30.0 + i as f64 * 0.01).collect();
        let vals: Vec<f64> = grid.iter().map(|&z| r.log_density(z)).collect();
        let maxima: Vec<f64> = (1..grid.len() - 1)
            .filter(|&i| vals[i] > vals[i - 1] && vals[i] > vals[i + 1])
            .map(|i| grid[i])
            .collect();
        assert_eq!(maxima.len(), 2, "{maxima:?}");
        assert!((maxima[0] + 5.0).abs() < 0.02 && (maxima[1] - 5.0).abs() < 0.02);
    }

    proptest! {
        #[test]
        fn line_endpoints_touch_the_box(
            ox in -29.0f64..29.0, oy in -29.0f64..29.0, oz in -5.0f64..5.0,
            dx in -1.0f64..1.0, dy in -1.0f64..1.0, dz in -1.0f64..1.0,
        ) {
            prop_assume!(dx * dx + dy * dy + dz * dz > 1e-6);
            let bbox = BoundingBox(vec![
                Interval::new(-30.0, 30.0).unwrap(),
                Interval::new(-30.0, 30.0).unwrap(),
                Interval::new(-5.5, 7.0).unwrap(),
            ]);
            let l = LineRestriction::new(&bbox, &[ox, oy, oz], &[dx, dy, dz]).unwrap();
            let norm: f64 = l.direction.iter().map(|d| d * d).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            prop_assert!(l.z_min <= 0.0 && l.z_max >= 0.0);
            for z in [l.z_min, l.z_max] {
                let p = l.point(z);
                let on_bound = bbox.intervals().iter().zip(&p)
                    .any(|(iv, &v)| (v - iv.lo).abs() < 1e-9 || (v - iv.hi).abs() < 1e-9);
                let inside = bbox.intervals().iter().zip(&p)
                    .all(|(iv, &v)| v >= iv.lo - 1e-9 && v <= iv.hi + 1e-9);
                prop_assert!(on_bound && inside);
            }
        }

        #[test]
        fn restricted_rule_is_direct_evaluation(z in -1.0f64..1.0, angle in 0.0f64..std::f64::consts::TAU) {
            let target = GaussianMixture::new(MixtureSpec::four_modes(), None).unwrap();
            let r = line_restriction(&target, &[1.0, 2.0], &[angle.cos(), angle.sin()]).unwrap();
            let z = if z < 0.0 { -z * r.line.z_min } else { z * r.line.z_max };
            let p: Vec<f64> = (0..2).map(|i| r.line.origin[i] + z * r.line.direction[i]).collect();
            prop_assert_eq!(r.log_density(z).to_bits(), target.log_density(&p).to_bits());
        }

        #[test]
        fn mixture_is_permutation_invariant(x in -10.0f64..15.0, y in -10.0f64..15.0, rot in 0usize..4) {
            let spec = MixtureSpec::four_modes();
            let mut permuted = spec.clone();
            permuted.means.rotate_left(rot);
            permuted.weights.rotate_left(rot);
            let a = mixture_log_density(&spec, &[x, y]);
            let b = mixture_log_density(&permuted, &[x, y]);
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
