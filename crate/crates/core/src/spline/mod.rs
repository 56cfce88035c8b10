//! Regression splines in the truncated power basis and the profile
//! log-likelihood of their knot locations.

mod dataset;
mod ols;

use serde::{Deserialize, Serialize};

pub use self::dataset::{Dataset, GeneratingSpec, GAP_FRACTION};
pub use self::ols::{least_squares, ols_fit, LeastSquares, SplineFit, RANK_TOL, VARIANCE_FLOOR};

use crate::error::{Error, Result};
use crate::targets::{BoundingBox, TargetDensity};

/// `(x - knot)^degree` for `x > knot`, else zero.
pub fn truncated_power(x: f64, knot: f64, degree: u32) -> f64 {
    debug_assert!(degree >= 1);
    if x > knot {
        (x - knot).powi(degree as i32)
    } else {
        0.0
    }
}

/// Polynomial degree and knot locations of a spline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplineSpec {
    pub degree: u32,
    pub knots: Vec<f64>,
}

impl SplineSpec {
    pub fn new(degree: u32, knots: Vec<f64>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidConfig("spline degree must be at least 1".into()));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite("knot"));
        }
        Ok(Self { degree, knots })
    }

    /// `degree + 1 + K`.
    pub fn n_columns(&self) -> usize {
        self.degree as usize + 1 + self.knots.len()
    }

    /// Basis row at `x`: `1, x, …, x^degree, (x - κ₁)₊^degree, …`.
    pub fn basis_row(&self, x: f64, out: &mut [f64]) {
        let mut p = 1.0;
        for slot in out.iter_mut().take(self.degree as usize + 1) {
            *slot = p;
            p *= x;
        }
        for (slot, &k) in out[self.degree as usize + 1..].iter_mut().zip(&self.knots) {
            *slot = truncated_power(x, k, self.degree);
        }
    }

    /// Spline value at `x` for the given coefficients.
    pub fn evaluate(&self, coefficients: &[f64], x: f64) -> f64 {
        let mut row = vec![0.0; self.n_columns()];
        self.basis_row(x, &mut row);
        row.iter().zip(coefficients).map(|(b, c)| b * c).sum()
    }
}

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn from_columns(rows: usize, columns: Vec<Vec<f64>>) -> Self {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            assert_eq!(c.len(), rows, "ragged column");
            data.extend(c);
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    pub fn multiply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for (j, &vj) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.column(j)) {
                *o += a * vj;
            }
        }
        out
    }

    /// `Xᵀ v`.
    pub fn transpose_multiply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.cols)
            .map(|j| self.column(j).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Design matrix with columns `1, x, …, x^degree` followed by one truncated
/// power column per knot, in the given knot order.
pub fn design_matrix(spec: &SplineSpec, x: &[f64]) -> DesignMatrix {
    let n = x.len();
    let c = spec.n_columns();
    let p = spec.degree as usize + 1;
    let mut data = vec![0.0; n * c];
    for (i, &xi) in x.iter().enumerate() {
        let mut pow = 1.0;
        for j in 0..p {
            data[j * n + i] = pow;
            pow *= xi;
        }
    }
    for (k, &knot) in spec.knots.iter().enumerate() {
        let col = &mut data[(p + k) * n..(p + k + 1) * n];
        for (slot, &xi) in col.iter_mut().zip(x) {
            *slot = truncated_power(xi, knot, spec.degree);
        }
    }
    DesignMatrix { rows: n, cols: c, data }
}

/// Profile log-likelihood of the knot vector, or `-inf` when the knots are
/// inadmissible or the design is rank deficient. Knot order is irrelevant.
pub fn knot_log_likelihood(knots: &[f64], data: &Dataset, degree: u32) -> f64 {
    if knots.iter().any(|k| !k.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let mut sorted = knots.to_vec();
    sorted.sort_by(f64::total_cmp);
    if !data.knots_admissible(&sorted) {
        return f64::NEG_INFINITY;
    }
    let spec = SplineSpec { degree, knots: sorted };
    match ols_fit(&spec, data) {
        Ok(fit) => fit.log_likelihood,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// The knot log-likelihood as a sampling target over `[lo + δ, hi - δ]^K`.
#[derive(Clone, Debug)]
pub struct KnotLikelihood<'a> {
    data: &'a Dataset,
    degree: u32,
    bbox: BoundingBox,
}

impl<'a> KnotLikelihood<'a> {
    pub fn new(data: &'a Dataset, degree: u32, n_knots: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidConfig("spline degree must be at least 1".into()));
        }
        if n_knots == 0 {
            return Err(Error::InvalidConfig("need at least one knot".into()));
        }
        Ok(Self {
            data,
            degree,
            bbox: data.knot_box(n_knots),
        })
    }

    pub fn data(&self) -> &Dataset {
        self.data
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }
}

impl TargetDensity for KnotLikelihood<'_> {
    fn dim(&self) -> usize {
        self.bbox.dim()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        knot_log_likelihood(x, self.data, self.degree)
    }

    fn bounding_box(&self) -> &BoundingBox {
        &self.bbox
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn toy() -> Dataset {
        Dataset::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![1.0, 2.5, 2.0, 4.5, 3.0]).unwrap()
    }

    #[test]
    fn truncated_power_examples() {
        assert_eq!(truncated_power(1.0, 1.0, 1), 0.0);
        assert_eq!(truncated_power(3.0, 1.0, 1), 2.0);
        assert_eq!(truncated_power(3.0, 1.0, 2), 4.0);
        assert_eq!(truncated_power(0.0, 1.0, 2), 0.0);
    }

    #[test]
    fn design_matrix_examples() {
        let spec = SplineSpec::new(1, vec![]).unwrap();
        let m = design_matrix(&spec, &[1.0, 2.0, 3.0]);
        assert_eq!(m.cols(), 2);
        assert_eq!(m.column(0), &[1.0, 1.0, 1.0]);
        assert_eq!(m.column(1), &[1.0, 2.0, 3.0]);

        let spec = SplineSpec::new(1, vec![0.5]).unwrap();
        let m = design_matrix(&spec, &[0.25, 0.75]);
        assert_eq!([m.get(0, 0), m.get(0, 1), m.get(0, 2)], [1.0, 0.25, 0.0]);
        assert_eq!([m.get(1, 0), m.get(1, 1), m.get(1, 2)], [1.0, 0.75, 0.25]);

        let spec = SplineSpec::new(2, vec![0.2, 0.4, 0.5, 0.7, 0.9]).unwrap();
        assert_eq!(design_matrix(&spec, &[0.1, 0.3]).cols(), 8);

        // Rows agree with the scalar basis.
        let x = [0.1, 0.45, 0.95];
        let m = design_matrix(&spec, &x);
        let mut row = vec![0.0; 8];
        for (i, &xi) in x.iter().enumerate() {
            spec.basis_row(xi, &mut row);
            for (j, v) in row.iter().enumerate() {
                assert_eq!(m.get(i, j), *v);
            }
        }
    }

    #[test]
    fn exact_line_is_interpolated() {
        let x: Vec<f64> = (1..=50).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 - 0.75 * v).collect();
        let data = Dataset::new(x, y).unwrap();
        let fit = ols_fit(&SplineSpec::new(1, vec![]).unwrap(), &data).unwrap();
        assert!((fit.coefficients[0] - 2.5).abs() < 1e-8);
        assert!((fit.coefficients[1] + 0.75).abs() < 1e-8);
        assert!(fit.rss <= 1e-12);
        assert!(fit.sigma2_hat > 0.0 && fit.log_likelihood.is_finite());
    }

    #[test]
    fn toy_fit_matches_normal_equations() {
        let data = toy();
        let spec = SplineSpec::new(1, vec![2.5]).unwrap();
        let fit = ols_fit(&spec, &data).unwrap();

        let m = design_matrix(&spec, data.x());
        let x = nalgebra::DMatrix::from_column_slice(m.rows(), m.cols(), m.as_column_major());
        let y = nalgebra::DVector::from_column_slice(data.y());
        let xtx = x.transpose() * &x;
        let oracle = xtx.lu().solve(&(x.transpose() * y)).unwrap();
        for (a, b) in fit.coefficients.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert_eq!(fit.dof_denominator, 2);
        let s2 = fit.rss / 2.0;
        let ll = -2.5 * (2.0 * std::f64::consts::PI * s2).ln() - fit.rss / (2.0 * s2);
        assert_relative_eq!(fit.log_likelihood, ll, max_relative = 1e-12);
    }

    #[test]
    fn knot_beyond_data_is_rank_deficient() {
        let data = toy();
        let spec = SplineSpec::new(1, vec![7.0]).unwrap();
        assert_eq!(ols_fit(&spec, &data), Err(Error::RankDeficient));
        let data = Dataset::new(
            (0..20).map(f64::from).collect(),
            (0..20).map(|i| (i % 3) as f64).collect(),
        )
        .unwrap();
        let spec = SplineSpec::new(1, vec![25.0]).unwrap();
        assert_eq!(ols_fit(&spec, &data), Err(Error::RankDeficient));
        // Duplicate knots give identical columns.
        let spec = SplineSpec::new(1, vec![5.0, 5.0]).unwrap();
        assert_eq!(ols_fit(&spec, &data), Err(Error::RankDeficient));
    }

    #[test]
    fn too_few_observations() {
        let data = toy();
        let spec = SplineSpec::new(2, vec![2.5]).unwrap();
        assert!(matches!(ols_fit(&spec, &data), Err(Error::TooFewObservations { .. })));
    }

    #[test]
    fn knot_likelihood_constraints() {
        let x: Vec<f64> = (0..200).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 0.7).sin()).collect();
        let data = Dataset::new(x, y).unwrap();
        let ll = knot_log_likelihood(&[5.0, 12.0], &data, 1);
        assert!(ll.is_finite());
        assert_eq!(knot_log_likelihood(&[12.0, 5.0], &data, 1).to_bits(), ll.to_bits());
        let tol = data.gap_tol();
        assert_eq!(
            knot_log_likelihood(&[5.0, 5.0 + 0.5 * tol], &data, 1),
            f64::NEG_INFINITY
        );
        assert_eq!(knot_log_likelihood(&[0.0, 5.0], &data, 1), f64::NEG_INFINITY);
        assert_eq!(knot_log_likelihood(&[5.0, 19.9], &data, 1), f64::NEG_INFINITY);
        assert_eq!(knot_log_likelihood(&[f64::NAN, 5.0], &data, 1), f64::NEG_INFINITY);
    }

    #[test]
    fn constant_response_surface_is_flat() {
        let x: Vec<f64> = (1..=300).map(f64::from).collect();
        let data = Dataset::new(x, vec![4.2; 300]).unwrap();
        let values: Vec<f64> = (1..30)
            .map(|i| knot_log_likelihood(&[10.0 * i as f64], &data, 1))
            .collect();
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(lo.is_finite());
        assert!(hi - lo < 1e-9, "spread {}", hi - lo);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(Dataset::new(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Dataset::new(vec![2.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(Dataset::new(vec![1.0, f64::INFINITY], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.csv");
        let spec = SplineSpec::new(1, vec![2.5]).unwrap();
        let data = toy().with_generating(GeneratingSpec {
            spec,
            polynomial: vec![0.0, 1.0],
            knot_coefficients: vec![-1.0],
            noise_sd: 0.1,
            seed: 3,
        });
        data.save(&path).unwrap();
        let back = Dataset::load(&path).unwrap();
        assert_eq!(back, data);
        assert!(Dataset::sidecar_path(&path).exists());
    }

    #[test]
    fn knot_target_box() {
        let data = toy();
        let t = KnotLikelihood::new(&data, 1, 2).unwrap();
        assert_eq!(t.dim(), 2);
        let iv = t.bounding_box().interval(1);
        assert!((iv.lo - (1.0 + 4e-6)).abs() < 1e-15);
        assert!((iv.hi - (5.0 - 4e-6)).abs() < 1e-15);
        assert!(KnotLikelihood::new(&data, 1, 0).is_err());
    }
}
