use hararms::spline::{design_matrix, knot_log_likelihood, least_squares, ols_fit, Dataset, SplineSpec};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Case {
    data: Dataset,
    degree: u32,
    knots: Vec<f64>,
    /// Knot indices still free for a nested extra knot.
    spare: Vec<usize>,
}

/// Random sorted x on [0, 10], a noisy response, and `k` distinct knots
/// each with at least `degree + 1` observations on either side.
fn case(n: usize, degree: u32, k: usize, seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..10.0)).collect();
    x.sort_by(f64::total_cmp);
    x.dedup();
    let y: Vec<f64> = x
        .iter()
        .map(|&v| (v * 0.7).sin() * 3.0 + rng.random_range(-1.0..1.0))
        .collect();
    let d = degree as usize + 1;
    let mut slots: Vec<usize> = (d..x.len() - d).collect();
    for i in (1..slots.len()).rev() {
        slots.swap(i, rng.random_range(0..=i));
    }
    let knots = slots[..k].iter().map(|&i| 0.5 * (x[i - 1] + x[i])).collect();
    let spare = slots[k..].to_vec();
    Case {
        data: Dataset::new(x, y).unwrap(),
        degree,
        knots,
        spare,
    }
}

fn oracle_matrix(spec: &SplineSpec, x: &[f64]) -> DMatrix<f64> {
    let dm = design_matrix(spec, x);
    DMatrix::from_column_slice(dm.rows(), dm.cols(), dm.as_column_major())
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn design_is_full_rank_and_fit_matches_oracle(
        n in 30usize..150, degree in 1u32..=3, k in 1usize..=4, seed in any::<u64>(),
    ) {
        let c = case(n, degree, k, seed);
        let spec = SplineSpec::new(c.degree, sorted(&c.knots)).unwrap();
        // Rescaling x leaves the column space unchanged and keeps the SVD well conditioned.
        let scaled: Vec<f64> = c.data.x().iter().map(|v| v / 10.0).collect();
        let scaled_spec = SplineSpec::new(c.degree, spec.knots.iter().map(|k| k / 10.0).collect()).unwrap();
        let xm = oracle_matrix(&scaled_spec, &scaled);
        let svd = xm.clone().svd(true, true);
        prop_assert_eq!(svd.rank(1e-12 * svd.singular_values.max()), spec.n_columns());

        let fit = least_squares(&design_matrix(&spec, c.data.x()), c.data.y()).unwrap();
        let y = DVector::from_column_slice(c.data.y());
        let oracle = svd.solve(&y, 1e-14).unwrap();
        let oracle_rss = (&y - &xm * oracle).norm_squared();
        prop_assert!((fit.rss - oracle_rss).abs() <= 1e-9 * oracle_rss.max(1e-300), "{} vs {}", fit.rss, oracle_rss);
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design(
        n in 30usize..150, degree in 1u32..=3, k in 1usize..=4, seed in any::<u64>(),
    ) {
        let c = case(n, degree, k, seed);
        let spec = SplineSpec::new(c.degree, sorted(&c.knots)).unwrap();
        let dm = design_matrix(&spec, c.data.x());
        let fit = least_squares(&dm, c.data.y()).unwrap();
        let xtr = dm.transpose_multiply(&fit.residuals);
        let r_norm = fit.residuals.iter().map(|r| r * r).sum::<f64>().sqrt();
        let worst = xtr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        prop_assert!(worst / (dm.frobenius_norm() * r_norm) < 1e-8, "{}", worst / (dm.frobenius_norm() * r_norm));
    }

    #[test]
    fn log_likelihood_ignores_knot_order(
        n in 30usize..150, degree in 1u32..=3, k in 2usize..=5, seed in any::<u64>(), shift in 0usize..5,
    ) {
        let c = case(n, degree, k, seed);
        let mut permuted = c.knots.clone();
        permuted.reverse();
        permuted.rotate_left(shift % k);
        let a = knot_log_likelihood(&c.knots, &c.data, c.degree);
        let b = knot_log_likelihood(&permuted, &c.data, c.degree);
        prop_assert!(a.is_finite());
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn nested_knot_sets_never_fit_worse(
        n in 30usize..150, degree in 1u32..=3, k in 1usize..=4, seed in any::<u64>(), pick in any::<prop::sample::Index>(),
    ) {
        let c = case(n, degree, k, seed);
        let x = c.data.x();
        let extra = *pick.get(&c.spare);
        let extra = 0.5 * (x[extra - 1] + x[extra]);
        let small = ols_fit(&SplineSpec::new(c.degree, sorted(&c.knots)).unwrap(), &c.data).unwrap();
        let mut bigger = c.knots.clone();
        bigger.push(extra);
        let big = ols_fit(&SplineSpec::new(c.degree, sorted(&bigger)).unwrap(), &c.data).unwrap();
        prop_assert!(big.rss <= small.rss * (1.0 + 1e-10) + 1e-12);
        // With σ² estimated as RSS/(n - c), one extra column can cost at most
        // n/2·ln((n-c-1)/(n-c)) + 1/2 even when RSS does not move.
        let (nn, cc) = (c.data.len() as f64, small.dof_denominator as f64);
        let bound = 0.5 * nn * ((cc - 1.0) / cc).ln() + 0.5;
        prop_assert!(big.log_likelihood - small.log_likelihood >= bound - 1e-9,
            "{} < {}", big.log_likelihood - small.log_likelihood, bound);
    }
}

#[test]
fn fixed_variance_denominator_can_lower_the_likelihood() {
    // An extra knot that leaves RSS unchanged still shrinks n - c, so the
    // profile likelihood drops by roughly c / (2 (n - c)).
    let x: Vec<f64> = (0..40).map(f64::from).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&v| 2.0 + 0.5 * v + if (v as i64) % 2 == 0 { 0.3 } else { -0.3 })
        .collect();
    let data = Dataset::new(x, y).unwrap();
    let a = ols_fit(&SplineSpec::new(1, vec![10.5]).unwrap(), &data).unwrap();
    let b = ols_fit(&SplineSpec::new(1, vec![10.5, 29.5]).unwrap(), &data).unwrap();
    assert!(b.rss <= a.rss);
    let n = 40.0;
    let bound = 0.5 * n * ((a.dof_denominator as f64 - 1.0) / a.dof_denominator as f64).ln() + 0.5;
    assert!(b.log_likelihood - a.log_likelihood >= bound - 1e-9);
    assert!(
        b.log_likelihood < a.log_likelihood - 1e-6,
        "{} {}",
        a.log_likelihood,
        b.log_likelihood
    );
}
