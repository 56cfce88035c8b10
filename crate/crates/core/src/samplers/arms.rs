use rand::Rng;

use super::ars::MAX_IDLE_REJECTIONS;
use crate::error::{Error, Result};
use crate::hull::{Abscissae, InsertOutcome, PiecewiseHull};

/// Draws where the density is zero enter the hull at this many log units
/// below the lowest initial abscissa value.
pub const INFEASIBLE_DROP: f64 = 50.0;

/// Result of one univariate ARMS update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArmsStep {
    /// The new state: the proposal if accepted, the old state otherwise.
    pub z: f64,
    pub log_density: f64,
    /// The point that survived the rejection stage.
    pub proposal: f64,
    pub accepted: bool,
    /// Hull constructions during this step, counting the initial one.
    pub hull_rebuilds: usize,
}

/// Log of the Metropolis-Hastings acceptance ratio applied after the
/// rejection stage:
///
/// `f(z_A) min[f(z_cur), e^{h(z_cur)}] / (f(z_cur) min[f(z_A), e^{h(z_A)}])`.
pub fn arms_log_acceptance(lf_prop: f64, h_prop: f64, lf_cur: f64, h_cur: f64) -> f64 {
    (lf_prop + lf_cur.min(h_cur) - lf_cur - lf_prop.min(h_prop)).min(0.0)
}

/// One adaptive rejection Metropolis update of a univariate density.
///
/// Draws from the ARMS pseudo-envelope until a point survives the rejection
/// test `U <= f(z_A) / exp h(z_A)` (rejected points are merged into
/// `abscissae` and the hull rebuilt), then applies the Metropolis-Hastings
/// correction against the current state `z_cur`, whose log-density is
/// `lf_cur`.
///
/// A rejected draw with zero density is merged with a surrogate log-value
/// [`INFEASIBLE_DROP`] below the lowest initial abscissa value, so the hull
/// stops proposing there. Any hull update that depends only on rejected draws
/// keeps the correction exact.
///
/// The abscissae must not depend on `z_cur`; otherwise the proposal is no
/// longer an independence proposal and the correction is wrong.
pub fn arms_step_1d<F, R>(logf: F, z_cur: f64, lf_cur: f64, abscissae: &mut Abscissae, rng: &mut R) -> Result<ArmsStep>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    if !lf_cur.is_finite() {
        return Err(Error::InfeasibleStart);
    }
    let floor = abscissae.log_values().iter().copied().fold(f64::INFINITY, f64::min) - INFEASIBLE_DROP;
    let mut hull = PiecewiseHull::arms(abscissae)?;
    let mut rebuilds = 1;
    let mut idle = 0;
    let (z_prop, lf_prop) = loop {
        let z = hull.sample(rng);
        let u: f64 = rng.random();
        let lf = logf(z);
        if lf.is_finite() && u.ln() <= lf - hull.value_at(z) {
            break (z, lf);
        }
        let value = if lf.is_finite() { lf } else { floor };
        let grew = abscissae.insert(z, value)? == InsertOutcome::Inserted;
        if grew {
            hull = PiecewiseHull::arms(abscissae)?;
            rebuilds += 1;
            idle = 0;
        } else {
            idle += 1;
            if idle >= MAX_IDLE_REJECTIONS {
                return Err(Error::HullSaturated {
                    cap: abscissae.cap(),
                    rejections: idle,
                });
            }
        }
    };

    let log_alpha = arms_log_acceptance(lf_prop, hull.value_at(z_prop), lf_cur, hull.value_at(z_cur));
    let u: f64 = rng.random();
    let accepted = u.ln() < log_alpha || log_alpha >= 0.0;
    let (z, log_density) = if accepted { (z_prop, lf_prop) } else { (z_cur, lf_cur) };
    Ok(ArmsStep {
        z,
        log_density,
        proposal: z_prop,
        accepted,
        hull_rebuilds: rebuilds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::DEFAULT_ABSCISSAE_CAP;
    use crate::interval::Interval;
    use crate::math::log_sum_exp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn log_concave_target_accepts_every_survivor() {
        let logf = |z: f64| -0.5 * z * z;
        let support = Interval::new(-6.0, 6.0).unwrap();
        let init = Abscissae::initial(support, 5, DEFAULT_ABSCISSAE_CAP, logf).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut z = 0.3;
        let mut lf = logf(z);
        for _ in 0..2000 {
            let mut a = init.clone();
            let step = arms_step_1d(logf, z, lf, &mut a, &mut rng).unwrap();
            assert!(step.accepted);
            assert!(step.hull_rebuilds >= 1);
            z = step.z;
            lf = step.log_density;
        }
    }

    #[test]
    fn acceptance_ratio_single_step() {
        // Current point under-covered (f > e^h), proposal over-covered
        // (f < e^h): ratio = f(zA) e^{h(zcur)} / (f(zcur) f(zA)) = e^{h - f}.
        let log_alpha = arms_log_acceptance(-1.0, 0.5, 2.0, 1.0);
        assert!((log_alpha - (1.0 - 2.0)).abs() < 1e-15);
        // Current point over-covered: ratio reduces to f(zA)/min(f(zA), e^h(zA)) >= 1.
        assert_eq!(arms_log_acceptance(-1.0, 0.5, 0.5, 1.0), 0.0);
        // Proposal under-covered, current over-covered: ratio f(zA)/e^{h(zA)} > 1.
        assert_eq!(arms_log_acceptance(1.0, 0.5, 0.5, 1.0), 0.0);
        // Both under-covered: ratio = e^{h(zcur)} f(zA) / (f(zcur) e^{h(zA)}).
        let la = arms_log_acceptance(1.0, 0.5, 2.0, 1.2);
        assert!((la - (1.0 + 1.2 - 2.0 - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn empirical_acceptance_matches_ratio() {
        // Convex log-density on [-3, 3] with abscissae fixed at ±1, ±2.
        let logf = |z: f64| 0.5 * z * z;
        let support = Interval::new(-3.0, 3.0).unwrap();
        let pts = vec![-2.0, -1.0, 1.0, 2.0];
        let init = Abscissae::new(support, pts.clone(), pts.iter().map(|&z| logf(z)).collect())
            .unwrap()
            .with_cap(4);
        let hull = PiecewiseHull::arms(&init).unwrap();
        assert!(logf(0.0) < hull.value_at(0.0) + 1e-12);
        // Beyond the last abscissa the boundary secant falls below x²/2.
        let z_cur = 2.5;
        let h_cur = hull.value_at(z_cur);
        assert!(logf(z_cur) > h_cur);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut accepted = 0;
        let mut expected = 0.0;
        let n = 40_000;
        for _ in 0..n {
            let mut a = init.clone();
            let step = arms_step_1d(logf, z_cur, logf(z_cur), &mut a, &mut rng).unwrap();
            accepted += step.accepted as usize;
            expected +=
                arms_log_acceptance(logf(step.proposal), hull.value_at(step.proposal), logf(z_cur), h_cur).exp();
        }
        let rate = accepted as f64 / n as f64;
        assert!(rate < 1.0);
        assert!(
            (rate - expected / n as f64).abs() < 0.01,
            "{rate} vs {}",
            expected / n as f64
        );
    }

    /// Long-run occupancy of a piecewise-constant, non-log-concave density
    /// with five levels matches the normalised bin masses.
    #[test]
    fn detailed_balance_on_step_density() {
        let levels = [0.5f64, 2.0, 0.2, 3.0, 1.0];
        let logf = |z: f64| levels[(z.floor() as usize).min(4)].ln();
        let support = Interval::new(0.0, 5.0).unwrap();
        let init = Abscissae::initial(support, 5, DEFAULT_ABSCISSAE_CAP, logf).unwrap();
        let total: f64 = levels.iter().sum();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut counts = [0usize; 5];
        let (mut z, mut lf) = (2.5, logf(2.5));
        let n = 1_000_000;
        for _ in 0..n {
            let mut a = init.clone();
            let step = arms_step_1d(logf, z, lf, &mut a, &mut rng).unwrap();
            z = step.z;
            lf = step.log_density;
            counts[(z.floor() as usize).min(4)] += 1;
        }
        for (c, l) in counts.iter().zip(levels) {
            let p = *c as f64 / n as f64;
            assert!((p - l / total).abs() < 0.01, "{p} vs {}", l / total);
        }
        // Sanity check on the oracle: masses are the levels over unit bins.
        assert!((log_sum_exp(levels.iter().map(|l| l.ln())) - total.ln()).abs() < 1e-12);
    }

    #[test]
    fn infeasible_current_point_is_rejected() {
        let support = Interval::new(0.0, 1.0).unwrap();
        let mut a = Abscissae::initial(support, 5, 100, |z| -z).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = arms_step_1d(|z| -z, 0.5, f64::NEG_INFINITY, &mut a, &mut rng).unwrap_err();
        assert_eq!(err, Error::InfeasibleStart);
    }

    #[test]
    fn zero_density_edge_does_not_stall_the_hull() {
        // The edge secant climbs into a region where f vanishes; without
        // surrogate insertions every draw lands there and the step stalls.
        let logf = |z: f64| if z < -9.0 { f64::NEG_INFINITY } else { -3.0 * z };
        let support = Interval::new(-10.0, 10.0).unwrap();
        let init = Abscissae::initial(support, 5, DEFAULT_ABSCISSAE_CAP, logf).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (mut z, mut lf) = (0.0, 0.0);
        let mut sum = 0.0;
        let n = 20_000;
        for _ in 0..n {
            let mut a = init.clone();
            let step = arms_step_1d(logf, z, lf, &mut a, &mut rng).unwrap();
            z = step.z;
            lf = step.log_density;
            assert!(z >= -9.0);
            sum += z;
        }
        // Exp(3) shifted to start at -9 (the upper truncation is negligible).
        let mean = sum / n as f64;
        assert!((mean - (-9.0 + 1.0 / 3.0)).abs() < 0.02, "mean {mean}");
    }
}
