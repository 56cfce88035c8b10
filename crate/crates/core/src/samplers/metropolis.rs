use rand::Rng;
use rand_distr::StandardNormal;

use super::{ChainState, StepRecord};
use crate::targets::TargetDensity;

/// A proposal kernel `q(to | from)`.
pub trait Proposal {
    fn propose<R: Rng + ?Sized>(&self, from: &[f64], rng: &mut R) -> Vec<f64>;
    /// `ln q(to | from)`, up to a constant shared by both directions.
    fn log_density(&self, to: &[f64], from: &[f64]) -> f64;
}

/// Isotropic Gaussian random walk with standard deviation `scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianRandomWalk {
    pub scale: f64,
}

impl Proposal for GaussianRandomWalk {
    fn propose<R: Rng + ?Sized>(&self, from: &[f64], rng: &mut R) -> Vec<f64> {
        from.iter()
            .map(|x| {
                let e: f64 = rng.sample(StandardNormal);
                x + self.scale * e
            })
            .collect()
    }

    fn log_density(&self, to: &[f64], from: &[f64]) -> f64 {
        let ss: f64 = to.iter().zip(from).map(|(a, b)| (a - b) * (a - b)).sum();
        -0.5 * ss / (self.scale * self.scale)
    }
}

/// One Metropolis-Hastings update. Proposals outside the target's bounding
/// box, or with `-inf` log-density, are rejected.
pub fn mh_step<T, Q>(state: &mut ChainState, proposal: &Q, target: &T) -> StepRecord
where
    T: TargetDensity + ?Sized,
    Q: Proposal,
{
    let x_new = proposal.propose(&state.x, &mut state.rng);
    let lf_new = if target.bounding_box().contains(&x_new) {
        target.log_density(&x_new)
    } else {
        f64::NEG_INFINITY
    };
    let u: f64 = state.rng.random();
    let accepted = lf_new.is_finite() && {
        let log_ratio = lf_new + proposal.log_density(&state.x, &x_new)
            - state.log_density
            - proposal.log_density(&x_new, &state.x);
        log_ratio >= 0.0 || u.ln() < log_ratio
    };
    if accepted {
        state.x.clone_from(&x_new);
        state.log_density = lf_new;
    }
    state.iteration += 1;
    StepRecord {
        proposal: x_new,
        accepted,
        hull_rebuilds: 0,
        direction: None,
    }
}
