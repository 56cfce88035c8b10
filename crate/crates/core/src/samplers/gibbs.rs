use super::arms::arms_step_1d;
use super::{ChainState, HullSettings, StepRecord};
use crate::error::Result;
use crate::targets::TargetDensity;

/// One Gibbs sweep with ARMS for every full conditional, in ascending
/// coordinate order.
///
/// Each conditional `f(x_k | x_-k)` gets a fresh hull over the `k`-th box
/// interval. The returned record carries the per-coordinate proposals;
/// `accepted` is true when at least one coordinate moved.
pub fn gibbs_arms_step<T>(state: &mut ChainState, target: &T, settings: &HullSettings) -> Result<StepRecord>
where
    T: TargetDensity + ?Sized,
{
    let dim = target.dim();
    let mut proposal = Vec::with_capacity(dim);
    let mut any_accepted = false;
    let mut rebuilds = 0;
    for k in 0..dim {
        let base = state.x.clone();
        let logf = |v: f64| {
            let mut p = base.clone();
            p[k] = v;
            target.log_density(&p)
        };
        let support = target.bounding_box().interval(k);
        let mut abscissae = settings.abscissae(support, logf)?;
        let step = arms_step_1d(logf, state.x[k], state.log_density, &mut abscissae, &mut state.rng)?;
        if step.accepted {
            state.x[k] = step.z;
            state.log_density = step.log_density;
        }
        any_accepted |= step.accepted;
        rebuilds += step.hull_rebuilds;
        proposal.push(step.proposal);
    }
    state.iteration += 1;
    Ok(StepRecord {
        proposal,
        accepted: any_accepted,
        hull_rebuilds: rebuilds,
        direction: None,
    })
}
