use rand::Rng;
use rand_distr::StandardNormal;

use super::arms::arms_step_1d;
use super::{ChainState, HullSettings, StepRecord};
use crate::error::{Error, Result};
use crate::targets::{LineRestriction, TargetDensity};

/// Lines shorter than this are treated as degenerate and a new direction is drawn.
pub const MIN_LINE_WIDTH: f64 = 1e-9;
/// Directions tried before a hit-and-run step gives up.
pub const MAX_DIRECTION_ATTEMPTS: usize = 100;

/// A direction drawn uniformly from the unit sphere in `dim` dimensions.
pub fn random_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    assert!(dim >= 1, "direction needs at least one dimension");
    loop {
        let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            return u.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// One hit-and-run ARMS update.
///
/// Draws a random direction `d`, restricts the target to the line
/// `x + z d` inside the bounding box, and runs one univariate ARMS step on
/// `f*(z)` starting from `z = 0`. The hull is built fresh from evenly spread
/// points of the line's `z` interval.
pub fn hararms_step<T>(state: &mut ChainState, target: &T, settings: &HullSettings) -> Result<StepRecord>
where
    T: TargetDensity + ?Sized,
{
    for _ in 0..MAX_DIRECTION_ATTEMPTS {
        let d = random_direction(target.dim(), &mut state.rng);
        let line = LineRestriction::new(target.bounding_box(), &state.x, &d)?;
        if line.width() < MIN_LINE_WIDTH {
            continue;
        }
        let logf = |z: f64| target.log_density(&line.point(z));
        let mut abscissae = settings.abscissae(line.z_interval()?, logf)?;
        let step = arms_step_1d(logf, 0.0, state.log_density, &mut abscissae, &mut state.rng)?;
        if step.accepted {
            state.x = line.point(step.z);
            state.log_density = step.log_density;
        }
        state.iteration += 1;
        return Ok(StepRecord {
            proposal: line.point(step.proposal),
            accepted: step.accepted,
            hull_rebuilds: step.hull_rebuilds,
            direction: Some(line.direction),
        });
    }
    Err(Error::DegenerateLine(MAX_DIRECTION_ATTEMPTS))
}
