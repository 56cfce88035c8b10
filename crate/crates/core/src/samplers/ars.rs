use rand::Rng;

use crate::error::{Error, Result};
use crate::hull::{Abscissae, InsertOutcome, PiecewiseHull};

/// Consecutive rejections that teach the hull nothing before giving up.
pub const MAX_IDLE_REJECTIONS: usize = 10_000;

/// Adaptive rejection sampler for a log-concave univariate density.
///
/// Keeps its abscissae and hull between draws; every rejected proposal is
/// added to the abscissae (up to the cap) and the hull is rebuilt, so the
/// envelope tightens as sampling proceeds. Accepted draws are exact.
#[derive(Clone, Debug)]
pub struct AdaptiveRejectionSampler {
    abscissae: Abscissae,
    hull: PiecewiseHull,
    proposals: usize,
    accepted: usize,
}

impl AdaptiveRejectionSampler {
    pub fn new(abscissae: Abscissae) -> Result<Self> {
        let hull = PiecewiseHull::ars(&abscissae)?;
        Ok(Self {
            abscissae,
            hull,
            proposals: 0,
            accepted: 0,
        })
    }

    pub fn abscissae(&self) -> &Abscissae {
        &self.abscissae
    }

    pub fn hull(&self) -> &PiecewiseHull {
        &self.hull
    }

    /// Fraction of hull proposals accepted so far.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposals as f64
    }

    pub fn sample<F, R>(&mut self, logf: F, rng: &mut R) -> Result<f64>
    where
        F: Fn(f64) -> f64,
        R: Rng + ?Sized,
    {
        let mut idle = 0;
        loop {
            let x = self.hull.sample(rng);
            let u: f64 = rng.random();
            let lf = logf(x);
            self.proposals += 1;
            if lf.is_finite() && u.ln() <= lf - self.hull.value_at(x) {
                self.accepted += 1;
                return Ok(x);
            }
            let grew = lf.is_finite() && self.abscissae.insert(x, lf)? == InsertOutcome::Inserted;
            if grew {
                self.hull = PiecewiseHull::ars(&self.abscissae)?;
                idle = 0;
            } else {
                idle += 1;
                if idle >= MAX_IDLE_REJECTIONS {
                    return Err(Error::HullSaturated {
                        cap: self.abscissae.cap(),
                        rejections: idle,
                    });
                }
            }
        }
    }
}

/// One exact draw from `exp(logf)` by adaptive rejection, updating
/// `abscissae` with every rejected point.
pub fn ars_sample<F, R>(logf: F, abscissae: &mut Abscissae, rng: &mut R) -> Result<f64>
where
    F: Fn(f64) -> f64,
    R: Rng + ?Sized,
{
    let mut sampler = AdaptiveRejectionSampler::new(abscissae.clone())?;
    let x = sampler.sample(logf, rng)?;
    *abscissae = sampler.abscissae;
    Ok(x)
}
