use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidSupport(lo, hi));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn contains_open(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// Point at fraction `t` of the way from `lo` to `hi`.
    pub fn at_fraction(&self, t: f64) -> f64 {
        self.lo + t * (self.hi - self.lo)
    }

    /// `count` points evenly spread at fractions `i / (count + 1)`, `i = 1..=count`.
    pub fn interior_grid(&self, count: usize) -> Vec<f64> {
        let denom = (count + 1) as f64;
        (1..=count).map(|i| self.at_fraction(i as f64 / denom)).collect()
    }
}
