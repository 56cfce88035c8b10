//! Small numeric helpers shared across modules.

/// `ln Σ exp(v)`, stable for large magnitudes. Returns `-inf` for an empty
/// input or when every term is `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Empirical quantile with linear interpolation between order statistics
/// (the "type 7" convention). `sorted` must be ascending and non-empty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Two-sided Kolmogorov–Smirnov distance between a sample and a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// CDF of `exp(logf)` on `[lo, hi]`, tabulated by the trapezoid rule on a
/// uniform grid and interpolated linearly.
#[derive(Clone, Debug)]
pub struct NumericalCdf {
    lo: f64,
    step: f64,
    cumulative: Vec<f64>,
}

impl NumericalCdf {
    pub fn new<F: Fn(f64) -> f64>(logf: F, lo: f64, hi: f64, intervals: usize) -> Self {
        assert!(lo < hi && intervals > 0);
        let step = (hi - lo) / intervals as f64;
        let logs: Vec<f64> = (0..=intervals).map(|i| logf(lo + step * i as f64)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let dens: Vec<f64> = logs.iter().map(|v| (v - max).exp()).collect();
        let mut cumulative = Vec::with_capacity(intervals + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in dens.windows(2) {
            acc += 0.5 * (w[0] + w[1]);
            cumulative.push(acc);
        }
        cumulative.iter_mut().for_each(|c| *c /= acc);
        Self { lo, step, cumulative }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let t = (x - self.lo) / self.step;
        if t <= 0.0 {
            return 0.0;
        }
        let last = self.cumulative.len() - 1;
        if t >= last as f64 {
            return 1.0;
        }
        let i = t.floor() as usize;
        let f = t - i as f64;
        self.cumulative[i] + f * (self.cumulative[i + 1] - self.cumulative[i])
    }
}
