//! Piecewise-linear upper hulls of a log-density.
//!
//! Both hull flavours are built from secants through neighbouring abscissae
//! `(x_l, ln f(x_l))`. The ARS hull takes the minimum of the two outer secants
//! on every inter-abscissa segment; the ARMS hull additionally takes the
//! maximum with the inner secant, so it stays usable when `ln f` is not
//! concave. A secant that would need a point beyond the outermost abscissa is
//! undefined and simply left out of the min/max. Past the outermost abscissae
//! the hull follows the boundary secant out to the support edge.
//!
//! Every constituent line is split at its crossings, so each [`HullSegment`]
//! is a single line whose exponential integrates in closed form. Masses are
//! kept in log space throughout.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::math::log_sum_exp;

/// Minimum number of abscissae needed for every interior segment to have
/// both outer secants.
pub const MIN_ABSCISSAE: usize = 4;
/// Default cap on the number of abscissae in one hull.
pub const DEFAULT_ABSCISSAE_CAP: usize = 100;
/// Default number of initial abscissae.
pub const DEFAULT_INITIAL_ABSCISSAE: usize = 5;
/// Insertion closer than this to an existing abscissa is a no-op.
pub const DUPLICATE_TOL: f64 = 1e-12;

const FLAT_SEGMENT_TOL: f64 = 1e-12;

/// A straight line `slope * x + intercept` on the log scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    fn crossing(&self, other: &Line) -> Option<f64> {
        let ds = self.slope - other.slope;
        if ds == 0.0 {
            return None;
        }
        let x = (other.intercept - self.intercept) / ds;
        x.is_finite().then_some(x)
    }
}

/// The straight line through two points.
pub fn secant(p1: (f64, f64), p2: (f64, f64)) -> Result<Line> {
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    if !(x1.is_finite() && y1.is_finite() && x2.is_finite() && y2.is_finite()) {
        return Err(Error::NonFinite("secant endpoint"));
    }
    if x1 == x2 {
        return Err(Error::DegenerateSecant(x1));
    }
    let slope = (y2 - y1) / (x2 - x1);
    // Anchor the intercept on the point closer to the origin.
    let intercept = if x1.abs() <= x2.abs() {
        y1 - slope * x1
    } else {
        y2 - slope * x2
    };
    if !(slope.is_finite() && intercept.is_finite()) {
        return Err(Error::NonFinite("secant slope"));
    }
    Ok(Line { slope, intercept })
}

/// `log ∫_lo^hi exp(slope * x + intercept) dx`.
pub fn segment_log_mass(slope: f64, intercept: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(slope.is_finite() && intercept.is_finite() && lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite("segment parameters"));
    }
    if lo >= hi {
        return Err(Error::InvalidSupport(lo, hi));
    }
    let width = hi - lo;
    let t = slope.abs() * width;
    if t < FLAT_SEGMENT_TOL {
        return Ok(width.ln() + intercept + slope * 0.5 * (lo + hi));
    }
    // ∫ = exp(s * edge + c) * w * (1 - exp(-t)) / t with t = |s| w, edge
    // being the endpoint where the line is highest.
    let edge = if slope > 0.0 { hi } else { lo };
    Ok(intercept + slope * edge + width.ln() + (-(-t).exp_m1() / t).ln())
}

/// Outcome of [`Abscissae::insert`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted,
    /// Within [`DUPLICATE_TOL`] of an existing abscissa; nothing changed.
    Duplicate,
    /// The abscissae are at their cap; nothing changed.
    AtCap,
}

/// Sorted evaluation points of a log-density on a bounded support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Abscissae {
    support: Interval,
    points: Vec<f64>,
    log_values: Vec<f64>,
    cap: usize,
}

impl Abscissae {
    pub fn new(support: Interval, points: Vec<f64>, log_values: Vec<f64>) -> Result<Self> {
        if points.len() != log_values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: log_values.len(),
            });
        }
        if points.len() < MIN_ABSCISSAE {
            return Err(Error::TooFewAbscissae {
                required: MIN_ABSCISSAE,
                got: points.len(),
            });
        }
        let ordered = points.windows(2).all(|w| w[0] < w[1]);
        let inside = points.iter().all(|&x| support.contains_open(x));
        if !ordered || !inside {
            return Err(Error::InvalidAbscissae {
                lo: support.lo,
                hi: support.hi,
            });
        }
        if log_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("abscissa log-density"));
        }
        let cap = DEFAULT_ABSCISSAE_CAP.max(points.len());
        Ok(Self {
            support,
            points,
            log_values,
            cap,
        })
    }

    /// Evaluates `logf` at `count` evenly spread interior points of `support`.
    ///
    /// Points where `logf` is not finite are dropped. If fewer than
    /// [`MIN_ABSCISSAE`] survive, the grid is refined (each refinement nests
    /// the previous one) until enough points are finite or the grid would
    /// exceed `cap`.
    pub fn initial<F>(support: Interval, count: usize, cap: usize, logf: F) -> Result<Self>
    where
        F: Fn(f64) -> f64,
    {
        let mut count = count.max(MIN_ABSCISSAE);
        let cap = cap.max(MIN_ABSCISSAE);
        loop {
            let (points, log_values): (Vec<f64>, Vec<f64>) = support
                .interior_grid(count)
                .into_iter()
                .map(|x| (x, logf(x)))
                .filter(|(_, v)| v.is_finite())
                .unzip();
            if points.len() >= MIN_ABSCISSAE {
                let mut abscissae = Self::new(support, points, log_values)?;
                abscissae.cap = cap.max(abscissae.points.len());
                return Ok(abscissae);
            }
            let next = 2 * count + 1;
            if next > cap {
                return Err(Error::TooFewAbscissae {
                    required: MIN_ABSCISSAE,
                    got: points.len(),
                });
            }
            count = next;
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap.max(self.points.len());
        self
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn is_full(&self) -> bool {
        self.points.len() >= self.cap
    }

    /// Merges `x` into the sorted abscissae. The caller rebuilds the hull.
    pub fn insert(&mut self, x: f64, log_value: f64) -> Result<InsertOutcome> {
        if !log_value.is_finite() {
            return Err(Error::NonFinite("inserted log-density"));
        }
        if !self.support.contains_open(x) {
            return Err(Error::InvalidAbscissae {
                lo: self.support.lo,
                hi: self.support.hi,
            });
        }
        let idx = self.points.partition_point(|&p| p < x);
        let near = |i: usize| self.points.get(i).is_some_and(|&p| (p - x).abs() <= DUPLICATE_TOL);
        if near(idx) || (idx > 0 && near(idx - 1)) {
            return Ok(InsertOutcome::Duplicate);
        }
        if self.is_full() {
            return Ok(InsertOutcome::AtCap);
        }
        self.points.insert(idx, x);
        self.log_values.insert(idx, log_value);
        Ok(InsertOutcome::Inserted)
    }

    /// Golden-section search for the maximum of `logf` between the
    /// neighbours of the current best abscissa, inserting every finite
    /// evaluation. Uses at most `evaluations` calls to `logf`. The result
    /// depends only on the abscissae and `logf`.
    pub fn refine_toward_max<F>(&mut self, logf: F, evaluations: usize) -> Result<()>
    where
        F: Fn(f64) -> f64,
    {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        if evaluations == 0 {
            return Ok(());
        }
        let best = (0..self.points.len()).fold(0, |b, i| if self.log_values[i] > self.log_values[b] { i } else { b });
        let mut lo = if best > 0 {
            self.points[best - 1]
        } else {
            self.support.lo
        };
        let mut hi = self.points.get(best + 1).copied().unwrap_or(self.support.hi);
        let (mut mid, mut f_mid) = (self.points[best], self.log_values[best]);
        for _ in 0..evaluations {
            let left_wider = mid - lo > hi - mid;
            let probe = if left_wider {
                mid - (1.0 - INV_PHI) * (mid - lo)
            } else {
                mid + (1.0 - INV_PHI) * (hi - mid)
            };
            if !(probe > lo && probe < hi) || (probe - mid).abs() <= DUPLICATE_TOL {
                break;
            }
            let f_probe = logf(probe);
            if f_probe.is_finite() && self.insert(probe, f_probe)? == InsertOutcome::AtCap {
                break;
            }
            if f_probe > f_mid {
                if left_wider {
                    hi = mid;
                } else {
                    lo = mid;
                }
                (mid, f_mid) = (probe, f_probe);
            } else if left_wider {
                lo = probe;
            } else {
                hi = probe;
            }
        }
        Ok(())
    }

    fn secant(&self, i: usize) -> Result<Line> {
        secant(
            (self.points[i], self.log_values[i]),
            (self.points[i + 1], self.log_values[i + 1]),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullKind {
    Ars,
    Arms,
}

/// One linear piece of a hull together with its log-integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HullSegment {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
    pub log_mass: f64,
}

impl HullSegment {
    fn new(lo: f64, hi: f64, line: Line) -> Result<Self> {
        let log_mass = segment_log_mass(line.slope, line.intercept, lo, hi)?;
        if !log_mass.is_finite() {
            return Err(Error::NonFinite("segment mass"));
        }
        Ok(Self {
            lo,
            hi,
            slope: line.slope,
            intercept: line.intercept,
            log_mass,
        })
    }

    #[inline]
    pub fn value_at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }

    /// Inverse CDF of the truncated exponential `exp(slope * x)` on `[lo, hi]`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let width = self.hi - self.lo;
        let s = self.slope;
        let x = if (s * width).abs() < FLAT_SEGMENT_TOL {
            self.lo + u * width
        } else if s > 0.0 {
            self.hi + ((1.0 - u) * (-s * width).exp_m1()).ln_1p() / s
        } else {
            self.lo + (u * (s * width).exp_m1()).ln_1p() / s
        };
        x.clamp(self.lo, self.hi)
    }
}

/// The hull `h_m` over the whole support, normalised by `M_m`.
#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseHull {
    pub kind: HullKind,
    pub support: Interval,
    pub segments: Vec<HullSegment>,
    pub total_log_mass: f64,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

/// How the hull is composed on one inter-abscissa segment.
enum Composite {
    Line(Line),
    MinOf([Line; 2]),
    MaxOf(Line, Line),
    MaxMin { inner: Line, outer: [Line; 2] },
}

impl Composite {
    fn value(&self, x: f64) -> f64 {
        match self {
            Composite::Line(l) => l.at(x),
            Composite::MinOf([a, b]) => a.at(x).min(b.at(x)),
            Composite::MaxOf(a, b) => a.at(x).max(b.at(x)),
            Composite::MaxMin { inner, outer } => inner.at(x).max(outer[0].at(x).min(outer[1].at(x))),
        }
    }

    fn lines(&self) -> Vec<Line> {
        match self {
            Composite::Line(l) => vec![*l],
            Composite::MinOf([a, b]) | Composite::MaxOf(a, b) => vec![*a, *b],
            Composite::MaxMin { inner, outer } => vec![*inner, outer[0], outer[1]],
        }
    }

    /// Splits `[lo, hi]` at crossings of the constituent lines and emits one
    /// segment per linear piece.
    fn push_segments(&self, lo: f64, hi: f64, out: &mut Vec<HullSegment>) -> Result<()> {
        let lines = self.lines();
        let mut cuts = vec![lo];
        for (i, a) in lines.iter().enumerate() {
            for b in &lines[i + 1..] {
                if let Some(x) = a.crossing(b) {
                    if x > lo && x < hi {
                        cuts.push(x);
                    }
                }
            }
        }
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            let target = self.value(mid);
            let active = lines
                .iter()
                .min_by(|p, q| (p.at(mid) - target).abs().total_cmp(&(q.at(mid) - target).abs()))
                .copied()
                .expect("composite has at least one line");
            match out.last_mut() {
                Some(prev) if prev.slope == active.slope && prev.intercept == active.intercept => {
                    prev.hi = b;
                    prev.log_mass = segment_log_mass(active.slope, active.intercept, prev.lo, b)?;
                }
                _ => out.push(HullSegment::new(a, b, active)?),
            }
        }
        Ok(())
    }
}

impl PiecewiseHull {
    /// Upper hull for log-concave densities: minimum of the outer secants.
    pub fn ars(abscissae: &Abscissae) -> Result<Self> {
        Self::build(abscissae, HullKind::Ars)
    }

    /// Pseudo-envelope for arbitrary densities: maximum of the inner secant
    /// and the minimum of the outer secants.
    pub fn arms(abscissae: &Abscissae) -> Result<Self> {
        Self::build(abscissae, HullKind::Arms)
    }

    pub fn build(abscissae: &Abscissae, kind: HullKind) -> Result<Self> {
        let n = abscissae.len();
        if n < MIN_ABSCISSAE {
            return Err(Error::TooFewAbscissae {
                required: MIN_ABSCISSAE,
                got: n,
            });
        }
        let support = abscissae.support();
        let pts = abscissae.points();
        let secants = (0..n - 1).map(|i| abscissae.secant(i)).collect::<Result<Vec<_>>>()?;

        let mut segments = Vec::with_capacity(2 * n + 2);
        Composite::Line(secants[0]).push_segments(support.lo, pts[0], &mut segments)?;
        for l in 0..n - 1 {
            let left = l.checked_sub(1).map(|i| secants[i]);
            let right = secants.get(l + 1).copied();
            let outer = match (left, right) {
                (Some(a), Some(b)) => Composite::MinOf([a, b]),
                (Some(a), None) | (None, Some(a)) => Composite::Line(a),
                (None, None) => unreachable!("n >= 4 guarantees an outer secant"),
            };
            let composite = match (kind, outer) {
                (HullKind::Ars, outer) => outer,
                (HullKind::Arms, Composite::Line(o)) => Composite::MaxOf(secants[l], o),
                (HullKind::Arms, Composite::MinOf(outer)) => Composite::MaxMin {
                    inner: secants[l],
                    outer,
                },
                (HullKind::Arms, _) => unreachable!(),
            };
            composite.push_segments(pts[l], pts[l + 1], &mut segments)?;
        }
        Composite::Line(secants[n - 2]).push_segments(pts[n - 1], support.hi, &mut segments)?;

        Ok(Self::from_segments(kind, support, segments))
    }

    fn from_segments(kind: HullKind, support: Interval, segments: Vec<HullSegment>) -> Self {
        let total_log_mass = log_sum_exp(segments.iter().map(|s| s.log_mass));
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = segments
            .iter()
            .map(|s| {
                acc += (s.log_mass - total_log_mass).exp();
                acc
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self {
            kind,
            support,
            segments,
            total_log_mass,
            cumulative,
        }
    }

    /// A hull made of explicitly given segments, which must tile the support.
    pub fn from_lines(kind: HullKind, pieces: &[(f64, f64, Line)]) -> Result<Self> {
        let first = pieces.first().ok_or(Error::TooFewAbscissae { required: 1, got: 0 })?;
        let last = pieces.last().expect("non-empty");
        let support = Interval::new(first.0, last.1)?;
        if pieces.windows(2).any(|w| w[0].1 != w[1].0) {
            return Err(Error::InvalidAbscissae {
                lo: support.lo,
                hi: support.hi,
            });
        }
        let segments = pieces
            .iter()
            .map(|&(lo, hi, line)| HullSegment::new(lo, hi, line))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_segments(kind, support, segments))
    }

    fn segment_index(&self, x: f64) -> usize {
        self.segments.partition_point(|s| s.hi < x).min(self.segments.len() - 1)
    }

    /// `h_m(x)`; points outside the support are clamped to it.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = x.clamp(self.support.lo, self.support.hi);
        self.segments[self.segment_index(x)].value_at(x)
    }

    /// Normalised probability of each segment under `exp(h) / M`.
    pub fn segment_probabilities(&self) -> Vec<f64> {
        self.segments
            .iter()
            .map(|s| (s.log_mass - self.total_log_mass).exp())
            .collect()
    }

    /// Draws from `g_m = exp(h_m) / M_m` given two uniforms on `[0, 1)`: the
    /// first picks a segment, the second inverts the CDF inside it.
    pub fn sample_with(&self, u_segment: f64, u_within: f64) -> f64 {
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u_segment)
            .min(self.segments.len() - 1);
        self.segments[idx].inverse_cdf(u_within)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        self.sample_with(u1, u2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn abscissae(points: &[f64], logf: impl Fn(f64) -> f64, support: (f64, f64)) -> Abscissae {
        Abscissae::new(
            Interval::new(support.0, support.1).unwrap(),
            points.to_vec(),
            points.iter().map(|&x| logf(x)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn mode_refinement_brackets_the_line_maximum() {
        let logf = |x: f64| -50.0 * (x - 0.3).powi(2);
        let support = Interval::new(0.0, 1.0).unwrap();
        let mut a = Abscissae::initial(support, 5, 100, logf).unwrap();
        a.refine_toward_max(logf, 20).unwrap();
        assert_eq!(a.len(), 25);
        let best = a
            .points()
            .iter()
            .copied()
            .fold(0.0, |b, x| if logf(x) > logf(b) { x } else { b });
        assert!((best - 0.3).abs() < 1e-3, "{best}");
        assert!(a.points().windows(2).all(|w| w[0] < w[1]));

        let mut capped = Abscissae::initial(support, 5, 8, logf).unwrap();
        capped.refine_toward_max(logf, 20).unwrap();
        assert_eq!(capped.len(), 8);

        let mut none = Abscissae::initial(support, 5, 100, logf).unwrap();
        none.refine_toward_max(logf, 0).unwrap();
        assert_eq!(none.len(), 5);
    }

    #[test]
    fn secant_examples() {
        let l = secant((0.0, 0.0), (1.0, 1.0)).unwrap();
        assert_eq!((l.slope, l.intercept), (1.0, 0.0));
        let l = secant((-2.0, -2.0), (-1.0, -0.5)).unwrap();
        assert_relative_eq!(l.slope, 1.5);
        assert_relative_eq!(l.intercept, 1.0);
        let l = secant((1.0, -0.5), (2.0, -2.0)).unwrap();
        assert_relative_eq!(l.slope, -1.5);
        assert_relative_eq!(l.intercept, 1.0);
        assert_eq!(secant((1.0, 0.0), (1.0, 2.0)), Err(Error::DegenerateSecant(1.0)));
    }

    #[test]
    fn linear_log_density_hull_is_exact() {
        let a = abscissae(&[1.0, 2.0, 3.0, 4.0], |x| -x, (0.0, 10.0));
        for hull in [PiecewiseHull::ars(&a).unwrap(), PiecewiseHull::arms(&a).unwrap()] {
            for i in 0..=100 {
                let x = i as f64 * 0.1;
                assert_relative_eq!(hull.value_at(x), -x, epsilon = 1e-12);
            }
            // All pieces share one line, so they merge into a single segment.
            assert_eq!(hull.segments.len(), 1);
        }
    }

    #[test]
    fn ars_hull_of_half_square() {
        let a = abscissae(&[-2.0, -1.0, 1.0, 2.0], |x| -0.5 * x * x, (-5.0, 5.0));
        let hull = PiecewiseHull::ars(&a).unwrap();
        assert_relative_eq!(hull.value_at(0.0), 1.0, epsilon = 1e-14);
        // Crossing of the two outer secants splits the middle segment.
        assert!(hull.segments.iter().any(|s| s.lo == 0.0 || s.hi == 0.0));
    }

    #[test]
    fn arms_hull_examples() {
        let concave = abscissae(&[-2.0, -1.0, 1.0, 2.0], |x| -0.5 * x * x, (-5.0, 5.0));
        assert_relative_eq!(
            PiecewiseHull::arms(&concave).unwrap().value_at(0.0),
            1.0,
            epsilon = 1e-14
        );
        let convex = abscissae(&[-2.0, -1.0, 1.0, 2.0], |x| 0.5 * x * x, (-5.0, 5.0));
        assert_relative_eq!(
            PiecewiseHull::arms(&convex).unwrap().value_at(0.0),
            0.5,
            epsilon = 1e-14
        );
    }

    #[test]
    fn hull_requires_four_points() {
        let support = Interval::new(0.0, 1.0).unwrap();
        let err = Abscissae::new(support, vec![0.2, 0.4, 0.6], vec![0.0; 3]).unwrap_err();
        assert!(matches!(err, Error::TooFewAbscissae { .. }));
        let err = Abscissae::new(support, vec![0.0, 0.4, 0.6, 0.8], vec![0.0; 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidAbscissae { .. }));
        let err = Abscissae::new(support, vec![0.2, 0.4, 0.6, 1.5], vec![0.0; 4]).unwrap_err();
        assert!(matches!(err, Error::InvalidAbscissae { .. }));
    }

    #[test]
    fn segment_log_mass_examples() {
        assert_eq!(segment_log_mass(0.0, 0.0, 0.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            segment_log_mass(1.0, 0.0, 0.0, 1.0).unwrap(),
            (std::f64::consts::E - 1.0).ln(),
            epsilon = 1e-15
        );
        // Series branch: ∫_0^1 exp(1e-15 x) dx = 1 + 5e-16 to double precision.
        let tiny = segment_log_mass(1e-15, 0.0, 0.0, 1.0).unwrap();
        assert!((tiny - 5e-16).abs() < 1e-20, "{tiny}");
        // Just above the series threshold the closed form must still agree
        // with the expansion log(1 + t/2 + t²/6) ≈ t/2 + t²/24.
        for t in [1e-11, 1e-8, 1e-5] {
            let lm = segment_log_mass(t, 0.0, 0.0, 1.0).unwrap();
            assert!((lm - (t / 2.0 + t * t / 24.0)).abs() < 1e-15, "t = {t}: {lm}");
        }
        assert!(segment_log_mass(f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert!(segment_log_mass(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn segment_log_mass_handles_steep_lines() {
        // exp(1000 x) on [0, 1] overflows in linear space.
        let lm = segment_log_mass(1000.0, 0.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(lm, 1000.0 - 1000f64.ln(), epsilon = 1e-9);
        let lm = segment_log_mass(-1000.0, 50.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(lm, 50.0 - 1000f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn inverse_cdf_endpoints() {
        let hull = PiecewiseHull::from_lines(
            HullKind::Ars,
            &[(
                0.0,
                1.0,
                Line {
                    slope: 1.0,
                    intercept: 0.0,
                },
            )],
        )
        .unwrap();
        assert_relative_eq!(hull.sample_with(0.3, 1.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(hull.sample_with(0.3, 0.0), 0.0, epsilon = 1e-15);
        let u = 0.37;
        let expected = (1.0 + u * (std::f64::consts::E - 1.0)).ln();
        assert_relative_eq!(hull.sample_with(0.3, u), expected, epsilon = 1e-14);
        let neg = PiecewiseHull::from_lines(
            HullKind::Ars,
            &[(
                0.0,
                1.0,
                Line {
                    slope: -2.0,
                    intercept: 0.0,
                },
            )],
        )
        .unwrap();
        // F(x) = (1 - e^{-2x}) / (1 - e^{-2})
        let x = neg.sample_with(0.0, u);
        let cdf = (1.0 - (-2.0 * x).exp()) / (1.0 - (-2.0f64).exp());
        assert_relative_eq!(cdf, u, epsilon = 1e-14);
    }

    #[test]
    fn flat_hull_samples_uniformly() {
        let hull = PiecewiseHull::from_lines(
            HullKind::Ars,
            &[(
                0.0,
                1.0,
                Line {
                    slope: 0.0,
                    intercept: 0.0,
                },
            )],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut xs: Vec<f64> = (0..100_000).map(|_| hull.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "ks = {ks}");
    }

    #[test]
    fn two_segment_frequencies_match_masses() {
        let hull = PiecewiseHull::from_lines(
            HullKind::Arms,
            &[
                (
                    0.0,
                    1.0,
                    Line {
                        slope: 0.5,
                        intercept: 0.0,
                    },
                ),
                (
                    1.0,
                    3.0,
                    Line {
                        slope: -1.0,
                        intercept: 1.5,
                    },
                ),
            ],
        )
        .unwrap();
        let m0 = segment_log_mass(0.5, 0.0, 0.0, 1.0).unwrap().exp();
        let m1 = segment_log_mass(-1.0, 1.5, 1.0, 3.0).unwrap().exp();
        let p0 = m0 / (m0 + m1);
        let n = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hits = (0..n).filter(|_| hull.sample(&mut rng) < 1.0).count() as f64;
        let sd = (n as f64 * p0 * (1.0 - p0)).sqrt();
        assert!((hits - n as f64 * p0).abs() < 3.0 * sd);
    }

    #[test]
    fn insert_examples() {
        let mut a = abscissae(&[1.0, 2.0, 3.0, 4.0], |x| -x, (0.0, 5.0));
        assert_eq!(a.insert(1.5, -1.5).unwrap(), InsertOutcome::Inserted);
        assert_eq!(a.points(), &[1.0, 1.5, 2.0, 3.0, 4.0]);
        assert_eq!(a.log_values(), &[-1.0, -1.5, -2.0, -3.0, -4.0]);
        assert_eq!(a.insert(2.0, -2.0).unwrap(), InsertOutcome::Duplicate);
        assert_eq!(a.insert(2.0 + 1e-13, -2.0).unwrap(), InsertOutcome::Duplicate);
        assert_eq!(a.len(), 5);
        assert!(a.insert(2.5, f64::NEG_INFINITY).is_err());
        assert!(a.insert(6.0, 0.0).is_err());
    }

    #[test]
    fn insert_respects_cap() {
        let support = Interval::new(0.0, 1.0).unwrap();
        let mut a = Abscissae::initial(support, 5, DEFAULT_ABSCISSAE_CAP, |x| -x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut at_cap = 0;
        for _ in 0..500 {
            let x: f64 = rng.random_range(0.001..0.999);
            if a.insert(x, -x).unwrap() == InsertOutcome::AtCap {
                at_cap += 1;
            }
        }
        assert_eq!(a.len(), DEFAULT_ABSCISSAE_CAP);
        assert!(at_cap > 0);
    }

    #[test]
    fn initial_abscissae_skip_infeasible_points() {
        let support = Interval::new(0.0, 6.0).unwrap();
        let a = Abscissae::initial(support, 5, 100, |x| -x).unwrap();
        assert_eq!(a.points(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
        // Only the right third is feasible; the grid refines until four
        // finite points exist.
        let a = Abscissae::initial(support, 5, 100, |x| if x > 4.0 { -x } else { f64::NEG_INFINITY }).unwrap();
        assert!(a.len() >= MIN_ABSCISSAE);
        assert!(a.points().iter().all(|&x| x > 4.0));
        let err = Abscissae::initial(support, 5, 100, |_| f64::NEG_INFINITY).unwrap_err();
        assert!(matches!(err, Error::TooFewAbscissae { .. }));
    }
}
