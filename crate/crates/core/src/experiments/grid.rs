use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::{knot_log_likelihood, Dataset};

/// Neighbours must be beaten by more than this to make a local maximum.
pub const LOCAL_MAX_TOL: f64 = 1e-9;

/// Arithmetic grid `start, start + step, …` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            start: 100.0,
            step: 10.0,
            count: 90,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.step.is_finite() && self.step > 0.0) || self.count == 0 {
            return Err(Error::InvalidConfig(
                "grid needs a finite start, positive step and count".into(),
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.start + self.step * i as f64).collect()
    }
}

/// One grid cell that beats all of its neighbours.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalMaximum {
    pub knots: Vec<f64>,
    pub log_likelihood: f64,
}

/// Knot log-likelihood over a one- or two-knot grid.
#[derive(Clone, Debug, PartialEq)]
pub enum GridTable {
    /// `values[i]` at knot `points[i]`.
    One { points: Vec<f64>, values: Vec<f64> },
    /// Symmetric `values[i][j]` for knots `(points[i], points[j])`; the
    /// diagonal is `-inf`.
    Two { points: Vec<f64>, values: Vec<Vec<f64>> },
}

impl GridTable {
    pub fn n_knots(&self) -> usize {
        match self {
            GridTable::One { .. } => 1,
            GridTable::Two { .. } => 2,
        }
    }

    pub fn points(&self) -> &[f64] {
        match self {
            GridTable::One { points, .. } | GridTable::Two { points, .. } => points,
        }
    }

    /// Largest value and the knots attaining it (first in scan order).
    pub fn argmax(&self) -> LocalMaximum {
        let mut best = LocalMaximum {
            knots: vec![],
            log_likelihood: f64::NEG_INFINITY,
        };
        match self {
            GridTable::One { points, values } => {
                for (p, &v) in points.iter().zip(values) {
                    if v > best.log_likelihood {
                        best = LocalMaximum {
                            knots: vec![*p],
                            log_likelihood: v,
                        };
                    }
                }
            }
            GridTable::Two { points, values } => {
                for i in 0..points.len() {
                    for j in i + 1..points.len() {
                        if values[i][j] > best.log_likelihood {
                            best = LocalMaximum {
                                knots: vec![points[i], points[j]],
                                log_likelihood: values[i][j],
                            };
                        }
                    }
                }
            }
        }
        best
    }

    /// Cells exceeding every existing neighbour by more than
    /// [`LOCAL_MAX_TOL`]. Two-knot cells use the 8-neighbourhood over
    /// unordered pairs; the diagonal is never a neighbour.
    pub fn local_maxima(&self) -> Vec<LocalMaximum> {
        let mut out = Vec::new();
        match self {
            GridTable::One { points, values } => {
                let n = values.len();
                for i in 0..n {
                    let v = values[i];
                    let beats = |j: usize| v > values[j] + LOCAL_MAX_TOL;
                    if v.is_finite() && (i == 0 || beats(i - 1)) && (i + 1 == n || beats(i + 1)) {
                        out.push(LocalMaximum {
                            knots: vec![points[i]],
                            log_likelihood: v,
                        });
                    }
                }
            }
            GridTable::Two { points, values } => {
                let n = points.len() as isize;
                for i in 0..n {
                    for j in i + 1..n {
                        let v = values[i as usize][j as usize];
                        if !v.is_finite() {
                            continue;
                        }
                        let mut is_max = true;
                        'nb: for di in -1..=1 {
                            for dj in -1..=1 {
                                let (a, b) = (i + di, j + dj);
                                if (di, dj) == (0, 0) || a < 0 || b < 0 || a >= n || b >= n || a == b {
                                    continue;
                                }
                                let (a, b) = (a.min(b), a.max(b));
                                if (a, b) == (i, j) {
                                    continue;
                                }
                                if v <= values[a as usize][b as usize] + LOCAL_MAX_TOL {
                                    is_max = false;
                                    break 'nb;
                                }
                            }
                        }
                        if is_max {
                            out.push(LocalMaximum {
                                knots: vec![points[i as usize], points[j as usize]],
                                log_likelihood: v,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Evaluates the knot log-likelihood at every grid point (`n_knots = 1`) or
/// every unordered pair of distinct grid points (`n_knots = 2`).
pub fn grid_loglik(data: &Dataset, degree: u32, n_knots: usize, grid: &GridSpec) -> Result<GridTable> {
    grid.validate()?;
    let points = grid.points();
    match n_knots {
        1 => {
            let values = points
                .iter()
                .map(|&k| knot_log_likelihood(&[k], data, degree))
                .collect();
            Ok(GridTable::One { points, values })
        }
        2 => {
            let n = points.len();
            let rows: Vec<Vec<f64>> = super::par_map((0..n).collect(), |i| {
                (0..n)
                    .map(|j| {
                        if j > i {
                            knot_log_likelihood(&[points[i], points[j]], data, degree)
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect()
            });
            let mut values = rows;
            #[allow(clippy::needless_range_loop)]
            for i in 0..n {
                for j in 0..i {
                    values[i][j] = values[j][i];
                }
            }
            Ok(GridTable::Two { points, values })
        }
        k => Err(Error::InvalidConfig(format!(
            "grid scans support 1 or 2 knots, got {k}"
        ))),
    }
}
