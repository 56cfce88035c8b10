use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SplineSpec;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::targets::BoundingBox;

/// Knot gaps and edge margins are this fraction of the data range.
pub const GAP_FRACTION: f64 = 1e-6;

/// Parameters a synthetic dataset was drawn from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratingSpec {
    pub spec: SplineSpec,
    /// `β₀, β₁, …, β_degree`.
    pub polynomial: Vec<f64>,
    /// One coefficient per knot.
    pub knot_coefficients: Vec<f64>,
    pub noise_sd: f64,
    pub seed: u64,
}

impl GeneratingSpec {
    /// Noise-free mean of the response at `x`.
    pub fn mean(&self, x: f64) -> f64 {
        let mut coefs = self.polynomial.clone();
        coefs.extend_from_slice(&self.knot_coefficients);
        self.spec.evaluate(&coefs, x)
    }
}

/// Paired observations with strictly increasing `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    y: Vec<f64>,
    generating: Option<GeneratingSpec>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    n: usize,
    generating: Option<GeneratingSpec>,
}

impl Dataset {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidDataset(format!(
                "x has {} values but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidDataset("need at least two observations".into()));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite value".into()));
        }
        if x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDataset("x must be strictly increasing".into()));
        }
        Ok(Self { x, y, generating: None })
    }

    pub fn with_generating(mut self, generating: GeneratingSpec) -> Self {
        self.generating = Some(generating);
        self
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn generating(&self) -> Option<&GeneratingSpec> {
        self.generating.as_ref()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_range(&self) -> Interval {
        Interval {
            lo: self.x[0],
            hi: self.x[self.x.len() - 1],
        }
    }

    /// Minimum knot gap, also the margin kept from either end of the range.
    pub fn gap_tol(&self) -> f64 {
        GAP_FRACTION * self.x_range().width()
    }

    /// Interval in which knots may lie.
    pub fn knot_interval(&self) -> Interval {
        let r = self.x_range();
        let d = self.gap_tol();
        Interval {
            lo: r.lo + d,
            hi: r.hi - d,
        }
    }

    /// The sampling box for `k` knots.
    pub fn knot_box(&self, k: usize) -> BoundingBox {
        BoundingBox::new(vec![self.knot_interval(); k])
    }

    /// True when sorted `knots` are inside the knot interval and at least
    /// `gap_tol` apart.
    pub fn knots_admissible(&self, sorted: &[f64]) -> bool {
        let iv = self.knot_interval();
        let gap = self.gap_tol();
        sorted.iter().all(|&k| iv.contains(k)) && sorted.windows(2).all(|w| w[1] - w[0] >= gap)
    }

    /// Writes `x,y` rows with a header line.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "y"])?;
        for (x, y) in self.x.iter().zip(&self.y) {
            w.write_record([format!("{x:.16e}"), format!("{y:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for row in r.deserialize() {
            let (xi, yi): (f64, f64) = row?;
            x.push(xi);
            y.push(yi);
        }
        Self::new(x, y)
    }

    /// Path of the JSON sidecar belonging to `csv_path`.
    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Saves the CSV and its JSON sidecar.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        self.write_csv(BufWriter::new(File::create(csv_path)?))?;
        let sidecar = Sidecar {
            n: self.len(),
            generating: self.generating.clone(),
        };
        let mut f = BufWriter::new(File::create(Self::sidecar_path(csv_path))?);
        serde_json::to_writer_pretty(&mut f, &sidecar)?;
        writeln!(f)?;
        f.flush()?;
        Ok(())
    }

    /// Loads a CSV, picking up the sidecar when one exists.
    pub fn load(csv_path: &Path) -> Result<Self> {
        let mut data = Self::read_csv(BufReader::new(File::open(csv_path)?))?;
        let side = Self::sidecar_path(csv_path);
        if side.exists() {
            let sidecar: Sidecar = serde_json::from_reader(BufReader::new(File::open(side)?))?;
            if sidecar.n != data.len() {
                return Err(Error::InvalidDataset(format!(
                    "sidecar declares {} rows, csv has {}",
                    sidecar.n,
                    data.len()
                )));
            }
            data.generating = sidecar.generating;
        }
        Ok(data)
    }
}
