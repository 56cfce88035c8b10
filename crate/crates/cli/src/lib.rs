//! Argument parsing and subcommand dispatch for the `hararms` binary.
//!
//! Every subcommand reads an optional TOML config, applies `--seed`, and
//! writes CSV tables and JSON reports under `--out`. Each JSON report embeds
//! the resolved config under `"config"`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};
use hararms::experiments::{
    fit_free_knot, grid_loglik, model_selection, run_mixture_comparison, sample_univariate, trapping_study,
    ExperimentConfig, GridTable, KnotFitReport, LocalMaximum, MixtureReport, SelectionReport, TrappingReport,
};
use hararms::hull::PiecewiseHull;
use hararms::samplers::Samples;
use hararms::spline::Dataset;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "hararms",
    version,
    about = "Adaptive rejection and hit-and-run samplers, with free-knot spline experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment config; every section is optional.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Write the configured dataset to data.csv with a data.json sidecar.
    GenData,
    /// Gibbs-ARMS and HARARMS on the configured Gaussian mixture.
    SampleMixture,
    /// ARS or ARMS on a univariate test density.
    #[command(name = "sample-1d")]
    Sample1d {
        /// Also write the last hull to hull.json.
        #[arg(long)]
        dump_hull: bool,
    },
    /// Knot log-likelihood over the configured one- and two-knot grids.
    GridLoglik,
    /// Free-knot fit with a fixed number of knots.
    FitSpline {
        /// Overrides `fit.knots`.
        #[arg(long)]
        knots: Option<usize>,
    },
    /// Fits every knot count in the selection range and compares AIC/BIC.
    SelectModel,
}

impl Cli {
    pub fn log_level(&self) -> log::LevelFilter {
        match self.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Experiment(#[from] hararms::Error),
    #[error("{path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 3 for config problems, 1 for everything that fails afterwards.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Experiment(_) | CliError::Output { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reads and resolves the config. Relative dataset paths resolve against the
/// config file's directory.
pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> CliResult<(ExperimentConfig, PathBuf)> {
    let (text, base) = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Config {
                path: p.to_path_buf(),
                message: e.to_string(),
            })?;
            (text, p.parent().map(Path::to_path_buf).unwrap_or_default())
        }
        None => (String::new(), PathBuf::from(".")),
    };
    let shown = path
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("<defaults>"));
    let config = ExperimentConfig::from_toml_str(&text)
        .and_then(|c| c.resolve(seed))
        .map_err(|e| CliError::Config {
            path: shown,
            message: e.to_string(),
        })?;
    Ok((config, base))
}

/// Runs the subcommand and returns the files it wrote.
pub fn run(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let (mut config, base) = load_config(cli.config.as_deref(), cli.seed)?;
    if let Command::FitSpline { knots: Some(k) } = cli.command {
        config.fit.knots = k;
    }
    fs::create_dir_all(&cli.out).map_err(|source| CliError::Output {
        path: cli.out.clone(),
        source,
    })?;
    let mut out = Outputs::new(&cli.out);
    match &cli.command {
        Command::GenData => gen_data(&config, &base, &mut out)?,
        Command::SampleMixture => sample_mixture(&config, &mut out)?,
        Command::Sample1d { dump_hull } => sample_1d(&config, *dump_hull, &mut out)?,
        Command::GridLoglik => grid(&config, &base, &mut out)?,
        Command::FitSpline { .. } => {
            let data = config.dataset.load(&base)?;
            fit_one(&config, &data, config.fit.knots, &mut out)?;
        }
        Command::SelectModel => select(&config, &base, &mut out)?,
    }
    Ok(out.written)
}

struct Outputs {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    body: T,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
        let path = self.dir.join(name);
        let io = |source| CliError::Output {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        f(&mut w).and_then(|_| w.flush()).map_err(io)?;
        log::debug!("wrote {}", path.display());
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, config: &ExperimentConfig, body: T) -> CliResult<()> {
        let report = Report { config, body };
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, &report).map_err(std::io::Error::other)?;
            writeln!(w)
        })
    }

    fn rows<'r, I>(&mut self, name: &str, rows: I) -> CliResult<()>
    where
        I: IntoIterator<Item = &'r [f64]>,
    {
        self.write_with(name, |w| {
            for row in rows {
                let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                writeln!(w, "{}", line.join(","))?;
            }
            Ok(())
        })
    }

    fn samples(&mut self, name: &str, samples: &Samples) -> CliResult<()> {
        self.rows(name, samples.rows())
    }
}

fn gen_data(config: &ExperimentConfig, base: &Path, out: &mut Outputs) -> CliResult<()> {
    #[derive(Serialize)]
    struct Body<'a> {
        n: usize,
        generating: Option<&'a hararms::spline::GeneratingSpec>,
    }
    let data = config.dataset.load(base)?;
    out.write_with("data.csv", |w| data.write_csv(&mut *w).map_err(std::io::Error::other))?;
    out.json(
        "data.json",
        config,
        Body {
            n: data.len(),
            generating: data.generating(),
        },
    )
}

fn sample_mixture(config: &ExperimentConfig, out: &mut Outputs) -> CliResult<()> {
    #[derive(Serialize)]
    struct Body<'a> {
        hararms: &'a MixtureReport,
        gibbs_arms: &'a MixtureReport,
        trapping: Vec<TrappingReport>,
    }
    let exp = config.mixture_experiment()?;
    let cmp = run_mixture_comparison(&exp)?;
    let trapping = if config.mixture.replicates > 0 {
        let starts = config
            .mixture
            .trapping_starts
            .clone()
            .unwrap_or_else(|| exp.spec.means.clone());
        starts
            .iter()
            .map(|s| trapping_study(&exp, s, config.mixture.replicates))
            .collect::<hararms::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    out.samples("samples.csv", &cmp.hararms.samples)?;
    out.samples("samples_gibbs.csv", &cmp.gibbs_arms.samples)?;
    out.json(
        "mixture_report.json",
        config,
        Body {
            hararms: &cmp.hararms.report,
            gibbs_arms: &cmp.gibbs_arms.report,
            trapping,
        },
    )
}

fn sample_1d(config: &ExperimentConfig, dump_hull: bool, out: &mut Outputs) -> CliResult<()> {
    #[derive(Serialize)]
    struct Body<'a, T: Serialize> {
        report: &'a T,
    }
    #[derive(Serialize)]
    struct HullBody<'a> {
        hull: &'a PiecewiseHull,
    }
    let run = sample_univariate(&config.univariate_experiment()?)?;
    out.rows("samples.csv", run.samples.iter().map(std::slice::from_ref))?;
    out.json("sample_1d_report.json", config, Body { report: &run.report })?;
    if dump_hull {
        out.json("hull.json", config, HullBody { hull: &run.hull })?;
    }
    Ok(())
}

fn grid(config: &ExperimentConfig, base: &Path, out: &mut Outputs) -> CliResult<()> {
    #[derive(Serialize)]
    struct Table {
        n_knots: usize,
        argmax: LocalMaximum,
        local_maxima: Vec<LocalMaximum>,
    }
    #[derive(Serialize)]
    struct Body {
        degree: u32,
        tables: Vec<Table>,
    }
    let data = config.dataset.load(base)?;
    let degree = config.dataset.degree(&data)?;
    let spec = config.grid.spec();
    let mut tables = Vec::new();
    for &k in &config.grid.knots {
        let table = grid_loglik(&data, degree, k, &spec)?;
        match &table {
            GridTable::One { points, values } => {
                let rows: Vec<[f64; 2]> = points.iter().zip(values).map(|(&p, &v)| [p, v]).collect();
                out.rows("grid_K1.csv", rows.iter().map(|r| r.as_slice()))?;
            }
            GridTable::Two { values, .. } => out.rows("grid_K2.csv", values.iter().map(Vec::as_slice))?,
        }
        tables.push(Table {
            n_knots: k,
            argmax: table.argmax(),
            local_maxima: table.local_maxima(),
        });
    }
    out.json("grid_report.json", config, Body { degree, tables })
}

#[derive(Serialize)]
struct FitBody<'a> {
    fit: &'a KnotFitReport,
}

fn fit_name(k: usize) -> String {
    format!("fit_K{k}.json")
}

fn fit_one(config: &ExperimentConfig, data: &Dataset, k: usize, out: &mut Outputs) -> CliResult<KnotFitReport> {
    let mut config = config.clone();
    config.fit.knots = k;
    let degree = config.dataset.degree(data)?;
    log::info!("fitting {k} knot(s), {} chain(s)", config.fit.chains);
    let fit = fit_free_knot(data, k, degree, &config.sampler, &config.fit.settings())?;
    out.samples(&format!("fit_K{k}_samples.csv"), &fit.samples)?;
    out.json(&fit_name(k), &config, FitBody { fit: &fit.report })?;
    Ok(fit.report)
}

/// A fit report from an earlier run, if it was produced under the same
/// config (apart from the knot count).
fn previous_fit(config: &ExperimentConfig, dir: &Path, k: usize) -> Option<KnotFitReport> {
    let text = fs::read_to_string(dir.join(fit_name(k))).ok()?;
    let value: serde_json::Value = serde_json::from_str(&text).ok()?;
    let mut expected = config.clone();
    expected.fit.knots = k;
    if value.get("config")? != &serde_json::to_value(&expected).ok()? {
        return None;
    }
    serde_json::from_value(value.get("fit")?.clone()).ok()
}

fn select(config: &ExperimentConfig, base: &Path, out: &mut Outputs) -> CliResult<()> {
    #[derive(Serialize)]
    struct Body<'a> {
        selection: &'a SelectionReport,
    }
    let data = config.dataset.load(base)?;
    let mut reports = Vec::new();
    for k in config.selection.min_knots..=config.selection.max_knots {
        let report = match previous_fit(config, &out.dir, k) {
            Some(r) => {
                log::info!("reusing {}", fit_name(k));
                r
            }
            None => fit_one(config, &data, k, out)?,
        };
        reports.push(report);
    }
    let selection = model_selection(&reports)?;
    out.json("selection.json", config, Body { selection: &selection })
}
