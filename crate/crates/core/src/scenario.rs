//! Scenario files: a TOML description of a network and a one-parameter
//! sweep, evaluated analytically and/or by simulation.
//!
//! ```toml
//! seed = 20181
//! methods = ["analytic", "simulate"]
//! association = "both"
//!
//! [network]
//! alpha = 4.0
//! pathloss = "both"
//!
//! [[network.tier]]
//! lambda = 1e-4
//! power = 50.0
//! beta = 2.0
//! noise = 1e-6
//! fading = { model = "rayleigh" }
//!
//! [sweep]
//! variable = "density"
//! tier = 1
//! grid = [1e-5, 1e-4, 1e-3]
//! ```
//!
//! Units are fixed: densities in BS/m², powers in W, distances in m and
//! thresholds linear unless given as `beta_db`.

use crate::coverage::{self, Association, CoverageError, CoverageResult, NetworkConfig, PathLoss, Tier};
use crate::fading::{make_distribution, FadingSpec, FoxHDistribution};
use crate::sim::{self, SimBatch, SimError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("numerical failure at {variable} = {value} ({context}): {message}")]
    Numerical { variable: String, value: f64, context: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl ScenarioError {
    /// Process exit status for this failure category.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } => 2,
            ScenarioError::Validation(_) => 3,
            ScenarioError::Numerical { .. } => 4,
            ScenarioError::Io { .. } => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, ScenarioError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    Simulate,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssociationChoice {
    Rss,
    #[serde(alias = "maxsinr")]
    MaxSinr,
    #[default]
    Both,
}

impl AssociationChoice {
    fn expand(self) -> Vec<Association> {
        match self {
            AssociationChoice::Rss => vec![Association::Rss],
            AssociationChoice::MaxSinr => vec![Association::MaxSinr],
            AssociationChoice::Both => vec![Association::Rss, Association::MaxSinr],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathLossChoice {
    #[default]
    Unbounded,
    Bounded,
    Both,
}

impl PathLossChoice {
    fn expand(self) -> Vec<PathLoss> {
        match self {
            PathLossChoice::Unbounded => vec![PathLoss::Unbounded],
            PathLossChoice::Bounded => vec![PathLoss::Bounded],
            PathLossChoice::Both => vec![PathLoss::Unbounded, PathLoss::Bounded],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TierSpec {
    pub lambda: f64,
    pub power: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_db: Option<f64>,
    #[serde(default)]
    pub noise: f64,
    pub fading: FadingSpec,
}

impl TierSpec {
    /// Linear threshold.
    pub fn threshold(&self) -> Option<f64> {
        match (self.beta, self.beta_db) {
            (Some(b), None) => Some(b),
            (None, Some(db)) => Some(10f64.powf(db / 10.0)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub alpha: f64,
    #[serde(default)]
    pub pathloss: PathLossChoice,
    pub tier: Vec<TierSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    Density,
    Beta,
    BetaDb,
    Alpha,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::Density => "density",
            SweepVariable::Beta => "beta",
            SweepVariable::BetaDb => "beta-db",
            SweepVariable::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    /// 1-based tier index; absent means every tier.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<usize>,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_radius: Option<f64>,
}

fn default_trials() -> u64 {
    100_000
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec { trials: default_trials(), window_radius: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Defaults to the CSV path with a `.json` extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub association: AssociationChoice,
    pub network: NetworkSpec,
    pub sweep: Sweep,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_seed() -> u64 {
    1
}

fn default_tol() -> f64 {
    1e-6
}

fn default_methods() -> Vec<Method> {
    vec![Method::Analytic]
}

/// Command-line settings that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub window_radius: Option<f64>,
    pub only: Option<Method>,
    pub out: Option<PathBuf>,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub sweep_value: f64,
    pub association: Association,
    pub pathloss: PathLoss,
    pub method: Method,
    pub coverage: f64,
    /// Quadrature error estimate or 99% CI half-width.
    pub error: f64,
    pub runtime_ms: f64,
}

pub const CSV_HEADER: &str = "sweep_value,association,pathloss,method,coverage,error,runtime_ms";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    pub sweep_value: f64,
    pub analytic: Vec<AnalyticReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimBatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport {
    pub association: Association,
    pub pathloss: PathLoss,
    pub result: CoverageResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub points: Vec<PointReport>,
    #[serde(skip)]
    pub rows: Vec<Row>,
}

fn line_column(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Scenario> {
        let scenario: Scenario = toml::from_str(src).map_err(|e| {
            let (line, column) = e.span().map(|s| line_column(src, s.start)).unwrap_or((0, 0));
            ScenarioError::Parse { line, column, message: e.message().to_string() }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Scenario::parse(&src)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(t) = o.tol {
            self.tol = t;
        }
        if let Some(n) = o.trials {
            self.simulation.trials = n;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(r) = o.window_radius {
            self.simulation.window_radius = Some(r);
        }
        if let Some(m) = o.only {
            self.methods = vec![m];
        }
        if let Some(p) = &o.out {
            self.output.csv = Some(p.clone());
            self.output.manifest = None;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ScenarioError::Validation(m));
        let g = &self.sweep.grid;
        if g.is_empty() {
            return bad("sweep grid is empty".into());
        }
        if g.iter().any(|v| !v.is_finite()) {
            return bad("sweep grid contains a non-finite value".into());
        }
        if g.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sweep grid must be strictly increasing".into());
        }
        if self.network.tier.is_empty() {
            return bad("network has no tiers".into());
        }
        if let Some(t) = self.sweep.tier {
            if t == 0 || t > self.network.tier.len() {
                return bad(format!("sweep tier {t} does not exist (tiers are numbered 1..={})", self.network.tier.len()));
            }
            if self.sweep.variable == SweepVariable::Alpha {
                return bad("sweep over alpha applies to the whole network; remove `tier`".into());
            }
        }
        for (i, t) in self.network.tier.iter().enumerate() {
            if t.threshold().is_none() {
                return bad(format!("tier {}: give exactly one of `beta` and `beta_db`", i + 1));
            }
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if !(self.tol > 0.0 && self.tol < 0.1) {
            return bad(format!("tolerance must lie in (0, 0.1), got {}", self.tol));
        }
        if self.simulation.trials == 0 {
            return bad("simulation needs at least one trial".into());
        }
        if let Some(r) = self.simulation.window_radius {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("window radius must be positive, got {r}"));
            }
        }
        Ok(())
    }

    fn distributions(&self) -> Result<Vec<FoxHDistribution>> {
        self.network
            .tier
            .iter()
            .enumerate()
            .map(|(i, t)| {
                make_distribution(&t.fading).map_err(|e| ScenarioError::Validation(format!("tier {}: fading: {e}", i + 1)))
            })
            .collect()
    }

    fn network_at(&self, dists: &[FoxHDistribution], value: f64, pathloss: PathLoss) -> Result<NetworkConfig> {
        let mut alpha = self.network.alpha;
        let mut tiers: Vec<Tier> = self
            .network
            .tier
            .iter()
            .zip(dists)
            .map(|(t, d)| Tier::new(t.lambda, t.power, t.threshold().unwrap_or(f64::NAN), t.noise, d.clone()))
            .collect();
        let targets: Vec<usize> = match self.sweep.tier {
            Some(t) => vec![t - 1],
            None => (0..tiers.len()).collect(),
        };
        for &k in &targets {
            match self.sweep.variable {
                SweepVariable::Density => tiers[k].lambda = value,
                SweepVariable::Beta => tiers[k].beta = value,
                SweepVariable::BetaDb => tiers[k].beta = 10f64.powf(value / 10.0),
                SweepVariable::Alpha => alpha = value,
            }
        }
        NetworkConfig::new(tiers, alpha, pathloss).map_err(|e| {
            ScenarioError::Validation(format!("at {} = {value}: {e}", self.sweep.variable.label()))
        })
    }

    fn numerical(&self, value: f64, context: String, message: String) -> ScenarioError {
        ScenarioError::Numerical { variable: self.sweep.variable.label().into(), value, context, message }
    }

    fn run_point(&self, dists: &[FoxHDistribution], value: f64) -> Result<(PointReport, Vec<Row>)> {
        let associations = self.association.expand();
        let pathlosses = self.network.pathloss.expand();
        let mut rows = Vec::new();
        let mut analytic = Vec::new();
        let mut simulation = None;
        for &method in &self.methods {
            match method {
                Method::Analytic => {
                    for &pathloss in &pathlosses {
                        let net = self.network_at(dists, value, pathloss)?;
                        for &association in &associations {
                            let start = Instant::now();
                            let res = coverage::coverage(&net, association, self.tol).map_err(|e| {
                                let context = format!("analytic {} {}", association.label(), pathloss.label());
                                match e {
                                    CoverageError::InvalidConfig(m) => {
                                        ScenarioError::Validation(format!("at {} = {value}, {context}: {m}", self.sweep.variable.label()))
                                    }
                                    other => self.numerical(value, context, other.to_string()),
                                }
                            })?;
                            rows.push(Row {
                                sweep_value: value,
                                association,
                                pathloss,
                                method,
                                coverage: res.value,
                                error: res.abs_error_estimate,
                                runtime_ms: start.elapsed().as_secs_f64() * 1e3,
                            });
                            analytic.push(AnalyticReport { association, pathloss, result: res });
                        }
                    }
                }
                Method::Simulate => {
                    let net = self.network_at(dists, value, pathlosses[0])?;
                    let start = Instant::now();
                    let batch = sim::estimate_all(&net, self.simulation.trials, self.seed, self.simulation.window_radius)
                        .map_err(|e| match e {
                            SimError::InvalidConfig(m) => ScenarioError::Validation(m),
                            other => self.numerical(value, "simulate".into(), other.to_string()),
                        })?;
                    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                    for &pathloss in &pathlosses {
                        for &association in &associations {
                            let e = batch
                                .estimates
                                .iter()
                                .find(|e| e.pathloss == pathloss && e.association == association)
                                .expect("every combination is simulated");
                            rows.push(Row {
                                sweep_value: value,
                                association,
                                pathloss,
                                method,
                                coverage: e.coverage,
                                error: e.ci99_halfwidth,
                                runtime_ms,
                            });
                        }
                    }
                    simulation = Some(batch);
                }
            }
        }
        Ok((PointReport { sweep_value: value, analytic, simulation }, rows))
    }

    /// Evaluates every sweep point concurrently; rows come back in grid order.
    pub fn run(&self) -> Result<RunOutput> {
        self.validate()?;
        let dists = self.distributions()?;
        let results: Vec<Result<(PointReport, Vec<Row>)>> =
            self.sweep.grid.par_iter().map(|&v| self.run_point(&dists, v)).collect();
        let mut points = Vec::with_capacity(results.len());
        let mut rows = Vec::new();
        for r in results {
            let (p, rs) = r?;
            points.push(p);
            rows.extend(rs);
        }
        Ok(RunOutput { scenario: self.clone(), points, rows })
    }
}

/// CSV text for `rows`, header included. With `timing = false` the
/// runtime column is written as 0 so that reruns compare byte-for-byte.
pub fn csv_string(rows: &[Row], timing: bool) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let ms = if timing { r.runtime_ms } else { 0.0 };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.3}",
            r.sweep_value,
            r.association.label(),
            r.pathloss.label(),
            r.method.label(),
            r.coverage,
            r.error,
            ms
        );
    }
    out
}

impl RunOutput {
    pub fn manifest_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    fn io_error(p: &Path) -> impl Fn(std::io::Error) -> ScenarioError + '_ {
        move |e| ScenarioError::Io { path: p.display().to_string(), message: e.to_string() }
    }

    /// Writes the CSV and manifest to their configured paths, returning them.
    pub fn write(&self, default_csv: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv = self.scenario.output.csv.clone().unwrap_or_else(|| default_csv.to_path_buf());
        let manifest = self.scenario.output.manifest.clone().unwrap_or_else(|| csv.with_extension("json"));
        for p in [&csv, &manifest] {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(Self::io_error(dir))?;
            }
        }
        std::fs::write(&csv, csv_string(&self.rows, true)).map_err(Self::io_error(&csv))?;
        std::fs::write(&manifest, self.manifest_json()).map_err(Self::io_error(&manifest))?;
        Ok((csv, manifest))
    }
}
