//! Experiment configuration: a flat `key = value` text format with
//! line-numbered rejection, full defaulting, and a lossless serialized echo
//! for run manifests.
//!
//! Arrays use brackets (`k = [1.0, 0.5]`), comments start with `#`, grids use
//! the `a:b:n` form. CLI flags override file values field by field.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diffusion::StepperConfig;
use crate::error::{Error, Result};
use crate::jumps::Method;
use crate::linalg;
use crate::ops::Model;
use crate::oracle::Rank1Params;
use crate::rootsys::{Family, MultiplicityFunction, Normalization, RootSystem};

/// The experiment selected by a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    RootsysInfo,
    OracleEval,
    SimulateRadial,
    SimulateFull,
    Couple,
    Equivalence,
    Hw,
    Martingale,
    Theorem1,
    Basis,
    Lln,
}

impl FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rootsys_info" | "rootsys-info" => Experiment::RootsysInfo,
            "oracle_eval" | "oracle-eval" | "oracle" => Experiment::OracleEval,
            "simulate_radial" | "radial" => Experiment::SimulateRadial,
            "simulate_full" | "full" => Experiment::SimulateFull,
            "couple" => Experiment::Couple,
            "equivalence" => Experiment::Equivalence,
            "hw" => Experiment::Hw,
            "martingale" => Experiment::Martingale,
            "theorem1" => Experiment::Theorem1,
            "basis" => Experiment::Basis,
            "lln" => Experiment::Lln,
            other => {
                return Err(Error::Config {
                    line: 0,
                    msg: format!("unknown experiment '{other}'"),
                })
            }
        })
    }
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::RootsysInfo => "rootsys_info",
            Experiment::OracleEval => "oracle_eval",
            Experiment::SimulateRadial => "simulate_radial",
            Experiment::SimulateFull => "simulate_full",
            Experiment::Couple => "couple",
            Experiment::Equivalence => "equivalence",
            Experiment::Hw => "hw",
            Experiment::Martingale => "martingale",
            Experiment::Theorem1 => "theorem1",
            Experiment::Basis => "basis",
            Experiment::Lln => "lln",
        }
    }
}

/// Uniform grid specification `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config { line: 0, msg: format!("grid '{s}' is not start:stop:count") });
        }
        let start = parts[0]
            .parse()
            .map_err(|_| Error::Config { line: 0, msg: format!("bad grid start '{}'", parts[0]) })?;
        let stop = parts[1]
            .parse()
            .map_err(|_| Error::Config { line: 0, msg: format!("bad grid stop '{}'", parts[1]) })?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Error::Config { line: 0, msg: format!("bad grid count '{}'", parts[2]) })?;
        if count == 0 {
            return Err(Error::Config { line: 0, msg: "grid count must be positive".into() });
        }
        Ok(GridSpec { start, stop, count })
    }
}

/// Complete run configuration. Every field is materialized (no hidden
/// defaults) before the manifest echo is written.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub family: Family,
    pub rank: usize,
    pub normalization: Normalization,
    /// Multiplicity values per Weyl orbit, in the system's orbit order.
    pub k: Vec<f64>,
    pub x0: Option<Vec<f64>>,
    pub y0: Option<Vec<f64>>,
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub lambda: f64,
    pub grid: Option<GridSpec>,
    /// Basis-change grid points (both chambers).
    pub basis_grid: Vec<f64>,
    pub order: Option<Vec<usize>>,
    pub method: Method,
    /// Evaluation times for the martingale experiment.
    pub t_eval: Vec<f64>,
    /// Thread budget; 0 keeps the global default pool.
    pub threads: usize,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: Experiment::RootsysInfo,
            family: Family::Rank1,
            rank: 1,
            normalization: Normalization::Standard,
            k: vec![1.0],
            x0: None,
            y0: None,
            dt: 1e-2,
            horizon: 100.0,
            paths: 1000,
            seed: 0,
            lambda: 0.0,
            grid: None,
            basis_grid: vec![-4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0],
            order: None,
            method: Method::Thinning,
            t_eval: vec![5.0, 20.0],
            threads: 0,
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Build the model this config describes (validates family/rank/k).
    pub fn build_model(&self) -> Result<Model> {
        let system = RootSystem::build(self.family, self.rank, self.normalization)?;
        let k = MultiplicityFunction::new(&system, self.k.clone())?;
        Model::new(system, k)
    }

    pub fn stepper(&self) -> StepperConfig {
        StepperConfig {
            dt_max: self.dt,
            t_horizon: self.horizon,
            seed: self.seed,
            ..Default::default()
        }
    }

    /// Default interior start: 2ρ/|ρ| scaled into the chamber, or the
    /// configured x0.
    pub fn start_point(&self, m: &Model) -> Result<Vec<f64>> {
        match &self.x0 {
            Some(x) => Ok(x.clone()),
            None => {
                let r = linalg::norm(&m.rho);
                Ok(m.rho.iter().map(|v| 2.0 * v / r).collect())
            }
        }
    }

    pub fn second_point(&self, m: &Model) -> Result<Vec<f64>> {
        match &self.y0 {
            Some(y) => Ok(y.clone()),
            None => {
                let r = linalg::norm(&m.rho);
                Ok(m.rho.iter().map(|v| 4.0 * v / r).collect())
            }
        }
    }

    pub fn rank1_params(&self) -> Result<Rank1Params> {
        if self.family != Family::Rank1 {
            return Err(Error::Config {
                line: 0,
                msg: format!("experiment requires the rank1 family, got {}", self.family),
            });
        }
        let alpha = match self.normalization {
            Normalization::Standard => 2.0,
            Normalization::ShortRootSq2 => 2.0f64.sqrt(),
            Normalization::Scaled(c) => 2.0 * c,
        };
        Rank1Params::new(alpha, self.k[0])
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(v) = self.k.iter().find(|&&v| !(v >= 0.5)) {
            return Err(Error::Config {
                line: 0,
                msg: format!("multiplicity {v} violates the standing hypothesis k >= 1/2"),
            });
        }
        if !(self.dt > 0.0 && self.horizon > 0.0) {
            return Err(Error::Config { line: 0, msg: "dt and horizon must be positive".into() });
        }
        if self.paths == 0 {
            return Err(Error::Config { line: 0, msg: "paths must be positive".into() });
        }
        Ok(())
    }
}

fn parse_f64(v: &str, line: usize) -> Result<f64> {
    v.parse().map_err(|_| Error::Config { line, msg: format!("expected a number, got '{v}'") })
}

fn parse_usize(v: &str, line: usize) -> Result<usize> {
    v.parse().map_err(|_| Error::Config { line, msg: format!("expected an integer, got '{v}'") })
}

fn parse_array(v: &str, line: usize) -> Result<Vec<f64>> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Config { line, msg: format!("expected [a, b, ...], got '{v}'") })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|s| parse_f64(s.trim(), line)).collect()
}

fn parse_usize_array(v: &str, line: usize) -> Result<Vec<usize>> {
    let inner = v
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Config { line, msg: format!("expected [a, b, ...], got '{v}'") })?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|s| parse_usize(s.trim(), line)).collect()
}

/// Parse the flat text format. Rejects on the first error with its line
/// number; unknown keys are errors (typos must not be silently defaulted).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut k_set = false;
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if let Some(prev) = seen.get(key) {
            return Err(Error::Config {
                line: line_no,
                msg: format!("duplicate key '{key}' (first set on line {prev})"),
            });
        }
        match key {
            "experiment" => {
                cfg.experiment = value.parse().map_err(|e| at_line(e, line_no))?;
            }
            "family" => cfg.family = value.parse().map_err(|e| at_line(e, line_no))?,
            "rank" => cfg.rank = parse_usize(value, line_no)?,
            "normalization" => {
                cfg.normalization = value.parse().map_err(|e| at_line(e, line_no))?
            }
            "k" => {
                cfg.k = parse_array(value, line_no)?;
                k_set = true;
                if let Some(v) = cfg.k.iter().find(|&&v| !(v >= 0.5)) {
                    return Err(Error::Config {
                        line: line_no,
                        msg: format!(
                            "multiplicity {v} violates the standing hypothesis k >= 1/2"
                        ),
                    });
                }
            }
            "x0" => cfg.x0 = Some(parse_array(value, line_no)?),
            "y0" => cfg.y0 = Some(parse_array(value, line_no)?),
            "dt" => cfg.dt = parse_f64(value, line_no)?,
            "horizon" => cfg.horizon = parse_f64(value, line_no)?,
            "paths" => cfg.paths = parse_usize(value, line_no)?,
            "seed" => {
                cfg.seed = value.parse().map_err(|_| Error::Config {
                    line: line_no,
                    msg: format!("expected an integer seed, got '{value}'"),
                })?
            }
            "lambda" => cfg.lambda = parse_f64(value, line_no)?,
            "grid" => cfg.grid = Some(value.parse().map_err(|e| at_line(e, line_no))?),
            "basis_grid" => cfg.basis_grid = parse_array(value, line_no)?,
            "order" => cfg.order = Some(parse_usize_array(value, line_no)?),
            "method" => cfg.method = value.parse().map_err(|e| at_line(e, line_no))?,
            "t_eval" => cfg.t_eval = parse_array(value, line_no)?,
            "threads" => cfg.threads = parse_usize(value, line_no)?,
            "out" => cfg.out = PathBuf::from(value),
            other => {
                return Err(Error::Config { line: line_no, msg: format!("unknown key '{other}'") })
            }
        }
        seen.insert(key.to_string(), line_no);
    }
    // Default k to the right orbit count for the configured system.
    if !k_set {
        let system = RootSystem::build(cfg.family, cfg.rank, cfg.normalization)?;
        cfg.k = vec![1.0; system.n_orbits()];
    }
    cfg.validate()?;
    Ok(cfg)
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Config { msg, .. } => Error::Config { line, msg },
        Error::InvalidSystem(msg) | Error::InvalidStart(msg) => Error::Config { line, msg },
        other => Error::Config { line, msg: other.to_string() },
    }
}
