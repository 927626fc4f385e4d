//! Convergence-study driver behind the `lsfem` binary.

mod csv;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::adapt::{adaptive_loop, AdaptConfig};
use crate::assembly::{assemble, solve_ls, Formulation};
use crate::error::{Error, Result};
use crate::estimate::{error_norms, ErrorReport};
use crate::linalg::{SolverConfig, SolverKind};
use crate::mesh::Mesh;
use crate::problems::{BenchmarkName, BenchmarkProblem};

pub use csv::{parse_csv, write_csv, CSV_HEADER};
pub use svg::write_svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Uniform,
    Adaptive,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Uniform => "uniform",
            Self::Adaptive => "adaptive",
        }
    }

    pub fn default_window(self) -> usize {
        match self {
            Self::Uniform => 3,
            Self::Adaptive => 5,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "adaptive" => Ok(Self::Adaptive),
            _ => Err(Error::UnknownName {
                kind: "mode",
                name: s.to_string(),
            }),
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "direct" => Ok(Self::Direct),
            "cg" => Ok(Self::Cg),
            _ => Err(Error::UnknownName {
                kind: "solver",
                name: s.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub benchmark: BenchmarkName,
    pub formulation: Formulation,
    pub degree: usize,
    pub mode: Mode,
    /// uniform: number of meshes (level 0 is the initial mesh);
    /// adaptive: maximum number of solve–refine cycles
    pub levels: usize,
    pub theta: f64,
    pub max_dofs: usize,
    pub solver: SolverConfig,
    /// levels used per fitted rate; defaults by mode
    pub rate_window: Option<usize>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            benchmark: BenchmarkName::SmoothA1,
            formulation: Formulation::Weighted,
            degree: 2,
            mode: Mode::Uniform,
            levels: 6,
            theta: 0.5,
            max_dofs: 150_000,
            solver: SolverConfig::default(),
            rate_window: None,
            out_csv: None,
            out_svg: None,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.formulation.check_degree(self.degree)?;
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(self.solver.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.solver.tol)));
        }
        if self.rate_window.is_some_and(|w| w < 2) {
            return Err(Error::Config("rate window must cover at least 2 levels".into()));
        }
        Ok(())
    }

    pub fn window(&self) -> usize {
        self.rate_window.unwrap_or(self.mode.default_window())
    }
}

/// Optional overrides read from a TOML file. Keys mirror the long flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub benchmark: Option<String>,
    pub formulation: Option<String>,
    pub degree: Option<usize>,
    pub mode: Option<String>,
    pub levels: Option<usize>,
    pub theta: Option<f64>,
    pub tol: Option<f64>,
    pub max_dofs: Option<usize>,
    pub solver: Option<String>,
    pub rate_window: Option<usize>,
    pub out_csv: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn apply(&self, c: &mut RunConfig) -> Result<()> {
        if let Some(v) = &self.benchmark {
            c.benchmark = v.parse()?;
        }
        if let Some(v) = &self.formulation {
            c.formulation = v.parse()?;
        }
        if let Some(v) = &self.mode {
            c.mode = v.parse()?;
        }
        if let Some(v) = &self.solver {
            c.solver.kind = v.parse()?;
        }
        c.degree = self.degree.unwrap_or(c.degree);
        c.levels = self.levels.unwrap_or(c.levels);
        c.theta = self.theta.unwrap_or(c.theta);
        c.solver.tol = self.tol.unwrap_or(c.solver.tol);
        c.max_dofs = self.max_dofs.unwrap_or(c.max_dofs);
        c.rate_window = self.rate_window.or(c.rate_window);
        c.out_csv = self.out_csv.clone().or(c.out_csv.take());
        c.out_svg = self.out_svg.clone().or(c.out_svg.take());
        c.seed = self.seed.unwrap_or(c.seed);
        Ok(())
    }
}

/// Norms in CSV column order.
pub const NORM_NAMES: [&str; 6] = ["ls", "l2u", "h1u", "l2sigma", "wbh2A", "wbh2"];

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub errors: ErrorReport,
    /// fitted rates in `NORM_NAMES` order; None where undefined
    pub rates: [Option<f64>; 6],
}

impl ReportRow {
    pub fn norms(&self) -> [Option<f64>; 6] {
        norms_of(&self.errors)
    }
}

fn norms_of(e: &ErrorReport) -> [Option<f64>; 6] {
    [Some(e.ls), Some(e.l2_u), Some(e.h1_u), Some(e.l2_sigma), e.wbh2_a, e.wbh2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: Mode,
    pub rows: Vec<ReportRow>,
}

impl RunReport {
    pub fn from_errors(mode: Mode, errors: Vec<ErrorReport>, window: usize) -> Self {
        let mut rows: Vec<ReportRow> = Vec::with_capacity(errors.len());
        for i in 0..errors.len() {
            let lo = (i + 1).saturating_sub(window);
            let span = &errors[lo..=i];
            let scale: Vec<f64> = match mode {
                Mode::Uniform => span.iter().map(|e| e.h_max).collect(),
                Mode::Adaptive => span.iter().map(|e| e.dofs as f64).collect(),
            };
            let rates = std::array::from_fn(|n| {
                let values: Option<Vec<f64>> = span.iter().map(|e| norms_of(e)[n]).collect();
                values.and_then(|v| fit_rate(&v, &scale, mode).ok())
            });
            rows.push(ReportRow {
                errors: errors[i].clone(),
                rates,
            });
        }
        Self { mode, rows }
    }
}

/// Convergence rate of `values` against `scale` (mesh size for uniform
/// studies, unknown count for adaptive ones), reported positive for
/// decreasing errors.
pub fn fit_rate(values: &[f64], scale: &[f64], mode: Mode) -> Result<f64> {
    if values.len() < 2 || values.len() != scale.len() {
        return Err(Error::RateInput);
    }
    if values.iter().chain(scale).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::RateInput);
    }
    match mode {
        Mode::Uniform => {
            let mut sum = 0.0;
            for i in 1..values.len() {
                let dh = (scale[i - 1] / scale[i]).ln();
                if dh == 0.0 {
                    return Err(Error::RateInput);
                }
                sum += (values[i - 1] / values[i]).ln() / dh;
            }
            Ok(sum / (values.len() - 1) as f64)
        }
        Mode::Adaptive => {
            let n = values.len() as f64;
            let xs: Vec<f64> = scale.iter().map(|v| v.ln()).collect();
            let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            if sxx == 0.0 {
                return Err(Error::RateInput);
            }
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            Ok(-sxy / sxx)
        }
    }
}

/// Per-level error reports of a uniform study on levels `0..levels`.
pub fn uniform_study(
    problem: &BenchmarkProblem,
    formulation: Formulation,
    degree: usize,
    levels: usize,
    solver: &SolverConfig,
) -> Result<Vec<ErrorReport>> {
    formulation.check_degree(degree)?;
    let mut mesh = Mesh::initial(problem.domain);
    let mut out = Vec::with_capacity(levels);
    for level in 0..levels {
        let system = assemble(&mesh, problem, formulation, degree)?;
        let (sol, _) = solve_ls(&system, solver)?;
        let mut r = error_norms(&mesh, problem, &system.spaces, &sol)?;
        r.level = level;
        r.ls_sq = Vec::new();
        out.push(r);
        if level + 1 < levels {
            mesh = mesh.uniform_refine();
        }
    }
    Ok(out)
}

/// Executes a study and writes the requested files. Nothing is written when
/// the configuration is invalid or the study fails.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let problem = BenchmarkProblem::catalog(config.benchmark);
    let errors = match config.mode {
        Mode::Uniform => uniform_study(&problem, config.formulation, config.degree, config.levels, &config.solver)?,
        Mode::Adaptive => {
            let cfg = AdaptConfig {
                theta: config.theta,
                max_levels: config.levels,
                max_dofs: config.max_dofs,
                solver: config.solver,
                ..AdaptConfig::default()
            };
            let mut reports = adaptive_loop(&problem, config.formulation, config.degree, &cfg)?.reports;
            for r in &mut reports {
                r.ls_sq = Vec::new();
            }
            reports
        }
    };
    let report = RunReport::from_errors(config.mode, errors, config.window());
    if let Some(path) = &config.out_csv {
        std::fs::write(path, write_csv(&report))?;
    }
    if let Some(path) = &config.out_svg {
        let title = format!(
            "{} {} k={} {}",
            config.benchmark, config.formulation, config.degree, config.mode
        );
        std::fs::write(path, write_svg(&report, &title))?;
    }
    Ok(report)
}
