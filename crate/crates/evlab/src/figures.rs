//! Datasets behind each figure: parameter means and spreads against
//! `p = −log10 ε`, one table per map variant.

use std::fmt;
use std::str::FromStr;

use evlab_core::dynamics::GOLDEN_MEAN;
use serde::Serialize;
use serde_json::Value;

use crate::config::{quadratic_fixed_point, Coupling, ExperimentConfig, MapConfig, Normalization, ObservableConfig, TargetConfig};
use crate::error::{Error, Result};
use crate::experiments::{ei_report, run_report};
use crate::output::ResultRow;

/// Pomeau–Manneville exponents: ten uniform midpoints of `(0, 1)`.
pub const PM_ALPHAS: [f64; 10] = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95];
/// Cusp map parameters, five uniform values near 1.
pub const CUSP_AS: [f64; 5] = [0.95, 0.96, 0.97, 0.98, 0.99];
pub const QUADRATIC_AS: [f64; 2] = [0.014, 0.314];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureName {
    #[serde(rename = "rot")]
    Rot,
    #[serde(rename = "ber")]
    Ber,
    #[serde(rename = "ei")]
    Ei,
    #[serde(rename = "PM")]
    Pm,
    #[serde(rename = "lor")]
    Lor,
    #[serde(rename = "cat")]
    Cat,
    #[serde(rename = "henon")]
    Henon,
}

impl FigureName {
    pub const ALL: [FigureName; 7] = [Self::Rot, Self::Ber, Self::Ei, Self::Pm, Self::Lor, Self::Cat, Self::Henon];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rot => "rot",
            Self::Ber => "ber",
            Self::Ei => "ei",
            Self::Pm => "PM",
            Self::Lor => "lor",
            Self::Cat => "cat",
            Self::Henon => "henon",
        }
    }
}

impl fmt::Display for FigureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureName {
    type Err = Error;

    /// Case-insensitive, so `pm` and `PM` both work.
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Desk,
    Full,
}

impl Scale {
    /// `(realizations, m, n)`.
    pub fn sizes(self) -> (usize, usize, usize) {
        match self {
            Scale::Desk => (50, 200, 1000),
            Scale::Full => (500, 1000, 1000),
        }
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "desk" => Ok(Scale::Desk),
            "full" => Ok(Scale::Full),
            _ => Err(Error::Input(format!("unknown scale `{s}` (expected desk or full)"))),
        }
    }
}

/// `10^-1 … 10^-8`, then the deterministic map.
pub fn noise_grid() -> Vec<f64> {
    let mut eps: Vec<f64> = (1..=8).map(|p| 10f64.powi(-p)).collect();
    eps.push(0.0);
    eps
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Ensemble(ExperimentConfig),
    ExtremalIndex(ExperimentConfig),
}

impl Job {
    pub fn config(&self) -> &ExperimentConfig {
        match self {
            Job::Ensemble(c) | Job::ExtremalIndex(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureTable {
    pub label: String,
    pub rows: Vec<ResultRow>,
    pub aborted: bool,
    /// The full report the rows were read from.
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureDataset {
    pub name: FigureName,
    pub scale: Scale,
    pub seed: u64,
    pub tables: Vec<FigureTable>,
}

impl FigureDataset {
    pub fn any_aborted(&self) -> bool {
        self.tables.iter().any(|t| t.aborted)
    }
}

/// The labelled experiments making up a figure.
pub fn figure_jobs(name: FigureName, scale: Scale, seed: u64) -> Vec<(String, Job)> {
    let (r, m, n) = scale.sizes();
    let grid = noise_grid();
    let ensemble = |map: MapConfig| ExperimentConfig::new(map, grid.clone(), m, n, seed).with_realizations(r);
    let g1_only = |cfg: ExperimentConfig| cfg.with_observables(vec![ObservableConfig::G1]);
    match name {
        FigureName::Rot => {
            let map = MapConfig::Rotation { alpha: GOLDEN_MEAN };
            let mut jobs = vec![("rotation".to_string(), Job::Ensemble(ensemble(map)))];
            if scale == Scale::Full {
                let long = ExperimentConfig::new(map, grid.clone(), 1000, 10_000, seed).with_realizations(r);
                jobs.push(("rotation_n1e4".into(), Job::Ensemble(long)));
            }
            jobs
        }
        FigureName::Ber => vec![("ternary".into(), Job::Ensemble(ensemble(MapConfig::Ternary)))],
        FigureName::Ei => {
            let (m_ei, n_ei) = (1000, 1000);
            let ternary = ExperimentConfig::new(MapConfig::Ternary, grid.clone(), m_ei, n_ei, seed)
                .with_realizations(r)
                .with_target(TargetConfig::Periodic { z: vec![0.5], period: 1 });
            let mut jobs = vec![("ternary_z0.5".to_string(), Job::ExtremalIndex(ternary))];
            for a in QUADRATIC_AS {
                // the deterministic orbit lands on the target, so only noisy levels
                let cfg = ExperimentConfig::new(MapConfig::Quadratic { a }, grid[..8].to_vec(), m_ei, n_ei, seed)
                    .with_realizations(r)
                    .with_target(TargetConfig::Periodic { z: vec![quadratic_fixed_point(a)], period: 1 })
                    .with_normalization(Normalization::TwoNOverEps);
                jobs.push((format!("quadratic_a{a}"), Job::ExtremalIndex(cfg)));
            }
            jobs
        }
        FigureName::Pm => PM_ALPHAS
            .iter()
            .map(|&alpha| {
                (format!("pm_alpha{alpha}"), Job::Ensemble(g1_only(ensemble(MapConfig::PomeauManneville { alpha }))))
            })
            .collect(),
        FigureName::Lor => CUSP_AS
            .iter()
            .map(|&a| (format!("cusp_a{a}"), Job::Ensemble(g1_only(ensemble(MapConfig::CuspLorenz { a })))))
            .collect(),
        FigureName::Cat => {
            vec![("cat".into(), Job::Ensemble(ensemble(MapConfig::ArnoldCat { coupling: Coupling::Shared })))]
        }
        FigureName::Henon => {
            vec![("henon".into(), Job::Ensemble(g1_only(ensemble(MapConfig::Henon { a: 1.4, b: 0.3 }))))]
        }
    }
}

/// Runs every job of a figure. A table in which nothing completed is kept
/// and marked aborted.
pub fn figure_dataset(name: FigureName, scale: Scale, seed: u64) -> Result<FigureDataset> {
    let tables = figure_jobs(name, scale, seed)
        .into_iter()
        .map(|(label, job)| run_job(label, &job))
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureDataset { name, scale, seed, tables })
}

pub fn run_job(label: String, job: &Job) -> Result<FigureTable> {
    Ok(match job {
        Job::Ensemble(cfg) => {
            let report = run_report(cfg)?;
            FigureTable {
                label,
                rows: report.rows(),
                aborted: report.any_aborted(),
                details: serde_json::to_value(&report).expect("report serializes"),
            }
        }
        Job::ExtremalIndex(cfg) => {
            let report = ei_report(cfg)?;
            FigureTable {
                label,
                rows: report.rows(),
                aborted: report.any_aborted(),
                details: serde_json::to_value(&report).expect("report serializes"),
            }
        }
    })
}
