//! The acceptance checks, runnable from the command line and from the test
//! suite. Each check writes its tables into the output directory; nothing
//! written depends on timing, so two runs with one seed match byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use evlab_core::dynamics::{State, GOLDEN_MEAN};
use evlab_core::evt::{fit_gev_mle, ks_statistic, BlockMaximaSeries, GevParams, GUMBEL_SWITCH};
use evlab_core::observables::{normalizing_constants, Family, MeasureModel, Observable};
use evlab_core::rng::{stream_id, NoiseRng};
use evlab_core::dynamics::Space;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{quadratic_fixed_point, Coupling, ExperimentConfig, MapConfig, Normalization, ObservableConfig, TargetConfig};
use crate::error::Result;
use crate::experiments::{ei_report, run_report, visit_realization, workers, EnsembleReport};
use crate::lemma::{lemma_csv, verify_lemma, violations};
use crate::oracle::{BoxCounter, DEFAULT_BOX_LEVELS};
use crate::output::{sha256_hex, to_json_text, OutputDir, ResultRow, RunManifest};

pub const DEFAULT_SELFTEST_SEED: u64 = 1;

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "correlation bound on the lemma grid"),
    (2, "ternary shift at a generic point"),
    (3, "extremal index dichotomy"),
    (4, "rotation transition"),
    (5, "Arnold cat map"),
    (6, "quadratic map extremal index normalization"),
    (7, "Pomeau-Manneville contrast"),
    (8, "Henon local dimension"),
    (9, "statistical core"),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub checks: Vec<Check>,
}

/// One comparison inside a criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub expected: String,
    pub pass: bool,
}

#[derive(Default)]
struct Checks {
    checks: Vec<Check>,
    tables: Vec<(String, Vec<ResultRow>, Value)>,
    files: Vec<(String, String)>,
}

impl Checks {
    fn near(&mut self, label: impl Into<String>, value: f64, center: f64, tol: f64) {
        let pass = (value - center).abs() <= tol;
        self.checks.push(Check { label: label.into(), value, expected: format!("{center:.4} +/- {tol}"), pass });
    }

    fn at_least(&mut self, label: impl Into<String>, value: f64, min: f64) {
        self.checks.push(Check { label: label.into(), value, expected: format!(">= {min}"), pass: value >= min });
    }

    fn below(&mut self, label: impl Into<String>, value: f64, max: f64) {
        self.checks.push(Check { label: label.into(), value, expected: format!("< {max:e}"), pass: value < max });
    }

    fn flag(&mut self, label: impl Into<String>, value: bool, expected: bool) {
        self.checks.push(Check {
            label: label.into(),
            value: if value { 1.0 } else { 0.0 },
            expected: expected.to_string(),
            pass: value == expected,
        });
    }

    fn table(&mut self, stem: impl Into<String>, report: &EnsembleReport) {
        self.tables.push((stem.into(), report.rows(), serde_json::to_value(report).expect("report serializes")));
    }
}

/// Runs criterion `id` (1 to 9). Errors inside a check become a failed
/// outcome, never a panic.
pub fn run_criterion(id: u32, seed: u64) -> (CriterionOutcome, Vec<(String, Vec<ResultRow>, Value)>, Vec<(String, String)>) {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown").to_string();
    let mut c = Checks::default();
    let result = match id {
        1 => lemma(&mut c),
        2 => ternary(&mut c, seed),
        3 => extremal_index(&mut c, seed),
        4 => rotation(&mut c, seed),
        5 => cat(&mut c, seed),
        6 => quadratic(&mut c, seed),
        7 => pomeau_manneville(&mut c, seed),
        8 => henon(&mut c, seed),
        9 => statistical_core(&mut c, seed),
        _ => Err(crate::Error::Input(format!("no criterion {id}"))),
    };
    let mut detail = String::new();
    let pass = match result {
        Ok(()) => {
            for ch in &c.checks {
                let mark = if ch.pass { "" } else { " FAIL" };
                let _ = write!(detail, "{}{}={:.4} ({}){mark}", if detail.is_empty() { "" } else { "; " }, ch.label, ch.value, ch.expected);
            }
            !c.checks.is_empty() && c.checks.iter().all(|ch| ch.pass)
        }
        Err(e) => {
            detail = format!("error: {e}");
            false
        }
    };
    (CriterionOutcome { id, name, pass, detail, checks: c.checks }, c.tables, c.files)
}

/// Runs criteria 1 to 9, writes their tables plus `selftest.csv`,
/// `selftest.json` and `manifest.json` under `out`, and hands each outcome to
/// `progress` as it completes.
pub fn run_selftest(seed: u64, out: &Path, mut progress: impl FnMut(&CriterionOutcome)) -> Result<Vec<CriterionOutcome>> {
    let manifest = RunManifest::new(sha256_hex(format!("selftest seed={seed}").as_bytes()), seed);
    let mut dir = OutputDir::create(out, manifest)?;
    let mut outcomes = Vec::new();
    for (id, _) in CRITERIA {
        let (outcome, tables, files) = run_criterion(id, seed);
        for (stem, rows, details) in tables {
            dir.write_rows(&format!("c{id}_{stem}"), &rows, details)?;
        }
        for (name, text) in files {
            dir.write(&format!("c{id}_{name}"), text.as_bytes())?;
        }
        progress(&outcome);
        outcomes.push(outcome);
    }
    let mut csv = String::from("id,name,pass\n");
    for o in &outcomes {
        let _ = writeln!(csv, "{},{},{}", o.id, o.name, o.pass);
    }
    dir.write("selftest.csv", csv.as_bytes())?;
    let doc = json!({ "manifest": dir.manifest().header_json(), "criteria": outcomes });
    dir.write("selftest.json", to_json_text(&doc).as_bytes())?;
    dir.finish()?;
    Ok(outcomes)
}

fn desk(map: MapConfig, eps: Vec<f64>, seed: u64) -> ExperimentConfig {
    ExperimentConfig::new(map, eps, 200, 1000, seed)
}

fn lemma(c: &mut Checks) -> Result<()> {
    let rows = verify_lemma(&[0.1, 0.3, 0.5, 0.7], 5, 200)?;
    c.files.push(("lemma.csv".into(), lemma_csv(&rows)));
    c.at_least("valid rows", rows.iter().filter(|r| r.valid).count() as f64, 1.0);
    c.below("violations", violations(&rows) as f64, 0.5);
    Ok(())
}

fn ternary(c: &mut Checks, seed: u64) -> Result<()> {
    let report = run_report(&desk(MapConfig::Ternary, vec![1e-3], seed))?;
    let p = &report.points[0];
    let third = 1.0 / 3.0;
    for (label, param, center, tol) in
        [("g1", "kappa", 0.0, 0.05), ("g1", "sigma", 1.0, 0.07), ("g2", "kappa", third, 0.05), ("g3", "kappa", -third, 0.05)]
    {
        let s = p.observable(label).expect("default observable");
        let m = if param == "kappa" { s.kappa } else { s.sigma };
        c.near(format!("{param}({label})"), m.mean, center, tol);
    }
    for s in &p.observables {
        c.at_least(format!("ks_pass({})", s.observable), s.ks_pass_fraction, 0.7);
    }
    c.table("ternary", &report);
    Ok(())
}

fn extremal_index(c: &mut Checks, seed: u64) -> Result<()> {
    let cfg = ExperimentConfig::new(MapConfig::Ternary, vec![0.0, 0.1], 1000, 1000, seed)
        .with_target(TargetConfig::Periodic { z: vec![0.5], period: 1 });
    let report = ei_report(&cfg)?;
    c.near("theta(eps=0)", report.points[0].theta.mean, 2.0 / 3.0, 0.06);
    c.near("theta(eps=0.1)", report.points[1].theta.mean, 1.0, 0.07);
    c.tables.push(("ei".into(), report.rows(), serde_json::to_value(&report).expect("report serializes")));
    Ok(())
}

fn rotation(c: &mut Checks, seed: u64) -> Result<()> {
    let map = MapConfig::Rotation { alpha: GOLDEN_MEAN };
    let g1 = vec![ObservableConfig::G1];
    let det = run_report(&ExperimentConfig::new(map, vec![0.0], 1000, 1000, seed).with_observables(g1.clone()))?;
    let s = det.points[0].observable("g1").expect("g1");
    c.flag("reliable(eps=0)", s.reliable, false);
    let noisy = run_report(&desk(map, vec![1e-2], seed).with_observables(g1))?;
    let s = noisy.points[0].observable("g1").expect("g1");
    c.flag("reliable(eps=1e-2)", s.reliable, true);
    c.near("kappa(g1, eps=1e-2)", s.kappa.mean, 0.0, 0.08);
    c.table("rotation_eps0", &det);
    c.table("rotation_eps1e-2", &noisy);
    Ok(())
}

fn cat(c: &mut Checks, seed: u64) -> Result<()> {
    let cfg = desk(MapConfig::ArnoldCat { coupling: Coupling::Shared }, vec![0.0, 1e-3], seed)
        .with_observables(vec![ObservableConfig::G1, ObservableConfig::G2 { a: 1.0 }]);
    let report = run_report(&cfg)?;
    for p in &report.points {
        let g1 = p.observable("g1").expect("g1");
        let g2 = p.observable("g2").expect("g2");
        c.near(format!("sigma(g1, eps={})", p.epsilon), g1.sigma.mean, 0.5, 0.05);
        c.near(format!("kappa(g2, eps={})", p.epsilon), g2.kappa.mean, 0.5, 0.07);
    }
    c.table("cat", &report);
    Ok(())
}

fn quadratic(c: &mut Checks, seed: u64) -> Result<()> {
    let a = 0.314;
    let cfg = ExperimentConfig::new(MapConfig::Quadratic { a }, vec![1e-4, 1e-3, 1e-2], 1000, 1000, seed)
        .with_target(TargetConfig::Periodic { z: vec![quadratic_fixed_point(a)], period: 1 })
        .with_normalization(Normalization::TwoNOverEps);
    let report = ei_report(&cfg)?;
    for p in &report.points {
        c.near(format!("theta(eps={})", p.epsilon), p.theta.mean, 1.0, 0.1);
    }
    c.tables.push(("quadratic".into(), report.rows(), serde_json::to_value(&report).expect("report serializes")));
    Ok(())
}

fn pomeau_manneville(c: &mut Checks, seed: u64) -> Result<()> {
    let g1 = vec![ObservableConfig::G1];
    let mild = run_report(&desk(MapConfig::PomeauManneville { alpha: 0.3 }, vec![1e-3], seed).with_observables(g1.clone()))?;
    let s = mild.points[0].observable("g1").expect("g1");
    c.flag("reliable(alpha=0.3, eps=1e-3)", s.reliable, true);
    c.near("sigma(g1, alpha=0.3)", s.sigma.mean, 1.0, 0.1);
    let eps = vec![1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 0.0];
    let strong = run_report(&desk(MapConfig::PomeauManneville { alpha: 0.9 }, eps, seed).with_observables(g1))?;
    for p in &strong.points {
        let s = p.observable("g1").expect("g1");
        c.flag(format!("reliable(alpha=0.9, eps={})", p.epsilon), s.reliable, false);
    }
    c.table("pm_alpha0.3", &mild);
    c.table("pm_alpha0.9", &strong);
    Ok(())
}

fn henon(c: &mut Checks, seed: u64) -> Result<()> {
    let map = MapConfig::Henon { a: 1.4, b: 0.3 };
    let cfg = desk(map, vec![0.0], seed).with_observables(vec![ObservableConfig::G1]);
    let report = run_report(&cfg)?;
    let s = report.points[0].observable("g1").expect("g1");
    let local = s.local_dimension.map(|m| m.mean).unwrap_or(f64::NAN);

    let mut counter = BoxCounter::dyadic(DEFAULT_BOX_LEVELS)?;
    for i in 0..cfg.realizations {
        // realizations that failed in the ensemble are skipped here too
        let _ = visit_realization(&cfg, 0.0, i, &mut |st: &State| counter.push(st.coords.as_array()));
    }
    let boxes = counter.finish()?;
    c.near("mean 1/sigma(g1) - box dimension", local - boxes.dimension, 0.0, 0.1);

    let noisy = run_report(&desk(map, vec![0.1], seed).with_observables(vec![ObservableConfig::G1]))?;
    let p = &noisy.points[0];
    c.at_least("escape_count(eps=0.1)", p.escape_count as f64, 1.0);
    c.flag("reliable(eps=0.1)", p.observables.iter().any(|s| s.reliable), false);
    c.tables.push((
        "henon_eps0".into(),
        report.rows(),
        json!({ "report": report, "local_dimension": local, "box_counting": boxes }),
    ));
    c.table("henon_eps0.1", &noisy);
    Ok(())
}

const C9: u64 = 9;

fn statistical_core(c: &mut Checks, seed: u64) -> Result<()> {
    let draws = 10_000;

    let mut rng = NoiseRng::new(seed, stream_id(&[C9, 1]));
    let gumbel: Vec<f64> = (0..draws).map(|_| -(-rng.uniform_open().ln()).ln()).collect();
    let fit = fit_gev_mle(&BlockMaximaSeries::new(gumbel.clone(), 1)?)?;
    c.near("gumbel kappa", fit.kappa(), 0.0, 0.05);
    c.near("gumbel sigma", fit.sigma(), 1.0, 0.05);
    c.near("gumbel nu", fit.nu(), 0.0, 0.05);

    let mut rng = NoiseRng::new(seed, stream_id(&[C9, 2]));
    let frechet: Vec<f64> = (0..draws).map(|_| (-rng.uniform_open().ln()).powf(-0.5)).collect();
    let fit = fit_gev_mle(&BlockMaximaSeries::new(frechet, 1)?)?;
    c.near("frechet(alpha=2) kappa", fit.kappa(), 0.5, 0.07);

    let mut worst = 0.0f64;
    for (k, truth) in [(0.3, 1.0, 0.0), (-0.2, 0.8, 0.5), (5e-4, 1.0, 0.0), (0.0, 1.0, 0.0)].into_iter().enumerate() {
        let law = GevParams::new(truth.0, truth.1, truth.2);
        let mut rng = NoiseRng::new(seed, stream_id(&[C9, 3, k as u64]));
        let data: Vec<f64> = (0..draws).map(|_| law.sample(&mut rng)).collect();
        // off the maximum, with the support still covering the data
        let at = GevParams::new(truth.0, 1.1 * truth.1, truth.2 - 0.05);
        worst = worst.max(gradient_error(&at, &data));
    }
    c.below("gradient relative error", worst, 1e-5);

    // general formula against the Gumbel value plus its first-order term
    let m = gumbel.len() as f64;
    let score: f64 = gumbel.iter().map(|&z| -z - 0.5 * z * z * ((-z).exp() - 1.0)).sum::<f64>() / m;
    let per_point = |k: f64| GevParams::new(k, 1.0, 0.0).log_likelihood(&gumbel) / m;
    let base = per_point(0.0);
    let jump = [1e-4, -1e-4, 1e-7, -1e-7, 0.99 * GUMBEL_SWITCH, 1.01 * GUMBEL_SWITCH]
        .iter()
        .map(|&k| (per_point(k) - base - k * score).abs())
        .fold(0.0, f64::max);
    c.below("kappa->0 continuity per point", jump, 1e-6);

    let oracles = [
        ("circle g1", MeasureModel::UniformCircle, Family::G1),
        ("circle g2(a=1)", MeasureModel::UniformCircle, Family::G2 { a: 1.0 }),
        ("torus g1", MeasureModel::UniformTorus2, Family::G1),
    ];
    for (k, (label, model, family)) in oracles.into_iter().enumerate() {
        let rate = normalizing_oracle(&model, family, seed, k as u64)?;
        c.at_least(format!("KS pass rate, {label}"), rate, 0.9);
    }
    Ok(())
}

/// `max_i |g_i − fd_i| / max_i |fd_i|` with central differences.
fn gradient_error(at: &GevParams, data: &[f64]) -> f64 {
    let g = at.log_likelihood_gradient(data);
    let p = at.as_array();
    let mut fd = [0.0; 3];
    for i in 0..3 {
        let h = 1e-6 * p[i].abs().max(1.0);
        let (mut lo, mut hi) = (p, p);
        lo[i] -= h;
        hi[i] += h;
        let ll = |q: [f64; 3]| GevParams::new(q[0], q[1], q[2]).log_likelihood(data);
        fd[i] = (ll(hi) - ll(lo)) / (2.0 * h);
    }
    let scale = fd.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    (0..3).map(|i| (g[i] - fd[i]).abs()).fold(0.0, f64::max) / scale
}

const ORACLE_REPS: usize = 100;
const ORACLE_BLOCKS: usize = 1000;
const ORACLE_N: usize = 1000;

/// Fraction of repetitions in which i.i.d. block maxima pass KS against the
/// GEV implied by the normalizing constants.
fn normalizing_oracle(model: &MeasureModel, family: Family, seed: u64, tag: u64) -> Result<f64> {
    let (space, target) = match model {
        MeasureModel::UniformTorus2 => (Space::Torus2, State::two(0.3, 0.6)),
        _ => (Space::Circle, State::one(0.3)),
    };
    let obs = Observable::new(family, target, space)?;
    let law = normalizing_constants(model, &obs, ORACLE_N)?.expected_gev();
    // asymptotic 5% point of the fully specified one-sample KS statistic
    let critical = 1.358 / (ORACLE_BLOCKS as f64).sqrt();
    let passes: usize = workers().install(|| {
        (0..ORACLE_REPS)
            .into_par_iter()
            .map(|rep| {
                let mut rng = NoiseRng::new(seed, stream_id(&[C9, 4, tag, rep as u64]));
                let maxima: Vec<f64> = (0..ORACLE_BLOCKS)
                    .map(|_| {
                        (0..ORACLE_N)
                            .map(|_| {
                                let x = match space {
                                    Space::Torus2 => State::two(rng.uniform(), rng.uniform()),
                                    _ => State::one(rng.uniform()),
                                };
                                obs.evaluate(&x).unwrap_or(f64::INFINITY)
                            })
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect();
                usize::from(ks_statistic(&maxima, &law) < critical)
            })
            .sum()
    });
    Ok(passes as f64 / ORACLE_REPS as f64)
}
