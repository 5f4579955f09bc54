//! Ensembles of noisy orbits: GEV fits and extremal indices per noise level.
//!
//! For each noise level a stationary sample of `R` states is drawn from one
//! long burned-in run; realization `i` starts at the `i`-th state and runs
//! `m·n` steps on its own noise stream. Everything is keyed by the master seed,
//! the noise level and the realization index, so results do not depend on the
//! number of worker threads.

use std::sync::OnceLock;

use evlab_core::dynamics::{sample_stationary, MapKind, MapSpec, NoiseSpec, Orbit, OrbitConfig, State};
use evlab_core::evt::{
    block_maxima, estimate_extremal_index, fit_gev_mle, ks_test, local_dimension_from_fit, BlockMaximaSeries,
    GevFit,
};
use evlab_core::math::mean_std;
use evlab_core::observables::{distance, Observable};
use evlab_core::rng::stream_id;
use evlab_core::theory::{expected_params, theoretical_ei, Basis};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, MapConfig, ObservableConfig, TargetConfig};
use crate::error::{Error, Result};
use crate::ks_cache::KsTable;
use crate::output::ResultRow;

/// Smallest KS pass fraction for a noise level to count as reliable.
pub const RELIABLE_PASS_FRACTION: f64 = 0.7;
/// A noise level is aborted when more than this fraction of realizations fail.
pub const MAX_FAILED_FRACTION: f64 = 0.5;
/// Re-initializations allowed per realization for maps that restart on escape.
pub const MAX_REALIZATION_RESTARTS: usize = 64;
/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "EVLAB_WORKERS";

const TAG_POOL: u64 = 1;
const TAG_TARGETS: u64 = 2;
const TAG_ORBIT: u64 = 3;
const TAG_RESTART: u64 = 4;

/// Worker pool sized by `EVLAB_WORKERS` (all cores when unset or zero).
pub fn workers() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var(WORKERS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()).unwrap_or(0);
        rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("worker pool")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
}

impl Moments {
    /// Compensated mean and (n−1) standard deviation; NaN when empty.
    pub fn of(values: &[f64]) -> Self {
        let (mean, std) = mean_std(values);
        Self { mean, std }
    }
}

/// Theoretical GEV shape (and `g1` scale) for an observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expected {
    pub kappa: f64,
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub realization: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSummary {
    pub observable: String,
    pub config: ObservableConfig,
    pub kappa: Moments,
    pub sigma: Moments,
    pub nu: Moments,
    /// Passing fits over completed realizations; failed fits count as fails.
    pub ks_pass_fraction: f64,
    pub reliable: bool,
    pub fitted: usize,
    pub fit_failures: usize,
    pub expected: Option<Expected>,
    /// Fraction of fits whose 95% interval for `κ` holds the expected value.
    pub kappa_ci_coverage: Option<f64>,
    pub sigma_ci_coverage: Option<f64>,
    /// `1/σ` over the fits of `g1`.
    pub local_dimension: Option<Moments>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonPoint {
    pub epsilon: f64,
    pub observables: Vec<ObservableSummary>,
    pub realizations: usize,
    pub completed: usize,
    /// Escapes seen while sampling and while running realizations.
    pub escape_count: usize,
    pub aborted: bool,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub config: ExperimentConfig,
    pub points: Vec<EpsilonPoint>,
}

impl EnsembleReport {
    pub fn point(&self, epsilon: f64) -> Option<&EpsilonPoint> {
        self.points.iter().find(|p| p.epsilon == epsilon)
    }

    /// `κ` of every observable, then `σ` of `g1`.
    pub fn rows(&self) -> Vec<ResultRow> {
        let mut rows = Vec::new();
        for p in &self.points {
            let row = |s: &ObservableSummary, param: &str, m: Moments| ResultRow {
                epsilon: p.epsilon,
                observable: s.observable.clone(),
                param: param.into(),
                mean: m.mean,
                std: m.std,
                ks_pass_fraction: Some(s.ks_pass_fraction),
                reliable: s.reliable,
                escape_count: p.escape_count,
            };
            rows.extend(p.observables.iter().map(|s| row(s, "kappa", s.kappa)));
            rows.extend(p.observables.iter().filter(|s| s.observable == "g1").map(|s| row(s, "sigma", s.sigma)));
        }
        rows
    }

    pub fn any_aborted(&self) -> bool {
        self.points.iter().any(|p| p.aborted)
    }
}

impl EpsilonPoint {
    pub fn observable(&self, label: &str) -> Option<&ObservableSummary> {
        self.observables.iter().find(|s| s.observable == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EiPoint {
    pub epsilon: f64,
    /// Clipped to `(0, 1]`.
    pub theta: Moments,
    pub raw_theta: Moments,
    pub clipped: usize,
    pub realizations: usize,
    pub completed: usize,
    pub escape_count: usize,
    pub aborted: bool,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EiSweepReport {
    pub config: ExperimentConfig,
    /// `1 − 1/|det Df^p(z)|` of the unperturbed map; `None` when `z` does not
    /// repel.
    pub theoretical_theta: Option<f64>,
    pub points: Vec<EiPoint>,
}

impl EiSweepReport {
    pub fn point(&self, epsilon: f64) -> Option<&EiPoint> {
        self.points.iter().find(|p| p.epsilon == epsilon)
    }

    pub fn rows(&self) -> Vec<ResultRow> {
        self.points
            .iter()
            .map(|p| ResultRow {
                epsilon: p.epsilon,
                observable: "ei".into(),
                param: "theta".into(),
                mean: p.theta.mean,
                std: p.theta.std,
                ks_pass_fraction: None,
                reliable: !p.aborted && p.completed > 0,
                escape_count: p.escape_count,
            })
            .collect()
    }

    pub fn any_aborted(&self) -> bool {
        self.points.iter().any(|p| p.aborted)
    }
}

/// Runs every noise level of `cfg`. Fails only if no realization at any
/// level completed.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    let report = run_report(cfg)?;
    ensure_some_completed(report.points.iter().map(|p| (p.completed, p.escape_count, p.failures.first())))?;
    Ok(report)
}

/// Like [`run_ensemble`] but keeps a report in which nothing completed.
pub fn run_report(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    cfg.validate()?;
    let points = cfg.eps.iter().map(|&e| run_point(cfg, e)).collect::<Result<Vec<_>>>()?;
    Ok(EnsembleReport { config: cfg.clone(), points })
}

/// Extremal index per noise level at the periodic target of `cfg`.
pub fn ei_sweep(cfg: &ExperimentConfig) -> Result<EiSweepReport> {
    let report = ei_report(cfg)?;
    ensure_some_completed(report.points.iter().map(|p| (p.completed, p.escape_count, p.failures.first())))?;
    Ok(report)
}

/// Like [`ei_sweep`] but keeps a report in which nothing completed.
pub fn ei_report(cfg: &ExperimentConfig) -> Result<EiSweepReport> {
    cfg.validate()?;
    let TargetConfig::Periodic { period, .. } = cfg.target else {
        return Err(Error::Input("the extremal index sweep needs a periodic target".into()));
    };
    let spec = cfg.map.spec()?;
    let z = cfg.target.point().expect("periodic target has a point");
    let theoretical_theta = match theoretical_ei(&spec, &z, period) {
        Ok(t) => Some(t),
        Err(evlab_core::Error::NotRepelling { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let points = cfg.eps.iter().map(|&e| ei_point(cfg, e)).collect::<Result<Vec<_>>>()?;
    Ok(EiSweepReport { config: cfg.clone(), theoretical_theta, points })
}

fn ensure_some_completed<'a>(points: impl Iterator<Item = (usize, usize, Option<&'a Failure>)>) -> Result<()> {
    let mut escapes = 0;
    let mut first = None;
    for (completed, esc, fail) in points {
        if completed > 0 {
            return Ok(());
        }
        escapes += esc;
        first = first.or(fail);
    }
    Err(Error::AllRealizationsFailed {
        escapes,
        first: first.map(|f| f.reason.clone()).unwrap_or_else(|| "no realizations".into()),
    })
}

/// Ensemble at one noise level. Realization failures are recorded, never
/// raised.
pub fn run_point(cfg: &ExperimentConfig, epsilon: f64) -> Result<EpsilonPoint> {
    let ctx = PointContext::new(cfg, epsilon)?;
    let outcomes: Vec<Outcome<Vec<FitResult>>> =
        workers().install(|| (0..cfg.realizations).into_par_iter().map(|i| ctx.fit_realization(i)).collect());

    let tally = Tally::of(&ctx, &outcomes);
    let completed: Vec<&Vec<FitResult>> = outcomes.iter().filter_map(|o| o.done.as_ref()).collect();
    let expected = expected_for(&cfg.map);
    let observables = cfg
        .observables
        .iter()
        .enumerate()
        .map(|(k, obs)| summarize(obs, expected, completed.iter().map(|fits| &fits[k]), completed.len(), tally.aborted))
        .collect();
    Ok(EpsilonPoint {
        epsilon,
        observables,
        realizations: cfg.realizations,
        completed: completed.len(),
        escape_count: tally.escapes,
        aborted: tally.aborted,
        failures: tally.failures,
    })
}

fn ei_point(cfg: &ExperimentConfig, epsilon: f64) -> Result<EiPoint> {
    let ctx = PointContext::new(cfg, epsilon)?;
    let outcomes: Vec<Outcome<(f64, f64, bool)>> =
        workers().install(|| (0..cfg.realizations).into_par_iter().map(|i| ctx.ei_realization(i)).collect());
    let tally = Tally::of(&ctx, &outcomes);
    let done: Vec<(f64, f64, bool)> = outcomes.iter().filter_map(|o| o.done).collect();
    let theta: Vec<f64> = done.iter().map(|d| d.0).collect();
    let raw: Vec<f64> = done.iter().map(|d| d.1).collect();
    Ok(EiPoint {
        epsilon,
        theta: Moments::of(&theta),
        raw_theta: Moments::of(&raw),
        clipped: done.iter().filter(|d| d.2).count(),
        realizations: cfg.realizations,
        completed: done.len(),
        escape_count: tally.escapes,
        aborted: tally.aborted,
        failures: tally.failures,
    })
}

/// Feeds every state of realization `i` at noise level `epsilon` to `visit`,
/// exactly as the ensemble sees it (including any restarts).
pub fn visit_realization(cfg: &ExperimentConfig, epsilon: f64, i: usize, visit: &mut dyn FnMut(&State)) -> Result<()> {
    cfg.validate()?;
    let ctx = PointContext::new(cfg, epsilon)?;
    let start = ctx.start(i).map_err(|f| Error::Input(f.reason))?;
    // restarts replay from scratch, so only the final attempt is delivered
    let (Collect(states), _) = ctx.drive(i, start, || Collect(Vec::new())).map_err(|f| Error::Input(f.reason))?;
    states.iter().for_each(|s| visit(s));
    Ok(())
}

/// Expected parameters for generic targets of maps with an absolutely
/// continuous stationary measure.
fn expected_for(map: &MapConfig) -> Option<Basis> {
    match map {
        MapConfig::Rotation { .. }
        | MapConfig::Ternary
        | MapConfig::PomeauManneville { .. }
        | MapConfig::Lsv { .. } => Some(Basis::OneD),
        MapConfig::ArnoldCat { .. } => Some(Basis::TwoD),
        _ => None,
    }
}

type FitResult = std::result::Result<GevFit, String>;

fn summarize<'a>(
    obs: &ObservableConfig,
    basis: Option<Basis>,
    fits: impl Iterator<Item = &'a FitResult>,
    completed: usize,
    aborted: bool,
) -> ObservableSummary {
    let fits: Vec<&FitResult> = fits.collect();
    let ok: Vec<&GevFit> = fits.iter().filter_map(|f| f.as_ref().ok()).collect();
    let passes = ok.iter().filter(|f| f.ks_pass() == Some(true)).count();
    let ks_pass_fraction = if completed == 0 { 0.0 } else { passes as f64 / completed as f64 };
    let col = |g: fn(&GevFit) -> f64| Moments::of(&ok.iter().map(|f| g(f)).collect::<Vec<_>>());

    let expected = basis.and_then(|b| {
        let e = expected_params(b, obs.family().exponent().unwrap_or(1.0)).ok()?;
        Some(match obs {
            ObservableConfig::G1 => Expected { kappa: e.kappa_g1, sigma: Some(e.sigma_g1) },
            ObservableConfig::G2 { .. } => Expected { kappa: e.kappa_g2, sigma: None },
            ObservableConfig::G3 { .. } => Expected { kappa: e.kappa_g3, sigma: None },
        })
    });
    let coverage = |pick: fn(&GevFit) -> [f64; 2], target: f64| {
        let with_ci: Vec<[f64; 2]> = ok.iter().map(|f| pick(f)).filter(|c| c[0].is_finite() && c[1].is_finite()).collect();
        (!with_ci.is_empty())
            .then(|| with_ci.iter().filter(|c| c[0] <= target && target <= c[1]).count() as f64 / with_ci.len() as f64)
    };
    let is_g1 = matches!(obs, ObservableConfig::G1);
    ObservableSummary {
        observable: obs.label().into(),
        config: *obs,
        kappa: col(GevFit::kappa),
        sigma: col(GevFit::sigma),
        nu: col(GevFit::nu),
        ks_pass_fraction,
        reliable: !aborted && completed > 0 && ks_pass_fraction >= RELIABLE_PASS_FRACTION,
        fitted: ok.len(),
        fit_failures: fits.len() - ok.len(),
        expected,
        kappa_ci_coverage: expected.and_then(|e| coverage(|f| f.ci.shape, e.kappa)),
        sigma_ci_coverage: expected.and_then(|e| e.sigma).and_then(|s| coverage(|f| f.ci.scale, s)),
        local_dimension: is_g1.then(|| Moments::of(&ok.iter().map(|f| local_dimension_from_fit(f)).collect::<Vec<_>>())),
    }
}

struct Outcome<T> {
    done: Option<T>,
    failure: Option<String>,
    escapes: usize,
}

struct Tally {
    escapes: usize,
    aborted: bool,
    failures: Vec<Failure>,
}

impl Tally {
    fn of<T>(ctx: &PointContext, outcomes: &[Outcome<T>]) -> Self {
        let failures: Vec<Failure> = outcomes
            .iter()
            .enumerate()
            .filter_map(|(i, o)| o.failure.clone().map(|reason| Failure { realization: i, reason }))
            .collect();
        let r = outcomes.len();
        Self {
            escapes: ctx.sampling_escapes + outcomes.iter().map(|o| o.escapes).sum::<usize>(),
            aborted: failures.len() as f64 > MAX_FAILED_FRACTION * r as f64,
            failures,
        }
    }
}

struct Failed {
    reason: String,
    escapes: usize,
}

trait Accumulator {
    fn push(&mut self, s: &State) -> std::result::Result<(), String>;
}

struct Collect(Vec<State>);

impl Accumulator for Collect {
    fn push(&mut self, s: &State) -> std::result::Result<(), String> {
        self.0.push(*s);
        Ok(())
    }
}

/// Block maxima of several observables, built while the orbit streams by.
struct MaximaAccumulator {
    observables: Vec<Observable>,
    n: usize,
    filled: usize,
    current: Vec<f64>,
    maxima: Vec<Vec<f64>>,
}

impl Accumulator for MaximaAccumulator {
    fn push(&mut self, s: &State) -> std::result::Result<(), String> {
        for (k, obs) in self.observables.iter().enumerate() {
            let v = obs.evaluate(s).map_err(|e| e.to_string())?;
            if !v.is_finite() {
                return Err(format!("{} is infinite: the orbit hit the target exactly", obs.family.label()));
            }
            if self.filled == 0 || v > self.current[k] {
                self.current[k] = v;
            }
        }
        self.filled += 1;
        if self.filled == self.n {
            for (k, m) in self.maxima.iter_mut().enumerate() {
                m.push(self.current[k]);
            }
            self.filled = 0;
        }
        Ok(())
    }
}

/// Block minima of the distance to the target.
struct MinimaAccumulator {
    target: State,
    space: evlab_core::dynamics::Space,
    n: usize,
    filled: usize,
    current: f64,
    minima: Vec<f64>,
}

impl Accumulator for MinimaAccumulator {
    fn push(&mut self, s: &State) -> std::result::Result<(), String> {
        let d = distance(self.space, s, &self.target).map_err(|e| e.to_string())?;
        if self.filled == 0 || d < self.current {
            self.current = d;
        }
        self.filled += 1;
        if self.filled == self.n {
            self.minima.push(self.current);
            self.filled = 0;
        }
        Ok(())
    }
}

struct PointContext<'a> {
    cfg: &'a ExperimentConfig,
    spec: MapSpec,
    noise: NoiseSpec,
    epsilon: f64,
    pool: Vec<State>,
    targets: Vec<State>,
    sampling_escapes: usize,
    pool_error: Option<String>,
}

impl<'a> PointContext<'a> {
    fn new(cfg: &'a ExperimentConfig, epsilon: f64) -> Result<Self> {
        let spec = cfg.map.spec()?;
        let noise = cfg.map.noise(epsilon)?;
        let key = epsilon.to_bits();
        let r = cfg.realizations;
        let mut ctx = Self {
            cfg,
            spec,
            noise,
            epsilon,
            pool: Vec::new(),
            targets: Vec::new(),
            sampling_escapes: 0,
            pool_error: None,
        };
        let mut draw = |tag: u64| match sample_stationary(&spec, &noise, cfg.burn_in, r, cfg.seed, stream_id(&[key, tag])) {
            Ok(s) => {
                ctx.sampling_escapes += s.restarts;
                Ok(s.states)
            }
            Err(evlab_core::Error::EscapeDominates { restarts }) => {
                ctx.sampling_escapes += restarts;
                Err(format!("stationary sampling escaped {restarts} times"))
            }
            Err(e) => Err(e.to_string()),
        };
        match draw(TAG_POOL) {
            Ok(p) => ctx.pool = p,
            Err(e) => ctx.pool_error = Some(e),
        }
        if ctx.pool_error.is_none() && cfg.target == TargetConfig::FromStationary {
            match draw(TAG_TARGETS) {
                Ok(t) => ctx.targets = t,
                Err(e) => ctx.pool_error = Some(e),
            }
        }
        Ok(ctx)
    }

    fn target(&self, i: usize) -> Option<State> {
        self.cfg.target.point().or_else(|| self.targets.get(i).copied())
    }

    fn start(&self, i: usize) -> std::result::Result<State, Failed> {
        if let Some(e) = &self.pool_error {
            return Err(Failed { reason: e.clone(), escapes: 0 });
        }
        self.pool
            .get(i)
            .copied()
            .ok_or_else(|| Failed { reason: "stationary sample exhausted by escapes".into(), escapes: 0 })
    }

    fn restarts_on_escape(&self) -> bool {
        self.spec.kind() == MapKind::CuspLorenz
    }

    /// Runs realization `i` into a fresh accumulator; on an escape either
    /// restarts from a new stationary state or fails.
    fn drive<A: Accumulator>(
        &self,
        i: usize,
        start: State,
        mut make: impl FnMut() -> A,
    ) -> std::result::Result<(A, usize), Failed> {
        let cfg = self.cfg;
        let key = self.epsilon.to_bits();
        let mut x0 = start;
        for attempt in 0..=MAX_REALIZATION_RESTARTS {
            if attempt > 0 {
                let stream = stream_id(&[key, i as u64, TAG_RESTART, attempt as u64]);
                x0 = match sample_stationary(&self.spec, &self.noise, cfg.burn_in, 1, cfg.seed, stream) {
                    Ok(s) => s.states[0],
                    Err(_) => {
                        return Err(Failed { reason: "no stationary state for a restart".into(), escapes: attempt })
                    }
                };
            }
            let orbit_cfg = OrbitConfig {
                length: cfg.m * cfg.n,
                burn_in: 0,
                seed: cfg.seed,
                stream: stream_id(&[key, i as u64, TAG_ORBIT, attempt as u64]),
            };
            let orbit = Orbit::new(self.spec, self.noise, x0, &orbit_cfg)
                .map_err(|e| Failed { reason: e.to_string(), escapes: attempt })?;
            let mut acc = make();
            let mut escaped = false;
            for s in orbit {
                if !s.is_alive() {
                    escaped = true;
                    break;
                }
                acc.push(&s).map_err(|reason| Failed { reason, escapes: attempt })?;
            }
            if !escaped {
                return Ok((acc, attempt));
            }
            if !self.restarts_on_escape() {
                return Err(Failed { reason: "orbit escaped".into(), escapes: attempt + 1 });
            }
        }
        Err(Failed {
            reason: format!("orbit escaped {} times", MAX_REALIZATION_RESTARTS + 1),
            escapes: MAX_REALIZATION_RESTARTS + 1,
        })
    }

    fn outcome<T>(&self, r: std::result::Result<(T, usize), Failed>) -> Outcome<T> {
        match r {
            Ok((done, restarts)) => Outcome { done: Some(done), failure: None, escapes: restarts },
            Err(f) => Outcome { done: None, failure: Some(f.reason), escapes: f.escapes },
        }
    }

    fn fit_realization(&self, i: usize) -> Outcome<Vec<FitResult>> {
        let run = || -> std::result::Result<(Vec<FitResult>, usize), Failed> {
            let start = self.start(i)?;
            let z = self.target(i).ok_or_else(|| Failed { reason: "no target available".into(), escapes: 0 })?;
            let space = self.spec.space();
            let observables: Vec<Observable> = self
                .cfg
                .observables
                .iter()
                .map(|o| Observable::new(o.family(), z, space))
                .collect::<evlab_core::Result<_>>()
                .map_err(|e| Failed { reason: e.to_string(), escapes: 0 })?;
            let k = observables.len();
            let (acc, restarts) = self.drive(i, start, || MaximaAccumulator {
                observables: observables.clone(),
                n: self.cfg.n,
                filled: 0,
                current: vec![0.0; k],
                maxima: vec![Vec::with_capacity(self.cfg.m); k],
            })?;
            let fits = acc
                .maxima
                .into_iter()
                .zip(&self.cfg.observables)
                .map(|(values, obs)| fit_with_ks(values, self.cfg.n, obs.label()))
                .collect();
            Ok((fits, restarts))
        };
        self.outcome(run())
    }

    fn ei_realization(&self, i: usize) -> Outcome<(f64, f64, bool)> {
        let run = || -> std::result::Result<((f64, f64, bool), usize), Failed> {
            let start = self.start(i)?;
            let z = self.target(i).ok_or_else(|| Failed { reason: "no target available".into(), escapes: 0 })?;
            let (acc, restarts) = self.drive(i, start, || MinimaAccumulator {
                target: z,
                space: self.spec.space(),
                n: self.cfg.n,
                filled: 0,
                current: 0.0,
                minima: Vec::with_capacity(self.cfg.m),
            })?;
            let est = estimate_extremal_index(&acc.minima, self.cfg.n, self.cfg.ei_normalization.into(), self.epsilon)
                .map_err(|e| Failed { reason: e.to_string(), escapes: 0 })?;
            Ok(((est.theta, est.raw_theta, est.clipped), restarts))
        };
        self.outcome(run())
    }
}

fn fit_with_ks(values: Vec<f64>, n: usize, tag: &str) -> FitResult {
    let bm: BlockMaximaSeries = BlockMaximaSeries::new(values, n).map_err(|e| e.to_string())?.with_tag(tag);
    let fit = fit_gev_mle(&bm).map_err(|e| e.to_string())?;
    let ks = ks_test(&bm, &fit, KsTable::global());
    Ok(fit.with_ks(ks))
}

/// Block maxima of one observable series, fitted and KS-tested against the
/// shared critical value table.
pub fn fit_series(series: &[f64], n: usize) -> Result<GevFit> {
    let bm = block_maxima(series, n)?;
    let fit = fit_gev_mle(&bm)?;
    let ks = ks_test(&bm, &fit, KsTable::global());
    Ok(fit.with_ks(ks))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(map: MapConfig, eps: Vec<f64>) -> ExperimentConfig {
        ExperimentConfig::new(map, eps, 40, 50, 3).with_realizations(4)
    }

    #[test]
    fn single_realization_has_zero_spread() {
        let cfg = small(MapConfig::Ternary, vec![1e-3]).with_realizations(1);
        let report = run_ensemble(&cfg).unwrap();
        let g1 = report.points[0].observable("g1").unwrap();
        assert_eq!(g1.kappa.std, 0.0);
        assert_eq!(g1.sigma.std, 0.0);
        assert_eq!(report.rows().len(), 4);
    }

    #[test]
    fn escaping_henon_is_reported_not_raised() {
        let cfg = small(MapConfig::Henon { a: 1.4, b: 0.3 }, vec![0.0, 0.1]);
        let report = run_ensemble(&cfg).unwrap();
        let noisy = report.point(0.1).unwrap();
        assert!(noisy.escape_count > 0);
        assert!(noisy.observables.iter().all(|s| !s.reliable));
        assert!(report.point(0.0).unwrap().completed > 0);
        let only_noisy = small(MapConfig::Henon { a: 1.4, b: 0.3 }, vec![0.1]);
        assert!(matches!(run_ensemble(&only_noisy), Err(Error::AllRealizationsFailed { .. })));
    }

    #[test]
    fn sweep_needs_a_periodic_target() {
        let cfg = small(MapConfig::Ternary, vec![0.0]);
        assert!(ei_sweep(&cfg).is_err());
        let cfg = cfg.with_target(TargetConfig::Periodic { z: vec![0.3], period: 1 });
        assert!(matches!(ei_sweep(&cfg), Err(Error::Core(evlab_core::Error::NotPeriodic { .. }))));
    }

    #[test]
    fn visiting_reproduces_the_orbit() {
        let cfg = small(MapConfig::Ternary, vec![1e-2]);
        let mut a = Vec::new();
        visit_realization(&cfg, 1e-2, 2, &mut |s| a.push(s.x())).unwrap();
        let mut b = Vec::new();
        visit_realization(&cfg, 1e-2, 2, &mut |s| b.push(s.x())).unwrap();
        assert_eq!(a.len(), 40 * 50);
        assert_eq!(a, b);
    }
}
