use std::cell::RefCell;
use std::collections::HashMap;

use evlab_core::dynamics::{MapSpec, NoiseSpec, Orbit, OrbitConfig, Space, State};
use evlab_core::evt::{
    block_maxima, block_minima, bootstrap_critical_value, estimate_extremal_index, fit_gev_mle, ks_test, shape_bucket,
    BlockMaximaSeries, CriticalValues, EiNormalization, GevParams, GUMBEL_SWITCH,
};
use evlab_core::observables::{Family, Observable};
use evlab_core::rng::{stream_id, NoiseRng};
use evlab_core::Error;

/// Bootstrap critical values, each bucket computed once.
#[derive(Default)]
struct Cached(RefCell<HashMap<(usize, i64), f64>>);

impl CriticalValues for Cached {
    fn critical_value(&self, m: usize, shape: f64) -> f64 {
        let key = (m, shape_bucket(shape));
        *self.0.borrow_mut().entry(key).or_insert_with(|| bootstrap_critical_value(key.0, key.1))
    }
}

fn draws(law: &GevParams, count: usize, stream: u64) -> Vec<f64> {
    let mut rng = NoiseRng::new(2024, stream);
    (0..count).map(|_| law.sample(&mut rng)).collect()
}

#[test]
fn block_maxima_examples() {
    let bm = block_maxima(&[1.0, 5.0, 2.0, 4.0, 3.0, 6.0], 3).unwrap();
    assert_eq!(bm.values, vec![5.0, 6.0]);
    assert!(block_maxima(&[2.0; 40], 10).unwrap().is_degenerate());
    assert_eq!(block_minima(&[3.0, 1.0, 2.0, 0.5], 2).unwrap(), vec![1.0, 0.5]);
}

#[test]
fn exponential_maxima_center_on_log_n() {
    let mut rng = NoiseRng::new(3, 0);
    let series: Vec<f64> = (0..1_000_000).map(|_| rng.exponential()).collect();
    let bm = block_maxima(&series, 1000).unwrap();
    let mean = bm.values.iter().sum::<f64>() / bm.len() as f64;
    // Gumbel mean log n + γ; sd of the mean π/√6/√1000 ≈ 0.04
    assert!((mean - 1000f64.ln() - 0.5772).abs() < 0.15, "mean {mean}");
}

#[test]
fn gumbel_recovery() {
    let mut rng = NoiseRng::new(1, 1);
    let data: Vec<f64> = (0..10_000).map(|_| -(-rng.uniform_open().ln()).ln()).collect();
    let fit = fit_gev_mle(&BlockMaximaSeries::new(data, 1).unwrap()).unwrap();
    assert!(fit.kappa().abs() < 0.05 && (fit.sigma() - 1.0).abs() < 0.05 && fit.nu().abs() < 0.05, "{:?}", fit.params);
}

#[test]
fn frechet_recovery() {
    let mut rng = NoiseRng::new(1, 2);
    // τ(y) = y^{−2}: inverse CDF of exp(−y^{−2})
    let data: Vec<f64> = (0..10_000).map(|_| (-rng.uniform_open().ln()).powf(-0.5)).collect();
    let fit = fit_gev_mle(&BlockMaximaSeries::new(data, 1).unwrap()).unwrap();
    assert!((fit.kappa() - 0.5).abs() < 0.07, "{:?}", fit.params);
}

#[test]
fn constant_sample_is_degenerate() {
    let bm = BlockMaximaSeries::new(vec![3.0; 50], 10).unwrap();
    assert!(matches!(fit_gev_mle(&bm), Err(Error::DegenerateSample { .. })));
    let short = BlockMaximaSeries::new((0..29).map(f64::from).collect(), 10).unwrap();
    assert!(matches!(fit_gev_mle(&short), Err(Error::InsufficientData { needed: 30, got: 29 })));
}

fn finite_difference(law: &GevParams, data: &[f64]) -> [f64; 3] {
    let p = law.as_array();
    let mut fd = [0.0; 3];
    for i in 0..3 {
        let h = 1e-6 * p[i].abs().max(1.0);
        let (mut lo, mut hi) = (p, p);
        lo[i] -= h;
        hi[i] += h;
        let ll = |q: [f64; 3]| GevParams::new(q[0], q[1], q[2]).log_likelihood(data);
        fd[i] = (ll(hi) - ll(lo)) / (2.0 * h);
    }
    fd
}

#[test]
fn gradient_matches_finite_differences() {
    for (k, (shape, scale, loc)) in [(0.3, 1.0, 0.0), (-0.2, 0.8, 0.5), (5e-4, 1.0, 0.0), (-5e-4, 2.0, 1.0), (0.0, 1.0, 0.0)]
        .into_iter()
        .enumerate()
    {
        let data = draws(&GevParams::new(shape, scale, loc), 5000, k as u64);
        let at = GevParams::new(shape, 1.1 * scale, loc - 0.05);
        let g = at.log_likelihood_gradient(&data);
        let fd = finite_difference(&at, &data);
        let size = fd.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..3 {
            assert!((g[i] - fd[i]).abs() / size < 1e-5, "shape {shape}, component {i}: {} vs {}", g[i], fd[i]);
        }
    }
}

/// `∂ log f/∂κ` at `κ = 0`, from expanding `log(1 + κz)/κ` by hand.
fn gumbel_shape_score(z: f64) -> f64 {
    -z - 0.5 * z * z * ((-z).exp() - 1.0)
}

#[test]
fn likelihood_is_continuous_through_zero_shape() {
    let gumbel = GevParams::gumbel(1.0, 0.0);
    for i in 0..=80 {
        let z = -2.0 + 0.1 * i as f64;
        let exact = -z - (-z).exp();
        assert!((gumbel.ln_pdf(z) - exact).abs() < 1e-14);
        for k in [1e-7, -1e-7, 1e-4, -1e-4, 0.99 * GUMBEL_SWITCH, 1.01 * GUMBEL_SWITCH] {
            let general = GevParams::new(k, 1.0, 0.0).ln_pdf(z);
            let first_order = exact + k * gumbel_shape_score(z);
            assert!((general - first_order).abs() < 1e-6, "z = {z}, kappa = {k}");
        }
    }
}

#[test]
fn fit_is_a_local_maximum() {
    let data = draws(&GevParams::new(0.15, 1.3, 2.0), 2000, 21);
    let fit = fit_gev_mle(&BlockMaximaSeries::new(data.clone(), 1).unwrap()).unwrap();
    let best = fit.params.log_likelihood(&data);
    assert!((best - fit.loglik).abs() < 1e-6 * best.abs());
    let mut rng = NoiseRng::new(5, 5);
    for _ in 0..50 {
        let p = fit.params.as_array();
        let q = GevParams::new(p[0] + 1e-3 * rng.symmetric(), p[1] * (1.0 + 1e-3 * rng.symmetric()), p[2] + 1e-3 * rng.symmetric());
        assert!(q.log_likelihood(&data) <= best + 1e-9);
    }
}

#[test]
fn ks_calibration_and_misfit() {
    let table = Cached::default();
    let law = GevParams::new(0.1, 1.0, 0.0);
    let reps = 200;
    let mut passes = 0;
    for rep in 0..reps {
        let bm = BlockMaximaSeries::new(draws(&law, 100, 1000 + rep), 1).unwrap();
        let fit = fit_gev_mle(&bm).unwrap();
        passes += usize::from(ks_test(&bm, &fit, &table).pass);
    }
    let rate = passes as f64 / reps as f64;
    // binomial(200, 0.95) sd ≈ 0.015
    assert!((0.89..=0.99).contains(&rate), "pass rate {rate}");

    // uniform data against the moment-matched Gumbel law
    let mut rng = NoiseRng::new(8, 8);
    let uniform: Vec<f64> = (0..1000).map(|_| rng.uniform()).collect();
    let mean = uniform.iter().sum::<f64>() / 1000.0;
    let sd = (uniform.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0).sqrt();
    let scale = sd * 6f64.sqrt() / std::f64::consts::PI;
    let law = GevParams::gumbel(scale, mean - 0.5772156649 * scale);
    let d = evlab_core::evt::ks_statistic(&uniform, &law);
    // the known-parameter 5% point is larger than the estimated-parameter one
    assert!(d > 1.358 / 1000f64.sqrt(), "D = {d}");
}

/// Fits of `g1`, `g2`, `g3` on i.i.d. uniform circle points recover
/// `κ = 0, 1/a, −1/a` within three standard errors.
#[test]
fn iid_fits_follow_the_shape_relations() {
    let z = State::one(0.37);
    let a = 3.0;
    let families = [(Family::G1, 0.0), (Family::G2 { a }, 1.0 / a), (Family::G3 { a, c: 0.0 }, -1.0 / a)];
    let mut rng = NoiseRng::new(4, 4);
    let (m, n) = (1000, 500);
    let points: Vec<State> = (0..m * n).map(|_| State::one(rng.uniform())).collect();
    for (family, expected) in families {
        let obs = Observable::new(family, z, Space::Circle).unwrap();
        let series: Vec<f64> = points.iter().map(|p| obs.evaluate(p).unwrap()).collect();
        let fit = fit_gev_mle(&block_maxima(&series, n).unwrap()).unwrap();
        assert!((fit.kappa() - expected).abs() < 3.0 * fit.std_errors[0], "{family:?}: {} ± {}", fit.kappa(), fit.std_errors[0]);
        if family == Family::G1 {
            assert!((fit.sigma() - 1.0).abs() < 3.0 * fit.std_errors[1]);
        }
    }
}

/// At a periodic point the extremal index only moves the location of the
/// `g1` law: the shape and scale stay those of a generic point, and the
/// location drops by about `−log θ`.
#[test]
fn extremal_index_hides_in_the_location() {
    let (m, n) = (1000, 1000);
    let orbit: Vec<State> = Orbit::new(MapSpec::TernaryShift, NoiseSpec::deterministic(), State::one(0.2718281828), &OrbitConfig::new(m * n, 1))
        .unwrap()
        .collect();
    let fit_at = |z: f64| {
        let obs = Observable::new(Family::G1, State::one(z), Space::Circle).unwrap();
        let series: Vec<f64> = orbit.iter().map(|p| obs.evaluate(p).unwrap()).collect();
        fit_gev_mle(&block_maxima(&series, n).unwrap()).unwrap()
    };
    let periodic = fit_at(0.5);
    let generic = fit_at(0.7371);
    assert!(periodic.kappa().abs() < 0.06 && (periodic.sigma() - 1.0).abs() < 0.07, "{:?}", periodic.params);
    assert!(generic.kappa().abs() < 0.06 && (generic.sigma() - 1.0).abs() < 0.07, "{:?}", generic.params);
    let shift = periodic.nu() - generic.nu();
    assert!((shift - (2.0f64 / 3.0).ln()).abs() < 0.15, "location shift {shift}");
}

#[test]
fn extremal_index_examples() {
    let n = 1000;
    let mut rng = NoiseRng::new(6, stream_id(&[6]));
    let z = State::one(0.25);
    let minima: Vec<f64> = (0..1000)
        .map(|_| {
            (0..n)
                .map(|_| evlab_core::observables::distance(Space::Circle, &State::one(rng.uniform()), &z).unwrap())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let est = estimate_extremal_index(&minima, n, EiNormalization::TwoN, 0.0).unwrap();
    assert!((est.theta - 1.0).abs() < 0.07 && est.theta <= 1.0, "{est:?}");

    let orbit: Vec<f64> = Orbit::new(MapSpec::TernaryShift, NoiseSpec::deterministic(), State::one(0.1234567), &OrbitConfig::new(n * 1000, 2))
        .unwrap()
        .map(|s| evlab_core::observables::distance(Space::Circle, &s, &State::one(0.5)).unwrap())
        .collect();
    let est = estimate_extremal_index(&block_minima(&orbit, n).unwrap(), n, EiNormalization::TwoN, 0.0).unwrap();
    assert!((est.theta - 2.0 / 3.0).abs() < 0.06, "{est:?}");

    assert!(matches!(estimate_extremal_index(&minima, n, EiNormalization::TwoNOverEps, 0.0), Err(Error::EpsilonRequired)));
}
