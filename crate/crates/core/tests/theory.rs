use evlab_core::dynamics::{MapSpec, NoiseSpec, Orbit, OrbitConfig, Space, State, GOLDEN_MEAN};
use evlab_core::observables::distance;
use evlab_core::rng::NoiseRng;
use evlab_core::theory::{
    correlation_bound, default_kn, dprime_sum, expected_params, fourier_correlation, lemma_threshold,
    monte_carlo_correlation, sinc_kernel, theoretical_ei, Basis, Interval,
};
use evlab_core::Error;

#[test]
fn expected_parameter_examples() {
    let p = expected_params(Basis::OneD, 2.0).unwrap();
    assert_eq!((p.kappa_g1, p.kappa_g2, p.kappa_g3, p.sigma_g1), (0.0, 0.5, -0.5, 1.0));
    let p = expected_params(Basis::TwoD, 1.0).unwrap();
    assert_eq!((p.kappa_g1, p.kappa_g2, p.kappa_g3, p.sigma_g1), (0.0, 0.5, -0.5, 0.5));
    let p = expected_params(Basis::LocalDimension(1.25), 1.0).unwrap();
    assert!((p.kappa_g2 - 0.8).abs() < 1e-15 && (p.kappa_g3 + 0.8).abs() < 1e-15 && (p.sigma_g1 - 0.8).abs() < 1e-15);
    assert!(expected_params(Basis::OneD, 0.0).is_err());
}

#[test]
fn theoretical_extremal_index_examples() {
    let t = theoretical_ei(&MapSpec::TernaryShift, &State::one(0.5), 1).unwrap();
    assert!((t - 2.0 / 3.0).abs() < 1e-12);
    // 1/4 → 3/4 → 1/4, and (f²)' = 9
    let mut x: f64 = 0.25;
    for _ in 0..2 {
        x = (3.0 * x) % 1.0;
    }
    assert!((x - 0.25).abs() < 1e-15);
    let t = theoretical_ei(&MapSpec::TernaryShift, &State::one(0.25), 2).unwrap();
    assert!((t - 8.0 / 9.0).abs() < 1e-12);
    let rot = MapSpec::rotation(GOLDEN_MEAN).unwrap();
    assert!(matches!(theoretical_ei(&rot, &State::one(0.3), 1), Err(Error::NotPeriodic { .. })));
}

#[test]
fn bound_examples() {
    assert_eq!(correlation_bound(0, 0.5).0, 4.0);
    let (b, valid) = correlation_bound(100, 0.5);
    assert!(valid && (b / (4.0 * std::f64::consts::TAU.powf(-25.0)) - 1.0).abs() < 1e-12);
    assert!(!correlation_bound(10, 0.9).1);
    assert!((lemma_threshold() - 0.6229).abs() < 1e-4);
}

#[test]
fn lag_zero_and_lag_twenty_examples() {
    let a = Interval::new(0.0, 0.3).unwrap();
    let r = fourier_correlation(a, &[a], GOLDEN_MEAN, 0.3, 0, None).unwrap();
    // truncated series: exact up to the rigorous tail bound
    assert!((r.value - 0.21).abs() <= r.uncertainty + 1e-12, "{r:?}");
    assert!(r.uncertainty < 1e-4);

    let a = Interval::new(0.0, 0.1).unwrap();
    let r = fourier_correlation(a, &[a], GOLDEN_MEAN, 0.3, 20, None).unwrap();
    let bound = 4.0 * (-20.0 * 0.09 * std::f64::consts::TAU.ln()).exp();
    assert!((r.bound - bound).abs() < 1e-12 * bound);
    assert!(r.value + r.uncertainty <= bound && r.within_bound);
}

#[test]
fn kernel_bounds() {
    let log_tau = std::f64::consts::TAU.ln();
    for i in 1..10_000 {
        let x = i as f64 / 10_000.0;
        assert!(sinc_kernel(x).abs() <= (-x * x * log_tau).exp() + 1e-15, "x = {x}");
    }
    for i in 0..2000 {
        let x = 1.0 + i as f64 * 0.01;
        for s in [x, -x] {
            assert!(sinc_kernel(s).abs() <= 1.0 / (std::f64::consts::TAU * x) + 1e-15, "x = {s}");
        }
    }
}

/// Signed correlations from the Fourier series and from direct simulation
/// agree within three standard errors.
#[test]
fn fourier_and_monte_carlo_agree() {
    let rot = MapSpec::rotation(GOLDEN_MEAN).unwrap();
    let noise = NoiseSpec::new(0.3).unwrap();
    let mut rng = NoiseRng::new(99, 0);
    let interval = |rng: &mut NoiseRng| {
        let lo = 0.8 * rng.uniform();
        Interval::new(lo, lo + 0.05 + 0.15 * rng.uniform()).unwrap()
    };
    for trial in 0..20 {
        let a = interval(&mut rng);
        let b = vec![interval(&mut rng)];
        let j = rng.below(6) as usize;
        let f = fourier_correlation(a, &b, GOLDEN_MEAN, 0.3, j, None).unwrap();
        let mc = monte_carlo_correlation(&rot, &noise, a, &b, j, 200_000, 1000 + trial).unwrap();
        let gap = (f.signed - mc.signed).abs();
        assert!(gap <= 3.0 * mc.uncertainty + f.uncertainty, "trial {trial}, j={j}: {} vs {} ± {}", f.signed, mc.signed, mc.uncertainty);
    }
}

#[test]
fn monte_carlo_lag_zero() {
    let rot = MapSpec::rotation(GOLDEN_MEAN).unwrap();
    let a = Interval::new(0.1, 0.4).unwrap();
    let b = [Interval::new(0.3, 0.6).unwrap()];
    let mc = monte_carlo_correlation(&rot, &NoiseSpec::new(0.2).unwrap(), a, &b, 0, 100_000, 3).unwrap();
    let exact = 0.1 - 0.3 * 0.3;
    assert!((mc.signed - exact).abs() <= 3.0 * mc.uncertainty, "{} vs {exact}", mc.signed);
    assert!(monte_carlo_correlation(&rot, &NoiseSpec::new(0.2).unwrap(), a, &b, 0, 10, 3).is_err());
    assert!(monte_carlo_correlation(&MapSpec::henon_classic(), &NoiseSpec::new(0.2).unwrap(), a, &b, 0, 100_000, 3).is_err());
}

/// Without noise the rotation keeps coming back: correlations do not decay.
#[test]
fn deterministic_rotation_does_not_decorrelate() {
    let rot = MapSpec::rotation(GOLDEN_MEAN).unwrap();
    let a = Interval::new(0.0, 0.05).unwrap();
    let max = (1..=200)
        .map(|j| monte_carlo_correlation(&rot, &NoiseSpec::deterministic(), a, &[a], j, 10_000, j as u64).unwrap().value)
        .fold(0.0, f64::max);
    assert!(max > 0.5 * a.length(), "max correlation {max}");
}

fn exceedances(map: MapSpec, eps: f64, z: f64, n: usize, len: usize, seed: u64) -> Vec<bool> {
    let noise = if eps > 0.0 { NoiseSpec::new(eps).unwrap() } else { NoiseSpec::deterministic() };
    // P(dist < r) = 2r under Lebesgue; τ = 1
    let r = 1.0 / (2.0 * n as f64);
    let target = State::one(z);
    Orbit::new(map, noise, State::one(0.1234567), &OrbitConfig::new(len, seed))
        .unwrap()
        .map(|s| distance(Space::Circle, &s, &target).unwrap() < r)
        .collect()
}

#[test]
fn anti_clustering_examples() {
    let n = 1000;
    let kn = default_kn(n);
    assert_eq!(kn, 32);
    let generic = exceedances(MapSpec::TernaryShift, 1e-2, 0.7371, n, 2_000_000, 1);
    assert!(dprime_sum(&generic, n, kn).unwrap() < 0.1);
    let periodic = exceedances(MapSpec::TernaryShift, 0.0, 0.5, n, 2_000_000, 2);
    assert!(dprime_sum(&periodic, n, kn).unwrap() > 0.2);

    let mut rng = NoiseRng::new(3, 3);
    let iid: Vec<bool> = (0..2_000_000).map(|_| rng.uniform() < 1.0 / n as f64).collect();
    let v = dprime_sum(&iid, n, kn).unwrap();
    // τ²/k_n
    assert!((v - 1.0 / kn as f64).abs() < 0.03, "{v}");
}
