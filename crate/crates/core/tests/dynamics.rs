use evlab_core::dynamics::{
    random_orbit, sample_stationary, MapSpec, NoiseCoupling, NoiseSpec, Orbit, OrbitConfig, Space, State,
};
use evlab_core::Error;
use proptest::prelude::*;

fn noise(eps: f64) -> NoiseSpec {
    NoiseSpec::new(eps).unwrap()
}

#[test]
fn step_examples() {
    let rot = MapSpec::rotation(0.25).unwrap();
    let det = NoiseSpec::deterministic();
    assert!((rot.step(&det, State::one(0.5), [0.0; 2]).unwrap().x() - 0.75).abs() < 1e-15);
    let h = MapSpec::henon_classic().deterministic(State::two(0.0, 0.0)).unwrap();
    assert_eq!(h.coords.as_array(), [1.0, 0.0]);
    let t = MapSpec::TernaryShift.deterministic(State::one(0.9)).unwrap();
    assert!((t.x() - 0.7).abs() < 1e-12);
}

#[test]
fn deterministic_rotation_orbit() {
    let orbit = random_orbit(&MapSpec::rotation(0.1).unwrap(), &NoiseSpec::deterministic(), State::one(0.0), &OrbitConfig::new(10, 1))
        .unwrap();
    assert_eq!(orbit.len(), 10);
    for (k, s) in orbit.iter().enumerate() {
        let d = (s.x() - 0.1 * k as f64).abs();
        assert!(d.min(1.0 - d) < 1e-12, "step {k}: {}", s.x());
    }
}

/// Chi-square against 100 equal bins; the noisy ternary shift preserves
/// Lebesgue measure.
#[test]
fn noisy_ternary_histogram_is_flat() {
    let cfg = OrbitConfig { length: 100_000, burn_in: 1000, seed: 11, stream: 3 };
    let orbit = random_orbit(&MapSpec::TernaryShift, &noise(1e-2), State::one(0.123), &cfg).unwrap();
    let mut bins = [0usize; 100];
    for s in &orbit {
        bins[((s.x() * 100.0) as usize).min(99)] += 1;
    }
    let expected = orbit.len() as f64 / 100.0;
    let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
    // 99 degrees of freedom: mean 99, sd 14; well beyond the 0.999 quantile (148)
    assert!(chi2 < 160.0, "chi2 = {chi2}");
}

#[test]
fn stationary_ternary_sample_is_uniform() {
    let s = sample_stationary(&MapSpec::TernaryShift, &noise(1e-3), 10_000, 500, 5, 9).unwrap();
    assert_eq!(s.states.len(), 500);
    let mut xs: Vec<f64> = s.states.iter().map(State::x).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max);
    assert!(d < 1.358 / n.sqrt(), "KS statistic {d}");
}

/// Root of `f(x) − x` by bisection.
fn bisect_fixed_point(map: &MapSpec, mut lo: f64, mut hi: f64) -> f64 {
    let g = |x: f64| map.deterministic(State::one(x)).unwrap().x() - x;
    assert!(g(lo) * g(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn quadratic_collapses_to_its_fixed_point() {
    let map = MapSpec::quadratic(0.014).unwrap();
    let z = bisect_fixed_point(&map, 0.0, 5.0);
    assert!((z - (-1.0 + (1.0 + 4.0 * 0.014f64).sqrt()) / (2.0 * 0.014)).abs() < 1e-9);
    let s = sample_stationary(&map, &NoiseSpec::deterministic(), 10_000, 50, 1, 2).unwrap();
    assert!(s.states.iter().all(|st| (st.x() - z).abs() < 1e-10));
}

#[test]
fn noisy_henon_escapes_are_reported() {
    match sample_stationary(&MapSpec::henon_classic(), &noise(0.1), 10_000, 50, 1, 1) {
        Ok(s) => assert!(s.restarts > 0 || s.states.len() == 50),
        Err(e) => assert!(matches!(e, Error::EscapeDominates { .. })),
    }
}

#[test]
fn validation_rejects_bad_parameters() {
    assert!(NoiseSpec::new(-0.1).is_err());
    assert!(NoiseSpec::new(f64::NAN).is_err());
    assert!(MapSpec::pomeau_manneville(1.5).is_err());
    assert!(MapSpec::henon(f64::INFINITY, 0.3).is_err());
}

fn circle_map() -> impl Strategy<Value = MapSpec> {
    prop_oneof![
        (0.0f64..1.0).prop_map(|a| MapSpec::rotation(a).unwrap()),
        Just(MapSpec::TernaryShift),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circle_orbits_stay_in_unit_interval(map in circle_map(), eps in 0.0f64..0.5, x0 in 0.0f64..1.0, seed in any::<u64>()) {
        let orbit = random_orbit(&map, &noise(eps), State::one(x0), &OrbitConfig::new(500, seed)).unwrap();
        prop_assert!(orbit.iter().all(|s| (0.0..1.0).contains(&s.x())));
    }

    #[test]
    fn cat_orbits_stay_on_the_torus(eps in 0.0f64..0.5, x in 0.0f64..1.0, y in 0.0f64..1.0, seed in any::<u64>(), independent in any::<bool>()) {
        let coupling = if independent { NoiseCoupling::Independent } else { NoiseCoupling::Shared };
        let n = noise(eps).with_coupling(coupling);
        let orbit = random_orbit(&MapSpec::ArnoldCat, &n, State::two(x, y), &OrbitConfig::new(300, seed)).unwrap();
        prop_assert!(orbit.iter().all(|s| s.fits(Space::Torus2)));
        prop_assert!(orbit.iter().all(|s| s.coords.as_array().iter().all(|c| (0.0..1.0).contains(c))));
    }

    #[test]
    fn orbits_are_deterministic_given_seed_and_stream(eps in 0.0f64..0.3, seed in any::<u64>(), stream in any::<u64>()) {
        let cfg = OrbitConfig { length: 200, burn_in: 10, seed, stream };
        let a = random_orbit(&MapSpec::TernaryShift, &noise(eps), State::one(0.3), &cfg).unwrap();
        let b = random_orbit(&MapSpec::TernaryShift, &noise(eps), State::one(0.3), &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn escape_is_absorbing(seed in any::<u64>()) {
        let orbit: Vec<State> = Orbit::new(MapSpec::henon_classic(), noise(0.3), State::two(0.0, 0.0), &OrbitConfig::new(2000, seed))
            .unwrap()
            .collect();
        if let Some(first) = orbit.iter().position(|s| !s.is_alive()) {
            prop_assert!(orbit[first..].iter().all(|s| !s.is_alive()));
        }
    }
}
