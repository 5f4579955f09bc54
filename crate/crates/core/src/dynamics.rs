//! Map families, additive noise and random orbits.
//!
//! A random orbit is the concatenation `f_{w_n} ∘ … ∘ f_{w_1}(x)` where each
//! `f_w(x) = f(x) + w` and the `w_k = ε ξ_k` are i.i.d. with `ξ_k` uniform on
//! `[-1, 1]`. Circle and torus states are reduced mod 1 after every step.

use alloc::vec::Vec;

use crate::math::{powf, wrap_unit};
use crate::rng::NoiseRng;
use crate::{Error, Result};

/// Golden mean `(√5 − 1)/2`, the default rotation angle.
pub const GOLDEN_MEAN: f64 = 0.618_033_988_749_894_9;

/// Hénon states with `|x|` above this are declared escaped.
pub const HENON_ESCAPE_RADIUS: f64 = 10.0;

/// Quadratic-map states with `|x|` above this are declared escaped.
pub const QUADRATIC_ESCAPE_RADIUS: f64 = 1e3;

/// Steps between consecutive samples of the stationary measure.
pub const DECORRELATION_STRIDE: usize = 100;

/// Re-initializations tolerated by [`sample_stationary`] before giving up.
pub const MAX_STATIONARY_RESTARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Space {
    Circle,
    Interval,
    Torus2,
    Plane2,
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::Circle | Space::Interval => 1,
            Space::Torus2 | Space::Plane2 => 2,
        }
    }

    pub fn is_periodic(self) -> bool {
        matches!(self, Space::Circle | Space::Torus2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Rotation,
    TernaryShift,
    Quadratic,
    PomeauManneville,
    Lsv,
    CuspLorenz,
    ArnoldCat,
    Henon,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Rotation => "rotation",
            MapKind::TernaryShift => "ternary",
            MapKind::Quadratic => "quadratic",
            MapKind::PomeauManneville => "pomeau-manneville",
            MapKind::Lsv => "lsv",
            MapKind::CuspLorenz => "cusp-lorenz",
            MapKind::ArnoldCat => "arnold-cat",
            MapKind::Henon => "henon",
        }
    }
}

/// A deterministic map together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapSpec {
    /// `x + α mod 1`
    Rotation { alpha: f64 },
    /// `3x mod 1`
    TernaryShift,
    /// `1 − a x²` on the interval
    Quadratic { a: f64 },
    /// `x + x^{1+α} mod 1`
    PomeauManneville { alpha: f64 },
    /// `x(1 + 2^α x^α)` on `[0, 1/2)`, `2x − 1` on `[1/2, 1)`
    Lsv { alpha: f64 },
    /// `(−a + |x|^a) sgn(x)` on `[−1, 1]`
    CuspLorenz { a: f64 },
    /// `(2x + y, x + y) mod 1`
    ArnoldCat,
    /// `(y + 1 − a x², b x)`
    Henon { a: f64, b: f64 },
}

impl MapSpec {
    pub fn rotation(alpha: f64) -> Result<Self> {
        let m = MapSpec::Rotation { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn quadratic(a: f64) -> Result<Self> {
        let m = MapSpec::Quadratic { a };
        m.validate()?;
        Ok(m)
    }

    pub fn pomeau_manneville(alpha: f64) -> Result<Self> {
        let m = MapSpec::PomeauManneville { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn lsv(alpha: f64) -> Result<Self> {
        let m = MapSpec::Lsv { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn cusp_lorenz(a: f64) -> Result<Self> {
        let m = MapSpec::CuspLorenz { a };
        m.validate()?;
        Ok(m)
    }

    pub fn henon(a: f64, b: f64) -> Result<Self> {
        let m = MapSpec::Henon { a, b };
        m.validate()?;
        Ok(m)
    }

    /// The classical Hénon parameters `a = 1.4`, `b = 0.3`.
    pub fn henon_classic() -> Self {
        MapSpec::Henon { a: 1.4, b: 0.3 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, name: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(alloc::format!("{name} must be finite")))
            }
        };
        match *self {
            MapSpec::Rotation { alpha } => finite(alpha, "rotation alpha"),
            MapSpec::TernaryShift | MapSpec::ArnoldCat => Ok(()),
            MapSpec::Quadratic { a } => {
                finite(a, "quadratic a")?;
                if a > 0.0 {
                    Ok(())
                } else {
                    Err(Error::config("quadratic a must be > 0"))
                }
            }
            MapSpec::PomeauManneville { alpha } | MapSpec::Lsv { alpha } => {
                if alpha > 0.0 && alpha <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::config("intermittency exponent must lie in (0, 1]"))
                }
            }
            MapSpec::CuspLorenz { a } => {
                if a > 0.0 && a < 2.0 {
                    Ok(())
                } else {
                    Err(Error::config("cusp exponent a must lie in (0, 2)"))
                }
            }
            MapSpec::Henon { a, b } => {
                finite(a, "henon a")?;
                finite(b, "henon b")?;
                if b != 0.0 {
                    Ok(())
                } else {
                    Err(Error::config("henon b must be nonzero"))
                }
            }
        }
    }

    pub fn kind(&self) -> MapKind {
        match self {
            MapSpec::Rotation { .. } => MapKind::Rotation,
            MapSpec::TernaryShift => MapKind::TernaryShift,
            MapSpec::Quadratic { .. } => MapKind::Quadratic,
            MapSpec::PomeauManneville { .. } => MapKind::PomeauManneville,
            MapSpec::Lsv { .. } => MapKind::Lsv,
            MapSpec::CuspLorenz { .. } => MapKind::CuspLorenz,
            MapSpec::ArnoldCat => MapKind::ArnoldCat,
            MapSpec::Henon { .. } => MapKind::Henon,
        }
    }

    pub fn space(&self) -> Space {
        match self.kind() {
            MapKind::Rotation | MapKind::TernaryShift | MapKind::PomeauManneville | MapKind::Lsv => {
                Space::Circle
            }
            MapKind::Quadratic | MapKind::CuspLorenz => Space::Interval,
            MapKind::ArnoldCat => Space::Torus2,
            MapKind::Henon => Space::Plane2,
        }
    }

    /// One noisy step. `xi` holds the standardized draws in `[-1, 1]`; the
    /// second entry is only read by 2-D maps with independent noise.
    pub fn step(&self, noise: &NoiseSpec, x: State, xi: [f64; 2]) -> Result<State> {
        if x.coords.dim() != self.space().dim() {
            return Err(Error::config("state dimension does not match the map's space"));
        }
        Ok(self.apply_alive(noise, x, xi))
    }

    /// The unperturbed map.
    pub fn deterministic(&self, x: State) -> Result<State> {
        self.step(&NoiseSpec::deterministic(), x, [0.0, 0.0])
    }

    fn apply(&self, c: Coords, w1: f64, w2: f64) -> State {
        match (*self, c) {
            (MapSpec::Rotation { alpha }, Coords::One(x)) => State::one(wrap_unit(x + alpha + w1)),
            (MapSpec::TernaryShift, Coords::One(x)) => State::one(wrap_unit(3.0 * x + w1)),
            (MapSpec::Quadratic { a }, Coords::One(x)) => {
                let y = 1.0 - a * x * x + w1;
                State::one(y).escaped_if(!(y.abs() <= QUADRATIC_ESCAPE_RADIUS))
            }
            (MapSpec::PomeauManneville { alpha }, Coords::One(x)) => {
                State::one(wrap_unit(x + powf(x, 1.0 + alpha) + w1))
            }
            (MapSpec::Lsv { alpha }, Coords::One(x)) => {
                let y = if x < 0.5 {
                    x * (1.0 + powf(2.0, alpha) * powf(x, alpha))
                } else {
                    2.0 * x - 1.0
                };
                State::one(wrap_unit(y + w1))
            }
            (MapSpec::CuspLorenz { a }, Coords::One(x)) => {
                let y = cusp(a, x) + w1;
                State::one(y).escaped_if(!(-1.0..=1.0).contains(&y))
            }
            (MapSpec::ArnoldCat, Coords::Two([x, y])) => {
                State::two(wrap_unit(2.0 * x + y + w1), wrap_unit(x + y + w2))
            }
            (MapSpec::Henon { a, b }, Coords::Two([x, y])) => {
                let nx = y + 1.0 - a * x * x + w1;
                let ny = b * x;
                State::two(nx, ny).escaped_if(!(nx.abs() <= HENON_ESCAPE_RADIUS))
            }
            _ => unreachable!("dimension checked by step"),
        }
    }

    /// Jacobian of the unperturbed map at `x` (1-D maps fill `[0][0]`).
    pub fn jacobian(&self, x: &Coords) -> [[f64; 2]; 2] {
        let one = |d: f64| [[d, 0.0], [0.0, 0.0]];
        match (*self, *x) {
            (MapSpec::Rotation { .. }, _) => one(1.0),
            (MapSpec::TernaryShift, _) => one(3.0),
            (MapSpec::Quadratic { a }, Coords::One(x)) => one(-2.0 * a * x),
            (MapSpec::PomeauManneville { alpha }, Coords::One(x)) => {
                one(1.0 + (1.0 + alpha) * powf(x, alpha))
            }
            (MapSpec::Lsv { alpha }, Coords::One(x)) => {
                if x < 0.5 {
                    one(1.0 + (1.0 + alpha) * powf(2.0, alpha) * powf(x, alpha))
                } else {
                    one(2.0)
                }
            }
            (MapSpec::CuspLorenz { a }, Coords::One(x)) => one(a * powf(x.abs(), a - 1.0)),
            (MapSpec::ArnoldCat, _) => [[2.0, 1.0], [1.0, 1.0]],
            (MapSpec::Henon { a, b }, Coords::Two([x, _])) => [[-2.0 * a * x, 1.0], [b, 0.0]],
            _ => [[f64::NAN; 2]; 2],
        }
    }

    /// A starting point from which a long run settles onto the stationary
    /// measure.
    pub fn initial_guess(&self, rng: &mut NoiseRng) -> State {
        match self.kind() {
            MapKind::Rotation | MapKind::TernaryShift | MapKind::PomeauManneville | MapKind::Lsv => {
                State::one(rng.uniform())
            }
            MapKind::Quadratic => State::one(rng.symmetric() * 0.5),
            MapKind::CuspLorenz => State::one(rng.symmetric()),
            MapKind::ArnoldCat => State::two(rng.uniform(), rng.uniform()),
            MapKind::Henon => State::two(0.1 * rng.symmetric(), 0.1 * rng.symmetric()),
        }
    }
}

fn cusp(a: f64, x: f64) -> f64 {
    if x > 0.0 {
        -a + powf(x, a)
    } else if x < 0.0 {
        a - powf(-x, a)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NoiseCoupling {
    /// One draw per step added to every coordinate.
    #[default]
    Shared,
    /// An independent draw per coordinate.
    Independent,
}

/// Additive noise uniform on `[−ε, ε]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub epsilon: f64,
    pub coupling: NoiseCoupling,
}

impl NoiseSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::config("noise intensity must be finite and >= 0"));
        }
        Ok(Self { epsilon, coupling: NoiseCoupling::Shared })
    }

    pub fn deterministic() -> Self {
        Self { epsilon: 0.0, coupling: NoiseCoupling::Shared }
    }

    pub fn with_coupling(mut self, coupling: NoiseCoupling) -> Self {
        self.coupling = coupling;
        self
    }

    /// `ε = 10^{−p}`.
    pub fn from_exponent(p: f64) -> Result<Self> {
        Self::new(powf(10.0, -p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coords {
    One(f64),
    Two([f64; 2]),
}

impl Coords {
    pub fn dim(&self) -> usize {
        match self {
            Coords::One(_) => 1,
            Coords::Two(_) => 2,
        }
    }

    pub fn as_array(&self) -> [f64; 2] {
        match *self {
            Coords::One(x) => [x, 0.0],
            Coords::Two(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Alive,
    Escaped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub coords: Coords,
    pub status: Status,
}

impl State {
    pub fn one(x: f64) -> Self {
        Self { coords: Coords::One(x), status: Status::Alive }
    }

    pub fn two(x: f64, y: f64) -> Self {
        Self { coords: Coords::Two([x, y]), status: Status::Alive }
    }

    pub fn is_alive(&self) -> bool {
        self.status == Status::Alive
    }

    /// First coordinate.
    pub fn x(&self) -> f64 {
        self.coords.as_array()[0]
    }

    fn escaped_if(mut self, escaped: bool) -> Self {
        if escaped {
            self.status = Status::Escaped;
        }
        self
    }

    /// Whether the state lies in `space` (periodic coordinates in `[0, 1)`).
    pub fn fits(&self, space: Space) -> bool {
        if self.coords.dim() != space.dim() {
            return false;
        }
        let c = self.coords.as_array();
        let coords = &c[..space.dim()];
        if space.is_periodic() {
            coords.iter().all(|v| (0.0..1.0).contains(v))
        } else {
            coords.iter().all(|v| v.is_finite())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitConfig {
    pub length: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Stream id within `seed`; realization `i` of an ensemble uses its own.
    pub stream: u64,
}

impl OrbitConfig {
    pub fn new(length: usize, seed: u64) -> Self {
        Self { length, burn_in: 0, seed, stream: 0 }
    }
}

/// Lazily generated random orbit. Yields `x0` first (after any burn-in).
#[derive(Debug, Clone)]
pub struct Orbit {
    map: MapSpec,
    noise: NoiseSpec,
    state: State,
    rng: NoiseRng,
    remaining: usize,
}

impl Orbit {
    pub fn new(map: MapSpec, noise: NoiseSpec, x0: State, cfg: &OrbitConfig) -> Result<Self> {
        map.validate()?;
        if !x0.fits(map.space()) {
            return Err(Error::config("initial state is not a point of the map's space"));
        }
        let mut orbit = Self {
            map,
            noise,
            state: x0,
            rng: NoiseRng::new(cfg.seed, cfg.stream),
            remaining: 0,
        };
        for _ in 0..cfg.burn_in {
            orbit.advance();
        }
        orbit.remaining = cfg.length;
        Ok(orbit)
    }

    #[inline]
    fn advance(&mut self) {
        let xi = [self.rng.symmetric(), self.rng.symmetric()];
        // dimension was validated at construction
        self.state = self.map.apply_alive(&self.noise, self.state, xi);
    }

    pub fn current(&self) -> State {
        self.state
    }
}

impl MapSpec {
    #[inline]
    fn apply_alive(&self, noise: &NoiseSpec, x: State, xi: [f64; 2]) -> State {
        if x.status == Status::Escaped {
            return x;
        }
        let w1 = noise.epsilon * xi[0];
        let w2 = match noise.coupling {
            NoiseCoupling::Shared => w1,
            NoiseCoupling::Independent => noise.epsilon * xi[1],
        };
        self.apply(x.coords, w1, w2)
    }
}

impl Iterator for Orbit {
    type Item = State;

    fn next(&mut self) -> Option<State> {
        if self.remaining == 0 {
            return None;
        }
        let out = self.state;
        self.remaining -= 1;
        if self.remaining > 0 {
            self.advance();
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (self.remaining, Some(self.remaining))
    }
}

impl ExactSizeIterator for Orbit {}

/// Collects a random orbit of `cfg.length` states.
pub fn random_orbit(map: &MapSpec, noise: &NoiseSpec, x0: State, cfg: &OrbitConfig) -> Result<Vec<State>> {
    if cfg.length == 0 {
        return Err(Error::config("orbit length must be >= 1"));
    }
    Ok(Orbit::new(*map, *noise, x0, cfg)?.collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationarySample {
    pub states: Vec<State>,
    /// Times the run escaped and was re-initialized.
    pub restarts: usize,
}

/// Draws `count` states from one long noisy run, `DECORRELATION_STRIDE`
/// steps apart, after discarding `burn_in` steps. An escaping run is
/// re-initialized (and burned in again) up to `MAX_STATIONARY_RESTARTS` times;
/// the sample may then hold fewer than `count` states.
pub fn sample_stationary(
    map: &MapSpec,
    noise: &NoiseSpec,
    burn_in: usize,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<StationarySample> {
    map.validate()?;
    if count == 0 {
        return Err(Error::config("stationary sample count must be >= 1"));
    }
    let mut rng = NoiseRng::new(seed, stream);
    let mut states = Vec::with_capacity(count);
    let mut restarts = 0;
    'outer: while states.len() < count {
        let mut x = map.initial_guess(&mut rng);
        for _ in 0..burn_in {
            x = map.apply_alive(noise, x, [rng.symmetric(), rng.symmetric()]);
            if !x.is_alive() {
                restarts += 1;
                if restarts > MAX_STATIONARY_RESTARTS {
                    break 'outer;
                }
                continue 'outer;
            }
        }
        while states.len() < count {
            for _ in 0..DECORRELATION_STRIDE {
                x = map.apply_alive(noise, x, [rng.symmetric(), rng.symmetric()]);
            }
            if !x.is_alive() {
                restarts += 1;
                if restarts > MAX_STATIONARY_RESTARTS {
                    break 'outer;
                }
                continue 'outer;
            }
            states.push(x);
        }
    }
    if states.is_empty() {
        return Err(Error::EscapeDominates { restarts });
    }
    Ok(StationarySample { states, restarts })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det_step(map: MapSpec, x: State) -> State {
        map.deterministic(x).unwrap()
    }

    #[test]
    fn step_examples() {
        let r = MapSpec::rotation(0.25).unwrap();
        assert_eq!(det_step(r, State::one(0.5)).x(), 0.75);

        let h = MapSpec::henon_classic();
        let s = det_step(h, State::two(0.0, 0.0));
        assert_eq!(s.coords, Coords::Two([1.0, 0.0]));

        let t = det_step(MapSpec::TernaryShift, State::one(0.9));
        assert!((t.x() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_a_configuration_error() {
        let err = MapSpec::TernaryShift
            .step(&NoiseSpec::deterministic(), State::two(0.1, 0.2), [0.0; 2])
            .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn parameter_invariants() {
        assert!(MapSpec::quadratic(0.0).is_err());
        assert!(MapSpec::pomeau_manneville(1.5).is_err());
        assert!(MapSpec::pomeau_manneville(1.0).is_ok());
        assert!(MapSpec::lsv(0.0).is_err());
        assert!(MapSpec::cusp_lorenz(2.0).is_err());
        assert!(MapSpec::henon(1.4, 0.0).is_err());
        assert!(NoiseSpec::new(-0.1).is_err());
    }

    #[test]
    fn spaces_follow_kinds() {
        assert_eq!(MapSpec::TernaryShift.space(), Space::Circle);
        assert_eq!(MapSpec::Lsv { alpha: 0.5 }.space(), Space::Circle);
        assert_eq!(MapSpec::Quadratic { a: 0.3 }.space(), Space::Interval);
        assert_eq!(MapSpec::CuspLorenz { a: 0.9 }.space(), Space::Interval);
        assert_eq!(MapSpec::ArnoldCat.space(), Space::Torus2);
        assert_eq!(MapSpec::henon_classic().space(), Space::Plane2);
    }

    #[test]
    fn henon_escapes_and_stays_escaped() {
        let h = MapSpec::henon_classic();
        let s = det_step(h, State::two(5.0, 0.0));
        assert_eq!(s.status, Status::Escaped);
        let s2 = h.step(&NoiseSpec::new(0.1).unwrap(), s, [0.3, 0.3]).unwrap();
        assert_eq!(s2, s);
    }

    #[test]
    fn cusp_leaving_the_interval_escapes() {
        let c = MapSpec::cusp_lorenz(0.99).unwrap();
        // f(0+) is close to -0.99; a push of -0.05 leaves [-1, 1]
        let s = c.step(&NoiseSpec::new(0.05).unwrap(), State::one(1e-9), [-1.0, 0.0]).unwrap();
        assert_eq!(s.status, Status::Escaped);
        let inside = det_step(c, State::one(0.5));
        assert!(inside.is_alive());
    }

    #[test]
    fn cat_noise_coupling() {
        let noise = NoiseSpec::new(0.1).unwrap();
        let shared = MapSpec::ArnoldCat.step(&noise, State::two(0.0, 0.0), [0.5, -0.5]).unwrap();
        assert_eq!(shared.coords, Coords::Two([0.05, 0.05]));
        let ind = MapSpec::ArnoldCat
            .step(&noise.with_coupling(NoiseCoupling::Independent), State::two(0.0, 0.0), [0.5, -0.5])
            .unwrap();
        let [x, y] = ind.coords.as_array();
        assert!((x - 0.05).abs() < 1e-15 && (y - 0.95).abs() < 1e-15);
    }

    #[test]
    fn deterministic_rotation_orbit() {
        let orbit = random_orbit(
            &MapSpec::rotation(0.1).unwrap(),
            &NoiseSpec::deterministic(),
            State::one(0.0),
            &OrbitConfig::new(10, 3),
        )
        .unwrap();
        assert_eq!(orbit.len(), 10);
        for (k, s) in orbit.iter().enumerate() {
            assert!((s.x() - 0.1 * k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_is_seed_deterministic() {
        let noise = NoiseSpec::new(1e-3).unwrap();
        let cfg = OrbitConfig::new(1000, 42);
        let a = random_orbit(&MapSpec::TernaryShift, &noise, State::one(0.3), &cfg).unwrap();
        let b = random_orbit(&MapSpec::TernaryShift, &noise, State::one(0.3), &cfg).unwrap();
        assert_eq!(a, b);
        let other = OrbitConfig { stream: 1, ..cfg };
        let c = random_orbit(&MapSpec::TernaryShift, &noise, State::one(0.3), &other).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn orbit_rejects_out_of_space_start() {
        let cfg = OrbitConfig::new(10, 0);
        let err = random_orbit(&MapSpec::TernaryShift, &NoiseSpec::deterministic(), State::one(1.5), &cfg);
        assert!(err.is_err());
        assert!(random_orbit(&MapSpec::TernaryShift, &NoiseSpec::deterministic(), State::one(0.5), &OrbitConfig::new(0, 0)).is_err());
    }

    #[test]
    fn escaped_orbit_remains_escaped() {
        let cfg = OrbitConfig::new(50, 9);
        let orbit =
            random_orbit(&MapSpec::henon_classic(), &NoiseSpec::deterministic(), State::two(3.0, 0.0), &cfg)
                .unwrap();
        let first = orbit.iter().position(|s| !s.is_alive()).unwrap();
        assert!(orbit[first..].iter().all(|s| !s.is_alive()));
    }

    #[test]
    fn henon_strong_noise_reports_escape_instead_of_crashing() {
        let noise = NoiseSpec::new(0.1).unwrap();
        match sample_stationary(&MapSpec::henon_classic(), &noise, 10_000, 200, 5, 0) {
            Ok(s) => assert!(s.restarts > 0),
            Err(Error::EscapeDominates { restarts }) => assert!(restarts > 0),
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
