//! Distance observables `φ = g(dist(·, z))` and their extreme-value scalings.

use alloc::vec::Vec;

use crate::dynamics::{Coords, Space, State};
use crate::evt::GevParams;
use crate::math::{acos, exp, ln, powf, sqrt, PI};
use crate::{Error, Result};

/// Minimum sample size for an empirical measure.
pub const MIN_EMPIRICAL_SAMPLES: usize = 1000;

/// Distance between two live states of `space`.
///
/// Circle: arc distance. Torus: Euclidean norm of per-axis circle distances.
/// Interval and plane: Euclidean.
pub fn distance(space: Space, x: &State, z: &State) -> Result<f64> {
    if !x.is_alive() || !z.is_alive() {
        return Err(Error::EscapedState);
    }
    if x.coords.dim() != space.dim() || z.coords.dim() != space.dim() {
        return Err(Error::config("state dimension does not match the space"));
    }
    Ok(raw_distance(space, &x.coords, &z.coords))
}

#[inline]
pub(crate) fn raw_distance(space: Space, x: &Coords, z: &Coords) -> f64 {
    match (space, x, z) {
        (Space::Circle, Coords::One(a), Coords::One(b)) => circle_gap(*a, *b),
        (Space::Interval, Coords::One(a), Coords::One(b)) => (a - b).abs(),
        (Space::Torus2, Coords::Two(a), Coords::Two(b)) => {
            let dx = circle_gap(a[0], b[0]);
            let dy = circle_gap(a[1], b[1]);
            sqrt(dx * dx + dy * dy)
        }
        (Space::Plane2, Coords::Two(a), Coords::Two(b)) => {
            let dx = a[0] - b[0];
            let dy = a[1] - b[1];
            sqrt(dx * dx + dy * dy)
        }
        _ => f64::NAN,
    }
}

#[inline]
fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d > 0.5 {
        1.0 - d
    } else {
        d
    }
}

/// Shape of `g` in `φ = g(dist)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `−log y` (Gumbel domain)
    G1,
    /// `y^{−1/a}` (Fréchet domain)
    G2 { a: f64 },
    /// `C − y^{1/a}` (Weibull domain)
    G3 { a: f64, c: f64 },
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::G1 => "g1",
            Family::G2 { .. } => "g2",
            Family::G3 { .. } => "g3",
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match *self {
            Family::G1 => None,
            Family::G2 { a } | Family::G3 { a, .. } => Some(a),
        }
    }

    /// `g(y)`; `y = 0` gives `+∞` for G1/G2 and `C` for G3.
    #[inline]
    pub fn apply(&self, y: f64) -> f64 {
        match *self {
            Family::G1 => -ln(y),
            Family::G2 { a } => powf(y, -1.0 / a),
            Family::G3 { a, c } => c - powf(y, 1.0 / a),
        }
    }

    /// The radius `r` with `g(r) = u`; the exceedance set `{φ > u}` is the
    /// open ball of that radius.
    pub fn radius(&self, u: f64) -> f64 {
        match *self {
            Family::G1 => exp(-u),
            Family::G2 { a } => powf(u, -a),
            Family::G3 { a, c } => {
                if u >= c {
                    0.0
                } else {
                    powf(c - u, a)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Family::G1 => Ok(()),
            Family::G2 { a } | Family::G3 { a, .. } if !(a > 0.0 && a.is_finite()) => {
                Err(Error::config("observable exponent a must be > 0"))
            }
            Family::G3 { c, .. } if !c.is_finite() => Err(Error::config("observable offset C must be finite")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable {
    pub family: Family,
    pub target: State,
    pub space: Space,
}

impl Observable {
    pub fn new(family: Family, target: State, space: Space) -> Result<Self> {
        family.validate()?;
        if !target.is_alive() {
            return Err(Error::EscapedState);
        }
        if target.coords.dim() != space.dim() {
            return Err(Error::config("target dimension does not match the space"));
        }
        Ok(Self { family, target, space })
    }

    pub fn evaluate(&self, x: &State) -> Result<f64> {
        let d = distance(self.space, x, &self.target)?;
        Ok(self.family.apply(d))
    }
}

/// A model of the stationary measure used to turn tail probabilities into
/// thresholds.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureModel {
    /// Lebesgue on the circle.
    UniformCircle,
    /// Lebesgue on the 2-torus.
    UniformTorus2,
    /// Samples of the stationary measure.
    Empirical(Vec<State>),
}

impl MeasureModel {
    pub fn empirical(states: Vec<State>) -> Result<Self> {
        if states.len() < MIN_EMPIRICAL_SAMPLES {
            return Err(Error::InsufficientData { needed: MIN_EMPIRICAL_SAMPLES, got: states.len() });
        }
        Ok(MeasureModel::Empirical(states))
    }

    fn check_space(&self, obs: &Observable) -> Result<()> {
        let ok = match self {
            MeasureModel::UniformCircle => obs.space == Space::Circle,
            MeasureModel::UniformTorus2 => obs.space == Space::Torus2,
            MeasureModel::Empirical(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("measure model does not live on the observable's space"))
        }
    }

    /// Measure of the open ball of radius `r` for the uniform models.
    pub fn ball_mass(&self, r: f64) -> Option<f64> {
        match self {
            MeasureModel::UniformCircle => Some((2.0 * r).clamp(0.0, 1.0)),
            MeasureModel::UniformTorus2 => Some(torus_disk_area(r)),
            MeasureModel::Empirical(_) => None,
        }
    }
}

/// Area of `{p : torus distance(p, z) < r}`, i.e. a disk clipped to the unit
/// square centred on `z`.
pub fn torus_disk_area(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let h = 0.5;
    if r <= h {
        return PI * r * r;
    }
    if r >= core::f64::consts::FRAC_1_SQRT_2 {
        return 1.0;
    }
    let segment = r * r * acos(h / r) - h * sqrt(r * r - h * h);
    PI * r * r - 4.0 * segment
}

fn torus_radius_for_area(p: f64) -> f64 {
    if p <= PI / 4.0 {
        return sqrt(p / PI);
    }
    let (mut lo, mut hi) = (0.5, core::f64::consts::FRAC_1_SQRT_2);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if torus_disk_area(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Level `u_n` with `n P(X_0 > u_n) = tau` under `model`.
///
/// Exact for the uniform models. The empirical model uses the Weibull
/// plotting position: the k-th largest of N sampled values is exceeded with
/// probability `k/(N+1)`; intermediate levels are interpolated linearly.
pub fn threshold_for_tau(model: &MeasureModel, obs: &Observable, n: usize, tau: f64) -> Result<f64> {
    if !(tau > 0.0) || n == 0 {
        return Err(Error::config("need tau > 0 and n >= 1"));
    }
    model.check_space(obs)?;
    let p = tau / n as f64;
    if p > 1.0 {
        return Err(Error::InfeasibleThreshold { ratio: p });
    }
    match model {
        MeasureModel::UniformCircle => Ok(obs.family.apply(p / 2.0)),
        MeasureModel::UniformTorus2 => Ok(obs.family.apply(torus_radius_for_area(p))),
        MeasureModel::Empirical(states) => {
            let mut values = Vec::with_capacity(states.len());
            for s in states {
                values.push(obs.evaluate(s)?);
            }
            empirical_upper_quantile(&mut values, p)
        }
    }
}

fn empirical_upper_quantile(values: &mut [f64], p: f64) -> Result<f64> {
    let n = values.len();
    if n < MIN_EMPIRICAL_SAMPLES {
        return Err(Error::InsufficientData { needed: MIN_EMPIRICAL_SAMPLES, got: n });
    }
    // descending
    values.sort_by(|a, b| b.total_cmp(a));
    let k = p * (n + 1) as f64;
    if k < 1.0 {
        let needed = (1.0 / p) as usize;
        return Err(Error::InsufficientData { needed, got: n });
    }
    if k >= n as f64 {
        return Ok(values[n - 1]);
    }
    let lo = k as usize; // 1-based rank
    let frac = k - lo as f64;
    let upper = values[lo - 1];
    let lower = values[lo];
    Ok(upper + frac * (lower - upper))
}

/// Domain of attraction of the block maxima, with the tail exponent `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitLaw {
    Gumbel,
    Frechet { alpha: f64 },
    Weibull { alpha: f64 },
}

impl LimitLaw {
    /// `τ(y)`: `e^{−y}`, `y^{−α}` or `(−y)^α`.
    pub fn tau(&self, y: f64) -> f64 {
        match *self {
            LimitLaw::Gumbel => exp(-y),
            LimitLaw::Frechet { alpha } => powf(y, -alpha),
            LimitLaw::Weibull { alpha } => powf(-y, alpha),
        }
    }

    /// Inverse of [`LimitLaw::tau`].
    pub fn y_for_tau(&self, tau: f64) -> f64 {
        match *self {
            LimitLaw::Gumbel => -ln(tau),
            LimitLaw::Frechet { alpha } => powf(tau, -1.0 / alpha),
            LimitLaw::Weibull { alpha } => -powf(tau, 1.0 / alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizingConstants {
    pub a_n: f64,
    pub b_n: f64,
    pub n: usize,
    pub law: LimitLaw,
}

impl NormalizingConstants {
    /// Level `u_n = y/a_n + b_n`.
    pub fn level(&self, y: f64) -> f64 {
        y / self.a_n + self.b_n
    }

    /// GEV parameters of unnormalized maxima implied by `(a_n, b_n)`:
    /// type 1 `κ = 0, ν = b_n, σ = 1/a_n`; type 2 `κ = 1/α, ν = b_n + 1/a_n,
    /// σ = κ/a_n`; type 3 `κ = −1/α, ν = b_n − 1/a_n, σ = −κ/a_n`.
    pub fn expected_gev(&self) -> GevParams {
        match self.law {
            LimitLaw::Gumbel => GevParams { shape: 0.0, scale: 1.0 / self.a_n, loc: self.b_n },
            LimitLaw::Frechet { alpha } => {
                let k = 1.0 / alpha;
                GevParams { shape: k, scale: k / self.a_n, loc: self.b_n + 1.0 / self.a_n }
            }
            LimitLaw::Weibull { alpha } => {
                let k = -1.0 / alpha;
                GevParams { shape: k, scale: -k / self.a_n, loc: self.b_n - 1.0 / self.a_n }
            }
        }
    }
}

/// `(a_n, b_n)` such that `a_n (M_n − b_n)` converges to the standard law of
/// the observable's family, for i.i.d. draws from `model`.
///
/// On a uniform `d`-dimensional model the ball of radius `r` has mass `c r^d`
/// (`c = 2` on the circle, `π` on the torus), so
/// G1: `a_n = d`, `b_n = log(c n)/d`; G2: `α = a d`, `a_n = (c n)^{−1/α}`,
/// `b_n = 0`; G3: `α = a d`, `a_n = (c n)^{1/α}`, `b_n = C`.
pub fn normalizing_constants(model: &MeasureModel, obs: &Observable, n: usize) -> Result<NormalizingConstants> {
    if n == 0 {
        return Err(Error::config("block length must be >= 1"));
    }
    model.check_space(obs)?;
    let nf = n as f64;
    let (c, d) = match model {
        MeasureModel::UniformCircle => (2.0, 1.0),
        MeasureModel::UniformTorus2 => (PI, 2.0),
        MeasureModel::Empirical(_) => return empirical_constants(model, obs, n),
    };
    Ok(match obs.family {
        Family::G1 => NormalizingConstants { a_n: d, b_n: ln(c * nf) / d, n, law: LimitLaw::Gumbel },
        Family::G2 { a } => {
            let alpha = a * d;
            NormalizingConstants { a_n: powf(c * nf, -1.0 / alpha), b_n: 0.0, n, law: LimitLaw::Frechet { alpha } }
        }
        Family::G3 { a, c: offset } => {
            let alpha = a * d;
            NormalizingConstants { a_n: powf(c * nf, 1.0 / alpha), b_n: offset, n, law: LimitLaw::Weibull { alpha } }
        }
    })
}

fn empirical_constants(model: &MeasureModel, obs: &Observable, n: usize) -> Result<NormalizingConstants> {
    let u1 = threshold_for_tau(model, obs, n, 1.0)?;
    let ue = threshold_for_tau(model, obs, n, exp(-1.0))?;
    let out = match obs.family {
        Family::G1 => NormalizingConstants { a_n: 1.0 / (ue - u1), b_n: u1, n, law: LimitLaw::Gumbel },
        Family::G2 { .. } => {
            let alpha = 1.0 / ln(ue / u1);
            NormalizingConstants { a_n: 1.0 / u1, b_n: 0.0, n, law: LimitLaw::Frechet { alpha } }
        }
        Family::G3 { c, .. } => {
            let alpha = -1.0 / ln((c - ue) / (c - u1));
            NormalizingConstants { a_n: 1.0 / (c - u1), b_n: c, n, law: LimitLaw::Weibull { alpha } }
        }
    };
    if !(out.a_n > 0.0 && out.a_n.is_finite()) {
        return Err(Error::InsufficientData { needed: MIN_EMPIRICAL_SAMPLES, got: 0 });
    }
    Ok(out)
}
