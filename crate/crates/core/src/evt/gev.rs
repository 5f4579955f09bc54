use crate::math::{exp, exp_m1, ln, ln_1p};
use crate::rng::NoiseRng;

/// Below this `|κ|` the distribution function and quantile use the Gumbel
/// formulas. The density needs no switch: its series in `κ` is exact at 0.
pub const GUMBEL_SWITCH: f64 = 1e-6;

/// GEV distribution `F(x) = exp{−[1 + κ (x − ν)/σ]^{−1/κ}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevParams {
    /// κ
    pub shape: f64,
    /// σ > 0
    pub scale: f64,
    /// ν
    pub loc: f64,
}

impl GevParams {
    pub fn new(shape: f64, scale: f64, loc: f64) -> Self {
        Self { shape, scale, loc }
    }

    pub fn gumbel(scale: f64, loc: f64) -> Self {
        Self { shape: 0.0, scale, loc }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.shape, self.scale, self.loc]
    }

    /// `1 + κ (x − ν)/σ > 0` (always true in the Gumbel limit).
    #[inline]
    pub fn in_support(&self, x: f64) -> bool {
        self.shape.abs() < GUMBEL_SWITCH || 1.0 + self.shape * (x - self.loc) / self.scale > 0.0
    }

    #[inline]
    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.loc) / self.scale;
        let k = self.shape;
        if k.abs() < GUMBEL_SWITCH {
            return exp(-exp(-z));
        }
        let kz = k * z;
        if 1.0 + kz <= 0.0 {
            return if k > 0.0 { 0.0 } else { 1.0 };
        }
        exp(-exp(-ln_1p(kz) / k))
    }

    #[inline]
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if self.scale <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let z = (x - self.loc) / self.scale;
        match reduced(self.shape, z) {
            Some(a) => -ln(self.scale) - (1.0 + self.shape) * a - exp(-a),
            None => f64::NEG_INFINITY,
        }
    }

    /// Inverse CDF for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let y = ln(-ln(p));
        if self.shape.abs() < GUMBEL_SWITCH {
            self.loc - self.scale * y
        } else {
            self.loc + self.scale * exp_m1(-self.shape * y) / self.shape
        }
    }

    pub fn sample(&self, rng: &mut NoiseRng) -> f64 {
        self.quantile(rng.uniform_open())
    }

    /// Log-likelihood of `data`.
    pub fn log_likelihood(&self, data: &[f64]) -> f64 {
        if !(self.scale > 0.0) {
            return f64::NEG_INFINITY;
        }
        let mut s = 0.0;
        for &x in data {
            let l = self.ln_pdf(x);
            if l == f64::NEG_INFINITY {
                return l;
            }
            s += l;
        }
        s
    }

    /// Analytic gradient `[∂κ, ∂σ, ∂ν]` of the log-likelihood. Smooth through
    /// `κ = 0`.
    pub fn log_likelihood_gradient(&self, data: &[f64]) -> [f64; 3] {
        let (k, s, nu) = (self.shape, self.scale, self.loc);
        let mut g = [0.0; 3];
        for &x in data {
            let z = (x - nu) / s;
            let Some(a) = reduced(k, z) else {
                return [f64::NAN; 3];
            };
            let t = 1.0 + k * z;
            let w = exp(-a);
            let common = 1.0 + k - w;
            g[0] += -a + reduced_dk(k, z) * (w - 1.0 - k);
            g[1] += (-1.0 + z * common / t) / s;
            g[2] += common / (s * t);
        }
        g
    }
}

/// Below this `|κ|` the reduced variable is expanded in powers of `κ`.
const SERIES_SWITCH: f64 = 1e-3;

/// `A(κ, z) = log(1 + κ z)/κ`, so that `log f = −log σ − (1 + κ) A − e^{−A}`.
/// Exactly `z` at `κ = 0`; `None` outside the support.
#[inline]
fn reduced(k: f64, z: f64) -> Option<f64> {
    let kz = k * z;
    if 1.0 + kz <= 0.0 {
        return None;
    }
    let ak = k.abs();
    Some(if ak < SERIES_SWITCH {
        // z − κz²/2 + κ²z³/3 − κ³z⁴/4 + κ⁴z⁵/5
        z * (1.0 + kz * (-0.5 + kz * (1.0 / 3.0 + kz * (-0.25 + kz * 0.2))))
    } else {
        ln_1p(kz) / k
    })
}

/// `∂A/∂κ`; `−z²/2` at `κ = 0`.
#[inline]
fn reduced_dk(k: f64, z: f64) -> f64 {
    let ak = k.abs();
    let kz = k * z;
    if ak < SERIES_SWITCH {
        // −z²/2 + 2κz³/3 − 3κ²z⁴/4 + 4κ³z⁵/5
        z * z * (-0.5 + kz * (2.0 / 3.0 + kz * (-0.75 + kz * 0.8)))
    } else {
        z / (k * (1.0 + kz)) - ln_1p(kz) / (k * k)
    }
}
