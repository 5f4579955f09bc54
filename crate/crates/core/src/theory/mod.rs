//! Closed-form predictions and numerical checks of analytic results.

mod clustering;
mod correlation;

pub use clustering::{annulus_entrances, default_kn, dprime_sum, MIN_EXCEEDANCES};
pub use correlation::{
    correlation_bound, fourier_correlation, lemma_threshold, monte_carlo_correlation, sinc_kernel, CorrelationMethod,
    CorrelationReport, Interval, DEFAULT_TRUNCATION, MIN_MC_SAMPLES,
};

use crate::dynamics::{MapSpec, State};
use crate::observables::raw_distance;
use crate::{Error, Result};

/// Tolerance on `|f^p(z) − z|` for a point to count as periodic.
pub const PERIODICITY_TOLERANCE: f64 = 1e-9;

/// How the local scaling of the stationary measure at the target is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    /// Absolutely continuous measure on a 1-D space.
    OneD,
    /// Absolutely continuous measure on a 2-D space.
    TwoD,
    /// Local dimension `d_L(z)`.
    LocalDimension(f64),
}

impl Basis {
    pub fn dimension(&self) -> f64 {
        match *self {
            Basis::OneD => 1.0,
            Basis::TwoD => 2.0,
            Basis::LocalDimension(d) => d,
        }
    }
}

/// GEV parameters predicted for `g1`, `g2`, `g3` with exponent `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedParams {
    pub kappa_g1: f64,
    pub kappa_g2: f64,
    /// Always `−kappa_g2`.
    pub kappa_g3: f64,
    pub sigma_g1: f64,
    pub basis: Basis,
}

/// `κ(g1) = 0`, `κ(g2) = −κ(g3) = 1/(a d)`, `σ(g1) = 1/d`.
pub fn expected_params(basis: Basis, exponent: f64) -> Result<ExpectedParams> {
    let d = basis.dimension();
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::config("exponent must be positive"));
    }
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::config("local dimension must be positive"));
    }
    let k = 1.0 / (exponent * d);
    Ok(ExpectedParams { kappa_g1: 0.0, kappa_g2: k, kappa_g3: -k, sigma_g1: 1.0 / d, basis })
}

/// `θ = 1 − 1/|det Df^p(z)|` at a repelling periodic point of prime period
/// `p` of the unperturbed map.
pub fn theoretical_ei(map: &MapSpec, z: &State, period: usize) -> Result<f64> {
    map.validate()?;
    if period == 0 {
        return Err(Error::config("period must be >= 1"));
    }
    if !z.fits(map.space()) || !z.is_alive() {
        return Err(Error::config("target does not belong to the map's space"));
    }
    let space = map.space();
    let mut x = *z;
    let mut product = [[1.0, 0.0], [0.0, 1.0]];
    for q in 1..=period {
        let j = map.jacobian(&x.coords);
        let j = if space.dim() == 1 { [[j[0][0], 0.0], [0.0, 1.0]] } else { j };
        product = matmul(&j, &product);
        x = map.deterministic(x)?;
        if !x.is_alive() {
            return Err(Error::EscapedState);
        }
        let residual = raw_distance(space, &x.coords, &z.coords);
        if q < period && period % q == 0 && residual <= PERIODICITY_TOLERANCE {
            return Err(Error::config("target has a smaller period than the one given"));
        }
        if q == period && !(residual <= PERIODICITY_TOLERANCE) {
            return Err(Error::NotPeriodic { period, residual });
        }
    }
    let det = (product[0][0] * product[1][1] - product[0][1] * product[1][0]).abs();
    if !(det > 1.0) {
        return Err(Error::NotRepelling { det });
    }
    Ok(1.0 - 1.0 / det)
}

fn matmul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    core::array::from_fn(|i| core::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}
