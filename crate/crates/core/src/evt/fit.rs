use alloc::vec::Vec;

use super::block::{BlockMaximaSeries, MIN_BLOCKS_FOR_FIT};
use super::gev::{GevParams, GUMBEL_SWITCH};
use super::ks::KsOutcome;
use crate::math::{exp, gamma, ln, mean_std, powf, sqrt, EULER_GAMMA, LN_2, PI};
use crate::{Error, Result};

/// Iteration cap of the simplex stage.
pub const FIT_MAX_ITERATIONS: usize = 500;
/// Simplex diameter (in standardized parameters) at which the simplex stops.
pub const FIT_PARAM_TOLERANCE: f64 = 1e-8;

const NEWTON_MAX_STEPS: usize = 50;
const HESSIAN_STEP: f64 = 1e-5;
/// Per-observation gradient norm accepted at the optimum (standardized data).
const GRADIENT_TOLERANCE: f64 = 1e-6;
const Z_95: f64 = 1.959_963_984_540_054;

/// 95% Wald intervals `[lo, hi]` per parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamIntervals {
    pub shape: [f64; 2],
    pub scale: [f64; 2],
    pub loc: [f64; 2],
}

/// Maximum likelihood GEV fit of a block maxima sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GevFit {
    pub params: GevParams,
    /// Standard errors of `[κ, σ, ν]` from the observed information; NaN when
    /// the information matrix is not positive definite.
    pub std_errors: [f64; 3],
    pub ci: ParamIntervals,
    pub loglik: f64,
    /// Simplex plus Newton iterations.
    pub iterations: usize,
    pub sample_size: usize,
    pub ks: Option<KsOutcome>,
}

impl GevFit {
    pub fn kappa(&self) -> f64 {
        self.params.shape
    }

    pub fn sigma(&self) -> f64 {
        self.params.scale
    }

    pub fn nu(&self) -> f64 {
        self.params.loc
    }

    pub fn with_ks(mut self, ks: KsOutcome) -> Self {
        self.ks = Some(ks);
        self
    }

    /// `None` until a KS test has been attached.
    pub fn ks_pass(&self) -> Option<bool> {
        self.ks.map(|k| k.pass)
    }
}

/// Fits `(κ, σ, ν)` by maximum likelihood.
pub fn fit_gev_mle(bm: &BlockMaximaSeries) -> Result<GevFit> {
    fit_values(&bm.values)
}

/// `d_L = 1/σ` of a `g1` fit.
pub fn local_dimension_from_fit(fit: &GevFit) -> f64 {
    1.0 / fit.params.scale
}

pub(crate) fn fit_values(values: &[f64]) -> Result<GevFit> {
    let m = values.len();
    if m < MIN_BLOCKS_FOR_FIT {
        return Err(Error::InsufficientData { needed: MIN_BLOCKS_FOR_FIT, got: m });
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    let (mean, sd) = mean_std(values);
    if !(sd > 1e-12 && sd >= 1e-8 * mean.abs()) {
        return Err(Error::DegenerateSample { std_dev: sd });
    }
    let y: Vec<f64> = values.iter().map(|&v| (v - mean) / sd).collect();

    let start = starting_point(&y).ok_or(Error::SupportViolation)?;
    let objective = |t: &[f64; 3]| {
        let l = GevParams::new(t[0], exp(t[1]), t[2]).log_likelihood(&y);
        if l.is_nan() {
            f64::INFINITY
        } else {
            -l
        }
    };
    let x0 = [start.shape, ln(start.scale), start.loc];
    let simplex = nelder_mead(objective, x0, [0.1, 0.1, 0.1]);
    let mut p = GevParams::new(simplex.x[0], exp(simplex.x[1]), simplex.x[2]);
    let newton_steps = newton_polish(&mut p, &y);

    let g = p.log_likelihood_gradient(&y);
    let grad_norm = norm(g) / m as f64;
    let iterations = simplex.iterations + newton_steps;
    if !(grad_norm < GRADIENT_TOLERANCE) {
        return Err(Error::NonConvergence { iterations, grad_norm });
    }
    let loglik_std = p.log_likelihood(&y);
    if !loglik_std.is_finite() {
        return Err(Error::SupportViolation);
    }

    let params = GevParams::new(p.shape, sd * p.scale, mean + sd * p.loc);
    let jac = [1.0, sd, sd];
    let std_errors = match hessian(&p, &y).and_then(|h| invert_negative_definite(&h)) {
        Some(cov) => core::array::from_fn(|i| jac[i] * sqrt(cov[i][i])),
        None => [f64::NAN; 3],
    };
    let interval = |v: f64, se: f64| [v - Z_95 * se, v + Z_95 * se];
    Ok(GevFit {
        params,
        std_errors,
        ci: ParamIntervals {
            shape: interval(params.shape, std_errors[0]),
            scale: interval(params.scale, std_errors[1]),
            loc: interval(params.loc, std_errors[2]),
        },
        loglik: loglik_std - m as f64 * ln(sd),
        iterations,
        sample_size: m,
        ks: None,
    })
}

/// Hosking's probability-weighted-moment estimator on standardized data,
/// falling back to Gumbel moments. Always admissible for `y`.
fn starting_point(y: &[f64]) -> Option<GevParams> {
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let (mut b0, mut b1, mut b2) = (0.0, 0.0, 0.0);
    for (i, &v) in sorted.iter().enumerate() {
        let i = i as f64;
        b0 += v;
        b1 += v * i / (m - 1.0);
        b2 += v * i * (i - 1.0) / ((m - 1.0) * (m - 2.0));
    }
    b0 /= m;
    b1 /= m;
    b2 /= m;
    let c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - LN_2 / ln(3.0);
    let k = (7.8590 * c + 2.9554 * c * c).clamp(-0.9, 0.9);
    let pwm = if k.abs() < GUMBEL_SWITCH {
        let s = (2.0 * b1 - b0) / LN_2;
        GevParams::gumbel(s, b0 - EULER_GAMMA * s)
    } else {
        let g = gamma(1.0 + k);
        let s = (2.0 * b1 - b0) * k / (g * (1.0 - powf(2.0, -k)));
        GevParams::new(-k, s, b0 + s * (g - 1.0) / k)
    };

    let admissible = |p: &GevParams| p.scale > 0.0 && p.log_likelihood(y).is_finite();
    if pwm.scale.is_finite() && pwm.loc.is_finite() {
        let mut p = pwm;
        for _ in 0..8 {
            if admissible(&p) {
                return Some(p);
            }
            p.shape *= 0.5;
        }
    }
    let s = sqrt(6.0) / PI;
    let gumbel = GevParams::gumbel(s, -EULER_GAMMA * s);
    admissible(&gumbel).then_some(gumbel)
}

struct SimplexResult {
    x: [f64; 3],
    iterations: usize,
}

fn nelder_mead(f: impl Fn(&[f64; 3]) -> f64, x0: [f64; 3], step: [f64; 3]) -> SimplexResult {
    let mut v = [x0; 4];
    for i in 0..3 {
        v[i + 1][i] += step[i];
    }
    let mut fv = v.map(|x| f(&x));
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] { core::array::from_fn(|i| a[i] + t * (b[i] - a[i])) };

    let mut iterations = 0;
    while iterations < FIT_MAX_ITERATIONS {
        let mut order = [0usize, 1, 2, 3];
        order.sort_by(|&a, &b| fv[a].total_cmp(&fv[b]));
        v = order.map(|i| v[i]);
        fv = order.map(|i| fv[i]);
        let diameter = (1..4)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (v[i][j] - v[0][j]).abs())
            .fold(0.0, f64::max);
        if diameter < FIT_PARAM_TOLERANCE {
            break;
        }
        iterations += 1;

        let centroid: [f64; 3] = core::array::from_fn(|j| (v[0][j] + v[1][j] + v[2][j]) / 3.0);
        let xr = lerp(&centroid, &v[3], -1.0);
        let fr = f(&xr);
        if fr < fv[0] {
            let xe = lerp(&centroid, &v[3], -2.0);
            let fe = f(&xe);
            (v[3], fv[3]) = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < fv[2] {
            (v[3], fv[3]) = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < fv[3] {
            let xc = lerp(&centroid, &xr, 0.5);
            (xc, f(&xc))
        } else {
            let xc = lerp(&centroid, &v[3], 0.5);
            (xc, f(&xc))
        };
        if fc < fr.min(fv[3]) {
            (v[3], fv[3]) = (xc, fc);
            continue;
        }
        for i in 1..4 {
            v[i] = lerp(&v[0], &v[i], 0.5);
            fv[i] = f(&v[i]);
        }
    }
    let best = (0..4).min_by(|&a, &b| fv[a].total_cmp(&fv[b])).unwrap_or(0);
    SimplexResult { x: v[best], iterations }
}

/// Damped Newton iterations on the analytic gradient; returns the number of
/// accepted steps. `p` never moves to a point of lower likelihood.
fn newton_polish(p: &mut GevParams, y: &[f64]) -> usize {
    let mut ll = p.log_likelihood(y);
    let mut steps = 0;
    for _ in 0..NEWTON_MAX_STEPS {
        let g = p.log_likelihood_gradient(y);
        if !(norm(g) / (y.len() as f64) > 1e-13) {
            break;
        }
        let Some(h) = hessian(p, y) else { break };
        let Some(cov) = invert_negative_definite(&h) else { break };
        // ascent direction: -H⁻¹ g = cov · g
        let d: [f64; 3] = core::array::from_fn(|i| (0..3).map(|j| cov[i][j] * g[j]).sum());
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let cand = GevParams::new(p.shape + lambda * d[0], p.scale + lambda * d[1], p.loc + lambda * d[2]);
            let lc = cand.log_likelihood(y);
            if cand.scale > 0.0 && lc.is_finite() && lc >= ll {
                *p = cand;
                ll = lc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
        steps += 1;
        if norm(d) * lambda < 1e-15 {
            break;
        }
    }
    steps
}

/// Central-difference Hessian of the analytic gradient, which is smooth
/// through `κ = 0`.
fn hessian(p: &GevParams, y: &[f64]) -> Option<[[f64; 3]; 3]> {
    let base = *p;
    let mut h = [[0.0; 3]; 3];
    for j in 0..3 {
        let step = match j {
            1 => HESSIAN_STEP * base.scale,
            _ => HESSIAN_STEP * base.as_array()[j].abs().max(1.0),
        };
        let shifted = |sign: f64| {
            let mut a = base.as_array();
            a[j] += sign * step;
            GevParams::new(a[0], a[1], a[2]).log_likelihood_gradient(y)
        };
        let (gp, gm) = (shifted(1.0), shifted(-1.0));
        for i in 0..3 {
            h[i][j] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    for i in 0..3 {
        for j in 0..i {
            let s = 0.5 * (h[i][j] + h[j][i]);
            h[i][j] = s;
            h[j][i] = s;
        }
    }
    h.iter().flatten().all(|v| v.is_finite()).then_some(h)
}

/// `(−H)⁻¹` via Cholesky; `None` unless `−H` is positive definite.
fn invert_negative_definite(h: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let a: [[f64; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| -h[i][j]));
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut inv = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0; 3];
        e[col] = 1.0;
        let mut z = [0.0; 3];
        for i in 0..3 {
            z[i] = (e[i] - (0..i).map(|k| l[i][k] * z[k]).sum::<f64>()) / l[i][i];
        }
        for i in (0..3).rev() {
            inv[i][col] = (z[i] - (i + 1..3).map(|k| l[k][i] * inv[k][col]).sum::<f64>()) / l[i][i];
        }
    }
    Some(inv)
}

fn norm(v: [f64; 3]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}
