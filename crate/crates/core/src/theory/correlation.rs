use alloc::vec::Vec;

use crate::dynamics::{MapSpec, NoiseSpec, Space, State};
use crate::math::{ceil, cos, exp, ln, powf, sin, sqrt, LN_2, PI, TAU};
use crate::rng::NoiseRng;
use crate::{Error, Result};

/// Smallest truncation order of the Fourier series.
pub const DEFAULT_TRUNCATION: usize = 10_000;
/// Fewest Monte Carlo samples accepted.
pub const MIN_MC_SAMPLES: usize = 10_000;

/// Sub-interval `[lo, hi]` of the unit circle, `0 ≤ lo ≤ hi ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::config("interval must satisfy 0 <= lo <= hi <= 1"));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x < self.hi
    }

    /// `∫_lo^hi e^{−2πikx} dx` as `(re, im)`, for `k ≥ 1`.
    fn coefficient(&self, k: usize) -> (f64, f64) {
        let w = TAU * k as f64;
        // (e^{−iwa} − e^{−iwb}) / (iw)
        let (re, im) = (cos(w * self.lo) - cos(w * self.hi), -sin(w * self.lo) + sin(w * self.hi));
        (im / w, -re / w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Fourier,
    MonteCarlo,
}

/// Correlation of `1_A` and `1_B` at lag `j` compared with the exponential
/// bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub j: usize,
    pub epsilon: f64,
    /// `|C_j|`.
    pub value: f64,
    /// `C_j` with its sign.
    pub signed: f64,
    pub bound: f64,
    /// Truncation tail bound (Fourier) or standard error (Monte Carlo).
    pub uncertainty: f64,
    pub within_bound: bool,
    pub method: CorrelationMethod,
}

/// `1 − log 2 / log 2π`: the bound holds for `ε²` below this.
pub fn lemma_threshold() -> f64 {
    1.0 - LN_2 / ln(TAU)
}

/// `(4 e^{−j ε² log 2π}, ε² < 1 − log 2/log 2π)`.
pub fn correlation_bound(j: usize, epsilon: f64) -> (f64, bool) {
    let bound = 4.0 * exp(-(j as f64) * epsilon * epsilon * ln(TAU));
    (bound, epsilon * epsilon < lemma_threshold())
}

/// `S(x) = sin(2πx)/(2πx)`, the characteristic function of the uniform noise.
pub fn sinc_kernel(x: f64) -> f64 {
    let w = TAU * x;
    if w.abs() < 1e-8 {
        1.0 - w * w / 6.0
    } else {
        sin(w) / w
    }
}

/// Correlation `∫ E[1_B(f^j_ω x)] 1_A(x) dx − Leb(A) Leb(B)` of the noisy
/// rotation by `alpha`, from its Fourier series truncated at `K`
/// (`max(⌈1/ε⌉, 10⁴)` when `None`). The rigorous truncation tail is added to
/// the value before comparing with the bound.
pub fn fourier_correlation(
    a: Interval,
    b: &[Interval],
    alpha: f64,
    epsilon: f64,
    j: usize,
    truncation: Option<usize>,
) -> Result<CorrelationReport> {
    if !(epsilon > 0.0) {
        return Err(Error::config("fourier_correlation needs epsilon > 0"));
    }
    if b.is_empty() {
        return Err(Error::config("B must contain at least one interval"));
    }
    let min_k = ceil(1.0 / epsilon) as usize;
    let k_max = truncation.unwrap_or(min_k.max(DEFAULT_TRUNCATION));
    if k_max < min_k {
        return Err(Error::config("truncation order must be at least 1/epsilon"));
    }
    let (bound, _) = correlation_bound(j, epsilon);

    let mut sum = 0.0;
    for k in 1..=k_max {
        let s = sinc_kernel(k as f64 * epsilon);
        let damp = powf(s, j as f64);
        if damp == 0.0 {
            continue;
        }
        let (pa_re, pa_im) = a.coefficient(k);
        let (mut pb_re, mut pb_im) = (0.0, 0.0);
        for iv in b {
            let (re, im) = iv.coefficient(k);
            pb_re += re;
            pb_im += im;
        }
        // ψ_k · conj(φ_k) · e^{2πikjα}
        let (pr, pi) = (pb_re * pa_re + pb_im * pa_im, pb_im * pa_re - pb_re * pa_im);
        let phase = TAU * frac(k as f64 * j as f64 * alpha);
        let (c, sn) = (cos(phase), sin(phase));
        sum += (pr * c - pi * sn) * damp;
    }
    let signed = 2.0 * sum;

    // |ψ_k| ≤ |B|/(πk), |φ_k| ≤ 1/(πk), |S(kε)| ≤ 1/(2πkε), Σ_{k>K} k^{−2−j} ≤ K^{−1−j}/(1+j)
    let jf = j as f64;
    let ln_tail = ln(2.0 * b.len() as f64 / (PI * PI)) - jf * ln(TAU * epsilon) - (1.0 + jf) * ln(k_max as f64)
        - ln(1.0 + jf);
    let tail = exp(ln_tail);
    if tail > 0.1 * bound {
        return Err(Error::TruncationTooSmall { tail, bound });
    }
    let value = signed.abs();
    Ok(CorrelationReport {
        j,
        epsilon,
        value,
        signed,
        bound,
        uncertainty: tail,
        within_bound: value + tail <= bound,
        method: CorrelationMethod::Fourier,
    })
}

/// Monte Carlo estimate of the same correlation for any noisy circle map,
/// with `x` uniform on the circle.
pub fn monte_carlo_correlation(
    map: &MapSpec,
    noise: &NoiseSpec,
    a: Interval,
    b: &[Interval],
    j: usize,
    samples: usize,
    seed: u64,
) -> Result<CorrelationReport> {
    if map.space() != Space::Circle {
        return Err(Error::config("correlation estimates need a circle map"));
    }
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InsufficientData { needed: MIN_MC_SAMPLES, got: samples });
    }
    map.validate()?;
    let lb: f64 = b.iter().map(Interval::length).sum();
    let product = a.length() * lb;
    let mut rng = NoiseRng::new(seed, crate::rng::stream_id(&[j as u64, samples as u64]));
    let mut ys: Vec<f64> = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x0 = rng.uniform();
        let mut x = State::one(x0);
        for _ in 0..j {
            x = map.step(noise, x, [rng.symmetric(), 0.0])?;
        }
        let hit = a.contains(x0) && b.iter().any(|iv| iv.contains(x.x()));
        ys.push(if hit { 1.0 } else { 0.0 } - product);
    }
    let (mean, sd) = crate::math::mean_std(&ys);
    let (bound, _) = correlation_bound(j, noise.epsilon);
    let value = mean.abs();
    Ok(CorrelationReport {
        j,
        epsilon: noise.epsilon,
        value,
        signed: mean,
        bound,
        uncertainty: sd / sqrt(samples as f64),
        within_bound: value <= bound,
        method: CorrelationMethod::MonteCarlo,
    })
}

fn frac(x: f64) -> f64 {
    x - crate::math::floor(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lag_zero_is_variance() {
        let a = Interval::new(0.0, 0.3).unwrap();
        let r = fourier_correlation(a, &[a], 0.1, 0.3, 0, None).unwrap();
        assert!((r.value - 0.21).abs() <= r.uncertainty + 1e-12, "{r:?}");
        assert_eq!(correlation_bound(0, 0.4).0, 4.0);
    }

    #[test]
    fn validity_threshold() {
        assert!((lemma_threshold() - 0.622_9).abs() < 1e-4);
        assert!(!correlation_bound(1, 0.9).1);
        assert!(correlation_bound(1, 0.7).1);
        let (b, _) = correlation_bound(100, 0.5);
        assert!((b - 4.0 * powf(TAU, -25.0)).abs() < 1e-30);
    }

    #[test]
    fn coefficient_matches_quadrature() {
        let iv = Interval::new(0.13, 0.41).unwrap();
        for k in [1usize, 2, 7] {
            let (re, im) = iv.coefficient(k);
            let n = 20_000;
            let h = iv.length() / n as f64;
            let (mut qr, mut qi) = (0.0, 0.0);
            for i in 0..n {
                let x = iv.lo + (i as f64 + 0.5) * h;
                qr += cos(TAU * k as f64 * x) * h;
                qi -= sin(TAU * k as f64 * x) * h;
            }
            assert!((re - qr).abs() < 1e-9 && (im - qi).abs() < 1e-9);
            assert!(sqrt(re * re + im * im) <= 1.0 / k as f64);
        }
    }

    #[test]
    fn small_truncation_is_refused() {
        let a = Interval::new(0.0, 0.1).unwrap();
        assert!(fourier_correlation(a, &[a], 0.3, 0.3, 5, Some(2)).is_err());
        assert!(fourier_correlation(a, &[a], 0.3, 0.3, 5, Some(4)).is_ok());
    }
}
