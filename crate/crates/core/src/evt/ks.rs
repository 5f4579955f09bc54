use alloc::vec::Vec;

use super::block::BlockMaximaSeries;
use super::fit::{fit_values, GevFit};
use super::gev::GevParams;
use crate::math::floor;
use crate::rng::{stream_id, NoiseRng};

/// Significance level of the goodness-of-fit test.
pub const KS_LEVEL: f64 = 0.05;
/// Parametric bootstrap resamples per critical value.
pub const KS_RESAMPLES: usize = 999;

const BUCKET_WIDTH: f64 = 0.05;
const SHAPE_RANGE: (f64, f64) = (-0.9, 2.0);
const BOOTSTRAP_SEED: u64 = 0x6B73_5F62_6F6F_7473;

/// One-sample KS statistic against a fitted GEV and its verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub pass: bool,
}

/// Source of critical values of the KS statistic when all three GEV
/// parameters are estimated from the same sample.
pub trait CriticalValues {
    fn critical_value(&self, m: usize, shape: f64) -> f64;
}

/// Runs the bootstrap on every query. Callers wanting reuse wrap it in a
/// cache keyed by `(m, shape_bucket(shape))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BootstrapEachTime;

impl CriticalValues for BootstrapEachTime {
    fn critical_value(&self, m: usize, shape: f64) -> f64 {
        bootstrap_critical_value(m, shape_bucket(shape))
    }
}

/// Index of the 0.05-wide shape cell containing `κ`, after clamping `κ` to
/// `[-0.9, 2]`.
pub fn shape_bucket(shape: f64) -> i64 {
    let k = if shape.is_nan() { 0.0 } else { shape.clamp(SHAPE_RANGE.0, SHAPE_RANGE.1) };
    floor(k / BUCKET_WIDTH + 0.5) as i64
}

/// 95th percentile of the KS statistic over `KS_RESAMPLES` samples of size `m`
/// drawn from GEV(`bucket`·0.05, 1, 0) and refitted. The statistic is pivotal
/// in location and scale, so the unit law stands for the whole cell. Failed
/// refits count as the worst possible statistic. Deterministic in its
/// arguments.
pub fn bootstrap_critical_value(m: usize, bucket: i64) -> f64 {
    let law = GevParams::new(bucket as f64 * BUCKET_WIDTH, 1.0, 0.0);
    let mut rng = NoiseRng::new(BOOTSTRAP_SEED, stream_id(&[m as u64, bucket as u64]));
    let mut stats: Vec<f64> = Vec::with_capacity(KS_RESAMPLES);
    let mut sample = Vec::with_capacity(m);
    for _ in 0..KS_RESAMPLES {
        sample.clear();
        sample.extend((0..m).map(|_| law.sample(&mut rng)));
        let d = match fit_values(&sample) {
            Ok(fit) => ks_statistic(&sample, &fit.params),
            Err(_) => 1.0,
        };
        stats.push(d);
    }
    stats.sort_by(f64::total_cmp);
    let rank = ((1.0 - KS_LEVEL) * (KS_RESAMPLES + 1) as f64) as usize;
    stats[rank - 1]
}

/// `sup |F_m − F|` of `values` against the GEV `law`.
pub fn ks_statistic(values: &[f64], law: &GevParams) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = law.cdf(x);
        let above = (i + 1) as f64 / m - f;
        let below = f - i as f64 / m;
        d.max(above).max(below)
    })
}

/// Passes iff the statistic is below the critical value for `(m, κ̂)`.
pub fn ks_test(bm: &BlockMaximaSeries, fit: &GevFit, table: &impl CriticalValues) -> KsOutcome {
    let statistic = ks_statistic(&bm.values, &fit.params);
    let critical = table.critical_value(bm.len(), fit.kappa());
    KsOutcome { statistic, critical, pass: statistic < critical }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buckets_round_and_clamp() {
        assert_eq!(shape_bucket(0.0), 0);
        assert_eq!(shape_bucket(0.024), 0);
        assert_eq!(shape_bucket(0.026), 1);
        assert_eq!(shape_bucket(-0.33), -7);
        assert_eq!(shape_bucket(5.0), 40);
        assert_eq!(shape_bucket(-3.0), -18);
    }

    #[test]
    fn statistic_of_perfect_grid() {
        // midpoints of m equal-probability cells: D = 1/(2m)
        let law = GevParams::gumbel(1.0, 0.0);
        let m = 50;
        let values: Vec<f64> = (0..m).map(|i| law.quantile((i as f64 + 0.5) / m as f64)).collect();
        assert!((ks_statistic(&values, &law) - 0.5 / m as f64).abs() < 1e-12);
    }

    #[test]
    fn critical_value_is_deterministic_and_below_simple_ks() {
        let a = bootstrap_critical_value(60, 0);
        assert_eq!(a, bootstrap_critical_value(60, 0));
        // estimated parameters shrink the statistic: below 1.358/sqrt(m)
        assert!(a > 0.05 && a < 1.358 / crate::math::sqrt(60.0), "{a}");
    }
}
