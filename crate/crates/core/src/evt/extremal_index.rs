use crate::math::{compensated_sum, sqrt};
use crate::{Error, Result};

const Z_95: f64 = 1.959_963_984_540_054;

/// Factor turning block minimum distances into standard exponentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EiNormalization {
    /// `2n`: uniform measure on the circle.
    TwoN,
    /// `2n/ε`: targets whose neighbourhood mass scales with the noise width.
    TwoNOverEps,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EiEstimate {
    /// In `(0, 1]`.
    pub theta: f64,
    /// Rate estimate before clipping.
    pub raw_theta: f64,
    /// 95% interval of the unclipped rate.
    pub ci: [f64; 2],
    pub normalization: EiNormalization,
    pub clipped: bool,
    pub blocks: usize,
}

/// Exponential-rate MLE of the normalized block minima `v = factor · d_min`.
pub fn estimate_extremal_index(
    min_distances: &[f64],
    n: usize,
    normalization: EiNormalization,
    epsilon: f64,
) -> Result<EiEstimate> {
    let factor = match normalization {
        EiNormalization::TwoN => 2.0 * n as f64,
        EiNormalization::TwoNOverEps if epsilon > 0.0 => 2.0 * n as f64 / epsilon,
        EiNormalization::TwoNOverEps => return Err(Error::EpsilonRequired),
    };
    if min_distances.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: min_distances.len() });
    }
    for (index, &d) in min_distances.iter().enumerate() {
        if !d.is_finite() {
            return Err(Error::NonFiniteInput { index });
        }
        if d <= 0.0 {
            return Err(Error::ZeroDistance { index });
        }
    }
    let m = min_distances.len();
    let mean = factor * compensated_sum(min_distances.iter().copied()) / m as f64;
    let raw_theta = 1.0 / mean;
    let half = Z_95 / sqrt(m as f64);
    let clipped = raw_theta > 1.0;
    Ok(EiEstimate {
        theta: raw_theta.min(1.0),
        raw_theta,
        ci: [raw_theta * (1.0 - half), raw_theta * (1.0 + half)],
        normalization,
        clipped,
        blocks: m,
    })
}
