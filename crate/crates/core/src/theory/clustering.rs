use crate::math::{ceil, sqrt};
use crate::{Error, Result};

/// Fewest exceedances accepted by [`dprime_sum`].
pub const MIN_EXCEEDANCES: usize = 50;

/// `⌈√n⌉`, the default block count in the anti-clustering sum.
pub fn default_kn(n: usize) -> usize {
    ceil(sqrt(n as f64)) as usize
}

/// `n Σ_{j=1}^{⌊n/k_n⌋} P̂(X_0 > u, X_j > u)` with time-average estimates of
/// the pair probabilities.
pub fn dprime_sum(exceed: &[bool], n: usize, k_n: usize) -> Result<f64> {
    if k_n < 2 {
        return Err(Error::config("k_n must be >= 2"));
    }
    let hits: alloc::vec::Vec<usize> = exceed.iter().enumerate().filter_map(|(i, &e)| e.then_some(i)).collect();
    if hits.len() < MIN_EXCEEDANCES {
        return Err(Error::TooFewExceedances { got: hits.len() });
    }
    let lags = n / k_n;
    let len = exceed.len();
    if lags >= len {
        return Err(Error::InsufficientData { needed: lags + 1, got: len });
    }
    let mut pairs = alloc::vec![0usize; lags + 1];
    for (a, &i) in hits.iter().enumerate() {
        for &j in hits[a + 1..].iter().take_while(|&&j| j - i <= lags) {
            pairs[j - i] += 1;
        }
    }
    let sum: f64 = (1..=lags).map(|j| pairs[j] as f64 / (len - j) as f64).sum();
    Ok(n as f64 * sum)
}

/// Number of times `t` with `X_t > u` and `X_{t+p} ≤ u`: entrances into the
/// annulus `Q_p(u)`.
pub fn annulus_entrances(exceed: &[bool], p: usize) -> usize {
    if p == 0 || p >= exceed.len() {
        return 0;
    }
    (0..exceed.len() - p).filter(|&t| exceed[t] && !exceed[t + p]).count()
}
