use alloc::string::String;
use alloc::vec::Vec;

use crate::math::mean_std;
use crate::{Error, Result};

/// Fewest maxima accepted by the GEV fit.
pub const MIN_BLOCKS_FOR_FIT: usize = 30;

/// Maxima of consecutive, equal-length blocks of an observable series.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMaximaSeries {
    pub values: Vec<f64>,
    pub block_length: usize,
    pub tag: String,
}

impl BlockMaximaSeries {
    pub fn new(values: Vec<f64>, block_length: usize) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput { index });
        }
        Ok(Self { values, block_length, tag: String::new() })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = tag.into();
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Standard deviation below `max(1e-12, 1e-8 |mean|)`; no
    /// non-degenerate extreme value law can be fitted.
    pub fn is_degenerate(&self) -> bool {
        let (mean, sd) = mean_std(&self.values);
        !(sd > 1e-12 && sd >= 1e-8 * mean.abs())
    }
}

fn reduce_blocks(series: &[f64], n: usize, pick: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::config("block length must be >= 1"));
    }
    if series.len() < 2 * n {
        return Err(Error::InsufficientData { needed: 2 * n, got: series.len() });
    }
    if let Some(index) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { index });
    }
    Ok(series.chunks_exact(n).map(|c| c.iter().copied().fold(c[0], &pick)).collect())
}

/// One maximum per contiguous block of `n`; a trailing partial block is
/// dropped.
pub fn block_maxima(series: &[f64], n: usize) -> Result<BlockMaximaSeries> {
    let values = reduce_blocks(series, n, f64::max)?;
    Ok(BlockMaximaSeries { values, block_length: n, tag: String::new() })
}

/// One minimum per contiguous block of `n`.
pub fn block_minima(series: &[f64], n: usize) -> Result<Vec<f64>> {
    reduce_blocks(series, n, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn maxima_of_small_series() {
        let bm = block_maxima(&[1.0, 5.0, 2.0, 4.0, 3.0, 6.0], 3).unwrap();
        assert_eq!(bm.values, vec![5.0, 6.0]);
        assert_eq!(bm.block_length, 3);
        assert_eq!(block_minima(&[1.0, 5.0, 2.0, 4.0, 3.0, 6.0], 3).unwrap(), vec![1.0, 3.0]);
    }

    #[test]
    fn trailing_block_is_dropped() {
        let s: Vec<f64> = (0..25).map(|i| i as f64).collect();
        let bm = block_maxima(&s, 10).unwrap();
        assert_eq!(bm.values, vec![9.0, 19.0]);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let bm = block_maxima(&[2.5; 100], 10).unwrap();
        assert!(bm.values.iter().all(|&v| v == 2.5));
        assert!(bm.is_degenerate());
    }

    #[test]
    fn errors() {
        assert!(matches!(block_maxima(&[1.0, 2.0, 3.0], 2), Err(Error::InsufficientData { .. })));
        assert_eq!(
            block_maxima(&[1.0, f64::INFINITY, 3.0, 4.0], 2),
            Err(Error::NonFiniteInput { index: 1 })
        );
        assert!(block_maxima(&[1.0, 2.0], 0).is_err());
    }
}
