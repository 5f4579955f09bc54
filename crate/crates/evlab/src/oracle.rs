//! Box-counting dimension, the reference for local dimensions read off `g1`
//! fits.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dyadic box sides `2^-k` for `k` in this range.
pub const DEFAULT_BOX_LEVELS: std::ops::RangeInclusive<i32> = 4..=10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCount {
    pub dimension: f64,
    pub sides: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Occupied boxes at several scales, filled one point at a time.
#[derive(Debug, Clone)]
pub struct BoxCounter {
    sides: Vec<f64>,
    occupied: Vec<HashSet<(i64, i64)>>,
    points: usize,
}

impl BoxCounter {
    pub fn new(sides: Vec<f64>) -> Result<Self> {
        if sides.len() < 2 || sides.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Input("box counting needs at least two positive sides".into()));
        }
        let occupied = vec![HashSet::new(); sides.len()];
        Ok(Self { sides, occupied, points: 0 })
    }

    pub fn dyadic(levels: std::ops::RangeInclusive<i32>) -> Result<Self> {
        Self::new(levels.map(|k| 2f64.powi(-k)).collect())
    }

    pub fn push(&mut self, p: [f64; 2]) {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return;
        }
        self.points += 1;
        for (side, boxes) in self.sides.iter().zip(&mut self.occupied) {
            boxes.insert(((p[0] / side).floor() as i64, (p[1] / side).floor() as i64));
        }
    }

    /// Least-squares slope of `ln N(s)` against `ln(1/s)`.
    pub fn finish(self) -> Result<BoxCount> {
        if self.points == 0 {
            return Err(Error::Input("box counting saw no points".into()));
        }
        let xs: Vec<f64> = self.sides.iter().map(|s| -s.ln()).collect();
        let counts: Vec<usize> = self.occupied.iter().map(HashSet::len).collect();
        let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
        Ok(BoxCount { dimension: slope(&xs, &ys), sides: self.sides, counts })
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
