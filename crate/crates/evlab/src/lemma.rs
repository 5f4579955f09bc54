//! Grid check of the decay-of-correlations bound for the noisy circle
//! rotation.

use std::fmt::Write as _;

use evlab_core::dynamics::GOLDEN_MEAN;
use evlab_core::theory::{correlation_bound, fourier_correlation, Interval};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::workers;
use crate::output::format_float;

/// Pairs `(A, B)` checked at every grid point: a small interval against
/// itself, overlapping intervals, and an interval against a two-piece union.
pub fn lemma_sets() -> Vec<(Interval, Vec<Interval>)> {
    let iv = |lo, hi| Interval::new(lo, hi).expect("static interval");
    vec![
        (iv(0.0, 0.1), vec![iv(0.0, 0.1)]),
        (iv(0.2, 0.5), vec![iv(0.4, 0.9)]),
        (iv(0.05, 0.3), vec![iv(0.1, 0.2), iv(0.6, 0.75)]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub epsilon: f64,
    pub j: usize,
    pub set: usize,
    pub value: f64,
    /// Truncation tail added to `value` before comparing.
    pub tail: f64,
    pub bound: f64,
    pub valid: bool,
    pub within_bound: bool,
}

pub const LEMMA_CSV_HEADER: &str = "epsilon,j,set,value,tail,bound,valid,within_bound";

/// Every `(ε, j, set)` with `j` in `j_min..=j_max`, in that order.
pub fn verify_lemma(eps: &[f64], j_min: usize, j_max: usize) -> Result<Vec<LemmaRow>> {
    if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::range("eps", "the lemma grid needs noise levels > 0"));
    }
    if j_min > j_max {
        return Err(Error::range("jmax", "jmax must be at least the smallest lag"));
    }
    let sets = lemma_sets();
    let grid: Vec<(f64, usize, usize)> = eps
        .iter()
        .flat_map(|&e| (j_min..=j_max).flat_map(move |j| (0..3).map(move |s| (e, j, s))))
        .collect();
    workers().install(|| {
        grid.par_iter()
            .map(|&(epsilon, j, set)| {
                let (a, b) = &sets[set];
                let r = fourier_correlation(*a, b, GOLDEN_MEAN, epsilon, j, None)?;
                Ok(LemmaRow {
                    epsilon,
                    j,
                    set,
                    value: r.value,
                    tail: r.uncertainty,
                    bound: r.bound,
                    valid: correlation_bound(j, epsilon).1,
                    within_bound: r.within_bound,
                })
            })
            .collect()
    })
}

/// Valid rows that break the bound.
pub fn violations(rows: &[LemmaRow]) -> usize {
    rows.iter().filter(|r| r.valid && !r.within_bound).count()
}

pub fn lemma_csv(rows: &[LemmaRow]) -> String {
    let mut out = String::from(LEMMA_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_float(r.epsilon),
            r.j,
            r.set,
            format_float(r.value),
            format_float(r.tail),
            format_float(r.bound),
            r.valid,
            r.within_bound
        );
    }
    out
}
