//! Extreme value statistics of randomly perturbed dynamical systems.
//!
//! This crate is `no_std` (it needs `alloc`) and holds the numerical core:
//!
//! - [`dynamics`]: deterministic map families, additive uniform noise, random
//!   orbits and sampling from the empirical stationary measure.
//! - [`observables`]: metrics, the `g1`/`g2`/`g3` observables, thresholds and
//!   normalizing constants for uniform stationary measures.
//! - [`evt`]: block maxima, GEV maximum likelihood with confidence intervals,
//!   bootstrap-calibrated Kolmogorov-Smirnov tests, extremal index estimation
//!   and local dimensions.
//! - [`theory`]: closed-form expectations, extremal indices at periodic
//!   points, and numerical checks of the exponential decay of correlations for
//!   noisy circle rotations.
//!
//! IO, configuration, ensembles and the command line live in the `evlab` crate.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod evt;
pub mod math;
pub mod observables;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
