//! Noisy-map extreme value experiments: configuration, ensembles, figure
//! datasets, reproducible output and the self-test.

pub mod config;
pub mod error;
pub mod experiments;
pub mod figures;
pub mod ks_cache;
pub mod lemma;
pub mod oracle;
pub mod output;
pub mod selftest;

pub use error::{Error, Result};
