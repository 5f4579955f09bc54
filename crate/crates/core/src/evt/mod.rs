//! Block maxima, GEV inference, goodness of fit and the extremal index.

mod block;
mod extremal_index;
mod fit;
mod gev;
mod ks;

pub use block::{block_maxima, block_minima, BlockMaximaSeries, MIN_BLOCKS_FOR_FIT};
pub use extremal_index::{estimate_extremal_index, EiEstimate, EiNormalization};
pub use fit::{fit_gev_mle, local_dimension_from_fit, GevFit, ParamIntervals, FIT_MAX_ITERATIONS, FIT_PARAM_TOLERANCE};
pub use gev::{GevParams, GUMBEL_SWITCH};
pub use ks::{
    bootstrap_critical_value, ks_statistic, ks_test, shape_bucket, BootstrapEachTime, CriticalValues, KsOutcome,
    KS_LEVEL, KS_RESAMPLES,
};
