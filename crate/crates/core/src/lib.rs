//! Symbolic time-series forecasting: the ABBA representation
//! (piecewise-linear compression, mean-based digitization, patched
//! reconstruction) combined with a from-scratch LSTM engine, plus the
//! raw-numeric baseline pipeline and forecast-accuracy measures.
//!
//! The crate is organized around five building blocks:
//!
//! - [`series`]: the validated series container and shared primitives
//!   (z-normalization, differencing, linear resampling);
//! - [`codec`]: the symbolic transform and its inverses;
//! - [`neural`]: the LSTM stack, losses, Adam, and backpropagation
//!   through time;
//! - [`forecast`]: lag windows, stateful/stateless training, forecast
//!   modes, and the two pipelines;
//! - [`metrics`]: Euclidean, DTW and sMAPE measures with differenced
//!   variants.
//!
//! Everything is plain data over `f64`; all randomness flows through
//! explicit seeds, so any (seed, config, data) triple reproduces its
//! results bit for bit in a single-threaded run.

pub mod codec;
pub mod error;
pub mod forecast;
pub mod metrics;
pub mod neural;
pub mod series;

pub use error::{Error, Result};
pub use series::{difference, resample_linear, znormalize, NormalizationParams, TimeSeries};
