//! Training-set construction, training regimes, forecast modes, and
//! the raw/symbolic end-to-end pipelines.

pub mod pipeline;
pub mod predict;
pub mod train;
pub mod windows;

pub use pipeline::{abba_pipeline, raw_pipeline, PipelineRun, PipelineTimings};
pub use predict::{
    direct_forecast, iterated_forecast, iterated_symbols, multi_forecast, symbol_step_probs,
    ForecastMode, ForecastResult, ScalarModel, SymbolModel,
};
pub use train::{train_direct, train_scalar, train_symbolic, TrainConfig, TrainMode, TrainOutcome};
pub use windows::{build_windows, build_windows_direct, group_stateful, DirectPair, StatefulGroups, TrainingPair};
