//! End-to-end forecasting pipelines over raw numeric values and over
//! the symbolic representation.

use std::time::Instant;

use crate::codec::{transform, AbbaConfig, SymbolicRepresentation};
use crate::codec::continue_with_patches;
use crate::error::{Error, Result};
use crate::forecast::predict::{iterated_forecast, ForecastMode, ForecastResult, ScalarModel, SymbolModel};
use crate::forecast::train::{train_scalar, train_symbolic, TrainConfig};
use crate::series::{znormalize, TimeSeries};

/// Wall-clock seconds spent in each pipeline phase.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PipelineTimings {
    pub build_seconds: f64,
    pub train_seconds: f64,
    pub forecast_seconds: f64,
}

impl PipelineTimings {
    pub fn total(&self) -> f64 {
        self.build_seconds + self.train_seconds + self.forecast_seconds
    }
}

/// A pipeline outcome: the forecast in original units, training
/// diagnostics, per-phase timings, and (for symbolic runs) the
/// representation that was trained on.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub forecast: ForecastResult,
    pub loss_history: Vec<f64>,
    pub best_epoch: usize,
    pub timings: PipelineTimings,
    pub symbolic: Option<SymbolicRepresentation>,
}

/// Raw pipeline: z-normalize, train a scalar LSTM, forecast by
/// iterated one-step predictions, denormalize.
pub fn raw_pipeline(series: &TimeSeries, cfg: &TrainConfig, horizon: usize) -> Result<PipelineRun> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let t0 = Instant::now();
    let (normalized, norm) = znormalize(series);
    let build_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let outcome = train_scalar(normalized.values(), cfg)?;
    let train_seconds = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let model = ScalarModel {
        params: outcome.params,
        lag: cfg.lag,
        mode: cfg.mode,
    };
    let mut forecast = iterated_forecast(&model, normalized.values(), horizon)?;
    forecast.values = norm.denormalize(&forecast.values);
    let forecast_seconds = t2.elapsed().as_secs_f64();

    Ok(PipelineRun {
        forecast,
        loss_history: outcome.loss_history,
        best_epoch: outcome.best_epoch,
        timings: PipelineTimings {
            build_seconds,
            train_seconds,
            forecast_seconds,
        },
        symbolic: None,
    })
}

/// Symbolic pipeline: z-normalize, transform to a symbol string, train
/// a one-hot softmax LSTM on it, forecast symbols until the patched
/// reconstruction covers the horizon, stitch patches from the last
/// observed value, truncate and denormalize.
pub fn abba_pipeline(
    series: &TimeSeries,
    abba: &AbbaConfig,
    cfg: &TrainConfig,
    horizon: usize,
) -> Result<PipelineRun> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let t0 = Instant::now();
    let (normalized, norm) = znormalize(series);
    let rep = transform(&normalized, abba)?;
    let build_seconds = t0.elapsed().as_secs_f64();
    if rep.len() <= cfg.lag {
        return Err(Error::StringTooShortForLag {
            symbols: rep.len(),
            lag: cfg.lag,
        });
    }

    let t1 = Instant::now();
    let outcome = train_symbolic(&rep.symbols, rep.alphabet_len(), cfg)?;
    let train_seconds = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let model = SymbolModel {
        params: outcome.params,
        lag: cfg.lag,
        alphabet: rep.alphabet_len(),
        mode: cfg.mode,
    };
    let patches = rep.patches.as_ref().ok_or(Error::MissingPatches)?;
    // emit symbols until the stitched patches reach the horizon; every
    // patch contributes at least one value, so this terminates
    let mut symbols: Vec<usize> = Vec::new();
    let mut numeric_len = 0usize;
    let mut buffer: Vec<usize> = rep.symbols.clone();
    while numeric_len < horizon {
        let next = crate::forecast::predict::iterated_symbols(
            &model,
            &buffer,
            1,
        )?[0];
        buffer.push(next);
        symbols.push(next);
        numeric_len += patches.patches[next].len() - 1;
    }
    let last_value = *normalized.values().last().expect("series is non-empty");
    let mut values = continue_with_patches(patches, &symbols, last_value)?;
    values.truncate(horizon);
    let values = norm.denormalize(&values);
    let forecast_seconds = t2.elapsed().as_secs_f64();

    Ok(PipelineRun {
        forecast: ForecastResult {
            values,
            mode: ForecastMode::Iterated,
            symbols: Some(symbols_to_string(&symbols)),
        },
        loss_history: outcome.loss_history,
        best_epoch: outcome.best_epoch,
        timings: PipelineTimings {
            build_seconds,
            train_seconds,
            forecast_seconds,
        },
        symbolic: Some(rep),
    })
}

fn symbols_to_string(symbols: &[usize]) -> String {
    symbols
        .iter()
        .map(|&s| (b'a' + (s as u8).min(25)) as char)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::train::TrainMode;

    #[test]
    fn raw_pipeline_tracks_a_constant_series() {
        let series = TimeSeries::new(vec![3.2; 30]).unwrap();
        let mut cfg = TrainConfig::new(2, 4, 5, TrainMode::Stateless);
        cfg.max_epochs = 200;
        let run = raw_pipeline(&series, &cfg, 8).unwrap();
        assert_eq!(run.forecast.values.len(), 8);
        for v in &run.forecast.values {
            assert!((v - 3.2).abs() < 0.05, "forecast {v}");
        }
    }

    #[test]
    fn abba_pipeline_output_length_is_exactly_the_horizon() {
        let v: Vec<f64> = (0..400).map(|i| (i as f64 * 0.1).sin()).collect();
        let series = TimeSeries::new(v).unwrap();
        let mut cfg = TrainConfig::new(3, 8, 5, TrainMode::Stateful);
        cfg.max_epochs = 30;
        let run = abba_pipeline(&series, &AbbaConfig::default(), &cfg, 37).unwrap();
        assert_eq!(run.forecast.values.len(), 37);
        assert!(run.forecast.symbols.is_some());
        assert!(run.symbolic.is_some());
    }

    #[test]
    fn abba_pipeline_rejects_short_strings() {
        // a linear ramp compresses to a single symbol
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let series = TimeSeries::new(v).unwrap();
        let cfg = TrainConfig::new(5, 4, 2, TrainMode::Stateful);
        let err = abba_pipeline(&series, &AbbaConfig::default(), &cfg, 10).unwrap_err();
        assert!(err.to_string().contains("series too short after compression"));
    }

    #[test]
    fn learned_alternation_continues_and_stays_on_patches() {
        // two-symbol alternating series: the forecast string continues
        // the alternation, and every forecast value lies on a shifted
        // training patch
        let mut v = Vec::new();
        for _ in 0..30 {
            for _ in 0..4 {
                v.push(1.0);
            }
            for _ in 0..4 {
                v.push(-1.0);
            }
        }
        let series = TimeSeries::new(v).unwrap();
        let mut cfg = TrainConfig::new(2, 8, 15, TrainMode::Stateless);
        cfg.max_epochs = 500;
        cfg.seed = 1;
        let run = abba_pipeline(&series, &AbbaConfig::default(), &cfg, 20).unwrap();
        let s = run.forecast.symbols.clone().unwrap();
        let chars: Vec<char> = s.chars().collect();
        for w in chars.windows(2) {
            assert_ne!(w[0], w[1], "alternation broken: {s}");
        }
    }
}
