//! The four benchmark experiments plus ad-hoc single-series
//! forecasting, with fan-out over (series, model, seed) runs.

use std::fs;
use std::path::{Path, PathBuf};

use abba_lstm::codec::{transform, AbbaConfig};
use abba_lstm::forecast::{abba_pipeline, raw_pipeline, PipelineRun, TrainConfig, TrainMode};
use abba_lstm::metrics::report;
use abba_lstm::series::znormalize;
use abba_lstm::TimeSeries;
use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind, ModeOverride};
use crate::data;
use crate::records::{write_forecast_csvs, write_results_csv, write_summary_csv, RunRecord};
use crate::svg::{line_chart, scatter_chart, ChartSeries};

/// Which pipeline a run uses.
#[derive(Clone, Debug)]
enum RunModel {
    Raw,
    Abba(AbbaConfig),
}

/// One unit of work: a pipeline over one series with one seed.
#[derive(Clone, Debug)]
struct RunSpec {
    experiment: String,
    series_id: String,
    series: TimeSeries,
    truth: Option<Vec<f64>>,
    model: RunModel,
    train: TrainConfig,
    horizon: usize,
    bands: Option<[(f64, f64); 2]>,
}

/// Widens a band by the given fraction of its width on each side.
pub fn widen_band(band: (f64, f64), fraction: f64) -> (f64, f64) {
    let w = band.1 - band.0;
    (band.0 - fraction * w, band.1 + fraction * w)
}

fn band_fraction(values: &[f64], bands: &[(f64, f64); 2]) -> f64 {
    let widened = [widen_band(bands[0], 0.1), widen_band(bands[1], 0.1)];
    let inside = values
        .iter()
        .filter(|v| {
            widened
                .iter()
                .any(|(lo, hi)| **v >= *lo && **v <= *hi)
        })
        .count();
    inside as f64 / values.len() as f64
}

fn execute(spec: &RunSpec) -> Result<RunRecord> {
    let (run, model_name, tol, max_k): (PipelineRun, &str, Option<f64>, Option<usize>) =
        match &spec.model {
            RunModel::Raw => (
                raw_pipeline(&spec.series, &spec.train, spec.horizon).with_context(|| {
                    format!("raw run on {} (seed {})", spec.series_id, spec.train.seed)
                })?,
                "raw",
                None,
                None,
            ),
            RunModel::Abba(abba) => (
                abba_pipeline(&spec.series, abba, &spec.train, spec.horizon).with_context(
                    || format!("abba run on {} (seed {})", spec.series_id, spec.train.seed),
                )?,
                "abba",
                Some(abba.tol),
                Some(abba.max_k),
            ),
        };

    let metrics = match &spec.truth {
        Some(truth) => Some(report(&run.forecast.values, truth)?),
        None => None,
    };
    let final_value = *run.forecast.values.last().expect("horizon >= 1");
    Ok(RunRecord {
        experiment: spec.experiment.clone(),
        series: spec.series_id.clone(),
        model: model_name.to_string(),
        seed: spec.train.seed,
        mode: spec.train.mode,
        lag: spec.train.lag,
        cells: spec.train.cells,
        layers: spec.train.layers,
        dropout: spec.train.dropout,
        tol,
        max_k,
        horizon: spec.horizon,
        epochs: run.loss_history.len(),
        best_epoch: run.best_epoch,
        final_loss: run.loss_history[run.best_epoch],
        build_seconds: run.timings.build_seconds,
        train_seconds: run.timings.train_seconds,
        forecast_seconds: run.timings.forecast_seconds,
        metrics,
        final_value,
        band_fraction: spec.bands.as_ref().map(|b| band_fraction(&run.forecast.values, b)),
        symbols: run.forecast.symbols.clone(),
        forecast: run.forecast.values,
        loss_history: run.loss_history,
    })
}

fn run_all(specs: Vec<RunSpec>) -> Result<Vec<RunRecord>> {
    specs.par_iter().map(execute).collect()
}

fn train_config(cfg: &ExperimentConfig, lag: usize, cells: usize, patience: usize, dropout: f64, mode: TrainMode, seed: u64) -> TrainConfig {
    let o = &cfg.train;
    let mut tc = TrainConfig::new(o.lag.unwrap_or(lag), o.cells.unwrap_or(cells), o.patience.unwrap_or(patience), mode);
    tc.layers = o.layers.unwrap_or(2);
    tc.dropout = o.dropout.unwrap_or(dropout);
    tc.seed = seed;
    if let Some(m) = o.max_epochs {
        tc.max_epochs = m;
    }
    tc
}

fn symbolic_lag(cfg: &ExperimentConfig, default: usize) -> usize {
    cfg.train.symbolic_lag.unwrap_or(default)
}

fn abba_config(cfg: &ExperimentConfig, tol: f64, max_piece_len: Option<usize>, seed: u64) -> AbbaConfig {
    let o = &cfg.abba;
    AbbaConfig {
        tol: o.tol.unwrap_or(tol),
        max_k: o.max_k.unwrap_or(10),
        scaling: o.scaling.unwrap_or(0.0),
        max_piece_len: o.max_piece_len.or(max_piece_len),
        seed,
    }
}

fn modes(cfg: &ExperimentConfig, default: &[TrainMode]) -> Vec<TrainMode> {
    match cfg.train.mode {
        Some(ModeOverride::Stateful) => vec![TrainMode::Stateful],
        Some(ModeOverride::Stateless) => vec![TrainMode::Stateless],
        Some(ModeOverride::Both) => vec![TrainMode::Stateful, TrainMode::Stateless],
        None => default.to_vec(),
    }
}

/// Frequencies of the sine grid: an explicit list, or `1..=100`
/// subsampled evenly to `round(100 * scale)` points.
fn sine_freqs(cfg: &ExperimentConfig) -> Vec<usize> {
    if let Some(freqs) = &cfg.freqs {
        return freqs.clone();
    }
    let count = ((100.0 * cfg.scale).round() as usize).clamp(1, 100);
    if count == 1 {
        return vec![1];
    }
    (0..count)
        .map(|i| 1 + (99 * i + (count - 1) / 2) / (count - 1))
        .collect()
}

/// Sine-wave forecasting across a frequency grid: raw models with a
/// 50-value lag against symbolic models with a 5-symbol lag, five
/// seeds per frequency at full scale, stateful and stateless.
pub fn sine_sweep(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    const N: usize = 1000;
    let horizon = cfg.horizon.unwrap_or(200);
    let freqs = sine_freqs(cfg);
    let default_seed_count = ((5.0 * cfg.scale).round() as u64).max(1);
    let seeds = cfg.seeds_or(default_seed_count);
    let mode_list = modes(cfg, &[TrainMode::Stateful, TrainMode::Stateless]);

    let mut specs = Vec::new();
    for &freq in &freqs {
        let series = data::sine_series(N, freq);
        let truth = data::sine_truth(N, freq, horizon);
        for &mode in &mode_list {
            for &seed in &seeds {
                if cfg.model.runs_raw() {
                    specs.push(RunSpec {
                        experiment: "sine".into(),
                        series_id: format!("n{freq}"),
                        series: series.clone(),
                        truth: Some(truth.clone()),
                        model: RunModel::Raw,
                        train: train_config(cfg, 50, 50, 50, 0.0, mode, seed),
                        horizon,
                        bands: None,
                    });
                }
                if cfg.model.runs_abba() {
                    let mut train = train_config(cfg, 50, 50, 50, 0.0, mode, seed);
                    train.lag = symbolic_lag(cfg, 5);
                    specs.push(RunSpec {
                        experiment: "sine".into(),
                        series_id: format!("n{freq}"),
                        series: series.clone(),
                        truth: Some(truth.clone()),
                        model: RunModel::Abba(abba_config(cfg, 0.1, None, seed)),
                        train,
                        horizon,
                        bands: None,
                    });
                }
            }
        }
    }
    run_all(specs)
}

/// Linear-trend forecasting: a ramp over [0, 0.5] of length 200,
/// stateful training with lag 20 and patience 10, ten seeds. The
/// symbolic transform caps piece length so the ramp still produces a
/// trainable string.
pub fn trend_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    const N: usize = 200;
    let horizon = cfg.horizon.unwrap_or(200);
    let seeds = cfg.seeds_or(10);
    let mode_list = modes(cfg, &[TrainMode::Stateful]);
    let series = data::trend_series(N);
    let truth = data::trend_truth(N, horizon);

    let mut specs = Vec::new();
    for &mode in &mode_list {
        for &seed in &seeds {
            if cfg.model.runs_raw() {
                specs.push(RunSpec {
                    experiment: "trend".into(),
                    series_id: "ramp".into(),
                    series: series.clone(),
                    truth: Some(truth.clone()),
                    model: RunModel::Raw,
                    train: train_config(cfg, 20, 50, 10, 0.0, mode, seed),
                    horizon,
                    bands: None,
                });
            }
            if cfg.model.runs_abba() {
                let mut train = train_config(cfg, 20, 50, 10, 0.0, mode, seed);
                train.lag = symbolic_lag(cfg, 20);
                specs.push(RunSpec {
                    experiment: "trend".into(),
                    series_id: "ramp".into(),
                    series: series.clone(),
                    truth: Some(truth.clone()),
                    model: RunModel::Abba(abba_config(cfg, 0.1, Some(4), seed)),
                    train,
                    horizon,
                    bands: None,
                });
            }
        }
    }
    run_all(specs)
}

/// Shape-constrained forecasting on a two-level demand-style series
/// that switches between the value bands. Uses the supplied data file
/// when given, otherwise the seeded square-wave surrogate.
pub fn shape_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let horizon = cfg.horizon.unwrap_or(200);
    let seeds = cfg.seeds_or(3);
    let mode_list = modes(cfg, &[TrainMode::Stateful]);

    let (series_id, full) = match &cfg.data {
        Some(path) => {
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data").to_string();
            let series = if path.extension().and_then(|e| e.to_str()) == Some("tsv") {
                data::load_ucr(path)?.into_iter().next().expect("non-empty").1
            } else {
                data::load_csv(path)?
            };
            (name, series)
        }
        None => ("surrogate".to_string(), data::square_wave_surrogate(17, 800)),
    };
    if full.len() < horizon + 100 {
        bail!(
            "shape series too short: {} samples for a {} step forecast",
            full.len(),
            horizon
        );
    }
    let train_len = (full.len() - horizon).min(600);
    let series = TimeSeries::new(full.values()[..train_len].to_vec())?;
    let truth: Vec<f64> = full.values()[train_len..train_len + horizon].to_vec();
    let bands = Some([data::LOW_BAND, data::HIGH_BAND]);

    let mut specs = Vec::new();
    for &mode in &mode_list {
        for &seed in &seeds {
            if cfg.model.runs_raw() {
                specs.push(RunSpec {
                    experiment: "shape".into(),
                    series_id: series_id.clone(),
                    series: series.clone(),
                    truth: Some(truth.clone()),
                    model: RunModel::Raw,
                    train: train_config(cfg, 50, 50, 10, 0.0, mode, seed),
                    horizon,
                    bands,
                });
            }
            if cfg.model.runs_abba() {
                let mut train = train_config(cfg, 50, 50, 10, 0.0, mode, seed);
                train.lag = symbolic_lag(cfg, 5);
                specs.push(RunSpec {
                    experiment: "shape".into(),
                    series_id: series_id.clone(),
                    series: series.clone(),
                    truth: Some(truth.clone()),
                    model: RunModel::Abba(abba_config(cfg, 0.1, None, seed)),
                    train,
                    horizon,
                    bands,
                });
            }
        }
    }
    run_all(specs)
}

/// Batch benchmark over a UCR-style archive directory: the first
/// series of every class, z-normalised and filtered to a raw training
/// length of at least 100 and a symbol string of at least 20; both
/// models train stateful with lag 10, patience 100, 50% dropout and
/// forecast 50 values.
pub fn batch_benchmark(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let dir = cfg
        .data
        .as_ref()
        .context("bench requires --data pointing at a UCR archive directory")?;
    let horizon = cfg.horizon.unwrap_or(50);
    let seeds = cfg.seeds_or(1);
    let mode_list = modes(cfg, &[TrainMode::Stateful]);
    let all = data::scan_ucr_dir(dir)?;

    const MIN_TRAIN_LEN: usize = 100;
    const MIN_STRING_LEN: usize = 20;

    let mut specs = Vec::new();
    for (name, series) in all {
        if series.len() <= horizon {
            continue;
        }
        let train_part = TimeSeries::new(series.values()[..series.len() - horizon].to_vec())?;
        if train_part.len() < MIN_TRAIN_LEN {
            continue;
        }
        let filter_abba = abba_config(cfg, 0.05, None, 0);
        let (normalized, _) = znormalize(&train_part);
        let rep = match transform(&normalized, &filter_abba) {
            Ok(rep) => rep,
            Err(_) => continue,
        };
        if rep.len() < MIN_STRING_LEN {
            continue;
        }
        let truth: Vec<f64> = series.values()[series.len() - horizon..].to_vec();
        for &mode in &mode_list {
            for &seed in &seeds {
                if cfg.model.runs_raw() {
                    specs.push(RunSpec {
                        experiment: "bench".into(),
                        series_id: name.clone(),
                        series: train_part.clone(),
                        truth: Some(truth.clone()),
                        model: RunModel::Raw,
                        train: train_config(cfg, 10, 50, 100, 0.5, mode, seed),
                        horizon,
                        bands: None,
                    });
                }
                if cfg.model.runs_abba() {
                    let mut train = train_config(cfg, 10, 50, 100, 0.5, mode, seed);
                    train.lag = symbolic_lag(cfg, 10);
                    specs.push(RunSpec {
                        experiment: "bench".into(),
                        series_id: name.clone(),
                        series: train_part.clone(),
                        truth: Some(truth.clone()),
                        model: RunModel::Abba(abba_config(cfg, 0.05, None, seed)),
                        train,
                        horizon,
                        bands: None,
                    });
                }
            }
        }
    }
    if specs.is_empty() {
        bail!("no series in {} passed the length filters", dir.display());
    }
    run_all(specs)
}

/// Ad-hoc forecast of a single CSV series; no truth, so no similarity
/// metrics.
pub fn forecast_single(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let path = cfg.data.as_ref().context("forecast requires --data pointing at a CSV file")?;
    let series = data::load_csv(path)?;
    let series_id = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("series")
        .to_string();
    let horizon = cfg.horizon.unwrap_or(50);
    let seeds = cfg.seeds_or(1);
    let mode_list = modes(cfg, &[TrainMode::Stateful]);

    let mut specs = Vec::new();
    for &mode in &mode_list {
        for &seed in &seeds {
            if cfg.model.runs_raw() {
                specs.push(RunSpec {
                    experiment: "forecast".into(),
                    series_id: series_id.clone(),
                    series: series.clone(),
                    truth: None,
                    model: RunModel::Raw,
                    train: train_config(cfg, 10, 50, 50, 0.0, mode, seed),
                    horizon,
                    bands: None,
                });
            }
            if cfg.model.runs_abba() {
                let mut train = train_config(cfg, 10, 50, 50, 0.0, mode, seed);
                train.lag = symbolic_lag(cfg, 5);
                specs.push(RunSpec {
                    experiment: "forecast".into(),
                    series_id: series_id.clone(),
                    series: series.clone(),
                    truth: None,
                    model: RunModel::Abba(abba_config(cfg, 0.1, None, seed)),
                    train,
                    horizon,
                    bands: None,
                });
            }
        }
    }
    run_all(specs)
}

pub fn run_experiment(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    match kind {
        ExperimentKind::Sine => sine_sweep(cfg),
        ExperimentKind::Trend => trend_experiment(cfg),
        ExperimentKind::Shape => shape_experiment(cfg),
        ExperimentKind::Bench => batch_benchmark(cfg),
        ExperimentKind::Forecast => forecast_single(cfg),
    }
}

fn sine_chart(records: &[RunRecord]) -> String {
    let groups: [(&str, TrainMode); 4] = [
        ("raw stateful", TrainMode::Stateful),
        ("raw stateless", TrainMode::Stateless),
        ("abba stateful", TrainMode::Stateful),
        ("abba stateless", TrainMode::Stateless),
    ];
    let mut series = Vec::new();
    for (i, (label, mode)) in groups.iter().enumerate() {
        let model = label.split(' ').next().unwrap();
        let points: Vec<(f64, f64)> = records
            .iter()
            .filter(|r| r.model == model && r.mode == *mode)
            .filter_map(|r| {
                let freq: f64 = r.series.trim_start_matches('n').parse().ok()?;
                Some((freq, r.metrics?.dtw))
            })
            .collect();
        if !points.is_empty() {
            series.push(ChartSeries::new(*label, points, i));
        }
    }
    scatter_chart("Forecast DTW distance by sine frequency", "frequency n", "DTW", &series)
}

fn forecast_chart(records: &[RunRecord], title: &str) -> String {
    let mut series = Vec::new();
    if let Some(truth_rec) = records.iter().find(|r| r.metrics.is_some()) {
        let _ = truth_rec;
    }
    // the truth curve is identical across runs of one experiment; pull
    // it from the horizon grid of the first record with metrics
    let mut color = 0;
    for r in records.iter().take(5) {
        let pts: Vec<(f64, f64)> = r
            .forecast
            .iter()
            .enumerate()
            .map(|(i, v)| ((i + 1) as f64, *v))
            .collect();
        series.push(ChartSeries::new(
            format!("{} seed {}", r.model, r.seed),
            pts,
            color,
        ));
        color += 1;
    }
    line_chart(title, "forecast step", "value", &series)
}

fn bench_chart(records: &[RunRecord]) -> String {
    let mut per_series: Vec<(String, Option<f64>, Option<f64>)> = Vec::new();
    for r in records {
        let total = r.build_seconds + r.train_seconds + r.forecast_seconds;
        match per_series.iter_mut().find(|(name, _, _)| *name == r.series) {
            Some(entry) => match r.model.as_str() {
                "raw" => entry.1 = Some(total),
                _ => entry.2 = Some(total),
            },
            None => {
                let (raw, abba) = match r.model.as_str() {
                    "raw" => (Some(total), None),
                    _ => (None, Some(total)),
                };
                per_series.push((r.series.clone(), raw, abba));
            }
        }
    }
    let mut raw_pts = Vec::new();
    let mut abba_pts = Vec::new();
    for (i, (_, raw, abba)) in per_series.iter().enumerate() {
        if let Some(t) = raw {
            raw_pts.push((i as f64 + 1.0, *t));
        }
        if let Some(t) = abba {
            abba_pts.push((i as f64 + 1.0, *t));
        }
    }
    let series = vec![
        ChartSeries::new("raw total seconds", raw_pts, 0),
        ChartSeries::new("abba total seconds", abba_pts, 1),
    ];
    scatter_chart("Total build+train+forecast time per series", "series index", "seconds", &series)
}

/// Writes `results.csv`, per-run forecast CSVs, and one SVG chart for
/// the experiment kind. Returns the paths written.
pub fn emit_outputs(kind: ExperimentKind, records: &[RunRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut paths = Vec::new();

    let results = out_dir.join("results.csv");
    write_results_csv(records, &results)?;
    paths.push(results);

    paths.extend(write_forecast_csvs(records, out_dir)?);

    if kind == ExperimentKind::Bench {
        let summary = out_dir.join("summary.csv");
        write_summary_csv(records, &summary)?;
        paths.push(summary);
    }

    let svg = match kind {
        ExperimentKind::Sine => sine_chart(records),
        ExperimentKind::Bench => bench_chart(records),
        ExperimentKind::Trend => forecast_chart(records, "Trend forecasts"),
        ExperimentKind::Shape => forecast_chart(records, "Shape-constrained forecasts"),
        ExperimentKind::Forecast => forecast_chart(records, "Forecasts"),
    };
    let svg_path = out_dir.join(format!("{}.svg", kind.name()));
    fs::write(&svg_path, svg).with_context(|| format!("writing {}", svg_path.display()))?;
    paths.push(svg_path);

    Ok(paths)
}
