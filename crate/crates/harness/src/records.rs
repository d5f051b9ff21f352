//! Run records and their persistence: one `results.csv` row per run,
//! one forecast CSV per run, and a per-model summary.

use std::fs;
use std::path::{Path, PathBuf};

use abba_lstm::forecast::TrainMode;
use abba_lstm::metrics::SimilarityReport;
use anyhow::{bail, Context, Result};

/// Everything recorded about one (series, model, seed) run.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub experiment: String,
    pub series: String,
    pub model: String,
    pub seed: u64,
    pub mode: TrainMode,
    pub lag: usize,
    pub cells: usize,
    pub layers: usize,
    pub dropout: f64,
    /// Symbolic-transform settings; None for raw runs.
    pub tol: Option<f64>,
    pub max_k: Option<usize>,
    pub horizon: usize,
    pub epochs: usize,
    pub best_epoch: usize,
    pub final_loss: f64,
    pub build_seconds: f64,
    pub train_seconds: f64,
    pub forecast_seconds: f64,
    pub metrics: Option<SimilarityReport>,
    /// Last forecast value; the trend experiment gates on it.
    pub final_value: f64,
    /// Fraction of forecast values inside the widened training bands;
    /// only the shape experiment fills it.
    pub band_fraction: Option<f64>,
    pub symbols: Option<String>,
    pub forecast: Vec<f64>,
    pub loss_history: Vec<f64>,
}

/// Column order of `results.csv`. Wall-clock columns are the only ones
/// expected to differ between identical re-runs.
pub const RESULTS_HEADER: &str = "experiment,series,model,seed,mode,lag,cells,layers,dropout,tol,max_k,horizon,epochs,best_epoch,final_loss,build_seconds,train_seconds,forecast_seconds,euclidean,dtw,euclidean_diff,dtw_diff,smape,final_value,band_fraction,symbols";

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl RunRecord {
    pub fn run_id(&self) -> String {
        format!(
            "{}_{}_{}_seed{}",
            self.experiment,
            self.series.replace(['/', ' '], "-"),
            self.model,
            self.seed
        )
    }

    fn csv_row(&self) -> String {
        let mode = match self.mode {
            TrainMode::Stateful => "stateful",
            TrainMode::Stateless => "stateless",
        };
        let m = self.metrics;
        [
            self.experiment.clone(),
            self.series.clone(),
            self.model.clone(),
            self.seed.to_string(),
            mode.to_string(),
            self.lag.to_string(),
            self.cells.to_string(),
            self.layers.to_string(),
            self.dropout.to_string(),
            fmt_opt_f64(self.tol),
            self.max_k.map(|k| k.to_string()).unwrap_or_default(),
            self.horizon.to_string(),
            self.epochs.to_string(),
            self.best_epoch.to_string(),
            self.final_loss.to_string(),
            self.build_seconds.to_string(),
            self.train_seconds.to_string(),
            self.forecast_seconds.to_string(),
            fmt_opt_f64(m.map(|r| r.euclidean)),
            fmt_opt_f64(m.map(|r| r.dtw)),
            fmt_opt_f64(m.map(|r| r.euclidean_diff)),
            fmt_opt_f64(m.map(|r| r.dtw_diff)),
            fmt_opt_f64(m.map(|r| r.smape)),
            self.final_value.to_string(),
            fmt_opt_f64(self.band_fraction),
            self.symbols.clone().unwrap_or_default(),
        ]
        .join(",")
    }
}

/// Writes `results.csv`; an empty record list produces a header-only file.
pub fn write_results_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut text = String::from(RESULTS_HEADER);
    text.push('\n');
    for r in records {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Writes one `step,value` CSV per run under `dir/forecasts/`.
pub fn write_forecast_csvs(records: &[RunRecord], dir: &Path) -> Result<Vec<PathBuf>> {
    let fdir = dir.join("forecasts");
    fs::create_dir_all(&fdir).with_context(|| format!("creating {}", fdir.display()))?;
    let mut paths = Vec::new();
    for r in records {
        let path = fdir.join(format!("{}.csv", r.run_id()));
        let mut text = String::from("step,value\n");
        for (i, v) in r.forecast.iter().enumerate() {
            text.push_str(&format!("{},{}\n", i + 1, v));
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Per-model means of the five measures and the wall-clock phases;
/// written by the batch benchmark.
pub fn write_summary_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let mut text =
        String::from("model,runs,euclidean,dtw,euclidean_diff,dtw_diff,smape,build_seconds,train_seconds,forecast_seconds,total_seconds\n");
    for model in ["raw", "abba"] {
        let rows: Vec<&RunRecord> = records.iter().filter(|r| r.model == model).collect();
        if rows.is_empty() {
            continue;
        }
        let n = rows.len() as f64;
        let mean = |f: &dyn Fn(&RunRecord) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
        let metric =
            |f: &dyn Fn(&SimilarityReport) -> f64| {
                let with: Vec<f64> = rows.iter().filter_map(|r| r.metrics.map(|m| f(&m))).collect();
                if with.is_empty() {
                    f64::NAN
                } else {
                    with.iter().sum::<f64>() / with.len() as f64
                }
            };
        text.push_str(&format!(
            "{model},{},{},{},{},{},{},{},{},{},{}\n",
            rows.len(),
            metric(&|m| m.euclidean),
            metric(&|m| m.dtw),
            metric(&|m| m.euclidean_diff),
            metric(&|m| m.dtw_diff),
            metric(&|m| m.smape),
            mean(&|r| r.build_seconds),
            mean(&|r| r.train_seconds),
            mean(&|r| r.forecast_seconds),
            mean(&|r| r.build_seconds + r.train_seconds + r.forecast_seconds),
        ));
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Re-parses a results CSV into (header, rows-of-fields); used by tests
/// and downstream tooling. Floats are written in shortest
/// round-trippable form, so parsing a numeric field recovers the exact
/// value.
pub fn parse_results_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let header = match lines.next() {
        Some(h) => h.split(',').map(str::to_string).collect::<Vec<_>>(),
        None => bail!("empty results csv"),
    };
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != header.len() {
            bail!("row has {} fields, header has {}", fields.len(), header.len());
        }
        rows.push(fields);
    }
    Ok((header, rows))
}
