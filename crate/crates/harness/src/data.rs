//! Data ingestion (UCR-style TSV, single-column CSV) and the synthetic
//! series used by the experiments.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use abba_lstm::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parses a UCR-style TSV file: one series per row, first column the
/// class label, remaining columns the samples. NaN-padded tails are
/// trimmed; any interior non-finite sample is an error.
pub fn load_ucr(path: &Path) -> Result<Vec<(String, TimeSeries)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(['\t', ',']);
        let label = fields
            .next()
            .with_context(|| format!("{}:{}: empty row", path.display(), lineno + 1))?
            .trim()
            .to_string();
        let mut values = Vec::new();
        for (col, field) in fields.enumerate() {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().with_context(|| {
                format!(
                    "{}:{}: column {} is not a number: {:?}",
                    path.display(),
                    lineno + 1,
                    col + 2,
                    field
                )
            })?;
            values.push(v);
        }
        while values.last().is_some_and(|v| v.is_nan()) {
            values.pop();
        }
        if values.is_empty() {
            bail!("{}:{}: row has no samples", path.display(), lineno + 1);
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            bail!(
                "{}:{}: non-finite sample at column {}",
                path.display(),
                lineno + 1,
                idx + 2
            );
        }
        out.push((label, TimeSeries::new(values)?));
    }
    if out.is_empty() {
        bail!("{}: file contains no series", path.display());
    }
    Ok(out)
}

/// Walks a UCR archive directory and returns the first series of every
/// `*_TRAIN.tsv` file, labelled by data-set name, in path order.
pub fn scan_ucr_dir(dir: &Path) -> Result<Vec<(String, TimeSeries)>> {
    let mut files = Vec::new();
    collect_train_files(dir, &mut files)?;
    files.sort();
    if files.is_empty() {
        bail!("{}: no *_TRAIN.tsv files found", dir.display());
    }
    let mut out = Vec::new();
    for file in files {
        let name = file
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("series")
            .trim_end_matches("_TRAIN")
            .to_string();
        let rows = load_ucr(&file)?;
        let (_, series) = rows.into_iter().next().expect("load_ucr rejects empty files");
        out.push((name, series));
    }
    Ok(out)
}

fn collect_train_files(dir: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.is_dir() {
            collect_train_files(&path, files)?;
        } else if path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with("_TRAIN.tsv"))
        {
            files.push(path);
        }
    }
    Ok(())
}

/// Parses a single-column CSV of floats with an optional header line.
pub fn load_csv(path: &Path) -> Result<TimeSeries> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let field = line.trim().trim_end_matches(',');
        if field.is_empty() {
            continue;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(_) => bail!("{}:{}: non-finite value", path.display(), lineno + 1),
            Err(_) if lineno == 0 => continue, // header
            Err(_) => bail!(
                "{}:{}: not a number: {:?}",
                path.display(),
                lineno + 1,
                field
            ),
        }
    }
    if values.is_empty() {
        bail!("{}: no samples found", path.display());
    }
    Ok(TimeSeries::new(values)?)
}

/// `sin(2 pi i n / N)` for `i = 1..=N`: a sine with `n` full
/// oscillations over the series.
pub fn sine_series(n_samples: usize, freq: usize) -> TimeSeries {
    let vals = (1..=n_samples)
        .map(|i| (2.0 * std::f64::consts::PI * i as f64 * freq as f64 / n_samples as f64).sin())
        .collect();
    TimeSeries::new(vals).expect("sine is finite")
}

/// The true continuation of [`sine_series`] for the next `horizon` steps.
pub fn sine_truth(n_samples: usize, freq: usize, horizon: usize) -> Vec<f64> {
    (n_samples + 1..=n_samples + horizon)
        .map(|i| (2.0 * std::f64::consts::PI * i as f64 * freq as f64 / n_samples as f64).sin())
        .collect()
}

/// Linearly increasing series over [0, 0.5].
pub fn trend_series(n_samples: usize) -> TimeSeries {
    let slope = 0.5 / (n_samples - 1) as f64;
    TimeSeries::new((0..n_samples).map(|i| i as f64 * slope).collect()).expect("ramp is finite")
}

/// Continuation of the ramp at the same slope; for N = 200 and
/// horizon = 200 the final value is 0.5 / 199 * 399, about 1.0.
pub fn trend_truth(n_samples: usize, horizon: usize) -> Vec<f64> {
    let slope = 0.5 / (n_samples - 1) as f64;
    (n_samples..n_samples + horizon)
        .map(|i| i as f64 * slope)
        .collect()
}

/// Value bands of the two-level demand series: the low and high dwell
/// intervals.
pub const LOW_BAND: (f64, f64) = (340.0, 370.0);
pub const HIGH_BAND: (f64, f64) = (2450.0, 2550.0);

/// Seeded two-level square wave with uniform noise inside the bands,
/// switching instantly between dwells of varying length. Stands in for
/// the household-usage series when no data file is supplied.
pub fn square_wave_surrogate(seed: u64, len: usize) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = Vec::with_capacity(len);
    let mut low = true;
    while vals.len() < len {
        let (band, dwell) = if low {
            (LOW_BAND, rng.gen_range(25..45))
        } else {
            (HIGH_BAND, rng.gen_range(20..35))
        };
        for _ in 0..dwell {
            if vals.len() == len {
                break;
            }
            vals.push(rng.gen_range(band.0..band.1));
        }
        low = !low;
    }
    TimeSeries::new(vals).expect("surrogate is finite")
}

/// Length-1000 synthetic series for the timing comparison: two
/// incommensurate sines plus mild noise, compressible to a usable
/// symbol string.
pub fn speed_benchmark_series(seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1000;
    let vals = (1..=n)
        .map(|i| {
            let t = i as f64 / n as f64;
            (2.0 * std::f64::consts::PI * t * 8.0).sin()
                + 0.3 * (2.0 * std::f64::consts::PI * t * 17.0).sin()
                + rng.gen_range(-0.02..0.02)
        })
        .collect();
    TimeSeries::new(vals).expect("finite")
}
