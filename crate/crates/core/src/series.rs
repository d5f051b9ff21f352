//! Time-series container and the shared preprocessing primitives:
//! z-normalization, differencing and linear resampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered sequence of finite real samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    /// Validates and wraps raw samples. Rejects empty input and any
    /// non-finite sample.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample(idx));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Mean and standard deviation recorded by [`znormalize`] so the
/// transform can be undone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub mean: f64,
    pub std: f64,
}

impl NormalizationParams {
    pub fn normalize_value(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn denormalize_value(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }

    pub fn denormalize(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&z| self.denormalize_value(z)).collect()
    }
}

/// Shifts and scales a series to sample mean 0 and population standard
/// deviation 1. A constant series maps to all zeros with std recorded
/// as 1, which keeps the round trip exact.
pub fn znormalize(series: &TimeSeries) -> (TimeSeries, NormalizationParams) {
    let n = series.len() as f64;
    let mean = series.values().iter().sum::<f64>() / n;
    let var = series
        .values()
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    let std = if std > 0.0 { std } else { 1.0 };
    let values = series
        .values()
        .iter()
        .map(|v| (v - mean) / std)
        .collect::<Vec<_>>();
    (
        TimeSeries { values },
        NormalizationParams { mean, std },
    )
}

/// First differences: output element `i` equals `t[i+1] - t[i]`.
pub fn difference(series: &TimeSeries) -> Result<TimeSeries> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShortToDifference);
    }
    let values = series
        .values()
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect::<Vec<_>>();
    Ok(TimeSeries { values })
}

/// Piecewise-linear resampling of a segment onto `target_len` samples
/// uniformly spaced over the input's index range. Endpoints are
/// preserved exactly.
pub fn resample_linear(segment: &[f64], target_len: usize) -> Result<Vec<f64>> {
    if segment.len() < 2 {
        return Err(Error::SeriesTooShort {
            need: 2,
            got: segment.len(),
        });
    }
    if target_len < 2 {
        return Err(Error::ResampleTargetTooSmall(target_len));
    }
    let last = segment.len() - 1;
    let scale = last as f64 / (target_len - 1) as f64;
    let mut out = Vec::with_capacity(target_len);
    for i in 0..target_len {
        if i == target_len - 1 {
            out.push(segment[last]);
            continue;
        }
        let p = i as f64 * scale;
        let lo = p.floor() as usize;
        let frac = p - lo as f64;
        if lo >= last {
            out.push(segment[last]);
        } else {
            out.push(segment[lo] + frac * (segment[lo + 1] - segment[lo]));
        }
    }
    Ok(out)
}
