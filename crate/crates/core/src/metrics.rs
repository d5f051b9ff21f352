//! Forecast-accuracy measures: Euclidean distance, dynamic time
//! warping, sMAPE, and the combined report with differenced variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{difference, TimeSeries};

/// The five similarity measures computed between a forecast and the truth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub euclidean: f64,
    pub dtw: f64,
    pub euclidean_diff: f64,
    pub dtw_diff: f64,
    pub smape: f64,
}

/// Euclidean distance between two equal-length sequences.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "euclidean",
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Dynamic time warping distance with squared point cost and no
/// warping-window constraint; the accumulated cost is square-rooted at
/// the end so identical inputs score 0 and the diagonal path bounds the
/// result by the Euclidean distance.
pub fn dtw(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &x in a {
        curr[0] = f64::INFINITY;
        for j in 1..=m {
            let d = x - b[j - 1];
            let cost = d * d;
            curr[j] = cost + prev[j].min(curr[j - 1]).min(prev[j - 1]);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    Ok(prev[m].sqrt())
}

/// Symmetric mean absolute percentage error on the 0-200 scale. Terms
/// with a zero denominator contribute zero.
pub fn smape(forecast: &[f64], actual: &[f64]) -> Result<f64> {
    if forecast.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            what: "smape",
            expected: actual.len(),
            got: forecast.len(),
        });
    }
    if forecast.is_empty() {
        return Err(Error::EmptySeries);
    }
    let sum: f64 = forecast
        .iter()
        .zip(actual)
        .map(|(f, a)| {
            let denom = f.abs() + a.abs();
            if denom == 0.0 {
                0.0
            } else {
                (f - a).abs() / denom
            }
        })
        .sum();
    Ok(200.0 * sum / forecast.len() as f64)
}

/// All five measures; the differenced variants are computed on first
/// differences of both inputs.
pub fn report(forecast: &[f64], actual: &[f64]) -> Result<SimilarityReport> {
    if forecast.len() != actual.len() {
        return Err(Error::DimensionMismatch {
            what: "report",
            expected: actual.len(),
            got: forecast.len(),
        });
    }
    let fd = difference(&TimeSeries::new(forecast.to_vec())?)?;
    let ad = difference(&TimeSeries::new(actual.to_vec())?)?;
    Ok(SimilarityReport {
        euclidean: euclidean(forecast, actual)?,
        dtw: dtw(forecast, actual)?,
        euclidean_diff: euclidean(fd.values(), ad.values())?,
        dtw_diff: dtw(fd.values(), ad.values())?,
        smape: smape(forecast, actual)?,
    })
}
