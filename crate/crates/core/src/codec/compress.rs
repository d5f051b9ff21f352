//! Greedy piecewise-linear compression of a series into (length,
//! increment) pieces.

use crate::codec::{Piece, PolygonalChain};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Sum of squared deviations of `values[start..=end]` from the chord
/// through its endpoint values.
fn chord_sse(values: &[f64], start: usize, end: usize) -> f64 {
    let len = (end - start) as f64;
    let inc = values[end] - values[start];
    let mut sse = 0.0;
    for (step, &v) in values[start + 1..end].iter().enumerate() {
        let chord = values[start] + inc * (step + 1) as f64 / len;
        let d = v - chord;
        sse += d * d;
    }
    sse
}

/// Greedy left-to-right compression. Each piece is extended as far as
/// possible while the chord through its endpoint values keeps the sum
/// of squared deviations within `(len - 1) * tol^2`; a piece of one
/// step is always acceptable. Piece lengths sum to `N - 1`.
pub fn compress(series: &TimeSeries, tol: f64) -> Result<PolygonalChain> {
    compress_capped(series, tol, None)
}

/// [`compress`] with an optional cap on the piece length in steps. The
/// cap forces segmentation of series that a chord would otherwise cover
/// in a single piece (for example a pure linear trend), which keeps
/// their symbolic strings long enough to train on.
pub fn compress_capped(
    series: &TimeSeries,
    tol: f64,
    max_piece_len: Option<usize>,
) -> Result<PolygonalChain> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if series.len() < 2 {
        return Err(Error::SeriesTooShort {
            need: 2,
            got: series.len(),
        });
    }
    let values = series.values();
    let n = values.len();
    let cap = max_piece_len.unwrap_or(usize::MAX).max(1);
    let bound_unit = tol * tol;

    let mut pieces = Vec::new();
    let mut start = 0;
    while start < n - 1 {
        let mut end = start + 1;
        while end + 1 < n {
            let len = end + 1 - start;
            if len > cap {
                break;
            }
            if chord_sse(values, start, end + 1) <= (len - 1) as f64 * bound_unit {
                end += 1;
            } else {
                break;
            }
        }
        pieces.push(Piece {
            len: end - start,
            inc: values[end] - values[start],
        });
        start = end;
    }

    Ok(PolygonalChain {
        start_value: values[0],
        pieces,
    })
}
