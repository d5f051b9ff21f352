//! Training-set construction: overlapping lag windows and their
//! chronological grouping for stateful training.

use crate::error::{Error, Result};

/// One input/output pair cut from the source sequence by a sliding
/// window of width `lag + 1`. `origin_index` is the 1-based position of
/// the window's first element.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingPair<T> {
    pub input: Vec<T>,
    pub output: T,
    pub origin_index: usize,
}

/// Slides a window of width `lag + 1` over the sequence, producing
/// exactly `N - lag` pairs; pair `i` has input `t_i..t_{i+lag-1}` and
/// output `t_{i+lag}`.
pub fn build_windows<T: Clone>(seq: &[T], lag: usize) -> Result<Vec<TrainingPair<T>>> {
    if lag == 0 || seq.len() <= lag {
        return Err(Error::LagTooLarge {
            lag,
            len: seq.len(),
        });
    }
    Ok((0..seq.len() - lag)
        .map(|i| TrainingPair {
            input: seq[i..i + lag].to_vec(),
            output: seq[i + lag].clone(),
            origin_index: i + 1,
        })
        .collect())
}

/// Pairs for many-to-many training: input of `lag` values, output of
/// the following `horizon` values.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectPair<T> {
    pub input: Vec<T>,
    pub outputs: Vec<T>,
    pub origin_index: usize,
}

pub fn build_windows_direct<T: Clone>(
    seq: &[T],
    lag: usize,
    horizon: usize,
) -> Result<Vec<DirectPair<T>>> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    if lag == 0 || seq.len() < lag + horizon {
        return Err(Error::LagTooLarge {
            lag,
            len: seq.len(),
        });
    }
    Ok((0..seq.len() - lag - horizon + 1)
        .map(|i| DirectPair {
            input: seq[i..i + lag].to_vec(),
            outputs: seq[i + lag..i + lag + horizon].to_vec(),
            origin_index: i + 1,
        })
        .collect())
}

/// The `lag` chronological groups used by stateful training. Group `g`
/// (0-indexed) holds the pairs whose origin is congruent to `g + 1`
/// modulo `lag`, in increasing origin order, so within a group each
/// input begins exactly where the previous window ended.
#[derive(Clone, Debug, PartialEq)]
pub struct StatefulGroups<T> {
    pub groups: Vec<Vec<TrainingPair<T>>>,
}

pub fn group_stateful<T: Clone>(pairs: &[TrainingPair<T>], lag: usize) -> StatefulGroups<T> {
    let mut groups = vec![Vec::new(); lag];
    for pair in pairs {
        groups[(pair.origin_index - 1) % lag].push(pair.clone());
    }
    StatefulGroups { groups }
}
