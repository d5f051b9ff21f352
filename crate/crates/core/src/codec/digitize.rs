//! Digitization: cluster (len, inc) pieces and assign one alphabet
//! symbol per cluster, choosing the cluster count adaptively.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::codec::{AbbaConfig, ClusterCenter, ClusterModel, PolygonalChain, SymbolicRepresentation};
use crate::codec::kmeans::kmeans;
use crate::error::{Error, Result};

fn population_std(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Standardizes each coordinate by its own population mean/std; a
/// coordinate with zero spread collapses to zeros.
fn standardize(values: &[f64]) -> Vec<f64> {
    let std = population_std(values);
    if std == 0.0 {
        return vec![0.0; values.len()];
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean) / std).collect()
}

/// Within-cluster sum of squares of the raw increment coordinate.
fn increment_wcss(incs: &[f64], assign: &[usize]) -> f64 {
    let k = assign.iter().copied().max().map_or(0, |m| m + 1);
    let mut sums = vec![0.0f64; k];
    let mut counts = vec![0usize; k];
    for (&inc, &a) in incs.iter().zip(assign) {
        sums[a] += inc;
        counts[a] += 1;
    }
    let mut wcss = 0.0;
    for (&inc, &a) in incs.iter().zip(assign) {
        let mean = sums[a] / counts[a] as f64;
        let d = inc - mean;
        wcss += d * d;
    }
    wcss
}

/// Compacts cluster ids into first-appearance order so the first piece
/// always takes symbol 0 ('a'), and recomputes centers as raw-space
/// member means.
fn relabel_and_center(
    assign: &[usize],
    lens: &[f64],
    incs: &[f64],
) -> (Vec<usize>, Vec<ClusterCenter>) {
    let mut map: Vec<Option<usize>> = vec![None; assign.iter().max().unwrap() + 1];
    let mut relabeled = Vec::with_capacity(assign.len());
    let mut order = Vec::new();
    for &a in assign {
        let id = *map[a].get_or_insert_with(|| {
            order.push(a);
            order.len() - 1
        });
        relabeled.push(id);
    }
    let k = order.len();
    let mut len_sum = vec![0.0; k];
    let mut inc_sum = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (i, &id) in relabeled.iter().enumerate() {
        len_sum[id] += lens[i];
        inc_sum[id] += incs[i];
        counts[id] += 1;
    }
    let centers = (0..k)
        .map(|j| ClusterCenter {
            mean_len: len_sum[j] / counts[j] as f64,
            mean_inc: inc_sum[j] / counts[j] as f64,
        })
        .collect();
    (relabeled, centers)
}

/// Clusters the chain's pieces with k-means on standardized
/// `(scaling * len, inc)` coordinates. The cluster count is the
/// smallest `k <= max_k` whose within-cluster sum of squares of the
/// increment coordinate drops below `0.25 * m * tol^2`, falling back to
/// `max_k`. Symbols are letters in first-appearance order.
pub fn digitize(chain: &PolygonalChain, config: &AbbaConfig) -> Result<SymbolicRepresentation> {
    if config.max_k == 0 {
        return Err(Error::ZeroMaxK);
    }
    if config.max_k > 26 {
        return Err(Error::AlphabetExhausted(config.max_k));
    }
    if chain.pieces.is_empty() {
        return Err(Error::SeriesTooShort { need: 2, got: 1 });
    }
    let m = chain.pieces.len();
    let lens: Vec<f64> = chain.pieces.iter().map(|p| p.len as f64).collect();
    let incs: Vec<f64> = chain.pieces.iter().map(|p| p.inc).collect();

    let zl = standardize(&lens);
    let zi = standardize(&incs);
    let points: Vec<[f64; 2]> = zl
        .iter()
        .zip(&zi)
        .map(|(&l, &i)| [config.scaling * l, i])
        .collect();

    let bound = 0.25 * m as f64 * config.tol * config.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut assign = vec![0usize; m];
    for k in 1..=config.max_k {
        assign = kmeans(&points, k, &mut rng);
        if increment_wcss(&incs, &assign) <= bound {
            break;
        }
    }

    let (symbols, centers) = relabel_and_center(&assign, &lens, &incs);
    Ok(SymbolicRepresentation {
        start_value: chain.start_value,
        cluster_model: ClusterModel {
            assignments: symbols.clone(),
            centers,
            scaling: config.scaling,
        },
        symbols,
        patches: None,
    })
}
