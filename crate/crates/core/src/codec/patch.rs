//! Patch dictionary: the point-wise mean shape of every cluster's raw
//! segments, and reconstruction by stitching patches.

use crate::codec::{ClusterModel, PatchDictionary, PolygonalChain, SymbolicRepresentation};
use crate::error::{Error, Result};
use crate::series::{resample_linear, TimeSeries};

/// Builds one patch per cluster. Every member's raw segment is shifted
/// to start at zero and resampled to `round(mean member len) + 1`
/// samples; the patch is the point-wise mean of those shifted segments.
pub fn build_patches(
    chain: &PolygonalChain,
    source: &TimeSeries,
    model: &ClusterModel,
) -> Result<PatchDictionary> {
    let total: usize = chain.pieces.iter().map(|p| p.len).sum();
    if total + 1 != source.len() {
        return Err(Error::DimensionMismatch {
            what: "build_patches source",
            expected: total + 1,
            got: source.len(),
        });
    }
    if model.assignments.len() != chain.pieces.len() {
        return Err(Error::DimensionMismatch {
            what: "build_patches assignments",
            expected: chain.pieces.len(),
            got: model.assignments.len(),
        });
    }
    let k = model.centers.len();
    let mut patch_steps = Vec::with_capacity(k);
    for center in &model.centers {
        let steps = center.mean_len.round().max(1.0) as usize;
        patch_steps.push(steps);
    }

    let values = source.values();
    let mut sums: Vec<Vec<f64>> = patch_steps.iter().map(|&s| vec![0.0; s + 1]).collect();
    let mut counts = vec![0usize; k];

    let mut start = 0;
    for (piece, &cluster) in chain.pieces.iter().zip(&model.assignments) {
        let end = start + piece.len;
        let segment = &values[start..=end];
        let shifted: Vec<f64> = segment.iter().map(|v| v - segment[0]).collect();
        let resampled = resample_linear(&shifted, patch_steps[cluster] + 1)?;
        for (acc, v) in sums[cluster].iter_mut().zip(&resampled) {
            *acc += v;
        }
        counts[cluster] += 1;
        start = end;
    }

    let patches = sums
        .into_iter()
        .zip(&counts)
        .map(|(sum, &c)| sum.into_iter().map(|v| v / c.max(1) as f64).collect())
        .collect();
    Ok(PatchDictionary { patches })
}

/// Stitches patches in symbol order. Each patch is shifted so its first
/// sample coincides with the running value; the running value advances
/// by the patch's net increment. Output begins at the start value.
pub fn patched_reconstruct(rep: &SymbolicRepresentation) -> Result<TimeSeries> {
    let patches = rep.patches.as_ref().ok_or(Error::MissingPatches)?;
    let mut out = vec![rep.start_value];
    let mut running = rep.start_value;
    for &sym in &rep.symbols {
        let patch = patches
            .patches
            .get(sym)
            .ok_or(Error::UnknownSymbol(symbol_char(sym)))?;
        for &v in &patch[1..] {
            out.push(running + (v - patch[0]));
        }
        running += patch[patch.len() - 1] - patch[0];
    }
    TimeSeries::new(out)
}

/// Appends the numeric continuation of `symbols` starting from
/// `last_value`, without re-emitting the starting sample. Used by the
/// symbolic forecaster, which stitches forecast patches onto the end of
/// the observed series.
pub fn continue_with_patches(
    patches: &PatchDictionary,
    symbols: &[usize],
    last_value: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    let mut running = last_value;
    for &sym in symbols {
        let patch = patches
            .patches
            .get(sym)
            .ok_or(Error::UnknownSymbol(symbol_char(sym)))?;
        for &v in &patch[1..] {
            out.push(running + (v - patch[0]));
        }
        running += patch[patch.len() - 1] - patch[0];
    }
    Ok(out)
}

pub(crate) fn symbol_char(sym: usize) -> char {
    (b'a' + (sym as u8).min(25)) as char
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{AbbaConfig, ClusterCenter, Piece};
    use crate::codec::compress::compress;
    use crate::codec::digitize::digitize;
    use approx::assert_relative_eq;

    #[test]
    fn single_member_cluster_patch_is_shifted_segment() {
        let source = TimeSeries::new(vec![2.0, 3.5, 2.5]).unwrap();
        let chain = PolygonalChain {
            start_value: 2.0,
            pieces: vec![Piece { len: 2, inc: 0.5 }],
        };
        let model = ClusterModel {
            assignments: vec![0],
            centers: vec![ClusterCenter { mean_len: 2.0, mean_inc: 0.5 }],
            scaling: 0.0,
        };
        let dict = build_patches(&chain, &source, &model).unwrap();
        assert_eq!(dict.patches[0], vec![0.0, 1.5, 0.5]);
    }

    #[test]
    fn mixed_length_members_average_after_resampling() {
        // members [0,2] (len 1) and [0,0,4] (len 2): mean len 1.5 rounds
        // to 2; [0,2] resamples to [0,1,2]; mean with [0,0,4] is [0,0.5,3]
        let source = TimeSeries::new(vec![0.0, 2.0, 2.0, 6.0]).unwrap();
        let chain = PolygonalChain {
            start_value: 0.0,
            pieces: vec![Piece { len: 1, inc: 2.0 }, Piece { len: 2, inc: 4.0 }],
        };
        let model = ClusterModel {
            assignments: vec![0, 0],
            centers: vec![ClusterCenter { mean_len: 1.5, mean_inc: 3.0 }],
            scaling: 0.0,
        };
        let dict = build_patches(&chain, &source, &model).unwrap();
        assert_eq!(dict.patches[0], vec![0.0, 0.5, 3.0]);
    }

    #[test]
    fn patch_net_increment_matches_mean_member_increment() {
        let v: Vec<f64> = (0..400)
            .map(|i| (i as f64 * 0.11).sin() * 1.3 + (i as f64 * 0.029).cos())
            .collect();
        let source = TimeSeries::new(v).unwrap();
        let chain = compress(&source, 0.2).unwrap();
        let rep = digitize(&chain, &AbbaConfig::default()).unwrap();
        let dict = build_patches(&chain, &source, &rep.cluster_model).unwrap();
        for (j, patch) in dict.patches.iter().enumerate() {
            let net = patch[patch.len() - 1] - patch[0];
            assert_relative_eq!(net, rep.cluster_model.centers[j].mean_inc, epsilon = 1e-9);
        }
    }

    #[test]
    fn reconstruct_single_patch() {
        let rep = SymbolicRepresentation {
            symbols: vec![0],
            start_value: 5.0,
            cluster_model: ClusterModel {
                assignments: vec![0],
                centers: vec![ClusterCenter { mean_len: 2.0, mean_inc: 2.0 }],
                scaling: 0.0,
            },
            patches: Some(PatchDictionary { patches: vec![vec![0.0, 1.0, 2.0]] }),
        };
        let ts = patched_reconstruct(&rep).unwrap();
        assert_eq!(ts.values(), &[5.0, 6.0, 7.0]);
    }

    #[test]
    fn reconstruct_advances_running_value() {
        let rep = SymbolicRepresentation {
            symbols: vec![0, 0],
            start_value: 0.0,
            cluster_model: ClusterModel {
                assignments: vec![0, 0],
                centers: vec![ClusterCenter { mean_len: 1.0, mean_inc: 1.0 }],
                scaling: 0.0,
            },
            patches: Some(PatchDictionary { patches: vec![vec![0.0, 1.0]] }),
        };
        let ts = patched_reconstruct(&rep).unwrap();
        assert_eq!(ts.values(), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn reconstruct_without_patches_errors() {
        let rep = SymbolicRepresentation {
            symbols: vec![0],
            start_value: 0.0,
            cluster_model: ClusterModel {
                assignments: vec![0],
                centers: vec![ClusterCenter { mean_len: 1.0, mean_inc: 0.0 }],
                scaling: 0.0,
            },
            patches: None,
        };
        assert!(matches!(patched_reconstruct(&rep), Err(Error::MissingPatches)));
    }
}
