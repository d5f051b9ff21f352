//! The ABBA symbolic representation: compression into (len, inc)
//! pieces, mean-based digitization into a symbol string, the inverse
//! transforms, and patched reconstruction.
//!
//! The forward transform has two stages (compression, digitization);
//! the numeric reconstruction has three (inverse-digitization,
//! quantization, inverse-compression), or alternatively a single
//! patched reconstruction using per-cluster mean shapes.

mod compress;
mod digitize;
mod kmeans;
mod patch;

pub use compress::{compress, compress_capped};
pub use digitize::digitize;
pub use patch::{build_patches, continue_with_patches, patched_reconstruct};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// One straight-line piece: `len` index steps accumulating `inc` in value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub len: usize,
    pub inc: f64,
}

/// A polygonal chain through the compression breakpoints: the start
/// value followed by the pieces. Piece lengths sum to `N - 1` of the
/// source series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonalChain {
    pub start_value: f64,
    pub pieces: Vec<Piece>,
}

/// A chain with real-valued lengths, produced by inverse-digitization
/// before the lengths are realigned to the integer grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RealChain {
    pub start_value: f64,
    /// (len, inc) tuples; lengths are cluster means and need not be integers.
    pub tuples: Vec<(f64, f64)>,
}

/// Cluster center in raw (len, inc) coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterCenter {
    pub mean_len: f64,
    pub mean_inc: f64,
}

/// Clustering outcome of digitization: per-piece cluster index plus the
/// raw-space center of every cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub assignments: Vec<usize>,
    pub centers: Vec<ClusterCenter>,
    pub scaling: f64,
}

/// Per-symbol mean shapes. Patch `j` belongs to symbol `j` and holds
/// `round(mean member len) + 1` samples starting at zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchDictionary {
    pub patches: Vec<Vec<f64>>,
}

/// The symbolic representation of a series: the symbol string, the
/// start value, the cluster model, and (after [`transform`]) the patch
/// dictionary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicRepresentation {
    /// Symbol indices in first-appearance order; index `j` renders as
    /// the letter `'a' + j`.
    pub symbols: Vec<usize>,
    pub start_value: f64,
    pub cluster_model: ClusterModel,
    pub patches: Option<PatchDictionary>,
}

impl SymbolicRepresentation {
    /// The symbol string over the alphabet 'a', 'b', ...
    pub fn string(&self) -> String {
        self.symbols.iter().map(|&s| patch::symbol_char(s)).collect()
    }

    /// Number of distinct symbols (= number of clusters).
    pub fn alphabet_len(&self) -> usize {
        self.cluster_model.centers.len()
    }

    /// Number of symbols in the string.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Serializes to a JSON document (string, start value, centers and
    /// patches as float arrays).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }
}

/// Parameters of the symbolic transform.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbbaConfig {
    /// Compression tolerance on (typically z-normalized) data.
    pub tol: f64,
    /// Upper bound on the alphabet size (at most 26).
    pub max_k: usize,
    /// Weight of the length coordinate during clustering; 0 clusters on
    /// increments only.
    pub scaling: f64,
    /// Optional cap on piece length in steps; `None` leaves pieces
    /// unbounded.
    pub max_piece_len: Option<usize>,
    /// Seed for k-means++ so digitization is reproducible.
    pub seed: u64,
}

impl Default for AbbaConfig {
    fn default() -> Self {
        Self {
            tol: 0.1,
            max_k: 10,
            scaling: 0.0,
            max_piece_len: None,
            seed: 0,
        }
    }
}

/// Which numeric reconstruction to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReconstructionMode {
    /// Inverse-digitization, quantization, inverse-compression.
    Polygonal,
    /// Stitching of per-cluster mean patches.
    Patched,
}

/// Replaces every symbol by the center tuple of its cluster. The
/// resulting lengths are real-valued.
pub fn inverse_digitize(rep: &SymbolicRepresentation) -> Result<RealChain> {
    let mut tuples = Vec::with_capacity(rep.symbols.len());
    for &sym in &rep.symbols {
        let center = rep
            .cluster_model
            .centers
            .get(sym)
            .ok_or(Error::UnknownSymbol(patch::symbol_char(sym)))?;
        tuples.push((center.mean_len, center.mean_inc));
    }
    Ok(RealChain {
        start_value: rep.start_value,
        tuples,
    })
}

/// Realigns real-valued lengths with the integer grid by error-carrying
/// rounding: the cumulative length after piece `j` equals the rounded
/// cumulative real length, with a minimum piece length of 1.
pub fn quantize(chain: &RealChain) -> PolygonalChain {
    let mut pieces = Vec::with_capacity(chain.tuples.len());
    let mut cum_real = 0.0;
    let mut cum_int: i64 = 0;
    for &(len, inc) in &chain.tuples {
        cum_real += len;
        let target = cum_real.round() as i64;
        let len_int = (target - cum_int).max(1);
        cum_int += len_int;
        pieces.push(Piece {
            len: len_int as usize,
            inc,
        });
    }
    PolygonalChain {
        start_value: chain.start_value,
        pieces,
    }
}

/// Stitches the linear pieces back into raw values: starting at the
/// start value, each piece contributes `len` linearly spaced steps
/// accumulating `inc`.
pub fn inverse_compress(chain: &PolygonalChain) -> TimeSeries {
    let total: usize = chain.pieces.iter().map(|p| p.len).sum();
    let mut out = Vec::with_capacity(total + 1);
    out.push(chain.start_value);
    let mut base = chain.start_value;
    for p in &chain.pieces {
        for step in 1..=p.len {
            out.push(base + p.inc * step as f64 / p.len as f64);
        }
        base += p.inc;
    }
    TimeSeries::new(out).expect("reconstruction of finite pieces is finite")
}

/// The full forward transform: compression then digitization, plus the
/// patch dictionary for patched reconstruction.
pub fn transform(series: &TimeSeries, config: &AbbaConfig) -> Result<SymbolicRepresentation> {
    let chain = compress_capped(series, config.tol, config.max_piece_len)?;
    let mut rep = digitize(&chain, config)?;
    rep.patches = Some(build_patches(&chain, series, &rep.cluster_model)?);
    Ok(rep)
}

/// The numeric reconstruction in the requested mode.
pub fn inverse_transform(rep: &SymbolicRepresentation, mode: ReconstructionMode) -> Result<TimeSeries> {
    match mode {
        ReconstructionMode::Polygonal => {
            let real = inverse_digitize(rep)?;
            Ok(inverse_compress(&quantize(&real)))
        }
        ReconstructionMode::Patched => patched_reconstruct(rep),
    }
}
