//! Parameter checkpoints: a JSON document holding a flat list of named
//! float64 arrays with shapes, plus the structural metadata needed to
//! rebuild the stack.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::params::{HeadKind, LstmStackParams};

const FORMAT: &str = "lstm-checkpoint-v1";

#[derive(Serialize, Deserialize)]
struct ArrayEntry {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CheckpointDoc {
    format: String,
    input_dim: usize,
    layer_cells: Vec<usize>,
    head_outputs: usize,
    head_kind: HeadKind,
    arrays: Vec<ArrayEntry>,
}

pub fn to_checkpoint_json(params: &LstmStackParams) -> Result<String> {
    let arrays = params
        .named_shapes()
        .into_iter()
        .zip(params.tensors())
        .map(|((name, shape), data)| ArrayEntry {
            name,
            shape,
            data: data.to_vec(),
        })
        .collect();
    let doc = CheckpointDoc {
        format: FORMAT.to_string(),
        input_dim: params.input_dim(),
        layer_cells: params.layers.iter().map(|l| l.cells()).collect(),
        head_outputs: params.head.outputs(),
        head_kind: params.head_kind,
        arrays,
    };
    Ok(serde_json::to_string(&doc)?)
}

pub fn from_checkpoint_json(json: &str) -> Result<LstmStackParams> {
    let doc: CheckpointDoc = serde_json::from_str(json)?;
    if doc.format != FORMAT {
        return Err(Error::MalformedCheckpoint(format!(
            "unknown format {:?}",
            doc.format
        )));
    }
    let mut params = LstmStackParams::zeros(
        doc.input_dim,
        &doc.layer_cells,
        doc.head_outputs,
        doc.head_kind,
    );
    let expected = params.named_shapes();
    if doc.arrays.len() != expected.len() {
        return Err(Error::MalformedCheckpoint(format!(
            "expected {} arrays, found {}",
            expected.len(),
            doc.arrays.len()
        )));
    }
    let mut tensors = params.tensors_mut();
    for (idx, entry) in doc.arrays.iter().enumerate() {
        let (name, shape) = &expected[idx];
        if &entry.name != name || &entry.shape != shape {
            return Err(Error::MalformedCheckpoint(format!(
                "array {idx}: expected {name} {shape:?}, found {} {:?}",
                entry.name, entry.shape
            )));
        }
        if entry.data.len() != tensors[idx].len() {
            return Err(Error::MalformedCheckpoint(format!(
                "array {name}: {} values for shape {shape:?}",
                entry.data.len()
            )));
        }
        tensors[idx].copy_from_slice(&entry.data);
    }
    Ok(params)
}

pub fn save_checkpoint(params: &LstmStackParams, path: &Path) -> Result<()> {
    let json = to_checkpoint_json(params)?;
    fs::write(path, json).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_checkpoint(path: &Path) -> Result<LstmStackParams> {
    let json = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_checkpoint_json(&json)
}
