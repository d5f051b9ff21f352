//! Experiment configuration: a TOML document mapping 1:1 onto
//! [`ExperimentConfig`]; command-line flags override file values, and
//! every experiment fills unset fields with its own defaults.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

/// Which experiment a config drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Sine,
    Trend,
    Shape,
    Bench,
    Forecast,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sine => "sine",
            Self::Trend => "trend",
            Self::Shape => "shape",
            Self::Bench => "bench",
            Self::Forecast => "forecast",
        }
    }
}

/// Which pipelines to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Raw,
    Abba,
    #[default]
    Both,
}

impl ModelKind {
    pub fn runs_raw(&self) -> bool {
        matches!(self, Self::Raw | Self::Both)
    }

    pub fn runs_abba(&self) -> bool {
        matches!(self, Self::Abba | Self::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeOverride {
    Stateful,
    Stateless,
    Both,
}

/// Optional overrides of the per-experiment training defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainOverrides {
    /// Lag for the raw pipeline (time series values).
    pub lag: Option<usize>,
    /// Lag for the symbolic pipeline (symbols).
    pub symbolic_lag: Option<usize>,
    pub cells: Option<usize>,
    pub layers: Option<usize>,
    pub patience: Option<usize>,
    pub dropout: Option<f64>,
    pub mode: Option<ModeOverride>,
    pub max_epochs: Option<usize>,
}

/// Optional overrides of the symbolic-transform defaults.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbbaOverrides {
    pub tol: Option<f64>,
    pub max_k: Option<usize>,
    pub scaling: Option<f64>,
    pub max_piece_len: Option<usize>,
}

/// One experiment invocation.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<ExperimentKind>,
    pub model: ModelKind,
    /// Seeds to repeat every run with; empty means the experiment default.
    pub seeds: Vec<u64>,
    /// Forecast length; unset means the experiment default.
    pub horizon: Option<usize>,
    pub out: Option<PathBuf>,
    pub data: Option<PathBuf>,
    /// Grid shrink factor in (0, 1] for desk-scale runs of the sine sweep.
    pub scale: f64,
    /// Explicit sine frequencies; unset means the scaled 1..=100 grid.
    pub freqs: Option<Vec<usize>>,
    pub train: TrainOverrides,
    pub abba: AbbaOverrides,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            kind: None,
            model: ModelKind::Both,
            seeds: Vec::new(),
            horizon: None,
            out: None,
            data: None,
            scale: 1.0,
            freqs: None,
            train: TrainOverrides::default(),
            abba: AbbaOverrides::default(),
        }
    }
}

/// Environment variable providing the default output directory.
pub const OUT_DIR_ENV: &str = "ABBA_LSTM_OUT";

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    /// The output directory: explicit setting, then the environment
    /// variable, then `results/<kind>`.
    pub fn out_dir(&self) -> PathBuf {
        if let Some(out) = &self.out {
            return out.clone();
        }
        if let Ok(env) = std::env::var(OUT_DIR_ENV) {
            if !env.is_empty() {
                return PathBuf::from(env);
            }
        }
        let kind = self.kind.map(|k| k.name()).unwrap_or("run");
        PathBuf::from("results").join(kind)
    }

    pub fn seeds_or(&self, default_count: u64) -> Vec<u64> {
        if self.seeds.is_empty() {
            (0..default_count).collect()
        } else {
            self.seeds.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn toml_round_trip_covers_all_fields() {
        let text = r#"
kind = "sine"
model = "abba"
seeds = [0, 1, 2]
horizon = 200
out = "out/sine"
scale = 0.05
freqs = [5, 20, 40]

[train]
lag = 50
symbolic_lag = 5
cells = 50
patience = 50
mode = "stateful"

[abba]
tol = 0.1
max_k = 10
"#;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();

        let cfg = ExperimentConfig::from_file(&path).unwrap();
        assert_eq!(cfg.kind, Some(ExperimentKind::Sine));
        assert!(cfg.model.runs_abba() && !cfg.model.runs_raw());
        assert_eq!(cfg.seeds, vec![0, 1, 2]);
        assert_eq!(cfg.freqs, Some(vec![5, 20, 40]));
        assert_eq!(cfg.train.symbolic_lag, Some(5));
        assert_eq!(cfg.abba.tol, Some(0.1));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        fs::write(&path, "totally_unknown = 1\n").unwrap();
        assert!(ExperimentConfig::from_file(&path).is_err());
    }

    #[test]
    fn default_seeds_fill_in() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.seeds_or(3), vec![0, 1, 2]);
    }
}
