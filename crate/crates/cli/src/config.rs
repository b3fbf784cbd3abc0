//! Experiment configuration (UTF-8 JSON).
//!
//! ```json
//! {
//!   "game": { "type": "quadratic", "c": 1010.0, "k": 0.01 },
//!   "method": "adam3",
//!   "hp": { "eta": 0.01, "beta1_1": 0.0, "kappa": 1.0, "beta2": 9.8e-7,
//!           "beta3": 0.1, "batch_m": 1, "n_iters": 10000000,
//!           "eps_guard": 1e-8, "v0_init": 0.0 },
//!   "seed": 1,
//!   "trace_stride": 1000,
//!   "outputs": { "dir": "out", "plot": true }
//! }
//! ```
//!
//! Every field is optional; missing fields take the synthetic-experiment
//! defaults shown above (`beta2` defaults to 1/(1+1010²)).

use std::path::{Path, PathBuf};

use adam3_core::{BilinearGame, Game, HyperParams64, Method, QuadraticGame, QuadraticGameParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum GameConfig {
    Quadratic { c: f64, k: f64 },
    Bilinear { scale: f64 },
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig::Quadratic { c: 1010.0, k: 0.01 }
    }
}

impl GameConfig {
    pub fn build(&self) -> Result<Box<dyn Game<f64>>, CliError> {
        Ok(match *self {
            GameConfig::Quadratic { c, k } => {
                Box::new(QuadraticGame::new(QuadraticGameParams::new(c, k)?)?)
            }
            GameConfig::Bilinear { scale } => Box::new(BilinearGame::new(scale)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), plot: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    pub method: Method,
    pub hp: HyperParams64,
    pub seed: u64,
    pub trace_stride: u64,
    pub outputs: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            game: GameConfig::default(),
            method: Method::Adam3,
            hp: HyperParams64::default(),
            seed: 1,
            trace_stride: 1000,
            outputs: OutputConfig::default(),
        }
    }
}

/// Environment variable that overrides `outputs.dir`.
pub const OUT_DIR_ENV: &str = "ADAM3_OUT_DIR";

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.hp.validate()?;
        self.game.build()?;
        if self.trace_stride == 0 {
            return Err(CliError::Config("trace_stride must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Output directory after applying the override precedence:
    /// explicit argument, then [`OUT_DIR_ENV`], then `outputs.dir`.
    pub fn resolve_out_dir(&self, explicit: Option<&Path>) -> PathBuf {
        if let Some(p) = explicit {
            return p.to_path_buf();
        }
        match std::env::var_os(OUT_DIR_ENV) {
            Some(v) if !v.is_empty() => PathBuf::from(v),
            _ => self.outputs.dir.clone(),
        }
    }
}
