use std::fs;
use std::path::{Path, PathBuf};

use gaitmatrix::estimator::EstimatorConfig;
use gaitmatrix::gaitcontrol::ActuationWaveform;
use gaitmatrix::planner::Sense;
use gaitmatrix::quasistatic::{BodyDocument, BODY_SCHEMA};
use gaitmatrix::statecore::{RewardMatrix, RewardMatrixDocument};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const PROJECT_SCHEMA: &str = "gaitmatrix/project/v1";

/// Travel direction; forward maximizes the summed reward.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl From<Direction> for Sense {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Forward => Sense::Maximize,
            Direction::Backward => Sense::Minimize,
        }
    }
}

/// A file reference or the document itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Source<T> {
    Path(PathBuf),
    Inline(T),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub l_max: usize,
    pub sense: Direction,
    /// Per-transition durations in ms, row = from.
    pub durations_ms: Option<Vec<Vec<f64>>>,
    pub mean: bool,
    pub rate: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            l_max: 4,
            sense: Direction::Forward,
            durations_ms: None,
            mean: false,
            rate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaitConfig {
    /// State tokens; planned from the body when absent.
    pub sequence: Option<Vec<String>>,
    pub cycles: usize,
    pub tick_ms: f64,
    pub log_every: usize,
    pub waveform: Option<ActuationWaveform<f64>>,
}

impl Default for GaitConfig {
    fn default() -> Self {
        Self {
            sequence: None,
            cycles: 3,
            tick_ms: 100.0,
            log_every: 8,
            waveform: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectConfig {
    pub schema: String,
    #[serde(default)]
    pub body: Option<Source<BodyDocument<f64>>>,
    #[serde(default)]
    pub matrix: Option<Source<RewardMatrixDocument>>,
    #[serde(default)]
    pub trials: Option<PathBuf>,
    /// State count for learned matrices.
    #[serde(default)]
    pub states: Option<usize>,
    #[serde(default)]
    pub estimator: EstimatorConfig<f64>,
    #[serde(default)]
    pub planner: PlannerConfig,
    #[serde(default)]
    pub gait: GaitConfig,
    #[serde(default)]
    pub outputs: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        Self {
            schema: PROJECT_SCHEMA.into(),
            body: None,
            matrix: None,
            trials: None,
            states: None,
            estimator: EstimatorConfig::default(),
            planner: PlannerConfig::default(),
            gait: GaitConfig::default(),
            outputs: None,
            seed: None,
        }
    }
}

impl ProjectConfig {
    /// Loads a project file; relative paths inside it are made relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut cfg: ProjectConfig = read_json(path)?;
        if cfg.schema != PROJECT_SCHEMA {
            return Err(CliError::file(
                path,
                format!("unsupported schema `{}`, expected `{}`", cfg.schema, PROJECT_SCHEMA),
            ));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(Source::Path(p)) = &mut cfg.body {
            rebase(p);
        }
        if let Some(Source::Path(p)) = &mut cfg.matrix {
            rebase(p);
        }
        if let Some(p) = &mut cfg.trials {
            rebase(p);
        }
        if let Some(p) = &mut cfg.outputs {
            rebase(p);
        }
        if cfg.planner.l_max == 0 {
            return Err(CliError::file(path, "planner.l_max must be at least 1"));
        }
        Ok(cfg)
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::file(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CliError::file(path, e))
}

pub fn load_body(path: &Path) -> Result<BodyDocument<f64>, CliError> {
    let doc: BodyDocument<f64> = read_json(path)?;
    check_body(doc).map_err(|e| CliError::file(path, e))
}

pub fn check_body(doc: BodyDocument<f64>) -> Result<BodyDocument<f64>, CliError> {
    if doc.schema != BODY_SCHEMA {
        return Err(CliError::input(format!(
            "unsupported schema `{}`, expected `{}`",
            doc.schema, BODY_SCHEMA
        )));
    }
    doc.check()?;
    Ok(doc)
}

pub fn load_matrix(path: &Path) -> Result<RewardMatrix, CliError> {
    let doc: RewardMatrixDocument = read_json(path)?;
    matrix_from_document(doc).map_err(|e| CliError::file(path, e))
}

pub fn matrix_from_document(doc: RewardMatrixDocument) -> Result<RewardMatrix, CliError> {
    Ok(RewardMatrix::from_document(doc)?)
}

pub fn resolve_body(src: &Source<BodyDocument<f64>>) -> Result<BodyDocument<f64>, CliError> {
    match src {
        Source::Path(p) => load_body(p),
        Source::Inline(doc) => check_body(doc.clone()),
    }
}

pub fn resolve_matrix(src: &Source<RewardMatrixDocument>) -> Result<RewardMatrix, CliError> {
    match src {
        Source::Path(p) => load_matrix(p),
        Source::Inline(doc) => matrix_from_document(doc.clone()),
    }
}
