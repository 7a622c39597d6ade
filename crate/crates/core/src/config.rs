//! Run configuration shared by the experiment drivers and the CLI.
//!
//! A JSON config file may set any subset of the fields below; anything left
//! out keeps its default. Command-line flags override the file.
//!
//! | field          | default                          |
//! |----------------|----------------------------------|
//! | `model`        | `"admire"` (builtin name or path)|
//! | `x0`           | `[5, -1, 3]`                     |
//! | `t_f`          | `5`                              |
//! | `w_bar`        | `1`                              |
//! | `r_grid`       | `[0.1, 1, 10, 100, 1000]`        |
//! | `tf_grid`      | `[0.1, 0.25, 0.5, 1, 2, 5]`      |
//! | `disturbances` | constant `(+,−,+,…)`, sinusoid, random |
//! | `steps`        | `5000`                           |
//! | `samples`      | `500`                            |
//! | `seed`         | `42`                             |
//! | `out`          | `"out"`                          |
//! | `workers`      | available parallelism            |
//! | `numerics`     | [`NumericSettings::default`]     |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::disturbance::DisturbanceSpec;
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::models;
use crate::settings::NumericSettings;
use crate::simulate::{DEFAULT_STEPS, MIN_STEPS};
use crate::system::{LtiSystem, StabilizationTask};

/// A disturbance family, independent of horizon and dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceClass {
    Zero,
    /// Full-amplitude constant; signs default to `(+1, −1, +1, …)`.
    Constant {
        #[serde(default)]
        signs: Option<Vec<f64>>,
    },
    Sinusoid {
        #[serde(default)]
        amplitudes: Option<Vec<f64>>,
        #[serde(default)]
        frequencies: Option<Vec<f64>>,
        #[serde(default)]
        phases: Option<Vec<f64>>,
    },
    /// Piecewise-constant uniform noise; `cells` defaults to the integration step count.
    Random {
        #[serde(default)]
        cells: Option<usize>,
    },
}

impl DisturbanceClass {
    pub fn label(&self) -> &'static str {
        match self {
            DisturbanceClass::Zero => "zero",
            DisturbanceClass::Constant { .. } => "constant",
            DisturbanceClass::Sinusoid { .. } => "sinusoid",
            DisturbanceClass::Random { .. } => "random",
        }
    }

    pub fn parse_label(s: &str) -> Result<Self> {
        match s.trim() {
            "zero" | "none" => Ok(DisturbanceClass::Zero),
            "constant" => Ok(DisturbanceClass::Constant { signs: None }),
            "sinusoid" | "sin" => Ok(DisturbanceClass::Sinusoid {
                amplitudes: None,
                frequencies: None,
                phases: None,
            }),
            "random" | "uniform" => Ok(DisturbanceClass::Random { cells: None }),
            other => Err(Error::Config(format!(
                "unknown disturbance class {other:?} (expected zero, constant, sinusoid or random)"
            ))),
        }
    }

    /// Concrete spec for a given state dimension, horizon and integration grid.
    pub fn to_spec(&self, dim: usize, t_f: f64, steps: usize) -> DisturbanceSpec {
        match self {
            DisturbanceClass::Zero => DisturbanceSpec::Zero,
            DisturbanceClass::Constant { signs } => DisturbanceSpec::ConstantSign {
                signs: signs
                    .clone()
                    .unwrap_or_else(|| (0..dim).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()),
            },
            DisturbanceClass::Sinusoid {
                amplitudes,
                frequencies,
                phases,
            } => DisturbanceSpec::Sinusoid {
                amplitudes: amplitudes.clone(),
                frequencies: frequencies.clone(),
                phases: phases.clone(),
            },
            DisturbanceClass::Random { cells } => DisturbanceSpec::PiecewiseUniform {
                cells: cells.unwrap_or(steps),
                horizon: t_f,
            },
        }
    }

    pub fn defaults() -> Vec<Self> {
        vec![
            DisturbanceClass::Constant { signs: None },
            DisturbanceClass::Sinusoid {
                amplitudes: None,
                frequencies: None,
                phases: None,
            },
            DisturbanceClass::Random { cells: None },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: String,
    pub x0: Vec<f64>,
    pub t_f: f64,
    pub w_bar: f64,
    pub r_grid: Vec<f64>,
    pub tf_grid: Vec<f64>,
    pub disturbances: Vec<DisturbanceClass>,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: usize,
    pub numerics: NumericSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: "admire".into(),
            x0: vec![5.0, -1.0, 3.0],
            t_f: 5.0,
            w_bar: 1.0,
            r_grid: vec![0.1, 1.0, 10.0, 100.0, 1000.0],
            tf_grid: vec![0.1, 0.25, 0.5, 1.0, 2.0, 5.0],
            disturbances: DisturbanceClass::defaults(),
            steps: DEFAULT_STEPS,
            samples: 500,
            seed: 42,
            out: PathBuf::from("out"),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            numerics: NumericSettings::default(),
        }
    }
}

fn positive_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} must not be empty")));
    }
    if let Some(v) = grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Config(format!("{name} entries must be positive, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            context: context.into(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    /// Checks everything that does not need the model loaded.
    pub fn validate(&self) -> Result<()> {
        if !(self.t_f > 0.0 && self.t_f.is_finite()) {
            return Err(Error::Config(format!("t_f must be positive, got {}", self.t_f)));
        }
        if !(self.w_bar >= 0.0 && self.w_bar.is_finite()) {
            return Err(Error::Config(format!("w_bar must be nonnegative, got {}", self.w_bar)));
        }
        if self.x0.is_empty() || self.x0.iter().all(|&v| v == 0.0) {
            return Err(Error::Config("x0 must be a nonzero vector".into()));
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("x0 entries must be finite".into()));
        }
        positive_grid("r_grid", &self.r_grid)?;
        positive_grid("tf_grid", &self.tf_grid)?;
        if self.steps < MIN_STEPS {
            return Err(Error::Config(format!(
                "steps must be at least {MIN_STEPS}, got {}",
                self.steps
            )));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        Ok(())
    }

    /// Builtin name or path to a model file.
    pub fn load_system(&self) -> Result<LtiSystem> {
        match models::builtin(&self.model) {
            Some(sys) => Ok(sys),
            None => {
                let path = Path::new(&self.model);
                if !path.exists() {
                    return Err(Error::Config(format!(
                        "model {:?} is neither a builtin ({}) nor an existing file",
                        self.model,
                        models::BUILTIN_MODELS.join(", ")
                    )));
                }
                models::load_model_with(path, &self.numerics)
            }
        }
    }

    pub fn task(&self, sys: &LtiSystem) -> Result<StabilizationTask> {
        self.task_at(sys, self.t_f)
    }

    pub fn task_at(&self, sys: &LtiSystem, t_f: f64) -> Result<StabilizationTask> {
        if self.x0.len() != sys.state_dim() {
            return Err(Error::Config(format!(
                "x0 has {} entries but model {} has {} states",
                self.x0.len(),
                sys.name(),
                sys.state_dim()
            )));
        }
        StabilizationTask::new(Vector::new(self.x0.clone())?, t_f, self.w_bar)
    }
}
