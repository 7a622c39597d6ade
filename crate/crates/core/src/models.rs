//! Built-in plants and the JSON model file format.
//!
//! ```json
//! {"name": "admire", "n": 3, "p": 4,
//!  "A": [[-0.9967, 0, 0.6176], ...],
//!  "B": [[0, -4.2423, 4.2423, 1.4871], ...],
//!  "description": "...", "citation": "..."}
//! ```
//!
//! `A` and `B` are arrays of rows. `description` and `citation` are optional.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::settings::NumericSettings;
use crate::system::LtiSystem;

/// On-disk model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    pub n: usize,
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub citation: String,
}

const ADMIRE_A: [[f64; 3]; 3] = [[-0.9967, 0.0, 0.6176], [0.0, -0.5057, 0.0], [-0.0939, 0.0, -0.2127]];

const ADMIRE_B: [[f64; 4]; 3] = [
    [0.0, -4.2423, 4.2423, 1.4871],
    [1.6532, -1.2735, -1.2735, 0.0024],
    [0.0, -0.2805, 0.2805, -0.8823],
];

pub const BUILTIN_MODELS: &[&str] = &["admire"];

/// Linearised roll/pitch/yaw-rate dynamics of the ADMIRE fighter model.
///
/// States are `(p, q, r)` in rad/s; the four inputs are canard, left and
/// right elevon, and rudder deflections in rad, as deviations from trim.
pub fn admire() -> LtiSystem {
    LtiSystem::new(
        "admire",
        Matrix::from_rows(&ADMIRE_A).expect("static matrix"),
        Matrix::from_rows(&ADMIRE_B).expect("static matrix"),
    )
    .expect("ADMIRE pair is controllable")
}

pub fn admire_spec() -> ModelSpec {
    ModelSpec {
        name: "admire".into(),
        n: 3,
        p: 4,
        a: ADMIRE_A.iter().map(|r| r.to_vec()).collect(),
        b: ADMIRE_B.iter().map(|r| r.to_vec()).collect(),
        description: "ADMIRE fighter jet, rate subsystem: states roll/pitch/yaw rate (rad/s), \
                      inputs canard, left elevon, right elevon, rudder (rad)"
            .into(),
        citation: "linearisation from the ADMIRE benchmark model".into(),
    }
}

/// Looks up a built-in model by name.
pub fn builtin(name: &str) -> Option<LtiSystem> {
    match name.to_ascii_lowercase().as_str() {
        "admire" => Some(admire()),
        _ => None,
    }
}

fn check_rows(label: &str, rows: &[Vec<f64>], nrows: usize, ncols: usize, context: &str) -> Result<()> {
    if rows.len() != nrows {
        return Err(Error::Parse {
            context: context.into(),
            message: format!("field {label} has {} rows, expected {nrows}", rows.len()),
        });
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(Error::Parse {
                context: context.into(),
                message: format!("field {label}, row {i}: {} entries, expected {ncols}", r.len()),
            });
        }
    }
    Ok(())
}

impl ModelSpec {
    pub fn from_system(sys: &LtiSystem) -> Self {
        Self {
            name: sys.name().to_string(),
            n: sys.state_dim(),
            p: sys.input_dim(),
            a: sys.a().to_rows(),
            b: sys.b().to_rows(),
            description: String::new(),
            citation: String::new(),
        }
    }

    /// Checks shapes and controllability.
    pub fn to_system(&self, settings: &NumericSettings, context: &str) -> Result<LtiSystem> {
        check_rows("A", &self.a, self.n, self.n, context)?;
        check_rows("B", &self.b, self.n, self.p, context)?;
        let a = Matrix::from_rows(&self.a)?;
        let b = Matrix::from_rows(&self.b)?;
        LtiSystem::new_with(self.name.clone(), a, b, settings)
    }
}

pub fn parse_model(text: &str, context: &str) -> Result<LtiSystem> {
    parse_model_with(text, context, &NumericSettings::default())
}

pub fn parse_model_with(text: &str, context: &str, settings: &NumericSettings) -> Result<LtiSystem> {
    let spec: ModelSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        context: context.into(),
        message: e.to_string(),
    })?;
    spec.to_system(settings, context)
}

/// Reads and validates a `.json` model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<LtiSystem> {
    load_model_with(path, &NumericSettings::default())
}

pub fn load_model_with(path: impl AsRef<Path>, settings: &NumericSettings) -> Result<LtiSystem> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_model_with(&text, &path.display().to_string(), settings)
}

pub fn save_model(sys: &LtiSystem, path: impl AsRef<Path>) -> Result<()> {
    write_spec(&ModelSpec::from_system(sys), path)
}

pub fn write_spec(spec: &ModelSpec, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(spec).map_err(|e| Error::Parse {
        context: "model serialisation".into(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admire_entries() {
        let sys = admire();
        assert_eq!(sys.a()[(0, 2)], 0.6176);
        assert_eq!(sys.b()[(2, 3)], -0.8823);
        assert_eq!((sys.state_dim(), sys.input_dim()), (3, 4));
        assert_eq!(admire(), admire());
    }

    #[test]
    fn spec_and_builtin_agree() {
        let spec = admire_spec();
        let sys = spec.to_system(&NumericSettings::default(), "builtin").unwrap();
        assert_eq!(sys.a(), admire().a());
        assert_eq!(sys.b(), admire().b());
        assert!(builtin("ADMIRE").is_some());
        assert!(builtin("f16").is_none());
    }

    #[test]
    fn zero_input_map_is_uncontrollable() {
        let text = r#"{"name":"dead","n":2,"p":1,"A":[[-1,0],[0,-2]],"B":[[0],[0]]}"#;
        match parse_model(text, "inline") {
            Err(Error::Uncontrollable { rank, n }) => assert_eq!((rank, n), (0, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_row_names_the_row() {
        let text = r#"{"name":"bad","n":2,"p":1,"A":[[-1,0],[0]],"B":[[1],[1]]}"#;
        let err = parse_model(text, "inline").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_a_line() {
        let text = "{\n\"name\": \"x\",\n\"n\": oops}";
        let err = parse_model(text, "inline").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
