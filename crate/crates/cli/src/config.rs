//! JSON configuration accepted by `--spec` for each command.

use std::path::Path;

use liouville_core::counterexample::CounterexampleParams;
use liouville_core::criterion::SeriesPattern;
use liouville_core::proofsim::PsiGenerator;
use liouville_core::ProblemSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Reads and parses a JSON file, naming the offending node on failure.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| CliError::Schema {
        path: match e.path().to_string().as_str() {
            "." => "<root>".to_string(),
            p => p.to_string(),
        },
        message: e.inner().to_string(),
    })?;
    de.end().map_err(|e| CliError::Schema {
        path: "<root>".into(),
        message: e.to_string(),
    })?;
    Ok(value)
}

/// Series input with plain radii and coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesConfig {
    pub n: u32,
    pub m: u32,
    pub lambda: f64,
    pub radii: Vec<f64>,
    pub coefficients: Vec<f64>,
    #[serde(default)]
    pub terms: Option<usize>,
    #[serde(default)]
    pub pattern: Option<SeriesPattern>,
}

fn default_pairs() -> Vec<(f64, f64)> {
    vec![
        (10.0, 20.0),
        (15.0, 60.0),
        (40.0, 100.0),
        (100.0, 400.0),
        (300.0, 1000.0),
    ]
}

fn one() -> f64 {
    1.0
}

/// Weak-form checks on counterexample data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_counterexample")]
    pub counterexample: CounterexampleParams,
    /// Cutoff radii `(r1, r2)` of the test functions.
    #[serde(default = "default_pairs")]
    pub tests: Vec<(f64, f64)>,
    /// Multiplier applied to the implied coefficient before checking.
    #[serde(default = "one")]
    pub b_factor: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            counterexample: default_counterexample(),
            tests: default_pairs(),
            b_factor: 1.0,
        }
    }
}

pub fn default_counterexample() -> CounterexampleParams {
    CounterexampleParams {
        n: 3,
        k: 1,
        nu: -2.0,
        lambda: 2.0,
        epsilon: 1.0,
    }
}

fn default_constants() -> Vec<f64> {
    vec![1e-6, 1e-3, 1.0]
}

fn default_steps() -> usize {
    50
}

fn default_overflow() -> f64 {
    1e30
}

/// Blow-up recurrence runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofsimConfig {
    pub problem: ProblemSpec,
    /// Constants of the step inequality, one trajectory each.
    #[serde(default = "default_constants")]
    pub constants: Vec<f64>,
    #[serde(default = "one")]
    pub j0: f64,
    #[serde(default = "one")]
    pub r0: f64,
    #[serde(default = "default_steps")]
    pub max_steps: usize,
    #[serde(default = "default_overflow")]
    pub overflow: f64,
}

impl ProofsimConfig {
    pub fn for_problem(problem: ProblemSpec) -> Self {
        Self {
            problem,
            constants: default_constants(),
            j0: 1.0,
            r0: 1.0,
            max_steps: default_steps(),
            overflow: default_overflow(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingSetting {
    pub alpha: f64,
    pub kappa: f64,
    pub nu: f64,
}

fn default_settings() -> Vec<AveragingSetting> {
    [(0.25, 2.0, 2.0), (0.5, 1.5, 4.0), (1.0, 2.0, 2.0)]
        .into_iter()
        .map(|(alpha, kappa, nu)| AveragingSetting { alpha, kappa, nu })
        .collect()
}

fn default_trials() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragingConfig {
    #[serde(default = "default_settings")]
    pub settings: Vec<AveragingSetting>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub generator: PsiGenerator,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        Self {
            settings: default_settings(),
            trials: default_trials(),
            generator: PsiGenerator::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, text).unwrap();
        load(&path)
    }

    #[test]
    fn defaults_fill_missing_fields() {
        let v: VerifyConfig = load_str("{}").unwrap();
        assert_eq!(v, VerifyConfig::default());
        assert_eq!(v.tests.len(), 5);
        let a: AveragingConfig = load_str(r#"{"trials": 5}"#).unwrap();
        assert_eq!(a.settings.len(), 3);
        assert_eq!(a.generator, PsiGenerator::default());
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err =
            load_str::<VerifyConfig>(r#"{"counterexample": {"n": 3, "k": 1, "nu": -2, "lambda": "two"}}"#).unwrap_err();
        match err {
            CliError::Schema { path, .. } => assert_eq!(path, "counterexample.lambda"),
            other => panic!("{other:?}"),
        }
        let err = load_str::<AveragingConfig>(r#"{"trials": 5} trailing"#).unwrap_err();
        assert!(
            matches!(err, CliError::Schema { ref path, .. } if path == "<root>"),
            "{err:?}"
        );
        let err = load_str::<AveragingConfig>(r#"{"trails": 5}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema { .. }), "{err:?}");
    }

    #[test]
    fn missing_file_is_io() {
        let err = load::<VerifyConfig>(Path::new("/nonexistent/config.json")).unwrap_err();
        assert!(matches!(err, CliError::Io { .. }));
        assert_eq!(err.exit_code(), 2);
    }
}
