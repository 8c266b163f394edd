//! Experiment configuration.

use std::path::{Path, PathBuf};

use cantorchain_core::perm::{PortraitJson, DEFAULT_CAP};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Overrides the default enumeration cap.
pub const CAP_ENV: &str = "CANTORCHAIN_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Full automorphism group of the `d`-ary tree, leftmost base path.
    Wreath { d: usize },
    /// Metacyclic quotients of `BS(1, q)` with level moduli built from `d^n`.
    Bs { q: u64, d: u64 },
    /// The adding machine on the `d`-ary tree.
    Odometer { d: usize },
    /// A group given by portrait generators on a spherically homogeneous tree.
    Custom {
        degrees: Vec<usize>,
        generators: Vec<PortraitJson>,
        #[serde(default)]
        base_path: Option<Vec<usize>>,
    },
}

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::Wreath { .. } => "wreath",
            Family::Bs { .. } => "bs",
            Family::Odometer { .. } => "odometer",
            Family::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Largest group the engine may enumerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub horizon: usize,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.horizon == 0 {
            return Err(CliError::Config("horizon must be at least 1".into()));
        }
        match &self.family {
            Family::Wreath { d } | Family::Odometer { d } if *d < 2 => {
                Err(CliError::Config(format!("degree {d} must be at least 2")))
            }
            Family::Bs { q, d } if *q < 2 || *d < 2 => Err(CliError::Config(format!(
                "q={q} and d={d} must be at least 2"
            ))),
            Family::Custom { degrees, .. } if degrees.len() != self.horizon => {
                Err(CliError::Config(format!(
                    "{} degrees given for horizon {}",
                    degrees.len(),
                    self.horizon
                )))
            }
            _ => Ok(()),
        }
    }

    /// The configured cap, else the environment override, else the default.
    pub fn enumeration_cap(&self) -> usize {
        self.caps.enumeration.unwrap_or_else(default_cap)
    }
}

pub fn default_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// Registered families with their parameter blocks, for `families`.
pub fn family_listing() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        (
            "wreath",
            r#"{"wreath": {"d": 2}}"#,
            "full iterated wreath product Aut(T_N), stabilizer chain of the leftmost path",
        ),
        (
            "bs",
            r#"{"bs": {"q": 5, "d": 3}}"#,
            "BS(1,q) through Z/M_n x| Z/s_n with G_n = <tau^M_n, sigma>, gcd(q,d) = 1",
        ),
        (
            "odometer",
            r#"{"odometer": {"d": 2}}"#,
            "adding machine on the d-ary tree, stabilizer chain of the leftmost path",
        ),
        (
            "custom",
            r#"{"custom": {"degrees": [2, 2], "generators": [{"": [1, 0], "0": [1, 0]}], "base_path": [0, 0]}}"#,
            "group generated by portraits (vertex word -> child images), level-transitive",
        ),
    ]
}
