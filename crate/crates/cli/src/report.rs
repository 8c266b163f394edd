//! Report layout and persistence.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cantorchain_core::chain::{Certificate, DiscriminantTower, Verdict};
use cantorchain_core::wreath::{WildnessEvidence, WitnessRecord};
use num_bigint::BigUint;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const REPORT_FILE: &str = "report.json";
pub const TABLES_FILE: &str = "tables.csv";
pub const TIMING_FILE: &str = "timing.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

fn decimal(xs: &[BigUint]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// Discriminant tower with every integer as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerTables {
    pub indices: Vec<String>,
    pub level_orders: Option<Vec<String>>,
    /// Row `m` lists `|G_n : C_n^m|` for `n = m..=N`.
    pub core_indices: Vec<Vec<String>>,
    pub discriminant_orders: Vec<String>,
    pub psi_kernel_orders: Vec<String>,
}

impl From<&DiscriminantTower> for TowerTables {
    fn from(t: &DiscriminantTower) -> Self {
        Self {
            indices: decimal(&t.indices),
            level_orders: t.level_orders.as_deref().map(decimal),
            core_indices: t.core_indices.iter().map(|r| decimal(r)).collect(),
            discriminant_orders: decimal(&t.discriminant_orders),
            psi_kernel_orders: decimal(&t.psi_kernel_orders),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalityRow {
    pub m: usize,
    pub n: usize,
    /// `core` for `C_n^m`, `level` for `G_n`.
    pub subgroup: &'static str,
    pub normal_in_g_m: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BsSection {
    pub q: u64,
    pub d: u64,
    pub odd_prime_regime: bool,
    pub s: Vec<String>,
    pub c: Vec<String>,
    pub modulus: Vec<String>,
    /// Row `m` lists `k_{m,n}` for `n = m..=N`.
    pub k: Vec<Vec<String>>,
    pub quotient_orders: Vec<String>,
    pub normality: Vec<NormalityRow>,
    pub certificate: Option<Certificate>,
}

impl BsSection {
    pub fn decimal(xs: &[BigUint]) -> Vec<String> {
        decimal(xs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WreathSection {
    pub ambient_order: String,
    /// `|W_n|` for `n = 0..=N`.
    pub level_kernel_orders: Vec<String>,
    /// Abelianization order of `Aut(T_n)` for the enumerable `n = 1, 2, ...`.
    pub abelianization: Vec<usize>,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub config: ExperimentConfig,
    pub family: &'static str,
    pub horizon: usize,
    /// How the tower was obtained.
    pub method: String,
    pub tower: TowerTables,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs: Option<BsSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wreath: Option<WreathSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<WildnessEvidence>,
    pub witnesses: Vec<WitnessRecord>,
    pub verdict: Verdict,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// One row per table cell: `table,m,n,value`.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        w.write_record(["table", "m", "n", "value"]).map_err(io)?;
        let mut row = |table: &str, m: String, n: String, value: &str| {
            w.write_record([table, &m, &n, value]).map_err(io)
        };
        for (n, v) in self.tower.indices.iter().enumerate() {
            row("index", String::new(), n.to_string(), v)?;
        }
        for (m, r) in self.tower.core_indices.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                row("core_index", m.to_string(), (m + j).to_string(), v)?;
            }
        }
        for (m, v) in self.tower.discriminant_orders.iter().enumerate() {
            row(
                "discriminant_order",
                m.to_string(),
                self.horizon.to_string(),
                v,
            )?;
        }
        for (m, v) in self.tower.psi_kernel_orders.iter().enumerate() {
            row(
                "psi_kernel_order",
                m.to_string(),
                self.horizon.to_string(),
                v,
            )?;
        }
        if let Some(bs) = &self.bs {
            for (m, r) in bs.k.iter().enumerate() {
                for (j, v) in r.iter().enumerate() {
                    row("k", m.to_string(), (m + j).to_string(), v)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Persists the report (and optionally its CSV tables) under `dir`.
pub fn persist(report: &Report, dir: &Path, csv: bool) -> Result<Vec<PathBuf>, CliError> {
    let mut written = vec![dir.join(REPORT_FILE)];
    write_atomic(&written[0], &report.to_json())?;
    if csv {
        let path = dir.join(TABLES_FILE);
        write_atomic(&path, &report.to_csv()?)?;
        written.push(path);
    }
    Ok(written)
}
