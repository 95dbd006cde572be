//! Report bundles: per-check pass/fail records with config echo and
//! artifact hashes.
//!
//! Report files are deterministic: timing is written to stderr by the CLI,
//! never into the bundle, so identical runs produce byte-identical reports.

use crate::checkpoint::{save_json, SCHEMA_VERSION, TOOL_VERSION};
use crate::error::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    /// Counts, exact values, or failure diagnostics, as plain text.
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportBundle {
    pub schema_version: u32,
    pub tool_version: String,
    /// The effective configuration, echoed as sorted `key=value` lines.
    pub config: Vec<String>,
    pub checks: Vec<CheckRecord>,
    /// `(path, sha256)` of every checkpoint or tree file this run read or
    /// wrote.
    pub artifacts: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn new(config: Vec<String>) -> Self {
        let mut config = config;
        config.sort();
        ReportBundle {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            config,
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn record(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        });
    }

    pub fn skip(&mut self, name: &str, detail: String) {
        self.checks.push(CheckRecord {
            name: name.to_string(),
            status: CheckStatus::Skip,
            detail,
        });
    }

    pub fn attach_artifact(&mut self, path: &Path) -> Result<()> {
        let hash = sha256_file(path)?;
        self.artifacts.push((path.display().to_string(), hash));
        self.artifacts.sort();
        Ok(())
    }

    pub fn has_failure(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(path, self)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failure_detection_and_byte_stability() {
        let mut b = ReportBundle::new(vec!["d=1".into(), "command=verify".into()]);
        b.record("avoidance", true, "5 rationals, 0 violations".into());
        assert!(!b.has_failure());
        b.record("measure", false, "bound exceeded".into());
        assert!(b.has_failure());
        b.skip("qapprox", "not requested".into());
        assert!(b.has_failure());

        let dir = std::env::temp_dir().join("badapprox-report-test");
        let p1 = dir.join("r1.json");
        let p2 = dir.join("r2.json");
        b.save(&p1).unwrap();
        b.save(&p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(sha256_file(&p1).unwrap(), sha256_file(&p2).unwrap());
    }
}
