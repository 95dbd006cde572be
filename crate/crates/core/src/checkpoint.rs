//! Versioned single-file JSON checkpoints.
//!
//! A checkpoint freezes the construction parameters together with the
//! survival memo resolved so far, so later runs can answer membership
//! queries without recomputing the pruning cascade. Writes are atomic
//! (temp file + rename): a partial checkpoint is never observable. All
//! rationals are serialized as `"num/den"` strings and all collections in
//! sorted order, so identical inputs produce byte-identical files.

use crate::error::{Error, Result};
use crate::params::ConstructionParams;
use crate::pruning::PruningState;
use crate::transfer::CantorTree;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One resolved survival answer: cube of level `l(stage)` given by its
/// per-axis indices (decimal strings, arbitrary precision).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemoEntry {
    pub stage: u32,
    pub index: Vec<String>,
    pub survives: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema_version: u32,
    pub tool_version: String,
    pub params: ConstructionParams,
    /// Deepest stage the producing run fully or partially resolved.
    pub resolved_stage: u32,
    pub survives_memo: Vec<MemoEntry>,
}

impl Checkpoint {
    /// Snapshot a pruning state. The memo export is sorted, so two states
    /// that resolved the same queries snapshot to identical checkpoints.
    pub fn from_state(state: &PruningState, resolved_stage: u32) -> Self {
        let survives_memo = state
            .export_memo()
            .into_iter()
            .map(|(stage, index, survives)| MemoEntry { stage, index, survives })
            .collect();
        Checkpoint {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            params: state.params().clone(),
            resolved_stage,
            survives_memo,
        }
    }

    /// Rebuild a pruning state preloaded with the stored memo.
    pub fn restore(&self) -> Result<PruningState> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::VersionMismatch {
                found: self.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        let state = PruningState::new(self.params.clone())?;
        let entries: Vec<(u32, Vec<String>, bool)> = self
            .survives_memo
            .iter()
            .map(|e| (e.stage, e.index.clone(), e.survives))
            .collect();
        state.import_memo(&entries)?;
        Ok(state)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cp: Checkpoint = load_json(path)?;
        if cp.schema_version != SCHEMA_VERSION {
            return Err(Error::VersionMismatch {
                found: cp.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(cp)
    }
}

/// On-disk wrapper for a mass-distribution tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeFile {
    pub schema_version: u32,
    pub tool_version: String,
    pub tree: CantorTree,
}

impl TreeFile {
    pub fn new(tree: CantorTree) -> Self {
        TreeFile {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            tree,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_json(path, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let tf: TreeFile = load_json(path)?;
        if tf.schema_version != SCHEMA_VERSION {
            return Err(Error::VersionMismatch {
                found: tf.schema_version,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(tf)
    }
}

/// Serialize pretty JSON to a temp file in the target directory, then
/// rename over the destination so readers never see a partial file.
pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let bytes = serde_json::to_vec_pretty(value)?;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into())
    ));
    fs::write(&tmp, &bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}
