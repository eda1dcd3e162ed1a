use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DatagenError;
use crate::retouch::RetouchParams;
use crate::suggestion::RestoreTask;

/// One synthesized training pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleManifestRecord {
    pub sample_id: String,
    pub input_path: PathBuf,
    pub gt_path: PathBuf,
    /// Corrective instruction mapping the input back to the ground truth.
    pub instruction: String,
    /// Perturbation applied to the ground truth to produce the input.
    pub params: RetouchParams,
    pub restoration_label: Option<RestoreTask>,
    pub seed: u64,
    pub source: String,
}

/// Newline-delimited JSON, one record per line.
pub fn write_manifest(records: &[SampleManifestRecord], path: impl AsRef<Path>) -> Result<(), DatagenError> {
    let path = path.as_ref();
    let io_err = |source| DatagenError::Io { path: path.to_path_buf(), source };
    let mut out = BufWriter::new(fs::File::create(path).map_err(io_err)?);
    for record in records {
        let line = serde_json::to_string(record).expect("manifest records serialize");
        writeln!(out, "{line}").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<SampleManifestRecord>, DatagenError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatagenError::Io { path: path.to_path_buf(), source })?;
    parse_manifest(&text)
}

/// Parse manifest text; blank lines are ignored, line numbers start at 1.
pub fn parse_manifest(text: &str) -> Result<Vec<SampleManifestRecord>, DatagenError> {
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| DatagenError::SchemaViolation { line: i + 1, message: e.to_string() })
        })
        .collect()
}
