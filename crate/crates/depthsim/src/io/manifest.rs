//! Dataset manifest: per-frame records with file paths and checksums, plus
//! temporal frame stacks. Serialized as JSON with records sorted by
//! (env, frame); no timestamps, so identical runs produce identical bytes.

use crate::error::{Error, Result};
use crate::io::config::{fnv1a, BasePose};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MANIFEST_FORMAT_VERSION: u32 = 1;
/// Temporal stack depth H.
pub const FRAME_STACK: usize = 5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileRef {
    pub path: String,
    /// 64-bit FNV-1a of the file bytes, hex.
    pub checksum: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameRecord {
    pub env: u32,
    pub frame: u32,
    pub base: BasePose,
    pub clean_depth: FileRef,
    pub corrupted_depth: FileRef,
    pub heightmap: FileRef,
}

/// Indices of `FRAME_STACK` consecutive frames of one environment, oldest
/// first; one stack per frame once enough history exists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameStack {
    pub env: u32,
    pub frames: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub config_hash: String,
    pub seed: u64,
    pub frame_stack: usize,
    pub records: Vec<FrameRecord>,
    pub stacks: Vec<FrameStack>,
}

pub fn file_checksum(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("{:016x}", fnv1a(&bytes)))
}

pub fn file_ref(root: &Path, relative: &str) -> Result<FileRef> {
    Ok(FileRef { path: relative.to_string(), checksum: file_checksum(&root.join(relative))? })
}

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parse(format!("manifest serialize: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<DatasetManifest> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("manifest parse: {e}")))
    }

    /// Re-hashes every referenced file against its recorded checksum.
    pub fn verify(&self, root: &Path) -> Result<()> {
        for record in &self.records {
            for file in [&record.clean_depth, &record.corrupted_depth, &record.heightmap] {
                let actual = file_checksum(&root.join(&file.path))?;
                if actual != file.checksum {
                    return Err(Error::Parse(format!(
                        "checksum mismatch for {}: manifest {} vs file {}",
                        file.path, file.checksum, actual
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the temporal stacks from the (already sorted) records.
    pub fn build_stacks(records: &[FrameRecord]) -> Vec<FrameStack> {
        let mut stacks = Vec::new();
        let mut i = 0;
        while i < records.len() {
            let env = records[i].env;
            let mut j = i;
            while j < records.len() && records[j].env == env {
                j += 1;
            }
            let frames: Vec<u32> = records[i..j].iter().map(|r| r.frame).collect();
            for t in (FRAME_STACK - 1)..frames.len() {
                stacks.push(FrameStack {
                    env,
                    frames: frames[t + 1 - FRAME_STACK..=t].to_vec(),
                });
            }
            i = j;
        }
        stacks
    }
}
