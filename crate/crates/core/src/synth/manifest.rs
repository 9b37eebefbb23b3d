use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::generator::{Provenance, SynthConfig, SynthInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Cloud file name, relative to the manifest.
    pub file: String,
    pub split: String,
    pub label: i8,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub config: SynthConfig,
    pub instances: Vec<ManifestEntry>,
}

/// Writes every cloud as `<split>_<index>.txt` plus `manifest.json` into `dir`.
pub fn write_dataset(
    dir: impl AsRef<Path>,
    cfg: &SynthConfig,
    train: &[SynthInstance],
    test: &[SynthInstance],
) -> Result<DatasetManifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let mut instances = Vec::with_capacity(train.len() + test.len());
    for (split, set) in [("train", train), ("test", test)] {
        for (i, inst) in set.iter().enumerate() {
            let file = format!("{split}_{i:04}.txt");
            inst.cloud.write(dir.join(&file))?;
            instances.push(ManifestEntry {
                file,
                split: split.to_string(),
                label: inst.label,
                provenance: inst.provenance,
            });
        }
    }
    let manifest = DatasetManifest {
        config: *cfg,
        instances,
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(manifest)
}
