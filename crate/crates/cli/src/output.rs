//! Output files and their manifests.

use std::fs;
use std::path::{Path, PathBuf};

use mqed::model::{SystemConfig, Tolerances};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::config_hash;
use crate::error::{CliError, CliResult};

pub const MANIFEST_VERSION_KEY: &str = "manifest_version";
const MANIFEST_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubConfig {
    pub value: f64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub command: String,
    pub code_version: String,
    pub preset: Option<String>,
    pub config: SystemConfig,
    pub config_sha256: String,
    /// Tolerances in effect for the run.
    pub tolerances: Tolerances,
    pub sub_configs: Vec<SubConfig>,
    pub wall_seconds: f64,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn new(command: &str, config: &SystemConfig, wall_seconds: f64) -> Self {
        RunManifest {
            manifest_version: MANIFEST_VERSION,
            command: command.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            preset: None,
            config: config.clone(),
            config_sha256: config_hash(config),
            tolerances: config.tolerances,
            sub_configs: Vec::new(),
            wall_seconds,
            outputs: Vec::new(),
        }
    }
}

/// One CSV waiting to be written together with its manifest.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub stem: String,
    pub csv: String,
    pub manifest: RunManifest,
}

fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

/// Writes `<stem>.csv` and `<stem>.manifest.json` for every artifact and
/// returns the CSV paths.
pub fn write_artifacts(dir: &Path, artifacts: Vec<Artifact>) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut written = Vec::new();
    for mut a in artifacts {
        let csv_path = dir.join(format!("{}.csv", a.stem));
        write_atomic(&csv_path, a.csv.as_bytes())?;
        a.manifest.outputs.push(OutputFile {
            path: csv_path.clone(),
            sha256: sha256_hex(a.csv.as_bytes()),
        });
        let json = serde_json::to_string_pretty(&a.manifest).expect("manifest serialises");
        write_atomic(
            &dir.join(format!("{}.manifest.json", a.stem)),
            json.as_bytes(),
        )?;
        log::info!("wrote {}", csv_path.display());
        written.push(csv_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mqed::model::Method;
    use mqed::presets::Preset;

    #[test]
    fn artifacts_get_one_manifest_each() {
        let dir = tempfile::tempdir().unwrap();
        let c = Preset::Fig3Weak.config(Method::Maqd, false);
        let arts = vec![
            Artifact {
                stem: "a".into(),
                csv: "t\n0\n".into(),
                manifest: RunManifest::new("simulate", &c, 0.1),
            },
            Artifact {
                stem: "b".into(),
                csv: "t\n1\n".into(),
                manifest: RunManifest::new("simulate", &c, 0.2),
            },
        ];
        let paths = write_artifacts(dir.path(), arts).unwrap();
        assert_eq!(paths.len(), 2);
        let mut names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(
            names,
            ["a.csv", "a.manifest.json", "b.csv", "b.manifest.json"]
        );
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("b.manifest.json")).unwrap())
                .unwrap();
        assert_eq!(m["outputs"][0]["sha256"], sha256_hex(b"t\n1\n"));
        assert_eq!(m[MANIFEST_VERSION_KEY], 1);
    }

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
