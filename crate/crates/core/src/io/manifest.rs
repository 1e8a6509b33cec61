//! Run manifests written next to every output.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    /// Fully resolved device configuration, internal units.
    pub config: Value,
    /// Command-line values as given (display units).
    pub inputs_display: Value,
    /// The same values converted to internal units.
    pub inputs_internal: Value,
    /// SHA-256 over everything above.
    pub input_digest: String,
    /// Seconds since the Unix epoch. Not part of the digest.
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, inputs_display: Value, inputs_internal: Value) -> Self {
        let tool_version = env!("CARGO_PKG_VERSION").to_string();
        let input_digest = digest(command, &tool_version, &config, &inputs_display, &inputs_internal);
        Self {
            command: command.to_string(),
            tool_version,
            config,
            inputs_display,
            inputs_internal,
            input_digest,
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Recomputes the digest from the stored fields.
    pub fn verify(&self) -> bool {
        self.input_digest
            == digest(
                &self.command,
                &self.tool_version,
                &self.config,
                &self.inputs_display,
                &self.inputs_internal,
            )
    }

    pub fn write_for(&self, output: &Path) -> Result<PathBuf> {
        let path = manifest_path(output);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }
}

/// `<output>.manifest.json`
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn digest(command: &str, version: &str, config: &Value, display: &Value, internal: &Value) -> String {
    // serde_json maps are ordered by key, so this form is canonical.
    let doc = serde_json::json!({
        "command": command,
        "tool_version": version,
        "config": config,
        "inputs_display": display,
        "inputs_internal": internal,
    });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_ignores_timestamp() {
        let a = RunManifest::new("sweep", json!({"x": 1}), json!({"h0": [1500]}), json!({"h0": [1500.0]}));
        let mut b = a.clone();
        b.timestamp_unix += 1000;
        assert!(b.verify());
        assert_eq!(a.input_digest, b.input_digest);
        let c = RunManifest::new("sweep", json!({"x": 2}), json!({"h0": [1500]}), json!({"h0": [1500.0]}));
        assert_ne!(a.input_digest, c.input_digest);
    }

    #[test]
    fn written_next_to_output() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("resp.csv");
        let m = RunManifest::new("response", json!({}), json!({}), json!({}));
        let path = m.write_for(&out).unwrap();
        assert_eq!(path, dir.path().join("resp.csv.manifest.json"));
        let back: RunManifest = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
