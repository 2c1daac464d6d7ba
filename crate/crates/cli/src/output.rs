//! Deterministic file emission: staged in memory, written by a single
//! writer, digested into a run manifest.
//!
//! Numbers in CSV and plot files carry 17 significant digits, which
//! round-trips `f64` exactly; the decimal separator is always '.'
//! regardless of locale (Rust's float formatting is locale-independent).

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// 17-significant-digit scientific notation; exact round trip for f64.
pub fn g17(x: f64) -> String {
    format!("{:.16e}", x)
}

#[derive(Serialize)]
struct OutputDigest {
    path: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    parameters: BTreeMap<String, Value>,
    duration_seconds: f64,
    outputs: Vec<OutputDigest>,
}

/// Staged output files for one command run.
pub struct OutputStage {
    command: String,
    started: Instant,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputStage {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            started: Instant::now(),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Io(format!("serializing {name}: {e}")))?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    /// Write all staged files plus `manifest.json` under `out_dir`.
    pub fn commit(
        self,
        out_dir: &Path,
        parameters: BTreeMap<String, Value>,
    ) -> Result<(), CliError> {
        let io = |e: std::io::Error, what: &str| CliError::Io(format!("{what}: {e}"));
        std::fs::create_dir_all(out_dir)
            .map_err(|e| io(e, &format!("creating {}", out_dir.display())))?;

        let mut outputs = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let path = out_dir.join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| io(e, &format!("creating {}", parent.display())))?;
            }
            std::fs::write(&path, bytes)
                .map_err(|e| io(e, &format!("writing {}", path.display())))?;
            let mut hasher = Sha256::new();
            hasher.update(bytes);
            let digest = hasher.finalize();
            let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect::<String>();
            outputs.push(OutputDigest {
                path: name.clone(),
                bytes: bytes.len(),
                sha256,
            });
        }
        outputs.sort_by(|a, b| a.path.cmp(&b.path));

        let manifest = RunManifest {
            tool: "parosc",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            parameters,
            duration_seconds: self.started.elapsed().as_secs_f64(),
            outputs,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| CliError::Io(format!("serializing manifest: {e}")))?;
        bytes.push(b'\n');
        let path = out_dir.join("manifest.json");
        std::fs::write(&path, bytes)
            .map_err(|e| io(e, &format!("writing {}", path.display())))?;
        Ok(())
    }
}

/// Two-column whitespace-separated plot data with a '#' comment header.
pub fn plot_data(header: &str, rows: impl Iterator<Item = (f64, f64)>) -> Vec<u8> {
    let mut text = format!("# {header}\n");
    for (x, y) in rows {
        text.push_str(&g17(x));
        text.push(' ');
        text.push_str(&g17(y));
        text.push('\n');
    }
    text.into_bytes()
}
