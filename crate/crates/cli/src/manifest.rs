//! Run manifests: command, parameters, seed, and input digests as JSON.
//!
//! Manifests record everything needed to reproduce a run. They contain no
//! timestamps or timing data, so two identical invocations produce
//! byte-identical manifests.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub struct Manifest {
    command: String,
    seed: u64,
    params: Map<String, Value>,
    inputs: Map<String, Value>,
    outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, seed: u64) -> Manifest {
        Manifest {
            command: command.into(),
            seed,
            params: Map::new(),
            inputs: Map::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Manifest {
        self.params.insert(key.into(), value.into());
        self
    }

    pub fn input_file(mut self, path: &Path) -> anyhow::Result<Manifest> {
        let digest = sha256_file(path)?;
        self.inputs
            .insert(path.display().to_string(), Value::String(digest));
        Ok(self)
    }

    pub fn output_file(mut self, path: &Path) -> anyhow::Result<Manifest> {
        self.outputs.push(path.display().to_string());
        Ok(self)
    }

    fn to_json(&self) -> Value {
        json!({
            "tool": "shoal",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "parameters": self.params,
            "inputs": self.inputs,
            "outputs": self.outputs,
        })
    }

    /// Write `<output>.manifest.json` next to a primary output file.
    pub fn write_next_to(self, output: &Path) -> anyhow::Result<()> {
        let mut path = output.as_os_str().to_owned();
        path.push(".manifest.json");
        self.write_to(&PathBuf::from(path))
    }

    /// Write `manifest.json` inside an output directory.
    pub fn write_into(self, dir: &Path) -> anyhow::Result<()> {
        self.write_to(&dir.join("manifest.json"))
    }

    fn write_to(self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}
