use std::path::Path;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::error::Result;

/// Provenance of one command invocation. The hash covers command, resolved
/// config and seed (not wall time), so reruns with identical inputs produce
/// byte-identical artifact bodies; the hash is embedded as a comment in
/// every CSV emitted by the run.
pub struct RunManifest {
    command: String,
    resolved_config: String,
    seed: Option<u64>,
    version: &'static str,
    hash: String,
    started: Instant,
}

impl RunManifest {
    pub fn new(command: &str, resolved_config: &str, seed: Option<u64>) -> Self {
        let version = env!("CARGO_PKG_VERSION");
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        hasher.update([0u8]);
        hasher.update(resolved_config.as_bytes());
        hasher.update([0u8]);
        hasher.update(seed.unwrap_or(0).to_le_bytes());
        hasher.update([0u8]);
        hasher.update(version.as_bytes());
        let hash = hex_prefix(&hasher.finalize(), 16);
        RunManifest {
            command: command.to_string(),
            resolved_config: resolved_config.to_string(),
            seed,
            version,
            hash,
            started: Instant::now(),
        }
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Header comment lines for CSV artifacts.
    pub fn csv_comments(&self) -> Vec<String> {
        vec![
            format!("manifest {}", self.hash),
            format!("command {}", self.command),
        ]
    }

    /// Writes `<stem>.manifest.toml` next to the artifacts.
    pub fn write(&self, path: &Path, extra: &[(String, String)]) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!("hash = \"{}\"\n", self.hash));
        out.push_str(&format!("command = \"{}\"\n", self.command));
        out.push_str(&format!("version = \"{}\"\n", self.version));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed = {seed}\n"));
        }
        out.push_str(&format!(
            "wall-time-seconds = {:.3}\n",
            self.started.elapsed().as_secs_f64()
        ));
        for (k, v) in extra {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out.push_str("\n[config]\nresolved = '''\n");
        out.push_str(&self.resolved_config);
        out.push_str("'''\n");
        std::fs::write(path, out)?;
        Ok(())
    }
}

fn hex_prefix(bytes: &[u8], chars: usize) -> String {
    let mut s = String::new();
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
        if s.len() >= chars {
            break;
        }
    }
    s.truncate(chars);
    s
}
