//! Provenance stamped on every output: tool version, command, config hash and seed.

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// SHA-256 of the parsed config, re-serialized canonically with command-line
    /// overrides applied.
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &'static str, config: &C, seed: u64) -> Self {
        let canonical = serde_json::to_vec(config).expect("configs serialize");
        Provenance {
            tool: "ednet",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config_sha256: hex::encode(Sha256::digest(&canonical)),
            seed,
        }
    }

    /// Comment lines for CSV outputs, without the leading `#`.
    pub fn comment_lines(&self) -> Vec<String> {
        vec![
            format!("{} {} {}", self.tool, self.version, self.command),
            format!("config_sha256 {}", self.config_sha256),
            format!("seed {}", self.seed),
        ]
    }

    pub fn csv_header(&self) -> String {
        self.comment_lines().iter().map(|l| format!("# {l}\n")).collect()
    }
}
