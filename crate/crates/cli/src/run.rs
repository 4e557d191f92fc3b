//! Shared run context: the seed and the output directory.
//!
//! Every artifact a command produces goes through this module, which enforces
//! two invariants: the seed is recorded in each output (a `seed` key in JSON
//! reports, a `# seed=` comment line in CSV files, an XML comment in SVG
//! plots), and nothing is written outside the chosen output directory.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::errors::CliError;

pub struct Run {
    pub command: &'static str,
    pub seed: u64,
    out_dir: PathBuf,
}

impl Run {
    pub fn new(command: &'static str, seed: u64, out_dir: &Path) -> Result<Run, CliError> {
        std::fs::create_dir_all(out_dir).map_err(|e| {
            CliError::input(format!("cannot create output directory: {e}"))
                .with("path", out_dir.display().to_string())
        })?;
        Ok(Run { command, seed, out_dir: out_dir.to_path_buf() })
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| {
            CliError::input(format!("cannot write artifact: {e}"))
                .with("path", path.display().to_string())
        })
    }

    /// Writes the command's JSON report: a fixed envelope with the command
    /// name, the seed, the echoed inputs, the results, and the artifact list.
    pub fn write_report(
        &self,
        name: &str,
        inputs: Value,
        results: Value,
        artifacts: &[&str],
    ) -> Result<(), CliError> {
        let doc = json!({
            "command": self.command,
            "seed": self.seed,
            "inputs": inputs,
            "results": results,
            "artifacts": artifacts,
        });
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))?;
        self.write(name, format!("{text}\n").as_bytes())
    }

    /// Writes CSV text prefixed with the `# seed=` comment line.
    pub fn write_csv(&self, name: &str, body: &str) -> Result<(), CliError> {
        self.write(name, format!("# seed={}\n{body}", self.seed).as_bytes())
    }

    /// Writes an SVG with the seed recorded as a comment after the root tag.
    pub fn write_svg(&self, name: &str, svg: &str) -> Result<(), CliError> {
        let tagged = match svg.find('>') {
            Some(i) => format!("{}<!-- seed={} -->{}", &svg[..=i], self.seed, &svg[i + 1..]),
            None => svg.to_string(),
        };
        self.write(name, tagged.as_bytes())
    }
}
