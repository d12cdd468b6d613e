use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use liemax::flows::FlowConfig;
use liemax::Error;

/// Provenance of one output file, written next to it as
/// `<file>.manifest.json`.
#[derive(Serialize)]
pub struct Manifest {
    pub command: String,
    pub group: String,
    pub seed: u64,
    pub config: Option<FlowConfig>,
    pub tool_version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Manifest {
    pub fn new(command: &str, group: &str, seed: u64, config: Option<FlowConfig>) -> Self {
        Self {
            command: command.into(),
            group: group.into(),
            seed,
            config,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// Writes `text` to `path` with its manifest, or to stdout without one.
pub fn write_output(path: Option<&Path>, text: &str, manifest: &Manifest) -> Result<(), Error> {
    match path {
        Some(path) => {
            write_file(path, text)?;
            let m = serde_json::to_string_pretty(manifest)? + "\n";
            write_file(&manifest_path(path), &m)
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Error::from)?;
            out.flush().map_err(Error::from)
        }
    }
}
