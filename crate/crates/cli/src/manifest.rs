use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Sidecar written next to every `--out` file. Timestamps live only here, so
/// the data file itself is byte-identical across reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    /// Decimal string, since seeds may exceed the TOML integer range.
    pub seed: Option<String>,
    pub data_file: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub params: toml::Table,
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.toml");
    PathBuf::from(name)
}
