use std::path::{Path, PathBuf};
use std::time::Duration;

use optomech_core::config::to_config_string;
use optomech_core::verify::SamplingRanges;
use optomech_core::{GridSpec, SystemConfig};
use serde::Serialize;

/// Everything needed to regenerate an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: SystemConfig,
    /// The configuration in the loader's own format.
    pub config_text: String,
    pub grid: Option<GridSpec>,
    pub threads: usize,
    pub duration_seconds: f64,
    pub worst_oracle_error: Option<f64>,
    pub seed: Option<u64>,
    pub sampling: Option<SamplingRanges>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: &SystemConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config: *config,
            config_text: to_config_string(config),
            grid: None,
            threads: rayon::current_num_threads(),
            duration_seconds: 0.0,
            worst_oracle_error: None,
            seed: None,
            sampling: None,
        }
    }

    pub fn finish(mut self, elapsed: Duration) -> Self {
        self.duration_seconds = elapsed.as_secs_f64();
        self
    }
}

/// `<out>.manifest.json` next to a CSV output.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// JSON document with the manifest alongside the payload.
#[derive(Serialize)]
pub struct WithManifest<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    pub result: &'a T,
}
