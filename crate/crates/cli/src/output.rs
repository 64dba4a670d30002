//! Output directory handling. Data files are written as they are produced; the
//! manifest listing their checksums goes last, through a rename.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{RawConfig, RunConfig};

pub const MANIFEST: &str = "manifest.json";

pub struct OutputDir {
    root: PathBuf,
    files: Vec<(String, String, usize)>,
    started: Instant,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.root.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        let digest = Sha256::digest(contents.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.files.push((name.to_string(), hex, contents.len()));
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    /// Writes manifest.json (config echo, version, duration, checksums) atomically.
    pub fn finish(self, cfg: &RunConfig, raw: &RawConfig) -> Result<PathBuf> {
        let mut echo = Map::new();
        for (k, v) in raw.keys() {
            echo.insert(k.to_string(), Value::String(v.to_string()));
        }
        let outputs: Vec<Value> = self
            .files
            .iter()
            .map(|(file, sha, bytes)| json!({ "file": file, "sha256": sha, "bytes": bytes }))
            .collect();
        let manifest = json!({
            "tool": "foldwave",
            "version": env!("CARGO_PKG_VERSION"),
            "command": cfg.command.name(),
            "scenario": cfg.scenario.name(),
            "epsilon": cfg.epsilon,
            "x0": cfg.x0,
            "grid": {
                "xmin": cfg.x.min, "xmax": cfg.x.max, "nx": cfg.x.n,
                "kmin": cfg.k.min, "kmax": cfg.k.max, "nk": cfg.k.n,
            },
            "quadrature": {
                "sigma_samples": cfg.quadrature.sigma_samples,
                "taper": cfg.quadrature.taper_fraction,
                "truncation": format!("{:?}", cfg.quadrature.truncation_rule),
                "support_margin": cfg.quadrature.support_margin,
            },
            "seed": cfg.seed,
            "config": Value::Object(echo),
            "duration_seconds": self.started.elapsed().as_secs_f64(),
            "outputs": outputs,
        });
        let tmp = self.root.join(format!("{MANIFEST}.tmp"));
        let path = self.root.join(MANIFEST);
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("renaming manifest into {}", path.display()))?;
        Ok(path)
    }
}
