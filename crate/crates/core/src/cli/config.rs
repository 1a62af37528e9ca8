//! Benchmark configuration file (TOML).
//!
//! ```toml
//! methods = ["dwt", "udwt", "dwt-ga", "udwt-ga"]   # optional, default all four
//! fused_dir = "fused"                              # optional, writes fused PNGs
//!
//! [ga]                                             # optional, defaults shown
//! initial_diff = 0.1
//! trials_per_generation = 10
//! max_generations = 100
//! termination_epsilon = 0.0001
//!
//! [[datasets]]
//! name = "set1"
//! src1 = "mri_t2.png"
//! src2 = "spect_ti.png"
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::fusion::FusionMethod;
use crate::optimizer::GaConfig;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub name: String,
    pub src1: PathBuf,
    pub src2: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    #[serde(default = "all_methods")]
    pub methods: Vec<FusionMethod>,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub datasets: Vec<DatasetEntry>,
    #[serde(default)]
    pub fused_dir: Option<PathBuf>,
}

fn all_methods() -> Vec<FusionMethod> {
    FusionMethod::ALL.to_vec()
}

impl BenchmarkConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: Self = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut cfg = Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for d in &mut cfg.datasets {
            d.src1 = base.join(&d.src1);
            d.src2 = base.join(&d.src2);
        }
        if let Some(dir) = &cfg.fused_dir {
            cfg.fused_dir = Some(base.join(dir));
        }
        Ok(cfg)
    }

    fn check(&self) -> Result<(), String> {
        if self.datasets.is_empty() {
            return Err("no datasets".into());
        }
        if self.methods.is_empty() {
            return Err("no methods".into());
        }
        let mut names: Vec<&str> = self.datasets.iter().map(|d| d.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(format!("duplicate dataset name {:?}", w[0]));
        }
        let mut methods = self.methods.clone();
        methods.sort_by_key(|m| m.label());
        methods.dedup();
        if methods.len() != self.methods.len() {
            return Err("duplicate method".into());
        }
        self.ga.validate().map_err(|e| e.to_string())
    }
}
