//! Run configuration: one TOML document, every field defaulted.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bootstrap::BootstrapConfig;
use crate::corpus::{Format, SplitRatios};
use crate::error::{Error, Result};
use crate::stats::{ClassThresholds, CountMode};
use crate::tuning::TuningGrid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus: PathBuf,
    pub format: String,
    pub output: PathBuf,
    /// Histogram grouping file; the shipped grouping when unset.
    pub form_groups: Option<PathBuf>,
    /// Directory with replacement lexicon files; the shipped lexicon when unset.
    pub lexicon: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            corpus: PathBuf::from("corpus.jsonl"),
            format: "jsonl".into(),
            output: PathBuf::from("out"),
            form_groups: None,
            lexicon: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub ratios: [f64; 3],
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            ratios: [0.7, 0.2, 0.1],
            seed: 13,
        }
    }
}

impl SplitConfig {
    pub fn ratios(&self) -> Result<SplitRatios> {
        SplitRatios::new(self.ratios[0], self.ratios[1], self.ratios[2])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapSection {
    pub iterations: usize,
    pub seed: u64,
    /// FACT:FEEL ratio kept by the balancer; the training ratio when unset.
    pub target_ratio: Option<f64>,
    pub count_mode: CountMode,
    pub strict_refilter: bool,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        let b = BootstrapConfig::default();
        BootstrapSection {
            iterations: b.iterations,
            seed: b.seed,
            target_ratio: b.target_ratio,
            count_mode: b.count_mode,
            strict_refilter: b.strict_refilter,
        }
    }
}

impl BootstrapSection {
    pub fn to_config(&self) -> BootstrapConfig {
        BootstrapConfig {
            iterations: self.iterations,
            count_mode: self.count_mode,
            strict_refilter: self.strict_refilter,
            target_ratio: self.target_ratio,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuningSection {
    /// Search the grid on DEV instead of using the configured thresholds.
    pub enabled: bool,
    #[serde(flatten)]
    pub grid: TuningGrid,
}

impl Default for TuningSection {
    fn default() -> Self {
        TuningSection {
            enabled: false,
            grid: TuningGrid::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NbSection {
    pub alpha_grid: Vec<f64>,
}

impl Default for NbSection {
    fn default() -> Self {
        NbSection {
            alpha_grid: vec![0.1, 0.5, 1.0, 2.0],
        }
    }
}

/// Where instance weights in the form histogram come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceSource {
    /// Occurrences over the final labeled set, bootstrapped documents included.
    #[default]
    Final,
    /// Occurrences in the labeled set at the time a pattern was admitted.
    Admission,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub top_k: usize,
    pub instances: InstanceSource,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            top_k: 10,
            instances: InstanceSource::Final,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub paths: PathsConfig,
    pub split: SplitConfig,
    pub thresholds: ClassThresholds,
    pub bootstrap: BootstrapSection,
    pub tuning: TuningSection,
    pub nb: NbSection,
    pub analysis: AnalysisSection,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl RunConfig {
    pub fn from_toml(source: &str) -> Result<Self> {
        let cfg: RunConfig =
            toml::from_str(source).map_err(|e| Error::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn format(&self) -> Result<Format> {
        self.paths.format.parse().map_err(Error::Config)
    }

    pub fn validate(&self) -> Result<()> {
        self.split.ratios()?;
        self.thresholds.validate()?;
        self.format()?;
        if let Some(r) = self.bootstrap.target_ratio {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::config(format!("bootstrap.target_ratio must be positive, got {r}")));
            }
        }
        if self.tuning.enabled {
            self.tuning.grid.validate()?;
        }
        if self.nb.alpha_grid.is_empty() {
            return Err(Error::config("nb.alpha_grid is empty"));
        }
        if let Some(a) = self.nb.alpha_grid.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::config(format!("nb.alpha_grid has non-positive alpha {a}")));
        }
        Ok(())
    }

    /// SHA-256 of the resolved configuration.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}
