use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use assertgen_core::checker::StimulusPlan;
use assertgen_core::rtl::NameLists;
use assertgen_flow::dataset::{EmbedderConfig, Normalization, DEFAULT_THRESHOLD};
use assertgen_flow::repair::RepairPolicy;
use assertgen_llm::{BackendKind, ProviderConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Default config file looked up in the working directory.
pub const DEFAULT_CONFIG: &str = "assertgen.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub provider: ProviderConfig,
    #[serde(default)]
    pub repair: RepairPolicy,
    #[serde(default)]
    pub stimulus: StimulusPlan,
    #[serde(default)]
    pub dataset: DatasetSettings,
    pub paths: PathsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clock_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reset_names: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub designs_manifest: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompts_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSettings {
    pub embedder: EmbedderConfig,
    pub threshold: f64,
    pub normalization: Normalization,
    /// System message for emitted examples; the bundled SVA digest when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system_message_path: Option<PathBuf>,
    pub base_model: String,
    pub synth_vocab: Vec<String>,
}

impl Default for DatasetSettings {
    fn default() -> Self {
        DatasetSettings {
            embedder: EmbedderConfig::default(),
            threshold: DEFAULT_THRESHOLD,
            normalization: Normalization::None,
            system_message_path: None,
            base_model: "gpt-3.5-turbo".to_string(),
            synth_vocab: ["req", "gnt", "valid", "ready", "data", "count", "en", "busy"].map(String::from).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignManifestEntry {
    pub design_id: String,
    pub spec_path: PathBuf,
    pub rtl_path: PathBuf,
    pub model_path: PathBuf,
}

/// A loaded config together with the directory its relative paths
/// resolve against.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl Loaded {
    pub fn read(path: &Path) -> Result<Loaded> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base_dir = if base_dir.as_os_str().is_empty() { PathBuf::from(".") } else { base_dir };
        Ok(Loaded { config, base_dir })
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    /// Checks value ranges and that every referenced input path exists.
    pub fn validate(&self) -> Result<()> {
        let c = &self.config;
        c.provider.validate().map_err(anyhow::Error::msg)?;
        let mut inputs = vec![("paths.designs_manifest", c.paths.designs_manifest.clone())];
        if let Some(p) = &c.paths.prompts_dir {
            inputs.push(("paths.prompts_dir", p.clone()));
        }
        match c.provider.backend {
            BackendKind::Replay => inputs.push(("provider.replay.fixture_path", c.provider.replay.as_ref().expect("validated").fixture_path.clone())),
            BackendKind::Scripted => {
                inputs.push(("provider.scripted.script_path", c.provider.scripted.as_ref().expect("validated").script_path.clone()))
            }
            BackendKind::Http => {}
        }
        if let Some(p) = &c.dataset.system_message_path {
            inputs.push(("dataset.system_message_path", p.clone()));
        }
        if let EmbedderConfig::External { path } = &c.dataset.embedder {
            inputs.push(("dataset.embedder.path", path.clone()));
        }
        for (key, p) in inputs {
            let full = self.resolve(&p);
            if !full.exists() {
                bail!("{key}: {} does not exist", full.display());
            }
        }
        if !(-1.0..=1.0).contains(&c.dataset.threshold) {
            bail!("dataset.threshold must lie in [-1, 1]");
        }
        if c.stimulus.horizon == 0 {
            bail!("stimulus.horizon must be positive");
        }
        Ok(())
    }

    pub fn name_lists(&self) -> NameLists {
        let mut n = NameLists::default();
        if let Some(c) = &self.config.clock_names {
            n.clock_names = c.clone();
        }
        if let Some(r) = &self.config.reset_names {
            n.reset_names = r.clone();
        }
        n
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.resolve(&self.config.paths.designs_manifest)
    }

    /// Manifest entries with paths resolved against the manifest's directory.
    pub fn designs(&self) -> Result<Vec<DesignManifestEntry>> {
        let path = self.manifest_path();
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading design manifest {}", path.display()))?;
        let entries: Vec<DesignManifestEntry> =
            serde_json::from_str(&text).with_context(|| format!("parsing design manifest {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            if !seen.insert(e.design_id.clone()) {
                bail!("design manifest lists '{}' twice", e.design_id);
            }
            for p in [&e.spec_path, &e.rtl_path, &e.model_path] {
                if !dir.join(p).is_file() {
                    bail!("design '{}': {} does not exist", e.design_id, dir.join(p).display());
                }
            }
            out.push(e);
        }
        Ok(out)
    }

    pub fn design_dir(&self) -> PathBuf {
        self.manifest_path().parent().map(Path::to_path_buf).unwrap_or_default()
    }

    /// Short hash of the effective configuration.
    pub fn hash(&self) -> String {
        config_hash(&self.config)
    }
}

pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config serializes");
    let digest = Sha256::digest(bytes);
    digest[..4].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"{"provider":{"backend":"replay","replay":{"fixture_path":"f.jsonl"}},
        "paths":{"designs_manifest":"m.json","output_dir":"out"}}"#;

    #[test]
    fn defaults_and_unknown_keys() {
        let c: RunConfig = serde_json::from_str(MIN).unwrap();
        assert_eq!(c.repair.max_iterations, 5);
        assert_eq!(c.stimulus.horizon, 20);
        assert_eq!(c.dataset.threshold, 0.6);
        let bad = MIN.replace("\"paths\"", "\"extra\":1,\"paths\"");
        assert!(serde_json::from_str::<RunConfig>(&bad).is_err());
        let api_key_in_file = MIN.replace("\"backend\":\"replay\"", "\"backend\":\"replay\",\"api_key\":\"sk-1\"");
        assert!(serde_json::from_str::<RunConfig>(&api_key_in_file).is_err());
    }

    #[test]
    fn missing_paths_fail_validation() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(&cfg, MIN).unwrap();
        let l = Loaded::read(&cfg).unwrap();
        assert!(l.validate().unwrap_err().to_string().contains("designs_manifest"));
        std::fs::write(dir.path().join("m.json"), "[]").unwrap();
        std::fs::write(dir.path().join("f.jsonl"), "").unwrap();
        l.validate().unwrap();
        assert!(l.designs().unwrap().is_empty());
        assert_eq!(l.hash().len(), 8);
    }
}
