//! Service configuration, read from TOML.
//!
//! ```toml
//! ontology_path     = "mini-do.obo"
//! case_store_path   = "gastric-cases.jsonl"
//! rules_dir         = "."                       # gastric-rules.json, breast-stages.json
//! weights           = [0.4, 0.4, 0.1, 0.1]      # diagnosis, keywords, age, stage
//! k_default         = 5
//! port              = 8080
//! static_assets_dir = "console"                 # optional
//! lexicon_path      = "lexicon.txt"             # optional, default rules_dir/lexicon.txt
//! stopwords_path    = "stopwords.txt"           # optional, default rules_dir/stopwords.txt
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::similarity::SimilarityWeights;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub ontology_path: PathBuf,
    pub case_store_path: PathBuf,
    pub rules_dir: PathBuf,
    #[serde(default)]
    pub weights: SimilarityWeights,
    #[serde(default = "default_k")]
    pub k_default: usize,
    #[serde(default = "default_port")]
    pub port: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub static_assets_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopwords_path: Option<PathBuf>,
}

fn default_k() -> usize {
    5
}

fn default_port() -> u16 {
    8080
}

impl Config {
    /// Configuration pointing at the fixtures bundled with the crate.
    pub fn bundled() -> Self {
        let dir = crate::fixtures_dir();
        Config {
            ontology_path: dir.join("mini-do.obo"),
            case_store_path: dir.join("gastric-cases.jsonl"),
            rules_dir: dir.clone(),
            weights: SimilarityWeights::default(),
            k_default: default_k(),
            port: default_port(),
            static_assets_dir: None,
            lexicon_path: None,
            stopwords_path: None,
        }
    }

    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, ServiceError> {
        let mut cfg: Config =
            toml::from_str(text).map_err(|e| ServiceError::Config(e.to_string()))?;
        if cfg.k_default == 0 {
            return Err(ServiceError::Config("k_default must be at least 1".into()));
        }
        let abs = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        abs(&mut cfg.ontology_path);
        abs(&mut cfg.case_store_path);
        abs(&mut cfg.rules_dir);
        for p in [&mut cfg.static_assets_dir, &mut cfg.lexicon_path, &mut cfg.stopwords_path]
            .into_iter()
            .flatten()
        {
            abs(p);
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn lexicon_path(&self) -> PathBuf {
        self.lexicon_path
            .clone()
            .unwrap_or_else(|| self.rules_dir.join("lexicon.txt"))
    }

    pub fn stopwords_path(&self) -> PathBuf {
        self.stopwords_path
            .clone()
            .unwrap_or_else(|| self.rules_dir.join("stopwords.txt"))
    }
}
