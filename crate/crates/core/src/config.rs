//! Experiment configuration files and the hyperparameter sweep grid.
//!
//! Configs are TOML. Relative paths resolve against the config file's
//! directory. A minimal file:
//!
//! ```toml
//! seeds = [11, 12, 13]
//!
//! [data]
//! intents = "intents.jsonl"
//! utterances = "utterances.jsonl"
//!
//! [split]
//! n_unseen = 5
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Dataset, GzslSplit};
use crate::encoder::{EmbeddingConfig, ScorerConfig};
use crate::error::{Error, Result};
use crate::gzsl::{Experiment, GzslOptions, IntentTextSource, SplitPlan};
use crate::lexicalize::{LexicalizeOptions, TemplateSet};
use crate::sampling::SamplingConfig;

pub const DEFAULT_SEEDS: [u64; 10] = [11, 12, 13, 14, 15, 16, 17, 18, 19, 20];
const FINGERPRINT_HEX: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub intents: PathBuf,
    pub utterances: PathBuf,
    /// A fixed split shared by all seeds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<PathBuf>,
    /// Template JSONL replacing the built-in set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub templates: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub n_unseen: usize,
    pub train_fraction: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            n_unseen: 5,
            train_fraction: 0.7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub intent_text: IntentTextSource,
    #[serde(default)]
    pub lexicalize: LexicalizeOptions,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub scorer: ScorerConfig,
    #[serde(default)]
    pub embedding: EmbeddingConfig,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub sweep: SweepGrid,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    DEFAULT_SEEDS.to_vec()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| text[s].trim().to_string())
                .unwrap_or_else(|| "config".to_string());
            Error::config(field, e.message().to_string())
        })?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("seeds", "must be distinct"));
        }
        if self.data.split.is_none() && self.split.n_unseen == 0 {
            return Err(Error::config("split.n_unseen", "must be at least 1"));
        }
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction <= 1.0) {
            return Err(Error::config("split.train_fraction", "must be in (0, 1]"));
        }
        self.sampling.validate()?;
        self.scorer.validate()?;
        self.embedding.validate()?;
        self.sweep.validate()?;
        if let IntentTextSource::Lexicalized { template } = &self.intent_text {
            if self.data.templates.is_none() {
                TemplateSet::builtin()
                    .get(template)
                    .map_err(|_| Error::config("intent_text.template", format!("unknown template `{template}`")))?;
            }
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// Hex prefix of the SHA-256 of the config's canonical JSON.
    pub fn fingerprint(&self) -> String {
        fingerprint_of(self)
    }

    pub fn load_dataset(&self) -> Result<Dataset> {
        Dataset::load(self.resolve(&self.data.intents), self.resolve(&self.data.utterances))
    }

    pub fn options(&self) -> Result<GzslOptions> {
        let templates = match &self.data.templates {
            Some(p) => Some(TemplateSet::load(self.resolve(p))?.iter().cloned().collect()),
            None => None,
        };
        let options = GzslOptions {
            intent_text: self.intent_text.clone(),
            lexicalize: self.lexicalize,
            templates,
            sampling: self.sampling.clone(),
            embedding: self.embedding.clone(),
            scorer: self.scorer.clone(),
            seed: 0,
        };
        options.validate()?;
        Ok(options)
    }

    pub fn split_plan(&self) -> Result<SplitPlan> {
        Ok(match &self.data.split {
            Some(p) => SplitPlan::Fixed {
                split: GzslSplit::load(self.resolve(p))?,
            },
            None => SplitPlan::Random {
                n_unseen: self.split.n_unseen,
                train_fraction: self.split.train_fraction,
            },
        })
    }

    pub fn experiment(&self) -> Result<Experiment> {
        Ok(Experiment {
            options: self.options()?,
            split: self.split_plan()?,
            seeds: self.seeds.clone(),
            fingerprint: self.fingerprint(),
        })
    }
}

pub fn fingerprint_of<T: Serialize>(value: &T) -> String {
    let canonical = serde_json::to_value(value)
        .and_then(|v| serde_json::to_vec(&v))
        .expect("config serializes");
    let digest = Sha256::digest(&canonical);
    hex::encode(digest)[..FINGERPRINT_HEX].to_string()
}

/// Value lists for each swept hyperparameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub learning_rate: Vec<f64>,
    pub batch_size: Vec<usize>,
    pub warmup_ratio: Vec<f64>,
    pub max_len_tokens: Vec<usize>,
    pub k: Vec<usize>,
    pub runs_per_point: usize,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            learning_rate: vec![2e-5, 5e-5],
            batch_size: vec![8, 16],
            warmup_ratio: vec![0.10, 0.15],
            max_len_tokens: vec![20, 30, 40],
            k: vec![5, 7],
            runs_per_point: 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub warmup_ratio: f64,
    pub max_len_tokens: usize,
    pub k: usize,
}

impl SweepPoint {
    pub fn apply(&self, cfg: &ExperimentConfig) -> ExperimentConfig {
        let mut c = cfg.clone();
        c.scorer.learning_rate = self.learning_rate;
        c.scorer.batch_size = self.batch_size;
        c.scorer.warmup_ratio = self.warmup_ratio;
        c.scorer.max_len_tokens = self.max_len_tokens;
        c.sampling.k = self.k;
        c.sampling.top_n = c.sampling.top_n.max(self.k);
        c
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("sweep.learning_rate", self.learning_rate.len()),
            ("sweep.batch_size", self.batch_size.len()),
            ("sweep.warmup_ratio", self.warmup_ratio.len()),
            ("sweep.max_len_tokens", self.max_len_tokens.len()),
            ("sweep.k", self.k.len()),
        ];
        if let Some((field, _)) = lists.iter().find(|(_, n)| *n == 0) {
            return Err(Error::config(*field, "must list at least one value"));
        }
        if self.learning_rate.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::config("sweep.learning_rate", "values must be positive"));
        }
        if self.batch_size.contains(&0) {
            return Err(Error::config("sweep.batch_size", "values must be positive"));
        }
        if self.warmup_ratio.iter().any(|v| !(0.0..1.0).contains(v)) {
            return Err(Error::config("sweep.warmup_ratio", "values must be in [0, 1)"));
        }
        if self.max_len_tokens.contains(&0) {
            return Err(Error::config("sweep.max_len_tokens", "values must be positive"));
        }
        if self.k.contains(&0) {
            return Err(Error::config("sweep.k", "values must be positive"));
        }
        if self.runs_per_point == 0 {
            return Err(Error::config("sweep.runs_per_point", "must be at least 1"));
        }
        Ok(())
    }

    /// Cartesian product, learning rate varying slowest and k fastest.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &learning_rate in &self.learning_rate {
            for &batch_size in &self.batch_size {
                for &warmup_ratio in &self.warmup_ratio {
                    for &max_len_tokens in &self.max_len_tokens {
                        for &k in &self.k {
                            out.push(SweepPoint {
                                learning_rate,
                                batch_size,
                                warmup_ratio,
                                max_len_tokens,
                                k,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [data]
        intents = "i.jsonl"
        utterances = "u.jsonl"
    "#;

    #[test]
    fn defaults() {
        let cfg = ExperimentConfig::from_toml(MINIMAL, "/base").unwrap();
        assert_eq!(cfg.seeds, DEFAULT_SEEDS);
        assert_eq!(cfg.resolve(Path::new("i.jsonl")), PathBuf::from("/base/i.jsonl"));
        assert_eq!(cfg.sweep.runs_per_point, 5);
        assert_eq!(cfg.fingerprint().len(), FINGERPRINT_HEX);
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = ExperimentConfig::from_toml(MINIMAL, "/x").unwrap();
        let b = ExperimentConfig::from_toml(MINIMAL, "/y").unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = ExperimentConfig::from_toml(&format!("seeds = [1]\n{MINIMAL}"), "/x").unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn field_level_errors() {
        let cases = [
            ("seeds = []", "seeds"),
            ("seeds = [1, 1]", "seeds"),
            ("[split]\nn_unseen = 0", "split.n_unseen"),
            ("[scorer]\nbatch_size = 0", "scorer.batch_size"),
            ("[sampling]\nk = 0", "sampling.k"),
            ("[sweep]\nk = []", "sweep.k"),
            (
                "[intent_text]\nsource = \"lexicalized\"\ntemplate = \"zz\"",
                "intent_text.template",
            ),
        ];
        for (extra, field) in cases {
            let text = if extra.starts_with('[') {
                format!("{MINIMAL}\n{extra}")
            } else {
                format!("{extra}\n{MINIMAL}")
            };
            match ExperimentConfig::from_toml(&text, "") {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{extra}"),
                other => panic!("{extra}: {other:?}"),
            }
        }
        assert!(matches!(
            ExperimentConfig::from_toml("[data]\nintents = 3", ""),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            ExperimentConfig::from_toml(&format!("{MINIMAL}\nbogus = 1"), ""),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn grid_size_is_product_of_lists() {
        let grid = SweepGrid::default();
        let points = grid.points();
        assert_eq!(points.len(), 2 * 2 * 2 * 3 * 2);
        assert_eq!(points[0].learning_rate, 2e-5);
        assert_eq!(points[1].k, 7);
        let small = SweepGrid {
            learning_rate: vec![0.1],
            max_len_tokens: vec![30],
            ..grid
        };
        assert_eq!(small.points().len(), 8);
    }

    #[test]
    fn point_application() {
        let cfg = ExperimentConfig::from_toml(MINIMAL, "").unwrap();
        let p = SweepGrid::default().points()[47];
        let applied = p.apply(&cfg);
        assert_eq!(applied.scorer.learning_rate, 5e-5);
        assert_eq!(applied.sampling.k, 7);
        assert_eq!(applied.scorer.max_len_tokens, 40);
        assert_ne!(applied.fingerprint(), cfg.fingerprint());
    }
}
