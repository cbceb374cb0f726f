//! Text features: tokenization, hashed embeddings and the pair scorer.

mod external;
mod scorer;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use xxhash_rust::xxh64::xxh64;

use crate::error::{Error, Result};

pub use external::{build_requests, ExternalScorer, ScoreRequest, ScoreResponse};
pub use scorer::{
    gradient_check, train_scorer, Featurizer, GradCheckOptions, GradCheckReport, PairExample, PairScorer, Params,
    ScorerConfig, TrainedScorer, TrainingStats,
};

/// Lowercased alphanumeric runs; every other character separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// [`tokenize`] truncated to the first `max_len_tokens` tokens.
pub fn tokenize_and_truncate(text: &str, max_len_tokens: usize) -> Vec<String> {
    let mut tokens = tokenize(text);
    tokens.truncate(max_len_tokens.max(1));
    tokens
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    pub dimension: usize,
    pub char_ngram_range: (usize, usize),
    pub use_word_unigrams: bool,
    pub hash_seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dimension: 2048,
            char_ngram_range: (3, 5),
            use_word_unigrams: true,
            hash_seed: 0,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 64 {
            return Err(Error::config("embedding.dimension", "must be at least 64"));
        }
        let (lo, hi) = self.char_ngram_range;
        if lo == 0 || lo > hi {
            return Err(Error::config("embedding.char_ngram_range", "need 1 <= lower <= upper"));
        }
        Ok(())
    }
}

/// A sparse vector with sorted, unique indices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn from_map(dim: usize, map: BTreeMap<u32, f64>) -> Self {
        SparseVector {
            dim,
            entries: map.into_iter().filter(|(_, v)| *v != 0.0).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.entries.len() && j < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn cosine(&self, other: &SparseVector) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let (na, nb) = (self.norm(), other.norm());
        if na == 0.0 || nb == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok((self.dot(other) / (na * nb)).clamp(-1.0, 1.0))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            dense[i as usize] = v;
        }
        dense
    }
}

/// Cosine similarity of two dense vectors.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Hashed features of a text: `w␟token` unigrams and `<token>` character n-grams.
pub fn features(text: &str, config: &EmbeddingConfig) -> Vec<String> {
    let mut out = Vec::new();
    let (lo, hi) = config.char_ngram_range;
    for token in tokenize(text) {
        if config.use_word_unigrams {
            out.push(format!("w\u{1f}{token}"));
        }
        let padded: Vec<char> = format!("<{token}>").chars().collect();
        for n in lo..=hi {
            out.extend(padded.windows(n).map(|w| w.iter().collect::<String>()));
        }
    }
    out
}

/// Signed feature hashing with term-frequency counts, L2-normalized.
///
/// Bucket is the hash modulo `dimension`; the top hash bit picks the sign,
/// so unrelated texts have near-zero expected cosine.
pub fn embed(text: &str, config: &EmbeddingConfig) -> Result<SparseVector> {
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    for feature in features(text, config) {
        let h = xxh64(feature.as_bytes(), config.hash_seed);
        let bucket = (h % config.dimension as u64) as u32;
        let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
        *counts.entry(bucket).or_insert(0.0) += sign;
    }
    let mut v = SparseVector::from_map(config.dimension, counts);
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    for e in &mut v.entries {
        e.1 /= norm;
    }
    Ok(v)
}
