//! Positive and negative sentence pairs for training.
//!
//! Negatives come from one of four strategies: fix the intent and draw
//! out-of-class utterances (`*US`), or fix the utterance and draw other seen
//! intents (`*IS`). Random variants draw uniformly; hard variants draw from
//! the most similar utterances, or weight intents by label similarity.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, GzslSplit, Utterance};
use crate::encoder::{embed, EmbeddingConfig, SparseVector};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Floor on the similarity weight of a candidate intent.
pub const HARD_INTENT_EPSILON: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Positive,
    RandomNeg,
    HardNeg,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrainingPair {
    pub intent_text: String,
    pub utterance_text: String,
    pub label: u8,
    pub origin: Origin,
    pub intent_id: String,
    pub utterance_id: String,
}

/// Audit record written by `--dump-pairs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub intent_text: String,
    pub utterance: String,
    pub label: u8,
    pub origin: Origin,
}

impl From<&TrainingPair> for PairRecord {
    fn from(p: &TrainingPair) -> Self {
        PairRecord {
            intent_text: p.intent_text.clone(),
            utterance: p.utterance_text.clone(),
            label: p.label,
            origin: p.origin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "random_is")]
    RandomIS,
    #[serde(rename = "random_us")]
    RandomUS,
    #[serde(rename = "hard_is")]
    HardIS,
    #[serde(rename = "hard_us")]
    HardUS,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::RandomIS,
        Strategy::RandomUS,
        Strategy::HardIS,
        Strategy::HardUS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::RandomIS => "random_is",
            Strategy::RandomUS => "random_us",
            Strategy::HardIS => "hard_is",
            Strategy::HardUS => "hard_us",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::config("sampling.strategy", format!("unknown strategy `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    pub strategy: Strategy,
    /// Negatives per positive.
    pub k: usize,
    /// Size of the mined pool for hard utterance sampling.
    pub top_n: usize,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            strategy: Strategy::HardUS,
            k: 5,
            top_n: 100,
            seed: 0,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("sampling.k", "must be at least 1"));
        }
        if self.top_n < self.k {
            return Err(Error::config("sampling.top_n", "must be at least k"));
        }
        Ok(())
    }
}

/// Drawn items plus whether fewer candidates than requested were available.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample<T> {
    pub items: Vec<T>,
    pub shortage: bool,
}

/// The assembled training set.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub pairs: Vec<TrainingPair>,
    /// Positives that received fewer than `k` distinct negatives.
    pub shortages: usize,
}

fn train_utterances<'a>(dataset: &'a Dataset, split: &GzslSplit) -> Result<Vec<&'a Utterance>> {
    split.train.iter().map(|id| dataset.utterance(id)).collect()
}

fn text_for<'a>(texts: &'a BTreeMap<String, String>, intent: &str) -> Result<&'a str> {
    texts
        .get(intent)
        .map(String::as_str)
        .ok_or_else(|| Error::MissingIntentText(intent.to_string()))
}

/// One positive pair per training utterance.
pub fn positive_pairs(
    dataset: &Dataset,
    split: &GzslSplit,
    texts: &BTreeMap<String, String>,
) -> Result<Vec<TrainingPair>> {
    train_utterances(dataset, split)?
        .into_iter()
        .map(|u| {
            Ok(TrainingPair {
                intent_text: text_for(texts, &u.intent_id)?.to_string(),
                utterance_text: u.text.clone(),
                label: 1,
                origin: Origin::Positive,
                intent_id: u.intent_id.clone(),
                utterance_id: u.id.clone(),
            })
        })
        .collect()
}

/// `k` uniform draws without replacement among utterances of other intents.
pub fn random_negative_utterances<'a>(
    train: &[&'a Utterance],
    intent: &str,
    k: usize,
    rng: &mut Rng,
) -> Sample<&'a Utterance> {
    let candidates: Vec<&Utterance> = train.iter().copied().filter(|u| u.intent_id != intent).collect();
    let shortage = candidates.len() < k;
    Sample {
        items: candidates.choose_multiple(rng, k).copied().collect(),
        shortage,
    }
}

/// `k` uniform draws among the other seen intents; with replacement when
/// fewer than `k` exist.
pub fn random_negative_intents(seen: &[&str], gold: &str, k: usize, rng: &mut Rng) -> Result<Sample<String>> {
    let others: Vec<&str> = seen.iter().copied().filter(|s| *s != gold).collect();
    if others.is_empty() {
        return Err(Error::InvalidArgument(
            "negative intent sampling needs at least two seen intents".into(),
        ));
    }
    if others.len() >= k {
        return Ok(Sample {
            items: others.choose_multiple(rng, k).map(|s| s.to_string()).collect(),
            shortage: false,
        });
    }
    Ok(Sample {
        items: (0..k)
            .map(|_| others[rng.gen_range(0..others.len())].to_string())
            .collect(),
        shortage: true,
    })
}

/// For every training utterance, the `top_n` most similar utterances of
/// other intents, most similar first; ties go to the smaller id.
pub fn mine_hard_negative_utterances(
    train: &[&Utterance],
    embedding: &EmbeddingConfig,
    top_n: usize,
) -> Result<BTreeMap<String, Vec<String>>> {
    let vectors: Vec<SparseVector> = train.iter().map(|u| embed(&u.text, embedding)).collect::<Result<_>>()?;
    let mut pools = BTreeMap::new();
    for (i, anchor) in train.iter().enumerate() {
        let mut scored: Vec<(f64, &str)> = train
            .iter()
            .enumerate()
            .filter(|(_, u)| u.intent_id != anchor.intent_id)
            .map(|(j, u)| (vectors[i].dot(&vectors[j]), u.id.as_str()))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        scored.truncate(top_n);
        pools.insert(
            anchor.id.clone(),
            scored.into_iter().map(|(_, id)| id.to_string()).collect(),
        );
    }
    Ok(pools)
}

/// `k` intents drawn with probability proportional to
/// `max(cosine(label(gold), label(candidate)), ε)`, sequentially without
/// replacement; with replacement when fewer than `k` candidates exist.
pub fn hard_negative_intents(
    seen: &[&str],
    gold: &str,
    k: usize,
    label_embeddings: &BTreeMap<String, SparseVector>,
    rng: &mut Rng,
) -> Result<Sample<String>> {
    let others: Vec<&str> = seen.iter().copied().filter(|s| *s != gold).collect();
    if others.is_empty() {
        return Err(Error::InvalidArgument(
            "negative intent sampling needs at least two seen intents".into(),
        ));
    }
    let anchor = label_embeddings
        .get(gold)
        .ok_or_else(|| Error::MissingIntentText(gold.to_string()))?;
    let mut weights = Vec::with_capacity(others.len());
    for id in &others {
        let v = label_embeddings
            .get(*id)
            .ok_or_else(|| Error::MissingIntentText(id.to_string()))?;
        weights.push(anchor.cosine(v)?.max(HARD_INTENT_EPSILON));
    }
    let weighted_error = |e| Error::InvalidArgument(format!("similarity weights: {e}"));
    if others.len() < k {
        let dist = WeightedIndex::new(&weights).map_err(weighted_error)?;
        return Ok(Sample {
            items: (0..k).map(|_| others[dist.sample(rng)].to_string()).collect(),
            shortage: true,
        });
    }
    let mut pool: Vec<(&str, f64)> = others.into_iter().zip(weights).collect();
    let mut items = Vec::with_capacity(k);
    for _ in 0..k {
        let dist = WeightedIndex::new(pool.iter().map(|(_, w)| *w)).map_err(weighted_error)?;
        items.push(pool.remove(dist.sample(rng)).0.to_string());
    }
    Ok(Sample { items, shortage: false })
}

/// Positives plus `k` negatives per positive, shuffled deterministically.
pub fn build_training_set(
    dataset: &Dataset,
    split: &GzslSplit,
    texts: &BTreeMap<String, String>,
    config: &SamplingConfig,
    embedding: &EmbeddingConfig,
) -> Result<TrainingSet> {
    config.validate()?;
    let train = train_utterances(dataset, split)?;
    let positives = positive_pairs(dataset, split, texts)?;
    let seen: Vec<&str> = split.seen.iter().map(String::as_str).collect();
    let mut rng = rng::stream(config.seed, "sampling.negatives");

    let pools = match config.strategy {
        Strategy::HardUS => Some(mine_hard_negative_utterances(&train, embedding, config.top_n)?),
        _ => None,
    };
    let label_embeddings = match config.strategy {
        Strategy::HardIS => Some(
            seen.iter()
                .map(|id| Ok((id.to_string(), embed(text_for(texts, id)?, embedding)?)))
                .collect::<Result<BTreeMap<_, _>>>()?,
        ),
        _ => None,
    };

    let mut pairs = Vec::with_capacity(positives.len() * (config.k + 1));
    let mut shortages = 0;
    for (pos, utt) in positives.into_iter().zip(&train) {
        let negative_utterance = |u: &Utterance, origin| TrainingPair {
            intent_text: pos.intent_text.clone(),
            utterance_text: u.text.clone(),
            label: 0,
            origin,
            intent_id: pos.intent_id.clone(),
            utterance_id: u.id.clone(),
        };
        let negative_intent = |intent: String, origin| -> Result<TrainingPair> {
            Ok(TrainingPair {
                intent_text: text_for(texts, &intent)?.to_string(),
                utterance_text: pos.utterance_text.clone(),
                label: 0,
                origin,
                intent_id: intent,
                utterance_id: pos.utterance_id.clone(),
            })
        };
        let (negatives, shortage) = match config.strategy {
            Strategy::RandomUS => {
                let s = random_negative_utterances(&train, &utt.intent_id, config.k, &mut rng);
                (
                    s.items
                        .into_iter()
                        .map(|u| negative_utterance(u, Origin::RandomNeg))
                        .collect(),
                    s.shortage,
                )
            }
            Strategy::HardUS => {
                let pool = &pools.as_ref().expect("mined")[&utt.id];
                let picked: Vec<&String> = pool.choose_multiple(&mut rng, config.k).collect();
                let negs = picked
                    .into_iter()
                    .map(|id| Ok(negative_utterance(dataset.utterance(id)?, Origin::HardNeg)))
                    .collect::<Result<Vec<_>>>()?;
                (negs, pool.len() < config.k)
            }
            Strategy::RandomIS => {
                let s = random_negative_intents(&seen, &utt.intent_id, config.k, &mut rng)?;
                let negs = s
                    .items
                    .into_iter()
                    .map(|i| negative_intent(i, Origin::RandomNeg))
                    .collect::<Result<_>>()?;
                (negs, s.shortage)
            }
            Strategy::HardIS => {
                let emb = label_embeddings.as_ref().expect("embedded");
                let s = hard_negative_intents(&seen, &utt.intent_id, config.k, emb, &mut rng)?;
                let negs = s
                    .items
                    .into_iter()
                    .map(|i| negative_intent(i, Origin::HardNeg))
                    .collect::<Result<_>>()?;
                (negs, s.shortage)
            }
        };
        shortages += usize::from(shortage);
        pairs.push(pos);
        pairs.extend::<Vec<TrainingPair>>(negatives);
    }
    pairs.shuffle(&mut rng::stream(config.seed, "sampling.shuffle"));
    Ok(TrainingSet { pairs, shortages })
}
