//! Per-utterance stress factors and their accuracy breakdown.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::encoder::{embed, tokenize, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::gzsl::PredictionRecord;
use crate::lexicalize::tokenize_label;

/// Count above which a starting 3-gram is considered frequent.
pub const FREQUENT_START_THRESHOLD: usize = 30;

const QUESTION_WORDS: [&str; 15] = [
    "what", "how", "when", "where", "who", "which", "why", "do", "does", "can", "could", "is", "are", "will", "would",
];
const NEGATIONS: [&str; 4] = ["not", "no", "never", "none"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressFeatures {
    pub word_overlap: usize,
    pub length_tokens: usize,
    pub is_question: bool,
    pub has_digit: bool,
    pub negation_count: usize,
    pub frequent_start: bool,
    pub label_cosine: f64,
}

/// Strips a plural `s` from tokens longer than three characters.
pub fn stem(token: &str) -> &str {
    if token.len() > 3 {
        token.strip_suffix('s').unwrap_or(token)
    } else {
        token
    }
}

pub fn stemmed_label_tokens(label: &str) -> BTreeSet<String> {
    tokenize_label(label)
        .unwrap_or_default()
        .iter()
        .map(|t| stem(t).to_string())
        .collect()
}

fn start_trigram(text: &str) -> Option<String> {
    let tokens = tokenize(text);
    (tokens.len() >= 3).then(|| tokens[..3].join(" "))
}

/// Counts of each utterance-initial token 3-gram.
pub fn start_trigram_counts<S: AsRef<str>>(texts: &[S]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for t in texts {
        if let Some(g) = start_trigram(t.as_ref()) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

fn negation_count(text: &str) -> usize {
    let lowered = text.to_lowercase().replace('\u{2019}', "'");
    lowered
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .map(|t| t.trim_matches('\''))
        .filter(|t| NEGATIONS.contains(t) || t.ends_with("n't"))
        .count()
}

pub fn stress_features(
    utterance: &str,
    intent_label: &str,
    start_counts: &BTreeMap<String, usize>,
    embedding: &EmbeddingConfig,
) -> StressFeatures {
    let tokens = tokenize(utterance);
    let utt_stems: BTreeSet<&str> = tokens.iter().map(|t| stem(t)).collect();
    let word_overlap = stemmed_label_tokens(intent_label)
        .iter()
        .filter(|t| utt_stems.contains(t.as_str()))
        .count();
    let is_question =
        utterance.trim_end().ends_with('?') || tokens.first().is_some_and(|t| QUESTION_WORDS.contains(&t.as_str()));
    let frequent_start = start_trigram(utterance)
        .and_then(|g| start_counts.get(&g))
        .is_some_and(|&c| c > FREQUENT_START_THRESHOLD);
    let label_cosine = match (embed(intent_label, embedding), embed(utterance, embedding)) {
        (Ok(a), Ok(b)) => a.cosine(&b).unwrap_or(0.0),
        _ => 0.0,
    };
    StressFeatures {
        word_overlap,
        length_tokens: tokens.len(),
        is_question,
        has_digit: utterance.chars().any(|c| c.is_ascii_digit()),
        negation_count: negation_count(utterance),
        frequent_start,
        label_cosine,
    }
}

/// Features for each prediction against its gold intent's label, with
/// start counts taken over the predicted utterances themselves.
pub fn features_for_predictions(
    records: &[PredictionRecord],
    utterance_text: impl Fn(&str) -> Result<String>,
    intent_label: impl Fn(&str) -> Result<String>,
    embedding: &EmbeddingConfig,
) -> Result<Vec<StressFeatures>> {
    let texts = records
        .iter()
        .map(|r| utterance_text(&r.utterance_id))
        .collect::<Result<Vec<_>>>()?;
    let counts = start_trigram_counts(&texts);
    records
        .iter()
        .zip(&texts)
        .map(|(r, text)| Ok(stress_features(text, &intent_label(&r.gold)?, &counts, embedding)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanFactor {
    pub factor: String,
    pub with_count: usize,
    pub with_accuracy: Option<f64>,
    pub without_count: usize,
    pub without_accuracy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericFactor {
    pub factor: String,
    pub correct_mean: Option<f64>,
    pub incorrect_mean: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressReport {
    pub total: usize,
    pub accuracy: f64,
    pub boolean: Vec<BooleanFactor>,
    pub numeric: Vec<NumericFactor>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

type BoolProbe = fn(&StressFeatures) -> bool;
type NumProbe = fn(&StressFeatures) -> f64;

pub fn stress_report(records: &[PredictionRecord], features: &[StressFeatures]) -> Result<StressReport> {
    if records.len() != features.len() {
        return Err(Error::LengthMismatch {
            gold: records.len(),
            pred: features.len(),
        });
    }
    if records.is_empty() {
        return Err(Error::Empty("predictions"));
    }
    let correct: Vec<bool> = records.iter().map(|r| r.gold == r.pred).collect();
    let bools: [(&str, BoolProbe); 5] = [
        ("question", |f| f.is_question),
        ("digit", |f| f.has_digit),
        ("negation", |f| f.negation_count > 0),
        ("frequent_start", |f| f.frequent_start),
        ("word_overlap", |f| f.word_overlap > 0),
    ];
    let boolean = bools
        .iter()
        .map(|(name, test)| {
            let bucket = |want: bool| {
                let hits: Vec<bool> = features
                    .iter()
                    .zip(&correct)
                    .filter(|(f, _)| test(f) == want)
                    .map(|(_, &c)| c)
                    .collect();
                (hits.len(), mean(hits.iter().map(|&c| c as u8 as f64)))
            };
            let (with_count, with_accuracy) = bucket(true);
            let (without_count, without_accuracy) = bucket(false);
            BooleanFactor {
                factor: name.to_string(),
                with_count,
                with_accuracy,
                without_count,
                without_accuracy,
            }
        })
        .collect();
    let nums: [(&str, NumProbe); 4] = [
        ("word_overlap", |f| f.word_overlap as f64),
        ("length_tokens", |f| f.length_tokens as f64),
        ("negation_count", |f| f.negation_count as f64),
        ("label_cosine", |f| f.label_cosine),
    ];
    let numeric = nums
        .iter()
        .map(|(name, value)| {
            let by = |want: bool| {
                mean(
                    features
                        .iter()
                        .zip(&correct)
                        .filter(|(_, &c)| c == want)
                        .map(|(f, _)| value(f)),
                )
            };
            NumericFactor {
                factor: name.to_string(),
                correct_mean: by(true),
                incorrect_mean: by(false),
            }
        })
        .collect();
    Ok(StressReport {
        total: records.len(),
        accuracy: correct.iter().filter(|&&c| c).count() as f64 / records.len() as f64,
        boolean,
        numeric,
    })
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.3}"))
}

impl StressReport {
    pub fn to_markdown(&self) -> String {
        let mut out = format!("Accuracy {:.3} over {} utterances\n\n", self.accuracy, self.total);
        out.push_str("| Factor | With (n) | Acc with | Without (n) | Acc without |\n|---|---|---|---|---|\n");
        for b in &self.boolean {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                b.factor,
                b.with_count,
                cell(b.with_accuracy),
                b.without_count,
                cell(b.without_accuracy)
            ));
        }
        out.push_str("\n| Factor | Mean if correct | Mean if incorrect |\n|---|---|---|\n");
        for n in &self.numeric {
            out.push_str(&format!(
                "| {} | {} | {} |\n",
                n.factor,
                cell(n.correct_mean),
                cell(n.incorrect_mean)
            ));
        }
        out
    }
}
