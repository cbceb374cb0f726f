//! Interpolated add-k n-gram language model and acceptability measures.
//!
//! The unigram level is plain add-k over the vocabulary (training words,
//! `</s>` and `<unk>`). Each higher level spreads its `k·|V|` pseudo-counts
//! according to the next lower level:
//!
//! ```text
//! P(w | h) = (c(h, w) + k·|V|·P(w | h')) / (c(h) + k·|V|)
//! ```
//!
//! where `h'` drops the oldest word of `h`. Every conditional distribution
//! sums to one, and contexts never seen in training fall back to `h'`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicalize::{lexicalize, LexicalizeOptions, TemplateSet};

/// Lowercased words; `_` and `'` stay inside tokens, so machine labels
/// such as `book_hotel` are single words.
pub fn lm_tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\''))
        .map(|t| t.trim_matches('\''))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NgramLm {
    pub order: usize,
    pub k: f64,
    vocab: BTreeSet<String>,
    /// `counts[n][context]` maps the next word to its count, for context
    /// length `n`.
    counts: Vec<BTreeMap<Vec<String>, BTreeMap<String, u64>>>,
    totals: Vec<BTreeMap<Vec<String>, u64>>,
    unigram_logprobs: BTreeMap<String, f64>,
}

impl NgramLm {
    /// Trains on tokenized sentences; `<s>` padding and `</s>` are added.
    pub fn train<S: AsRef<str>>(sentences: &[S], order: usize, k: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("n-gram order must be at least 1".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument("add-k constant must be positive".into()));
        }
        let tokenized: Vec<Vec<String>> = sentences
            .iter()
            .map(|s| lm_tokenize(s.as_ref()))
            .filter(|t| !t.is_empty())
            .collect();
        if tokenized.is_empty() {
            return Err(Error::Empty("language model corpus"));
        }
        let mut vocab: BTreeSet<String> = tokenized.iter().flatten().cloned().collect();
        vocab.insert(EOS.to_string());
        vocab.insert(UNK.to_string());

        let mut counts = vec![BTreeMap::new(); order];
        let mut totals = vec![BTreeMap::new(); order];
        for sentence in &tokenized {
            let padded = pad(sentence, order);
            for i in order - 1..padded.len() {
                let word = &padded[i];
                for n in 0..order {
                    let context = padded[i - n..i].to_vec();
                    *counts[n]
                        .entry(context.clone())
                        .or_insert_with(BTreeMap::new)
                        .entry(word.clone())
                        .or_insert(0) += 1;
                    *totals[n].entry(context).or_insert(0) += 1;
                }
            }
        }
        let mut lm = NgramLm {
            order,
            k,
            vocab,
            counts,
            totals,
            unigram_logprobs: BTreeMap::new(),
        };
        lm.unigram_logprobs = lm.vocab.iter().map(|w| (w.clone(), lm.prob(w, &[]).ln())).collect();
        Ok(lm)
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    /// Observed contexts of each length, for normalization checks.
    pub fn contexts(&self) -> impl Iterator<Item = &Vec<String>> {
        self.totals.iter().flat_map(|m| m.keys())
    }

    fn map_word<'a>(&self, word: &'a str) -> &'a str {
        if self.vocab.contains(word) {
            word
        } else {
            UNK
        }
    }

    /// `P(word | context)`; only the last `order − 1` context words matter.
    pub fn prob(&self, word: &str, context: &[String]) -> f64 {
        let word = self.map_word(word);
        let v = self.vocab.len() as f64;
        let n = context.len().min(self.order - 1);
        let context = &context[context.len() - n..];
        let mut p = (self.count(0, &[], word) + self.k) / (self.total(0, &[]) + self.k * v);
        for len in 1..=n {
            let h = &context[context.len() - len..];
            p = (self.count(len, h, word) + self.k * v * p) / (self.total(len, h) + self.k * v);
        }
        p
    }

    fn count(&self, n: usize, context: &[String], word: &str) -> f64 {
        self.counts[n]
            .get(context)
            .and_then(|m| m.get(word))
            .copied()
            .unwrap_or(0) as f64
    }

    fn total(&self, n: usize, context: &[String]) -> f64 {
        self.totals[n].get(context).copied().unwrap_or(0) as f64
    }

    pub fn unigram_logprob(&self, word: &str) -> f64 {
        self.unigram_logprobs[self.map_word(word)]
    }

    /// Natural-log probability of a sentence including the end marker.
    pub fn sentence_logprob(&self, sentence: &str) -> f64 {
        self.score(sentence).lp
    }

    /// LP, unigram LP and token count (markers excluded from the count).
    pub fn score(&self, sentence: &str) -> SentenceScore {
        let tokens = lm_tokenize(sentence);
        let padded = pad(&tokens, self.order);
        let mut lp = 0.0;
        let mut unigram_lp = 0.0;
        for i in self.order - 1..padded.len() {
            let context = &padded[i + 1 - self.order..i];
            lp += self.prob(&padded[i], context).ln();
            unigram_lp += self.unigram_logprob(&padded[i]);
        }
        SentenceScore {
            lp,
            unigram_lp,
            length: tokens.len(),
        }
    }
}

fn pad(tokens: &[String], order: usize) -> Vec<String> {
    let mut padded = vec![BOS.to_string(); order - 1];
    padded.extend(tokens.iter().cloned());
    padded.push(EOS.to_string());
    padded
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SentenceScore {
    pub lp: f64,
    pub unigram_lp: f64,
    pub length: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Acceptability {
    pub lp: f64,
    pub lp_mean: f64,
    pub lp_pen: f64,
    pub lp_norm: f64,
    pub slor: f64,
}

/// LP, LP/|s|, LP/((5+|s|)/6)^0.8, −LP/LP_u and (LP − LP_u)/|s|.
pub fn acceptability(lp: f64, unigram_lp: f64, length: usize) -> Result<Acceptability> {
    if length == 0 {
        return Err(Error::InvalidArgument("sentence length must be at least 1".into()));
    }
    if unigram_lp >= 0.0 {
        return Err(Error::InvalidArgument(
            "unigram log probability must be negative".into(),
        ));
    }
    let len = length as f64;
    Ok(Acceptability {
        lp,
        lp_mean: lp / len,
        lp_pen: lp / ((5.0 + len) / 6.0).powf(0.8),
        lp_norm: -lp / unigram_lp,
        slor: (lp - unigram_lp) / len,
    })
}

pub fn sentence_acceptability(lm: &NgramLm, sentence: &str) -> Result<Acceptability> {
    let s = lm.score(sentence);
    acceptability(s.lp, s.unigram_lp, s.length)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptabilityRow {
    pub variant: String,
    pub scores: Acceptability,
}

/// Averages of the five measures for raw labels and for each template.
pub fn acceptability_compare<S: AsRef<str>>(
    labels: &[S],
    templates: &TemplateSet,
    lm: &NgramLm,
    options: &LexicalizeOptions,
) -> Result<Vec<AcceptabilityRow>> {
    if labels.is_empty() {
        return Err(Error::Empty("intent labels"));
    }
    let average = |variant: &str, sentences: Vec<String>| -> Result<AcceptabilityRow> {
        let all = sentences
            .iter()
            .map(|s| sentence_acceptability(lm, s))
            .collect::<Result<Vec<_>>>()?;
        let n = all.len() as f64;
        let mean = |f: fn(&Acceptability) -> f64| all.iter().map(f).sum::<f64>() / n;
        Ok(AcceptabilityRow {
            variant: variant.to_string(),
            scores: Acceptability {
                lp: mean(|a| a.lp),
                lp_mean: mean(|a| a.lp_mean),
                lp_pen: mean(|a| a.lp_pen),
                lp_norm: mean(|a| a.lp_norm),
                slor: mean(|a| a.slor),
            },
        })
    };
    let mut rows = vec![average(
        "labels",
        labels.iter().map(|l| l.as_ref().to_string()).collect(),
    )?];
    for t in templates.iter() {
        let sentences = labels
            .iter()
            .map(|l| lexicalize(l.as_ref(), t, options))
            .collect::<Result<_>>()?;
        rows.push(average(&t.id, sentences)?);
    }
    Ok(rows)
}

pub fn acceptability_markdown(rows: &[AcceptabilityRow]) -> String {
    let mut out = String::from("| ID | LP | LP_mean | LP_pen | LP_norm | SLOR |\n|---|---|---|---|---|---|\n");
    for r in rows {
        let s = &r.scores;
        out.push_str(&format!(
            "| {} | {:.2} | {:.2} | {:.2} | {:.2} | {:.2} |\n",
            r.variant, s.lp, s.lp_mean, s.lp_pen, s.lp_norm, s.slor
        ));
    }
    out
}
