//! Most frequent misclassification pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stress::stemmed_label_tokens;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionPair {
    pub gold: String,
    pub pred: String,
    pub count: usize,
    pub shares_word: bool,
}

/// True when the two labels have a stemmed token in common.
pub fn shares_word(a: &str, b: &str) -> bool {
    let left = stemmed_label_tokens(a);
    stemmed_label_tokens(b).iter().any(|t| left.contains(t))
}

/// Error pairs by descending count, ties by (gold, pred). `labels` maps
/// intent ids to labels; ids missing from it are compared as-is.
pub fn confusion_pairs<S: AsRef<str>>(
    gold: &[S],
    pred: &[S],
    labels: &BTreeMap<String, String>,
    top_k: usize,
) -> Result<Vec<ConfusionPair>> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        if g.as_ref() != p.as_ref() {
            *counts.entry((g.as_ref(), p.as_ref())).or_insert(0) += 1;
        }
    }
    let mut pairs: Vec<ConfusionPair> = counts
        .into_iter()
        .map(|((g, p), count)| {
            let label = |id: &str| labels.get(id).cloned().unwrap_or_else(|| id.to_string());
            ConfusionPair {
                gold: g.to_string(),
                pred: p.to_string(),
                count,
                shares_word: shares_word(&label(g), &label(p)),
            }
        })
        .collect();
    pairs.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then_with(|| (&a.gold, &a.pred).cmp(&(&b.gold, &b.pred)))
    });
    pairs.truncate(top_k);
    Ok(pairs)
}

pub fn confusion_markdown(pairs: &[ConfusionPair]) -> String {
    let mut out = String::from("| Gold | Predicted | Count | Shares word |\n|---|---|---|---|\n");
    for p in pairs {
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            p.gold,
            p.pred,
            p.count,
            if p.shares_word { "yes" } else { "no" }
        ));
    }
    out
}
