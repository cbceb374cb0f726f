//! Adapter for pair scores computed outside this crate.
//!
//! Requests are written as JSONL `{"id", "intent_text", "utterance"}`; the
//! external model answers with `{"id", "p_positive"}` per request.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::PairScorer;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub id: String,
    pub intent_text: String,
    pub utterance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub id: String,
    pub p_positive: f64,
}

/// One request per (utterance, candidate intent), id `utterance::intent`.
pub fn build_requests<'a>(
    candidates: &BTreeMap<String, String>,
    utterances: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Vec<ScoreRequest> {
    let mut out = Vec::new();
    for (utt_id, text) in utterances {
        for (intent_id, intent_text) in candidates {
            out.push(ScoreRequest {
                id: format!("{utt_id}::{intent_id}"),
                intent_text: intent_text.clone(),
                utterance: text.to_string(),
            });
        }
    }
    out
}

/// Scores looked up from validated responses.
#[derive(Clone, Debug, Default)]
pub struct ExternalScorer {
    scores: BTreeMap<(String, String), f64>,
}

impl ExternalScorer {
    /// Every request needs exactly one response with `0 < p < 1`.
    pub fn from_responses(requests: &[ScoreRequest], responses: &[ScoreResponse]) -> Result<Self> {
        let by_id: BTreeMap<&str, &ScoreRequest> = requests.iter().map(|r| (r.id.as_str(), r)).collect();
        let mut answered = BTreeSet::new();
        let mut scores = BTreeMap::new();
        for resp in responses {
            let Some(req) = by_id.get(resp.id.as_str()) else {
                return Err(Error::Protocol(format!("response for unknown id `{}`", resp.id)));
            };
            if !answered.insert(resp.id.as_str()) {
                return Err(Error::Protocol(format!("duplicate response for id `{}`", resp.id)));
            }
            if !(resp.p_positive > 0.0 && resp.p_positive < 1.0) {
                return Err(Error::Protocol(format!(
                    "id `{}`: p_positive {} outside (0, 1)",
                    resp.id, resp.p_positive
                )));
            }
            scores
                .entry((req.intent_text.clone(), req.utterance.clone()))
                .or_insert(resp.p_positive);
        }
        if let Some(missing) = requests.iter().find(|r| !answered.contains(r.id.as_str())) {
            return Err(Error::Protocol(format!("missing response for id `{}`", missing.id)));
        }
        Ok(ExternalScorer { scores })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

impl PairScorer for ExternalScorer {
    fn score(&self, intent_text: &str, utterance: &str) -> Result<f64> {
        self.scores
            .get(&(intent_text.to_string(), utterance.to_string()))
            .copied()
            .ok_or_else(|| Error::Protocol(format!("no external score for ({intent_text:?}, {utterance:?})")))
    }
}
