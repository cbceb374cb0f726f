//! Dataset model, dialogue ingestion and seen/unseen splits.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::jsonl;
use crate::rng;

/// An intent class. `label` is the machine label, e.g. `book_hotel`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intent {
    pub id: String,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

impl Intent {
    pub fn new(id: impl Into<String>, label: impl Into<String>) -> Self {
        Intent {
            id: id.into(),
            label: label.into(),
            description: None,
            domain: None,
        }
    }
}

/// One user utterance with its gold intent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub id: String,
    pub text: String,
    #[serde(rename = "intent")]
    pub intent_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dialogue_id: Option<String>,
    #[serde(default, rename = "turn", skip_serializing_if = "Option::is_none")]
    pub turn_index: Option<u32>,
}

impl Utterance {
    pub fn new(id: impl Into<String>, text: impl Into<String>, intent_id: impl Into<String>) -> Self {
        Utterance {
            id: id.into(),
            text: text.into(),
            intent_id: intent_id.into(),
            dialogue_id: None,
            turn_index: None,
        }
    }
}

/// Intent inventory plus utterances. Construction validates references.
#[derive(Clone, Debug)]
pub struct Dataset {
    intents: Vec<Intent>,
    utterances: Vec<Utterance>,
    provenance: String,
    intent_index: BTreeMap<String, usize>,
    utterance_index: BTreeMap<String, usize>,
}

impl Dataset {
    pub fn new(intents: Vec<Intent>, utterances: Vec<Utterance>, provenance: impl Into<String>) -> Result<Self> {
        let mut intent_index = BTreeMap::new();
        for (i, intent) in intents.iter().enumerate() {
            if intent.label.trim().is_empty() {
                return Err(Error::InvalidDataset(format!(
                    "intent `{}` has an empty label",
                    intent.id
                )));
            }
            if intent_index.insert(intent.id.clone(), i).is_some() {
                return Err(Error::InvalidDataset(format!("duplicate intent id `{}`", intent.id)));
            }
        }
        let mut utterance_index = BTreeMap::new();
        for (i, utt) in utterances.iter().enumerate() {
            if utt.text.trim().is_empty() {
                return Err(Error::InvalidDataset(format!("utterance `{}` has empty text", utt.id)));
            }
            if !intent_index.contains_key(&utt.intent_id) {
                return Err(Error::InvalidDataset(format!(
                    "utterance `{}` references unknown intent `{}`",
                    utt.id, utt.intent_id
                )));
            }
            if utterance_index.insert(utt.id.clone(), i).is_some() {
                return Err(Error::InvalidDataset(format!("duplicate utterance id `{}`", utt.id)));
            }
        }
        Ok(Dataset {
            intents,
            utterances,
            provenance: provenance.into(),
            intent_index,
            utterance_index,
        })
    }

    /// Loads the canonical pair of JSONL files.
    pub fn load(intents: impl AsRef<Path>, utterances: impl AsRef<Path>) -> Result<Self> {
        let provenance = utterances.as_ref().display().to_string();
        Dataset::new(jsonl::read(intents)?, jsonl::read(utterances)?, provenance)
    }

    /// Writes `intents.jsonl` and `utterances.jsonl` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        jsonl::write(dir.join("intents.jsonl"), &self.intents)?;
        jsonl::write(dir.join("utterances.jsonl"), &self.utterances)
    }

    pub fn intents(&self) -> &[Intent] {
        &self.intents
    }

    pub fn utterances(&self) -> &[Utterance] {
        &self.utterances
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn intent(&self, id: &str) -> Result<&Intent> {
        self.intent_index
            .get(id)
            .map(|&i| &self.intents[i])
            .ok_or_else(|| Error::UnknownIntent(id.to_string()))
    }

    pub fn utterance(&self, id: &str) -> Result<&Utterance> {
        self.utterance_index
            .get(id)
            .map(|&i| &self.utterances[i])
            .ok_or_else(|| Error::UnknownUtterance(id.to_string()))
    }

    /// Intent ids in lexicographic order.
    pub fn intent_ids(&self) -> impl Iterator<Item = &str> {
        self.intent_index.keys().map(String::as_str)
    }

    /// Utterance ids grouped by gold intent, both levels sorted.
    pub fn utterances_by_intent(&self) -> BTreeMap<String, Vec<String>> {
        let mut groups: BTreeMap<String, Vec<String>> =
            self.intent_index.keys().map(|k| (k.clone(), Vec::new())).collect();
        for utt in &self.utterances {
            groups.get_mut(&utt.intent_id).expect("validated").push(utt.id.clone());
        }
        for ids in groups.values_mut() {
            ids.sort();
        }
        groups
    }

    /// Keeps utterances for which `keep` holds; the intent inventory is unchanged.
    pub fn retain_utterances(&self, keep: impl Fn(&Utterance) -> bool) -> Dataset {
        let utterances = self.utterances.iter().filter(|u| keep(u)).cloned().collect();
        Dataset::new(self.intents.clone(), utterances, self.provenance.clone()).expect("subset of a valid dataset")
    }
}

/// A user turn as seen by the ingestion rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DialogueTurn {
    pub text: String,
    #[serde(default)]
    pub intent: Option<String>,
}

/// Ordered user turns of one dialogue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dialogue {
    pub id: String,
    pub turns: Vec<DialogueTurn>,
}

/// Keeps the user turns that open a dialogue or switch to a new intent.
///
/// A turn is kept when it is the first user turn, or when its intent differs
/// from the intent of the last kept turn. Intents are created from the tags
/// unless an inventory is supplied, in which case every tag must resolve.
pub fn normalize_dialogue_corpus(
    dialogues: &[Dialogue],
    inventory: Option<Vec<Intent>>,
    provenance: &str,
) -> Result<Dataset> {
    let mut utterances = Vec::new();
    let mut tags = BTreeSet::new();
    for dialogue in dialogues {
        let mut previous: Option<&str> = None;
        for (turn, t) in dialogue.turns.iter().enumerate() {
            let intent = t
                .intent
                .as_deref()
                .filter(|s| !s.trim().is_empty())
                .ok_or_else(|| Error::Ingest {
                    dialogue: dialogue.id.clone(),
                    turn,
                    message: "missing active intent".into(),
                })?;
            if t.text.trim().is_empty() {
                return Err(Error::Ingest {
                    dialogue: dialogue.id.clone(),
                    turn,
                    message: "empty text".into(),
                });
            }
            if previous == Some(intent) {
                continue;
            }
            previous = Some(intent);
            tags.insert(intent.to_string());
            utterances.push(Utterance {
                id: format!("{}#{}", dialogue.id, turn),
                text: t.text.trim().to_string(),
                intent_id: intent.to_string(),
                dialogue_id: Some(dialogue.id.clone()),
                turn_index: Some(turn as u32),
            });
        }
    }
    let intents = match inventory {
        Some(intents) => {
            let known: BTreeSet<&str> = intents.iter().map(|i| i.id.as_str()).collect();
            if let Some(missing) = tags.iter().find(|t| !known.contains(t.as_str())) {
                return Err(Error::UnknownIntent(missing.clone()));
            }
            intents
        }
        None => tags.into_iter().map(|t| Intent::new(t.clone(), t)).collect(),
    };
    Dataset::new(intents, utterances, provenance)
}

/// Reads schema-guided dialogue files (SGD and MultiWoZ 2.2 share the layout).
///
/// Only user turns are returned. A turn whose frames all carry the `NONE`
/// intent expresses no intent and is skipped; a user turn without any
/// frame state keeps `intent: None` and is rejected during normalization.
pub fn parse_schema_guided(doc: &Value) -> Result<Vec<Dialogue>> {
    let dialogues = doc
        .as_array()
        .ok_or_else(|| Error::InvalidArgument("expected a JSON array of dialogues".into()))?;
    let mut out = Vec::with_capacity(dialogues.len());
    for (d, dialogue) in dialogues.iter().enumerate() {
        let id = dialogue
            .get("dialogue_id")
            .and_then(Value::as_str)
            .map(str::to_string)
            .unwrap_or_else(|| format!("dialogue-{d}"));
        let empty = Vec::new();
        let turns = dialogue.get("turns").and_then(Value::as_array).unwrap_or(&empty);
        let mut user_turns = Vec::new();
        for turn in turns {
            if turn.get("speaker").and_then(Value::as_str) != Some("USER") {
                continue;
            }
            let text = turn.get("utterance").and_then(Value::as_str).unwrap_or("").to_string();
            let states: Vec<&str> = turn
                .get("frames")
                .and_then(Value::as_array)
                .map(|frames| {
                    frames
                        .iter()
                        .filter_map(|f| f.pointer("/state/active_intent").and_then(Value::as_str))
                        .collect()
                })
                .unwrap_or_default();
            let intent = states.iter().find(|s| **s != "NONE").map(|s| s.to_string());
            if intent.is_none() && !states.is_empty() {
                continue;
            }
            user_turns.push(DialogueTurn { text, intent });
        }
        out.push(Dialogue { id, turns: user_turns });
    }
    Ok(out)
}

/// Builds an intent inventory with descriptions from an SGD schema file.
pub fn parse_sgd_schema(doc: &Value) -> Result<Vec<Intent>> {
    let services = doc
        .as_array()
        .ok_or_else(|| Error::InvalidArgument("expected a JSON array of services".into()))?;
    let mut intents = Vec::new();
    for service in services {
        let domain = service.get("service_name").and_then(Value::as_str).map(str::to_string);
        for intent in service.get("intents").and_then(Value::as_array).into_iter().flatten() {
            let Some(name) = intent.get("name").and_then(Value::as_str) else {
                continue;
            };
            intents.push(Intent {
                id: name.to_string(),
                label: name.to_string(),
                description: intent.get("description").and_then(Value::as_str).map(str::to_string),
                domain: domain.clone(),
            });
        }
    }
    intents.sort_by(|a, b| a.id.cmp(&b.id));
    intents.dedup_by(|a, b| a.id == b.id);
    Ok(intents)
}

/// Acknowledgments and greetings dropped by [`filter_uninformative`].
pub fn default_stoplist() -> BTreeSet<String> {
    [
        "ok",
        "okay",
        "thanks",
        "thank you",
        "yes",
        "no",
        "hi",
        "hello",
        "bye",
        "goodbye",
        "great",
        "sure",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// Lowercases, deletes punctuation and collapses whitespace.
pub fn normalize_text(text: &str) -> String {
    let stripped: String = text
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .flat_map(char::to_lowercase)
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Removes stoplisted phrases and utterances shorter than `min_tokens`.
pub fn filter_uninformative(dataset: &Dataset, stoplist: &BTreeSet<String>, min_tokens: usize) -> Dataset {
    dataset.retain_utterances(|u| {
        let normalized = normalize_text(&u.text);
        !stoplist.contains(&normalized) && normalized.split_whitespace().count() >= min_tokens
    })
}

/// Seen/unseen intents plus the train/test utterance partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GzslSplit {
    pub seen: BTreeSet<String>,
    pub unseen: BTreeSet<String>,
    pub train: BTreeSet<String>,
    pub test: BTreeSet<String>,
    pub seed: u64,
}

impl GzslSplit {
    /// Checks disjointness and that gold intents fall where they must.
    pub fn validate(&self, dataset: &Dataset) -> Result<()> {
        if let Some(id) = self.seen.intersection(&self.unseen).next() {
            return Err(Error::InvalidSplit(format!("intent `{id}` is both seen and unseen")));
        }
        if let Some(id) = self.train.intersection(&self.test).next() {
            return Err(Error::InvalidSplit(format!("utterance `{id}` is in train and test")));
        }
        for id in self.seen.iter().chain(&self.unseen) {
            dataset.intent(id)?;
        }
        for id in &self.train {
            let utt = dataset.utterance(id)?;
            if !self.seen.contains(&utt.intent_id) {
                return Err(Error::InvalidSplit(format!(
                    "train utterance `{id}` has non-seen intent `{}`",
                    utt.intent_id
                )));
            }
        }
        for id in &self.test {
            let utt = dataset.utterance(id)?;
            if !self.is_candidate(&utt.intent_id) {
                return Err(Error::InvalidSplit(format!(
                    "test utterance `{id}` has intent `{}` outside seen and unseen",
                    utt.intent_id
                )));
            }
        }
        Ok(())
    }

    pub fn is_candidate(&self, intent: &str) -> bool {
        self.seen.contains(intent) || self.unseen.contains(intent)
    }

    /// Seen followed by unseen, each sorted.
    pub fn candidates(&self) -> BTreeSet<String> {
        self.seen.union(&self.unseen).cloned().collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        jsonl::read_json(path)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        jsonl::write_json(path, self)
    }
}

/// Samples `n_unseen` intents as unseen and partitions utterances.
///
/// Every utterance of an unseen intent goes to test. Seen-intent
/// utterances are split per intent, `train_fraction` of each going to train.
pub fn make_gzsl_split(dataset: &Dataset, n_unseen: usize, train_fraction: f64, seed: u64) -> Result<GzslSplit> {
    let n_intents = dataset.intents().len();
    if n_unseen == 0 || n_unseen >= n_intents {
        return Err(Error::InvalidArgument(format!(
            "n_unseen must be in 1..{n_intents}, got {n_unseen}"
        )));
    }
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train_fraction must be in (0, 1], got {train_fraction}"
        )));
    }
    let mut ids: Vec<String> = dataset.intent_ids().map(str::to_string).collect();
    ids.shuffle(&mut rng::stream(seed, "split.unseen"));
    let unseen: BTreeSet<String> = ids[..n_unseen].iter().cloned().collect();
    let seen: BTreeSet<String> = ids[n_unseen..].iter().cloned().collect();

    let groups = dataset.utterances_by_intent();
    let seen_groups: BTreeMap<String, Vec<String>> = groups
        .iter()
        .filter(|(k, _)| seen.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let train: BTreeSet<String> = stratified_sample(&seen_groups, train_fraction, seed)?
        .into_iter()
        .collect();
    let test = dataset
        .utterances()
        .iter()
        .map(|u| &u.id)
        .filter(|id| !train.contains(*id))
        .cloned()
        .collect();
    Ok(GzslSplit {
        seen,
        unseen,
        train,
        test,
        seed,
    })
}

/// Draws `round(fraction × support)` ids per group without replacement.
pub fn stratified_sample(groups: &BTreeMap<String, Vec<String>>, fraction: f64, seed: u64) -> Result<Vec<String>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fraction must be in (0, 1], got {fraction}"
        )));
    }
    let mut rng = rng::stream(seed, "split.stratified");
    let mut out = Vec::new();
    for ids in groups.values() {
        let take = rng::round_half_up(fraction * ids.len() as f64).min(ids.len());
        out.extend(ids.choose_multiple(&mut rng, take).cloned());
    }
    out.sort();
    Ok(out)
}
