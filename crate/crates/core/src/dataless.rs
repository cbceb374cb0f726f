//! Training without annotated utterances.
//!
//! Seen intent labels are lexicalized with every template, then rewritten
//! by rule-based paraphrase families. The merged, deduplicated sentences
//! stand in for real training utterances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, GzslSplit, Intent, Utterance};
use crate::error::{Error, Result};
use crate::lexicalize::{lexicalize, LexicalizeOptions, TemplateSet};
use crate::rng;

pub const DEFAULT_PER_INTENT: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleFamily {
    /// Swaps the template prefix, including first-person rewrites.
    Prefix,
    /// Substitutes words from a small thesaurus.
    Synonym,
    /// Turns statements into questions and back.
    Form,
}

impl RuleFamily {
    pub const ALL: [RuleFamily; 3] = [RuleFamily::Prefix, RuleFamily::Synonym, RuleFamily::Form];

    pub fn name(self) -> &'static str {
        match self {
            RuleFamily::Prefix => "prefix",
            RuleFamily::Synonym => "synonym",
            RuleFamily::Form => "form",
        }
    }
}

impl std::str::FromStr for RuleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Form {
    Statement,
    Question,
    Request,
}

const PREFIXES: [(&str, Form); 11] = [
    ("the user would like to", Form::Statement),
    ("the user wants to", Form::Statement),
    ("the user needs to", Form::Statement),
    ("i would like to", Form::Statement),
    ("i want to", Form::Statement),
    ("i need to", Form::Statement),
    ("does the user want to", Form::Question),
    ("can the user", Form::Question),
    ("can i", Form::Question),
    ("tell the user how to", Form::Request),
    ("how do i", Form::Question),
];

const STATEMENT_PREFIXES: [&str; 5] = [
    "the user wants to",
    "the user would like to",
    "i want to",
    "i would like to",
    "i need to",
];

const THESAURUS: [(&str, &[&str]); 24] = [
    ("add", &["put"]),
    ("book", &["reserve"]),
    ("buy", &["purchase"]),
    ("cancel", &["call off", "stop"]),
    ("change", &["modify", "update"]),
    ("check", &["verify", "look up"]),
    ("create", &["make"]),
    ("delete", &["remove"]),
    ("find", &["search for", "look for"]),
    ("flight", &["plane"]),
    ("get", &["obtain", "receive"]),
    ("hotel", &["room"]),
    ("know", &["learn"]),
    ("make", &["create"]),
    ("movie", &["film"]),
    ("order", &["request"]),
    ("play", &["put on", "start"]),
    ("remove", &["delete"]),
    ("reset", &["restore"]),
    ("restaurant", &["diner"]),
    ("set", &["configure"]),
    ("show", &["display"]),
    ("song", &["track"]),
    ("tell", &["explain"]),
];

fn split_prefix(sentence: &str) -> Option<(Form, &str)> {
    PREFIXES.iter().find_map(|&(p, form)| {
        sentence
            .strip_prefix(p)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(|rest| (form, rest))
    })
}

fn normalize(sentence: &str) -> String {
    sentence
        .trim()
        .trim_end_matches(['?', '.', '!'])
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

fn rewrite(sentence: &str, family: RuleFamily) -> Vec<String> {
    match family {
        RuleFamily::Prefix => match split_prefix(sentence) {
            Some((Form::Statement | Form::Request, rest)) => {
                STATEMENT_PREFIXES.iter().map(|p| format!("{p} {rest}")).collect()
            }
            _ => Vec::new(),
        },
        RuleFamily::Form => match split_prefix(sentence) {
            Some((Form::Statement, rest)) => vec![
                format!("does the user want to {rest}"),
                format!("can the user {rest}"),
                format!("can i {rest}"),
                format!("how do i {rest}"),
            ],
            Some((Form::Question | Form::Request, rest)) => {
                vec![format!("the user wants to {rest}"), format!("i want to {rest}")]
            }
            None => Vec::new(),
        },
        RuleFamily::Synonym => {
            let words: Vec<&str> = sentence.split(' ').collect();
            let mut out = Vec::new();
            for (i, w) in words.iter().enumerate() {
                let Some((_, subs)) = THESAURUS.iter().find(|(k, _)| k == w) else {
                    continue;
                };
                for sub in *subs {
                    let mut v = words.clone();
                    v[i] = sub;
                    out.push(v.join(" "));
                }
            }
            out
        }
    }
}

/// Variants of `sentence` under one family. The normalized input always
/// comes first; the rest follow in a seed-dependent order.
pub fn paraphrase(sentence: &str, family: RuleFamily, seed: u64) -> Result<Vec<String>> {
    let base = normalize(sentence);
    if base.is_empty() {
        return Err(Error::EmptyText);
    }
    let mut seen = BTreeSet::from([base.clone()]);
    let mut variants: Vec<String> = rewrite(&base, family)
        .into_iter()
        .filter(|v| seen.insert(v.clone()))
        .collect();
    variants.shuffle(&mut rng::stream(seed, &format!("dataless.{}", family.name())));
    variants.insert(0, base);
    Ok(variants)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticUtterance {
    pub text: String,
    #[serde(rename = "intent")]
    pub source_intent_id: String,
    #[serde(rename = "generator")]
    pub generator_id: String,
    pub seed: u64,
}

/// Lexicalizes each seen intent with every template, paraphrases with every
/// family, deduplicates and keeps at most `n_per_intent` per intent.
pub fn build_synthetic_trainset(
    seen: &[&Intent],
    templates: &TemplateSet,
    families: &[RuleFamily],
    n_per_intent: usize,
    seed: u64,
) -> Result<Vec<SyntheticUtterance>> {
    if seen.is_empty() {
        return Err(Error::Empty("seen intents"));
    }
    if families.is_empty() {
        return Err(Error::Empty("paraphrase families"));
    }
    if n_per_intent == 0 {
        return Err(Error::InvalidArgument("n_per_intent must be at least 1".into()));
    }
    let options = LexicalizeOptions::default();
    let mut out = Vec::new();
    for intent in seen {
        let mut texts = BTreeSet::new();
        let mut pool = Vec::new();
        for template in templates.iter() {
            let sentence = lexicalize(&intent.label, template, &options)?;
            for &family in families {
                for text in paraphrase(&sentence, family, seed)? {
                    if texts.insert(text.clone()) {
                        pool.push((text, family));
                    }
                }
            }
        }
        pool.shuffle(&mut rng::stream(seed, &format!("dataless.cap.{}", intent.id)));
        pool.truncate(n_per_intent);
        out.extend(pool.into_iter().map(|(text, family)| SyntheticUtterance {
            text,
            source_intent_id: intent.id.clone(),
            generator_id: family.name().to_string(),
            seed,
        }));
    }
    Ok(out)
}

/// Replaces the training side of `split` with synthetic utterances. The
/// returned dataset holds the real test utterances plus the synthetic ones
/// under ids `synthetic-{n}`.
pub fn dataless_dataset(
    dataset: &Dataset,
    split: &GzslSplit,
    synthetic: &[SyntheticUtterance],
) -> Result<(Dataset, GzslSplit)> {
    let width = synthetic.len().to_string().len();
    let mut utterances: Vec<Utterance> = Vec::new();
    let mut train = BTreeSet::new();
    for (i, s) in synthetic.iter().enumerate() {
        if !split.seen.contains(&s.source_intent_id) {
            return Err(Error::InvalidSplit(format!(
                "synthetic utterance sourced from non-seen intent `{}`",
                s.source_intent_id
            )));
        }
        let id = format!("synthetic-{i:0width$}");
        train.insert(id.clone());
        utterances.push(Utterance::new(id, s.text.clone(), s.source_intent_id.clone()));
    }
    for id in &split.test {
        utterances.push(dataset.utterance(id)?.clone());
    }
    let ds = Dataset::new(
        dataset.intents().to_vec(),
        utterances,
        format!("dataless:{}", dataset.provenance()),
    )?;
    let new_split = GzslSplit { train, ..split.clone() };
    new_split.validate(&ds)?;
    Ok((ds, new_split))
}

/// Seen intents of `split` in id order.
pub fn seen_intents<'a>(dataset: &'a Dataset, split: &GzslSplit) -> Result<Vec<&'a Intent>> {
    split.seen.iter().map(|id| dataset.intent(id)).collect()
}

/// Per-intent counts of a synthetic set.
pub fn counts_by_intent(synthetic: &[SyntheticUtterance]) -> BTreeMap<&str, usize> {
    let mut counts = BTreeMap::new();
    for s in synthetic {
        *counts.entry(s.source_intent_id.as_str()).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn intents() -> Vec<Intent> {
        vec![
            Intent::new("alarm", "get_alarms"),
            Intent::new("hotel", "book_hotel"),
            Intent::new("song", "play_song"),
        ]
    }

    #[test]
    fn prefix_family_rewrites_to_first_person() {
        let v = paraphrase("the user wants to get alarms", RuleFamily::Prefix, 1).unwrap();
        assert_eq!(v[0], "the user wants to get alarms");
        assert!(v.contains(&"i want to get alarms".to_string()));
        assert!(v.contains(&"i would like to get alarms".to_string()));
    }

    #[test]
    fn identity_always_first() {
        for family in RuleFamily::ALL {
            for s in [
                "tell the user how to get alarms",
                "hello there",
                "can the user book a hotel",
            ] {
                assert_eq!(paraphrase(s, family, 3).unwrap()[0], s);
            }
        }
        assert!(paraphrase("  ", RuleFamily::Form, 0).is_err());
    }

    #[test]
    fn form_and_synonym_families() {
        let q = paraphrase("does the user want to book a hotel", RuleFamily::Form, 0).unwrap();
        assert!(q.contains(&"the user wants to book a hotel".to_string()));
        let s = paraphrase("the user wants to book a hotel", RuleFamily::Synonym, 0).unwrap();
        assert!(s.contains(&"the user wants to reserve a hotel".to_string()));
        assert!(s.contains(&"the user wants to book a room".to_string()));
    }

    #[test]
    fn seeded_output_is_stable() {
        let a = paraphrase("the user wants to play a song", RuleFamily::Synonym, 9).unwrap();
        assert_eq!(
            a,
            paraphrase("the user wants to play a song", RuleFamily::Synonym, 9).unwrap()
        );
        assert!("rewrite".parse::<RuleFamily>().is_err());
        assert_eq!("form".parse::<RuleFamily>().unwrap(), RuleFamily::Form);
    }

    #[test]
    fn trainset_is_capped_and_deduplicated() {
        let all = intents();
        let seen: Vec<&Intent> = all[..2].iter().collect();
        let templates = TemplateSet::builtin();
        let one = build_synthetic_trainset(&seen, &templates, &RuleFamily::ALL, 1, 5).unwrap();
        assert_eq!(one.len(), seen.len());
        let many = build_synthetic_trainset(&seen, &templates, &RuleFamily::ALL, 25, 5).unwrap();
        assert!(many.iter().all(|s| s.source_intent_id != "song"));
        assert!(counts_by_intent(&many).values().all(|&c| c <= 25 && c > 5));
        let pairs: BTreeSet<(&str, &str)> = many
            .iter()
            .map(|s| (s.text.as_str(), s.source_intent_id.as_str()))
            .collect();
        assert_eq!(pairs.len(), many.len());
        assert_eq!(
            many,
            build_synthetic_trainset(&seen, &templates, &RuleFamily::ALL, 25, 5).unwrap()
        );
    }

    #[test]
    fn dump_field_names() {
        let s = SyntheticUtterance {
            text: "i want to get alarms".into(),
            source_intent_id: "alarm".into(),
            generator_id: "prefix".into(),
            seed: 11,
        };
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"text":"i want to get alarms","intent":"alarm","generator":"prefix","seed":11}"#
        );
    }

    #[test]
    fn dataless_split_uses_only_synthetic_training_text() {
        let ds = Dataset::new(
            intents(),
            vec![
                Utterance::new("u1", "wake me up alarms", "alarm"),
                Utterance::new("u2", "a room please", "hotel"),
                Utterance::new("u3", "some music", "song"),
            ],
            "t",
        )
        .unwrap();
        let split = GzslSplit {
            seen: ["alarm", "hotel"].iter().map(|s| s.to_string()).collect(),
            unseen: ["song".to_string()].into(),
            train: ["u1".to_string()].into(),
            test: ["u2", "u3"].iter().map(|s| s.to_string()).collect(),
            seed: 0,
        };
        let seen = seen_intents(&ds, &split).unwrap();
        let syn = build_synthetic_trainset(&seen, &TemplateSet::builtin(), &RuleFamily::ALL, 4, 0).unwrap();
        let (dds, dsplit) = dataless_dataset(&ds, &split, &syn).unwrap();
        assert_eq!(dsplit.test, split.test);
        let synthetic_texts: BTreeSet<&str> = syn.iter().map(|s| s.text.as_str()).collect();
        for id in &dsplit.train {
            assert!(synthetic_texts.contains(dds.utterance(id).unwrap().text.as_str()));
        }
        assert!(dds.utterance("u1").is_err());
    }
}
