//! Browser bindings: label lexicalization, zero-shot prediction with a model
//! trained on the bundled corpus, and sentence acceptability.

use std::collections::BTreeMap;

use serde_json::json;
use wasm_bindgen::prelude::*;

use gzsi::analysis::{sentence_acceptability, NgramLm};
use gzsi::corpus::{make_gzsl_split, Dataset};
use gzsi::gzsl::{train_gzsl, GzslModel, GzslOptions};
use gzsi::lexicalize::{lexicalize, LexicalizeOptions, TemplateSet};
use gzsi::synthetic;

const N_UNSEEN: usize = 5;
const TRAIN_FRACTION: f64 = 0.7;

fn to_js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn lexicalize_all(label: &str, capitalize: bool) -> gzsi::Result<String> {
    let templates = TemplateSet::builtin();
    let options = LexicalizeOptions {
        capitalize,
        question_mark: capitalize,
    };
    let mut out = BTreeMap::new();
    for t in templates.iter() {
        out.insert(t.id.clone(), lexicalize(label, t, &options)?);
    }
    Ok(serde_json::to_string(&out).expect("json"))
}

/// JSON object mapping each built-in template id to the lexicalized label.
#[wasm_bindgen(js_name = lexicalizeLabel)]
pub fn lexicalize_label(label: &str, capitalize: bool) -> Result<String, JsValue> {
    lexicalize_all(label, capitalize).map_err(to_js)
}

/// A model trained on the seen part of the bundled corpus, plus an LM over
/// the same utterances.
#[wasm_bindgen]
pub struct Demo {
    dataset: Dataset,
    model: GzslModel,
    lm: NgramLm,
}

impl Demo {
    pub fn build(seed: u64) -> gzsi::Result<Demo> {
        let dataset = synthetic::bundled();
        let split = make_gzsl_split(&dataset, N_UNSEEN, TRAIN_FRACTION, seed)?;
        let (model, _) = train_gzsl(&dataset, &split, &GzslOptions::default().with_seed(seed), "demo")?;
        let texts: Vec<&str> = dataset.utterances().iter().map(|u| u.text.as_str()).collect();
        let lm = NgramLm::train(&texts, 3, 0.1)?;
        Ok(Demo { dataset, model, lm })
    }

    pub fn predict_json(&self, utterance: &str) -> gzsi::Result<String> {
        let p = self.model.predict(utterance)?;
        let mut ranked: Vec<(&String, &f64)> = p.scores.iter().collect();
        ranked.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
        let rows: Vec<_> = ranked
            .iter()
            .map(|(id, score)| {
                json!({
                    "intent": id,
                    "text": self.model.intent_texts[*id],
                    "score": score,
                    "unseen": self.model.unseen.contains(*id),
                })
            })
            .collect();
        Ok(json!({"intent": p.intent, "ranked": rows}).to_string())
    }

    pub fn acceptability_json(&self, sentence: &str) -> gzsi::Result<String> {
        let a = sentence_acceptability(&self.lm, sentence)?;
        Ok(serde_json::to_string(&a).expect("json"))
    }
}

#[wasm_bindgen]
impl Demo {
    /// Trains on a seed-dependent split; takes a second or two.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> Result<Demo, JsValue> {
        Demo::build(seed as u64).map_err(to_js)
    }

    /// Ids of the intents held out from training.
    #[wasm_bindgen(js_name = unseenIntents)]
    pub fn unseen_intents(&self) -> Vec<String> {
        self.model.unseen.iter().cloned().collect()
    }

    /// Ids of every intent in the bundled corpus.
    pub fn intents(&self) -> Vec<String> {
        self.dataset.intent_ids().map(String::from).collect()
    }

    /// JSON `{intent, ranked: [{intent, text, score, unseen}]}`.
    pub fn predict(&self, utterance: &str) -> Result<String, JsValue> {
        self.predict_json(utterance).map_err(to_js)
    }

    /// JSON with LP, LP_mean, LP_pen, LP_norm and SLOR.
    pub fn acceptability(&self, sentence: &str) -> Result<String, JsValue> {
        self.acceptability_json(sentence).map_err(to_js)
    }
}
