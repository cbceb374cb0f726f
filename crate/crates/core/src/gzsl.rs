//! Training on seen intents and argmax inference over seen ∪ unseen.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{make_gzsl_split, Dataset, GzslSplit};
use crate::encoder::{train_scorer, EmbeddingConfig, PairScorer, ScorerConfig, TrainedScorer};
use crate::error::{Error, Result};
use crate::eval::{partitioned_report, EvalReport, RunReport};
use crate::jsonl;
use crate::lexicalize::{lexicalize, LexicalizeOptions, Template, TemplateSet};
use crate::sampling::{build_training_set, SamplingConfig, TrainingSet};

const MODEL_FORMAT: &str = "gzsi-model";
const MODEL_VERSION: u32 = 1;

/// Which text stands for an intent in a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum IntentTextSource {
    /// The raw machine label, verbatim.
    Label,
    /// The intent description; intents without one are an error.
    Description,
    /// The label lexicalized with the named template.
    Lexicalized { template: String },
}

impl Default for IntentTextSource {
    fn default() -> Self {
        IntentTextSource::Lexicalized { template: "d1".into() }
    }
}

/// Builds the text of every listed intent.
pub fn intent_texts<'a>(
    dataset: &Dataset,
    ids: impl IntoIterator<Item = &'a String>,
    source: &IntentTextSource,
    templates: &TemplateSet,
    lex: &LexicalizeOptions,
) -> Result<BTreeMap<String, String>> {
    let template = match source {
        IntentTextSource::Lexicalized { template } => Some(templates.get(template)?),
        _ => None,
    };
    ids.into_iter()
        .map(|id| {
            let intent = dataset.intent(id)?;
            let text = match (source, template) {
                (IntentTextSource::Label, _) => intent.label.clone(),
                (IntentTextSource::Description, _) => intent
                    .description
                    .clone()
                    .filter(|d| !d.trim().is_empty())
                    .ok_or_else(|| Error::MissingIntentText(id.clone()))?,
                (IntentTextSource::Lexicalized { .. }, Some(t)) => lexicalize(&intent.label, t, lex)?,
                (IntentTextSource::Lexicalized { .. }, None) => unreachable!(),
            };
            Ok((id.clone(), text))
        })
        .collect()
}

/// Everything that shapes a trained model apart from the data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GzslOptions {
    pub intent_text: IntentTextSource,
    pub lexicalize: LexicalizeOptions,
    /// Custom templates; the built-in set when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub templates: Option<Vec<Template>>,
    pub sampling: SamplingConfig,
    pub embedding: EmbeddingConfig,
    pub scorer: ScorerConfig,
    /// Overrides the sampling and scorer seeds.
    pub seed: u64,
}

impl GzslOptions {
    pub fn template_set(&self) -> Result<TemplateSet> {
        match &self.templates {
            Some(t) => TemplateSet::new(t.clone()),
            None => Ok(TemplateSet::builtin()),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut o = self.clone();
        o.seed = seed;
        o.sampling.seed = seed;
        o.scorer.seed = seed;
        o
    }

    pub fn validate(&self) -> Result<()> {
        self.sampling.validate()?;
        self.embedding.validate()?;
        self.scorer.validate()?;
        if let IntentTextSource::Lexicalized { template } = &self.intent_text {
            self.template_set()?.get(template)?;
        }
        Ok(())
    }
}

/// A trained scorer with the texts of every candidate intent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GzslModel {
    pub format: String,
    pub version: u32,
    pub fingerprint: String,
    pub seed: u64,
    pub options: GzslOptions,
    pub seen: BTreeSet<String>,
    pub unseen: BTreeSet<String>,
    /// Candidate intent id → text, covering seen ∪ unseen.
    pub intent_texts: BTreeMap<String, String>,
    pub scorer: TrainedScorer,
}

impl GzslModel {
    pub fn predict(&self, utterance: &str) -> Result<Prediction> {
        predict(&self.scorer, &self.intent_texts, utterance)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        jsonl::write_json(path, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let model: GzslModel = jsonl::read_json(path)?;
        if model.format != MODEL_FORMAT {
            return Err(Error::InvalidArgument(format!(
                "not a model file: format `{}`",
                model.format
            )));
        }
        if model.version != MODEL_VERSION {
            return Err(Error::Version(model.version));
        }
        model.scorer.check_header()?;
        Ok(model)
    }
}

/// Trains on seen intents only; unseen intents are consulted afterwards,
/// solely to record their inference texts.
pub fn train_gzsl(
    dataset: &Dataset,
    split: &GzslSplit,
    options: &GzslOptions,
    fingerprint: &str,
) -> Result<(GzslModel, TrainingSet)> {
    options.validate()?;
    split.validate(dataset)?;
    let options = options.with_seed(options.seed);
    let templates = options.template_set()?;
    let seen_texts = intent_texts(
        dataset,
        &split.seen,
        &options.intent_text,
        &templates,
        &options.lexicalize,
    )?;
    let training = build_training_set(dataset, split, &seen_texts, &options.sampling, &options.embedding)?;
    let scorer = train_scorer(&training.pairs, &options.embedding, &options.scorer)?;

    let mut texts = seen_texts;
    texts.extend(intent_texts(
        dataset,
        &split.unseen,
        &options.intent_text,
        &templates,
        &options.lexicalize,
    )?);
    let model = GzslModel {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        fingerprint: fingerprint.to_string(),
        seed: options.seed,
        options,
        seen: split.seen.clone(),
        unseen: split.unseen.clone(),
        intent_texts: texts,
        scorer,
    };
    Ok((model, training))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub intent: String,
    pub scores: BTreeMap<String, f64>,
}

/// Scores every candidate and returns the argmax; ties go to the
/// lexicographically smallest intent id.
pub fn predict(scorer: &dyn PairScorer, candidates: &BTreeMap<String, String>, utterance: &str) -> Result<Prediction> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate intents"));
    }
    if utterance.trim().is_empty() {
        return Err(Error::EmptyText);
    }
    let mut scores = BTreeMap::new();
    let mut best: Option<(&String, f64)> = None;
    for (id, text) in candidates {
        let s = scorer.score(text, utterance)?;
        if !s.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite score for intent `{id}`")));
        }
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((id, s));
        }
        scores.insert(id.clone(), s);
    }
    Ok(Prediction {
        intent: best.expect("non-empty").0.clone(),
        scores,
    })
}

/// Predictions file record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub utterance_id: String,
    pub gold: String,
    pub pred: String,
    pub scores: BTreeMap<String, f64>,
}

/// Predicts every test utterance of `split`, in id order.
pub fn predict_split(
    scorer: &dyn PairScorer,
    candidates: &BTreeMap<String, String>,
    dataset: &Dataset,
    split: &GzslSplit,
) -> Result<Vec<PredictionRecord>> {
    split
        .test
        .iter()
        .map(|id| {
            let utt = dataset.utterance(id)?;
            let p = predict(scorer, candidates, &utt.text)?;
            Ok(PredictionRecord {
                utterance_id: id.clone(),
                gold: utt.intent_id.clone(),
                pred: p.intent,
                scores: p.scores,
            })
        })
        .collect()
}

/// How each run obtains its split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitPlan {
    /// A fresh split per seed.
    Random { n_unseen: usize, train_fraction: f64 },
    /// The same split for every seed.
    Fixed { split: GzslSplit },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub options: GzslOptions,
    pub split: SplitPlan,
    pub seeds: Vec<u64>,
    pub fingerprint: String,
}

/// Artifacts of one seed.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub seed: u64,
    pub split: GzslSplit,
    pub model: GzslModel,
    pub training: TrainingSet,
    pub predictions: Vec<PredictionRecord>,
    pub report: RunReport,
}

/// Trains on `split`, predicts its test set and scores the predictions.
pub fn run_split(
    dataset: &Dataset,
    split: GzslSplit,
    options: &GzslOptions,
    seed: u64,
    fingerprint: &str,
) -> Result<RunOutput> {
    let (model, training) = train_gzsl(dataset, &split, &options.with_seed(seed), fingerprint)?;
    let predictions = predict_split(&model.scorer, &model.intent_texts, dataset, &split)?;
    let gold: Vec<String> = predictions.iter().map(|p| p.gold.clone()).collect();
    let pred: Vec<String> = predictions.iter().map(|p| p.pred.clone()).collect();
    let report = RunReport {
        seed,
        metrics: partitioned_report(&split, &gold, &pred)?,
    };
    Ok(RunOutput {
        seed,
        split,
        model,
        training,
        predictions,
        report,
    })
}

pub fn run_seed(dataset: &Dataset, experiment: &Experiment, seed: u64) -> Result<RunOutput> {
    let split = match &experiment.split {
        SplitPlan::Random {
            n_unseen,
            train_fraction,
        } => make_gzsl_split(dataset, *n_unseen, *train_fraction, seed)?,
        SplitPlan::Fixed { split } => split.clone(),
    };
    run_split(dataset, split, &experiment.options, seed, &experiment.fingerprint)
}

/// Applies `f` to every seed, in parallel where threads exist, keeping seed order.
pub fn map_seeds<T: Send>(seeds: &[u64], f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    #[cfg(not(target_arch = "wasm32"))]
    {
        std::thread::scope(|scope| {
            let f = &f;
            let handles: Vec<_> = seeds.iter().map(|&s| scope.spawn(move || f(s))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("seed worker panicked"))
                .collect()
        })
    }
    #[cfg(target_arch = "wasm32")]
    {
        seeds.iter().map(|&s| f(s)).collect()
    }
}

/// Runs every seed and aggregates the partitioned metrics.
pub fn run_experiment(dataset: &Dataset, experiment: &Experiment) -> Result<(EvalReport, Vec<RunOutput>)> {
    if experiment.seeds.is_empty() {
        return Err(Error::Empty("seeds"));
    }
    experiment.options.validate()?;
    let outputs = map_seeds(&experiment.seeds, |seed| run_seed(dataset, experiment, seed))?;
    let report = EvalReport::from_runs(
        &experiment.fingerprint,
        outputs.iter().map(|o| o.report.clone()).collect(),
    )?;
    Ok((report, outputs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Intent, Utterance};

    struct Constant(f64);

    impl PairScorer for Constant {
        fn score(&self, _: &str, _: &str) -> Result<f64> {
            Ok(self.0)
        }
    }

    struct ByLength;

    impl PairScorer for ByLength {
        fn score(&self, intent: &str, _: &str) -> Result<f64> {
            Ok(1.0 / (1.0 + intent.len() as f64))
        }
    }

    fn candidates(ids: &[&str]) -> BTreeMap<String, String> {
        ids.iter().map(|id| (id.to_string(), format!("text of {id}"))).collect()
    }

    #[test]
    fn ties_go_to_smallest_id() {
        let p = predict(&Constant(0.5), &candidates(&["zeta", "alpha", "mid"]), "hello").unwrap();
        assert_eq!(p.intent, "alpha");
        assert_eq!(p.scores.len(), 3);
    }

    #[test]
    fn single_candidate_and_errors() {
        let p = predict(&Constant(0.01), &candidates(&["only"]), "hello").unwrap();
        assert_eq!(p.intent, "only");
        assert!(predict(&Constant(0.5), &BTreeMap::new(), "hello").is_err());
        assert!(predict(&Constant(0.5), &candidates(&["a"]), "  ").is_err());
    }

    #[test]
    fn argmax_follows_scores() {
        let mut c = candidates(&["a", "b"]);
        c.insert("a".into(), "much longer text".into());
        c.insert("b".into(), "short".into());
        assert_eq!(predict(&ByLength, &c, "x").unwrap().intent, "b");
    }

    fn dataset() -> Dataset {
        let intents = vec![
            Intent {
                description: Some("Reserve a hotel room".into()),
                ..Intent::new("book_hotel", "book_hotel")
            },
            Intent::new("flight_status", "flight_status"),
        ];
        let utts = vec![Utterance::new("u1", "book me a hotel", "book_hotel")];
        Dataset::new(intents, utts, "t").unwrap()
    }

    #[test]
    fn text_sources() {
        let ds = dataset();
        let ids: Vec<String> = vec!["book_hotel".into(), "flight_status".into()];
        let t = TemplateSet::builtin();
        let lex = LexicalizeOptions::default();
        let labels = intent_texts(&ds, &ids, &IntentTextSource::Label, &t, &lex).unwrap();
        assert_eq!(labels["book_hotel"], "book_hotel");
        let d1 = intent_texts(&ds, &ids, &IntentTextSource::default(), &t, &lex).unwrap();
        assert!(d1.values().all(|s| s.starts_with("the user wants to")));
        let q1 = IntentTextSource::Lexicalized { template: "q1".into() };
        assert_eq!(
            intent_texts(&ds, &ids, &q1, &t, &lex).unwrap()["flight_status"],
            "does the user want to get a flight status"
        );
        let desc = intent_texts(&ds, &ids[..1], &IntentTextSource::Description, &t, &lex).unwrap();
        assert_eq!(desc["book_hotel"], "Reserve a hotel room");
        assert!(matches!(
            intent_texts(&ds, &ids, &IntentTextSource::Description, &t, &lex),
            Err(Error::MissingIntentText(id)) if id == "flight_status"
        ));
        let bad = IntentTextSource::Lexicalized {
            template: "nope".into(),
        };
        assert!(intent_texts(&ds, &ids, &bad, &t, &lex).is_err());
    }

    #[test]
    fn source_serialization() {
        let v = serde_json::to_value(IntentTextSource::Lexicalized { template: "q2".into() }).unwrap();
        assert_eq!(v, serde_json::json!({"source": "lexicalized", "template": "q2"}));
        let v: IntentTextSource = serde_json::from_value(serde_json::json!({"source": "label"})).unwrap();
        assert_eq!(v, IntentTextSource::Label);
    }
}
