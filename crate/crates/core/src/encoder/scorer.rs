//! Trainable sentence-pair scorer.
//!
//! A pair `(intent text, utterance)` is mapped to the interaction features
//! `[e_i; e_u; e_i ⊙ e_u; |e_i − e_u|; overlap]`, where `e_*` are hashed
//! embeddings of the truncated texts and `overlap` counts distinct shared
//! tokens. A logistic head (optionally behind one tanh layer) turns them
//! into `P(1 | intent, utterance)`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{embed, tokenize_and_truncate, EmbeddingConfig, SparseVector};
use crate::error::{Error, Result};
use crate::jsonl;
use crate::rng;
use crate::sampling::TrainingPair;

const FORMAT: &str = "gzsi-scorer";
const VERSION: u32 = 1;
/// Logits are clamped to this magnitude when reported so probabilities stay
/// strictly inside (0, 1).
const LOGIT_CLAMP: f64 = 30.0;

/// Anything that can score an (intent text, utterance) pair.
pub trait PairScorer {
    /// `P(1 | intent_text, utterance)`, strictly inside (0, 1).
    fn score(&self, intent_text: &str, utterance: &str) -> Result<f64>;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScorerConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub warmup_ratio: f64,
    pub max_len_tokens: usize,
    pub epochs: usize,
    pub hidden_units: usize,
    pub seed: u64,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            learning_rate: 0.1,
            batch_size: 16,
            warmup_ratio: 0.1,
            max_len_tokens: 30,
            epochs: 20,
            hidden_units: 0,
            seed: 0,
        }
    }
}

impl ScorerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("scorer.learning_rate", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("scorer.batch_size", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.warmup_ratio) {
            return Err(Error::config("scorer.warmup_ratio", "must be in [0, 1)"));
        }
        if self.max_len_tokens == 0 {
            return Err(Error::config("scorer.max_len_tokens", "must be positive"));
        }
        Ok(())
    }

    /// Learning rate at `step`: linear warmup from 0, then linear decay to 0.
    pub fn learning_rate_at(&self, step: usize, total_steps: usize) -> f64 {
        let warmup = (self.warmup_ratio * total_steps as f64).floor() as usize;
        let factor = if step < warmup {
            step as f64 / warmup.max(1) as f64
        } else {
            (total_steps.saturating_sub(step)) as f64 / (total_steps - warmup).max(1) as f64
        };
        self.learning_rate * factor.max(0.0)
    }
}

/// Maps text pairs to sparse interaction features.
#[derive(Clone, Debug, PartialEq)]
pub struct Featurizer {
    pub embedding: EmbeddingConfig,
    pub max_len_tokens: usize,
}

impl Featurizer {
    pub fn new(embedding: EmbeddingConfig, max_len_tokens: usize) -> Self {
        Featurizer {
            embedding,
            max_len_tokens,
        }
    }

    /// `4 × dimension + 1`.
    pub fn n_features(&self) -> usize {
        4 * self.embedding.dimension + 1
    }

    fn side(&self, text: &str) -> Result<(Vec<String>, SparseVector)> {
        let tokens = tokenize_and_truncate(text, self.max_len_tokens);
        if tokens.is_empty() {
            return Err(Error::EmptyText);
        }
        let e = embed(&tokens.join(" "), &self.embedding)?;
        Ok((tokens, e))
    }

    pub fn featurize(&self, intent_text: &str, utterance: &str) -> Result<SparseVector> {
        let (ti, ei) = self.side(intent_text)?;
        let (tu, eu) = self.side(utterance)?;
        Ok(self.combine(&ti, &ei, &tu, &eu))
    }

    fn combine(&self, ti: &[String], ei: &SparseVector, tu: &[String], eu: &SparseVector) -> SparseVector {
        let d = self.embedding.dimension as u32;
        let mut map: BTreeMap<u32, f64> = BTreeMap::new();
        let ui: BTreeMap<u32, f64> = ei.entries().iter().copied().collect();
        let uu: BTreeMap<u32, f64> = eu.entries().iter().copied().collect();
        for (&k, &v) in &ui {
            map.insert(k, v);
        }
        for (&k, &v) in &uu {
            map.insert(d + k, v);
        }
        for (&k, &a) in &ui {
            if let Some(&b) = uu.get(&k) {
                map.insert(2 * d + k, a * b);
            }
        }
        let keys: BTreeSet<u32> = ui.keys().chain(uu.keys()).copied().collect();
        for k in keys {
            let diff = (ui.get(&k).copied().unwrap_or(0.0) - uu.get(&k).copied().unwrap_or(0.0)).abs();
            map.insert(3 * d + k, diff);
        }
        let si: BTreeSet<&String> = ti.iter().collect();
        let overlap = tu.iter().collect::<BTreeSet<_>>().intersection(&si).count();
        map.insert(4 * d, overlap as f64);
        SparseVector::from_map(self.n_features(), map)
    }
}

/// Features with a binary target.
#[derive(Clone, Debug, PartialEq)]
pub struct PairExample {
    pub features: SparseVector,
    pub label: f64,
}

/// Flat parameter vector of the scoring head.
///
/// With `hidden == 0` the layout is `[w (F), b]`. Otherwise it is
/// `[W1 (H×F, row-major), b1 (H), w2 (H), b2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n_features: usize,
    pub hidden: usize,
    pub values: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl Params {
    pub fn len_for(n_features: usize, hidden: usize) -> usize {
        if hidden == 0 {
            n_features + 1
        } else {
            hidden * n_features + 2 * hidden + 1
        }
    }

    pub fn zeros(n_features: usize, hidden: usize) -> Self {
        Params {
            n_features,
            hidden,
            values: vec![0.0; Params::len_for(n_features, hidden)],
        }
    }

    /// Small uniform random values everywhere.
    pub fn random(n_features: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed, "scorer.random");
        let mut p = Params::zeros(n_features, hidden);
        for v in &mut p.values {
            *v = rng.gen_range(-0.5..0.5);
        }
        p
    }

    /// Training initialization: zeros for the linear head; for the hidden
    /// layer, small random input weights and output weights.
    pub fn init(n_features: usize, hidden: usize, seed: u64) -> Self {
        let mut p = Params::zeros(n_features, hidden);
        if hidden > 0 {
            let mut rng = rng::stream(seed, "scorer.init");
            let (w1, rest) = p.values.split_at_mut(hidden * n_features);
            for v in w1 {
                *v = rng.gen_range(-0.1..0.1);
            }
            for v in &mut rest[hidden..2 * hidden] {
                *v = rng.gen_range(-0.5..0.5);
            }
        }
        p
    }

    fn bias_index(&self) -> usize {
        self.values.len() - 1
    }

    /// Logit and hidden activations.
    fn forward(&self, x: &SparseVector) -> (f64, Vec<f64>) {
        let f = self.n_features;
        if self.hidden == 0 {
            let z = self.values[f]
                + x.entries()
                    .iter()
                    .map(|&(j, v)| self.values[j as usize] * v)
                    .sum::<f64>();
            return (z, Vec::new());
        }
        let h = self.hidden;
        let b1 = h * f;
        let w2 = b1 + h;
        let acts: Vec<f64> = (0..h)
            .map(|k| {
                let row = &self.values[k * f..(k + 1) * f];
                let a = self.values[b1 + k] + x.entries().iter().map(|&(j, v)| row[j as usize] * v).sum::<f64>();
                a.tanh()
            })
            .collect();
        let z = self.values[self.bias_index()]
            + acts
                .iter()
                .enumerate()
                .map(|(k, a)| self.values[w2 + k] * a)
                .sum::<f64>();
        (z, acts)
    }

    pub fn logit(&self, x: &SparseVector) -> f64 {
        self.forward(x).0
    }

    /// Accumulates `scale × ∂loss/∂θ` for one example into `grad`, pushing
    /// first-touched indices into `touched`. Returns the example's loss.
    fn accumulate(
        &self,
        ex: &PairExample,
        scale: f64,
        grad: &mut [f64],
        touched: &mut Vec<usize>,
        mark: &mut [bool],
    ) -> f64 {
        let (z, acts) = self.forward(&ex.features);
        let loss = softplus(z) - ex.label * z;
        let delta = (sigmoid(z) - ex.label) * scale;
        let mut add = |i: usize, g: f64| {
            if !mark[i] {
                mark[i] = true;
                touched.push(i);
            }
            grad[i] += g;
        };
        let f = self.n_features;
        if self.hidden == 0 {
            for &(j, v) in ex.features.entries() {
                add(j as usize, delta * v);
            }
            add(f, delta);
        } else {
            let h = self.hidden;
            let b1 = h * f;
            let w2 = b1 + h;
            for (k, a) in acts.iter().enumerate() {
                add(w2 + k, delta * a);
                let dh = delta * self.values[w2 + k] * (1.0 - a * a);
                for &(j, v) in ex.features.entries() {
                    add(k * f + j as usize, dh * v);
                }
                add(b1 + k, dh);
            }
            add(self.values.len() - 1, delta);
        }
        loss
    }

    /// Mean binary cross-entropy.
    pub fn loss(&self, batch: &[PairExample]) -> f64 {
        batch
            .iter()
            .map(|ex| {
                let z = self.logit(&ex.features);
                softplus(z) - ex.label * z
            })
            .sum::<f64>()
            / batch.len().max(1) as f64
    }

    /// Mean loss and its dense gradient.
    pub fn loss_and_grad(&self, batch: &[PairExample]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.values.len()];
        let mut mark = vec![false; self.values.len()];
        let mut touched = Vec::new();
        let scale = 1.0 / batch.len().max(1) as f64;
        let loss = batch
            .iter()
            .map(|ex| self.accumulate(ex, scale, &mut grad, &mut touched, &mut mark))
            .sum::<f64>()
            * scale;
        (loss, grad)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingStats {
    pub initial_loss: f64,
    /// Full training-set loss after each epoch.
    pub epoch_losses: Vec<f64>,
    pub steps: usize,
}

impl TrainingStats {
    pub fn final_loss(&self) -> f64 {
        self.epoch_losses.last().copied().unwrap_or(self.initial_loss)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainedScorer {
    pub format: String,
    pub version: u32,
    pub embedding: EmbeddingConfig,
    pub config: ScorerConfig,
    pub params: Params,
    pub stats: TrainingStats,
}

impl TrainedScorer {
    pub fn featurizer(&self) -> Featurizer {
        Featurizer::new(self.embedding.clone(), self.config.max_len_tokens)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::json("scorer", e))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scorer: TrainedScorer = serde_json::from_str(text).map_err(|e| Error::json("scorer", e))?;
        scorer.check_header()?;
        Ok(scorer)
    }

    pub(crate) fn check_header(&self) -> Result<()> {
        if self.format != FORMAT {
            return Err(Error::InvalidArgument(format!(
                "not a scorer file: format `{}`",
                self.format
            )));
        }
        if self.version != VERSION {
            return Err(Error::Version(self.version));
        }
        let expected = Params::len_for(self.params.n_features, self.params.hidden);
        if self.params.values.len() != expected || self.params.n_features != self.featurizer().n_features() {
            return Err(Error::InvalidArgument(
                "scorer parameter shape does not match its config".into(),
            ));
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        jsonl::write_json(path, self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let scorer: TrainedScorer = jsonl::read_json(path)?;
        scorer.check_header()?;
        Ok(scorer)
    }

    /// Probability for pre-computed features.
    pub fn score_features(&self, features: &SparseVector) -> f64 {
        sigmoid(self.params.logit(features).clamp(-LOGIT_CLAMP, LOGIT_CLAMP))
    }
}

impl PairScorer for TrainedScorer {
    fn score(&self, intent_text: &str, utterance: &str) -> Result<f64> {
        if intent_text.trim().is_empty() || utterance.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        Ok(self.score_features(&self.featurizer().featurize(intent_text, utterance)?))
    }
}

/// Mini-batch gradient descent on mean binary cross-entropy.
pub fn train_scorer(
    pairs: &[TrainingPair],
    embedding: &EmbeddingConfig,
    config: &ScorerConfig,
) -> Result<TrainedScorer> {
    embedding.validate()?;
    config.validate()?;
    let positives = pairs.iter().filter(|p| p.label == 1).count();
    if positives == 0 || positives == pairs.len() {
        return Err(Error::SingleClass);
    }
    let featurizer = Featurizer::new(embedding.clone(), config.max_len_tokens);
    let mut cache: BTreeMap<&str, (Vec<String>, SparseVector)> = BTreeMap::new();
    let mut examples = Vec::with_capacity(pairs.len());
    for pair in pairs {
        for text in [pair.intent_text.as_str(), pair.utterance_text.as_str()] {
            if !cache.contains_key(text) {
                cache.insert(text, featurizer.side(text)?);
            }
        }
        let (ti, ei) = &cache[pair.intent_text.as_str()];
        let (tu, eu) = &cache[pair.utterance_text.as_str()];
        examples.push(PairExample {
            features: featurizer.combine(ti, ei, tu, eu),
            label: f64::from(pair.label),
        });
    }
    drop(cache);
    Ok(fit(examples, featurizer, config))
}

fn fit(examples: Vec<PairExample>, featurizer: Featurizer, config: &ScorerConfig) -> TrainedScorer {
    let mut params = Params::init(featurizer.n_features(), config.hidden_units, config.seed);
    let mut stats = TrainingStats {
        initial_loss: params.loss(&examples),
        ..TrainingStats::default()
    };
    let steps_per_epoch = examples.len().div_ceil(config.batch_size);
    let total_steps = steps_per_epoch * config.epochs;
    let mut rng = rng::stream(config.seed, "scorer.shuffle");
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut grad = vec![0.0; params.values.len()];
    let mut mark = vec![false; params.values.len()];
    let mut touched = Vec::new();
    let mut step = 0;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                params.accumulate(&examples[i], scale, &mut grad, &mut touched, &mut mark);
            }
            let lr = config.learning_rate_at(step, total_steps);
            for &i in &touched {
                params.values[i] -= lr * grad[i];
                grad[i] = 0.0;
                mark[i] = false;
            }
            touched.clear();
            step += 1;
        }
        stats.epoch_losses.push(params.loss(&examples));
    }
    stats.steps = step;
    TrainedScorer {
        format: FORMAT.to_string(),
        version: VERSION,
        embedding: featurizer.embedding,
        config: config.clone(),
        params,
        stats,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckOptions {
    /// Central-difference step.
    pub step: f64,
    /// Maximum tolerated relative deviation.
    pub tolerance: f64,
    /// Check at most this many coordinates (sampled among the ones the batch
    /// can move); `None` checks every such coordinate.
    pub max_coords: Option<usize>,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions {
            step: 1e-5,
            tolerance: 1e-4,
            max_coords: Some(256),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_deviation: f64,
    pub worst_coordinate: usize,
    pub checked: usize,
}

/// Compares analytic gradients against central finite differences.
///
/// Deviation is `|analytic − numeric| / max(|analytic|, |numeric|, 1e-6)`;
/// the floor keeps coordinates with vanishing gradient from amplifying
/// round-off.
pub fn gradient_check(params: &Params, batch: &[PairExample], options: &GradCheckOptions) -> Result<GradCheckReport> {
    if batch.is_empty() {
        return Err(Error::Empty("gradient check batch"));
    }
    if !(options.step > 0.0 && options.step.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be positive, got {}",
            options.step
        )));
    }
    let (_, analytic) = params.loss_and_grad(batch);

    let f = params.n_features;
    let active: BTreeSet<usize> = batch
        .iter()
        .flat_map(|ex| ex.features.entries().iter().map(|&(j, _)| j as usize))
        .collect();
    let mut coords: Vec<usize> = if params.hidden == 0 {
        active.iter().copied().chain([f]).collect()
    } else {
        let h = params.hidden;
        (0..h)
            .flat_map(|k| active.iter().map(move |&j| k * f + j))
            .chain(h * f..params.values.len())
            .collect()
    };
    if let Some(max) = options.max_coords {
        if coords.len() > max {
            let mut rng = rng::stream(options.seed, "gradcheck");
            coords = coords.choose_multiple(&mut rng, max).copied().collect();
            coords.sort_unstable();
        }
    }

    let mut probe = params.clone();
    let mut report = GradCheckReport {
        max_deviation: 0.0,
        worst_coordinate: coords.first().copied().unwrap_or(0),
        checked: coords.len(),
    };
    let mut worst = (0.0, 0.0);
    for &i in &coords {
        let orig = probe.values[i];
        probe.values[i] = orig + options.step;
        let up = probe.loss(batch);
        probe.values[i] = orig - options.step;
        let down = probe.loss(batch);
        probe.values[i] = orig;
        let numeric = (up - down) / (2.0 * options.step);
        let a = analytic[i];
        let deviation = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
        if deviation > report.max_deviation {
            report.max_deviation = deviation;
            report.worst_coordinate = i;
            worst = (a, numeric);
        }
    }
    if report.max_deviation > options.tolerance {
        return Err(Error::GradientCheck {
            coordinate: report.worst_coordinate,
            analytic: worst.0,
            numeric: worst.1,
            deviation: report.max_deviation,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Origin;

    fn small_featurizer() -> Featurizer {
        Featurizer::new(
            EmbeddingConfig {
                dimension: 64,
                ..EmbeddingConfig::default()
            },
            30,
        )
    }

    fn pair(intent: &str, utt: &str, label: u8) -> TrainingPair {
        TrainingPair {
            intent_text: intent.into(),
            utterance_text: utt.into(),
            label,
            origin: if label == 1 {
                Origin::Positive
            } else {
                Origin::RandomNeg
            },
            intent_id: intent.into(),
            utterance_id: utt.into(),
        }
    }

    fn batch(fz: &Featurizer) -> Vec<PairExample> {
        [
            ("book hotel", "i want to book a hotel room", 1.0),
            ("book hotel", "play some jazz music", 0.0),
            ("play music", "play some jazz music", 1.0),
            ("play music", "i need a hotel in rome", 0.0),
        ]
        .iter()
        .map(|(i, u, l)| PairExample {
            features: fz.featurize(i, u).unwrap(),
            label: *l,
        })
        .collect()
    }

    #[test]
    fn feature_layout() {
        let fz = small_featurizer();
        let x = fz.featurize("book hotel", "book a hotel").unwrap();
        assert_eq!(x.dim(), 4 * 64 + 1);
        let last = x.entries().last().unwrap();
        assert_eq!(*last, (256, 2.0));
    }

    #[test]
    fn schedule_warms_up_then_decays() {
        let cfg = ScorerConfig {
            learning_rate: 1.0,
            warmup_ratio: 0.1,
            ..ScorerConfig::default()
        };
        assert_eq!(cfg.learning_rate_at(0, 100), 0.0);
        assert!((cfg.learning_rate_at(5, 100) - 0.5).abs() < 1e-12);
        assert!((cfg.learning_rate_at(10, 100) - 1.0).abs() < 1e-12);
        assert!((cfg.learning_rate_at(55, 100) - 0.5).abs() < 1e-12);
        assert_eq!(cfg.learning_rate_at(100, 100), 0.0);
        let flat = ScorerConfig {
            learning_rate: 1.0,
            warmup_ratio: 0.0,
            ..ScorerConfig::default()
        };
        assert_eq!(flat.learning_rate_at(0, 10), 1.0);
    }

    #[test]
    fn zero_weights_bias_gradient_is_mean_residual() {
        let fz = small_featurizer();
        let b = batch(&fz);
        let params = Params::zeros(fz.n_features(), 0);
        let (loss, grad) = params.loss_and_grad(&b);
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
        let mean_residual = b.iter().map(|ex| 0.5 - ex.label).sum::<f64>() / b.len() as f64;
        assert!((grad[fz.n_features()] - mean_residual).abs() < 1e-15);
        assert_eq!(mean_residual, 0.0);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let fz = small_featurizer();
        let b = batch(&fz);
        for hidden in [0, 3] {
            let params = Params::random(fz.n_features(), hidden, 7);
            let opts = GradCheckOptions {
                max_coords: None,
                ..GradCheckOptions::default()
            };
            let report = gradient_check(&params, &b, &opts).unwrap();
            assert!(report.max_deviation <= 1e-4, "hidden={hidden}: {report:?}");
            assert!(report.checked > 10);
        }
    }

    #[test]
    fn gradient_check_errors() {
        let fz = small_featurizer();
        let b = batch(&fz);
        let params = Params::random(fz.n_features(), 0, 1);
        let zero_step = GradCheckOptions {
            step: 0.0,
            ..GradCheckOptions::default()
        };
        assert!(gradient_check(&params, &b, &zero_step).is_err());
        assert!(gradient_check(&params, &[], &GradCheckOptions::default()).is_err());
        // a huge step makes the difference quotient inaccurate
        let coarse = GradCheckOptions {
            step: 5.0,
            ..GradCheckOptions::default()
        };
        assert!(matches!(
            gradient_check(&params, &b, &coarse),
            Err(Error::GradientCheck { .. })
        ));
    }

    #[test]
    fn training_rejects_single_class() {
        let pairs = vec![pair("a b", "a b c", 1), pair("c d", "c d e", 1)];
        let err = train_scorer(&pairs, &EmbeddingConfig::default(), &ScorerConfig::default());
        assert!(matches!(err, Err(Error::SingleClass)));
    }

    #[test]
    fn zero_epochs_keeps_initial_parameters() {
        let pairs = vec![
            pair("book hotel", "book a hotel", 1),
            pair("book hotel", "play jazz", 0),
        ];
        let cfg = ScorerConfig {
            epochs: 0,
            ..ScorerConfig::default()
        };
        let scorer = train_scorer(&pairs, &EmbeddingConfig::default(), &cfg).unwrap();
        assert!(scorer.params.values.iter().all(|v| *v == 0.0));
        let p = scorer.score("book hotel", "anything at all").unwrap();
        assert!(p > 0.0 && p < 1.0);
    }

    #[test]
    fn scores_stay_inside_unit_interval_under_extreme_weights() {
        let fz = small_featurizer();
        let mut params = Params::zeros(fz.n_features(), 0);
        params.values.iter_mut().for_each(|v| *v = 1e6);
        let scorer = TrainedScorer {
            format: FORMAT.into(),
            version: VERSION,
            embedding: fz.embedding.clone(),
            config: ScorerConfig::default(),
            params,
            stats: TrainingStats::default(),
        };
        let p = scorer.score("book hotel", "book hotel").unwrap();
        assert!(p < 1.0 && p > 0.0);
        assert!(matches!(scorer.score(" ", "x"), Err(Error::EmptyText)));
    }

    #[test]
    fn json_round_trip_and_header_checks() {
        let pairs = vec![
            pair("book hotel", "book a hotel", 1),
            pair("book hotel", "play jazz", 0),
        ];
        let scorer = train_scorer(&pairs, &EmbeddingConfig::default(), &ScorerConfig::default()).unwrap();
        let loaded = TrainedScorer::from_json(&scorer.to_json().unwrap()).unwrap();
        assert_eq!(loaded, scorer);
        let mut bad = scorer.clone();
        bad.version = 99;
        assert!(matches!(
            TrainedScorer::from_json(&bad.to_json().unwrap()),
            Err(Error::Version(99))
        ));
    }
}
