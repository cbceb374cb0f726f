//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gzsi::analysis::{acceptability_compare, sentence_acceptability, NgramLm};
use gzsi::config::SweepGrid;
use gzsi::corpus::{make_gzsl_split, Dataset, Utterance};
use gzsi::encoder::{
    embed, gradient_check, EmbeddingConfig, Featurizer, GradCheckOptions, PairExample, PairScorer, Params,
    SparseVector, TrainedScorer,
};
use gzsi::eval::{accuracy, weighted_f1};
use gzsi::gzsl::{predict_split, run_experiment, train_gzsl, Experiment, GzslOptions, IntentTextSource, SplitPlan};
use gzsi::lexicalize::{lexicalize, LexicalizeOptions, TemplateSet};
use gzsi::rng::stream;
use gzsi::sampling::{hard_negative_intents, mine_hard_negative_utterances, Strategy};
use gzsi::synthetic::{self, SyntheticSpec};

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_lexicalization() -> Check {
    let templates = TemplateSet::builtin();
    let opts = LexicalizeOptions::default();
    let cases = [
        ("book_hotel", "d1", "the user wants to book a hotel"),
        ("flight_status", "q1", "does the user want to get a flight status"),
        ("reset_settings", "d1", "the user wants to reset settings"),
        ("get_alarms", "tell", "tell the user how to get alarms"),
    ];
    for (label, t, want) in cases {
        let got = lexicalize(label, templates.get(t).map_err(err)?, &opts).map_err(err)?;
        ensure(got == want, format!("{label}/{t}: got {got:?}, want {want:?}"))?;
    }
    Ok("4/4 golden sentences".into())
}

/// Confusion matrix, then per-class precision, recall and F1 weighted by
/// gold support.
fn oracle(gold: &[usize], pred: &[usize], classes: usize) -> (f64, f64) {
    let mut m = vec![vec![0usize; classes]; classes];
    for (&g, &p) in gold.iter().zip(pred) {
        m[g][p] += 1;
    }
    let n = gold.len() as f64;
    let correct: usize = (0..classes).map(|c| m[c][c]).sum();
    let mut f1_sum = 0.0;
    for (c, row) in m.iter().enumerate() {
        let support: usize = row.iter().sum();
        if support == 0 {
            continue;
        }
        let predicted: usize = (0..classes).map(|r| m[r][c]).sum();
        let tp = m[c][c] as f64;
        let precision = if predicted == 0 { 0.0 } else { tp / predicted as f64 };
        let recall = tp / support as f64;
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        f1_sum += support as f64 * f1;
    }
    (correct as f64 / n, f1_sum / n)
}

fn c2_metrics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let classes = rng.gen_range(1..=10);
        let items = rng.gen_range(1..=50);
        let gold: Vec<usize> = (0..items).map(|_| rng.gen_range(0..classes)).collect();
        let pred: Vec<usize> = (0..items).map(|_| rng.gen_range(0..classes)).collect();
        let (acc, f1) = oracle(&gold, &pred, classes);
        worst = worst
            .max((accuracy(&gold, &pred).map_err(err)? - acc).abs())
            .max((weighted_f1(&gold, &pred).map_err(err)? - f1).abs());
    }
    ensure(worst <= 1e-9, format!("max deviation from oracle {worst:e}"))?;
    let f1 = weighted_f1(&["A", "A", "B"], &["A", "B", "B"]).map_err(err)?;
    ensure((f1 - 2.0 / 3.0).abs() <= 1e-12, format!("[A,A,B]/[A,B,B] gave {f1}"))?;
    Ok(format!("200 instances, max deviation {worst:.1e}; toy F1 = {f1:.6}"))
}

fn c3_split() -> Check {
    let ds = synthetic::generate(&SyntheticSpec {
        n_intents: 150,
        per_intent: 6,
        ..SyntheticSpec::default()
    })
    .map_err(err)?;
    let split = make_gzsl_split(&ds, 38, 0.7, 11).map_err(err)?;
    ensure(
        split.seen.len() == 112 && split.unseen.len() == 38,
        format!("{} seen / {} unseen", split.seen.len(), split.unseen.len()),
    )?;
    for u in ds.utterances() {
        if split.unseen.contains(&u.intent_id) {
            ensure(
                split.test.contains(&u.id),
                format!("unseen utterance {} not in test", u.id),
            )?;
        }
    }
    split.validate(&ds).map_err(err)?;
    ensure(
        split == make_gzsl_split(&ds, 38, 0.7, 11).map_err(err)?,
        "same seed gave a different split",
    )?;
    Ok("112 seen / 38 unseen, unseen utterances all in test, deterministic".into())
}

fn dense(ds: &Dataset, emb: &EmbeddingConfig) -> Result<Vec<Vec<f64>>, String> {
    ds.utterances()
        .iter()
        .map(|u| embed(&u.text, emb).map(|v| v.to_dense()).map_err(err))
        .collect()
}

fn dense_cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn c4_hard_mining() -> Check {
    let ds = synthetic::generate(&SyntheticSpec {
        n_intents: 20,
        per_intent: 25,
        ..SyntheticSpec::default()
    })
    .map_err(err)?;
    ensure(ds.utterances().len() == 500, "corpus size")?;
    let emb = EmbeddingConfig::default();
    let utts: Vec<&Utterance> = ds.utterances().iter().collect();
    let pools = mine_hard_negative_utterances(&utts, &emb, 100).map_err(err)?;
    let vecs = dense(&ds, &emb)?;
    let index: BTreeMap<&str, usize> = utts.iter().enumerate().map(|(i, u)| (u.id.as_str(), i)).collect();
    let sims: Vec<Vec<f64>> = (0..utts.len())
        .map(|i| (0..utts.len()).map(|j| dense_cos(&vecs[i], &vecs[j])).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut hard_sum, mut hard_n, mut rand_sum, mut rand_n) = (0.0, 0usize, 0.0, 0usize);
    for (i, u) in utts.iter().enumerate() {
        let pool = &pools[&u.id];
        let out_of_class: Vec<usize> = (0..utts.len()).filter(|&j| utts[j].intent_id != u.intent_id).collect();
        ensure(
            pool.len() == out_of_class.len().min(100),
            format!("pool of {} has size {}", u.id, pool.len()),
        )?;
        // the brute-force top-100 by similarity must score the same as the mined pool
        let mut all: Vec<f64> = out_of_class.iter().map(|&j| sims[i][j]).collect();
        all.sort_by(|a, b| b.total_cmp(a));
        let oracle_top: f64 = all[..pool.len()].iter().sum();
        let mut mined = 0.0;
        for id in pool {
            let j = index[id.as_str()];
            ensure(
                utts[j].intent_id != u.intent_id,
                format!("in-class utterance {id} in pool of {}", u.id),
            )?;
            mined += sims[i][j];
        }
        ensure(
            (mined - oracle_top).abs() < 1e-9,
            format!("pool of {} is not the top-{} set", u.id, pool.len()),
        )?;
        hard_sum += mined;
        hard_n += pool.len();
        for &j in out_of_class.choose_multiple(&mut rng, 100) {
            rand_sum += sims[i][j];
            rand_n += 1;
        }
    }
    let (hard, random) = (hard_sum / hard_n as f64, rand_sum / rand_n as f64);
    ensure(hard > random, format!("hard mean {hard:.4} <= random mean {random:.4}"))?;

    // a corpus with fewer than 100 out-of-class utterances caps at what exists
    let small = synthetic::generate(&SyntheticSpec {
        n_intents: 3,
        per_intent: 10,
        ..SyntheticSpec::default()
    })
    .map_err(err)?;
    let small_utts: Vec<&Utterance> = small.utterances().iter().collect();
    let small_pools = mine_hard_negative_utterances(&small_utts, &emb, 100).map_err(err)?;
    ensure(
        small_pools.values().all(|p| p.len() == 20),
        "small pools not capped at availability",
    )?;
    Ok(format!(
        "hard pool mean cosine {hard:.4} > random {random:.4}; pools match brute force"
    ))
}

fn c5_hard_is() -> Check {
    let dim = 64;
    let vector = |x: f64, y: f64| {
        SparseVector::from_map(dim, [(0u32, x), (1u32, y)].into_iter().filter(|e| e.1 != 0.0).collect())
    };
    let embeddings: BTreeMap<String, SparseVector> = [
        ("gold".to_string(), vector(1.0, 0.0)),
        ("near".to_string(), vector(0.9, (1.0f64 - 0.81).sqrt())),
        ("far".to_string(), vector(0.1, (1.0f64 - 0.01).sqrt())),
    ]
    .into_iter()
    .collect();
    let seen = ["far", "gold", "near"];
    let mut rng = stream(5, "acceptance.hard_is");
    let draws = 10_000;
    let mut near = 0usize;
    for _ in 0..draws {
        let s = hard_negative_intents(&seen, "gold", 1, &embeddings, &mut rng).map_err(err)?;
        near += (s.items[0] == "near") as usize;
    }
    let freq = near as f64 / draws as f64;
    let expected = 0.9 / (0.9 + 0.1);
    ensure(
        (freq - expected).abs() <= 0.02,
        format!("frequency {freq:.4} vs {expected}"),
    )?;
    Ok(format!("near-intent frequency {freq:.4} (expected {expected})"))
}

fn c6_end_to_end() -> Check {
    let start = Instant::now();
    let ds = synthetic::bundled();
    ensure(ds.intents().len() == 20, "bundled corpus must have 20 intents")?;
    let run = |source: IntentTextSource| -> Result<(f64, f64), String> {
        let mut options = GzslOptions {
            intent_text: source,
            ..GzslOptions::default()
        };
        options.sampling.strategy = Strategy::HardUS;
        options.sampling.k = 5;
        let exp = Experiment {
            options,
            split: SplitPlan::Random {
                n_unseen: 5,
                train_fraction: 0.7,
            },
            seeds: (11..=20).collect(),
            fingerprint: "acceptance".into(),
        };
        let (report, runs) = run_experiment(&ds, &exp).map_err(err)?;
        ensure(
            runs.iter()
                .all(|r| r.split.seen.len() == 15 && r.split.unseen.len() == 5),
            "split must be 15/5",
        )?;
        let s = &report.summary;
        Ok((
            s.seen.as_ref().ok_or("no seen")?.accuracy.mean,
            s.unseen.as_ref().ok_or("no unseen")?.accuracy.mean,
        ))
    };
    let (seen, unseen) = run(IntentTextSource::Lexicalized { template: "d1".into() })?;
    let (_, raw_unseen) = run(IntentTextSource::Label)?;
    let elapsed = start.elapsed();
    let detail = format!(
        "seen {seen:.3}, unseen {unseen:.3}, raw-label unseen {raw_unseen:.3}, {:.1}s",
        elapsed.as_secs_f64()
    );
    ensure(seen >= 0.90, format!("seen accuracy too low: {detail}"))?;
    ensure(unseen >= 0.60, format!("unseen accuracy too low: {detail}"))?;
    ensure(
        unseen >= raw_unseen - 0.02,
        format!("lexicalized below raw labels: {detail}"),
    )?;
    ensure(elapsed < Duration::from_secs(300), format!("too slow: {detail}"))?;
    Ok(detail)
}

fn c7_gradients() -> Check {
    let emb = EmbeddingConfig {
        dimension: 256,
        ..EmbeddingConfig::default()
    };
    let featurizer = Featurizer::new(emb, 30);
    let ds = synthetic::bundled();
    let texts = TemplateSet::builtin();
    let d1 = texts.get("d1").map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (round, hidden) in [0usize, 0, 4, 8].into_iter().enumerate() {
        let batch: Vec<PairExample> = (0..6)
            .map(|_| {
                let u = ds.utterances().choose(&mut rng).expect("utterances");
                let intent = ds.intents().choose(&mut rng).expect("intents");
                let text = lexicalize(&intent.label, d1, &LexicalizeOptions::default())?;
                Ok(PairExample {
                    features: featurizer.featurize(&text, &u.text)?,
                    label: (intent.id == u.intent_id) as u8 as f64,
                })
            })
            .collect::<gzsi::Result<_>>()
            .map_err(err)?;
        let params = Params::random(featurizer.n_features(), hidden, round as u64);
        let report = gradient_check(
            &params,
            &batch,
            &GradCheckOptions {
                seed: round as u64,
                ..GradCheckOptions::default()
            },
        )
        .map_err(err)?;
        worst = worst.max(report.max_deviation);
        checked += report.checked;
    }
    ensure(worst <= 1e-4, format!("max relative deviation {worst:e}"))?;
    Ok(format!("{checked} coordinates, max relative deviation {worst:.2e}"))
}

struct Transformed<'a>(&'a TrainedScorer, fn(f64) -> f64);

impl PairScorer for Transformed<'_> {
    fn score(&self, intent_text: &str, utterance: &str) -> gzsi::Result<f64> {
        Ok((self.1)(self.0.score(intent_text, utterance)?))
    }
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).expect("read_dir") {
            let p = entry.expect("entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).expect("prefix").display().to_string(),
                    std::fs::read(&p).expect("read"),
                );
            }
        }
    }
    out
}

fn c8_invariance_and_determinism() -> Check {
    let ds = synthetic::bundled();
    let split = make_gzsl_split(&ds, 5, 0.7, 11).map_err(err)?;
    let mut options = GzslOptions::default().with_seed(11);
    options.scorer.epochs = 5;
    let (model, _) = train_gzsl(&ds, &split, &options, "acceptance").map_err(err)?;
    let base = predict_split(&model.scorer, &model.intent_texts, &ds, &split).map_err(err)?;
    let transforms: [fn(f64) -> f64; 4] = [f64::ln, |x| x * x * x, |x| 7.0 * x - 3.0, |x| (x / (1.0 - x)).ln()];
    for (i, t) in transforms.into_iter().enumerate() {
        let preds = predict_split(&Transformed(&model.scorer, t), &model.intent_texts, &ds, &split).map_err(err)?;
        let changed = base.iter().zip(&preds).filter(|(a, b)| a.pred != b.pred).count();
        ensure(changed == 0, format!("transform {i} changed {changed} predictions"))?;
    }

    let bin = env!("CARGO_BIN_EXE_gzsi");
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let work = tempfile::tempdir().map_err(err)?;
    let config = work.path().join("small.toml");
    std::fs::write(
        &config,
        format!(
            "seeds = [11, 12]\n[data]\nintents = {:?}\nutterances = {:?}\n[scorer]\nepochs = 3\n",
            data.join("synthetic/intents.jsonl"),
            data.join("synthetic/utterances.jsonl")
        ),
    )
    .map_err(err)?;
    let cfg = config.to_str().ok_or("path")?;
    let labels = work.path().join("labels.txt");
    std::fs::write(&labels, "book_hotel\nflight_status\nget_alarms\n").map_err(err)?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["split", "--config", cfg, "--seed", "11"],
        vec!["train", "--config", cfg, "--seed", "11"],
        vec!["predict", "--config", cfg, "--seed", "11"],
        vec!["eval", "--config", cfg],
        vec!["analyze", "--config", cfg, "--seed", "12"],
        vec!["acceptability", "--config", cfg],
        vec!["dataless", "--config", cfg, "--n-per-intent", "5"],
    ];
    let mut trees = Vec::new();
    for round in 0..2 {
        let root = work.path().join(format!("out{round}"));
        let mut stdout = Vec::new();
        for args in &commands {
            let out = Command::new(bin)
                .args(args)
                .env("GZSI_OUTPUT_ROOT", &root)
                .output()
                .map_err(err)?;
            ensure(
                out.status.success(),
                format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)),
            )?;
            stdout.push(out.stdout);
        }
        let out = Command::new(bin)
            .args(["lexicalize", "--template", "q1", "--labels"])
            .arg(&labels)
            .output()
            .map_err(err)?;
        stdout.push(out.stdout);
        trees.push((files(&root), stdout));
    }
    ensure(
        trees[0].0.len() >= 20,
        format!("only {} artifacts written", trees[0].0.len()),
    )?;
    ensure(trees[0] == trees[1], "two identical runs produced different bytes")?;
    Ok(format!(
        "4 monotone transforms keep {} predictions; {} artifacts byte-identical across runs",
        base.len(),
        trees[0].0.len()
    ))
}

fn c9_acceptability() -> Check {
    // order 2, k = 1 over "a b", "b a", "a":
    // V = {a, b, </s>, <unk>}, N = 8, unigram (c + 1) / 12
    // P(w | h) = (c(h, w) + 4 P1(w)) / (c(h) + 4)
    let lm = NgramLm::train(&["a b", "b a", "a"], 2, 1.0).map_err(err)?;
    let p1 = |c: f64| (c + 1.0) / 12.0;
    let (pa, pb, pe) = (p1(3.0), p1(2.0), p1(3.0));
    let cases = [
        // "a b": P(a|<s>) = (2 + 4 pa)/7, P(b|a) = (1 + 4 pb)/7, P(</s>|b) = (1 + 4 pe)/6
        (
            "a b",
            ((2.0 + 4.0 * pa) / 7.0).ln() + ((1.0 + 4.0 * pb) / 7.0).ln() + ((1.0 + 4.0 * pe) / 6.0).ln(),
            pa.ln() + pb.ln() + pe.ln(),
            2.0,
        ),
        // "b b": P(b|<s>) = (1 + 4 pb)/7, P(b|b) = 4 pb / 6, P(</s>|b) = (1 + 4 pe)/6
        (
            "b b",
            ((1.0 + 4.0 * pb) / 7.0).ln() + (4.0 * pb / 6.0).ln() + ((1.0 + 4.0 * pe) / 6.0).ln(),
            2.0 * pb.ln() + pe.ln(),
            2.0,
        ),
        // "a": P(a|<s>) = (2 + 4 pa)/7, P(</s>|a) = (2 + 4 pe)/7
        (
            "a",
            ((2.0 + 4.0 * pa) / 7.0).ln() + ((2.0 + 4.0 * pe) / 7.0).ln(),
            pa.ln() + pe.ln(),
            1.0,
        ),
    ];
    for (sentence, lp, lpu, len) in cases {
        let got = sentence_acceptability(&lm, sentence).map_err(err)?;
        let want = [
            lp,
            lp / len,
            lp / ((5.0 + len) / 6.0f64).powf(0.8),
            -lp / lpu,
            (lp - lpu) / len,
        ];
        let have = [got.lp, got.lp_mean, got.lp_pen, got.lp_norm, got.slor];
        for (name, (h, w)) in ["LP", "LP_mean", "LP_pen", "LP_norm", "SLOR"]
            .iter()
            .zip(have.iter().zip(want))
        {
            ensure((h - w).abs() <= 1e-9, format!("{sentence:?} {name}: {h} vs hand {w}"))?;
        }
    }

    let ds = synthetic::bundled();
    let corpus: Vec<&str> = ds.utterances().iter().map(|u| u.text.as_str()).collect();
    let lm = NgramLm::train(&corpus, 3, 0.1).map_err(err)?;
    let labels: Vec<&str> = ds.intents().iter().map(|i| i.label.as_str()).collect();
    let templates = TemplateSet::new(vec![TemplateSet::builtin().get("d1").map_err(err)?.clone()]).map_err(err)?;
    let rows = acceptability_compare(&labels, &templates, &lm, &LexicalizeOptions::default()).map_err(err)?;
    let (raw, d1) = (rows[0].scores.slor, rows[1].scores.slor);
    ensure(d1 > raw, format!("d1 SLOR {d1:.3} <= raw label SLOR {raw:.3}"))?;
    Ok(format!(
        "toy LM matches hand values; bundled LM SLOR d1 {d1:.2} > labels {raw:.2}"
    ))
}

fn c10_sweep() -> Check {
    let points = SweepGrid::default().points();
    ensure(points.len() == 48, format!("{} configurations", points.len()))?;
    let distinct: BTreeSet<String> = points.iter().map(|p| format!("{p:?}")).collect();
    ensure(distinct.len() == 48, "duplicate configurations")?;
    let lr: BTreeSet<String> = points.iter().map(|p| p.learning_rate.to_string()).collect();
    let len: BTreeSet<usize> = points.iter().map(|p| p.max_len_tokens).collect();
    ensure(lr.len() == 2 && len == BTreeSet::from([20, 30, 40]), "grid values")?;
    Ok("48 distinct configurations (2·2·2·3·2)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 10] = [
        ("lexicalization golden sentences", c1_lexicalization),
        ("metric oracle equivalence", c2_metrics),
        ("split structure", c3_split),
        ("hard utterance mining", c4_hard_mining),
        ("hard intent sampling distribution", c5_hard_is),
        ("end-to-end generalized zero-shot", c6_end_to_end),
        ("gradient check", c7_gradients),
        ("argmax invariance and determinism", c8_invariance_and_determinism),
        ("acceptability measures", c9_acceptability),
        ("sweep enumeration", c10_sweep),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
