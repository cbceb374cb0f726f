//! Accuracy, support-weighted F1, seen/unseen partitions and cross-seed
//! aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::GzslSplit;
use crate::error::{Error, Result};

fn check_lengths(gold: usize, pred: usize) -> Result<()> {
    if gold != pred {
        return Err(Error::LengthMismatch { gold, pred });
    }
    if gold == 0 {
        return Err(Error::Empty("gold labels"));
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn accuracy<S: PartialEq>(gold: &[S], pred: &[S]) -> Result<f64> {
    check_lengths(gold.len(), pred.len())?;
    let hits = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Per-class F1 averaged with weights equal to each class's gold support.
///
/// Precision, recall and F1 are 0 whenever their denominator vanishes.
/// Classes that only occur among predictions have zero weight.
pub fn weighted_f1<S: Ord>(gold: &[S], pred: &[S]) -> Result<f64> {
    check_lengths(gold.len(), pred.len())?;
    #[derive(Default)]
    struct Counts {
        tp: usize,
        fp: usize,
        fn_: usize,
    }
    let mut per_class: BTreeMap<&S, Counts> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        if g == p {
            per_class.entry(g).or_default().tp += 1;
        } else {
            per_class.entry(g).or_default().fn_ += 1;
            per_class.entry(p).or_default().fp += 1;
        }
    }
    let total: f64 = per_class
        .values()
        .map(|c| {
            let support = c.tp + c.fn_;
            let precision = ratio(c.tp, c.tp + c.fp);
            let recall = ratio(c.tp, support);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            f1 * support as f64
        })
        .sum();
    Ok(total / gold.len() as f64)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub support: usize,
    pub accuracy: f64,
    pub weighted_f1: f64,
}

impl Metrics {
    pub fn compute<S: Ord>(gold: &[S], pred: &[S]) -> Result<Self> {
        Ok(Metrics {
            support: gold.len(),
            accuracy: accuracy(gold, pred)?,
            weighted_f1: weighted_f1(gold, pred)?,
        })
    }
}

/// Metrics for the seen partition, the unseen partition and overall.
/// A partition with no test items is `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionedReport {
    pub seen: Option<Metrics>,
    pub unseen: Option<Metrics>,
    pub overall: Metrics,
}

/// A test item belongs to the seen partition iff its gold intent is seen.
pub fn partitioned_report(split: &GzslSplit, gold: &[String], pred: &[String]) -> Result<PartitionedReport> {
    check_lengths(gold.len(), pred.len())?;
    let mut seen = (Vec::new(), Vec::new());
    let mut unseen = (Vec::new(), Vec::new());
    for (g, p) in gold.iter().zip(pred) {
        let bucket = if split.seen.contains(g) {
            &mut seen
        } else if split.unseen.contains(g) {
            &mut unseen
        } else {
            return Err(Error::UnknownIntent(g.clone()));
        };
        bucket.0.push(g);
        bucket.1.push(p);
    }
    let part = |(g, p): (Vec<&String>, Vec<&String>)| -> Result<Option<Metrics>> {
        if g.is_empty() {
            Ok(None)
        } else {
            Metrics::compute(&g, &p).map(Some)
        }
    };
    Ok(PartitionedReport {
        seen: part(seen)?,
        unseen: part(unseen)?,
        overall: Metrics::compute(gold, pred)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl std::fmt::Display for MeanStd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.3} ± {:.3}", self.mean, self.std)
    }
}

/// Arithmetic mean and sample (n − 1) standard deviation; std is 0 for one run.
pub fn aggregate(values: &[f64]) -> Result<MeanStd> {
    if values.is_empty() {
        return Err(Error::Empty("runs"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(MeanStd { mean, std })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub metrics: PartitionedReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary {
    pub runs: usize,
    pub accuracy: MeanStd,
    pub weighted_f1: MeanStd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seen: Option<PartitionSummary>,
    pub unseen: Option<PartitionSummary>,
    pub overall: PartitionSummary,
}

/// Per-run metrics and their mean ± std across runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub fingerprint: String,
    pub runs: Vec<RunReport>,
    pub summary: Summary,
}

fn summarize(parts: Vec<Metrics>) -> Result<Option<PartitionSummary>> {
    if parts.is_empty() {
        return Ok(None);
    }
    let acc: Vec<f64> = parts.iter().map(|m| m.accuracy).collect();
    let f1: Vec<f64> = parts.iter().map(|m| m.weighted_f1).collect();
    Ok(Some(PartitionSummary {
        runs: parts.len(),
        accuracy: aggregate(&acc)?,
        weighted_f1: aggregate(&f1)?,
    }))
}

impl EvalReport {
    /// Partitions absent from some runs are averaged over the runs that have them.
    pub fn from_runs(fingerprint: impl Into<String>, runs: Vec<RunReport>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::Empty("runs"));
        }
        let collect =
            |f: fn(&PartitionedReport) -> Option<Metrics>| runs.iter().filter_map(|r| f(&r.metrics)).collect();
        let summary = Summary {
            seen: summarize(collect(|m| m.seen))?,
            unseen: summarize(collect(|m| m.unseen))?,
            overall: summarize(collect(|m| Some(m.overall)))?.expect("non-empty runs"),
        };
        Ok(EvalReport {
            fingerprint: fingerprint.into(),
            runs,
            summary,
        })
    }

    /// One table row per report: Unseen, Seen and Overall × Acc and F1.
    pub fn markdown_table(rows: &[(&str, &EvalReport)]) -> String {
        let mut out = String::from(
            "| Method | Unseen Acc | Unseen F1 | Seen Acc | Seen F1 | Overall Acc | Overall F1 |\n\
             |---|---|---|---|---|---|---|\n",
        );
        let cell = |p: Option<&PartitionSummary>| match p {
            Some(p) => [p.accuracy.to_string(), p.weighted_f1.to_string()],
            None => ["n/a".to_string(), "n/a".to_string()],
        };
        for (name, report) in rows {
            let s = &report.summary;
            let cells: Vec<String> = [cell(s.unseen.as_ref()), cell(s.seen.as_ref()), cell(Some(&s.overall))]
                .into_iter()
                .flatten()
                .collect();
            out.push_str(&format!("| {name} | {} |\n", cells.join(" | ")));
        }
        out
    }

    pub fn to_markdown(&self, name: &str) -> String {
        format!(
            "<!-- fingerprint {} seeds {} -->\n{}",
            self.fingerprint,
            self.runs
                .iter()
                .map(|r| r.seed.to_string())
                .collect::<Vec<_>>()
                .join(","),
            EvalReport::markdown_table(&[(name, self)])
        )
    }
}
