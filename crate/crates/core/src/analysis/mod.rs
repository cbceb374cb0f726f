//! Error analysis, stress tests and label acceptability.

pub mod confusion;
pub mod lm;
pub mod stress;

pub use confusion::{confusion_markdown, confusion_pairs, shares_word, ConfusionPair};
pub use lm::{
    acceptability, acceptability_compare, acceptability_markdown, sentence_acceptability, Acceptability,
    AcceptabilityRow, NgramLm, SentenceScore,
};
pub use stress::{
    features_for_predictions, start_trigram_counts, stem, stress_features, stress_report, BooleanFactor, NumericFactor,
    StressFeatures, StressReport,
};
