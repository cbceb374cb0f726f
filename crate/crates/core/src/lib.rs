//! Generalized zero-shot intent recognition by sentence-pair scoring.
//!
//! Intent labels are turned into sentences ([`lexicalize`]), paired with
//! utterances into positive and negative training examples ([`sampling`]),
//! scored by a trainable pair model ([`encoder`]) and classified by argmax
//! over seen and unseen intents alike ([`gzsl`]). [`eval`] and [`analysis`]
//! cover metrics, stress tests and acceptability scoring; [`dataless`]
//! builds training data from intent labels alone.

pub mod analysis;
pub mod config;
pub mod corpus;
pub mod dataless;
pub mod encoder;
pub mod error;
pub mod eval;
pub mod gzsl;
pub mod jsonl;
pub mod lexicalize;
pub mod rng;
pub mod sampling;
pub mod synthetic;

pub use error::{Error, Result};
