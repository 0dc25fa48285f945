//! Opinion mining over tweets for celebrity endorsement decisions.
//!
//! The library compares a brand against two candidate celebrities using two
//! independent methods: a lexicon scorer that counts opinion words in each
//! tweet, and a naive Bayes classifier that assigns emotions and polarity.
//! Results are aggregated into distributions, histograms, and word clouds,
//! then handed to a decision engine that produces a recommendation per
//! method. The `endorse` binary wires the stages into a CLI pipeline.

pub mod analytics;
pub mod bayes;
pub mod config;
pub mod decision;
pub mod ingest;
pub mod lexicon;
pub mod pipeline;
pub mod textprep;
