//! Opinion mining over short social-media messages.
//!
//! The pipeline: ingest messages into an append-only store, normalize text,
//! detect and disambiguate entity mentions against a small knowledge base,
//! classify message sentiment (lexicon rules or a trained linear model over
//! bag-of-words, cluster and embedding features), and aggregate the results
//! into time-bucketed reports.

pub mod analytics;
pub mod docstore;
pub mod entitykb;
pub mod sentiment;
pub mod textnorm;
pub mod wordrep;
