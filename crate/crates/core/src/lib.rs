//! Document-level context models for retrieving out-of-vocabulary proper names.
//!
//! A speech recognizer can only emit words from its lexicon, so new proper
//! names in broadcast audio come out mangled or dropped. Given a transcript,
//! the task is to rank the proper names *missing* from the lexicon (OOV PNs)
//! by how relevant they are to the document, so that a downstream recovery
//! pass only has to search for a short list of candidates.
//!
//! The crate provides:
//!
//! - [`corpus`]: corpus ingestion, IV/OOV vocabulary construction, synthetic
//!   corpus generation and transcription-noise simulation;
//! - [`embeddings`]: skip-gram and PV-DBOW training, the AverageVec document
//!   representation, and cosine ranking;
//! - [`lda`]: a collapsed-Gibbs LDA baseline with held-out topic inference;
//! - [`neural`]: the document-level context models (uniform bag, anchor-weighted
//!   bag, and their concatenation) with two-phase early-stopped training;
//! - [`eval`]: Recall@N / MAP@N sweeps and report diffing.

pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod io;
pub mod lda;
pub mod matrix;
pub mod neural;

pub use error::{Error, Result};
