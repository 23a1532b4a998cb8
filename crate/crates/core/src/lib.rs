//! Data-trust verification toolkit.
//!
//! Desk-scale machinery for a trust that licenses training corpora and
//! verifies how they are used:
//!
//! - [`corpus`]: ingestion, deduplication, safety partitioning, datasheets,
//!   and eval-leakage scanning.
//! - [`signature`]: secret canary signatures poisoned into corpora, presence
//!   testing against trained models, and per-licensee watermarks for leak
//!   attribution.
//! - [`tinylm`]: a deterministic byte-level language model whose training
//!   emits replayable proof transcripts.
//! - [`pol`]: proof-of-learning verification (init test, segment replay,
//!   scaling-law consistency).
//! - [`deploy`]: deployment attestation by weight hash or out-of-distribution
//!   fingerprinting.
//! - [`ledger`]: hash-chained record of grants, verifications, royalties,
//!   and certifications.

pub mod config;
pub mod corpus;
pub mod error;
pub mod hash;
pub mod model;
pub mod prf;
pub mod seal;
pub mod stats;
pub mod textgen;
pub mod tinylm;

pub use error::{Error, ErrorKind, Result};
