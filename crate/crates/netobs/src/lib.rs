//! Observability metrics for node-based network intrusions.
//!
//! Compromising a node of a communication network exposes its neighborhood:
//! its links, its contacts, and at deeper hop counts their contacts too.
//! This crate quantifies that exposure. It provides exact closed forms and
//! seeded Monte-Carlo estimators for four metric scopes (edges or nodes,
//! counted globally or per non-compromised individual), observability
//! curves over the compromised fraction with an area-under-curve summary,
//! density-matched synthetic graph families for comparison studies,
//! ingestion of timestamped contact logs and co-location sightings, and
//! city-scale estimates driven by census block densities.
//!
//! All randomness flows through explicit seeds; estimates are bit-identical
//! across runs and worker counts.

pub mod city;
pub mod curves;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod ingest;
pub mod mc;

pub use error::{Error, Result};
