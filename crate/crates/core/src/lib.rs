//! Exact analysis of hidden-variable models for the two-party binary game
//! with one-way communication, plus Monte-Carlo simulation of the protocol
//! that reproduces singlet correlations with one bit per round.
//!
//! The pipeline: describe a model as kernels ([`dist::HvcModel`]), enumerate
//! its joint distribution exactly, and interrogate the joint - game scores
//! and the optimal receiving strategy ([`chsh`]), guessing-probability
//! information measures ([`info`]), and the locality/freedom condition
//! ledger ([`conditions`]). [`search`] hill-climbs over constraint-shaped
//! model families, [`zoo`] ships reference models with pinned expectations,
//! and [`model_file`] is the JSON interchange format.

pub mod chsh;
pub mod conditions;
pub mod dist;
pub mod error;
pub mod info;
pub mod model_file;
pub mod search;
pub mod toner_bacon;
pub mod zoo;

pub use error::{Error, Result, Violation};
