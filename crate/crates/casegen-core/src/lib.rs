//! Deterministic construction and evaluation of GSN safety cases.
//!
//! The crate turns three inputs into a complete argument graph:
//!
//! - a [`model::SystemModel`] describing components and their
//!   mode-conditional dependencies,
//! - an [`evidence::EvidenceStore`] of curated evidence rows, and
//! - a structured certification claim ([`claim::RootGoalSpec`]).
//!
//! [`engine::generate`] iterates seal, expand and fragment-linking steps
//! until every goal is sealed or orphaned, [`eval`] scores the result with
//! weighted evaluation trees and min/max propagation, and [`export`] writes
//! canonical JSON and DOT. Everything is deterministic: identical inputs
//! yield byte-identical outputs.

pub mod claim;
pub mod engine;
pub mod error;
pub mod eval;
pub mod evidence;
pub mod export;
pub mod gsn;
pub mod ids;
pub mod model;

pub use claim::{conjunctive_split, parse_claim, RootGoalSpec};
pub use engine::{generate, GenerateOptions, GenerationOutcome};
pub use evidence::{load_evidence_store, EvidenceStore};
pub use export::{export_dot, export_json, export_trace, import_json, RenderStyle};
pub use gsn::{GsnGraph, GsnNode, NodeId};
pub use model::{load_system_model, SystemModel};
