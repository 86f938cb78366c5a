//! Shared helpers for integration tests: fixture loading and paths.
//!
//! Each test target uses a different slice of the fixture bundle.
#![allow(dead_code)]

use std::path::PathBuf;

use casegen_core::claim::{parse_claim, RootGoalSpec};
use casegen_core::eval::{load_context, load_evaluation_trees, EvalContext, EvaluationTrees};
use casegen_core::evidence::{load_evidence_store, EvidenceStore};
use casegen_core::model::{load_system_model, SystemModel};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read_fixture(relative: &str) -> String {
    let path = fixture_dir().join(relative);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read fixture {}: {e}", path.display()))
}

pub struct AebsFixture {
    pub model: SystemModel,
    pub store: EvidenceStore,
    pub spec: RootGoalSpec,
    pub trees: EvaluationTrees,
    pub context: EvalContext,
}

pub fn load_aebs() -> AebsFixture {
    let model = load_system_model(&read_fixture("aebs/model.json")).expect("model fixture");
    let store =
        load_evidence_store(&read_fixture("aebs/store.json"), &model).expect("store fixture");
    let spec = parse_claim(&read_fixture("aebs/aebs.claim")).expect("claim fixture");
    let trees = load_evaluation_trees(&read_fixture("aebs/trees.json")).expect("trees fixture");
    let context = load_context(&read_fixture("aebs/context.json")).expect("context fixture");
    AebsFixture {
        model,
        store,
        spec,
        trees,
        context,
    }
}
