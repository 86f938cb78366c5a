//! Property tests of the generation loop over randomly generated layered
//! models and evidence subsets.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use casegen_core::claim::{OperatingMode, Predicate, RootGoalSpec, StructuredClaim};
use casegen_core::engine::{generate, Engine, GenerateOptions, SealOutcome};
use casegen_core::eval::{load_evaluation_trees, EvalContext};
use casegen_core::evidence::{EvidenceEntry, EvidenceStore, EvidenceType, FragmentCache};
use casegen_core::gsn::{Connective, GoalStatus, GsnGraph, NewNode, NodeKind};
use casegen_core::ids::{ComponentId, EntryId, FunctionId, ModeId, TreeId};
use casegen_core::model::{
    Component, ComponentKind, DependencyEdge, Function, FunctionCategory, SystemModel,
};

/// A random acyclic model: components sit on layers and may only depend on
/// strictly deeper layers, bounding the dependency depth by the layer count.
#[derive(Debug, Clone)]
struct RandomModel {
    layers: Vec<usize>,
    edges: Vec<(usize, usize)>,
    with_evidence: Vec<bool>,
    targets: Vec<usize>,
}

fn arb_random_model() -> impl Strategy<Value = RandomModel> {
    (2usize..=16)
        .prop_flat_map(|count| {
            (
                prop::collection::vec(0usize..8, count),
                prop::collection::vec(any::<bool>(), count),
                prop::collection::vec((0usize..count, 0usize..count), 0..count * 2),
                prop::collection::vec(0usize..count, 1..=3),
            )
        })
        .prop_map(|(layers, with_evidence, raw_edges, targets)| {
            let edges = raw_edges
                .into_iter()
                .filter(|(from, to)| layers[*from] < layers[*to])
                .collect();
            RandomModel {
                layers,
                edges,
                with_evidence,
                targets,
            }
        })
}

fn build_fixture(spec: &RandomModel) -> (SystemModel, EvidenceStore, RootGoalSpec) {
    let component_id = |i: usize| ComponentId::new(format!("c{i:02}"));
    let components: Vec<Component> = (0..spec.layers.len())
        .map(|i| Component {
            id: component_id(i),
            name: format!("component {i}"),
            kind: ComponentKind::Software,
            provides: [FunctionId::new("f")].into_iter().collect(),
        })
        .collect();
    let functions = vec![Function {
        id: FunctionId::new("f"),
        name: "f".into(),
        category: FunctionCategory::Other,
    }];
    let dependencies: Vec<DependencyEdge> = spec
        .edges
        .iter()
        .map(|(from, to)| DependencyEdge {
            from: component_id(*from),
            to: component_id(*to),
            mode_filter: None,
        })
        .collect();
    let model =
        SystemModel::from_parts(components, functions, dependencies, BTreeMap::new()).unwrap();
    let entries: Vec<EvidenceEntry> = spec
        .with_evidence
        .iter()
        .enumerate()
        .filter(|(_, has)| **has)
        .map(|(i, _)| EvidenceEntry {
            id: EntryId::new(format!("E{i:02}")),
            claim: format!("component {i} verified"),
            evidence_type: EvidenceType::Analysis,
            function: FunctionId::new("f"),
            components: [component_id(i)].into_iter().collect(),
            assumptions: BTreeSet::new(),
            claims: None,
            evaluation_tree: None,
        })
        .collect();
    let store = EvidenceStore::from_parts(vec![], entries, &model).unwrap();
    let targets: BTreeSet<ComponentId> = spec.targets.iter().map(|i| component_id(*i)).collect();
    let claim_spec = RootGoalSpec {
        claim: StructuredClaim {
            id: "random".into(),
            statement: "every target functions correctly".into(),
            variables: vec![],
            predicate: Predicate::Literal(true),
            target_components: targets.into_iter().collect(),
        },
        modes: vec![OperatingMode {
            id: ModeId::new("m1"),
            description: "the single mode".into(),
            active: true,
        }],
    };
    (model, store, claim_spec)
}

#[test]
fn generation_terminates_and_orphans_match_the_recursive_definition() {
    let mut runner = TestRunner::new(Config {
        cases: 100,
        ..Config::default()
    });
    runner
        .run(&arb_random_model(), |random| {
            let (model, store, spec) = build_fixture(&random);
            let mode = ModeId::new("m1");
            let outcome = generate(
                &spec,
                &model,
                &store,
                None,
                None,
                &GenerateOptions::default(),
            )
            .map_err(|e| TestCaseError::fail(format!("generation failed: {e}")))?;

            // Complete: nothing left open.
            let counts = outcome.graph.total_counts();
            prop_assert_eq!(counts.open, 0);

            // Orphans equal the recursive reading of the dependency graph.
            let mut reachable: BTreeSet<ComponentId> = BTreeSet::new();
            let mut frontier: Vec<ComponentId> = spec.claim.target_components.clone();
            while let Some(component) = frontier.pop() {
                if reachable.insert(component.clone()) {
                    frontier.extend(model.required_inputs(&component, &mode).unwrap());
                }
            }
            let expected: BTreeSet<ComponentId> = reachable
                .iter()
                .filter(|c| model.required_inputs(c, &mode).unwrap().is_empty())
                .filter(|c| store.query(c, &mode).is_empty())
                .cloned()
                .collect();
            let actual: BTreeSet<ComponentId> = outcome
                .graph
                .nodes()
                .filter(|n| n.status == Some(GoalStatus::Orphaned))
                .filter_map(|n| n.source_ref.clone().map(ComponentId::new))
                .collect();
            prop_assert_eq!(actual, expected);

            // Monotone progress: a goal acts exactly once over the run.
            let mut seen = BTreeSet::new();
            for record in &outcome.trace {
                for action in &record.actions {
                    prop_assert!(
                        seen.insert(action.goal.clone()),
                        "goal {} acted twice",
                        action.goal
                    );
                }
            }

            // Cache on and off agree after unrolling, on any model.
            let uncached = generate(
                &spec,
                &model,
                &store,
                None,
                None,
                &GenerateOptions {
                    no_cache: true,
                    ..Default::default()
                },
            )
            .map_err(|e| TestCaseError::fail(format!("uncached generation failed: {e}")))?;
            prop_assert_eq!(outcome.graph.unroll(), uncached.graph.unroll());
            Ok(())
        })
        .unwrap();
}

/// Two candidate entries for one component: the higher-confidence one wins,
/// and rescaling both trees by a common positive factor never changes the
/// winner. Ties break toward the lexicographically smaller entry id.
#[test]
fn seal_selection_is_argmax_with_lexicographic_ties() {
    fn tree_json(id: &str, score: f64) -> String {
        format!(
            r#"{{"id": "{id}", "root": {{"name": "root", "children": [
                {{"name": "quality-{id}", "weight": 1.0,
                  "assessments": [{{"key": "x", "score": {score}}}], "default": "x"}}
            ]}}}}"#
        )
    }

    let mut runner = TestRunner::new(Config {
        cases: 200,
        ..Config::default()
    });
    runner
        .run(
            &(0.0f64..=1.0, 0.0f64..=1.0, 0.05f64..=1.0),
            |(score_a, score_b, factor)| {
                let component = ComponentId::new("sensor");
                let model = SystemModel::from_parts(
                    vec![Component {
                        id: component.clone(),
                        name: "sensor".into(),
                        kind: ComponentKind::Hardware,
                        provides: [FunctionId::new("f")].into_iter().collect(),
                    }],
                    vec![Function {
                        id: FunctionId::new("f"),
                        name: "f".into(),
                        category: FunctionCategory::Sensing,
                    }],
                    vec![],
                    BTreeMap::new(),
                )
                .unwrap();
                let entry = |id: &str, tree: &str| EvidenceEntry {
                    id: EntryId::new(id),
                    claim: format!("claim {id}"),
                    evidence_type: EvidenceType::HwTest,
                    function: FunctionId::new("f"),
                    components: [component.clone()].into_iter().collect(),
                    assumptions: BTreeSet::new(),
                    claims: None,
                    evaluation_tree: Some(TreeId::new(tree)),
                };
                let store = EvidenceStore::from_parts(
                    vec![],
                    vec![entry("EA", "ta"), entry("EB", "tb")],
                    &model,
                )
                .unwrap();

                let run = |sa: f64, sb: f64| -> EntryId {
                    let trees = load_evaluation_trees(&format!(
                        r#"{{"schema": 1, "trees": [{}, {}]}}"#,
                        tree_json("ta", sa),
                        tree_json("tb", sb)
                    ))
                    .unwrap();
                    let context = EvalContext::default();
                    let mut engine =
                        Engine::new(&model, &store, Some(&trees), Some(&context), true);
                    let mut graph = GsnGraph::new("root", vec![ModeId::new("m1")]);
                    let root = graph.root().clone();
                    let strategy = graph
                        .attach(&root, NewNode::strategy("s", Connective::And, None))
                        .unwrap();
                    let goal = graph
                        .attach(
                            &strategy,
                            NewNode::goal("sensor works", Some(ModeId::new("m1")))
                                .with_source_ref("sensor"),
                        )
                        .unwrap();
                    let mut cache = FragmentCache::new();
                    match engine.seal_step(&mut graph, &goal, &mut cache).unwrap() {
                        SealOutcome::SealedByEvidence(id) => id,
                        other => panic!("expected evidence seal, got {other:?}"),
                    }
                };

                let winner = run(score_a, score_b);
                if score_a > score_b {
                    prop_assert_eq!(winner.as_str(), "EA");
                } else if score_b > score_a {
                    prop_assert_eq!(winner.as_str(), "EB");
                } else {
                    prop_assert_eq!(winner.as_str(), "EA");
                }
                // Positive rescaling preserves the argmax.
                let rescaled = run(score_a * factor, score_b * factor);
                prop_assert_eq!(winner, rescaled);
                Ok(())
            },
        )
        .unwrap();
}

/// The sealed evidence nodes of a complete case are exactly the store
/// entries of the reachable leaf components.
#[test]
fn sealed_leaves_reference_store_rows() {
    let mut runner = TestRunner::new(Config {
        cases: 64,
        ..Config::default()
    });
    runner
        .run(&arb_random_model(), |random| {
            let (model, store, spec) = build_fixture(&random);
            let outcome = generate(
                &spec,
                &model,
                &store,
                None,
                None,
                &GenerateOptions::default(),
            )
            .map_err(|e| TestCaseError::fail(format!("generation failed: {e}")))?;
            for node in outcome.graph.nodes() {
                if node.kind == NodeKind::Evidence {
                    let id = node.source_ref.clone().unwrap_or_default();
                    prop_assert!(
                        store.entry(&EntryId::new(&id)).is_some(),
                        "evidence references unknown entry {id}"
                    );
                }
            }
            Ok(())
        })
        .unwrap();
}

/// A hand-built model where the same mid-level component recurs at depths
/// two iterations apart, so its whole argument subtree (strategy included)
/// is reused from the cache rather than just a leaf evidence node.
#[test]
fn deep_fragment_reuse_during_generation() {
    let component = |id: &str| Component {
        id: ComponentId::new(id),
        name: id.to_string(),
        kind: ComponentKind::Software,
        provides: [FunctionId::new("f")].into_iter().collect(),
    };
    let edge = |from: &str, to: &str| DependencyEdge {
        from: ComponentId::new(from),
        to: ComponentId::new(to),
        mode_filter: None,
    };
    let model = SystemModel::from_parts(
        ["t1", "t2", "mid", "leaf", "x", "y"]
            .iter()
            .map(|id| component(id))
            .collect(),
        vec![Function {
            id: FunctionId::new("f"),
            name: "f".into(),
            category: FunctionCategory::Other,
        }],
        vec![
            edge("t1", "mid"),
            edge("t2", "x"),
            edge("x", "y"),
            edge("y", "mid"),
            edge("mid", "leaf"),
        ],
        BTreeMap::new(),
    )
    .unwrap();
    let store = EvidenceStore::from_parts(
        vec![],
        vec![EvidenceEntry {
            id: EntryId::new("E-leaf"),
            claim: "the leaf component is verified".into(),
            evidence_type: EvidenceType::Analysis,
            function: FunctionId::new("f"),
            components: [ComponentId::new("leaf")].into_iter().collect(),
            assumptions: BTreeSet::new(),
            claims: None,
            evaluation_tree: None,
        }],
        &model,
    )
    .unwrap();
    let spec = RootGoalSpec {
        claim: StructuredClaim {
            id: "deep-reuse".into(),
            statement: "both targets function correctly".into(),
            variables: vec![],
            predicate: Predicate::Literal(true),
            target_components: vec![ComponentId::new("t1"), ComponentId::new("t2")],
        },
        modes: vec![OperatingMode {
            id: ModeId::new("m1"),
            description: "the single mode".into(),
            active: true,
        }],
    };

    let cached = generate(
        &spec,
        &model,
        &store,
        None,
        None,
        &GenerateOptions::default(),
    )
    .unwrap();
    assert_eq!(cached.graph.total_counts().open, 0);
    assert_eq!(cached.graph.total_counts().orphaned, 0);
    assert!(cached.graph.validate().is_empty());

    // The second mid goal seals through the cached subtree, which carries a
    // strategy below it, and the reuse shows up as a shared parent pair.
    let mid_fragment_seal = cached
        .trace
        .iter()
        .flat_map(|r| r.actions.iter())
        .find(|a| {
            a.action == casegen_core::engine::Action::SealedByFragment
                && a.component.as_ref().map(|c| c.as_str()) == Some("mid")
        })
        .expect("mid seals by fragment");
    assert_eq!(mid_fragment_seal.detail, "fragment mid@m1");
    let shared_strategy = cached
        .graph
        .nodes()
        .find(|n| {
            n.kind == NodeKind::Goal
                && n.source_ref.as_deref() == Some("mid")
                && n.status == Some(GoalStatus::Expanded)
        })
        .map(|n| cached.graph.children(&n.id)[0].clone())
        .expect("an expanded mid goal");
    assert!(cached.graph.parents(&shared_strategy).count() >= 2);

    // Cache off: the same case with the shared subtree duplicated.
    let uncached = generate(
        &spec,
        &model,
        &store,
        None,
        None,
        &GenerateOptions {
            no_cache: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(cached.graph.unroll(), uncached.graph.unroll());
    assert!(cached.graph.len() < uncached.graph.len());
    assert!(cached.stats.store_queries < uncached.stats.store_queries);
}
