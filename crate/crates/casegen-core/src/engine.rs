//! The generation loop: iterate seal and expand over every open goal, with
//! a fragment-linking pass after each iteration, until every goal is sealed
//! or orphaned.
//!
//! Iteration layout. Iteration 1 splits the root claim into one goal per
//! active operating mode under an OR strategy. Iteration 2 splits each mode
//! goal into one sub-goal per claim target under an AND strategy. From
//! iteration 3 on, every open goal is either sealed (fragment reuse first,
//! then direct evidence when its component has no active dependencies),
//! expanded one dependency level down, or orphaned when neither is
//! possible. The loop is breadth-wise: all goals open at the start of an
//! iteration are processed within it.
//!
//! Evidence is considered sufficient for a goal only when the goal's
//! component has no active dependencies in the goal's mode; a component
//! with dependencies is always decomposed, even when the store carries a
//! row for it. Among sufficient candidates the one with the highest
//! confidence wins, with lexicographic entry-id tie-break, and candidates
//! whose coverage containment fails are disqualified.
//!
//! `generate` is a pure function of its inputs: identical inputs produce a
//! byte-identical graph and trace. Modes share nothing but the immutable
//! model and store, so per-mode subtrees can be generated concurrently.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::claim::{self, RootGoalSpec};
use crate::error::EngineError;
use crate::eval::{self, EvalContext, EvaluationTrees};
use crate::evidence::{EvidenceEntry, EvidenceStore, FragmentCache, FragmentKey, GsnFragment};
use crate::gsn::{Connective, GoalStatus, GsnGraph, GsnNode, NewNode, NodeId, NodeKind};
use crate::ids::{ComponentId, EntryId, ModeId};
use crate::model::SystemModel;

// ============================================================================
// Outcomes and trace records
// ============================================================================

/// Result of one seal attempt on an open goal.
#[derive(Debug, Clone, PartialEq)]
pub enum SealOutcome {
    SealedByEvidence(EntryId),
    SealedByFragment(FragmentKey),
    NeedsExpansion,
    Orphaned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    SealedByEvidence,
    SealedByFragment,
    Expanded,
    Orphaned,
}

/// One per-goal action inside an iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionRecord {
    pub goal: NodeId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<ComponentId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeId>,
    pub action: Action,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: u32,
    pub actions: Vec<ActionRecord>,
}

/// Instrumentation counters for one generation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// Evidence-store queries issued by seal attempts.
    pub store_queries: u64,
    /// Goals sealed by fragment reuse.
    pub fragment_hits: u64,
    /// Fragments stored by linking passes.
    pub fragments_stored: u64,
}

impl RunStats {
    fn absorb(&mut self, other: RunStats) {
        self.store_queries += other.store_queries;
        self.fragment_hits += other.fragment_hits;
        self.fragments_stored += other.fragments_stored;
    }
}

#[derive(Debug, Clone)]
pub struct GenerationOutcome {
    pub graph: GsnGraph,
    pub trace: Vec<IterationRecord>,
    pub stats: RunStats,
}

#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    /// Disable the fragment cache: every recurrence is re-decomposed.
    pub no_cache: bool,
    /// Restrict generation to one active mode.
    pub mode_filter: Option<ModeId>,
    /// Generate per-mode subtrees on worker threads. Output is identical to
    /// the sequential run.
    pub parallel_modes: bool,
}

// ============================================================================
// Engine
// ============================================================================

/// Seal/expand/link operators bound to one immutable model and store.
pub struct Engine<'a> {
    model: &'a SystemModel,
    store: &'a EvidenceStore,
    trees: Option<&'a EvaluationTrees>,
    context: Option<&'a EvalContext>,
    use_cache: bool,
    pub stats: RunStats,
}

impl<'a> Engine<'a> {
    pub fn new(
        model: &'a SystemModel,
        store: &'a EvidenceStore,
        trees: Option<&'a EvaluationTrees>,
        context: Option<&'a EvalContext>,
        use_cache: bool,
    ) -> Self {
        Engine {
            model,
            store,
            trees,
            context,
            use_cache,
            stats: RunStats::default(),
        }
    }

    /// Confidence of an entry under the run context; entries without an
    /// evaluation tree score a neutral 1.0.
    fn entry_confidence(&self, entry: &EvidenceEntry) -> Result<f64, EngineError> {
        let Some(tree_id) = &entry.evaluation_tree else {
            return Ok(1.0);
        };
        let Some(trees) = self.trees else {
            return Ok(1.0);
        };
        let Some(tree) = trees.get(tree_id) else {
            return Err(EngineError::Eval(crate::error::EvalError::UnknownTree {
                entry: entry.id.clone(),
                tree: tree_id.clone(),
            }));
        };
        let empty = EvalContext::default();
        let context = self.context.unwrap_or(&empty);
        Ok(eval::evidence_confidence(tree, context)?.value)
    }

    /// Try to close one open goal. Fragment reuse takes precedence over the
    /// store query; direct evidence requires the component to have no
    /// active dependencies; a goal with neither evidence nor dependencies
    /// is orphaned.
    pub fn seal_step(
        &mut self,
        graph: &mut GsnGraph,
        goal: &NodeId,
        cache: &mut FragmentCache,
    ) -> Result<SealOutcome, EngineError> {
        let node = graph
            .node(goal)
            .ok_or_else(|| EngineError::UnknownGoal(goal.to_string()))?;
        if node.kind != NodeKind::Goal || node.status != Some(GoalStatus::Open) {
            return Err(EngineError::GoalNotOpen(goal.to_string()));
        }
        let (Some(component), Some(mode)) = (
            node.source_ref.clone().map(ComponentId::new),
            node.mode.clone(),
        ) else {
            // Claim-level goals have no component; they always decompose.
            return Ok(SealOutcome::NeedsExpansion);
        };
        let goal_assumptions = node.assumptions.clone();

        if self.use_cache {
            let key = FragmentKey {
                component: component.clone(),
                mode: mode.clone(),
            };
            if let Some(fragment) = cache.get(&key) {
                let live_root = fragment.live_root.clone();
                let argument_children: Vec<NodeId> = graph
                    .children(&live_root)
                    .iter()
                    .filter(|c| {
                        matches!(
                            graph.node(c).map(|n| n.kind),
                            Some(NodeKind::Evidence) | Some(NodeKind::Strategy)
                        )
                    })
                    .cloned()
                    .collect();
                let mut sealed_by_evidence = false;
                for child in &argument_children {
                    graph.link(goal, child)?;
                    if graph.node(child).map(|n| n.kind) == Some(NodeKind::Evidence) {
                        sealed_by_evidence = true;
                    }
                }
                let status = if sealed_by_evidence {
                    GoalStatus::Sealed
                } else {
                    GoalStatus::Expanded
                };
                graph.set_goal_status(goal, status)?;
                let inherited = graph
                    .node(&live_root)
                    .map(|n| n.assumptions.clone())
                    .unwrap_or_default();
                graph.extend_assumptions(goal, &inherited);
                self.stats.fragment_hits += 1;
                return Ok(SealOutcome::SealedByFragment(key));
            }
        }

        self.stats.store_queries += 1;
        let candidates = self.store.query(&component, &mode);

        let dependencies = self.model.required_inputs(&component, &mode)?;
        if !dependencies.is_empty() {
            return Ok(SealOutcome::NeedsExpansion);
        }

        // Coverage containment disqualifies candidates whose assumptions are
        // not covered by the goal context. Goal claim-id sets are empty for
        // generated goals, so the claims side holds trivially here.
        let goal_claims: BTreeSet<String> = BTreeSet::new();
        let mut qualified: Vec<&EvidenceEntry> = Vec::new();
        for entry in candidates {
            let report = eval::coverage_check(entry, &goal_claims, &goal_assumptions);
            if report.claims_superset && report.assumptions_subset {
                qualified.push(entry);
            }
        }

        if qualified.is_empty() {
            graph.set_goal_status(goal, GoalStatus::Orphaned)?;
            return Ok(SealOutcome::Orphaned);
        }

        // Highest confidence wins; entry-id order breaks ties because the
        // candidates arrive lexicographically sorted.
        let mut best: Option<(&EvidenceEntry, f64)> = None;
        for entry in qualified {
            let confidence = self.entry_confidence(entry)?;
            let better = match &best {
                None => true,
                Some((_, best_confidence)) => confidence > *best_confidence,
            };
            if better {
                best = Some((entry, confidence));
            }
        }
        let (entry, _) = best.expect("non-empty candidate list");
        let mode_for_node = graph.node(goal).and_then(|n| n.mode.clone());
        graph.attach(
            goal,
            NewNode::evidence(entry.claim.clone(), entry.id.to_string(), mode_for_node),
        )?;
        graph.set_goal_status(goal, GoalStatus::Sealed)?;
        Ok(SealOutcome::SealedByEvidence(entry.id.clone()))
    }

    /// Decompose a goal one dependency level down: one sub-goal per required
    /// input under an AND strategy. Each sub-goal receives the assumption
    /// set of its component's evidence rows, and ancestors are extended to
    /// keep the superset rule.
    pub fn expand_step(
        &mut self,
        graph: &mut GsnGraph,
        goal: &NodeId,
    ) -> Result<Vec<NodeId>, EngineError> {
        let node = graph
            .node(goal)
            .ok_or_else(|| EngineError::UnknownGoal(goal.to_string()))?;
        if node.kind != NodeKind::Goal || node.status != Some(GoalStatus::Open) {
            return Err(EngineError::GoalNotOpen(goal.to_string()));
        }
        let component = node
            .source_ref
            .clone()
            .map(ComponentId::new)
            .ok_or_else(|| EngineError::UnknownGoal(goal.to_string()))?;
        let mode = node
            .mode
            .clone()
            .ok_or_else(|| EngineError::UnknownGoal(goal.to_string()))?;

        let dependencies = self.model.required_inputs(&component, &mode)?;
        if dependencies.is_empty() {
            return Err(EngineError::EmptyExpansion {
                goal: goal.to_string(),
                component,
                mode,
            });
        }

        let strategy = graph.attach(
            goal,
            NewNode::strategy(
                format!("argue over the required inputs of {component}"),
                Connective::And,
                Some(mode.clone()),
            ),
        )?;
        let mut created = Vec::with_capacity(dependencies.len());
        for dependency in &dependencies {
            created.push(self.attach_component_goal(graph, &strategy, dependency, &mode)?);
        }
        graph.set_goal_status(goal, GoalStatus::Expanded)?;
        Ok(created)
    }

    /// Create one component-backed sub-goal with its assumption nodes, and
    /// extend the assumption sets up the ancestor chain.
    fn attach_component_goal(
        &self,
        graph: &mut GsnGraph,
        parent: &NodeId,
        component: &ComponentId,
        mode: &ModeId,
    ) -> Result<NodeId, EngineError> {
        let label = self
            .store
            .component_claim_text(component)
            .map(str::to_string)
            .unwrap_or_else(|| format!("component {component} functions correctly"));
        let assumptions = self.store.component_assumptions(component);
        let sub_goal = graph.attach(
            parent,
            NewNode::goal(label, Some(mode.clone()))
                .with_source_ref(component.to_string())
                .with_assumptions(assumptions.clone()),
        )?;
        for assumption in &assumptions {
            let text = self
                .store
                .assumption(assumption)
                .map(|a| a.text.clone())
                .unwrap_or_else(|| assumption.to_string());
            graph.attach(
                &sub_goal,
                NewNode::assumption(text, assumption, Some(mode.clone())),
            )?;
        }
        graph.extend_assumptions(parent, &assumptions);
        Ok(sub_goal)
    }

    /// Cache every maximal fully-sealed component subtree not cached yet.
    pub fn link_pass(
        &mut self,
        graph: &GsnGraph,
        cache: &mut FragmentCache,
    ) -> Result<u64, EngineError> {
        let mut stored = 0;
        let goals: Vec<(NodeId, ComponentId, ModeId)> = graph
            .nodes()
            .filter(|n| n.kind == NodeKind::Goal)
            .filter_map(|n| {
                let component = n.source_ref.clone().map(ComponentId::new)?;
                let mode = n.mode.clone()?;
                Some((n.id.clone(), component, mode))
            })
            .collect();
        for (goal, component, mode) in goals {
            let key = FragmentKey { component, mode };
            if cache.contains(&key) {
                continue;
            }
            if !graph.subtree_fully_sealed(&goal) {
                continue;
            }
            let subtree = graph.subgraph(&goal)?;
            let mut scores = BTreeMap::new();
            for node in subtree.nodes() {
                if node.kind == NodeKind::Evidence {
                    let confidence = match node
                        .source_ref
                        .as_deref()
                        .and_then(|id| self.store.entry(&EntryId::new(id)))
                    {
                        Some(entry) => self.entry_confidence(entry)?,
                        None => 1.0,
                    };
                    scores.insert(node.id.clone(), confidence);
                }
            }
            let confidence = eval::propagate(&subtree, &scores)?.root;
            cache.put(GsnFragment {
                key,
                subtree,
                live_root: goal,
                confidence,
            })?;
            stored += 1;
        }
        self.stats.fragments_stored += stored;
        Ok(stored)
    }
}

// ============================================================================
// Generation
// ============================================================================

struct ModeRun {
    graph: GsnGraph,
    records: Vec<IterationRecord>,
    stats: RunStats,
}

/// Generate a complete argument graph from the claim, model and store.
pub fn generate(
    spec: &RootGoalSpec,
    model: &SystemModel,
    store: &EvidenceStore,
    trees: Option<&EvaluationTrees>,
    context: Option<&EvalContext>,
    options: &GenerateOptions,
) -> Result<GenerationOutcome, EngineError> {
    let mut active_modes = spec.active_modes();
    if let Some(filter) = &options.mode_filter {
        active_modes.retain(|m| &m.id == filter);
        if active_modes.is_empty() {
            return Err(EngineError::UnknownMode(filter.clone()));
        }
    }
    let split = claim::conjunctive_split(&spec.claim, model, store)?;
    let mode_ids: Vec<ModeId> = active_modes.iter().map(|m| m.id.clone()).collect();

    let mut graph = GsnGraph::new(spec.claim.statement.clone(), mode_ids.clone());
    let root = graph.root().clone();
    graph.attach(
        &root,
        NewNode::context(
            format!(
                "criterion: {}",
                claim::predicate_text(&spec.claim.predicate)
            ),
            None,
        ),
    )?;
    let or_strategy = graph.attach(
        &root,
        NewNode::strategy(
            "argue over the active operating modes",
            Connective::Or,
            None,
        ),
    )?;

    let mut mode_goals: Vec<(GsnNode, &claim::OperatingMode)> = Vec::new();
    for mode in &active_modes {
        let goal_id = graph.attach(
            &or_strategy,
            NewNode::goal(
                format!("{} [{}]", spec.claim.statement, mode.id),
                Some(mode.id.clone()),
            ),
        )?;
        let node = graph.node(&goal_id).expect("just attached").clone();
        mode_goals.push((node, mode));
    }
    graph.set_goal_status(&root, GoalStatus::Expanded)?;

    let trace_head = IterationRecord {
        iteration: 1,
        actions: vec![ActionRecord {
            goal: root.clone(),
            component: None,
            mode: None,
            action: Action::Expanded,
            detail: format!(
                "modes: {}",
                mode_ids
                    .iter()
                    .map(ModeId::as_str)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }],
    };

    let run_one =
        |(node, mode): &(GsnNode, &claim::OperatingMode)| -> Result<ModeRun, EngineError> {
            let mut engine = Engine::new(model, store, trees, context, !options.no_cache);
            run_mode(&mut engine, node.clone(), mode, &split)
        };

    let results: Vec<ModeRun> = if options.parallel_modes {
        std::thread::scope(|scope| {
            let handles: Vec<_> = mode_goals
                .iter()
                .map(|entry| scope.spawn(move || run_one(entry)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("mode worker panicked"))
                .collect::<Result<Vec<_>, _>>()
        })?
    } else {
        mode_goals
            .iter()
            .map(run_one)
            .collect::<Result<Vec<_>, _>>()?
    };

    let mut stats = RunStats::default();
    let mut trace = vec![trace_head];
    let max_iteration = results
        .iter()
        .flat_map(|r| r.records.iter().map(|rec| rec.iteration))
        .max()
        .unwrap_or(1);
    for iteration in 2..=max_iteration {
        let mut actions = Vec::new();
        for result in &results {
            if let Some(record) = result.records.iter().find(|r| r.iteration == iteration) {
                actions.extend(record.actions.iter().cloned());
            }
        }
        trace.push(IterationRecord { iteration, actions });
    }
    let mut root_assumptions = BTreeSet::new();
    for result in results {
        if let Some(mode_root) = result.graph.node(result.graph.root()) {
            root_assumptions.extend(mode_root.assumptions.iter().cloned());
        }
        graph.absorb(result.graph);
        stats.absorb(result.stats);
    }
    graph.extend_assumptions(&root, &root_assumptions);

    Ok(GenerationOutcome {
        graph,
        trace,
        stats,
    })
}

/// Run the iterative loop for one mode, starting from the mode goal.
fn run_mode(
    engine: &mut Engine,
    mode_goal: GsnNode,
    mode: &claim::OperatingMode,
    split: &[(String, ComponentId)],
) -> Result<ModeRun, EngineError> {
    let mode_goal_id = mode_goal.id.clone();
    let mut graph = GsnGraph::with_root_node(mode_goal, vec![mode.id.clone()]);
    let mut cache = FragmentCache::new();
    let mut records = Vec::new();

    graph.attach(
        &mode_goal_id,
        NewNode::context(mode.description.clone(), Some(mode.id.clone())),
    )?;

    // Iteration 2: conjunctive split over the claim targets.
    let and_strategy = graph.attach(
        &mode_goal_id,
        NewNode::strategy(
            "argue each target component in conjunction",
            Connective::And,
            Some(mode.id.clone()),
        ),
    )?;
    for (_, component) in split {
        engine.attach_component_goal(&mut graph, &and_strategy, component, &mode.id)?;
    }
    graph.set_goal_status(&mode_goal_id, GoalStatus::Expanded)?;
    records.push(IterationRecord {
        iteration: 2,
        actions: vec![ActionRecord {
            goal: mode_goal_id.clone(),
            component: None,
            mode: Some(mode.id.clone()),
            action: Action::Expanded,
            detail: format!(
                "targets: {}",
                split
                    .iter()
                    .map(|(_, c)| c.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }],
    });

    let cap = 2 + engine.model.longest_chain(&mode.id).max(1);
    let mut iteration = 2u32;
    loop {
        iteration += 1;
        let open = graph.goals_with_status(GoalStatus::Open);
        if open.is_empty() {
            break;
        }
        if iteration > cap {
            return Err(EngineError::IterationCapExceeded { cap });
        }

        let mut actions = Vec::new();
        let mut to_expand = Vec::new();
        for goal in open {
            let node = graph.node(&goal).expect("open goal exists");
            let component = node.source_ref.clone().map(ComponentId::new);
            let node_mode = node.mode.clone();
            match engine.seal_step(&mut graph, &goal, &mut cache)? {
                SealOutcome::SealedByEvidence(entry) => actions.push(ActionRecord {
                    goal,
                    component,
                    mode: node_mode,
                    action: Action::SealedByEvidence,
                    detail: format!("entry {entry}"),
                }),
                SealOutcome::SealedByFragment(key) => actions.push(ActionRecord {
                    goal,
                    component,
                    mode: node_mode,
                    action: Action::SealedByFragment,
                    detail: format!("fragment {key}"),
                }),
                SealOutcome::Orphaned => actions.push(ActionRecord {
                    goal,
                    component,
                    mode: node_mode,
                    action: Action::Orphaned,
                    detail: "no usable evidence and no active dependencies".to_string(),
                }),
                SealOutcome::NeedsExpansion => to_expand.push((goal, component, node_mode)),
            }
        }
        for (goal, component, node_mode) in to_expand {
            let created = engine.expand_step(&mut graph, &goal)?;
            let children: Vec<String> = created
                .iter()
                .filter_map(|id| graph.node(id))
                .filter_map(|n| n.source_ref.clone())
                .collect();
            actions.push(ActionRecord {
                goal,
                component,
                mode: node_mode,
                action: Action::Expanded,
                detail: format!("sub-goals: {}", children.join(", ")),
            });
        }
        if engine.use_cache {
            engine.link_pass(&graph, &mut cache)?;
        }
        records.push(IterationRecord { iteration, actions });
    }

    Ok(ModeRun {
        graph,
        records,
        stats: engine.stats,
    })
}
