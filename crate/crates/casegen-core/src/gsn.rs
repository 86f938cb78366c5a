//! The typed GSN argument graph and its structural rules.
//!
//! The graph is a rooted DAG, not a strict tree: fragment reuse shares
//! sealed subtrees between branches instead of duplicating them. Renderers
//! that want a tree call [`GsnGraph::unroll`].
//!
//! Structural rules enforced here:
//! - children of a goal: at most one strategy or exactly one evidence node,
//!   plus any number of assumption/context nodes;
//! - children of a strategy: goals only, at least one;
//! - a sealed goal has exactly one evidence child; an orphaned goal has no
//!   argument children at all;
//! - the assumption set of a goal is a superset of the assumption sets of
//!   its descendant goals.
//!
//! Node ids are derived from the parent id plus a per-kind ordinal, so two
//! generation runs over identical inputs mint identical ids, and an
//! unrolled shared subtree reproduces the ids a duplicate expansion would
//! have produced.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::ids::{AssumptionId, ModeId};

// ============================================================================
// Node identity
// ============================================================================

/// Structural node id such as `g0.s0.g1.e0`.
///
/// Ordering is segment-wise with numeric ordinals, so `g0.s0.g2` sorts
/// before `g0.s0.g10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn root() -> Self {
        NodeId("g0".to_string())
    }

    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn child(&self, kind: NodeKind, ordinal: usize) -> NodeId {
        NodeId(format!("{}.{}{}", self.0, kind.id_letter(), ordinal))
    }
}

impl Ord for NodeId {
    /// Byte-wise natural order: digit runs compare numerically, so `g2`
    /// sorts before `g10`. Numerically equal runs with different spellings
    /// (leading zeros) fall back to byte order to stay consistent with
    /// equality.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let a = self.0.as_bytes();
        let b = other.0.as_bytes();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&ca), Some(&cb)) => {
                    if ca.is_ascii_digit() && cb.is_ascii_digit() {
                        let run_a = {
                            let start = i;
                            while i < a.len() && a[i].is_ascii_digit() {
                                i += 1;
                            }
                            &a[start..i]
                        };
                        let run_b = {
                            let start = j;
                            while j < b.len() && b[j].is_ascii_digit() {
                                j += 1;
                            }
                            &b[start..j]
                        };
                        let trim = |run: &'_ [u8]| -> usize {
                            run.iter().take_while(|c| **c == b'0').count()
                        };
                        let (ta, tb) = (&run_a[trim(run_a)..], &run_b[trim(run_b)..]);
                        let numeric = ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb));
                        match numeric.then_with(|| run_a.cmp(run_b)) {
                            Ordering::Equal => {}
                            decided => return decided,
                        }
                    } else {
                        match ca.cmp(&cb) {
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                            }
                            decided => return decided,
                        }
                    }
                }
            }
        }
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

// ============================================================================
// Node types
// ============================================================================

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Goal,
    Strategy,
    Assumption,
    Context,
    Evidence,
}

impl NodeKind {
    fn id_letter(self) -> char {
        match self {
            NodeKind::Goal => 'g',
            NodeKind::Strategy => 's',
            NodeKind::Assumption => 'a',
            NodeKind::Context => 'c',
            NodeKind::Evidence => 'e',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Goal => "goal",
            NodeKind::Strategy => "strategy",
            NodeKind::Assumption => "assumption",
            NodeKind::Context => "context",
            NodeKind::Evidence => "evidence",
        }
    }
}

/// Lifecycle of a goal node.
///
/// `Expanded` marks goals whose argument continues below a strategy; the
/// summary surface only reports open, sealed and orphaned counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalStatus {
    Open,
    Sealed,
    Expanded,
    Orphaned,
}

/// Logical gating function carried by a strategy node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Connective {
    And,
    Or,
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connective::And => f.write_str("AND"),
            Connective::Or => f.write_str("OR"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GsnNode {
    pub id: NodeId,
    pub kind: NodeKind,
    pub label: String,
    /// Present iff `kind == Goal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<GoalStatus>,
    /// Present iff `kind == Strategy`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connective: Option<Connective>,
    /// Evidence entry id, component id, assumption id or fragment key.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_ref: Option<String>,
    /// Operating mode the node belongs to; `None` for the shared root scope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeId>,
    /// Accumulated assumption set (goals only).
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub assumptions: BTreeSet<AssumptionId>,
}

/// Payload for [`GsnGraph::attach`]; the graph assigns the node id.
#[derive(Debug, Clone)]
pub struct NewNode {
    pub kind: NodeKind,
    pub label: String,
    pub connective: Option<Connective>,
    pub source_ref: Option<String>,
    pub mode: Option<ModeId>,
    pub assumptions: BTreeSet<AssumptionId>,
}

impl NewNode {
    pub fn goal(label: impl Into<String>, mode: Option<ModeId>) -> Self {
        NewNode {
            kind: NodeKind::Goal,
            label: label.into(),
            connective: None,
            source_ref: None,
            mode,
            assumptions: BTreeSet::new(),
        }
    }

    pub fn strategy(
        label: impl Into<String>,
        connective: Connective,
        mode: Option<ModeId>,
    ) -> Self {
        NewNode {
            kind: NodeKind::Strategy,
            label: label.into(),
            connective: Some(connective),
            source_ref: None,
            mode,
            assumptions: BTreeSet::new(),
        }
    }

    pub fn evidence(
        label: impl Into<String>,
        source_ref: impl Into<String>,
        mode: Option<ModeId>,
    ) -> Self {
        NewNode {
            kind: NodeKind::Evidence,
            label: label.into(),
            connective: None,
            source_ref: Some(source_ref.into()),
            mode,
            assumptions: BTreeSet::new(),
        }
    }

    pub fn assumption(label: impl Into<String>, id: &AssumptionId, mode: Option<ModeId>) -> Self {
        NewNode {
            kind: NodeKind::Assumption,
            label: label.into(),
            connective: None,
            source_ref: Some(id.to_string()),
            mode,
            assumptions: BTreeSet::new(),
        }
    }

    pub fn context(label: impl Into<String>, mode: Option<ModeId>) -> Self {
        NewNode {
            kind: NodeKind::Context,
            label: label.into(),
            connective: None,
            source_ref: None,
            mode,
            assumptions: BTreeSet::new(),
        }
    }

    pub fn with_source_ref(mut self, source_ref: impl Into<String>) -> Self {
        self.source_ref = Some(source_ref.into());
        self
    }

    pub fn with_assumptions(mut self, assumptions: BTreeSet<AssumptionId>) -> Self {
        self.assumptions = assumptions;
        self
    }
}

// ============================================================================
// Graph
// ============================================================================

/// A structural rule violation reported by [`GsnGraph::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub nodes: Vec<NodeId>,
    pub message: String,
}

/// Open/sealed/orphaned goal counts, reported per mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StatusCounts {
    pub open: usize,
    pub sealed: usize,
    pub orphaned: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GsnGraph {
    nodes: BTreeMap<NodeId, GsnNode>,
    /// Children in creation order; the order is part of the canonical form.
    children: BTreeMap<NodeId, Vec<NodeId>>,
    parents: BTreeMap<NodeId, BTreeSet<NodeId>>,
    root: NodeId,
    modes: Vec<ModeId>,
}

impl GsnGraph {
    /// Create a graph holding only the root goal.
    pub fn new(root_label: impl Into<String>, modes: Vec<ModeId>) -> Self {
        let root = NodeId::root();
        let mut nodes = BTreeMap::new();
        nodes.insert(
            root.clone(),
            GsnNode {
                id: root.clone(),
                kind: NodeKind::Goal,
                label: root_label.into(),
                status: Some(GoalStatus::Open),
                connective: None,
                source_ref: None,
                mode: None,
                assumptions: BTreeSet::new(),
            },
        );
        GsnGraph {
            nodes,
            children: BTreeMap::new(),
            parents: BTreeMap::new(),
            root,
            modes,
        }
    }

    /// Create a graph whose root is an existing node value. Used when a
    /// per-mode subtree is generated independently and merged later.
    pub fn with_root_node(root: GsnNode, modes: Vec<ModeId>) -> Self {
        let id = root.id.clone();
        let mut nodes = BTreeMap::new();
        nodes.insert(id.clone(), root);
        GsnGraph {
            nodes,
            children: BTreeMap::new(),
            parents: BTreeMap::new(),
            root: id,
            modes,
        }
    }

    pub fn root(&self) -> &NodeId {
        &self.root
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn node(&self, id: &NodeId) -> Option<&GsnNode> {
        self.nodes.get(id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GsnNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, id: &NodeId) -> &[NodeId] {
        self.children.get(id).map_or(&[], |c| c.as_slice())
    }

    pub fn parents(&self, id: &NodeId) -> impl Iterator<Item = &NodeId> {
        self.parents.get(id).into_iter().flatten()
    }

    /// Parent-to-child edges in canonical order (parents sorted, children in
    /// creation order).
    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> {
        self.children
            .iter()
            .flat_map(|(parent, kids)| kids.iter().map(move |child| (parent, child)))
    }

    pub fn edge_count(&self) -> usize {
        self.children.values().map(Vec::len).sum()
    }

    /// Attach a new node under `parent`, enforcing the child-kind rules.
    /// Returns the derived id of the new node.
    pub fn attach(&mut self, parent: &NodeId, node: NewNode) -> Result<NodeId, GraphError> {
        self.check_child_rules(parent, node.kind)?;
        let ordinal = self
            .children(parent)
            .iter()
            .filter(|c| self.nodes[*c].kind == node.kind)
            .count();
        let id = parent.child(node.kind, ordinal);
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateNode(id.to_string()));
        }
        self.nodes.insert(
            id.clone(),
            GsnNode {
                id: id.clone(),
                kind: node.kind,
                label: node.label,
                status: (node.kind == NodeKind::Goal).then_some(GoalStatus::Open),
                connective: node.connective,
                source_ref: node.source_ref,
                mode: node.mode,
                assumptions: node.assumptions,
            },
        );
        self.children
            .entry(parent.clone())
            .or_default()
            .push(id.clone());
        self.parents
            .entry(id.clone())
            .or_default()
            .insert(parent.clone());
        // A freshly minted node has no children, so it cannot close a cycle.
        Ok(id)
    }

    /// Link `parent` to an existing node, sharing its subtree. Used by
    /// fragment reuse. Enforces the same child-kind rules as `attach` and
    /// rejects links that would introduce a cycle.
    pub fn link(&mut self, parent: &NodeId, child: &NodeId) -> Result<(), GraphError> {
        let child_kind = self
            .nodes
            .get(child)
            .ok_or_else(|| GraphError::UnknownNode(child.to_string()))?
            .kind;
        self.check_child_rules(parent, child_kind)?;
        if self.reaches(child, parent) {
            return Err(GraphError::CycleIntroduced {
                parent: parent.to_string(),
                child: child.to_string(),
            });
        }
        self.children
            .entry(parent.clone())
            .or_default()
            .push(child.clone());
        self.parents
            .entry(child.clone())
            .or_default()
            .insert(parent.clone());
        debug_assert!(self.find_cycle_from(&self.root).is_none());
        Ok(())
    }

    fn check_child_rules(&self, parent: &NodeId, child_kind: NodeKind) -> Result<(), GraphError> {
        let parent_node = self
            .nodes
            .get(parent)
            .ok_or_else(|| GraphError::UnknownNode(parent.to_string()))?;
        let reject = |child: NodeKind| GraphError::KindRule {
            parent: parent.to_string(),
            parent_kind: parent_node.kind.name(),
            child_kind: child.name(),
        };
        match parent_node.kind {
            NodeKind::Goal => match child_kind {
                NodeKind::Assumption | NodeKind::Context => Ok(()),
                NodeKind::Evidence => {
                    if parent_node.status == Some(GoalStatus::Sealed) {
                        return Err(GraphError::AlreadySealed(parent.to_string()));
                    }
                    if self.has_child_of_kind(parent, NodeKind::Evidence) {
                        return Err(GraphError::AlreadySealed(parent.to_string()));
                    }
                    if self.has_child_of_kind(parent, NodeKind::Strategy) {
                        return Err(reject(NodeKind::Evidence));
                    }
                    Ok(())
                }
                NodeKind::Strategy => {
                    if self.has_child_of_kind(parent, NodeKind::Strategy) {
                        return Err(GraphError::AlreadyExpanded(parent.to_string()));
                    }
                    if self.has_child_of_kind(parent, NodeKind::Evidence) {
                        return Err(reject(NodeKind::Strategy));
                    }
                    Ok(())
                }
                NodeKind::Goal => Err(reject(NodeKind::Goal)),
            },
            NodeKind::Strategy => match child_kind {
                NodeKind::Goal => Ok(()),
                other => Err(reject(other)),
            },
            NodeKind::Assumption | NodeKind::Context | NodeKind::Evidence => {
                Err(reject(child_kind))
            }
        }
    }

    fn has_child_of_kind(&self, parent: &NodeId, kind: NodeKind) -> bool {
        self.children(parent)
            .iter()
            .any(|c| self.nodes[c].kind == kind)
    }

    fn reaches(&self, from: &NodeId, target: &NodeId) -> bool {
        if from == target {
            return true;
        }
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(node) = stack.pop() {
            for child in self.children(node) {
                if child == target {
                    return true;
                }
                if seen.insert(child) {
                    stack.push(child);
                }
            }
        }
        false
    }

    pub fn set_goal_status(&mut self, goal: &NodeId, status: GoalStatus) -> Result<(), GraphError> {
        let node = self
            .nodes
            .get_mut(goal)
            .ok_or_else(|| GraphError::UnknownNode(goal.to_string()))?;
        if node.kind != NodeKind::Goal {
            return Err(GraphError::KindRule {
                parent: goal.to_string(),
                parent_kind: node.kind.name(),
                child_kind: "status",
            });
        }
        node.status = Some(status);
        Ok(())
    }

    /// Extend the assumption set of `goal` and of every goal on a path from
    /// the root to it, preserving the parent-superset rule.
    pub fn extend_assumptions(&mut self, goal: &NodeId, added: &BTreeSet<AssumptionId>) {
        if added.is_empty() {
            return;
        }
        let mut pending = vec![goal.clone()];
        let mut seen = BTreeSet::new();
        while let Some(id) = pending.pop() {
            if !seen.insert(id.clone()) {
                continue;
            }
            if let Some(node) = self.nodes.get_mut(&id) {
                if node.kind == NodeKind::Goal {
                    node.assumptions.extend(added.iter().cloned());
                }
            }
            pending.extend(self.parents(&id).cloned());
        }
    }

    /// Goals in id order, optionally restricted to one status.
    pub fn goals_with_status(&self, status: GoalStatus) -> Vec<NodeId> {
        self.nodes
            .values()
            .filter(|n| n.kind == NodeKind::Goal && n.status == Some(status))
            .map(|n| n.id.clone())
            .collect()
    }

    /// Whether every leaf goal of the subtree rooted at `goal` is sealed.
    /// Orphaned or open descendants make the subtree incomplete.
    pub fn subtree_fully_sealed(&self, goal: &NodeId) -> bool {
        let mut stack = vec![goal];
        let mut seen = BTreeSet::new();
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                continue;
            }
            let Some(node) = self.nodes.get(id) else {
                return false;
            };
            if node.kind == NodeKind::Goal {
                match node.status {
                    Some(GoalStatus::Sealed) => continue,
                    Some(GoalStatus::Expanded) => {
                        for child in self.children(id) {
                            if self.nodes[child].kind == NodeKind::Strategy {
                                stack.extend(self.children(child));
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }

    /// Exact open/sealed/orphaned counts keyed by mode.
    pub fn status_summary(&self) -> BTreeMap<Option<ModeId>, StatusCounts> {
        let mut summary: BTreeMap<Option<ModeId>, StatusCounts> = BTreeMap::new();
        for node in self.nodes.values() {
            if node.kind != NodeKind::Goal {
                continue;
            }
            let counts = summary.entry(node.mode.clone()).or_default();
            match node.status {
                Some(GoalStatus::Open) => counts.open += 1,
                Some(GoalStatus::Sealed) => counts.sealed += 1,
                Some(GoalStatus::Orphaned) => counts.orphaned += 1,
                _ => {}
            }
        }
        summary
    }

    pub fn total_counts(&self) -> StatusCounts {
        let mut total = StatusCounts::default();
        for counts in self.status_summary().values() {
            total.open += counts.open;
            total.sealed += counts.sealed;
            total.orphaned += counts.orphaned;
        }
        total
    }

    pub fn has_orphans(&self) -> bool {
        self.total_counts().orphaned > 0
    }

    /// Merge a per-mode subgraph back into this graph. The subgraph's root
    /// node replaces the placeholder with the same id; its edge to this
    /// graph already exists.
    pub fn absorb(&mut self, sub: GsnGraph) {
        for (id, node) in sub.nodes {
            self.nodes.insert(id, node);
        }
        for (id, kids) in sub.children {
            self.children.insert(id, kids);
        }
        for (id, parents) in sub.parents {
            self.parents.entry(id).or_default().extend(parents);
        }
    }

    /// Clone the subtree reachable from `root` into a standalone graph.
    pub fn subgraph(&self, root: &NodeId) -> Result<GsnGraph, GraphError> {
        let root_node = self
            .nodes
            .get(root)
            .ok_or_else(|| GraphError::UnknownNode(root.to_string()))?;
        let mut sub = GsnGraph::with_root_node(root_node.clone(), self.modes.clone());
        let mut stack = vec![root.clone()];
        let mut seen = BTreeSet::new();
        seen.insert(root.clone());
        while let Some(id) = stack.pop() {
            for child in self.children(&id) {
                if seen.insert(child.clone()) {
                    sub.nodes.insert(child.clone(), self.nodes[child].clone());
                    stack.push(child.clone());
                }
                sub.children
                    .entry(id.clone())
                    .or_default()
                    .push(child.clone());
                sub.parents
                    .entry(child.clone())
                    .or_default()
                    .insert(id.clone());
            }
        }
        // Children were pushed in stack order; restore creation order.
        for (id, kids) in sub.children.iter_mut() {
            kids.clone_from(&self.children[id]);
        }
        Ok(sub)
    }

    /// Rebuild the graph as a tree, duplicating shared subtrees and
    /// re-deriving every node id from its (single) parent. A graph without
    /// sharing unrolls to itself.
    pub fn unroll(&self) -> GsnGraph {
        let mut out = GsnGraph::with_root_node(self.nodes[&self.root].clone(), self.modes.clone());
        self.unroll_into(&self.root, &self.root, &mut out);
        out
    }

    fn unroll_into(&self, src: &NodeId, dst: &NodeId, out: &mut GsnGraph) {
        for child in self.children(src) {
            let node = &self.nodes[child];
            let ordinal = out
                .children(dst)
                .iter()
                .filter(|c| out.nodes[*c].kind == node.kind)
                .count();
            let new_id = dst.child(node.kind, ordinal);
            let mut copy = node.clone();
            copy.id = new_id.clone();
            out.nodes.insert(new_id.clone(), copy);
            out.children
                .entry(dst.clone())
                .or_default()
                .push(new_id.clone());
            out.parents
                .entry(new_id.clone())
                .or_default()
                .insert(dst.clone());
            self.unroll_into(child, &new_id, out);
        }
    }

    // ------------------------------------------------------------------
    // Validation
    // ------------------------------------------------------------------

    /// Check every structural invariant; an empty list means the graph is
    /// well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        if let Some(cycle) = self.find_cycle_from(&self.root) {
            violations.push(Violation {
                rule: "acyclic",
                nodes: cycle.clone(),
                message: format!(
                    "directed cycle: {}",
                    cycle
                        .iter()
                        .map(NodeId::as_str)
                        .collect::<Vec<_>>()
                        .join(" -> ")
                ),
            });
            // The remaining checks assume a DAG.
            return violations;
        }

        let mut reachable = BTreeSet::new();
        let mut stack = vec![&self.root];
        while let Some(id) = stack.pop() {
            if reachable.insert(id.clone()) {
                stack.extend(self.children(id));
            }
        }
        for id in self.nodes.keys() {
            if !reachable.contains(id) {
                violations.push(Violation {
                    rule: "reachability",
                    nodes: vec![id.clone()],
                    message: format!("node `{id}` is not reachable from the root"),
                });
            }
        }

        for node in self.nodes.values() {
            let is_goal = node.kind == NodeKind::Goal;
            if is_goal != node.status.is_some() {
                violations.push(Violation {
                    rule: "status-presence",
                    nodes: vec![node.id.clone()],
                    message: format!(
                        "`{}` is a {} node and must{} carry a status",
                        node.id,
                        node.kind.name(),
                        if is_goal { "" } else { " not" }
                    ),
                });
            }
            let is_strategy = node.kind == NodeKind::Strategy;
            if is_strategy != node.connective.is_some() {
                violations.push(Violation {
                    rule: "connective-presence",
                    nodes: vec![node.id.clone()],
                    message: format!(
                        "`{}` is a {} node and must{} carry a connective",
                        node.id,
                        node.kind.name(),
                        if is_strategy { "" } else { " not" }
                    ),
                });
            }

            let kids = self.children(&node.id);
            match node.kind {
                NodeKind::Goal => {
                    let strategies = kids
                        .iter()
                        .filter(|c| self.nodes[*c].kind == NodeKind::Strategy)
                        .count();
                    let evidence = kids
                        .iter()
                        .filter(|c| self.nodes[*c].kind == NodeKind::Evidence)
                        .count();
                    let goals = kids
                        .iter()
                        .filter(|c| self.nodes[*c].kind == NodeKind::Goal)
                        .count();
                    if goals > 0 {
                        violations.push(Violation {
                            rule: "goal-children",
                            nodes: vec![node.id.clone()],
                            message: format!("goal `{}` has a direct goal child", node.id),
                        });
                    }
                    if strategies > 1 || (strategies == 1 && evidence > 0) || evidence > 1 {
                        violations.push(Violation {
                            rule: "goal-children",
                            nodes: vec![node.id.clone()],
                            message: format!(
                                "goal `{}` must have at most one strategy or exactly one evidence child, found {} strategies and {} evidence nodes",
                                node.id, strategies, evidence
                            ),
                        });
                    }
                    match node.status {
                        Some(GoalStatus::Sealed) if evidence != 1 => {
                            violations.push(Violation {
                                rule: "sealed-evidence",
                                nodes: vec![node.id.clone()],
                                message: format!(
                                    "sealed goal `{}` has {} evidence children, expected exactly 1",
                                    node.id, evidence
                                ),
                            });
                        }
                        Some(GoalStatus::Orphaned) if strategies + evidence > 0 => {
                            violations.push(Violation {
                                rule: "orphan-children",
                                nodes: vec![node.id.clone()],
                                message: format!(
                                    "orphaned goal `{}` must not carry argument children",
                                    node.id
                                ),
                            });
                        }
                        Some(GoalStatus::Expanded) if strategies != 1 => {
                            violations.push(Violation {
                                rule: "expanded-strategy",
                                nodes: vec![node.id.clone()],
                                message: format!(
                                    "expanded goal `{}` has {} strategy children, expected exactly 1",
                                    node.id, strategies
                                ),
                            });
                        }
                        Some(GoalStatus::Open) if strategies + evidence > 0 => {
                            violations.push(Violation {
                                rule: "open-children",
                                nodes: vec![node.id.clone()],
                                message: format!(
                                    "open goal `{}` must not yet carry argument children",
                                    node.id
                                ),
                            });
                        }
                        _ => {}
                    }
                    for child in kids {
                        let child_node = &self.nodes[child];
                        if child_node.kind == NodeKind::Goal
                            && !node.assumptions.is_superset(&child_node.assumptions)
                        {
                            // unreachable for direct goal children (already
                            // flagged) but kept for imported graphs
                            violations.push(Violation {
                                rule: "assumption-superset",
                                nodes: vec![node.id.clone(), child.clone()],
                                message: format!(
                                    "goal `{}` does not cover the assumptions of `{}`",
                                    node.id, child
                                ),
                            });
                        }
                    }
                    // Superset rule over goals one strategy level down.
                    for strategy in kids
                        .iter()
                        .filter(|c| self.nodes[*c].kind == NodeKind::Strategy)
                    {
                        for sub_goal in self.children(strategy) {
                            let sub = &self.nodes[sub_goal];
                            if sub.kind == NodeKind::Goal
                                && !node.assumptions.is_superset(&sub.assumptions)
                            {
                                violations.push(Violation {
                                    rule: "assumption-superset",
                                    nodes: vec![node.id.clone(), sub_goal.clone()],
                                    message: format!(
                                        "assumptions of goal `{}` are not a superset of those of descendant goal `{}`",
                                        node.id, sub_goal
                                    ),
                                });
                            }
                        }
                    }
                }
                NodeKind::Strategy => {
                    let goals = kids
                        .iter()
                        .filter(|c| self.nodes[*c].kind == NodeKind::Goal)
                        .count();
                    if goals == 0 || goals != kids.len() {
                        violations.push(Violation {
                            rule: "strategy-children",
                            nodes: vec![node.id.clone()],
                            message: format!(
                                "strategy `{}` must have one or more goal children and nothing else",
                                node.id
                            ),
                        });
                    }
                }
                NodeKind::Assumption | NodeKind::Context | NodeKind::Evidence => {
                    if !kids.is_empty() {
                        violations.push(Violation {
                            rule: "leaf-node",
                            nodes: vec![node.id.clone()],
                            message: format!(
                                "{} node `{}` must be a leaf",
                                node.kind.name(),
                                node.id
                            ),
                        });
                    }
                }
            }
        }

        violations
    }

    fn find_cycle_from(&self, start: &NodeId) -> Option<Vec<NodeId>> {
        #[derive(PartialEq, Clone, Copy)]
        enum Mark {
            InProgress,
            Done,
        }
        fn visit(
            graph: &GsnGraph,
            node: &NodeId,
            marks: &mut BTreeMap<NodeId, Mark>,
            stack: &mut Vec<NodeId>,
        ) -> Option<Vec<NodeId>> {
            match marks.get(node) {
                Some(Mark::Done) => return None,
                Some(Mark::InProgress) => {
                    let begin = stack.iter().position(|n| n == node).unwrap_or(0);
                    let mut cycle = stack[begin..].to_vec();
                    cycle.push(node.clone());
                    return Some(cycle);
                }
                None => {}
            }
            marks.insert(node.clone(), Mark::InProgress);
            stack.push(node.clone());
            for child in graph.children(node) {
                if let Some(cycle) = visit(graph, child, marks, stack) {
                    return Some(cycle);
                }
            }
            stack.pop();
            marks.insert(node.clone(), Mark::Done);
            None
        }
        let mut marks = BTreeMap::new();
        let mut stack = Vec::new();
        visit(self, start, &mut marks, &mut stack)
    }

    // ------------------------------------------------------------------
    // Raw construction (import path)
    // ------------------------------------------------------------------

    /// Rebuild a graph from parts, checking only referential integrity.
    /// Structural rules are left to [`GsnGraph::validate`] so that imported
    /// documents with semantic defects can still be inspected.
    pub fn from_parts(
        root: NodeId,
        modes: Vec<ModeId>,
        nodes: Vec<GsnNode>,
        edges: Vec<(NodeId, NodeId)>,
    ) -> Result<GsnGraph, GraphError> {
        let mut node_map = BTreeMap::new();
        for node in nodes {
            if node_map.insert(node.id.clone(), node.clone()).is_some() {
                return Err(GraphError::DuplicateNode(node.id.to_string()));
            }
        }
        if !node_map.contains_key(&root) {
            return Err(GraphError::UnknownNode(root.to_string()));
        }
        let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        let mut parents: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (from, to) in edges {
            for end in [&from, &to] {
                if !node_map.contains_key(end) {
                    return Err(GraphError::DanglingEdge(end.to_string()));
                }
            }
            children.entry(from.clone()).or_default().push(to.clone());
            parents.entry(to).or_default().insert(from);
        }
        Ok(GsnGraph {
            nodes: node_map,
            children,
            parents,
            root,
            modes,
        })
    }
}
