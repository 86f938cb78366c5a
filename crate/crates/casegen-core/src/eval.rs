//! Confidence scoring and evidence-coverage checks.
//!
//! Every evidence artifact can carry an evaluation tree: a weighted
//! hierarchy of attributes whose leaves hold per-context assessment scores.
//! The score of an attribute is the weight-weighted sum of its children;
//! the root score is the confidence of the evidence, always in [0, 1].
//!
//! Scores propagate through a complete argument graph bottom-up: a sealed
//! goal takes its evidence score, AND strategies propagate the minimum of
//! their sub-goals, OR strategies the maximum, and orphaned goals
//! pessimistically contribute 0.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::evidence::EvidenceEntry;
use crate::gsn::{Connective, GoalStatus, GsnGraph, NodeId, NodeKind};
use crate::ids::{AssumptionId, TreeId};

pub const EVAL_SCHEMA_VERSION: u32 = 1;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

// ============================================================================
// Evaluation trees
// ============================================================================

/// One selectable assessment of a leaf attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub key: String,
    pub score: f64,
}

/// Children of an attribute: either sub-attributes or assessment leaves.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeChildren {
    Attributes(Vec<AttributeNode>),
    Assessments {
        assessments: Vec<Assessment>,
        /// Assessment key used when the context does not name this attribute.
        default: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeNode {
    pub name: String,
    pub weight: f64,
    pub children: AttributeChildren,
}

/// A named evaluation tree. The root node is an unweighted container whose
/// children carry the top-level weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationTree {
    pub id: TreeId,
    pub name: String,
    pub children: Vec<AttributeNode>,
}

/// All trees of a run, keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvaluationTrees {
    trees: BTreeMap<TreeId, EvaluationTree>,
}

impl EvaluationTrees {
    pub fn get(&self, id: &TreeId) -> Option<&EvaluationTree> {
        self.trees.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &EvaluationTree> {
        self.trees.values()
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}

/// Context selecting one assessment per attribute dimension.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalContext {
    #[serde(default)]
    pub context: BTreeMap<String, String>,
}

impl EvalContext {
    pub fn get(&self, attribute: &str) -> Option<&str> {
        self.context.get(attribute).map(String::as_str)
    }
}

// ----------------------------------------------------------------------------
// Loading
// ----------------------------------------------------------------------------

#[derive(Debug, Deserialize)]
struct TreesDoc {
    schema: u32,
    trees: Vec<TreeDoc>,
}

#[derive(Debug, Deserialize)]
struct TreeDoc {
    id: TreeId,
    root: NodeDoc,
}

#[derive(Debug, Deserialize)]
struct NodeDoc {
    name: String,
    #[serde(default)]
    weight: Option<f64>,
    #[serde(default)]
    children: Option<Vec<NodeDoc>>,
    #[serde(default)]
    assessments: Option<Vec<Assessment>>,
    #[serde(default)]
    default: Option<String>,
}

pub fn load_evaluation_trees(source: &str) -> Result<EvaluationTrees, EvalError> {
    let de = &mut serde_json::Deserializer::from_str(source);
    let doc: TreesDoc = serde_path_to_error::deserialize(de).map_err(|e| EvalError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if doc.schema != EVAL_SCHEMA_VERSION {
        return Err(EvalError::SchemaVersion {
            expected: EVAL_SCHEMA_VERSION,
            found: doc.schema,
        });
    }
    let mut trees = BTreeMap::new();
    for tree_doc in doc.trees {
        let id = tree_doc.id.clone();
        let children = match tree_doc.root.children {
            Some(children) if !children.is_empty() => children
                .into_iter()
                .map(|c| build_attribute(&id, c))
                .collect::<Result<Vec<_>, _>>()?,
            _ => {
                return Err(EvalError::EmptyAttribute {
                    tree: id,
                    attribute: tree_doc.root.name,
                })
            }
        };
        check_sibling_weights(&id, &tree_doc.root.name, &children)?;
        let tree = EvaluationTree {
            id: id.clone(),
            name: tree_doc.root.name,
            children,
        };
        if trees.insert(id.clone(), tree).is_some() {
            return Err(EvalError::DuplicateTree(id));
        }
    }
    Ok(EvaluationTrees { trees })
}

pub fn load_evaluation_trees_file(path: &Path) -> Result<EvaluationTrees, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_evaluation_trees(&text)
}

pub fn load_context(source: &str) -> Result<EvalContext, EvalError> {
    #[derive(Deserialize)]
    struct ContextDoc {
        schema: u32,
        #[serde(default)]
        context: BTreeMap<String, String>,
    }
    let de = &mut serde_json::Deserializer::from_str(source);
    let doc: ContextDoc = serde_path_to_error::deserialize(de).map_err(|e| EvalError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if doc.schema != EVAL_SCHEMA_VERSION {
        return Err(EvalError::SchemaVersion {
            expected: EVAL_SCHEMA_VERSION,
            found: doc.schema,
        });
    }
    Ok(EvalContext {
        context: doc.context,
    })
}

pub fn load_context_file(path: &Path) -> Result<EvalContext, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_context(&text)
}

fn build_attribute(tree: &TreeId, doc: NodeDoc) -> Result<AttributeNode, EvalError> {
    let weight = doc.weight.ok_or_else(|| EvalError::Schema {
        path: doc.name.clone(),
        message: "attribute below the root must carry a weight".to_string(),
    })?;
    if !(0.0..=1.0).contains(&weight) || !weight.is_finite() {
        return Err(EvalError::WeightRange {
            tree: tree.clone(),
            attribute: doc.name,
            weight,
        });
    }
    let children = match (doc.children, doc.assessments) {
        (Some(attrs), None) => {
            if attrs.is_empty() {
                return Err(EvalError::EmptyAttribute {
                    tree: tree.clone(),
                    attribute: doc.name,
                });
            }
            let built = attrs
                .into_iter()
                .map(|c| build_attribute(tree, c))
                .collect::<Result<Vec<_>, _>>()?;
            check_sibling_weights(tree, &doc.name, &built)?;
            AttributeChildren::Attributes(built)
        }
        (None, Some(assessments)) => {
            if assessments.is_empty() {
                return Err(EvalError::EmptyAssessments {
                    tree: tree.clone(),
                    attribute: doc.name,
                });
            }
            for assessment in &assessments {
                if !(0.0..=1.0).contains(&assessment.score) || !assessment.score.is_finite() {
                    return Err(EvalError::ScoreRange {
                        tree: tree.clone(),
                        key: assessment.key.clone(),
                        score: assessment.score,
                    });
                }
            }
            if let Some(default) = &doc.default {
                if !assessments.iter().any(|a| &a.key == default) {
                    return Err(EvalError::UnknownAssessment {
                        attribute: doc.name.clone(),
                        key: "default".to_string(),
                        value: default.clone(),
                    });
                }
            }
            AttributeChildren::Assessments {
                assessments,
                default: doc.default,
            }
        }
        _ => {
            return Err(EvalError::Schema {
                path: doc.name,
                message: "attribute must carry either `children` or `assessments`".to_string(),
            })
        }
    };
    Ok(AttributeNode {
        name: doc.name,
        weight,
        children,
    })
}

fn check_sibling_weights(
    tree: &TreeId,
    attribute: &str,
    siblings: &[AttributeNode],
) -> Result<(), EvalError> {
    let sum: f64 = siblings.iter().map(|s| s.weight).sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(EvalError::WeightSum {
            tree: tree.clone(),
            attribute: attribute.to_string(),
            sum,
        });
    }
    Ok(())
}

// ============================================================================
// Confidence of a single evidence artifact
// ============================================================================

/// Contribution of one leaf attribute to the root score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafContribution {
    /// Slash-separated attribute path from the root.
    pub path: String,
    /// Product of the weights along the path.
    pub weight: f64,
    /// Assessment score selected by the context.
    pub score: f64,
    /// `weight * score`.
    pub contribution: f64,
}

/// Root confidence with a per-leaf provenance breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceScore {
    pub value: f64,
    pub breakdown: Vec<LeafContribution>,
}

/// Evaluate `tree` under `context`: attributes score the weighted sum of
/// their children, leaves score the assessment the context selects.
pub fn evidence_confidence(
    tree: &EvaluationTree,
    context: &EvalContext,
) -> Result<ConfidenceScore, EvalError> {
    let mut breakdown = Vec::new();
    let mut value = 0.0;
    for child in &tree.children {
        value += score_attribute(child, context, &tree.name, 1.0, &mut breakdown)?;
    }
    Ok(ConfidenceScore { value, breakdown })
}

fn score_attribute(
    node: &AttributeNode,
    context: &EvalContext,
    parent_path: &str,
    inherited_weight: f64,
    breakdown: &mut Vec<LeafContribution>,
) -> Result<f64, EvalError> {
    let path = format!("{parent_path}/{}", node.name);
    match &node.children {
        AttributeChildren::Attributes(children) => {
            let mut inner = 0.0;
            for child in children {
                inner += score_attribute(
                    child,
                    context,
                    &path,
                    inherited_weight * node.weight,
                    breakdown,
                )?;
            }
            Ok(node.weight * inner)
        }
        AttributeChildren::Assessments {
            assessments,
            default,
        } => {
            let selected_key = match context.get(&node.name) {
                Some(key) => key,
                None => default
                    .as_deref()
                    .ok_or_else(|| EvalError::MissingContext {
                        attribute: node.name.clone(),
                    })?,
            };
            let assessment = assessments
                .iter()
                .find(|a| a.key == selected_key)
                .ok_or_else(|| EvalError::UnknownAssessment {
                    attribute: node.name.clone(),
                    key: node.name.clone(),
                    value: selected_key.to_string(),
                })?;
            breakdown.push(LeafContribution {
                path,
                weight: inherited_weight * node.weight,
                score: assessment.score,
                contribution: inherited_weight * node.weight * assessment.score,
            });
            Ok(node.weight * assessment.score)
        }
    }
}

/// The assessment score a context selects for one leaf attribute, if that
/// attribute exists in the tree.
pub fn leaf_assessment(
    tree: &EvaluationTree,
    attribute: &str,
    context: &EvalContext,
) -> Option<f64> {
    fn find(node: &AttributeNode, attribute: &str, context: &EvalContext) -> Option<f64> {
        match &node.children {
            AttributeChildren::Attributes(children) => {
                children.iter().find_map(|c| find(c, attribute, context))
            }
            AttributeChildren::Assessments {
                assessments,
                default,
            } if node.name == attribute => {
                let key = context.get(attribute).or(default.as_deref())?;
                assessments.iter().find(|a| a.key == key).map(|a| a.score)
            }
            _ => None,
        }
    }
    tree.children
        .iter()
        .find_map(|c| find(c, attribute, context))
}

// ============================================================================
// Propagation over the argument graph
// ============================================================================

/// Result of propagating evidence scores to the root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Propagation {
    pub root: f64,
    pub per_goal: BTreeMap<NodeId, f64>,
    /// Goals that contributed a pessimistic 0 because they are orphaned.
    pub orphaned: Vec<NodeId>,
}

/// Propagate per-evidence confidence scores bottom-up: sealed goals take
/// their evidence score, AND strategies the minimum of their sub-goals, OR
/// strategies the maximum, orphaned goals 0.
pub fn propagate(
    graph: &GsnGraph,
    scores: &BTreeMap<NodeId, f64>,
) -> Result<Propagation, EvalError> {
    let mut memo: BTreeMap<NodeId, f64> = BTreeMap::new();
    let mut per_goal = BTreeMap::new();
    let mut orphaned = Vec::new();

    fn value_of(
        graph: &GsnGraph,
        id: &NodeId,
        scores: &BTreeMap<NodeId, f64>,
        memo: &mut BTreeMap<NodeId, f64>,
        per_goal: &mut BTreeMap<NodeId, f64>,
        orphaned: &mut Vec<NodeId>,
    ) -> Result<f64, EvalError> {
        if let Some(v) = memo.get(id) {
            return Ok(*v);
        }
        let node = graph.node(id).expect("node ids come from the graph");
        let value = match node.kind {
            NodeKind::Evidence => *scores
                .get(id)
                .ok_or_else(|| EvalError::MissingScore(id.to_string()))?,
            NodeKind::Goal => match node.status {
                Some(GoalStatus::Open) => return Err(EvalError::OpenGoal(id.to_string())),
                Some(GoalStatus::Orphaned) => {
                    orphaned.push(id.clone());
                    0.0
                }
                _ => {
                    // Sealed: single evidence child. Expanded: single
                    // strategy child. Either way the argument children
                    // determine the value; context/assumption nodes do not.
                    let mut value = None;
                    for child in graph.children(id) {
                        let kind = graph.node(child).map(|n| n.kind);
                        if matches!(kind, Some(NodeKind::Evidence) | Some(NodeKind::Strategy)) {
                            value = Some(value_of(graph, child, scores, memo, per_goal, orphaned)?);
                            break;
                        }
                    }
                    value.ok_or_else(|| EvalError::OpenGoal(id.to_string()))?
                }
            },
            NodeKind::Strategy => {
                let mut child_values = Vec::new();
                for child in graph.children(id) {
                    if graph.node(child).map(|n| n.kind) == Some(NodeKind::Goal) {
                        child_values
                            .push(value_of(graph, child, scores, memo, per_goal, orphaned)?);
                    }
                }
                let connective = node.connective.unwrap_or(Connective::And);
                if child_values.is_empty() {
                    // Invalid structurally; keep the value in range anyway.
                    0.0
                } else {
                    match connective {
                        Connective::And => {
                            child_values.iter().copied().fold(f64::INFINITY, f64::min)
                        }
                        Connective::Or => child_values.iter().copied().fold(0.0, f64::max),
                    }
                }
            }
            NodeKind::Assumption | NodeKind::Context => 0.0,
        };
        memo.insert(id.clone(), value);
        if node.kind == NodeKind::Goal {
            per_goal.insert(id.clone(), value);
        }
        Ok(value)
    }

    let root = value_of(
        graph,
        graph.root(),
        scores,
        &mut memo,
        &mut per_goal,
        &mut orphaned,
    )?;
    orphaned.sort();
    orphaned.dedup();
    Ok(Propagation {
        root,
        per_goal,
        orphaned,
    })
}

// ============================================================================
// Evidence coverage
// ============================================================================

/// Qualitative containment check of one evidence entry against a goal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    /// Evidence claims are a superset of the goal claims.
    pub claims_superset: bool,
    /// Evidence assumptions are a subset of the goal-context assumptions.
    pub assumptions_subset: bool,
    /// `|goal assumptions| - |evidence assumptions|`; the bigger the margin
    /// the more conservative the evidence.
    pub margin: i64,
}

/// Check containment of `entry` against the claims and context assumptions
/// of the goal it is meant to seal. Coverage is qualitative; the confidence
/// score stays the selection key.
pub fn coverage_check(
    entry: &EvidenceEntry,
    goal_claims: &BTreeSet<String>,
    goal_assumptions: &BTreeSet<AssumptionId>,
) -> CoverageReport {
    let entry_claims = entry.claim_ids();
    CoverageReport {
        claims_superset: goal_claims.iter().all(|c| entry_claims.contains(c)),
        assumptions_subset: entry
            .assumptions
            .iter()
            .all(|a| goal_assumptions.contains(a)),
        margin: goal_assumptions.len() as i64 - entry.assumptions.len() as i64,
    }
}
