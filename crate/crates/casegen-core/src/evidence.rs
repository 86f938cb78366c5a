//! The curated evidence store and the GSN fragment cache.
//!
//! The store holds one row per evidence artifact: the claim it supports,
//! its type, the function and components it covers, and the assumptions
//! under which it holds. Evidence-to-goal matching is by component id.
//!
//! The fragment cache holds fully sealed argument subtrees keyed by
//! `(component, mode)` so a recurring sub-goal can be sealed by reuse
//! instead of repeating the decomposition.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::StoreError;
use crate::gsn::{GoalStatus, GsnGraph, NodeId, NodeKind};
use crate::ids::{AssumptionId, ComponentId, EntryId, FunctionId, ModeId, TreeId};
use crate::model::SystemModel;

pub const STORE_SCHEMA_VERSION: u32 = 1;

/// The kind of artifact backing an evidence row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceType {
    HwTest,
    SwTest,
    HwSwTest,
    Analysis,
    Formal,
}

/// A named assumption. Equality is by id, never by text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assumption {
    pub id: AssumptionId,
    pub text: String,
}

/// One curated evidence row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceEntry {
    pub id: EntryId,
    pub claim: String,
    pub evidence_type: EvidenceType,
    pub function: FunctionId,
    pub components: BTreeSet<ComponentId>,
    #[serde(default)]
    pub assumptions: BTreeSet<AssumptionId>,
    /// Claim ids established by this evidence; defaults to the entry id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claims: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation_tree: Option<TreeId>,
}

impl EvidenceEntry {
    /// The claim-id set used by coverage checks.
    pub fn claim_ids(&self) -> BTreeSet<String> {
        match &self.claims {
            Some(claims) => claims.clone(),
            None => [self.id.to_string()].into_iter().collect(),
        }
    }
}

/// Validated, immutable evidence store.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceStore {
    entries: BTreeMap<EntryId, EvidenceEntry>,
    assumptions: BTreeMap<AssumptionId, Assumption>,
}

#[derive(Debug, Deserialize)]
struct StoreDoc {
    schema: u32,
    #[serde(default)]
    assumptions: Vec<Assumption>,
    #[serde(default)]
    entries: Vec<EvidenceEntry>,
}

/// Parse an evidence store and cross-check it against the system model.
pub fn load_evidence_store(source: &str, model: &SystemModel) -> Result<EvidenceStore, StoreError> {
    let de = &mut serde_json::Deserializer::from_str(source);
    let doc: StoreDoc = serde_path_to_error::deserialize(de).map_err(|e| StoreError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if doc.schema != STORE_SCHEMA_VERSION {
        return Err(StoreError::SchemaVersion {
            expected: STORE_SCHEMA_VERSION,
            found: doc.schema,
        });
    }
    EvidenceStore::from_parts(doc.assumptions, doc.entries, model)
}

pub fn load_evidence_store_file(
    path: &Path,
    model: &SystemModel,
) -> Result<EvidenceStore, StoreError> {
    let text = std::fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_evidence_store(&text, model)
}

impl EvidenceStore {
    pub fn from_parts(
        assumptions: Vec<Assumption>,
        entries: Vec<EvidenceEntry>,
        model: &SystemModel,
    ) -> Result<Self, StoreError> {
        let mut assumption_map = BTreeMap::new();
        for assumption in assumptions {
            if assumption_map
                .insert(assumption.id.clone(), assumption.clone())
                .is_some()
            {
                return Err(StoreError::DuplicateAssumption(assumption.id));
            }
        }
        let mut entry_map = BTreeMap::new();
        for entry in entries {
            if entry.components.is_empty() {
                return Err(StoreError::EmptyComponents(entry.id));
            }
            for component in &entry.components {
                if !model.contains_component(component) {
                    return Err(StoreError::UnknownComponent {
                        entry: entry.id,
                        component: component.clone(),
                    });
                }
            }
            if model.function(&entry.function).is_none() {
                return Err(StoreError::UnknownFunction {
                    entry: entry.id,
                    function: entry.function,
                });
            }
            for assumption in &entry.assumptions {
                if !assumption_map.contains_key(assumption) {
                    return Err(StoreError::UnknownAssumption {
                        entry: entry.id,
                        assumption: assumption.clone(),
                    });
                }
            }
            if entry_map.insert(entry.id.clone(), entry.clone()).is_some() {
                return Err(StoreError::DuplicateEntry(entry.id));
            }
        }
        Ok(EvidenceStore {
            entries: entry_map,
            assumptions: assumption_map,
        })
    }

    /// Every entry that covers `component`, in entry-id order. The mode is
    /// part of the query contract but entries are not mode-scoped today.
    pub fn query(&self, component: &ComponentId, _mode: &ModeId) -> Vec<&EvidenceEntry> {
        self.entries
            .values()
            .filter(|entry| entry.components.contains(component))
            .collect()
    }

    pub fn entry(&self, id: &EntryId) -> Option<&EvidenceEntry> {
        self.entries.get(id)
    }

    pub fn entries(&self) -> impl Iterator<Item = &EvidenceEntry> {
        self.entries.values()
    }

    pub fn assumption(&self, id: &AssumptionId) -> Option<&Assumption> {
        self.assumptions.get(id)
    }

    pub fn assumptions(&self) -> impl Iterator<Item = &Assumption> {
        self.assumptions.values()
    }

    /// Union of the assumption ids of every entry covering `component`.
    pub fn component_assumptions(&self, component: &ComponentId) -> BTreeSet<AssumptionId> {
        let mut set = BTreeSet::new();
        for entry in self.entries.values() {
            if entry.components.contains(component) {
                set.extend(entry.assumptions.iter().cloned());
            }
        }
        set
    }

    /// Claim text of the lexicographically first entry covering `component`.
    pub fn component_claim_text(&self, component: &ComponentId) -> Option<&str> {
        self.entries
            .values()
            .find(|entry| entry.components.contains(component))
            .map(|entry| entry.claim.as_str())
    }
}

// ============================================================================
// Fragment cache
// ============================================================================

/// Cache key: the component a goal argues plus the operating mode, because
/// the same component decomposes differently per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FragmentKey {
    pub component: ComponentId,
    pub mode: ModeId,
}

impl std::fmt::Display for FragmentKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}@{}", self.component, self.mode)
    }
}

/// A fully sealed argument subtree stored for reuse.
#[derive(Debug, Clone, PartialEq)]
pub struct GsnFragment {
    pub key: FragmentKey,
    /// Standalone copy of the sealed subtree.
    pub subtree: GsnGraph,
    /// Root node of the live subtree inside the generation graph.
    pub live_root: NodeId,
    /// Confidence of the subtree under the scores available when cached.
    pub confidence: f64,
}

/// Mutable fragment map with single-writer semantics: only the generation
/// loop inserts, between iterations.
#[derive(Debug, Clone, Default)]
pub struct FragmentCache {
    fragments: BTreeMap<FragmentKey, GsnFragment>,
}

impl FragmentCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Store a fragment. Rejected unless every goal in the subtree is sealed
    /// or continues into sealed descendants; open or orphaned goals make a
    /// subtree unusable as linking evidence.
    pub fn put(&mut self, fragment: GsnFragment) -> Result<(), StoreError> {
        for node in fragment.subtree.nodes() {
            if node.kind == NodeKind::Goal {
                match node.status {
                    Some(GoalStatus::Sealed) | Some(GoalStatus::Expanded) => {}
                    other => {
                        return Err(StoreError::UnsealedFragment {
                            component: fragment.key.component.clone(),
                            mode: fragment.key.mode.clone(),
                            reason: format!(
                                "goal `{}` has status {:?}",
                                node.id,
                                other.map(|s| format!("{s:?}")).unwrap_or_default()
                            ),
                        });
                    }
                }
            }
        }
        if !fragment
            .subtree
            .subtree_fully_sealed(&fragment.subtree.root().clone())
        {
            return Err(StoreError::UnsealedFragment {
                component: fragment.key.component.clone(),
                mode: fragment.key.mode.clone(),
                reason: "subtree contains unsealed leaves".to_string(),
            });
        }
        self.fragments.insert(fragment.key.clone(), fragment);
        Ok(())
    }

    /// Most recently stored fragment for `key`, if any.
    pub fn get(&self, key: &FragmentKey) -> Option<&GsnFragment> {
        self.fragments.get(key)
    }

    pub fn contains(&self, key: &FragmentKey) -> bool {
        self.fragments.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsn::{Connective, NewNode};
    use crate::model::{Component, ComponentKind, Function, FunctionCategory};

    fn model_with(components: &[&str]) -> SystemModel {
        let comps = components
            .iter()
            .map(|id| Component {
                id: ComponentId::new(*id),
                name: id.to_string(),
                kind: ComponentKind::Software,
                provides: [FunctionId::new("f")].into_iter().collect(),
            })
            .collect();
        let functions = vec![Function {
            id: FunctionId::new("f"),
            name: "f".into(),
            category: FunctionCategory::Other,
        }];
        SystemModel::from_parts(comps, functions, vec![], BTreeMap::new()).unwrap()
    }

    fn entry(id: &str, component: &str) -> EvidenceEntry {
        EvidenceEntry {
            id: EntryId::new(id),
            claim: format!("{component} works"),
            evidence_type: EvidenceType::SwTest,
            function: FunctionId::new("f"),
            components: [ComponentId::new(component)].into_iter().collect(),
            assumptions: BTreeSet::new(),
            claims: None,
            evaluation_tree: None,
        }
    }

    #[test]
    fn empty_store_is_valid() {
        let model = model_with(&[]);
        let store = EvidenceStore::from_parts(vec![], vec![], &model).unwrap();
        assert_eq!(store.entries().count(), 0);
    }

    #[test]
    fn unknown_component_is_rejected() {
        let model = model_with(&["lidar"]);
        let err = EvidenceStore::from_parts(vec![], vec![entry("G9", "gps")], &model).unwrap_err();
        assert!(matches!(err, StoreError::UnknownComponent { .. }));
    }

    #[test]
    fn duplicate_entry_is_rejected() {
        let model = model_with(&["lidar"]);
        let err = EvidenceStore::from_parts(
            vec![],
            vec![entry("G2", "lidar"), entry("G2", "lidar")],
            &model,
        )
        .unwrap_err();
        assert!(matches!(err, StoreError::DuplicateEntry(_)));
    }

    #[test]
    fn query_matches_by_component() {
        let model = model_with(&["lidar", "camera"]);
        let store = EvidenceStore::from_parts(
            vec![],
            vec![entry("G2", "lidar"), entry("G1", "camera")],
            &model,
        )
        .unwrap();
        let hits = store.query(&ComponentId::new("lidar"), &ModeId::new("m1"));
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].id, EntryId::new("G2"));
        assert!(store
            .query(&ComponentId::new("camera"), &ModeId::new("m1"))
            .iter()
            .all(|e| e.components.contains(&ComponentId::new("camera"))));
    }

    #[test]
    fn query_after_removal_is_empty() {
        let model = model_with(&["lidar"]);
        let store = EvidenceStore::from_parts(vec![], vec![], &model).unwrap();
        assert!(store
            .query(&ComponentId::new("lidar"), &ModeId::new("m1"))
            .is_empty());
    }

    fn sealed_leaf_fragment(key: FragmentKey) -> GsnFragment {
        let mut graph = GsnGraph::new("goal", vec![key.mode.clone()]);
        let root = graph.root().clone();
        graph
            .attach(
                &root,
                NewNode::evidence("evidence", "G2", Some(key.mode.clone())),
            )
            .unwrap();
        graph.set_goal_status(&root, GoalStatus::Sealed).unwrap();
        GsnFragment {
            key,
            live_root: root,
            subtree: graph,
            confidence: 1.0,
        }
    }

    #[test]
    fn fragment_round_trip() {
        let key = FragmentKey {
            component: ComponentId::new("lidar"),
            mode: ModeId::new("m2"),
        };
        let fragment = sealed_leaf_fragment(key.clone());
        let mut cache = FragmentCache::new();
        cache.put(fragment.clone()).unwrap();
        assert_eq!(cache.get(&key), Some(&fragment));
    }

    #[test]
    fn get_on_empty_cache_is_none() {
        let cache = FragmentCache::new();
        let key = FragmentKey {
            component: ComponentId::new("lidar"),
            mode: ModeId::new("m1"),
        };
        assert!(cache.get(&key).is_none());
    }

    #[test]
    fn unsealed_fragment_is_rejected() {
        let key = FragmentKey {
            component: ComponentId::new("lidar"),
            mode: ModeId::new("m1"),
        };
        let mut graph = GsnGraph::new("goal", vec![key.mode.clone()]);
        let root = graph.root().clone();
        let strategy = graph
            .attach(&root, NewNode::strategy("s", Connective::And, None))
            .unwrap();
        let child = graph
            .attach(&strategy, NewNode::goal("child", None))
            .unwrap();
        graph.set_goal_status(&root, GoalStatus::Expanded).unwrap();
        graph.set_goal_status(&child, GoalStatus::Orphaned).unwrap();
        let fragment = GsnFragment {
            key,
            live_root: root,
            subtree: graph,
            confidence: 0.0,
        };
        let mut cache = FragmentCache::new();
        assert!(matches!(
            cache.put(fragment),
            Err(StoreError::UnsealedFragment { .. })
        ));
    }
}
