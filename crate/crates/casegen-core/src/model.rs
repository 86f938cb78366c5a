//! System design artifacts: the typed component decomposition that drives
//! goal expansion.
//!
//! A [`SystemModel`] holds components, the functions they provide, a
//! function-to-component mapping, and mode-conditional dependency edges.
//! It is loaded once from a JSON document (`schema: 1`), validated, and
//! immutable afterwards, so it can be shared freely between engine tasks.
//!
//! The per-mode dependency graph must be acyclic; a cycle is a hard load
//! error with the offending path reported.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::ids::{ComponentId, FunctionId, ModeId};

pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Whether a component is realized in hardware or software.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Hardware,
    Software,
}

/// Functional category of a system function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionCategory {
    Sensing,
    Detection,
    StateEstimation,
    Driving,
    Braking,
    Other,
}

/// A hardware or software component of the target system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: ComponentId,
    pub name: String,
    pub kind: ComponentKind,
    /// Functions this component contributes to. Never empty.
    pub provides: BTreeSet<FunctionId>,
}

/// A system function such as sensing or braking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Function {
    pub id: FunctionId,
    pub name: String,
    pub category: FunctionCategory,
}

/// A directed dependency: `from` requires input from `to`.
///
/// When `mode_filter` is present the edge is only active in the listed
/// operating modes; an absent filter means the edge is active everywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyEdge {
    pub from: ComponentId,
    pub to: ComponentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_filter: Option<BTreeSet<ModeId>>,
}

impl DependencyEdge {
    /// True when the edge participates in the dependency graph of `mode`.
    pub fn active_in(&self, mode: &ModeId) -> bool {
        match &self.mode_filter {
            None => true,
            Some(modes) => modes.contains(mode),
        }
    }
}

/// The validated, immutable design-artifact model.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    components: BTreeMap<ComponentId, Component>,
    functions: BTreeMap<FunctionId, Function>,
    dependencies: Vec<DependencyEdge>,
    function_map: BTreeMap<FunctionId, BTreeSet<ComponentId>>,
}

#[derive(Debug, Deserialize)]
struct ModelDoc {
    schema: u32,
    components: Vec<Component>,
    functions: Vec<Function>,
    #[serde(default)]
    dependencies: Vec<DependencyEdge>,
    #[serde(default)]
    function_map: BTreeMap<FunctionId, BTreeSet<ComponentId>>,
}

/// Parse and validate a system model from its JSON serialization.
pub fn load_system_model(source: &str) -> Result<SystemModel, ModelError> {
    let de = &mut serde_json::Deserializer::from_str(source);
    let doc: ModelDoc = serde_path_to_error::deserialize(de).map_err(|e| ModelError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if doc.schema != MODEL_SCHEMA_VERSION {
        return Err(ModelError::SchemaVersion {
            expected: MODEL_SCHEMA_VERSION,
            found: doc.schema,
        });
    }
    SystemModel::from_parts(
        doc.components,
        doc.functions,
        doc.dependencies,
        doc.function_map,
    )
}

/// Convenience wrapper over [`load_system_model`] for a file on disk.
pub fn load_system_model_file(path: &Path) -> Result<SystemModel, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_system_model(&text)
}

impl SystemModel {
    pub fn from_parts(
        components: Vec<Component>,
        functions: Vec<Function>,
        dependencies: Vec<DependencyEdge>,
        function_map: BTreeMap<FunctionId, BTreeSet<ComponentId>>,
    ) -> Result<Self, ModelError> {
        let mut component_map = BTreeMap::new();
        for component in components {
            if component.provides.is_empty() {
                return Err(ModelError::EmptyProvides(component.id.clone()));
            }
            if component_map
                .insert(component.id.clone(), component.clone())
                .is_some()
            {
                return Err(ModelError::DuplicateComponent(component.id));
            }
        }
        let mut function_table = BTreeMap::new();
        for function in functions {
            if function_table
                .insert(function.id.clone(), function.clone())
                .is_some()
            {
                return Err(ModelError::DuplicateFunction(function.id));
            }
        }

        for component in component_map.values() {
            for function in &component.provides {
                if !function_table.contains_key(function) {
                    return Err(ModelError::UnknownFunction {
                        id: function.clone(),
                        referrer: format!("component `{}`", component.id),
                    });
                }
            }
        }
        for edge in &dependencies {
            if edge.from == edge.to {
                return Err(ModelError::SelfDependency(edge.from.clone()));
            }
            for end in [&edge.from, &edge.to] {
                if !component_map.contains_key(end) {
                    return Err(ModelError::UnknownComponent {
                        id: end.clone(),
                        referrer: format!("dependency edge `{}` -> `{}`", edge.from, edge.to),
                    });
                }
            }
        }
        for (function, components) in &function_map {
            if !function_table.contains_key(function) {
                return Err(ModelError::UnknownFunction {
                    id: function.clone(),
                    referrer: "function_map".to_string(),
                });
            }
            if components.is_empty() {
                return Err(ModelError::EmptyFunctionMapping(function.clone()));
            }
            for component in components {
                if !component_map.contains_key(component) {
                    return Err(ModelError::UnknownComponent {
                        id: component.clone(),
                        referrer: format!("function_map entry `{}`", function),
                    });
                }
            }
        }

        let model = Self {
            components: component_map,
            functions: function_table,
            dependencies,
            function_map,
        };
        model.check_acyclic()?;
        Ok(model)
    }

    /// Direct dependency targets of `component` that are active in `mode`,
    /// in lexicographic order by component id.
    pub fn required_inputs(
        &self,
        component: &ComponentId,
        mode: &ModeId,
    ) -> Result<Vec<ComponentId>, ModelError> {
        if !self.components.contains_key(component) {
            return Err(ModelError::UnknownComponent {
                id: component.clone(),
                referrer: "required_inputs".to_string(),
            });
        }
        let mut inputs: BTreeSet<ComponentId> = BTreeSet::new();
        for edge in &self.dependencies {
            if &edge.from == component && edge.active_in(mode) {
                inputs.insert(edge.to.clone());
            }
        }
        Ok(inputs.into_iter().collect())
    }

    pub fn component(&self, id: &ComponentId) -> Option<&Component> {
        self.components.get(id)
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn function(&self, id: &FunctionId) -> Option<&Function> {
        self.functions.get(id)
    }

    pub fn functions(&self) -> impl Iterator<Item = &Function> {
        self.functions.values()
    }

    pub fn dependencies(&self) -> &[DependencyEdge] {
        &self.dependencies
    }

    pub fn function_map(&self) -> &BTreeMap<FunctionId, BTreeSet<ComponentId>> {
        &self.function_map
    }

    pub fn contains_component(&self, id: &ComponentId) -> bool {
        self.components.contains_key(id)
    }

    /// Number of nodes on the longest dependency chain active in `mode`.
    ///
    /// A component with no dependencies counts as a chain of length 1.
    /// Bounds the iteration count of the generation loop.
    pub fn longest_chain(&self, mode: &ModeId) -> u32 {
        let mut memo: BTreeMap<&ComponentId, u32> = BTreeMap::new();
        let mut longest = 0;
        for id in self.components.keys() {
            longest = longest.max(self.chain_depth(id, mode, &mut memo));
        }
        longest
    }

    fn chain_depth<'a>(
        &'a self,
        id: &'a ComponentId,
        mode: &ModeId,
        memo: &mut BTreeMap<&'a ComponentId, u32>,
    ) -> u32 {
        if let Some(depth) = memo.get(id) {
            return *depth;
        }
        let mut deepest_input = 0;
        for edge in &self.dependencies {
            if &edge.from == id && edge.active_in(mode) {
                deepest_input = deepest_input.max(self.chain_depth(&edge.to, mode, memo));
            }
        }
        let depth = deepest_input + 1;
        memo.insert(id, depth);
        depth
    }

    /// Every mode id named by some edge filter, plus the unfiltered graph.
    fn modes_to_check(&self) -> Vec<Option<ModeId>> {
        let mut modes: BTreeSet<ModeId> = BTreeSet::new();
        for edge in &self.dependencies {
            if let Some(filter) = &edge.mode_filter {
                modes.extend(filter.iter().cloned());
            }
        }
        let mut result: Vec<Option<ModeId>> = vec![None];
        result.extend(modes.into_iter().map(Some));
        result
    }

    fn check_acyclic(&self) -> Result<(), ModelError> {
        for mode in self.modes_to_check() {
            let active = |edge: &DependencyEdge| match &mode {
                None => edge.mode_filter.is_none(),
                Some(m) => edge.active_in(m),
            };
            let mut adjacency: BTreeMap<&ComponentId, Vec<&ComponentId>> = BTreeMap::new();
            for edge in self.dependencies.iter().filter(|e| active(e)) {
                adjacency.entry(&edge.from).or_default().push(&edge.to);
            }
            if let Some(cycle) = find_cycle(&adjacency) {
                let path = cycle
                    .iter()
                    .map(|c| c.as_str())
                    .collect::<Vec<_>>()
                    .join(" -> ");
                return Err(ModelError::DependencyCycle {
                    mode: mode.map_or_else(|| "any".to_string(), |m| m.to_string()),
                    path,
                });
            }
        }
        Ok(())
    }
}

/// DFS cycle search returning the closed path when one exists.
fn find_cycle<'a>(
    adjacency: &BTreeMap<&'a ComponentId, Vec<&'a ComponentId>>,
) -> Option<Vec<&'a ComponentId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        InProgress,
        Done,
    }
    let mut marks: BTreeMap<&ComponentId, Mark> = BTreeMap::new();
    let mut stack: Vec<&ComponentId> = Vec::new();

    fn visit<'a>(
        node: &'a ComponentId,
        adjacency: &BTreeMap<&'a ComponentId, Vec<&'a ComponentId>>,
        marks: &mut BTreeMap<&'a ComponentId, Mark>,
        stack: &mut Vec<&'a ComponentId>,
    ) -> Option<Vec<&'a ComponentId>> {
        match marks.get(node) {
            Some(Mark::Done) => return None,
            Some(Mark::InProgress) => {
                let start = stack.iter().position(|n| *n == node).unwrap_or(0);
                let mut cycle: Vec<&ComponentId> = stack[start..].to_vec();
                cycle.push(node);
                return Some(cycle);
            }
            None => {}
        }
        marks.insert(node, Mark::InProgress);
        stack.push(node);
        if let Some(next) = adjacency.get(node) {
            for target in next {
                if let Some(cycle) = visit(target, adjacency, marks, stack) {
                    return Some(cycle);
                }
            }
        }
        stack.pop();
        marks.insert(node, Mark::Done);
        None
    }

    for node in adjacency.keys() {
        if let Some(cycle) = visit(node, adjacency, &mut marks, &mut stack) {
            return Some(cycle);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model(edges: &[(&str, &str, Option<&[&str]>)]) -> Result<SystemModel, ModelError> {
        let ids: BTreeSet<&str> = edges.iter().flat_map(|(f, t, _)| [*f, *t]).collect();
        let components = ids
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
            name: "f".to_string(),
            category: FunctionCategory::Other,
        }];
        let dependencies = edges
            .iter()
            .map(|(from, to, filter)| DependencyEdge {
                from: ComponentId::new(*from),
                to: ComponentId::new(*to),
                mode_filter: filter.map(|ms| ms.iter().map(|m| ModeId::new(*m)).collect()),
            })
            .collect();
        SystemModel::from_parts(components, functions, dependencies, BTreeMap::new())
    }

    #[test]
    fn empty_model_is_valid() {
        let model = SystemModel::from_parts(vec![], vec![], vec![], BTreeMap::new()).unwrap();
        assert_eq!(model.components().count(), 0);
    }

    #[test]
    fn cycle_is_rejected_with_path() {
        let err = tiny_model(&[("a", "b", None), ("b", "a", None)]).unwrap_err();
        match err {
            ModelError::DependencyCycle { path, .. } => {
                assert!(path.contains("a") && path.contains("b"), "path: {path}");
            }
            other => panic!("expected cycle error, got {other}"),
        }
    }

    #[test]
    fn mode_scoped_cycle_is_detected() {
        // a -> b everywhere, b -> a only in m1: cyclic in m1 only.
        let err = tiny_model(&[("a", "b", None), ("b", "a", Some(&["m1"]))]).unwrap_err();
        assert!(matches!(err, ModelError::DependencyCycle { .. }));
    }

    #[test]
    fn required_inputs_is_sorted_and_mode_aware() {
        let model = tiny_model(&[
            ("hub", "zeta", None),
            ("hub", "alpha", None),
            ("hub", "mid", Some(&["m2"])),
        ])
        .unwrap();
        let m1 = model
            .required_inputs(&ComponentId::new("hub"), &ModeId::new("m1"))
            .unwrap();
        assert_eq!(
            m1,
            vec![ComponentId::new("alpha"), ComponentId::new("zeta")]
        );
        let m2 = model
            .required_inputs(&ComponentId::new("hub"), &ModeId::new("m2"))
            .unwrap();
        assert_eq!(
            m2,
            vec![
                ComponentId::new("alpha"),
                ComponentId::new("mid"),
                ComponentId::new("zeta")
            ]
        );
    }

    #[test]
    fn required_inputs_unknown_component() {
        let model = tiny_model(&[("a", "b", None)]).unwrap();
        let err = model
            .required_inputs(&ComponentId::new("ghost"), &ModeId::new("m1"))
            .unwrap_err();
        assert!(matches!(err, ModelError::UnknownComponent { .. }));
    }

    #[test]
    fn leaf_has_no_inputs() {
        let model = tiny_model(&[("a", "b", None)]).unwrap();
        let inputs = model
            .required_inputs(&ComponentId::new("b"), &ModeId::new("m1"))
            .unwrap();
        assert!(inputs.is_empty());
    }

    #[test]
    fn longest_chain_counts_nodes() {
        let model = tiny_model(&[("a", "b", None), ("b", "c", None), ("x", "c", None)]).unwrap();
        assert_eq!(model.longest_chain(&ModeId::new("m1")), 3);
    }

    #[test]
    fn dangling_dependency_is_rejected() {
        let components = vec![Component {
            id: ComponentId::new("a"),
            name: "a".into(),
            kind: ComponentKind::Hardware,
            provides: [FunctionId::new("f")].into_iter().collect(),
        }];
        let functions = vec![Function {
            id: FunctionId::new("f"),
            name: "f".into(),
            category: FunctionCategory::Other,
        }];
        let deps = vec![DependencyEdge {
            from: ComponentId::new("a"),
            to: ComponentId::new("ghost"),
            mode_filter: None,
        }];
        let err =
            SystemModel::from_parts(components, functions, deps, BTreeMap::new()).unwrap_err();
        assert!(matches!(err, ModelError::UnknownComponent { .. }));
    }
}
