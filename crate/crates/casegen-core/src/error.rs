//! Error types, one enum per subsystem.

use thiserror::Error;

use crate::ids::{AssumptionId, ComponentId, EntryId, FunctionId, ModeId, TreeId};

/// Errors raised while loading or querying the system model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unsupported schema version {found}, expected {expected}")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("invalid model document at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate component id `{0}`")]
    DuplicateComponent(ComponentId),

    #[error("duplicate function id `{0}`")]
    DuplicateFunction(FunctionId),

    #[error("component `{0}` provides no functions")]
    EmptyProvides(ComponentId),

    #[error("unknown component id `{id}` referenced by {referrer}")]
    UnknownComponent { id: ComponentId, referrer: String },

    #[error("unknown function id `{id}` referenced by {referrer}")]
    UnknownFunction { id: FunctionId, referrer: String },

    #[error("dependency edge from `{0}` to itself")]
    SelfDependency(ComponentId),

    #[error("function `{0}` maps to no components")]
    EmptyFunctionMapping(FunctionId),

    #[error("dependency cycle in mode `{mode}`: {path}")]
    DependencyCycle { mode: String, path: String },

    #[error("io error reading `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Errors raised while loading or mutating the evidence store.
#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unsupported schema version {found}, expected {expected}")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("invalid store document at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate evidence entry id `{0}`")]
    DuplicateEntry(EntryId),

    #[error("duplicate assumption id `{0}`")]
    DuplicateAssumption(AssumptionId),

    #[error("entry `{entry}` references unknown component `{component}`")]
    UnknownComponent {
        entry: EntryId,
        component: ComponentId,
    },

    #[error("entry `{entry}` references unknown function `{function}`")]
    UnknownFunction {
        entry: EntryId,
        function: FunctionId,
    },

    #[error("entry `{entry}` references unknown assumption `{assumption}`")]
    UnknownAssumption {
        entry: EntryId,
        assumption: AssumptionId,
    },

    #[error("entry `{0}` lists no components")]
    EmptyComponents(EntryId),

    #[error("fragment for `{component}` in mode `{mode}` is not fully sealed: {reason}")]
    UnsealedFragment {
        component: ComponentId,
        mode: ModeId,
        reason: String,
    },

    #[error("io error reading `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Errors raised by the structured-claim parser.
#[derive(Debug, Error)]
pub enum ClaimError {
    #[error("{line}:{col}: {message}")]
    Grammar {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("{line}:{col}: undeclared variable `{name}`")]
    UndeclaredVariable {
        name: String,
        line: usize,
        col: usize,
    },

    #[error("claim declares no active operating mode")]
    NoActiveMode,

    #[error("duplicate mode id `{0}`")]
    DuplicateMode(ModeId),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("claim lists no target components")]
    NoTargets,

    #[error("target component `{0}` does not exist in the system model")]
    UnknownTarget(ComponentId),

    #[error("io error reading `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Errors raised by argument-graph mutation.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("node `{0}` already exists")]
    DuplicateNode(String),

    #[error("cannot attach {child_kind} under {parent_kind} node `{parent}`")]
    KindRule {
        parent: String,
        parent_kind: &'static str,
        child_kind: &'static str,
    },

    #[error("goal `{0}` is already sealed")]
    AlreadySealed(String),

    #[error("goal `{0}` already has a strategy child")]
    AlreadyExpanded(String),

    #[error("linking `{parent}` -> `{child}` would introduce a cycle")]
    CycleIntroduced { parent: String, child: String },

    #[error("invalid graph document: {0}")]
    Deserialize(String),

    #[error("edge references unknown node `{0}`")]
    DanglingEdge(String),
}

/// Errors raised by the generation loop.
#[derive(Debug, Error)]
pub enum EngineError {
    #[error("goal `{0}` is not open")]
    GoalNotOpen(String),

    #[error("unknown goal id `{0}`")]
    UnknownGoal(String),

    #[error(
        "expansion of `{goal}` produced no sub-goals (component `{component}` in mode `{mode}`)"
    )]
    EmptyExpansion {
        goal: String,
        component: ComponentId,
        mode: ModeId,
    },

    #[error("iteration cap {cap} exceeded; generation invariant breached")]
    IterationCapExceeded { cap: u32 },

    #[error("mode `{0}` is not an active mode of the claim")]
    UnknownMode(ModeId),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Store(#[from] StoreError),

    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error(transparent)]
    Claim(#[from] ClaimError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Errors raised during confidence evaluation.
#[derive(Debug, Error)]
pub enum EvalError {
    #[error("unsupported schema version {found}, expected {expected}")]
    SchemaVersion { expected: u32, found: u32 },

    #[error("invalid document at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("duplicate tree id `{0}`")]
    DuplicateTree(TreeId),

    #[error("tree `{tree}`: weights of the children of `{attribute}` sum to {sum}, expected 1")]
    WeightSum {
        tree: TreeId,
        attribute: String,
        sum: f64,
    },

    #[error("tree `{tree}`: attribute `{attribute}` has no children")]
    EmptyAttribute { tree: TreeId, attribute: String },

    #[error("tree `{tree}`: leaf `{attribute}` carries no assessments")]
    EmptyAssessments { tree: TreeId, attribute: String },

    #[error("tree `{tree}`: weight {weight} of `{attribute}` is outside [0, 1]")]
    WeightRange {
        tree: TreeId,
        attribute: String,
        weight: f64,
    },

    #[error("tree `{tree}`: score {score} of assessment `{key}` is outside [0, 1]")]
    ScoreRange {
        tree: TreeId,
        key: String,
        score: f64,
    },

    #[error("no context value for attribute `{attribute}` and no declared default")]
    MissingContext { attribute: String },

    #[error("context key `{key}` selects unknown assessment `{value}` of attribute `{attribute}`")]
    UnknownAssessment {
        attribute: String,
        key: String,
        value: String,
    },

    #[error("goal `{0}` is still open; cannot propagate over an incomplete case")]
    OpenGoal(String),

    #[error("no confidence score for evidence node `{0}`")]
    MissingScore(String),

    #[error("evidence entry `{entry}` references unknown evaluation tree `{tree}`")]
    UnknownTree { entry: EntryId, tree: TreeId },

    #[error("io error reading `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Errors raised by export and import.
#[derive(Debug, Error)]
pub enum ExportError {
    #[error("graph failed validation: {0} violations")]
    InvalidGraph(usize),

    #[error("invalid graph document: {0}")]
    Parse(String),

    #[error(transparent)]
    Graph(#[from] GraphError),
}
