//! Operator-facing pipeline: validate inputs, generate a case, evaluate its
//! confidence, and export DOT.
//!
//! ```text
//! casegen validate --model m.json --store s.json --claim c.claim [--trees t.json] [--context x.json]
//! casegen generate --model m.json --store s.json --claim c.claim --out out/ [--mode M] [--no-cache] [--parallel-modes]
//! casegen evaluate GRAPH --model m.json --store s.json [--trees t.json] [--context x.json] --out out/
//! casegen export GRAPH --out out/ [--unroll]
//! casegen run-all --model m.json --store s.json --claim c.claim --out out/ [...]
//! ```
//!
//! Exit codes: 0 success, 2 validation failure, 3 orphaned case,
//! 4 internal invariant breach. Commands write only into `--out`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use casegen_core::claim::{conjunctive_split, load_claim_file, RootGoalSpec};
use casegen_core::engine::{generate, GenerateOptions, GenerationOutcome};
use casegen_core::error::EngineError;
use casegen_core::eval::{
    self, load_context_file, load_evaluation_trees_file, EvalContext, EvaluationTrees,
};
use casegen_core::evidence::{load_evidence_store_file, EvidenceStore};
use casegen_core::export::{export_dot, export_json, export_trace, import_json, ScoreAnnotations};
use casegen_core::gsn::{GoalStatus, GsnGraph, NodeKind};
use casegen_core::ids::{EntryId, ModeId};
use casegen_core::model::{load_system_model_file, SystemModel};

const EXIT_VALIDATION: u8 = 2;
const EXIT_ORPHANED: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "casegen",
    version,
    about = "Generate and evaluate GSN safety cases"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and cross-check every input document.
    Validate(InputArgs),
    /// Generate the argument graph and its iteration trace.
    Generate(GenerateArgs),
    /// Score a generated graph and report the root confidence.
    Evaluate(EvaluateArgs),
    /// Render a generated graph as DOT.
    Export(ExportArgs),
    /// Validate, generate, evaluate and export in one run.
    RunAll(RunAllArgs),
}

#[derive(Args)]
struct InputArgs {
    /// System model document.
    #[arg(long)]
    model: PathBuf,
    /// Evidence store document.
    #[arg(long)]
    store: PathBuf,
    /// Structured claim document.
    #[arg(long)]
    claim: PathBuf,
    /// Evaluation trees document.
    #[arg(long)]
    trees: Option<PathBuf>,
    /// Assessment context document.
    #[arg(long)]
    context: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    inputs: InputArgs,
    /// Restrict generation to one active mode.
    #[arg(long)]
    mode: Option<String>,
    /// Disable the fragment cache.
    #[arg(long)]
    no_cache: bool,
    /// Generate per-mode subtrees concurrently.
    #[arg(long)]
    parallel_modes: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Graph document produced by `generate`.
    graph: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    trees: Option<PathBuf>,
    #[arg(long)]
    context: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    /// Graph document produced by `generate`.
    graph: PathBuf,
    /// Duplicate shared subtrees for tree-style rendering.
    #[arg(long)]
    unroll: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunAllArgs {
    #[command(flatten)]
    inputs: InputArgs,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    no_cache: bool,
    #[arg(long)]
    parallel_modes: bool,
    #[arg(long)]
    unroll: bool,
    #[arg(long)]
    out: PathBuf,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

macro_rules! validation_failure_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure::validation(e.to_string())
            }
        })*
    };
}

validation_failure_from!(
    casegen_core::error::ModelError,
    casegen_core::error::StoreError,
    casegen_core::error::ClaimError,
    casegen_core::error::EvalError,
    casegen_core::error::ExportError
);

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match &e {
            EngineError::IterationCapExceeded { .. }
            | EngineError::Graph(_)
            | EngineError::EmptyExpansion { .. }
            | EngineError::GoalNotOpen(_)
            | EngineError::UnknownGoal(_) => EXIT_INTERNAL,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(args) => cmd_validate(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Export(args) => cmd_export(&args),
        Command::RunAll(args) => cmd_run_all(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            let doc = json!({ "violations": [failure.message] });
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("serializes")
            );
            ExitCode::from(failure.code)
        }
    }
}

struct LoadedInputs {
    model: SystemModel,
    store: EvidenceStore,
    spec: RootGoalSpec,
    trees: Option<EvaluationTrees>,
    context: Option<EvalContext>,
}

/// Load every input document, failing fast on the first defect.
fn load_inputs(args: &InputArgs) -> Result<LoadedInputs, Failure> {
    let model = load_system_model_file(&args.model)?;
    let store = load_evidence_store_file(&args.store, &model)?;
    let spec = load_claim_file(&args.claim)?;
    conjunctive_split(&spec.claim, &model, &store)?;
    let trees = args
        .trees
        .as_deref()
        .map(load_evaluation_trees_file)
        .transpose()?;
    let context = args.context.as_deref().map(load_context_file).transpose()?;
    Ok(LoadedInputs {
        model,
        store,
        spec,
        trees,
        context,
    })
}

fn cmd_validate(args: &InputArgs) -> Result<u8, Failure> {
    load_inputs(args)?;
    println!("{}", json!({ "violations": [] }));
    Ok(0)
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

fn run_generation(
    inputs: &LoadedInputs,
    mode: Option<&str>,
    no_cache: bool,
    parallel_modes: bool,
) -> Result<GenerationOutcome, Failure> {
    let options = GenerateOptions {
        no_cache,
        mode_filter: mode.map(ModeId::new),
        parallel_modes,
    };
    Ok(generate(
        &inputs.spec,
        &inputs.model,
        &inputs.store,
        inputs.trees.as_ref(),
        inputs.context.as_ref(),
        &options,
    )?)
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let inputs = load_inputs(&args.inputs)?;
    let outcome = run_generation(
        &inputs,
        args.mode.as_deref(),
        args.no_cache,
        args.parallel_modes,
    )?;
    write_out(&args.out, "graph.json", &export_json(&outcome.graph, None))?;
    write_out(&args.out, "trace.json", &export_trace(&outcome.trace))?;
    let counts = outcome.graph.total_counts();
    println!(
        "generated {} nodes in {} iterations ({} store queries, {} fragment hits, {} fragments stored)",
        outcome.graph.len(),
        outcome.trace.len(),
        outcome.stats.store_queries,
        outcome.stats.fragment_hits,
        outcome.stats.fragments_stored,
    );
    if counts.orphaned > 0 {
        let orphans: Vec<String> = outcome
            .graph
            .nodes()
            .filter(|n| n.status == Some(GoalStatus::Orphaned))
            .map(|n| format!("{} ({})", n.id, n.source_ref.clone().unwrap_or_default()))
            .collect();
        eprintln!(
            "warning: {} orphaned goal(s): {}",
            counts.orphaned,
            orphans.join(", ")
        );
        return Ok(EXIT_ORPHANED);
    }
    Ok(0)
}

/// Score every evidence node of a validated graph, then propagate.
fn score_graph(
    graph: &GsnGraph,
    store: &EvidenceStore,
    trees: Option<&EvaluationTrees>,
    context: Option<&EvalContext>,
) -> Result<ScoreAnnotations, Failure> {
    let violations = graph.validate();
    if !violations.is_empty() {
        let listing: Vec<String> = violations.iter().map(|v| v.message.clone()).collect();
        return Err(Failure::validation(format!(
            "graph failed validation: {}",
            listing.join("; ")
        )));
    }
    let empty_context = EvalContext::default();
    let context = context.unwrap_or(&empty_context);
    let mut scores = BTreeMap::new();
    for node in graph.nodes().filter(|n| n.kind == NodeKind::Evidence) {
        let entry = node
            .source_ref
            .as_deref()
            .and_then(|id| store.entry(&EntryId::new(id)));
        let value = match entry {
            Some(entry) => match (&entry.evaluation_tree, trees) {
                (Some(tree_id), Some(trees)) => {
                    let tree = trees.get(tree_id).ok_or_else(|| {
                        Failure::validation(format!(
                            "evidence entry `{}` references unknown evaluation tree `{tree_id}`",
                            entry.id
                        ))
                    })?;
                    eval::evidence_confidence(tree, context)?.value
                }
                (Some(tree_id), None) => {
                    return Err(Failure::validation(format!(
                        "sealed leaf uses entry `{}` with evaluation tree `{tree_id}` but no trees document was supplied",
                        entry.id
                    )))
                }
                (None, _) => 1.0,
            },
            None => 1.0,
        };
        scores.insert(node.id.clone(), value);
    }
    let propagation = eval::propagate(graph, &scores)?;

    let mut coverage = BTreeMap::new();
    for node in graph.nodes().filter(|n| n.kind == NodeKind::Goal) {
        if node.status != Some(GoalStatus::Sealed) {
            continue;
        }
        let entry = graph
            .children(&node.id)
            .iter()
            .filter_map(|c| graph.node(c))
            .find(|c| c.kind == NodeKind::Evidence)
            .and_then(|c| c.source_ref.as_deref())
            .and_then(|id| store.entry(&EntryId::new(id)));
        if let Some(entry) = entry {
            let report = eval::coverage_check(entry, &Default::default(), &node.assumptions);
            coverage.insert(node.id.clone(), report);
        }
    }
    Ok(ScoreAnnotations {
        propagation: Some(propagation),
        coverage,
    })
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<u8, Failure> {
    let model = load_system_model_file(&args.model)?;
    let store = load_evidence_store_file(&args.store, &model)?;
    let trees = args
        .trees
        .as_deref()
        .map(load_evaluation_trees_file)
        .transpose()?;
    let context = args.context.as_deref().map(load_context_file).transpose()?;
    let graph_text = std::fs::read_to_string(&args.graph)?;
    let graph = import_json(&graph_text)?;
    let annotations = score_graph(&graph, &store, trees.as_ref(), context.as_ref())?;
    let propagation = annotations.propagation.as_ref().expect("scored");

    let scores_doc = json!({
        "schema": 1,
        "root": propagation.root,
        "per_goal": propagation.per_goal,
        "orphaned": propagation.orphaned,
        "coverage": annotations.coverage,
    });
    let mut text = serde_json::to_string_pretty(&scores_doc).expect("serializes");
    text.push('\n');
    write_out(&args.out, "scores.json", &text)?;
    if !propagation.orphaned.is_empty() {
        eprintln!(
            "warning: {} orphaned goal(s) contribute zero confidence",
            propagation.orphaned.len()
        );
    }
    println!("root confidence: {:.3}", propagation.root);
    Ok(0)
}

fn cmd_export(args: &ExportArgs) -> Result<u8, Failure> {
    let graph_text = std::fs::read_to_string(&args.graph)?;
    let graph = import_json(&graph_text)?;
    let violations = graph.validate();
    if !violations.is_empty() {
        let listing: Vec<String> = violations.iter().map(|v| v.message.clone()).collect();
        return Err(Failure::validation(format!(
            "graph failed validation: {}",
            listing.join("; ")
        )));
    }
    let graph = if args.unroll { graph.unroll() } else { graph };
    let dot = export_dot(&graph, &casegen_core::export::RenderStyle::default());
    let path = write_out(&args.out, "case.dot", &dot)?;
    println!("wrote {}", path.display());
    Ok(0)
}

fn cmd_run_all(args: &RunAllArgs) -> Result<u8, Failure> {
    let inputs = load_inputs(&args.inputs)?;
    let outcome = run_generation(
        &inputs,
        args.mode.as_deref(),
        args.no_cache,
        args.parallel_modes,
    )?;
    write_out(&args.out, "graph.json", &export_json(&outcome.graph, None))?;
    write_out(&args.out, "trace.json", &export_trace(&outcome.trace))?;

    let annotations = score_graph(
        &outcome.graph,
        &inputs.store,
        inputs.trees.as_ref(),
        inputs.context.as_ref(),
    )?;
    let propagation = annotations.propagation.as_ref().expect("scored");
    let scores_doc = json!({
        "schema": 1,
        "root": propagation.root,
        "per_goal": propagation.per_goal,
        "orphaned": propagation.orphaned,
        "coverage": annotations.coverage,
    });
    let mut text = serde_json::to_string_pretty(&scores_doc).expect("serializes");
    text.push('\n');
    write_out(&args.out, "scores.json", &text)?;

    let render = if args.unroll {
        outcome.graph.unroll()
    } else {
        outcome.graph.clone()
    };
    let dot = export_dot(&render, &casegen_core::export::RenderStyle::default());
    write_out(&args.out, "case.dot", &dot)?;

    println!(
        "case complete: {} nodes, {} iterations, root confidence {:.3}",
        outcome.graph.len(),
        outcome.trace.len(),
        propagation.root
    );
    if outcome.graph.has_orphans() {
        eprintln!("warning: case contains orphaned goals");
        return Ok(EXIT_ORPHANED);
    }
    Ok(0)
}
