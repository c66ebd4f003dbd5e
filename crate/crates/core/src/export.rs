//! Attack-graph export as Graphviz DOT, JSON or a plain adjacency listing.

use std::fmt::Write;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argumentation::DecisionResult;
use crate::probability::{ComparisonPolicy, PoeticWord, ProbabilityKind};
use crate::scalar::{format_fixed3, Scalar};
use crate::theories::{Principle, PrincipleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    Dot,
    Json,
    Text,
}

impl GraphFormat {
    pub const ALL: [GraphFormat; 3] = [GraphFormat::Dot, GraphFormat::Json, GraphFormat::Text];

    pub fn as_str(self) -> &'static str {
        match self {
            GraphFormat::Dot => "dot",
            GraphFormat::Json => "json",
            GraphFormat::Text => "text",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown graph format {0:?}; valid formats: dot, json, text")]
pub struct UnknownFormat(pub String);

impl FromStr for GraphFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GraphFormat::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownFormat(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbabilityView {
    pub kind: ProbabilityKind,
    pub low: f64,
    pub high: f64,
    pub midpoint: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphNode {
    pub branch: String,
    pub action: String,
    pub probability: ProbabilityView,
    pub utility_vector: Vec<f64>,
    pub attacked: bool,
    pub argument_text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub principle: String,
    /// `utilitarian` or `forbiddenState`.
    pub kind: String,
}

/// Machine-readable decision result consumed by the workbench.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphDocument {
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
    pub acceptability: IndexMap<String, f64>,
    pub selected: Vec<String>,
    pub default_pick: String,
    pub tie: bool,
    pub fully_acceptable: bool,
    pub dilemma: bool,
    pub policy: ComparisonPolicy,
    pub principles: Vec<Principle>,
    pub actions: IndexMap<String, String>,
}

fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn principle_kind(result_principles: &[Principle], id: &str) -> &'static str {
    match result_principles
        .iter()
        .find(|p| p.id == id)
        .map(|p| &p.kind)
    {
        Some(PrincipleKind::ForbiddenState { .. }) => "forbiddenState",
        _ => "utilitarian",
    }
}

impl GraphDocument {
    pub fn from_result<T: Scalar>(result: &DecisionResult<T>) -> Self {
        let nodes = result
            .evaluation
            .branches
            .iter()
            .map(|b| GraphNode {
                branch: b.branch.to_string(),
                action: b.action.to_string(),
                probability: ProbabilityView {
                    kind: b.probability.kind(),
                    low: to_f64(b.probability.low()),
                    high: to_f64(b.probability.high()),
                    midpoint: to_f64(b.probability.midpoint()),
                    word: b
                        .probability
                        .source_word()
                        .map(|w: PoeticWord| w.to_string()),
                },
                utility_vector: b.utility.components().iter().map(|u| to_f64(*u)).collect(),
                attacked: result.graph.is_attacked(&b.branch),
                argument_text: result
                    .graph
                    .argument(&b.branch)
                    .map(|a| a.text.clone())
                    .unwrap_or_default(),
            })
            .collect();

        let edges = result
            .graph
            .attacks
            .iter()
            .map(|a| GraphEdge {
                from: a.attacker.to_string(),
                to: a.target.to_string(),
                principle: a.principle.clone(),
                kind: principle_kind(&result.principles, &a.principle).to_string(),
            })
            .collect();

        GraphDocument {
            nodes,
            edges,
            acceptability: result
                .acceptability
                .iter()
                .map(|(k, v)| (k.to_string(), to_f64(*v)))
                .collect(),
            selected: result.selected.iter().map(|a| a.to_string()).collect(),
            default_pick: result.default_pick.to_string(),
            tie: result.tie,
            fully_acceptable: result.fully_acceptable,
            dilemma: result.dilemma,
            policy: result.policy,
            principles: result.principles.clone(),
            actions: result
                .action_labels
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot<T: Scalar>(result: &DecisionResult<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph retrospection {{");
    let _ = writeln!(out, "  rankdir=TB;");
    let _ = writeln!(out, "  node [shape=circle, style=filled, fillcolor=white];");
    for (i, (action, label)) in result.action_labels.iter().enumerate() {
        let acceptability = result.acceptability_of(action).unwrap_or_else(T::zero);
        let title = if label.is_empty() {
            action.to_string()
        } else {
            format!("{label} ({action})")
        };
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(
            out,
            "    label=\"{} - acceptability {}\";",
            dot_escape(&title),
            format_fixed3(acceptability)
        );
        let _ = writeln!(out, "    style=rounded;");
        for b in result
            .evaluation
            .branches
            .iter()
            .filter(|b| &b.action == action)
        {
            let fill = if result.graph.is_attacked(&b.branch) {
                "mistyrose"
            } else {
                "white"
            };
            let _ = writeln!(
                out,
                "    \"{}\" [label=\"{}\\n{}\", fillcolor={}];",
                dot_escape(b.branch.as_str()),
                dot_escape(b.branch.as_str()),
                dot_escape(&b.probability.to_string()),
                fill
            );
        }
        let _ = writeln!(out, "  }}");
    }
    for a in &result.graph.attacks {
        let style = match principle_kind(&result.principles, &a.principle) {
            "utilitarian" => "color=blue, style=dashed",
            _ => "color=black, style=solid",
        };
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\" [{}, tooltip=\"{}\"];",
            dot_escape(a.attacker.as_str()),
            dot_escape(a.target.as_str()),
            style,
            dot_escape(&a.principle)
        );
    }
    out.push_str("}\n");
    out
}

fn to_text<T: Scalar>(result: &DecisionResult<T>) -> String {
    let mut out = String::new();
    if result.graph.attacks.is_empty() {
        out.push_str("no attacks\n");
    } else {
        out.push_str("attacks:\n");
        // attacker -> targets, per principle, in attack order
        let mut grouped: IndexMap<(&str, &str), Vec<&str>> = IndexMap::new();
        for a in &result.graph.attacks {
            grouped
                .entry((a.principle.as_str(), a.attacker.as_str()))
                .or_default()
                .push(a.target.as_str());
        }
        for ((principle, attacker), targets) in grouped {
            let _ = writeln!(out, "  {attacker} -> {} [{principle}]", targets.join(", "));
        }
    }
    out.push_str("acceptability:\n");
    for (action, value) in &result.acceptability {
        let _ = writeln!(out, "  {action} {}", format_fixed3(*value));
    }
    let names: Vec<&str> = result.selected.iter().map(|a| a.as_str()).collect();
    let _ = writeln!(out, "selected: {}", names.join(", "));
    out
}

pub fn export_graph<T: Scalar>(result: &DecisionResult<T>, format: GraphFormat) -> String {
    match format {
        GraphFormat::Dot => to_dot(result),
        GraphFormat::Json => {
            let mut s = serde_json::to_string_pretty(&GraphDocument::from_result(result))
                .expect("graph serializes to JSON");
            s.push('\n');
            s
        }
        GraphFormat::Text => to_text(result),
    }
}
