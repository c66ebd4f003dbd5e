//! Scenario files: JSON documents holding a decision problem together with
//! its ethics configuration, plus patches that replace only the ethics.
//!
//! Variable references (`var` fields and `initial` keys) may name a variable
//! by id or by label; the canonical form written back uses ids.

use std::collections::HashMap;

use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Action, EthicalDecisionProblem, ForbiddenState, StateAssignment, StateVariable, UtilityClass,
    ValidationMode, ValidationReport, VariableId,
};
use crate::probability::ComparisonPolicy;
use crate::scalar::Scalar;
use crate::RunConfig;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("scenario failed validation:\n{0}")]
    Invalid(ValidationReport),
}

impl ScenarioError {
    /// Field path (schema errors) or `line:column` (syntax errors).
    pub fn location(&self) -> Option<String> {
        match self {
            ScenarioError::Syntax { line, column, .. } => Some(format!("{line}:{column}")),
            ScenarioError::Schema { path, .. } => Some(path.clone()),
            ScenarioError::Invalid(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "T: Scalar")]
pub struct ScenarioDocument<T> {
    pub version: String,
    pub variables: Vec<StateVariable>,
    #[serde(default)]
    pub initial: IndexMap<String, bool>,
    pub actions: Vec<Action<T>>,
    #[serde(default)]
    pub utility_classes: Vec<UtilityClass<T>>,
    #[serde(default)]
    pub forbidden: Vec<ForbiddenState>,
    #[serde(default)]
    pub policy: ComparisonPolicy,
    #[serde(default)]
    pub validation: ValidationMode,
}

/// Replacement ethics: any field present replaces the document's.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, bound = "T: Scalar")]
pub struct EthicsPatch<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_classes: Option<Vec<UtilityClass<T>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<ForbiddenState>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<ComparisonPolicy>,
}

impl<T: Scalar> EthicsPatch<T> {
    pub fn is_empty(&self) -> bool {
        self.utility_classes.is_none() && self.forbidden.is_none() && self.policy.is_none()
    }
}

/// A parsed, resolved and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub document: ScenarioDocument<T>,
    pub problem: EthicalDecisionProblem<T>,
    pub config: RunConfig,
    /// Validation outcome; contains warnings only.
    pub report: ValidationReport,
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, ScenarioError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let path = err.path().to_string();
        let inner = err.into_inner();
        classify(inner, Some(path))
    })?;
    de.end().map_err(|e| classify(e, None))?;
    Ok(value)
}

fn classify(err: serde_json::Error, path: Option<String>) -> ScenarioError {
    use serde_json::error::Category;
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => ScenarioError::Syntax {
            line: err.line(),
            column: err.column(),
            message: strip_position(&err.to_string()),
        },
        Category::Data => ScenarioError::Schema {
            path: path.unwrap_or_else(|| ".".to_string()),
            message: strip_position(&err.to_string()),
        },
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

/// Syntax and schema checks only; no resolution or validation.
pub fn parse_document<T: Scalar>(text: &str) -> Result<ScenarioDocument<T>, ScenarioError> {
    let doc: ScenarioDocument<T> = from_json(text)?;
    if doc.version != SCHEMA_VERSION {
        return Err(ScenarioError::Schema {
            path: "version".to_string(),
            message: format!(
                "unsupported version {:?}; expected {:?}",
                doc.version, SCHEMA_VERSION
            ),
        });
    }
    Ok(doc)
}

pub fn parse_ethics<T: Scalar>(text: &str) -> Result<EthicsPatch<T>, ScenarioError> {
    from_json(text)
}

/// Parses, resolves and validates with the document's own validation mode.
pub fn parse_scenario<T: Scalar>(text: &str) -> Result<Scenario<T>, ScenarioError> {
    parse_document(text)?.into_scenario()
}

impl<T: Scalar> ScenarioDocument<T> {
    pub fn from_problem(problem: &EthicalDecisionProblem<T>, config: RunConfig) -> Self {
        ScenarioDocument {
            version: SCHEMA_VERSION.to_string(),
            variables: problem.variables.clone(),
            initial: problem
                .initial
                .iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            actions: problem.actions.clone(),
            utility_classes: problem.utility_classes.clone(),
            forbidden: problem.forbidden.clone(),
            policy: config.policy,
            validation: config.validation,
        }
    }

    pub fn config(&self) -> RunConfig {
        RunConfig {
            policy: self.policy,
            validation: self.validation,
        }
    }

    /// Applies a patch; returns whether anything was replaced.
    pub fn apply_ethics(&mut self, patch: &EthicsPatch<T>) -> bool {
        if let Some(classes) = &patch.utility_classes {
            self.utility_classes = classes.clone();
        }
        if let Some(forbidden) = &patch.forbidden {
            self.forbidden = forbidden.clone();
        }
        if let Some(policy) = patch.policy {
            self.policy = policy;
        }
        !patch.is_empty()
    }

    /// Builds the problem with every reference resolved to a variable id and
    /// missing initial values defaulted to `false`. Unknown references are
    /// kept verbatim so validation can report them.
    pub fn to_problem(&self) -> EthicalDecisionProblem<T> {
        let mut by_label: HashMap<&str, &VariableId> = HashMap::new();
        for var in &self.variables {
            by_label.entry(var.label.as_str()).or_insert(&var.id);
        }
        let ids: std::collections::HashSet<&str> =
            self.variables.iter().map(|v| v.id.as_str()).collect();
        let resolve = |name: &VariableId| -> VariableId {
            if ids.contains(name.as_str()) {
                name.clone()
            } else {
                by_label
                    .get(name.as_str())
                    .map(|id| (*id).clone())
                    .unwrap_or_else(|| name.clone())
            }
        };

        let mut initial: IndexMap<VariableId, bool> = self
            .variables
            .iter()
            .map(|v| (v.id.clone(), false))
            .collect();
        for (name, value) in &self.initial {
            initial.insert(resolve(&VariableId::from(name.as_str())), *value);
        }

        let actions = self
            .actions
            .iter()
            .map(|a| {
                let mut a = a.clone();
                for branch in &mut a.branches {
                    for event in &mut branch.events {
                        event.variable = resolve(&event.variable);
                    }
                }
                a
            })
            .collect();

        let utility_classes = self
            .utility_classes
            .iter()
            .map(|class| {
                let mut class = class.clone();
                for assignment in &mut class.assignments {
                    assignment.variable = resolve(&assignment.variable);
                }
                class
            })
            .collect();

        let forbidden = self
            .forbidden
            .iter()
            .map(|f| ForbiddenState {
                variable: resolve(&f.variable),
                ..f.clone()
            })
            .collect();

        EthicalDecisionProblem {
            variables: self.variables.clone(),
            initial: initial.into_iter().collect::<StateAssignment>(),
            actions,
            utility_classes,
            forbidden,
        }
    }

    /// Resolves and validates under the document's validation mode.
    pub fn into_scenario(self) -> Result<Scenario<T>, ScenarioError> {
        let mode = self.validation;
        self.into_scenario_with(mode)
    }

    pub fn into_scenario_with(
        mut self,
        mode: ValidationMode,
    ) -> Result<Scenario<T>, ScenarioError> {
        self.validation = mode;
        let problem = self.to_problem();
        let report = problem.validate(mode);
        if !report.is_valid() {
            return Err(ScenarioError::Invalid(report));
        }
        Ok(Scenario {
            config: self.config(),
            document: self,
            problem,
            report,
        })
    }

    /// Canonical form: references as ids, full initial state, pretty JSON.
    pub fn to_canonical_json(&self) -> String {
        let canonical = ScenarioDocument::from_problem(&self.to_problem(), self.config());
        let mut text =
            serde_json::to_string_pretty(&canonical).expect("scenario serializes to JSON");
        text.push('\n');
        text
    }
}

pub fn serialize_scenario<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    config: RunConfig,
) -> String {
    ScenarioDocument::from_problem(problem, config).to_canonical_json()
}

/// Scenario files shipped with the crate.
pub mod bundled {
    /// The autonomous library decision tree with the passes-test utility only.
    pub const LIBRARY: &str = include_str!("../scenarios/library.json");
    /// Coin-Apple with the explicit losing-flip complement event.
    pub const COIN_APPLE: &str = include_str!("../scenarios/coin-apple.json");
    /// Coin-Apple exactly as usually printed; its coin branches sum to 1.5.
    pub const COIN_APPLE_VERBATIM: &str = include_str!("../scenarios/coin-apple-verbatim.json");

    pub const ETHICS_PASSES_TEST: &str = include_str!("../scenarios/ethics/passes-test.json");
    pub const ETHICS_OTHERS_MINUS_ONE: &str =
        include_str!("../scenarios/ethics/others-find-out-minus-1.json");
    pub const ETHICS_OTHERS_MINUS_FIVE: &str =
        include_str!("../scenarios/ethics/others-find-out-minus-5.json");
    pub const ETHICS_TWO_CLASSES: &str =
        include_str!("../scenarios/ethics/others-find-out-higher-class.json");
    pub const ETHICS_DATA_PROTECTION: &str =
        include_str!("../scenarios/ethics/data-protection.json");
}
