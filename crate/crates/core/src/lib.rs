//! Hypothetical retrospection for ethical decisions under uncertainty.
//!
//! Each branch of future development an action may lead to yields a default
//! argument that the action was acceptable. Arguments of different actions
//! attack each other when a moral principle answers both critical questions
//! positively; an action's acceptability is one minus the probability of its
//! attacked branches, and the engine selects the most acceptable action.
//!
//! The engine is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix it to `f64`.
//!
//! ```
//! use retro_core::{parse_scenario, retrospect, scenario::bundled};
//!
//! let scenario = parse_scenario::<f64>(bundled::LIBRARY).unwrap();
//! let result = retrospect(&scenario.problem, scenario.config).unwrap();
//! assert_eq!(result.selected[0].as_str(), "recommend");
//! ```

pub mod argumentation;
pub mod dialogue;
pub mod export;
pub mod model;
pub mod probability;
pub mod scalar;
pub mod scenario;
pub mod semantics;
pub mod theories;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use argumentation::{compute_attacks, decide, generate_argument, Argument, Attack};
pub use dialogue::explain;
pub use export::{export_graph, GraphDocument, GraphFormat};
pub use model::{
    validate_problem, ActionId, BranchId, Severity, StateAssignment, StateVariable, ValidationMode,
    ValidationReport, VariableId, Violation,
};
pub use probability::{ComparisonPolicy, PoeticWord, ProbabilityError, ProbabilityKind};
pub use scalar::Scalar;
pub use scenario::{parse_document, parse_ethics, parse_scenario, ScenarioError};
pub use semantics::SemanticsError;
pub use theories::{principles_for, Principle, PrincipleKind};

pub type Probability = probability::Probability<f64>;
pub type Event = model::Event<f64>;
pub type Branch = model::Branch<f64>;
pub type Action = model::Action<f64>;
pub type UtilityAssignment = model::UtilityAssignment<f64>;
pub type UtilityClass = model::UtilityClass<f64>;
pub type ForbiddenState = model::ForbiddenState;
pub type Problem = model::EthicalDecisionProblem<f64>;
pub type UtilityVector = semantics::UtilityVector<f64>;
pub type BranchEvaluation = semantics::BranchEvaluation<f64>;
pub type ActionExpectation = semantics::ActionExpectation<f64>;
pub type AttackGraph = argumentation::AttackGraph<f64>;
pub type DecisionResult = argumentation::DecisionResult<f64>;
pub type ScenarioDocument = scenario::ScenarioDocument<f64>;
pub type EthicsPatch = scenario::EthicsPatch<f64>;
pub type Scenario = scenario::Scenario<f64>;

/// Per-run settings carried by a scenario document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunConfig {
    pub policy: ComparisonPolicy,
    pub validation: ValidationMode,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("problem failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// Validates `problem` under `config.validation`, then decides with the
/// utilitarian principle and one principle per forbidden state.
pub fn retrospect<T: Scalar>(
    problem: &model::EthicalDecisionProblem<T>,
    config: RunConfig,
) -> Result<argumentation::DecisionResult<T>, EngineError> {
    let report = problem.validate(config.validation);
    if !report.is_valid() {
        return Err(EngineError::Invalid(report));
    }
    Ok(decide(problem, &principles_for(problem), config.policy)?)
}
