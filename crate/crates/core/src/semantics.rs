//! Branch evaluation: state traces, branch probabilities, lexicographic
//! utility vectors, forbidden-state violations and per-action expectations.

use std::cmp::Ordering;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    Action, ActionId, Branch, BranchId, EthicalDecisionProblem, Event, StateAssignment, VariableId,
};
use crate::probability::Probability;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("event assigns unknown variable {0}")]
    UnknownVariable(VariableId),
    #[error("branch {branch} does not belong to action {action}")]
    BranchNotInAction { branch: BranchId, action: ActionId },
}

/// One utility per class, index 0 being the most important class.
///
/// Ordering is lexicographic: any difference in a more important class
/// decides the comparison regardless of the less important ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct UtilityVector<T>(pub Vec<T>);

impl<T: Scalar> UtilityVector<T> {
    pub fn zeros(len: usize) -> Self {
        UtilityVector(vec![T::zero(); len])
    }

    pub fn components(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Exact lexicographic comparison (total on finite components).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp_within(other, T::zero())
    }

    /// Lexicographic comparison where components closer than `tolerance`
    /// count as equal.
    pub fn lex_cmp_within(&self, other: &Self, tolerance: T) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if (*a - *b).abs() <= tolerance {
                continue;
            }
            return if a > b {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.0.len().cmp(&other.0.len())
    }
}

/// The outcome of following one branch from the initial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", bound = "T: Scalar")]
pub struct BranchEvaluation<T> {
    pub branch: BranchId,
    pub action: ActionId,
    /// Initial state followed by the state after each event.
    pub trace: Vec<StateAssignment>,
    pub probability: Probability<T>,
    pub utility: UtilityVector<T>,
    /// Labels of forbidden states reached after the initial state, in declaration order.
    pub violations: Vec<String>,
    /// Variables assigned by at least one event, in declaration order.
    pub assigned: Vec<VariableId>,
}

impl<T: Scalar> BranchEvaluation<T> {
    pub fn terminal(&self) -> &StateAssignment {
        self.trace
            .last()
            .expect("trace always holds the initial state")
    }

    pub fn violates(&self, label: &str) -> bool {
        self.violations.iter().any(|v| v == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", bound = "T: Scalar")]
pub struct ActionExpectation<T> {
    pub action: ActionId,
    pub expected_utility: UtilityVector<T>,
    /// Per forbidden-state label, the summed probability of the violating branches.
    pub violation_probability: IndexMap<String, Probability<T>>,
}

impl<T: Scalar> ActionExpectation<T> {
    pub fn violation_probability(&self, label: &str) -> Probability<T> {
        self.violation_probability
            .get(label)
            .copied()
            .unwrap_or_else(Probability::zero)
    }
}

pub fn apply_event<T: Scalar>(
    state: &StateAssignment,
    event: &Event<T>,
) -> Result<StateAssignment, SemanticsError> {
    let mut next = state.clone();
    if next.set(&event.variable, event.value) {
        Ok(next)
    } else {
        Err(SemanticsError::UnknownVariable(event.variable.clone()))
    }
}

/// Utility of `state` under each class of the problem.
pub fn utility_vector<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    state: &StateAssignment,
) -> UtilityVector<T> {
    UtilityVector(
        problem
            .utility_classes
            .iter()
            .map(|class| class.utility_of(state))
            .collect(),
    )
}

pub fn evaluate_branch<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    action: &Action<T>,
    branch: &Branch<T>,
) -> Result<BranchEvaluation<T>, SemanticsError> {
    if !action.branches.iter().any(|b| b.id == branch.id) {
        return Err(SemanticsError::BranchNotInAction {
            branch: branch.id.clone(),
            action: action.id.clone(),
        });
    }

    let mut trace = Vec::with_capacity(branch.events.len() + 1);
    trace.push(problem.initial.clone());
    for event in &branch.events {
        let next = apply_event(trace.last().expect("non-empty trace"), event)?;
        trace.push(next);
    }

    let violations = problem
        .forbidden
        .iter()
        .filter(|f| trace[1..].iter().any(|s| f.is_violated_by(s)))
        .map(|f| f.label.clone())
        .collect();

    let assigned = problem
        .variables
        .iter()
        .filter(|v| branch.events.iter().any(|e| e.variable == v.id))
        .map(|v| v.id.clone())
        .collect();

    let utility = utility_vector(problem, trace.last().expect("non-empty trace"));

    Ok(BranchEvaluation {
        branch: branch.id.clone(),
        action: action.id.clone(),
        trace,
        probability: branch.probability(),
        utility,
        violations,
        assigned,
    })
}

/// Aggregates already-evaluated branches of `action`.
///
/// Expected utility weights each branch by its probability midpoint. Violation
/// probability sums the violating branches' bounds and clips them to `[0, 1]`,
/// which for exact probabilities is the plain midpoint sum.
pub fn expectation_from<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    action: &ActionId,
    evaluations: &[BranchEvaluation<T>],
) -> ActionExpectation<T> {
    let mine: Vec<&BranchEvaluation<T>> =
        evaluations.iter().filter(|e| &e.action == action).collect();

    let mut expected = UtilityVector::zeros(problem.utility_classes.len());
    for eval in &mine {
        let weight = eval.probability.midpoint();
        for (acc, u) in expected.0.iter_mut().zip(&eval.utility.0) {
            *acc = *acc + weight * *u;
        }
    }

    let violation_probability = problem
        .forbidden
        .iter()
        .map(|f| {
            let probs: Vec<Probability<T>> = mine
                .iter()
                .filter(|e| e.violates(&f.label))
                .map(|e| e.probability)
                .collect();
            (f.label.clone(), Probability::sum_clipped(&probs))
        })
        .collect();

    ActionExpectation {
        action: action.clone(),
        expected_utility: expected,
        violation_probability,
    }
}

pub fn action_expectation<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    action: &Action<T>,
) -> Result<ActionExpectation<T>, SemanticsError> {
    let evaluations = action
        .branches
        .iter()
        .map(|b| evaluate_branch(problem, action, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(expectation_from(problem, &action.id, &evaluations))
}

/// Every branch evaluation and action expectation of a problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct ProblemEvaluation<T> {
    pub branches: Vec<BranchEvaluation<T>>,
    pub expectations: Vec<ActionExpectation<T>>,
}

impl<T: Scalar> ProblemEvaluation<T> {
    pub fn branch(&self, id: &BranchId) -> Option<&BranchEvaluation<T>> {
        self.branches.iter().find(|b| &b.branch == id)
    }

    pub fn expectation(&self, id: &ActionId) -> Option<&ActionExpectation<T>> {
        self.expectations.iter().find(|e| &e.action == id)
    }
}

pub fn evaluate_problem<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
) -> Result<ProblemEvaluation<T>, SemanticsError> {
    let branches = problem
        .branches()
        .map(|(a, b)| evaluate_branch(problem, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let expectations = problem
        .actions
        .iter()
        .map(|a| expectation_from(problem, &a.id, &branches))
        .collect();
    Ok(ProblemEvaluation {
        branches,
        expectations,
    })
}
