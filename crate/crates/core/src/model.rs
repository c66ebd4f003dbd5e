//! The ethical decision problem and its structural validation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::probability::Probability;
use crate::scalar::{format_trimmed, Scalar};

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

id_newtype!(
    /// Identifier of a Boolean state variable.
    VariableId
);
id_newtype!(ActionId);
id_newtype!(BranchId);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateVariable {
    pub id: VariableId,
    pub label: String,
}

/// Truth assignment to the state variables, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateAssignment {
    values: IndexMap<VariableId, bool>,
}

impl StateAssignment {
    /// All variables set to `false`.
    pub fn all_false(variables: &[StateVariable]) -> Self {
        variables.iter().map(|v| (v.id.clone(), false)).collect()
    }

    pub fn get(&self, var: &VariableId) -> Option<bool> {
        self.values.get(var).copied()
    }

    pub fn contains(&self, var: &VariableId) -> bool {
        self.values.contains_key(var)
    }

    /// Overwrites an existing variable; returns `false` if `var` is not part of the state.
    pub fn set(&mut self, var: &VariableId, value: bool) -> bool {
        match self.values.get_mut(var) {
            Some(slot) => {
                *slot = value;
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VariableId, bool)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl FromIterator<(VariableId, bool)> for StateAssignment {
    fn from_iter<I: IntoIterator<Item = (VariableId, bool)>>(iter: I) -> Self {
        StateAssignment {
            values: iter.into_iter().collect(),
        }
    }
}

/// One variable changing value with some probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct Event<T> {
    #[serde(rename = "var")]
    pub variable: VariableId,
    pub value: bool,
    #[serde(rename = "p")]
    pub probability: Probability<T>,
}

impl<T: Scalar> Event<T> {
    pub fn new(variable: impl Into<VariableId>, value: bool, probability: Probability<T>) -> Self {
        Event {
            variable: variable.into(),
            value,
            probability,
        }
    }
}

/// An ordered sequence of events that may follow an action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct Branch<T> {
    pub id: BranchId,
    #[serde(default)]
    pub events: Vec<Event<T>>,
}

impl<T: Scalar> Branch<T> {
    /// Product of the event probabilities; exact one for an empty branch.
    pub fn probability(&self) -> Probability<T> {
        self.events
            .iter()
            .fold(Probability::one(), |acc, e| acc.product(&e.probability))
    }
}

/// An available action together with its branches of future development.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct Action<T> {
    pub id: ActionId,
    #[serde(default)]
    pub label: String,
    pub branches: Vec<Branch<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct UtilityAssignment<T> {
    #[serde(rename = "var")]
    pub variable: VariableId,
    pub value: bool,
    pub utility: T,
}

/// Utility assignments of equal importance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent, bound = "T: Scalar")]
pub struct UtilityClass<T> {
    pub assignments: Vec<UtilityAssignment<T>>,
}

impl<T: Scalar> UtilityClass<T> {
    pub fn new(assignments: Vec<UtilityAssignment<T>>) -> Self {
        UtilityClass { assignments }
    }

    /// Sum of the utilities whose (variable, value) pair holds in `state`.
    pub fn utility_of(&self, state: &StateAssignment) -> T {
        self.assignments
            .iter()
            .filter(|a| state.get(&a.variable) == Some(a.value))
            .fold(T::zero(), |acc, a| acc + a.utility)
    }
}

/// A variable/value pair that a deontological law prohibits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForbiddenState {
    #[serde(rename = "var")]
    pub variable: VariableId,
    pub value: bool,
    pub label: String,
}

impl ForbiddenState {
    pub fn is_violated_by(&self, state: &StateAssignment) -> bool {
        state.get(&self.variable) == Some(self.value)
    }
}

/// Variables, initial state, actions with their branches, utility classes
/// (most important first) and forbidden states.
#[derive(Debug, Clone, PartialEq)]
pub struct EthicalDecisionProblem<T> {
    pub variables: Vec<StateVariable>,
    pub initial: StateAssignment,
    pub actions: Vec<Action<T>>,
    pub utility_classes: Vec<UtilityClass<T>>,
    pub forbidden: Vec<ForbiddenState>,
}

impl<T: Scalar> EthicalDecisionProblem<T> {
    pub fn action(&self, id: &ActionId) -> Option<&Action<T>> {
        self.actions.iter().find(|a| &a.id == id)
    }

    pub fn variable(&self, id: &VariableId) -> Option<&StateVariable> {
        self.variables.iter().find(|v| &v.id == id)
    }

    /// Every branch paired with the action it belongs to, in declaration order.
    pub fn branches(&self) -> impl Iterator<Item = (&Action<T>, &Branch<T>)> {
        self.actions
            .iter()
            .flat_map(|a| a.branches.iter().map(move |b| (a, b)))
    }

    pub fn branch_count(&self) -> usize {
        self.actions.iter().map(|a| a.branches.len()).sum()
    }

    pub fn validate(&self, mode: ValidationMode) -> ValidationReport {
        validate_problem(self, mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// Branch probabilities of every action must sum to one.
    #[default]
    Strict,
    /// Probability sums are reported as warnings only.
    Lenient,
}

impl std::str::FromStr for ValidationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(ValidationMode::Strict),
            "lenient" => Ok(ValidationMode::Lenient),
            other => Err(format!(
                "unknown validation mode {other:?}; expected strict or lenient"
            )),
        }
    }
}

impl fmt::Display for ValidationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationMode::Strict => "strict",
            ValidationMode::Lenient => "lenient",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub severity: Severity,
    /// Path into the scenario document, e.g. `actions[1].branches[0].events[2].var`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {} ({})", self.message, self.location)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// No errors; warnings are allowed.
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    fn error(&mut self, location: String, message: String) {
        self.violations.push(Violation {
            severity: Severity::Error,
            location,
            message,
        });
    }

    fn warning(&mut self, location: String, message: String) {
        self.violations.push(Violation {
            severity: Severity::Warning,
            location,
            message,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok: no violations");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of `problem`.
///
/// Unknown references and duplicate identifiers are always errors; a branch
/// probability sum away from one is an error in strict mode and a warning in
/// lenient mode.
pub fn validate_problem<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    mode: ValidationMode,
) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen_vars = HashSet::new();
    for (i, var) in problem.variables.iter().enumerate() {
        if var.id.as_str().is_empty() {
            report.error(format!("variables[{i}].id"), "variable id is empty".into());
        }
        if !seen_vars.insert(&var.id) {
            report.error(
                format!("variables[{i}].id"),
                format!("duplicate variable id {}", var.id),
            );
        }
    }
    let known = |v: &VariableId| seen_vars.contains(v);

    for (var, _) in problem.initial.iter() {
        if !known(var) {
            report.error(
                format!("initial.{var}"),
                format!("initial state assigns unknown variable {var}"),
            );
        }
    }
    for var in &problem.variables {
        if !problem.initial.contains(&var.id) {
            report.error(
                format!("initial.{}", var.id),
                format!("initial state does not assign variable {}", var.id),
            );
        }
    }

    if problem.actions.is_empty() {
        report.error("actions".into(), "problem has no actions".into());
    }

    let mut seen_actions = HashSet::new();
    let mut seen_branches: HashMap<&BranchId, &ActionId> = HashMap::new();
    for (ai, action) in problem.actions.iter().enumerate() {
        if !seen_actions.insert(&action.id) {
            report.error(
                format!("actions[{ai}].id"),
                format!("duplicate action id {}", action.id),
            );
        }
        if action.branches.is_empty() {
            report.error(
                format!("actions[{ai}].branches"),
                format!("action {} has no branches", action.id),
            );
        }
        for (bi, branch) in action.branches.iter().enumerate() {
            if let Some(owner) = seen_branches.insert(&branch.id, &action.id) {
                let msg = if owner == &action.id {
                    format!("duplicate branch id {} in action {}", branch.id, action.id)
                } else {
                    format!(
                        "branch {} is shared by actions {} and {}",
                        branch.id, owner, action.id
                    )
                };
                report.error(format!("actions[{ai}].branches[{bi}].id"), msg);
            }
            for (ei, event) in branch.events.iter().enumerate() {
                if !known(&event.variable) {
                    report.error(
                        format!("actions[{ai}].branches[{bi}].events[{ei}].var"),
                        format!("event refers to unknown variable {}", event.variable),
                    );
                }
            }
        }

        if !action.branches.is_empty() {
            let sum = action
                .branches
                .iter()
                .fold(T::zero(), |acc, b| acc + b.probability().midpoint());
            if (sum - T::one()).abs() > T::sum_tolerance() {
                let loc = format!("actions[{ai}].branches");
                let msg = format!(
                    "branch probabilities of {} sum to {}",
                    action.id,
                    format_trimmed(sum, 9)
                );
                match mode {
                    ValidationMode::Strict => report.error(loc, msg),
                    ValidationMode::Lenient => report.warning(loc, msg),
                }
            }
        }
    }

    for (ci, class) in problem.utility_classes.iter().enumerate() {
        let mut pairs = HashSet::new();
        for (ui, assignment) in class.assignments.iter().enumerate() {
            let loc = format!("utilityClasses[{ci}][{ui}]");
            if !known(&assignment.variable) {
                report.error(
                    format!("{loc}.var"),
                    format!(
                        "utility assignment refers to unknown variable {}",
                        assignment.variable
                    ),
                );
            }
            if !assignment.utility.is_finite() {
                report.error(format!("{loc}.utility"), "utility is not finite".into());
            }
            if !pairs.insert((&assignment.variable, assignment.value)) {
                report.error(
                    loc,
                    format!(
                        "utility class {ci} assigns {}={} more than once",
                        assignment.variable, assignment.value
                    ),
                );
            }
        }
    }

    let mut labels = HashSet::new();
    for (fi, forbidden) in problem.forbidden.iter().enumerate() {
        if !known(&forbidden.variable) {
            report.error(
                format!("forbidden[{fi}].var"),
                format!(
                    "forbidden state refers to unknown variable {}",
                    forbidden.variable
                ),
            );
        }
        if forbidden.label.is_empty() {
            report.error(
                format!("forbidden[{fi}].label"),
                "forbidden state label is empty".into(),
            );
        } else if !labels.insert(&forbidden.label) {
            report.error(
                format!("forbidden[{fi}].label"),
                format!("duplicate forbidden state label {}", forbidden.label),
            );
        }
    }

    report
}
