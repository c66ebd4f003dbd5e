//! Moral principles answering the two critical questions.
//!
//! For an argument from branch `x` to attack the argument from branch `y`
//! (of a different action), a principle must answer both questions yes:
//!
//! * CQ1, branch level: did `y` fare worse than `x` under this principle?
//! * CQ2, action level: was `y`'s action the worse bet under this principle,
//!   so that it cannot defend itself?
//!
//! The utilitarian principle reads every utility class; each forbidden state
//! is its own deontological principle.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{EthicalDecisionProblem, ForbiddenState};
use crate::probability::ComparisonPolicy;
use crate::scalar::Scalar;
use crate::semantics::{ActionExpectation, BranchEvaluation, ProblemEvaluation};

pub const UTILITARIAN_ID: &str = "utilitarian";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum PrincipleKind {
    Utilitarian,
    ForbiddenState { forbidden: ForbiddenState },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Principle {
    pub id: String,
    #[serde(flatten)]
    pub kind: PrincipleKind,
}

impl Principle {
    pub fn utilitarian() -> Self {
        Principle {
            id: UTILITARIAN_ID.to_string(),
            kind: PrincipleKind::Utilitarian,
        }
    }

    pub fn forbidden(state: ForbiddenState) -> Self {
        Principle {
            id: state.label.clone(),
            kind: PrincipleKind::ForbiddenState { forbidden: state },
        }
    }

    pub fn is_utilitarian(&self) -> bool {
        matches!(self.kind, PrincipleKind::Utilitarian)
    }

    /// Branch-level question: did `target` fare worse than `attacker`?
    pub fn cq1<T: Scalar>(
        &self,
        attacker: &BranchEvaluation<T>,
        target: &BranchEvaluation<T>,
    ) -> bool {
        match &self.kind {
            PrincipleKind::Utilitarian => {
                attacker.utility.lex_cmp(&target.utility) == Ordering::Greater
            }
            PrincipleKind::ForbiddenState { forbidden } => {
                target.violates(&forbidden.label) && !attacker.violates(&forbidden.label)
            }
        }
    }

    /// Action-level question: was the target's action the worse bet?
    ///
    /// Expected utilities are compared lexicographically with components
    /// within the scalar's comparison tolerance treated as equal; violation
    /// probabilities follow `policy`.
    pub fn cq2<T: Scalar>(
        &self,
        attacker: &ActionExpectation<T>,
        target: &ActionExpectation<T>,
        policy: ComparisonPolicy,
    ) -> bool {
        match &self.kind {
            PrincipleKind::Utilitarian => {
                attacker
                    .expected_utility
                    .lex_cmp_within(&target.expected_utility, T::compare_tolerance())
                    == Ordering::Greater
            }
            PrincipleKind::ForbiddenState { forbidden } => {
                let t = target.violation_probability(&forbidden.label);
                let a = attacker.violation_probability(&forbidden.label);
                t.compare(&a, policy) == Ordering::Greater
            }
        }
    }

    /// Both critical questions answered positively, for branches of different actions.
    pub fn attacks<T: Scalar>(
        &self,
        attacker: &BranchEvaluation<T>,
        target: &BranchEvaluation<T>,
        evaluation: &ProblemEvaluation<T>,
        policy: ComparisonPolicy,
    ) -> bool {
        if attacker.action == target.action {
            return false;
        }
        let (Some(ea), Some(et)) = (
            evaluation.expectation(&attacker.action),
            evaluation.expectation(&target.action),
        ) else {
            return false;
        };
        self.cq1(attacker, target) && self.cq2(ea, et, policy)
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            PrincipleKind::Utilitarian => "utilitarian (lexicographic utility)".to_string(),
            PrincipleKind::ForbiddenState { forbidden } => format!(
                "forbidden state {} ({}={})",
                forbidden.label,
                forbidden.variable,
                if forbidden.value { "True" } else { "False" }
            ),
        }
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id)
    }
}

/// The utilitarian principle followed by one principle per forbidden state.
pub fn principles_for<T: Scalar>(problem: &EthicalDecisionProblem<T>) -> Vec<Principle> {
    std::iter::once(Principle::utilitarian())
        .chain(problem.forbidden.iter().cloned().map(Principle::forbidden))
        .collect()
}
