//! Renders a decision as the retrospective dialogue its attacks stand for:
//! a claim that another action should have been chosen, and the missing
//! defence that lets the claim stand.

use std::fmt::Write;

use crate::argumentation::{Attack, DecisionResult};
use crate::model::ActionId;
use crate::scalar::{format_fixed3, format_trimmed, Scalar};
use crate::semantics::UtilityVector;
use crate::theories::PrincipleKind;

fn vector<T: Scalar>(v: &UtilityVector<T>, fixed: bool) -> String {
    let render = |x: T| {
        if fixed {
            format_fixed3(x)
        } else {
            format_trimmed(x, 6)
        }
    };
    match v.components() {
        [single] => render(*single),
        many => format!(
            "({})",
            many.iter()
                .map(|x| render(*x))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

fn claim<T: Scalar>(result: &DecisionResult<T>, attack: &Attack) -> Option<(String, String)> {
    let principle = result.principle(&attack.principle)?;
    let x = result.evaluation.branch(&attack.attacker)?;
    let y = result.evaluation.branch(&attack.target)?;
    let ex = result.evaluation.expectation(&x.action)?;
    let ey = result.evaluation.expectation(&y.action)?;

    Some(match &principle.kind {
        PrincipleKind::Utilitarian => (
            format!(
                "You should have chosen {} because {} brought greater utility ({}) than {} ({}).",
                x.action,
                x.branch,
                vector(&x.utility, false),
                y.branch,
                vector(&y.utility, false)
            ),
            format!(
                "No defence: {} does not expect greater utility than {} ({} vs {}), so the claim stands.",
                y.action,
                x.action,
                vector(&ey.expected_utility, true),
                vector(&ex.expected_utility, true)
            ),
        ),
        PrincipleKind::ForbiddenState { forbidden } => (
            format!(
                "You should have chosen {} because {} did not break {}, while {} did.",
                x.action, x.branch, forbidden.label, y.branch
            ),
            format!(
                "No defence: {} holds a greater probability of breaking {} than {} ({} vs {}), so the claim stands.",
                y.action,
                forbidden.label,
                x.action,
                format_fixed3(ey.violation_probability(&forbidden.label).midpoint()),
                format_fixed3(ex.violation_probability(&forbidden.label).midpoint())
            ),
        ),
    })
}

fn selection_line<T: Scalar>(result: &DecisionResult<T>) -> String {
    let names: Vec<&str> = result.selected.iter().map(ActionId::as_str).collect();
    let mut line = format!(
        "Selected: {} with acceptability {}",
        names.join(", "),
        format_fixed3(result.max_acceptability())
    );
    if result.tie {
        let _ = write!(line, " (tie; default {})", result.default_pick);
    }
    if result.fully_acceptable {
        line.push_str(" (fully acceptable)");
    }
    line.push('.');
    if result.dilemma {
        line.push_str(" Moral dilemma: every action has an attacked branch.");
    }
    line
}

/// Two-turn dialogue per attack, grouped by principle, closing with the selection.
pub fn explain<T: Scalar>(result: &DecisionResult<T>) -> String {
    let mut out = String::new();
    if result.graph.attacks.is_empty() {
        out.push_str("No attacks: every action is fully acceptable.\n");
    }
    for principle in &result.principles {
        let attacks: Vec<&Attack> = result.graph.attacks_by(&principle.id).collect();
        if attacks.is_empty() {
            continue;
        }
        let _ = writeln!(out, "Principle: {}", principle.describe());
        for attack in attacks {
            if let Some((first, second)) = claim(result, attack) {
                let _ = writeln!(out, "  [{} -> {}]", attack.attacker, attack.target);
                let _ = writeln!(out, "    1. {first}");
                let _ = writeln!(out, "    2. {second}");
            }
        }
        out.push('\n');
    }
    out.push_str(&selection_line(result));
    out.push('\n');
    out
}
