//! Retrospective arguments, the per-principle attack graph and action
//! selection by acceptability.

use indexmap::IndexMap;
use serde::Serialize;

use crate::model::{ActionId, BranchId, EthicalDecisionProblem, StateAssignment, VariableId};
use crate::probability::{ComparisonPolicy, Probability};
use crate::scalar::Scalar;
use crate::semantics::{evaluate_problem, BranchEvaluation, ProblemEvaluation, SemanticsError};
use crate::theories::Principle;

/// The default claim that an action was acceptable given one of its branches.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct Argument<T> {
    pub branch: BranchId,
    pub action: ActionId,
    pub probability: Probability<T>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Attack {
    pub attacker: BranchId,
    pub target: BranchId,
    pub principle: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar")]
pub struct AttackGraph<T> {
    pub arguments: Vec<Argument<T>>,
    /// Ordered by principle, then attacker, then target declaration order.
    pub attacks: Vec<Attack>,
    pub attacked: IndexMap<BranchId, bool>,
}

impl<T: Scalar> AttackGraph<T> {
    pub fn is_attacked(&self, branch: &BranchId) -> bool {
        self.attacked.get(branch).copied().unwrap_or(false)
    }

    pub fn attacks_by<'a>(&'a self, principle: &'a str) -> impl Iterator<Item = &'a Attack> + 'a {
        self.attacks
            .iter()
            .filter(move |a| a.principle == principle)
    }

    pub fn argument(&self, branch: &BranchId) -> Option<&Argument<T>> {
        self.arguments.iter().find(|a| &a.branch == branch)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionResult<T> {
    /// One minus the summed probability of each action's attacked branches, clipped to `[0, 1]`.
    pub acceptability: IndexMap<ActionId, T>,
    /// Every action whose acceptability is maximal.
    pub selected: Vec<ActionId>,
    /// First declared member of `selected`.
    pub default_pick: ActionId,
    pub tie: bool,
    pub fully_acceptable: bool,
    /// Every action has at least one attacked branch.
    pub dilemma: bool,
    pub graph: AttackGraph<T>,
    pub principles: Vec<Principle>,
    pub policy: ComparisonPolicy,
    pub evaluation: ProblemEvaluation<T>,
    pub action_labels: IndexMap<ActionId, String>,
}

impl<T: Scalar> DecisionResult<T> {
    pub fn acceptability_of(&self, action: &ActionId) -> Option<T> {
        self.acceptability.get(action).copied()
    }

    pub fn max_acceptability(&self) -> T {
        self.acceptability
            .values()
            .copied()
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn action_of(&self, branch: &BranchId) -> Option<&ActionId> {
        self.evaluation.branch(branch).map(|b| &b.action)
    }

    pub fn principle(&self, id: &str) -> Option<&Principle> {
        self.principles.iter().find(|p| p.id == id)
    }
}

fn truth(value: bool) -> &'static str {
    if value {
        "True"
    } else {
        "False"
    }
}

/// Groups assignments by value, e.g. `s1=s2=True and s4=False`.
fn render_assignments<'a>(pairs: impl Iterator<Item = (&'a VariableId, bool)>) -> String {
    let (trues, falses): (Vec<_>, Vec<_>) = pairs.partition(|(_, v)| *v);
    let group = |items: &[(&VariableId, bool)], value: bool| -> Option<String> {
        if items.is_empty() {
            return None;
        }
        let names: Vec<&str> = items.iter().map(|(id, _)| id.as_str()).collect();
        Some(format!("{}={}", names.join("="), truth(value)))
    };
    [group(&trues, true), group(&falses, false)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join(" and ")
}

fn render_state(state: &StateAssignment) -> String {
    if state.is_empty() {
        "no state variables".to_string()
    } else {
        render_assignments(state.iter())
    }
}

/// Instantiates the argument scheme for one evaluated branch.
///
/// Consequences list the terminal value of every variable some event
/// assigned; a branch without events repeats the initial state.
pub fn generate_argument<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    evaluation: &BranchEvaluation<T>,
) -> Argument<T> {
    let action_name = problem
        .action(&evaluation.action)
        .filter(|a| !a.label.is_empty() && a.label != a.id.as_str())
        .map(|a| format!("{} ({})", a.id, a.label))
        .unwrap_or_else(|| evaluation.action.to_string());

    let terminal = evaluation.terminal();
    let consequences = if evaluation.assigned.is_empty() {
        render_state(terminal)
    } else {
        render_assignments(
            evaluation
                .assigned
                .iter()
                .map(|v| (v, terminal.get(v).unwrap_or(false))),
        )
    };

    let text = format!(
        "From the initial state I, where {}, it was acceptable to perform the action {}, \
         resulting in consequences with {}, with probability {}.",
        render_state(&evaluation.trace[0]),
        action_name,
        consequences,
        evaluation.probability
    );

    Argument {
        branch: evaluation.branch.clone(),
        action: evaluation.action.clone(),
        probability: evaluation.probability,
        text,
    }
}

/// Poses the critical questions both ways between every pair of branches of
/// different actions, once per principle.
///
/// Within one principle an attack answered by a counter-attack is dropped;
/// attacks from different principles accumulate independently.
pub fn compute_attacks<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    evaluation: &ProblemEvaluation<T>,
    principles: &[Principle],
    policy: ComparisonPolicy,
) -> AttackGraph<T> {
    let branches = &evaluation.branches;
    let mut attacks = Vec::new();

    for principle in principles {
        let n = branches.len();
        let mut raw = vec![false; n * n];
        for (i, x) in branches.iter().enumerate() {
            for (j, y) in branches.iter().enumerate() {
                raw[i * n + j] = principle.attacks(x, y, evaluation, policy);
            }
        }
        for i in 0..n {
            for j in 0..n {
                if raw[i * n + j] && !raw[j * n + i] {
                    attacks.push(Attack {
                        attacker: branches[i].branch.clone(),
                        target: branches[j].branch.clone(),
                        principle: principle.id.clone(),
                    });
                }
            }
        }
    }

    let attacked = branches
        .iter()
        .map(|b| {
            let hit = attacks.iter().any(|a| a.target == b.branch);
            (b.branch.clone(), hit)
        })
        .collect();

    AttackGraph {
        arguments: branches
            .iter()
            .map(|b| generate_argument(problem, b))
            .collect(),
        attacks,
        attacked,
    }
}

/// Runs retrospection for `principles` and selects the action(s) with
/// maximal acceptability.
///
/// The problem is expected to be validated already; only structural errors
/// surface here.
pub fn decide<T: Scalar>(
    problem: &EthicalDecisionProblem<T>,
    principles: &[Principle],
    policy: ComparisonPolicy,
) -> Result<DecisionResult<T>, SemanticsError> {
    let evaluation = evaluate_problem(problem)?;
    let graph = compute_attacks(problem, &evaluation, principles, policy);

    let acceptability: IndexMap<ActionId, T> = problem
        .actions
        .iter()
        .map(|action| {
            let lost = evaluation
                .branches
                .iter()
                .filter(|b| b.action == action.id && graph.is_attacked(&b.branch))
                .fold(T::zero(), |acc, b| acc + b.probability.midpoint());
            (action.id.clone(), (T::one() - lost).clamp_unit())
        })
        .collect();

    let best = acceptability
        .values()
        .copied()
        .fold(T::neg_infinity(), |a, b| a.max(b));
    let tol = T::sum_tolerance();
    let selected: Vec<ActionId> = acceptability
        .iter()
        .filter(|(_, v)| best - **v <= tol)
        .map(|(id, _)| id.clone())
        .collect();

    let dilemma = problem
        .actions
        .iter()
        .all(|action| action.branches.iter().any(|b| graph.is_attacked(&b.id)));

    Ok(DecisionResult {
        default_pick: selected[0].clone(),
        tie: selected.len() > 1,
        fully_acceptable: best >= T::one() - tol,
        selected,
        acceptability,
        dilemma,
        graph,
        principles: principles.to_vec(),
        policy,
        evaluation,
        action_labels: problem
            .actions
            .iter()
            .map(|a| (a.id.clone(), a.label.clone()))
            .collect(),
    })
}
