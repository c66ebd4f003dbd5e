//! Random strict-valid problems and a brute-force re-derivation of the
//! attack relation that shares no code with the engine's semantics.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use retro_core::model::{
    Action, Branch, EthicalDecisionProblem, Event, ForbiddenState, StateVariable,
    UtilityAssignment, UtilityClass,
};
use retro_core::probability::Probability;
use retro_core::{ComparisonPolicy, StateAssignment, VariableId};

pub type Problem = EthicalDecisionProblem<f64>;

/// At most 3 actions, 4 variables and 8 branches; exact probabilities.
pub fn random_problem(seed: u64) -> Problem {
    let mut rng = StdRng::seed_from_u64(seed);
    let var_count = rng.gen_range(1..=4);
    let variables: Vec<StateVariable> = (1..=var_count)
        .map(|i| StateVariable {
            id: format!("s{i}").into(),
            label: format!("v{i}"),
        })
        .collect();
    let initial: StateAssignment = variables
        .iter()
        .map(|v| (v.id.clone(), rng.gen_bool(0.2)))
        .collect();
    let pick_var =
        |rng: &mut StdRng| VariableId::from(format!("s{}", rng.gen_range(1..=var_count)));

    let action_count = rng.gen_range(1..=3);
    let mut budget = 8 - action_count;
    let mut next_branch = 1;
    let mut actions = Vec::new();
    for a in 0..action_count {
        let extra = rng.gen_range(0..=budget.min(3));
        budget -= extra;
        let count = 1 + extra;
        let weights: Vec<u32> = (0..count).map(|_| rng.gen_range(1..=5)).collect();
        let total: u32 = weights.iter().sum();
        let branches = weights
            .iter()
            .map(|w| {
                let mut events = vec![Event::new(
                    pick_var(&mut rng),
                    rng.gen_bool(0.5),
                    Probability::exact(*w as f64 / total as f64).unwrap(),
                )];
                for _ in 0..rng.gen_range(0..=2) {
                    events.push(Event::new(
                        pick_var(&mut rng),
                        rng.gen_bool(0.5),
                        Probability::one(),
                    ));
                }
                let id = format!("b{next_branch}");
                next_branch += 1;
                Branch {
                    id: id.into(),
                    events,
                }
            })
            .collect();
        actions.push(Action {
            id: format!("a{a}").into(),
            label: String::new(),
            branches,
        });
    }

    let utility_classes = (0..rng.gen_range(0..=2))
        .map(|_| {
            let mut seen = BTreeSet::new();
            let mut assignments = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let variable = pick_var(&mut rng);
                let value = rng.gen_bool(0.5);
                if seen.insert((variable.clone(), value)) {
                    assignments.push(UtilityAssignment {
                        variable,
                        value,
                        utility: rng.gen_range(-3..=3) as f64,
                    });
                }
            }
            UtilityClass::new(assignments)
        })
        .collect();

    let forbidden = (0..rng.gen_range(0..=2))
        .map(|i| ForbiddenState {
            variable: pick_var(&mut rng),
            value: rng.gen_bool(0.5),
            label: format!("law{i}"),
        })
        .collect();

    EthicalDecisionProblem {
        variables,
        initial,
        actions,
        utility_classes,
        forbidden,
    }
}

pub type Edge = (String, String, String);

pub struct Expected {
    pub attacks: BTreeSet<Edge>,
    pub acceptability: Vec<(String, f64)>,
}

struct Outcome {
    branch: String,
    action: usize,
    p: f64,
    utility: Vec<f64>,
    broken: Vec<bool>,
}

const TOL: f64 = 1e-12;

fn greater(a: &[f64], b: &[f64], tol: f64) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > tol {
            return x > y;
        }
    }
    false
}

/// Recomputes attacks and acceptability by walking every branch by hand
/// under the midpoint policy with exact probabilities.
pub fn brute_force(problem: &Problem) -> Expected {
    let index = |v: &VariableId| problem.variables.iter().position(|x| &x.id == v).unwrap();
    let start: Vec<bool> = problem
        .variables
        .iter()
        .map(|v| problem.initial.get(&v.id).unwrap_or(false))
        .collect();

    let mut outcomes = Vec::new();
    for (ai, action) in problem.actions.iter().enumerate() {
        for branch in &action.branches {
            let mut state = start.clone();
            let mut p = 1.0;
            let mut broken = vec![false; problem.forbidden.len()];
            for event in &branch.events {
                state[index(&event.variable)] = event.value;
                p *= event.probability.low();
                for (k, f) in problem.forbidden.iter().enumerate() {
                    if state[index(&f.variable)] == f.value {
                        broken[k] = true;
                    }
                }
            }
            let utility = problem
                .utility_classes
                .iter()
                .map(|class| {
                    class
                        .assignments
                        .iter()
                        .filter(|u| state[index(&u.variable)] == u.value)
                        .map(|u| u.utility)
                        .sum()
                })
                .collect();
            outcomes.push(Outcome {
                branch: branch.id.to_string(),
                action: ai,
                p,
                utility,
                broken,
            });
        }
    }

    let classes = problem.utility_classes.len();
    let expected: Vec<Vec<f64>> = (0..problem.actions.len())
        .map(|ai| {
            (0..classes)
                .map(|c| {
                    outcomes
                        .iter()
                        .filter(|o| o.action == ai)
                        .map(|o| o.p * o.utility[c])
                        .sum()
                })
                .collect()
        })
        .collect();
    let risk = |ai: usize, k: usize| -> f64 {
        outcomes
            .iter()
            .filter(|o| o.action == ai && o.broken[k])
            .map(|o| o.p)
            .sum::<f64>()
            .min(1.0)
    };

    let n = outcomes.len();
    let mut attacks = BTreeSet::new();
    let mut principles: Vec<(String, Option<usize>)> = vec![("utilitarian".into(), None)];
    principles.extend(
        problem
            .forbidden
            .iter()
            .enumerate()
            .map(|(k, f)| (f.label.clone(), Some(k))),
    );
    for (name, law) in &principles {
        let raw = |x: &Outcome, y: &Outcome| -> bool {
            if x.action == y.action {
                return false;
            }
            match law {
                None => {
                    greater(&x.utility, &y.utility, 0.0)
                        && greater(&expected[x.action], &expected[y.action], TOL)
                }
                Some(k) => {
                    y.broken[*k] && !x.broken[*k] && risk(y.action, *k) - risk(x.action, *k) > TOL
                }
            }
        };
        for i in 0..n {
            for j in 0..n {
                if raw(&outcomes[i], &outcomes[j]) && !raw(&outcomes[j], &outcomes[i]) {
                    attacks.insert((
                        outcomes[i].branch.clone(),
                        outcomes[j].branch.clone(),
                        name.clone(),
                    ));
                }
            }
        }
    }

    let attacked: BTreeSet<&str> = attacks.iter().map(|(_, t, _)| t.as_str()).collect();
    let acceptability = problem
        .actions
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            let lost: f64 = outcomes
                .iter()
                .filter(|o| o.action == ai && attacked.contains(o.branch.as_str()))
                .map(|o| o.p)
                .sum();
            (a.id.to_string(), (1.0 - lost).clamp(0.0, 1.0))
        })
        .collect();

    Expected {
        attacks,
        acceptability,
    }
}

pub fn engine_edges(result: &retro_core::DecisionResult) -> BTreeSet<Edge> {
    result
        .graph
        .attacks
        .iter()
        .map(|a| {
            (
                a.attacker.to_string(),
                a.target.to_string(),
                a.principle.clone(),
            )
        })
        .collect()
}

pub const MIDPOINT: ComparisonPolicy = ComparisonPolicy::Midpoint;
