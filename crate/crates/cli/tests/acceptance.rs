//! Exit criteria for the engine, CLI and service. Prints one PASS/FAIL line
//! per criterion and exits non-zero if any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use retro_core::probability::Probability;
use retro_core::scenario::{bundled, parse_document, parse_ethics};
use retro_core::{
    retrospect, ActionId, BranchId, DecisionResult, PoeticWord, RunConfig, UtilityVector,
};

const ACCEPTABILITY_TOL: f64 = 1e-9;
const ARGUMENT_PROBABILITY_TOL: f64 = 1e-9;
const EXPECTED_UTILITY_TOL: f64 = 1e-12;
const ORACLE_ACCEPTABILITY_TOL: f64 = 1e-12;
const ORACLE_PROBLEMS: u64 = 500;
const FIGURE_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(30);

struct Report {
    number: u8,
    title: &'static str,
    checks: Vec<(String, bool)>,
    started: Instant,
}

impl Report {
    fn new(number: u8, title: &'static str) -> Self {
        Report {
            number,
            title,
            checks: Vec::new(),
            started: Instant::now(),
        }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn elapsed(&self) -> Duration {
        self.started.elapsed()
    }

    fn finish(self) -> bool {
        let ok = !self.checks.is_empty() && self.checks.iter().all(|(_, ok)| *ok);
        println!(
            "{} criterion {:>2}: {} ({} checks, {:.1} ms)",
            if ok { "PASS" } else { "FAIL" },
            self.number,
            self.title,
            self.checks.len(),
            self.started.elapsed().as_secs_f64() * 1e3
        );
        for (what, passed) in &self.checks {
            if !passed {
                println!("       failed: {what}");
            }
        }
        ok
    }
}

fn library_with(ethics: &str) -> DecisionResult {
    let mut doc = parse_document::<f64>(bundled::LIBRARY).expect("library parses");
    doc.apply_ethics(&parse_ethics(ethics).expect("ethics parses"));
    let scenario = doc.into_scenario().expect("library validates");
    retrospect(&scenario.problem, scenario.config).expect("decision")
}

fn edges(result: &DecisionResult) -> BTreeSet<(String, String)> {
    result
        .graph
        .attacks
        .iter()
        .map(|a| (a.attacker.to_string(), a.target.to_string()))
        .collect()
}

fn cross(attackers: &[&str], targets: &[&str]) -> BTreeSet<(String, String)> {
    attackers
        .iter()
        .flat_map(|a| targets.iter().map(move |t| (a.to_string(), t.to_string())))
        .collect()
}

fn show(set: &BTreeSet<(String, String)>) -> String {
    set.iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn edge_check(
    report: &mut Report,
    label: &str,
    got: &BTreeSet<(String, String)>,
    want: &BTreeSet<(String, String)>,
) {
    let extra: BTreeSet<_> = got.difference(want).cloned().collect();
    let missing: BTreeSet<_> = want.difference(got).cloned().collect();
    report.check(
        format!(
            "{label}: attack set equals {{{}}} (extra: {{{}}}, missing: {{{}}})",
            show(want),
            show(&extra),
            show(&missing)
        ),
        got == want,
    );
}

fn acceptability(result: &DecisionResult, action: &str) -> f64 {
    result
        .acceptability_of(&ActionId::from(action))
        .unwrap_or(f64::NAN)
}

fn selected(result: &DecisionResult) -> Vec<&str> {
    result.selected.iter().map(|a| a.as_str()).collect()
}

fn criterion_1() -> bool {
    let mut r = Report::new(1, "passes-test utility only");
    let result = library_with(bundled::ETHICS_PASSES_TEST);
    let elapsed = r.elapsed();
    edge_check(
        &mut r,
        "passes-test",
        &edges(&result),
        &cross(&["b1", "b2", "b5", "b6"], &["b10"]),
    );
    r.check("selected = [recommend]", selected(&result) == ["recommend"]);
    let (rec, ign) = (
        acceptability(&result, "recommend"),
        acceptability(&result, "ignore"),
    );
    r.check(
        format!("acceptability(recommend) = 1.0, got {rec}"),
        (rec - 1.0).abs() <= ACCEPTABILITY_TOL,
    );
    r.check(
        format!("acceptability(ignore) = 0.3, got {ign}"),
        (ign - 0.3).abs() <= ACCEPTABILITY_TOL,
    );
    r.check(
        format!("runtime {elapsed:?} < 1 s"),
        elapsed < FIGURE_BUDGET,
    );
    r.finish()
}

fn criterion_2() -> bool {
    let mut r = Report::new(2, "others-find-out at -1 in the same class");
    let result = library_with(bundled::ETHICS_OTHERS_MINUS_ONE);
    edge_check(
        &mut r,
        "-1",
        &edges(&result),
        &cross(&["b1", "b5"], &["b10"]),
    );
    r.check("selected = [recommend]", selected(&result) == ["recommend"]);
    r.finish()
}

fn criterion_3() -> bool {
    let mut r = Report::new(3, "others-find-out at -5, and in a higher class");
    let want = cross(&["b9", "b10"], &["b2", "b4", "b6", "b8"]);
    let same = library_with(bundled::ETHICS_OTHERS_MINUS_FIVE);
    edge_check(&mut r, "-5 same class", &edges(&same), &want);
    r.check(
        format!("selected = [ignore], got {:?}", selected(&same)),
        selected(&same) == ["ignore"],
    );
    r.check(
        "ignore fully acceptable",
        same.fully_acceptable && (acceptability(&same, "ignore") - 1.0).abs() <= ACCEPTABILITY_TOL,
    );

    let ranked = library_with(bundled::ETHICS_TWO_CLASSES);
    edge_check(&mut r, "higher class", &edges(&ranked), &want);
    r.check(
        "higher class: identical attack set",
        edges(&ranked) == edges(&same),
    );
    r.check(
        "higher class: identical selection",
        ranked.selected == same.selected && ranked.fully_acceptable,
    );
    r.finish()
}

fn criterion_4() -> bool {
    let mut r = Report::new(4, "forbidden data-protection violation");
    let result = library_with(bundled::ETHICS_DATA_PROTECTION);
    let deontic = result.graph.attacks_by("data-protection").count();
    let utilitarian = result.graph.attacks_by("utilitarian").count();
    r.check(
        format!("16 deontological attacks, got {deontic}"),
        deontic == 16,
    );
    r.check(
        format!("4 utilitarian attacks, got {utilitarian}"),
        utilitarian == 4,
    );
    r.check(
        "deontological attacks are b10 -> b1..b8",
        result
            .graph
            .attacks_by("data-protection")
            .map(|a| (a.attacker.to_string(), a.target.to_string()))
            .collect::<BTreeSet<_>>()
            .is_subset(&cross(
                &["b9", "b10"],
                &["b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8"],
            )),
    );
    let (rec, ign) = (
        acceptability(&result, "recommend"),
        acceptability(&result, "ignore"),
    );
    r.check(
        format!("acceptability(recommend) = 0, got {rec}"),
        rec.abs() <= ACCEPTABILITY_TOL,
    );
    r.check(
        format!("acceptability(ignore) = 0.3, got {ign}"),
        (ign - 0.3).abs() <= ACCEPTABILITY_TOL,
    );
    r.check("dilemma flag", result.dilemma);
    r.check("selected = [ignore]", selected(&result) == ["ignore"]);
    r.finish()
}

fn criterion_5() -> bool {
    let mut r = Report::new(5, "argument text for b1");
    let result = library_with(bundled::ETHICS_PASSES_TEST);
    match result.graph.argument(&BranchId::from("b1")) {
        Some(argument) => {
            let p = argument.probability.midpoint();
            r.check(
                format!("underlying probability 0.399, got {p}"),
                (p - 0.399).abs() <= ARGUMENT_PROBABILITY_TOL,
            );
            r.check(
                format!("text names probability 0.399: {:?}", argument.text),
                argument.text.contains("probability 0.399"),
            );
        }
        None => r.check("argument for b1 exists", false),
    }
    r.finish()
}

fn criterion_6() -> bool {
    let mut r = Report::new(6, "coin-apple selects the coin flip");
    let scenario =
        retro_core::parse_scenario::<f64>(bundled::COIN_APPLE).expect("coin-apple validates");
    r.check(
        "Hawaii class ranked above apple class",
        scenario.problem.utility_classes.len() == 2
            && scenario.problem.utility_classes[0].assignments[0]
                .variable
                .as_str()
                == "s3",
    );
    let result = retrospect(&scenario.problem, scenario.config).expect("decision");
    r.check("selected = [flip-coin]", selected(&result) == ["flip-coin"]);
    r.check("fully acceptable", result.fully_acceptable);
    r.finish()
}

fn criterion_7() -> bool {
    let mut r = Report::new(7, "expected utilities of recommend");
    let first = |result: &DecisionResult, action: &str| {
        result
            .evaluation
            .expectation(&ActionId::from(action))
            .map(|e| e.expected_utility.components()[0])
            .unwrap_or(f64::NAN)
    };
    let plain = first(&library_with(bundled::ETHICS_PASSES_TEST), "recommend");
    r.check(
        format!("passes-test only: 0.54, got {plain}"),
        (plain - 0.54).abs() <= EXPECTED_UTILITY_TOL,
    );
    let penalised = library_with(bundled::ETHICS_OTHERS_MINUS_FIVE);
    let rec = first(&penalised, "recommend");
    let ign = first(&penalised, "ignore");
    r.check(
        format!("-5 penalty: 0.29, got {rec}"),
        (rec - 0.29).abs() <= EXPECTED_UTILITY_TOL,
    );
    r.check(format!("0.29 < E[ignore] = {ign}"), rec < ign);
    r.finish()
}

fn criterion_8() -> bool {
    let mut r = Report::new(8, "brute-force oracle equivalence");
    let mut mismatched = Vec::new();
    for seed in 0..ORACLE_PROBLEMS {
        let problem = common::random_problem(seed);
        if !problem
            .validate(retro_core::ValidationMode::Strict)
            .is_valid()
        {
            mismatched.push(format!(
                "seed {seed}: generator produced an invalid problem"
            ));
            continue;
        }
        let result = retrospect(&problem, RunConfig::default()).expect("decision");
        let expected = common::brute_force(&problem);
        if common::engine_edges(&result) != expected.attacks {
            mismatched.push(format!("seed {seed}: attack sets differ"));
        }
        for (action, value) in &expected.acceptability {
            let got = result
                .acceptability_of(&ActionId::from(action.as_str()))
                .unwrap_or(f64::NAN);
            if (got - value).abs() > ORACLE_ACCEPTABILITY_TOL {
                mismatched.push(format!(
                    "seed {seed}: acceptability({action}) {got} vs {value}"
                ));
            }
        }
    }
    let elapsed = r.elapsed();
    r.check(
        format!(
            "{ORACLE_PROBLEMS} problems agree ({} mismatches{})",
            mismatched.len(),
            mismatched
                .first()
                .map(|m| format!(", first: {m}"))
                .unwrap_or_default()
        ),
        mismatched.is_empty(),
    );
    r.check(
        format!("runtime {elapsed:?} < 30 s"),
        elapsed < ORACLE_BUDGET,
    );
    r.finish()
}

fn criterion_9() -> bool {
    let mut r = Report::new(9, "property suites");
    let mut rng = StdRng::seed_from_u64(9);

    let vectors: Vec<UtilityVector> = (0..1000)
        .map(|_| {
            retro_core::semantics::UtilityVector(
                (0..3).map(|_| rng.gen_range(-1..=1) as f64).collect(),
            )
        })
        .collect();
    let mut total = true;
    for a in &vectors {
        for b in vectors.iter().take(200) {
            let ab = a.lex_cmp(b);
            total &= ab == b.lex_cmp(a).reverse();
            total &= (ab == Ordering::Equal) == (a.components() == b.components());
        }
    }
    r.check("lexicographic order is total and antisymmetric", total);
    let mut transitive = true;
    for _ in 0..100_000 {
        let (a, b, c) = (
            vectors.choose(&mut rng).unwrap(),
            vectors.choose(&mut rng).unwrap(),
            vectors.choose(&mut rng).unwrap(),
        );
        if a.lex_cmp(b) != Ordering::Less && b.lex_cmp(c) != Ordering::Less {
            transitive &= a.lex_cmp(c) != Ordering::Less;
        }
    }
    let mut sorted = vectors.clone();
    sorted.sort_by(|a, b| a.lex_cmp(b));
    transitive &= sorted
        .windows(2)
        .all(|w| w[0].lex_cmp(&w[1]) != Ordering::Greater);
    r.check("lexicographic order is transitive", transitive);

    let (mut antisymmetric, mut bounded, mut invariant) = (true, true, true);
    for seed in 0..300 {
        let problem = common::random_problem(10_000 + seed);
        let result = retrospect(&problem, RunConfig::default()).expect("decision");
        let found = common::engine_edges(&result);
        antisymmetric &= found
            .iter()
            .all(|(x, y, p)| !found.contains(&(y.clone(), x.clone(), p.clone())));
        bounded &= result
            .acceptability
            .values()
            .all(|v| (0.0..=1.0).contains(v));

        let mut shuffled = problem.clone();
        for action in &mut shuffled.actions {
            action.branches.shuffle(&mut rng);
        }
        let again = retrospect(&shuffled, RunConfig::default()).expect("decision");
        let set = |d: &DecisionResult| d.selected.iter().cloned().collect::<BTreeSet<_>>();
        invariant &= set(&result) == set(&again);
    }
    r.check("per-principle attacks are antisymmetric", antisymmetric);
    r.check("acceptability lies in [0, 1]", bounded);
    r.check("selected tie set ignores branch order", invariant);

    let table = [
        ("certainty", 1.0, 1.0),
        ("almost certain", 0.87, 0.99),
        ("probable", 0.63, 0.87),
        ("chances about even", 0.40, 0.60),
        ("probably not", 0.20, 0.40),
        ("almost certainly not", 0.02, 0.12),
        ("impossibility", 0.0, 0.0),
    ];
    let mut round_trip = PoeticWord::ALL.len() == table.len();
    for (word, low, high) in table {
        let Ok(p) = Probability::<f64>::from_poetic(word) else {
            round_trip = false;
            continue;
        };
        round_trip &= (p.low() - low).abs() < 1e-12 && (p.high() - high).abs() < 1e-12;
        let json = serde_json::to_string(&p).unwrap_or_default();
        round_trip &= json == format!("\"{word}\"");
        round_trip &= serde_json::from_str::<Probability<f64>>(&json).ok() == Some(p);
        round_trip &= p.source_word().map(|w| w.as_str()) == Some(word);
    }
    r.check("Kent table round-trips for all seven words", round_trip);
    r.finish()
}

fn criterion_10() -> bool {
    let mut r = Report::new(10, "CLI determinism and strict validation");
    let scenarios = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios");
    let retro = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_retro"))
            .args(args)
            .output()
    };
    let library = scenarios.join("library.json").display().to_string();
    let ethics = scenarios
        .join("ethics/data-protection.json")
        .display()
        .to_string();
    let args = ["run", library.as_str(), "--ethics", ethics.as_str()];
    match (retro(&args), retro(&args)) {
        (Ok(a), Ok(b)) => {
            r.check("run exits 0", a.status.success() && b.status.success());
            r.check(
                "run output is byte-identical",
                !a.stdout.is_empty() && a.stdout == b.stdout,
            );
        }
        _ => r.check("run can be spawned", false),
    }
    let verbatim = scenarios
        .join("coin-apple-verbatim.json")
        .display()
        .to_string();
    match retro(&["validate", verbatim.as_str(), "--validation", "strict"]) {
        Ok(out) => {
            let text = String::from_utf8_lossy(&out.stdout);
            r.check(
                format!("strict validation fails, exit {:?}", out.status.code()),
                out.status.code() == Some(1),
            );
            r.check("diagnostic names the 1.5 sum", text.contains("sum to 1.5"));
        }
        Err(_) => r.check("validate can be spawned", false),
    }
    r.finish()
}

fn main() -> ExitCode {
    let criteria: [fn() -> bool; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let passed = criteria.iter().filter(|c| c()).count();
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
