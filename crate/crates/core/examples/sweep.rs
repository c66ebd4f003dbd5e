//! Runs the bundled library scenario under each bundled ethics configuration.

use retro_core::scenario::{bundled, parse_document, parse_ethics};
use retro_core::{export_graph, retrospect, GraphFormat};

fn main() {
    let configs = [
        ("passes-test", bundled::ETHICS_PASSES_TEST),
        ("others-find-out -1", bundled::ETHICS_OTHERS_MINUS_ONE),
        ("others-find-out -5", bundled::ETHICS_OTHERS_MINUS_FIVE),
        ("others-find-out higher class", bundled::ETHICS_TWO_CLASSES),
        ("data-protection", bundled::ETHICS_DATA_PROTECTION),
    ];
    for (name, ethics) in configs {
        let mut doc = parse_document::<f64>(bundled::LIBRARY).expect("bundled scenario");
        doc.apply_ethics(&parse_ethics(ethics).expect("bundled ethics"));
        let scenario = doc.into_scenario().expect("valid scenario");
        let result = retrospect(&scenario.problem, scenario.config).expect("decision");
        println!("== {name}");
        print!("{}", export_graph(&result, GraphFormat::Text));
    }
}
