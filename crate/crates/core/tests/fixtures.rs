//! The checked-in JSON fixtures match the structures built in code and have
//! the expected classification. Run with `GLUON_BLESS=1` to rewrite them.

mod common;

use gluon::cli::{Document, SetDocument};
use gluon::fixtures::*;
use gluon::structure::{is_iso, validate_classify, AxiomMode, Qps};

use common::{fixture_path, json_fixtures};

fn check_or_bless(name: &str, text: String) {
    let path = fixture_path(name);
    if std::env::var_os("GLUON_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, text).unwrap();
        return;
    }
    let stored = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stored, text, "{name} is stale; rerun with GLUON_BLESS=1");
}

fn pretty<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).unwrap() + "\n"
}

#[test]
fn fixtures_are_checked_in() {
    for (name, q) in json_fixtures() {
        check_or_bless(&format!("{name}.json"), pretty(&Document::from_qps(&q)));
    }
    let frames = nested_box_resource_frames();
    let mut sets = vec![vec![nested_box_element()]];
    sets.extend(frames);
    for (k, set) in sets.iter().enumerate() {
        check_or_bless(&format!("nested_box/set_{k:02}.json"), pretty(&SetDocument::from_set(set)));
    }
    check_or_bless("nested_box/path.txt", format!("{NESTED_BOX_PATH}\n"));
    let e: Vec<Qps> = (0..3).map(coherence_element).collect();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let pair = [e[i].clone(), e[j].clone()];
        check_or_bless(&format!("coherence/pair_{i}{j}.json"), pretty(&SetDocument::from_set(&pair)));
    }
    check_or_bless("coherence/all.json", pretty(&SetDocument::from_set(&e)));
}

#[test]
fn fixtures_load_back_and_classify() {
    for (name, q) in json_fixtures() {
        let text = std::fs::read_to_string(fixture_path(&format!("{name}.json"))).unwrap();
        let back = serde_json::from_str::<Document>(&text).unwrap().to_qps().unwrap();
        assert!(is_iso(&back, &q), "{name}");
        let c = validate_classify(&back).unwrap_or_else(|v| panic!("{name}: {v:?}"));
        match name.as_str() {
            "two_root_boxes" | "crossed_exponential_axioms" | "one_cell" => assert!(c.mell, "{name}"),
            "two_root_element" | "empty_of_course" => assert!(c.dill0 && !c.mell_star, "{name}"),
            "two_root_emptying" | "two_root_eta_emptying" => assert!(c.dill0_star && !c.dill0, "{name}"),
            n if n.starts_with("coherence/element") || n == "nested_box/element" => assert!(c.dill0, "{name}"),
            n if n.starts_with("nested_box/frame_") => assert!(c.mell_star, "{name}"),
            _ => {}
        }
    }
    let r = nested_box_frames().remove(0);
    assert!(validate_classify(&r).unwrap().mell);
    assert_eq!(r.mode, AxiomMode::Atomic);
}
