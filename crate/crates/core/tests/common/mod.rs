//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use gluon::fixtures::*;
use gluon::structure::Qps;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Every single-structure fixture, by file name without extension.
pub fn json_fixtures() -> Vec<(String, Qps)> {
    let mut out: Vec<(String, Qps)> = vec![
        ("two_root_boxes".into(), two_root_boxes()),
        ("two_root_element".into(), two_root_element()),
        ("two_root_emptying".into(), two_root_emptying()),
        ("two_root_eta_emptying".into(), two_root_eta_emptying()),
        ("crossed_exponential_axioms".into(), crossed_exponential_axioms()),
        ("one_cell".into(), one_cell()),
        ("empty_of_course".into(), empty_of_course()),
        ("nested_box/element".into(), nested_box_element()),
    ];
    for k in 0..3 {
        out.push((format!("coherence/element_{k}"), coherence_element(k)));
    }
    for (k, f) in nested_box_frames().into_iter().enumerate() {
        out.push((format!("nested_box/frame_{k:02}"), f));
    }
    out
}

pub mod dot_grammar;
pub mod suites;
