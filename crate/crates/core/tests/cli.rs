//! The `gluon` binary on the checked-in fixtures: exit statuses, JSON
//! output and certificate round trips.

mod common;

use std::path::Path;
use std::process::Command;

use serde_json::Value;

use gluon::cli::{Document, SetDocument};
use gluon::structure::is_iso;

use common::fixture_path;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn gluon(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_gluon")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn fx(name: &str) -> String {
    fixture_path(name).to_str().unwrap().to_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn validate_reports_the_classification() {
    let r = gluon(&["validate", &fx("two_root_boxes.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.json()["classification"]["mell"], true);
}

#[test]
fn validate_rejects_garbage_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "garbage.json", "{\"mode\": \"atomic\", \"structure\": 3}");
    let r = gluon(&["validate", &f]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 1"), "{}", r.stderr);
    let mut d: Value = serde_json::from_str(&std::fs::read_to_string(fx("one_cell.json")).unwrap()).unwrap();
    d["structure"]["flags"][0]["vertex"] = 7.into();
    let f = write(dir.path(), "bad_vertex.json", &d.to_string());
    let r = gluon(&["validate", &f]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("structure.flags[0].vertex"), "{}", r.stderr);
}

#[test]
fn invalid_structure_is_a_negative_answer() {
    // An axiom on a non-atomic formula, read in atomic mode.
    let mut d: Value = serde_json::from_str(&std::fs::read_to_string(fx("crossed_exponential_axioms.json")).unwrap()).unwrap();
    d["mode"] = "atomic".into();
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "atomic.json", &d.to_string());
    let r = gluon(&["validate", &f]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["valid"], false);
}

#[test]
fn unknown_flags_are_input_errors() {
    assert_eq!(gluon(&["validate", "--frobnicate", &fx("one_cell.json")]).code, 2);
    assert_eq!(gluon(&["--mode", "linear", "validate", &fx("one_cell.json")]).code, 2);
    assert_eq!(gluon(&["validate", "/nonexistent.json"]).code, 2);
}

#[test]
fn member_emits_the_subforest() {
    let r = gluon(&["member", &fx("two_root_element.json"), &fx("two_root_boxes.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = r.json();
    assert_eq!(v["member"], true);
    assert_eq!(v["plain"], true);
    assert!(v["subforest"]["image"].as_array().unwrap().len() > 2);
    let r = gluon(&["member", &fx("two_root_emptying.json"), &fx("two_root_boxes.json")]);
    assert_eq!((r.code, r.json()["plain"].clone()), (0, false.into()));
    let r = gluon(&["member", &fx("coherence/element_0.json"), &fx("two_root_boxes.json")]);
    assert_eq!(r.code, 1);
}

#[test]
fn taylor_and_emptyings_print_sets() {
    let r = gluon(&["taylor", "--copies", "1", &fx("one_cell.json")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["elements"].as_array().unwrap().len(), 1);
    let r = gluon(&["taylor", "--copies", "2", "--seed", "7", &fx("two_root_boxes.json")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["elements"].as_array().unwrap().len(), 1);
    let r = gluon(&["emptyings", &fx("one_cell.json")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["elements"].as_array().unwrap().len(), 2);
}

#[test]
fn apply_one_step_gives_the_next_frame() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "step.path", "box@2\n");
    let r = gluon(&["apply", "--path", &path, &fx("nested_box/set_00.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let results: Vec<SetDocument> = serde_json::from_value(r.json()["results"].clone()).unwrap();
    let expected: SetDocument = serde_json::from_str(&std::fs::read_to_string(fx("nested_box/set_01.json")).unwrap()).unwrap();
    let expected = expected.to_set().unwrap();
    assert!(results.iter().any(|s| {
        let s = s.to_set().unwrap();
        s.len() == expected.len() && s.iter().zip(&expected).all(|(a, b)| is_iso(a, b))
    }));
    let wrong = write(dir.path(), "wrong.path", "one@1\n");
    assert_eq!(gluon(&["apply", "--path", &wrong, &fx("nested_box/set_00.json")]).code, 2);
}

#[test]
fn apply_on_a_structure_follows_the_mell_rules() {
    let r = gluon(&["apply", "--path", &fx("nested_box/path.txt"), &fx("nested_box/frame_00.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let results: Vec<Document> = serde_json::from_value(r.json()["results"].clone()).unwrap();
    assert!(results.iter().any(|d| d.to_qps().unwrap().is_empty()));
}

#[test]
fn reverse_rebuilds_the_nested_boxes() {
    let r = gluon(&[
        "reverse",
        "--path",
        &fx("nested_box/path.txt"),
        "--from",
        "??bot,!!(A^|A)",
        &fx("nested_box/frame_12.json"),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let frames: Vec<Document> = serde_json::from_value(r.json()["frames"].clone()).unwrap();
    assert_eq!(frames.len(), 13);
    for (k, d) in frames.iter().enumerate() {
        let stored: Document =
            serde_json::from_str(&std::fs::read_to_string(fx(&format!("nested_box/frame_{k:02}.json"))).unwrap()).unwrap();
        assert!(is_iso(&d.to_qps().unwrap(), &stored.to_qps().unwrap()), "frame {k}");
    }
}

#[test]
fn terminate_prints_a_path() {
    let r = gluon(&["terminate", &fx("two_root_boxes.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.json()["steps"].as_u64().unwrap() > 0);
}

#[test]
fn glue_then_certify() {
    let dir = tempfile::tempdir().unwrap();
    let r = gluon(&["glue", "--depth", "25", &fx("coherence/pair_01.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let cert = write(dir.path(), "cert.json", &r.stdout);
    let v = r.json();
    assert!(v["path"].is_string() && v["R"].is_object());
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 2);
    let ok = gluon(&["certify", &fx("coherence/pair_01.json"), &cert]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    let other = gluon(&["certify", &fx("coherence/pair_12.json"), &cert]);
    assert_eq!(other.code, 1);
    assert_eq!(other.json()["valid"], false);
}

#[test]
fn glue_answers_within_bound_only() {
    let r = gluon(&["glue", "--depth", "40", &fx("coherence/all.json")]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["result"], "not glueable within bound");
}

#[test]
fn naturality_check_on_a_box_step() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "step.path", "box@2");
    let r = gluon(&["naturality-check", "--path", &path, &fx("nested_box/frame_00.json"), &fx("nested_box/set_00.json")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.json()["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn export_dot_draws_clusters() {
    let r = gluon(&["export-dot", &fx("two_root_boxes.json")]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.starts_with("digraph"));
    assert_eq!(r.stdout.matches("style=dashed").count(), 2);
    assert_eq!(r.stdout.matches("style=solid").count(), 4);
}
