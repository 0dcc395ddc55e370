use std::path::{Path, PathBuf};
use std::process::Command;

use normdom::domination::{DomCert, SepDomCert};
use normdom::NormExpr;
use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn normdom(args: &[&str], stdin: Option<&str>) -> Run {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_normdom"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json_of(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout))
}

fn sup() -> Value {
    json!({"type": "diagonal", "weights": {}, "default": "1"})
}

fn unit_cover(radius: &str) -> Value {
    json!({
        "flag": {"base": [0], "added": [1, 2]},
        "levels": {"0": [{"center": {}, "radius": radius, "norm": sup(), "open": true}]}
    })
}

#[test]
fn zero_table_gives_zero_certificate() {
    let r = normdom(&["sepdom-solve"], Some(r#"{"rows":3,"cols":3,"entries":[[0,0,0],[0,0,0],[0,0,0]]}"#));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let cert: SepDomCert = serde_json::from_value(json_of(&r)["cert"].clone()).unwrap();
    assert_eq!(cert.g, vec![0; 3]);
    assert_eq!(cert.h, vec![0; 3]);
}

#[test]
fn solved_and_converted_certificates_revalidate() {
    let entries: Vec<Vec<u64>> = (0..7).map(|x| (0..5).map(|y| (x * 13 + y * 7) % 11).collect()).collect();
    let table = json!({"rows": 7, "cols": 5, "entries": entries}).to_string();
    let solved = normdom(&["sepdom-solve"], Some(&table));
    assert_eq!(solved.code, 0);
    let checked = normdom(&["sepdom-check"], Some(&solved.stdout));
    assert_eq!(checked.code, 0, "{}", checked.stderr);
    assert_eq!(json_of(&checked)["checked"], 35);

    let product = normdom(&["sepdom-convert"], Some(&solved.stdout));
    assert_eq!(json_of(&product)["cert"]["form"], "product");
    assert_eq!(normdom(&["sepdom-check"], Some(&product.stdout)).code, 0);
    let back = normdom(&["sepdom-convert"], Some(&product.stdout));
    assert_eq!(json_of(&back)["cert"]["form"], "max");
    assert_eq!(normdom(&["sepdom-check"], Some(&back.stdout)).code, 0);
}

#[test]
fn failing_certificate_exits_one_with_counterexample() {
    let doc = json!({
        "table": {"rows": 2, "cols": 2, "entries": [[0, 1], [4, 0]]},
        "cert": {"form": "max", "G": [1, 1], "H": [1, 1]}
    });
    let r = normdom(&["sepdom-check"], Some(&doc.to_string()));
    assert_eq!(r.code, 1);
    let v = json_of(&r);
    assert_eq!(v["status"], "precondition_failed");
    assert_eq!(v["details"]["counterexample"], json!([1, 0]));
}

#[test]
fn uncovered_unit_ball_names_a_vertex() {
    let doc = json!({"base": sup(), "slice": [0], "index": 1, "cover": unit_cover("1/1")});
    let r = normdom(&["extend-step"], Some(&doc.to_string()));
    assert_eq!(r.code, 1, "{}", r.stderr);
    let w = &json_of(&r)["details"]["witness"];
    // A vertex of the closed unit square of the base norm on {0}.
    let x = w["0"].as_str().unwrap();
    assert!(x == "1/1" || x == "-1/1", "{w}");
}

#[test]
fn covered_step_reports_epsilon() {
    let doc = json!({"base": sup(), "slice": [0], "index": 1, "cover": unit_cover("2")});
    let r = normdom(&["extend-step"], Some(&doc.to_string()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json_of(&r)["cert"]["epsilon"], "1/2");
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    let r = normdom(&["sepdom-solve", "--input", s(&missing)], None);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    assert_eq!(normdom(&["sepdom-solve"], Some("{not json")).code, 2);
    assert_eq!(normdom(&["sepdom-solve"], Some(r#"{"rows":2,"cols":1,"entries":[[1]]}"#)).code, 2);
    assert_eq!(normdom(&["sepdom-solve"], Some(r#"{"rows":1,"cols":1,"entries":[[1]]} junk"#)).code, 2);
    assert_eq!(normdom(&["norm-eval", "--samples", "0"], Some("{}")).code, 2);
    assert_eq!(normdom(&["no-such-command"], None).code, 2);
    let bad_radius = json!({"flag": {"base": [0], "added": []}, "levels": {"0": [{"center": {}, "radius": "-1", "norm": sup(), "open": true}]}});
    assert_eq!(normdom(&["disjoint-cert"], Some(&json!({"cover": bad_radius}).to_string())).code, 2);
}

#[test]
fn output_is_deterministic_and_atomic() {
    let dir = TempDir::new().unwrap();
    let members = json!({"members": [
        {"type": "diagonal", "weights": {"0": "3", "2": "1/2"}, "default": "1"},
        {"type": "diagonal", "weights": {"1": "7/3"}, "default": "2"}
    ]});
    let input = write(&dir, "family.json", &members);
    let run = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        let r =
            normdom(&["dominate", "--input", s(&input), "--output", s(&out), "--seed", seed, "--samples", "50"], None);
        assert_eq!(r.code, 0, "{}", r.stderr);
        std::fs::read(out).unwrap()
    };
    let a = run("7", "a.json");
    assert_eq!(a, run("7", "b.json"));
    assert_ne!(a, run("8", "c.json"));
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 4, "stray files: {names:?}");

    // The emitted certificate re-verifies against the members.
    let cert: DomCert = serde_json::from_slice(&a).unwrap();
    let norms: Vec<NormExpr> = serde_json::from_value(members["members"].clone()).unwrap();
    assert_eq!(cert.verify(&norms).unwrap(), None);
    assert_eq!(cert.checked_on.len(), 50 + 3);
}

#[test]
fn opening_is_reproducible_from_the_seed() {
    let doc = json!({"cover": unit_cover("2")}).to_string();
    let args = ["build-opening", "--samples", "5", "--seed", "3", "--denominator-bound", "8"];
    let a = normdom(&args, Some(&doc));
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, normdom(&args, Some(&doc)).stdout);
    assert_eq!(json_of(&a)["cert"]["balls"].as_array().unwrap().len(), 5);
}

#[test]
fn summary_follows_the_json_and_can_be_fed_back() {
    let r = normdom(&["sepdom-solve", "--summary"], Some(r#"{"rows":1,"cols":2,"entries":[[2,5]]}"#));
    assert_eq!(r.code, 0);
    let (json_part, digest) = r.stdout.split_once("\n\n").unwrap();
    assert!(serde_json::from_str::<Value>(json_part).is_ok());
    assert!(digest.contains("max certificate"));
    assert_eq!(normdom(&["sepdom-check"], Some(&r.stdout)).code, 0);
}

#[test]
fn counterexample_balls_are_pairwise_disjoint() {
    let schema = json!({"indices": 4, "coords": 4, "entries": [[1, 2, 9], [3, 0, 4]]});
    let cover = normdom(&["counterexample"], Some(&json!({"schema": schema}).to_string()));
    assert_eq!(cover.code, 0, "{}", cover.stderr);
    let cover: Value = json_of(&cover);
    let r = normdom(&["disjoint-cert"], Some(&json!({"cover": cover}).to_string()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json_of(&r).as_array().unwrap().len(), 6);

    let absorb = json!({"cover": cover, "candidate": sup(), "k": 1, "radius": "1/3"});
    let r = normdom(&["absorb", "--samples", "10"], Some(&absorb.to_string()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json_of(&r)["outcome"], "witness");
}

#[test]
fn ordinal_commands() {
    let r = normdom(&["ord-F"], Some(r#"{"alpha":[[1,1]],"beta":[[1,1]]}"#));
    assert_eq!(json_of(&r)["value"], "11");
    let r = normdom(&["ord-F"], Some(r#"{"alpha":[[0,3]],"beta":[[1,1]]}"#));
    assert_eq!(json_of(&r)["value"], "0");
    let r = normdom(&["ord-cmp"], Some(r#"{"a":[[1,1]],"b":[[0,1000]]}"#));
    assert_eq!(json_of(&r)["ordering"], "greater");
    let r = normdom(&["ord-inject"], Some(r#"{"alpha":[[1,1]],"max_coeff":5}"#));
    assert_eq!(r.code, 0);
    assert_eq!(json_of(&r)["codes"].as_array().unwrap().len(), 7);
    let r = normdom(&["ord-inject"], Some(r#"{"alpha":[[0,3]],"betas":[[[1,1]]]}"#));
    assert_eq!(r.code, 1);
    let r = normdom(&["ord-demo"], Some(r#"{"ordinals":[[[1,1]],[[0,3]],[[2,1],[0,1]]]}"#));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json_of(&r)["check"]["holds"], true);
    assert_eq!(normdom(&["ord-cmp"], Some(r#"{"a":[[0,1],[1,1]],"b":[]}"#)).code, 2);
}

#[test]
fn norm_commands() {
    let norm = json!({"type": "scale", "c": "2", "inner": {"type": "diagonal", "weights": {"1": "3"}, "default": "1"}});
    let r = normdom(&["norm-eval"], Some(&json!({"norm": norm, "vectors": [{"0": "1/2"}, {"1": "-1"}]}).to_string()));
    assert_eq!(json_of(&r)["values"], json!(["1/1", "6/1"]));
    let r = normdom(&["norm-axioms", "--samples", "10"], Some(&json!({"norm": norm}).to_string()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    let r = normdom(&["equiv-constant"], Some(&json!({"a": norm, "b": sup(), "slice": [0, 1]}).to_string()));
    assert_eq!(json_of(&r)["value"], "6/1");
    let r = normdom(&["schema-build"], Some(r#"{"indices":2,"coords":2,"entries":[[0,1,4]]}"#));
    assert_eq!(json_of(&r)["norms"][0]["weights"]["1"], "5/1");
    let schema = json!({"schema": {"indices": 2, "coords": 3, "entries": [[0, 1, 4]]}, "slices": [[0, 1], [2]]});
    let r = normdom(&["schema-dominate", "--samples", "10"], Some(&schema.to_string()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json_of(&r)["table_check"]["holds"], true);
}

#[test]
fn flag_extension_through_the_cli() {
    let doc = json!({"base": sup(), "cover": unit_cover("3/2")});
    let r = normdom(&["extend-flag", "--summary"], Some(&doc.to_string()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("epsilons 1/4, 1/4"), "{}", r.stdout);
    let r = normdom(&["extend-flag", "--depth", "5"], Some(&doc.to_string()));
    assert_eq!(r.code, 2);
}
