use std::path::PathBuf;
use std::process::{Command, Output};

fn circuit(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../circuits").join(name)
}

fn mbqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbqc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_is_byte_identical_for_a_seed() {
    let path = circuit("two_cycles.mbq");
    let args = ["verify", "--seed", "7", "--trials", "20", "--format", "json", path.to_str().unwrap()];
    let (a, b) = (mbqc(&args), mbqc(&args));
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let reports: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 7);
    let other = mbqc(&["verify", "--seed", "8", "--trials", "20", "--format", "json", path.to_str().unwrap()]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn exit_codes() {
    let path = circuit("two_cycles.mbq");
    let p = path.to_str().unwrap();
    assert_eq!(mbqc(&["verify", "--scheme", "nope", p]).status.code(), Some(2));
    assert_eq!(mbqc(&["verify", "--trials", "0", p]).status.code(), Some(2));
    assert_eq!(mbqc(&["compile", "missing.mbq"]).status.code(), Some(2));
    assert_eq!(mbqc(&["verify"]).status.code(), Some(2));
    assert_eq!(mbqc(&["diagram", "--scheme", "tqc-full", p]).status.code(), Some(2));
    assert_eq!(mbqc(&["verify", "--scheme", "tg", "--trials", "5", p]).status.code(), Some(0));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = std::env::temp_dir().join(format!("mbqc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.mbq");
    std::fs::write(&bad, "qubits 2\nh 0\nfrob 1\n").unwrap();
    let o = mbqc(&["compile", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":3:"));
}

#[test]
fn branch_enumeration_lists_every_outcome() {
    let o = mbqc(&["verify", "--branches", "primitive:xtcz4", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r[0]["branches"].as_array().unwrap().len(), 4);
    assert_eq!(mbqc(&["verify", "--branches", "primitive:nope"]).status.code(), Some(2));
}

#[test]
fn resource_table_matches_closed_forms() {
    let o = mbqc(&["verify", "--resources", "--n", "2", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS"), "{text}");
    assert_eq!(mbqc(&["verify", "--resources", "--n", "1", "--m", "2"]).status.code(), Some(2));
}

#[test]
fn empty_circuit_compiles_to_input_column() {
    let path = circuit("empty.mbq");
    let o = mbqc(&["compile", "--scheme", "tg", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# pattern tg width=2 vertices=2 edges=0 steps=0"), "{text}");
    let cluster = mbqc(&["compile", "--scheme", "remote1", "--emit-cluster", path.to_str().unwrap()]);
    assert_eq!(cluster.status.code(), Some(0));
    assert!(!stdout(&cluster).contains("delete "));
}

#[test]
fn routing_diagram_for_five_wires() {
    let path = circuit("five_wires.mbq");
    let o = mbqc(&["diagram", "--scheme", "route", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for w in 1..=5 {
        assert!(text.contains(&format!("M{w}")) && text.contains(&format!("O{w}")), "wire {w}");
    }
    assert!(text.contains("M1[4]"));
    let json = mbqc(&["diagram", "--scheme", "route", "--format", "json", path.to_str().unwrap()]);
    let d: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(d["vertices"].as_array().unwrap().len(), 125);
}

#[test]
fn compile_writes_requested_file() {
    let out = std::env::temp_dir().join(format!("mbqc-out-{}.json", std::process::id()));
    let path = circuit("two_cycles.mbq");
    let o = mbqc(&["compile", "--scheme", "tqc-pseudo", "--format", "json", "--output", out.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(r.is_object());
    std::fs::remove_file(out).unwrap();
}
