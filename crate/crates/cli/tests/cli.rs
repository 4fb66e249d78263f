use std::process::{Command, Output};

use serde_json::Value;

fn sl2e(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2e")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn fl_check_example() {
    let out = sl2e(&["fl-check", "--field", "Qp:p=3,prec=12", "--ext", "unramified", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["fl_pass"], Value::Bool(true));
    assert_eq!(v["config"]["depth"], 4);
    assert_eq!(v["outcome"], "pass");
}

#[test]
fn epsilon_agrees_with_oracle() {
    for ext in ["unramified", "ramified"] {
        let out = sl2e(&["epsilon", "--field", "Fq:p=2,f=1,prec=10", "--ext", ext, "--x", "t"]);
        assert_eq!(out.status.code(), Some(0), "{ext}");
        let v = json(&out);
        let value = v["result"]["value"].as_i64().unwrap();
        assert!(value == 1 || value == -1);
        assert_eq!(v["result"]["oracle_is_norm"], Value::Bool(value == 1));
    }
}

#[test]
fn verify_all_quick_passes() {
    let out = sl2e(&["verify-all", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let criteria = v["result"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 13);
    assert!(criteria.iter().all(|c| c["verdict"] == "pass"));
}

#[test]
fn exit_codes() {
    assert_eq!(sl2e(&["orbital"]).status.code(), Some(2));
    assert_eq!(sl2e(&["orbital", "--field", "Qp:p=3", "--t", "1+;0"]).status.code(), Some(2));
    assert_eq!(sl2e(&["no-such-command"]).status.code(), Some(2));
    let refused = sl2e(&["shalika-compare", "--field", "Fq:p=2,f=1,prec=12"]);
    assert_eq!(refused.status.code(), Some(3));
    assert_eq!(json(&refused)["result"]["refused"], Value::Bool(true));
    assert_eq!(sl2e(&["fl-check", "--field", "Qp:p=3,prec=12", "--ext", "ramified"]).status.code(), Some(3));
    assert_eq!(sl2e(&["weyl-check", "--field", "Qp:p=2,prec=16"]).status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let args = ["char-identity", "--field", "Fq:p=2,f=1,prec=14", "--ext", "ramified", "--seed", "5", "--samples", "4"];
    let a = sl2e(&args);
    let b = sl2e(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["config"]["seed"], 5);
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("sl2e-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "field = Qp:p=5,prec=10\next = ramified\nlevel = 1\n").unwrap();
    let p = path.to_str().unwrap();
    let out = sl2e(&["orthogonality", "--config", p, "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["config"]["field"], "Qp:p=5,prec=10");
    assert_eq!(v["config"]["level"], 2);
    assert_eq!(v["result"]["level"], 2);
    // the dumped form reproduces the run
    let dumped = sl2e(&["orthogonality", "--config", p, "--level", "2", "--dump-config"]);
    std::fs::write(&path, &dumped.stdout).unwrap();
    assert_eq!(sl2e(&["orthogonality", "--config", p]).stdout, out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn csv_rows() {
    let out = sl2e(&["orthogonality", "--field", "Qp:p=3,prec=12", "--level", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("expected,integral,order,pass,theta,theta_squared_trivial"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn orbital_with_tree_oracle() {
    let out = sl2e(&["orbital", "--field", "Qp:p=3,prec=14", "--t", "depth=1", "--f", "0:1,1:-1/2", "--with-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["o_t"], v["result"]["tree_oracle"]["o_t"]);
}
