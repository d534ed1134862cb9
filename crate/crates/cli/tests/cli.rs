use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clpencil")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const E0: &str = "1,0,0,0,0,0,0,0,0,0";

#[test]
fn identity_at_e0_passes() {
    let o = run(&["verify", "identity", "--b", E0]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("03.che_anchor") && s.contains("c=-3/2"));
    assert!(s.contains("non-acceptance-grade"));
}

#[test]
fn schouten_suite_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = run(&["verify", "schouten", "--trials", "200", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(rec["check"], "01.schouten_axioms");
    assert_eq!(rec["status"], "pass");
    assert_eq!(rec["residual_terms"], 0);
}

#[test]
fn reports_are_deterministic_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(&["verify", "casimirs", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let mut recs: Vec<serde_json::Value> = std::fs::read_to_string(&out)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        for r in &mut recs {
            r.as_object_mut().unwrap().remove("millis");
        }
        docs.push(recs);
    }
    assert_eq!(docs[0], docs[1]);
    let k3 = docs[0].iter().find(|r| r["check"].as_str().unwrap().starts_with("09.K3")).unwrap();
    assert_eq!(k3["scalars"]["alpha"], "-9/2");
}

#[test]
fn chain_from_x0() {
    let o = run(&["chain", "--seed", "x0", "--steps", "2", "--b", E0]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("f0 = x0\nf1 = "));
    assert!(s.contains("f2 = "));
    assert!(s.contains("kernel dims per step: [2, 3]"));
}

#[test]
fn chain_from_c3_is_trivial() {
    let o = run(&["chain", "--seed", "C3", "--steps", "1", "--b", "1,2,0,0,0,0,0,0,0,-1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("f1 = 0\n"));
}

#[test]
fn chain_rejects_non_casimir() {
    let o = run(&["chain", "--seed", "x12", "--steps", "1", "--b", E0]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a Casimir"));
}

#[test]
fn algebra_info_sl3() {
    let o = run(&["algebra", "info", "sl3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("dimension 8"));
    assert!(s.contains("coordinates x12 x13 x21 x23 x31 x32 y13 y23"));
}

#[test]
fn algebra_load_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("so3.json");
    std::fs::write(&good, r#"{"dim":3,"c":[[0,1,2,1],[1,2,0,1],[2,0,1,1]]}"#).unwrap();
    let o = run(&["algebra", "load", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("jacobi pass") && s.contains("corank 1"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"dim":3,"c":[[0,1,2,1],[1,0,2,1]]}"#).unwrap();
    let o = run(&["algebra", "load", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(1, 0, 2)"));

    let nonjacobi = dir.path().join("nj.json");
    std::fs::write(&nonjacobi, r#"{"dim":3,"c":[[0,1,2,1],[0,2,0,1],[1,2,1,1]]}"#).unwrap();
    let o = run(&["algebra", "load", nonjacobi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Jacobi"));
}

#[test]
fn exit_codes_for_bad_input_and_budget() {
    assert_eq!(run(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "identity", "--b", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "schouten", "--chart", "e8"]).status.code(), Some(2));
    let o = run(&["verify", "examples", "--budget-seconds", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("BUDGET"));
}
