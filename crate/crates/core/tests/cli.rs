use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn facloc(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_facloc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn shipped(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../instances")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn solve_reports_exact_distribution() {
    let out = facloc(&["solve", "--mechanism", "trm", "--instance", &shipped("fig1.json")], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"]["distribution"]["R"], "12/25");
    assert_eq!(v["outcome"]["distribution"]["B"], "1/50");
    assert!(v.get("elapsed_ms").is_none());
    assert!(out.stdout.ends_with(b"}\n"));
}

#[test]
fn solve_reads_stdin_and_honours_timing() {
    let doc = std::fs::read_to_string(shipped("ex51-i1.json")).unwrap();
    let out = facloc(&["solve", "--mechanism", "wmm", "--instance", "-", "--timing"], Some(&doc));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["elapsed_ms"].is_number());
    assert_eq!(v["outcome"]["kind"], "deterministic");
}

#[test]
fn hierarchy_solve_and_naive_audit() {
    let sec6 = shipped("sec6.json");
    let out = facloc(&["solve", "--mechanism", "iwmm", "--instance", &sec6], None);
    assert_eq!(out.status.code(), Some(0));
    let out = facloc(&["audit", "--side", "naive", "--mechanism", "direct-median", "--instance", &sec6], None);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["report"]["counterexample"]["deviator"], "A");
    assert_eq!(v["report"]["counterexample"]["replay_matches"], true);
    let out = facloc(&["audit", "--side", "naive", "--mechanism", "iwmm", "--instance", &sec6], None);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn invalid_input_exits_with_two() {
    let out = facloc(&["solve", "--mechanism", "wmm", "--instance", "-"], Some("{\"version\": 1}"));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = facloc(&["solve", "--mechanism", "wmm", "--instance", "-"], Some("not json"));
    assert_eq!(out.status.code(), Some(2));
    let out = facloc(&["solve", "--mechanism", "wmm", "--instance", "/no/such/file.json"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tprm_on_a_branching_tree_is_a_mismatch() {
    let out = facloc(&["solve", "--mechanism", "tprm", "--instance", &shipped("fig1.json")], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn campaign_bound_violation_exits_with_five() {
    let args = ["campaign", "--mechanism", "wmm", "--trials", "60", "--seed", "3", "--assert-bound", "1/1"];
    let out = facloc(&args, None);
    assert_eq!(out.status.code(), Some(5));
    assert!(!json(&out)["violations"].as_array().unwrap().is_empty());
    let ok = facloc(&["campaign", "--mechanism", "wmm", "--trials", "60", "--seed", "3", "--assert-bound", "3"], None);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn campaigns_are_reproducible() {
    for mechanism in ["wmm", "tprm", "trm", "iwmm", "global-median"] {
        let args = ["campaign", "--mechanism", mechanism, "--trials", "25", "--seed", "42"];
        let first = facloc(&args, None);
        assert_eq!(first.status.code(), Some(0), "{mechanism}");
        assert_eq!(first.stdout, facloc(&args, None).stdout, "{mechanism}");
    }
}

#[test]
fn family_output_matches_shipped_documents() {
    let cases: [(&[&str], &str); 4] = [
        (&["family", "--name", "fig1"], "fig1.json"),
        (&["family", "--name", "sec6"], "sec6.json"),
        (&["family", "--name", "ex51", "--r", "2"], "ex51-i1.json"),
        (&["family", "--name", "ex61", "--r", "10", "--s", "4", "--variant", "2"], "ex61-r10-s4.json"),
    ];
    for (args, file) in cases {
        let out = facloc(args, None);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(shipped(file)).unwrap());
    }
}

#[test]
fn documented_examples() {
    let out = facloc(&["audit", "--side", "mediator", "--mechanism", "wmm", "--instance", &shipped("ex51-i3.json")], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["verdict"], "no-beneficial-deviation-found");

    let out = facloc(&["campaign", "--mechanism", "trm", "--trials", "200", "--assert-bound", "2/1"], None);
    assert_eq!(out.status.code(), Some(0));
    let out = facloc(&["campaign", "--mechanism", "wmm", "--trials", "200", "--assert-bound", "3/1"], None);
    assert_eq!(out.status.code(), Some(0));

    let out = facloc(&["campaign", "--mechanism", "wmm", "--trials", "0"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"].as_array().unwrap().len(), 0);

    let single = r#"{"version": 1, "metric": {"vertices": ["a", "b"], "edges": [{"a": "a", "b": "b", "length": "2"}]},
        "z": "a", "mediators": [{"name": "d", "z": "a", "agents": ["a~b@1/2"]}]}"#;
    let out = facloc(&["solve", "--mechanism", "opt", "--instance", "-"], Some(single));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["outcome"]["point"], "a~b@1/2");
    assert_eq!(v["cost"]["ratio"]["exact"], "1/1");
    let out = facloc(&["audit", "--side", "agent", "--mechanism", "trm", "--instance", "-"], Some(single));
    assert_eq!(out.status.code(), Some(0));
}
