use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn digerm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digerm"))
        .args(args)
        .env("DIGERM_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

const MISWIRED: &str = r#"{
  "format": "precubical",
  "cubes": {"0": ["v00", "v10", "v01", "v11"], "1": ["a", "b", "c", "d"], "2": ["s"]},
  "faces": {
    "a": {"d0": ["v00"], "d1": ["v01"]},
    "b": {"d0": ["v10"], "d1": ["v11"]},
    "c": {"d0": ["v00"], "d1": ["v10"]},
    "d": {"d0": ["v01"], "d1": ["v11"]},
    "s": {"d0": ["c", "a"], "d1": ["b", "d"]}
  }
}"#;

#[test]
fn homology_of_globe2() {
    let o = digerm(&["homology", "builtin:globe:2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n  H⁻_n  H⁺_n");
    assert_eq!(rows[1], "0  Z     Z");
    assert!(rows[2..].iter().all(|r| r.ends_with("0     0")));
}

#[test]
fn homology_side_flags() {
    let o = digerm(&["homology", "builtin:hollow_square", "--branching", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["branching"]["1"]["rank"], 1);
    assert!(v.get("merging").is_none());
    let o = digerm(&["homology", "builtin:hollow_square", "--merging"]);
    assert_eq!(stdout(&o).lines().next(), Some("n  H⁺_n"));
}

#[test]
fn validate_reports_the_broken_identity() {
    let path = scratch("miswired.json", MISWIRED);
    let o = digerm(&["validate", &path]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("`s`"), "{text}");
    let o = digerm(&["validate", &path, "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["kind"], "identity");
    assert_eq!(digerm(&["validate", "builtin:torus"]).status.code(), Some(0));
}

#[test]
fn check_invariance_on_hollow_square() {
    let ops = scratch(
        "edges.json",
        r#"[{"kind":"edge","cell":"a","k":1},{"kind":"edge","cell":"b","k":2},
            {"kind":"edge","cell":"c","k":1},{"kind":"edge","cell":"d","k":3}]"#,
    );
    let o = digerm(&["check-invariance", "builtin:hollow_square", "--ops", &ops]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("PASS\n"));
    let o = digerm(&["check-invariance", "builtin:hollow_square", "--ops", &ops, "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["branching"][1]["before"]["rank"], 1);
    assert_eq!(v["branching"][1]["after"]["rank"], 1);
}

#[test]
fn inapplicable_step_is_a_domain_failure() {
    let ops = scratch("lens-on-edge.json", r#"[{"kind":"lens","cell":"a"}]"#);
    let o = digerm(&["check-invariance", "builtin:filled_square", "--ops", &ops]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 1"));
}

#[test]
fn subdivide_then_realize_round_trip() {
    let ops = scratch("grid.json", r#"[{"kind":"grid","factors":[2,2]}]"#);
    let o = digerm(&["subdivide", "builtin:filled_square", "--ops", &ops]);
    assert_eq!(o.status.code(), Some(0));
    let refined = scratch("refined.json", &stdout(&o));
    let o = digerm(&["realize", &refined]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 9);
    assert_eq!(v["cells"].as_array().unwrap().len(), 16);
    let realized = scratch("realized.json", &stdout(&o));
    assert_eq!(digerm(&["oracle", &realized]).status.code(), Some(0));
}

#[test]
fn oracle_flags_a_corrupted_incidence() {
    let o = digerm(&["realize", "builtin:filled_square"]);
    let mut v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = v["cells"].as_array_mut().unwrap().last_mut().unwrap();
    s["branch"][1][0] = serde_json::json!(1);
    let path = scratch("corrupt.json", &v.to_string());
    let o = digerm(&["oracle", &path, "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["mismatches"][0]["state"], "v00");
}

#[test]
fn export_dot_to_file() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("germs.dot");
    let o = digerm(&["export-dot", "builtin:hollow_square", "--merging", "--dot", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let dot = fs::read_to_string(path).unwrap();
    assert!(dot.starts_with("graph germs {"));
    assert!(dot.contains("merging at v11"));
}

#[test]
fn fuzz_is_deterministic() {
    let a = digerm(&["fuzz", "--seed", "11", "--count", "30", "--json"]);
    let b = Command::new(env!("CARGO_BIN_EXE_digerm"))
        .args(["fuzz", "--seed", "11", "--count", "30", "--json"])
        .env("DIGERM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(digerm(&["homology"]).status.code(), Some(2));
    assert_eq!(digerm(&["homology", "builtin:nowhere"]).status.code(), Some(2));
    assert_eq!(digerm(&["homology", "/no/such/file.json"]).status.code(), Some(2));
    let bad = scratch("bad.json", "{not json");
    assert_eq!(digerm(&["homology", &bad]).status.code(), Some(1));
}

/// Replays the transcript in the command-line chapter of the guide.
#[test]
fn book_transcript_is_current() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    let chapter = fs::read_to_string(root.join("book/src/cli.md")).unwrap();
    let start = chapter.find("```console\n$ digerm homology").unwrap();
    let block = &chapter[start + "```console\n".len()..];
    let block = &block[..block.find("```").unwrap()];
    let mut runs = 0;
    let mut last_code = None;
    for step in block.split("$ ").filter(|s| !s.trim().is_empty()) {
        let (cmd, expected) = step.split_once('\n').unwrap();
        let expected = expected.trim_end_matches('\n');
        if cmd == "echo $?" {
            assert_eq!(Some(expected.parse::<i32>().unwrap()), last_code);
            continue;
        }
        let args: Vec<&str> = cmd.split_whitespace().skip(1).collect();
        let o = Command::new(env!("CARGO_BIN_EXE_digerm"))
            .args(&args)
            .current_dir(&root)
            .output()
            .unwrap();
        assert_eq!(stdout(&o).trim_end_matches('\n'), expected, "{cmd}");
        last_code = o.status.code();
        runs += 1;
    }
    assert_eq!(runs, 6);
}
