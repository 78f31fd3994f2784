//! Exit codes and report envelope of the command-line front end.

use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_diluted"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn report_envelope() {
    let (code, out) = run(&["hardcore", "rs", "--d", "4"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "diluted-bounds/1");
    assert_eq!(v["inputs"]["d"], 4);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert!(v["wall_time_s"].as_f64().is_some());
    assert!((v["result"]["alpha_rs"].as_f64().unwrap() - 0.42061).abs() < 1e-5);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).0, 1);
    assert_eq!(run(&["hardcore", "rs", "--bogus"]).0, 1);
    assert_eq!(run(&["bound", "rs", "--config", "/nonexistent/job.json"]).0, 2);
    // δ too large for S_q: validation.
    assert_eq!(run(&["verify", "walk", "--q", "2", "--s-q", "20", "--delta", "10"]).0, 2);
    // Odd N·d.
    assert_eq!(run(&["graph", "regular", "--d", "3", "--n", "7"]).0, 2);
    // δ ≤ q in the budget: domain failure.
    assert_eq!(run(&["verify", "budget", "--q", "5", "--s-q", "100", "--delta", "4"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn text_table_and_out_file() {
    let (code, out) = run(&["hardcore", "table", "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
    assert!(out.contains("0.45086"));

    let path = std::env::temp_dir().join(format!("diluted-out-{}.json", std::process::id()));
    let (code, out) = run(&["verify", "zbound", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["passed"], true);
    let _ = std::fs::remove_file(path);
}

#[test]
fn config_hash_tracks_inputs() {
    let hash = |args: &[&str]| {
        let v: Value = serde_json::from_str(&run(args).1).unwrap();
        v["config_hash"].as_str().unwrap().to_owned()
    };
    let a = hash(&["verify", "budget", "--s-q", "1000"]);
    let b = hash(&["verify", "budget", "--s-q", "1000"]);
    let c = hash(&["verify", "budget", "--s-q", "2000"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn config_driven_checks() {
    let dir = std::env::temp_dir().join(format!("diluted-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let model = r#"{"theta": {"2": {"a": 1.0,
        "b": {"atoms":[{"v":-0.4,"w":0.5},{"v":0.4,"w":0.5}]},
        "f": {"atoms":[{"v":[-1.0,1.0],"w":1}]}}},
        "field": {"mu": {"atoms":[{"v":0.2,"w":1}]}, "nu": {"atoms":[{"v":0.0,"w":1}]}}}"#;
    let zeta = r#"{"atoms":[{"v":-0.3,"w":0.5},{"v":0.9,"w":0.5}]}"#;
    let jobs = [
        (
            "increment",
            format!(r#"{{"model":{model},"profile":{{"degrees":[2,2,2],"edges":{{"2":1}}}},"zeta":{zeta},"p":2,"kind":"edge"}}"#),
            "passed",
        ),
        (
            "step",
            format!(r#"{{"model":{model},"profile":{{"degrees":[3,3,2,2,2,2],"edges":{{"2":2}},"sites":{{"2":1}}}},"zeta":{zeta},"p":2,"delta":3}}"#),
            "holds",
        ),
    ];
    for (cmd, body, key) in jobs {
        let path = dir.join(format!("{cmd}.json"));
        std::fs::write(&path, body).unwrap();
        let (code, out) = run(&["verify", cmd, "--config", path.to_str().unwrap(), "--seed", "3"]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"][key], true, "{out}");
    }
    let path = dir.join("rsb.json");
    std::fs::write(
        &path,
        r#"{"model":{"hardcore":{"lambda":3.0,"A":"inf"}},"mu":{"atoms":[{"v":3,"w":1}]},
            "m":[0.3,0.7],
            "zeta":{"level":3,"dist":{"atoms":[{"v":{"level":2,"dist":{"atoms":[
                {"v":{"level":1,"dist":{"atoms":[{"v":0.1,"w":0.5},{"v":0.9,"w":0.5}]}},"w":1}]}},"w":1}]}},
            "samples":200}"#,
    )
    .unwrap();
    let (code, out) = run(&["bound", "rsb", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    // m not increasing: validation.
    let bad = std::fs::read_to_string(&path).unwrap().replace("[0.3,0.7]", "[0.7,0.3]");
    std::fs::write(&path, bad).unwrap();
    assert_eq!(run(&["bound", "rsb", "--config", path.to_str().unwrap()]).0, 2);
    let _ = std::fs::remove_dir_all(&dir);
}
