use std::process::Command;

fn ucg(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ucg")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, serde_json::Value) {
    let (code, out) = ucg(args);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")))
}

#[test]
fn passing_runs_exit_zero() {
    for args in [
        &["twisting", "--n", "4"][..],
        &["lift", "--group", "fixtures/d4.json", "--rep", "fixtures/d4rep.json"],
        &["lift", "--group", "q8z2", "--chi", "auto"],
        &["gu-witness", "--n", "4"],
        &["oracle", "--group", "d4"],
    ] {
        let (code, r) = report(args);
        assert_eq!(code, 0, "{args:?}: {r}");
        assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["status"] != "FAIL"));
    }
}

#[test]
fn failing_verdicts_exit_one() {
    let (code, r) = report(&["lift", "--group", "q8z2", "--chi", "eps"]);
    assert_eq!(code, 1);
    assert!(r["verdicts"].as_array().unwrap().iter().any(|v| v["status"] == "FAIL"));
    assert_eq!(report(&["gu-witness", "--n", "4", "--layout", "anti-diagonal"]).0, 1);
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(ucg(&["gu-witness", "--n", "6"]).0, 2);
    assert_eq!(ucg(&["twisting", "--n", "3", "--field", "fp:6"]).0, 2);
    assert_eq!(ucg(&["lift", "--group", "no-such-group"]).0, 2);
    assert_eq!(ucg(&["algebraicity", "--param", "1,x"]).0, 2);
}

#[test]
fn reports_are_reproducible() {
    let args = ["pseudochar", "--group", "d4", "--seed", "3"];
    let (_, a) = ucg(&args);
    let (_, b) = ucg(&args);
    assert_eq!(a, b);
    let r: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(r["seed"], 3);
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("ucg-report-{}.json", std::process::id()));
    let (code, stdout) = ucg(&["twisting", "--n", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    let r: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(r["command"], "twisting");
    assert!(stdout.is_empty() || stdout.trim() == written.trim());
}
