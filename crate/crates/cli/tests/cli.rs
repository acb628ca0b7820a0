use std::process::{Command, Output};

use qmahg::report::validate_report_json;

fn qmahg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmahg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn density_of_norm_squared() {
    let o = qmahg(&["density", "--fn", "x1^2+x2^2+x3^2+x4^2", "--point", "0,0,0,0,0", "--n", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("density = 8\n"));
    let o = qmahg(&["density", "--fn", "-(x1^2+x2^2+x3^2+x4^2)/3", "--point", "1/2,0,0,0,0", "--mode", "rational"]);
    assert!(stdout(&o).contains("density = -8/3\n"), "{}", stdout(&o));
}

#[test]
fn parse_errors_report_location() {
    let o = qmahg(&["density", "--fn", "x1 + * 2", "--point", "0,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1, column 6"), "{}", stderr(&o));
}

#[test]
fn verify_identities_rational() {
    let o = qmahg(&["verify", "identities", "--n", "2", "--mode", "rational", "--trials", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("identities: 6 checks, 0 failed"));
}

#[test]
fn report_to_stdout_is_schema_valid_and_reproducible() {
    let args = ["verify", "hessian", "--n", "1", "--seed", "5", "--report", "-", "--no-timings"];
    let a = qmahg(&args);
    let b = qmahg(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    validate_report_json(&v).unwrap();
    assert_eq!(v["elapsed_ms"], 0);
    assert!(stderr(&a).contains("PASS"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let report = dir.path().join("out.json");
    std::fs::write(&cfg, format!("n = 2\nmode = \"rational\"\nseed = 9\nreport = {:?}\n", report)).unwrap();
    let o = qmahg(&["verify", "brackets", "--config", cfg.to_str().unwrap(), "--seed", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!((v["n"].as_u64(), v["seed"].as_u64(), v["mode"].as_str()), (Some(2), Some(10), Some("rational")));

    std::fs::write(&cfg, "n = 1\nsed = 3\n").unwrap();
    let o = qmahg(&["verify", "brackets", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2, column 1"), "{}", stderr(&o));
}

#[test]
fn failing_checks_exit_one() {
    let o = qmahg(&["psh", "--fn", "-x1^2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not PSH"));
    let o = qmahg(&["verify", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hypothesis_violation_names_the_point() {
    let v = "(x1^2+x2^2+x3^2+x4^2)^2+t^2-1";
    let u = format!("0.9*({v})");
    let o = qmahg(&["compare", "--u", v, "--v", &u, "--gauge"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("hypothesis violated at ("), "{}", stderr(&o));
    let o = qmahg(&["compare", "--u", &u, "--v", v, "--gauge"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn fundamental_and_measure_commands() {
    let o = qmahg(&["fundamental", "--q", "1,0,0,0", "--point", "1,0,0,0,0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("Lambda = 1\n"));
    let o = qmahg(&["fundamental", "--n", "2", "--q", "1,0,0,0;0,0,1,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degenerate"));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let o = qmahg(&["integrate", "--fn", "x1^2+x2^2+x3^2+x4^2", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("integral = 256\n"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x1,x2,x3,x4,t,density\n"));

    for args in [
        vec!["cln", "--fn", "x1^2+x2^2+x3^2+x4^2"],
        vec!["minprinciple", "--u", "0.5*(x1^2+x2^2+x3^2+x4^2)", "--v", "x1^2+x2^2+x3^2+x4^2"],
        vec!["convergence", "--fn", "x1^2+x2^2+x3^2+x4^2", "--js", "1,2,4"],
    ] {
        let o = qmahg(&args);
        assert!(o.status.success(), "{args:?}: {}{}", stdout(&o), stderr(&o));
    }
}

#[test]
fn suites_lists_registry() {
    let o = qmahg(&["suites"]);
    let s = stdout(&o);
    for name in ["identities", "brackets", "positivity", "hessian", "lines", "measures"] {
        assert!(s.contains(name));
    }
}
