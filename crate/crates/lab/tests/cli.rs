use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use blowup_lab::registry::{Source, REGISTRY};
use blowup_lab::{parse_config, reproduce, run, write_outputs, Expect};

fn lab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup-lab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const BURGERS: &str = r#"id = "burgers"
expect = "completed"
monitors = ["sup", "mass"]
checks = ["max_principle"]

[model]
family = "viscous_burgers"
nu = 0.2
bc = "neumann"

[domain]
a = 0.0
b = "pi"
n = 64

[initial]
profile = "cos_mode"
k = 1.0

[time]
t_end = 1.0
dt = 1e-3
"#;

#[test]
fn registry_expectations_match_the_claimed_direction() {
    let table = [
        ("E1", Expect::Completed),
        ("E2", Expect::Completed),
        ("E3", Expect::Completed),
        ("E4", Expect::Blowup),
        ("E5", Expect::Blowup),
        ("E6", Expect::Completed),
        ("E7", Expect::Completed),
        ("E8", Expect::Completed),
        ("E9", Expect::Blowup),
        ("E10", Expect::Blowup),
        ("E11", Expect::Completed),
    ];
    assert_eq!(REGISTRY.len(), table.len());
    for (e, (id, expect)) in REGISTRY.iter().zip(table) {
        assert_eq!(e.id, id);
        assert_eq!(e.expect, expect, "{id}");
        if let Source::Configs(texts) = e.source {
            assert_eq!(parse_config(texts[0]).unwrap().expect, expect, "{id}");
        }
    }
    let Source::Configs(e9) = REGISTRY[8].source else { panic!("E9 has configs") };
    assert_eq!(parse_config(e9[1]).unwrap().expect, Expect::Completed);
}

#[test]
fn list_shows_eleven_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["list"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().next().unwrap().starts_with("E1 "));
}

#[test]
fn run_writes_csv_and_json_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("b.toml"), BURGERS).unwrap();
    let o = lab(&["run", "b.toml", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("res/burgers");
    let csv = fs::read_to_string(out.join("sup.csv")).unwrap();
    assert!(csv.starts_with("t,sup\n"));
    assert!(!csv.contains('\r'));
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 2, "{line}");
        for c in cells {
            let v: f64 = c.parse().unwrap();
            // 17 significant digits round-trip exactly
            assert_eq!(format!("{v:.16e}"), c);
            let mantissa = c.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{c}");
        }
    }
    let raw = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(raw.starts_with("{\n  \"schema\": 1,\n  \"id\": \"burgers\","), "{raw}");
    let report: serde_json::Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["verdict"]["kind"], "completed");
    assert_eq!(report["artifact_paths"], serde_json::json!(["sup.csv", "mass.csv"]));
    assert_eq!(report["check_results"].as_array().unwrap().len(), 1);
}

#[test]
fn unmet_expectation_exits_one_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let text = BURGERS.replace(r#"expect = "completed""#, r#"expect = "blowup""#);
    fs::write(dir.path().join("b.toml"), text).unwrap();
    let o = lab(&["run", "b.toml", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("res/burgers/report.json")).unwrap();
    assert!(report.contains("\"expectation_met\": false"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), BURGERS.replace("n = 64", "n = -1")).unwrap();
    let o = lab(&["run", "bad.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 14"), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(lab(&["reproduce", "E42"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(lab(&["run", "missing.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // a step cap far below what the run needs
    let text = BURGERS.replace("dt = 1e-3", "dt = 1e-3\nadaptive = false\nmax_steps = 10");
    fs::write(dir.path().join("b.toml"), text).unwrap();
    let o = lab(&["run", "b.toml", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    let report = fs::read_to_string(dir.path().join("res/burgers/report.json")).unwrap();
    assert!(report.contains("\"kind\": \"failed\""));
}

#[test]
fn jobs_flag_runs_configs_in_parallel() {
    let dir = tempfile::tempdir().unwrap();
    for i in 0..3 {
        let text = BURGERS.replace(r#"id = "burgers""#, &format!("id = \"b{i}\""));
        fs::write(dir.path().join(format!("b{i}.toml")), text).unwrap();
    }
    let o = lab(&["run", "b0.toml", "b1.toml", "b2.toml", "--jobs", "3", "--out", "res"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for i in 0..3 {
        assert!(dir.path().join(format!("res/b{i}/report.json")).exists());
    }
}

#[test]
fn ineq_subcommands_print_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["ineq", "alpha", "0.5"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 5.2441).abs() < 1e-3);
    let o = lab(&["ineq", "fuzz", "--trials", "50", "--seed", "7"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["holds"], true);
    let o = lab(&["ineq", "chain", "4"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["k"].as_f64().unwrap() - 9.678).abs() < 1e-3);
    let o = lab(&["ineq", "ratio", "0.01"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(lab(&["ineq", "chain", "2"], dir.path()).status.code(), Some(2));
}

fn without_wall_time(json: &str) -> String {
    json.lines().filter(|l| !l.trim_start().starts_with("\"wall_time\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn reports_are_bit_identical_modulo_wall_time() {
    let cfg = parse_config(BURGERS).unwrap();
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(without_wall_time(&a.report.to_json()), without_wall_time(&b.report.to_json()));
    let da = tempfile::tempdir().unwrap();
    let db = tempfile::tempdir().unwrap();
    write_outputs(&a, da.path()).unwrap();
    write_outputs(&b, db.path()).unwrap();
    for f in ["sup.csv", "mass.csv"] {
        assert_eq!(fs::read(da.path().join(f)).unwrap(), fs::read(db.path().join(f)).unwrap());
    }
    let e3a = reproduce("E3").unwrap();
    let e3b = reproduce("E3").unwrap();
    assert_eq!(without_wall_time(&e3a[0].report.to_json()), without_wall_time(&e3b[0].report.to_json()));
}

#[test]
fn every_declared_check_is_reported_once() {
    let text = BURGERS.replace(
        r#"checks = ["max_principle"]"#,
        r#"checks = ["max_principle", { name = "sup_bounded", tol = 0.5 }]"#,
    );
    let out = run(&parse_config(&text).unwrap()).unwrap();
    let names: Vec<&str> = out.report.check_results.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["max_principle", "sup_bounded"]);
}
