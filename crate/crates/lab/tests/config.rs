use blowup_core::integrators::StepController;
use blowup_core::models::Family;
use blowup_core::operators::BoundaryCondition;
use blowup_lab::{parse_config, Expect};

const MINIMAL: &str = r#"id = "riccati"
expect = "blowup"

[model]
family = "riccati_heat"
nu = 0.1
bc = "dirichlet"

[domain]
a = 0
b = "pi"
n = 64

[initial]
profile = "sin_mode"
k = 1.0
amplitude = -1.0

[time]
t_end = 6.0
dt = 1e-3
"#;

fn with(line: &str, replacement: &str) -> String {
    assert!(MINIMAL.contains(line), "{line}");
    MINIMAL.replacen(line, replacement, 1)
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).expect("needle present") + 1
}

#[test]
fn minimal_riccati_config_fills_defaults() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.expect, Expect::Blowup);
    assert_eq!(cfg.out_dir(), "out/riccati");
    let r = cfg.resolve().unwrap();
    assert_eq!(r.spec.family, Family::RiccatiHeat);
    assert_eq!(r.spec.bc, BoundaryCondition::Dirichlet);
    assert!(!r.periodic);
    assert!((r.b - std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(r.controller, StepController::adaptive(1e-3, 6.0));
    assert_eq!(r.policy.sup_threshold, 1e6);
    assert!(r.monitors.is_empty() && r.checks.is_empty());
}

#[test]
fn riccati_on_periodic_domain_is_rejected_at_the_bc_line() {
    let text = with(r#"bc = "dirichlet""#, r#"bc = "periodic""#);
    let e = parse_config(&text).unwrap_err();
    assert!(e.message.contains("RiccatiHeat requires Dirichlet"), "{e}");
    assert_eq!(e.line, Some(line_of(&text, "bc =")));
}

#[test]
fn negative_n_is_rejected() {
    let text = with("n = 64", "n = -8");
    let e = parse_config(&text).unwrap_err();
    assert_eq!(e.line, Some(line_of(&text, "n = -8")), "{e}");
}

#[test]
fn unknown_keys_are_rejected_with_their_line() {
    for (table_line, key) in [("nu = 0.1", "viscosity = 0.2"), ("n = 64", "points = 3"), ("dt = 1e-3", "method = \"rk4\"")] {
        let text = with(table_line, &format!("{table_line}\n{key}"));
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("unknown field"), "{e}");
        assert_eq!(e.line, Some(line_of(&text, key)), "{e}");
    }
    let text = format!("colour = \"red\"\n{MINIMAL}");
    assert_eq!(parse_config(&text).unwrap_err().line, Some(1));
}

#[test]
fn missing_required_keys_are_reported() {
    let e = parse_config(&with("t_end = 6.0\n", "")).unwrap_err();
    assert!(e.message.contains("t_end"), "{e}");
    assert!(e.line.is_some(), "{e}");
    let text = with("nu = 0.1\n", "");
    let e = parse_config(&text).unwrap_err();
    assert!(e.message.contains("`nu`"), "{e}");
    assert_eq!(e.line, Some(line_of(&text, "family =")));
}

#[test]
fn parameters_foreign_to_the_family_or_profile_are_rejected() {
    let e = parse_config(&with("nu = 0.1", "nu = 0.1\np = 4.0")).unwrap_err();
    assert!(e.message.contains("`p` is not used"), "{e}");
    let e = parse_config(&with("k = 1.0", "k = 1.0\nwidth = 0.1")).unwrap_err();
    assert!(e.message.contains("`width` is not used"), "{e}");
}

#[test]
fn unknown_names_are_rejected() {
    let text = with(r#"profile = "sin_mode""#, r#"profile = "gaussian""#);
    let e = parse_config(&text).unwrap_err();
    assert_eq!(e.line, Some(line_of(&text, "gaussian")), "{e}");
    let text = with("expect = \"blowup\"", "expect = \"blowup\"\nchecks = [\"max_principal\"]");
    let e = parse_config(&text).unwrap_err();
    assert!(e.message.contains("unknown check `max_principal`"), "{e}");
    assert_eq!(e.line, Some(line_of(&text, "checks")));
}

#[test]
fn checks_need_their_monitor_and_a_compatible_model() {
    let text = with("expect = \"blowup\"", "expect = \"blowup\"\nchecks = [\"riccati_bound\"]");
    let e = parse_config(&text).unwrap_err();
    assert!(e.message.contains("needs monitor weighted_phi1"), "{e}");
    let text = with(
        "expect = \"blowup\"",
        "expect = \"blowup\"\nmonitors = [\"mass\"]\nchecks = [{ name = \"ks_mass\", tol = 0.1 }]",
    );
    let e = parse_config(&text).unwrap_err();
    assert!(e.message.contains("applies to KsIntegrated"), "{e}");
    let text = with(
        "expect = \"blowup\"",
        "expect = \"blowup\"\nmonitors = [\"sup\", \"weighted_phi1\"]\nchecks = [{ name = \"riccati_bound\", tol = 0.01 }, \"max_principle\"]",
    );
    let r = parse_config(&text).unwrap().resolve().unwrap();
    assert_eq!(r.checks.len(), 2);
    assert_eq!(r.checks[0].tol, 0.01);
    assert_eq!(r.checks[1].tol, 1e-8);
}

#[test]
fn watched_functionals_must_be_monitored() {
    let text = with("dt = 1e-3", "dt = 1e-3\n\n[policy]\nwatch = [\"sup\"]");
    let e = parse_config(&text).unwrap_err();
    assert!(e.message.contains("not among the monitors"), "{e}");
    assert_eq!(e.line, Some(line_of(&text, "watch")));
}

#[test]
fn layout_must_agree_with_boundary_conditions() {
    let text = with("n = 64", "n = 64\nlayout = \"periodic\"");
    let e = parse_config(&text).unwrap_err();
    assert_eq!(e.line, Some(line_of(&text, "layout")), "{e}");
    assert!(parse_config(&with("n = 64", "n = 64\nlayout = \"bounded\"")).is_ok());
}
