//! Runs experiments, evaluates declared checks and writes artifacts.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use blowup_core::field::{quadrature, Field, Grid1D};
use blowup_core::inequality::constant_chain;
use blowup_core::integrators::{estimate_blowup_time, integrate, Status, StepController, Trigger};
use blowup_core::models::{cole_hopf_exact, Family};
use blowup_core::monitors::{
    check_max_principle, check_max_principle_lost, check_non_decreasing, check_ode_inequality,
    check_riccati_bound, check_strictly_increasing, mass_balance, CheckResult, MonitorKind,
    MonitorSeries, OdeForm,
};
use blowup_core::operators::BoundaryCondition;
use serde::Serialize;

use crate::config::{CheckName, CheckSpec, ConfigError, Expect, ExperimentConfig, Resolved};
use crate::profiles::initial_field;

pub const SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] blowup_core::Error),
    #[error("unknown experiment `{0}` (expected E1..E11 or all)")]
    UnknownExperiment(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Completed,
    Blowup {
        t_star: f64,
        trigger: Trigger,
        /// Extrapolated singular time; absent when the fit does not
        /// extrapolate to a finite time.
        estimated_blowup_time: Option<f64>,
    },
    Failed {
        reason: String,
    },
}

impl Verdict {
    pub fn matches(&self, expect: Expect) -> bool {
        matches!(
            (self, expect),
            (Verdict::Completed, Expect::Completed) | (Verdict::Blowup { .. }, Expect::Blowup)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportedCheck {
    pub name: String,
    pub tol: f64,
    pub holds: bool,
    pub applicable: bool,
    /// Smallest slack, tolerance included; negative iff violated.
    pub worst_margin: Option<f64>,
    pub worst_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportedCheck {
    fn from_result(spec: &CheckSpec, r: CheckResult) -> Self {
        Self {
            name: spec.name.name().to_string(),
            tol: spec.tol,
            holds: r.holds,
            applicable: r.applicable,
            worst_margin: Some(r.worst_margin),
            worst_t: Some(r.worst_t),
            note: None,
        }
    }

    fn failed(name: &str, tol: f64, note: String) -> Self {
        Self {
            name: name.to_string(),
            tol,
            holds: false,
            applicable: false,
            worst_margin: None,
            worst_t: None,
            note: Some(note),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub id: String,
    pub description: String,
    pub expect: Expect,
    pub verdict: Verdict,
    pub expectation_met: bool,
    pub all_checks_hold: bool,
    pub check_results: Vec<ReportedCheck>,
    pub derived_quantities: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    /// File names relative to the report's directory.
    pub artifact_paths: Vec<String>,
    pub final_t: f64,
    pub steps: u64,
    pub rejected_steps: u64,
    pub wall_time: f64,
    pub config_echo: Option<ExperimentConfig>,
}

impl ExperimentReport {
    /// `0` iff every check holds and the verdict matches `expect`, `3` on
    /// solver failure, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if matches!(self.verdict, Verdict::Failed { .. }) {
            3
        } else if self.all_checks_hold && self.expectation_met {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A finished run: the report plus the data behind its artifacts.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub series: Vec<MonitorSeries>,
    /// Extra CSV tables as `(file name, content)`.
    pub tables: Vec<(String, String)>,
}

pub fn grid_for(r: &Resolved) -> blowup_core::Result<Grid1D> {
    if r.periodic {
        Grid1D::periodic(r.a, r.b, r.n)
    } else {
        Grid1D::bounded(r.a, r.b, r.n)
    }
}

/// Runs one experiment. Configuration errors are returned; solver errors
/// become a `failed` verdict.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, LabError> {
    let r = cfg.resolve()?;
    let grid = grid_for(&r)?;
    let u0 = initial_field(&cfg.initial, &r.spec.family, grid)?;
    let t_end = *cfg.time.t_end.get_ref();
    let clock = Instant::now();
    let result = integrate(&r.spec, &u0, t_end, r.controller, &r.policy, &r.monitors);

    let mut derived = analytic_quantities(&r, &u0)?;
    let mut notes = Vec::new();
    let (verdict, checks, series, final_t, steps, rejected) = match result {
        Err(e) => {
            let checks = r
                .checks
                .iter()
                .map(|c| ReportedCheck::failed(c.name.name(), c.tol, format!("not evaluated: {e}")))
                .collect();
            (Verdict::Failed { reason: e.to_string() }, checks, Vec::new(), 0.0, 0, 0)
        }
        Ok((outcome, mut series)) => {
            let verdict = match &outcome.status {
                Status::Blowup { t_star, trigger } => {
                    derived.insert("t_star".into(), *t_star);
                    let est = blowup_series(&series, &r)
                        .and_then(|s| estimate_blowup_time(s).ok())
                        .filter(|v| v.is_finite());
                    if let Some(v) = est {
                        derived.insert("estimated_blowup_time".into(), v);
                    }
                    if matches!(trigger, Trigger::GridScaleGradient { .. }) {
                        notes.push(
                            "blow-up detected as a gradient collapsing to the grid scale while u stays bounded"
                                .into(),
                        );
                    }
                    Verdict::Blowup {
                        t_star: *t_star,
                        trigger: trigger.clone(),
                        estimated_blowup_time: est,
                    }
                }
                _ => Verdict::Completed,
            };
            let ctx = CheckContext {
                cfg,
                r: &r,
                u0: &u0,
                final_state: &outcome.state,
                final_t: outcome.t,
                completed: verdict == Verdict::Completed,
                series: &series,
            };
            let mut checks = Vec::new();
            for c in &r.checks {
                let rc = match evaluate_check(&ctx, c, &mut derived) {
                    Ok(rc) => rc,
                    Err(e) => ReportedCheck::failed(c.name.name(), c.tol, format!("not evaluated: {e}")),
                };
                if c.name == CheckName::MaxPrincipleLost {
                    notes.push(
                        "overshoot evidence, not singularity evidence: the flow loses the maximum principle while staying smooth"
                            .into(),
                    );
                }
                checks.push(rc);
            }
            if let Some(mb) = mass_balance_series(&series) {
                series.push(mb);
            }
            (verdict, checks, series, outcome.t, outcome.steps, outcome.rejected)
        }
    };
    let wall_time = clock.elapsed().as_secs_f64();

    let expectation_met = verdict.matches(cfg.expect);
    let all_checks_hold = checks.iter().all(|c| c.holds);
    let artifact_paths = series.iter().map(|s| format!("{}.csv", s.name)).collect();
    let report = ExperimentReport {
        schema: SCHEMA,
        id: cfg.id.clone(),
        description: cfg.description.clone(),
        expect: cfg.expect,
        verdict,
        expectation_met,
        all_checks_hold,
        check_results: checks,
        derived_quantities: derived,
        notes,
        artifact_paths,
        final_t,
        steps,
        rejected_steps: rejected,
        wall_time,
        config_echo: Some(cfg.clone()),
    };
    Ok(RunOutput {
        report,
        series,
        tables: Vec::new(),
    })
}

fn find(series: &[MonitorSeries], kind: MonitorKind) -> Option<&MonitorSeries> {
    series.iter().find(|s| s.name == kind.name())
}

/// The series extrapolated for the blow-up time: the first watched
/// functional, else the gradient, else the sup norm.
fn blowup_series<'a>(series: &'a [MonitorSeries], r: &Resolved) -> Option<&'a MonitorSeries> {
    r.policy
        .watch
        .iter()
        .chain([MonitorKind::GradSup, MonitorKind::Sup].iter())
        .find_map(|k| find(series, *k))
}

fn mass_balance_series(series: &[MonitorSeries]) -> Option<MonitorSeries> {
    let m = find(series, MonitorKind::Mass)?;
    let e = find(series, MonitorKind::KsEnergy)?;
    mass_balance(m, e).ok()
}

/// Analytic constants and bounds known before stepping.
fn analytic_quantities(r: &Resolved, u0: &Field) -> Result<BTreeMap<String, f64>, LabError> {
    let mut d = BTreeMap::new();
    let grid = u0.grid();
    let len = grid.length();
    d.insert("u0_sup".into(), u0.sup());
    if r.periodic {
        return Ok(d);
    }
    let lambda1 = (PI / len).powi(2);
    d.insert("lambda1".into(), lambda1);
    let phi1 = Field::from_fn(*grid, |x| (PI * (x - grid.a()) / len).sin());
    match r.spec.family {
        Family::Vhj { p } if p > 2.0 => {
            let chain = constant_chain(p, grid)?;
            d.insert("K".into(), chain.k);
            d.insert("C_weighted".into(), chain.c_weighted);
            d.insert("T**".into(), LN_2 / (lambda1 * (p - 1.0)));
            let z0 = quadrature(&u0.zip_map(&phi1, |a, b| a * b)?)?;
            d.insert("z0".into(), z0);
            d.insert("amplitude".into(), u0.sup());
        }
        Family::KsIntegrated { .. } if r.spec.bc == BoundaryCondition::PokhozhaevKs => {
            let m0 = quadrature(u0)?;
            d.insert("m0".into(), m0);
            if m0 > 0.0 {
                d.insert("T*".into(), 2.0 * len / (lambda1 * m0));
            }
        }
        Family::RiccatiHeat | Family::ViscousBurgers
            if r.spec.family == Family::RiccatiHeat || r.monitors.contains(&MonitorKind::GradWeightedPhi1) =>
        {
            let omega0 = if r.spec.family == Family::RiccatiHeat {
                u0.clone()
            } else {
                blowup_core::operators::derivative(u0, 1, r.spec.bc)?
            };
            let y0 = quadrature(&omega0.zip_map(&phi1, |a, b| a * b)?)?;
            d.insert("y0".into(), y0);
            if y0 < 0.0 {
                d.insert("T*".into(), -8.0 / y0);
            }
            d.insert("riccati_threshold".into(), -(8.0f64).sqrt() * r.spec.nu);
        }
        _ => {}
    }
    Ok(d)
}

struct CheckContext<'a> {
    cfg: &'a ExperimentConfig,
    r: &'a Resolved,
    u0: &'a Field,
    final_state: &'a Field,
    final_t: f64,
    completed: bool,
    series: &'a [MonitorSeries],
}

fn evaluate_check(
    ctx: &CheckContext,
    c: &CheckSpec,
    derived: &mut BTreeMap<String, f64>,
) -> Result<ReportedCheck, LabError> {
    let family = ctx.cfg.family();
    let get = |kind: MonitorKind| -> Result<&MonitorSeries, LabError> {
        find(ctx.series, kind).ok_or_else(|| {
            LabError::Core(blowup_core::Error::InvalidArgument(format!("missing series {}", kind.name())))
        })
    };
    let series = c.name.monitor(family).map(get).transpose()?;
    let tol = c.tol;
    let len = ctx.u0.grid().length();
    let lambda1 = (PI / len).powi(2);
    let rc = match c.name {
        CheckName::ColeHopfError => {
            if !ctx.completed {
                return Ok(ReportedCheck::failed(c.name.name(), tol, "run did not complete".into()));
            }
            let err = cole_hopf_error(ctx.u0, ctx.final_state, ctx.final_t, ctx.r.spec.bc)?;
            derived.insert("cole_hopf_error".into(), err);
            ReportedCheck::from_result(c, margin_result(tol - err, ctx.final_t))
        }
        CheckName::ColeHopfOrder => {
            if !ctx.completed {
                return Ok(ReportedCheck::failed(c.name.name(), tol, "run did not complete".into()));
            }
            let err = cole_hopf_error(ctx.u0, ctx.final_state, ctx.final_t, ctx.r.spec.bc)?;
            let half = StepController::fixed(ctx.r.controller.dt / 2.0);
            let (out, _) = integrate(&ctx.r.spec, ctx.u0, ctx.final_t, half, &ctx.r.policy, &[])?;
            let err_half = cole_hopf_error(ctx.u0, &out.state, out.t, ctx.r.spec.bc)?;
            let ratio = err / err_half;
            derived.insert("cole_hopf_error_half_dt".into(), err_half);
            derived.insert("cole_hopf_ratio".into(), ratio);
            ReportedCheck::from_result(c, margin_result(tol - (ratio / 4.0 - 1.0).abs(), ctx.final_t))
        }
        CheckName::MaxPrinciple => {
            let s = series.expect("declared monitor");
            let u0_sup = ctx.u0.sup();
            derived.insert("max_overshoot".into(), overshoot(s, u0_sup));
            ReportedCheck::from_result(c, check_max_principle(s, u0_sup, tol)?)
        }
        CheckName::GradMaxPrinciple => {
            let s = series.expect("declared monitor");
            let g0 = s.first().map(|r| r.1).unwrap_or(0.0);
            derived.insert("grad_sup0".into(), g0);
            derived.insert("grad_max_overshoot".into(), overshoot(s, g0));
            ReportedCheck::from_result(c, check_max_principle(s, g0, tol)?)
        }
        CheckName::MaxPrincipleLost => {
            let s = series.expect("declared monitor");
            let u0_sup = ctx.u0.sup();
            derived.insert("max_overshoot".into(), overshoot(s, u0_sup));
            ReportedCheck::from_result(c, check_max_principle_lost(s, u0_sup, tol)?)
                .with_note("overshoot evidence, not singularity evidence")
        }
        CheckName::AnalyticityPositive => {
            let s = series.expect("declared monitor");
            if s.is_empty() {
                ReportedCheck::failed(c.name.name(), tol, "no resolved spectrum samples".into())
            } else {
                let (t, v) = s
                    .rows
                    .iter()
                    .copied()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty");
                derived.insert("min_analyticity_radius".into(), v);
                ReportedCheck::from_result(c, margin_result(v - tol, t))
            }
        }
        CheckName::ZNonDecreasing => {
            ReportedCheck::from_result(c, check_non_decreasing(series.expect("declared monitor"), tol)?)
        }
        CheckName::VhjZ => {
            let p = match ctx.r.spec.family {
                Family::Vhj { p } => p,
                _ => unreachable!("validated"),
            };
            let chain = constant_chain(p, ctx.u0.grid())?;
            let form = OdeForm::VhjZ {
                lam1: lambda1,
                c: chain.c_weighted,
                p,
            };
            ReportedCheck::from_result(c, check_ode_inequality(series.expect("declared monitor"), form, tol)?)
        }
        CheckName::KsMass => {
            let form = OdeForm::KsMass { lam1: lambda1, vol: len };
            ReportedCheck::from_result(c, check_ode_inequality(series.expect("declared monitor"), form, tol)?)
        }
        CheckName::MassIncreasing => {
            ReportedCheck::from_result(c, check_strictly_increasing(series.expect("declared monitor"))?)
        }
        CheckName::TitiEnergy => ReportedCheck::from_result(
            c,
            check_ode_inequality(series.expect("declared monitor"), OdeForm::TitiEnergy, tol)?,
        ),
        CheckName::RiccatiBound => {
            let r = check_riccati_bound(series.expect("declared monitor"), ctx.r.spec.nu, tol)?;
            let rc = ReportedCheck::from_result(c, r);
            if rc.applicable {
                rc
            } else {
                rc.with_note("vacuous: y(0) is not below -sqrt(8) nu")
            }
        }
        CheckName::GradSupBounded | CheckName::SupBounded => {
            let s = series.expect("declared monitor");
            let first = s.first().map(|r| r.1).unwrap_or(0.0);
            let cap = first * (1.0 + tol);
            let (t, max) = s.max_value().unwrap_or((0.0, 0.0));
            derived.insert(format!("{}_max", s.name), max);
            let mut rc = ReportedCheck::from_result(c, margin_result((cap - max) / cap.max(f64::MIN_POSITIVE), t));
            if !ctx.completed {
                rc.holds = false;
                rc.note = Some("run did not complete".into());
            }
            rc
        }
    };
    Ok(rc)
}

fn margin_result(margin: f64, t: f64) -> CheckResult {
    CheckResult {
        name: String::new(),
        holds: margin >= 0.0,
        worst_margin: margin,
        worst_t: t,
        applicable: true,
    }
}

fn overshoot(s: &MonitorSeries, reference: f64) -> f64 {
    let max = s.max_value().map(|r| r.1).unwrap_or(reference);
    (max - reference) / reference
}

fn cole_hopf_error(u0: &Field, u: &Field, t: f64, bc: BoundaryCondition) -> Result<f64, LabError> {
    let exact = cole_hopf_exact(u0, t, bc)?;
    Ok(u.max_abs_diff(&exact)?)
}

/// Writes one CSV per series, the extra tables and `report.json` into
/// `dir`, returning the written paths.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LabError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();
    let files = out
        .series
        .iter()
        .map(|s| (format!("{}.csv", s.name), s.to_csv()))
        .chain(out.tables.iter().cloned())
        .chain(std::iter::once(("report.json".to_string(), out.report.to_json())));
    for (name, content) in files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
