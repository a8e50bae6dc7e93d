//! Experiment configuration files.
//!
//! A config is TOML with top-level `id`, `expect`, `monitors`, `checks`
//! and the tables `[model]`, `[domain]`, `[initial]`, `[time]`, `[policy]`,
//! `[output]`. Unknown keys are rejected and every error carries the line
//! it refers to.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;

use blowup_core::integrators::{BlowupPolicy, StepController};
use blowup_core::models::{Family, KsConvention, ModelSpec};
use blowup_core::monitors::MonitorKind;
use blowup_core::operators::BoundaryCondition;
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use toml::Spanned;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Completed,
    Blowup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Vhj,
    KsIntegrated,
    KsDifferentiated,
    ViscousBurgers,
    HyperviscousBurgers,
    RiccatiHeat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileName {
    SinMode,
    CosMode,
    ScaledPhi1,
    LogProfile,
    SteepTanh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayoutName {
    Periodic,
    Bounded,
}

/// Declared checks. Each reads one monitor series (or the final state).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    /// Final-state sup error against the Cole-Hopf solution.
    ColeHopfError,
    /// Error ratio when the fixed step is halved.
    ColeHopfOrder,
    MaxPrinciple,
    GradMaxPrinciple,
    MaxPrincipleLost,
    AnalyticityPositive,
    ZNonDecreasing,
    VhjZ,
    KsMass,
    MassIncreasing,
    TitiEnergy,
    RiccatiBound,
    GradSupBounded,
    SupBounded,
}

impl CheckName {
    pub const ALL: [CheckName; 14] = [
        CheckName::ColeHopfError,
        CheckName::ColeHopfOrder,
        CheckName::MaxPrinciple,
        CheckName::GradMaxPrinciple,
        CheckName::MaxPrincipleLost,
        CheckName::AnalyticityPositive,
        CheckName::ZNonDecreasing,
        CheckName::VhjZ,
        CheckName::KsMass,
        CheckName::MassIncreasing,
        CheckName::TitiEnergy,
        CheckName::RiccatiBound,
        CheckName::GradSupBounded,
        CheckName::SupBounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckName::ColeHopfError => "cole_hopf_error",
            CheckName::ColeHopfOrder => "cole_hopf_order",
            CheckName::MaxPrinciple => "max_principle",
            CheckName::GradMaxPrinciple => "grad_max_principle",
            CheckName::MaxPrincipleLost => "max_principle_lost",
            CheckName::AnalyticityPositive => "analyticity_positive",
            CheckName::ZNonDecreasing => "z_non_decreasing",
            CheckName::VhjZ => "vhj_z",
            CheckName::KsMass => "ks_mass",
            CheckName::MassIncreasing => "mass_increasing",
            CheckName::TitiEnergy => "titi_energy",
            CheckName::RiccatiBound => "riccati_bound",
            CheckName::GradSupBounded => "grad_sup_bounded",
            CheckName::SupBounded => "sup_bounded",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn default_tol(self) -> f64 {
        match self {
            CheckName::ColeHopfError => 1e-5,
            CheckName::ColeHopfOrder => 0.15,
            CheckName::MaxPrinciple => 1e-8,
            CheckName::GradMaxPrinciple => 1e-4,
            CheckName::MaxPrincipleLost => 1e-3,
            CheckName::AnalyticityPositive => 0.0,
            CheckName::ZNonDecreasing => 1e-9,
            CheckName::VhjZ | CheckName::KsMass => 1e-2,
            CheckName::MassIncreasing => 0.0,
            CheckName::TitiEnergy | CheckName::RiccatiBound => 1e-3,
            CheckName::GradSupBounded | CheckName::SupBounded => 10.0,
        }
    }

    /// Monitor series the check reads, if any.
    pub fn monitor(self, family: FamilyName) -> Option<MonitorKind> {
        match self {
            CheckName::ColeHopfError | CheckName::ColeHopfOrder => None,
            CheckName::MaxPrinciple | CheckName::MaxPrincipleLost | CheckName::SupBounded => {
                Some(MonitorKind::Sup)
            }
            CheckName::GradMaxPrinciple | CheckName::GradSupBounded => Some(MonitorKind::GradSup),
            CheckName::AnalyticityPositive => Some(MonitorKind::AnalyticityRadius),
            CheckName::ZNonDecreasing | CheckName::VhjZ => Some(MonitorKind::WeightedPhi1),
            CheckName::KsMass | CheckName::MassIncreasing => Some(MonitorKind::Mass),
            CheckName::TitiEnergy => Some(MonitorKind::KsEnergy),
            CheckName::RiccatiBound => Some(if family == FamilyName::RiccatiHeat {
                MonitorKind::WeightedPhi1
            } else {
                MonitorKind::GradWeightedPhi1
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckSpec {
    pub name: CheckName,
    pub tol: f64,
}

impl<'de> Deserialize<'de> for CheckSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CheckSpec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a check name or a table { name, tol }")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<CheckSpec, E> {
                let name = CheckName::from_name(s).ok_or_else(|| unknown_check(s))?;
                Ok(CheckSpec {
                    name,
                    tol: name.default_tol(),
                })
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<CheckSpec, A::Error> {
                let (mut name, mut tol) = (None, None);
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "name" => {
                            let s: String = map.next_value()?;
                            name = Some(CheckName::from_name(&s).ok_or_else(|| unknown_check(&s))?);
                        }
                        "tol" => tol = Some(map.next_value::<f64>()?),
                        other => return Err(de::Error::unknown_field(other, &["name", "tol"])),
                    }
                }
                let name = name.ok_or_else(|| de::Error::missing_field("name"))?;
                Ok(CheckSpec {
                    name,
                    tol: tol.unwrap_or(name.default_tol()),
                })
            }
        }
        d.deserialize_any(V)
    }
}

fn unknown_check<E: de::Error>(s: &str) -> E {
    let names: Vec<&str> = CheckName::ALL.iter().map(|c| c.name()).collect();
    E::custom(format!("unknown check `{s}`, expected one of {}", names.join(", ")))
}

/// A domain endpoint: a number or a multiple of pi such as `"2pi"`, `"-pi"`
/// or `"pi/2"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Endpoint {
    Number(f64),
    Expr(String),
}

impl Endpoint {
    pub fn value(&self) -> Option<f64> {
        match self {
            Endpoint::Number(v) => Some(*v),
            Endpoint::Expr(s) => parse_pi_multiple(s),
        }
    }
}

fn parse_pi_multiple(s: &str) -> Option<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let coeff = num.strip_suffix("pi")?.trim_end_matches('*');
    let c = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().ok()?,
    };
    Some(c * PI / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: Spanned<FamilyName>,
    pub bc: Spanned<BoundaryCondition>,
    pub nu: Option<f64>,
    pub p: Option<f64>,
    pub kappa: Option<f64>,
    pub alpha: Option<f64>,
    pub convention: Option<KsConvention>,
    #[serde(default)]
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub a: Spanned<Endpoint>,
    pub b: Spanned<Endpoint>,
    pub n: Spanned<i64>,
    pub layout: Option<Spanned<LayoutName>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub profile: Spanned<ProfileName>,
    pub k: Option<f64>,
    pub amplitude: Option<f64>,
    /// `scaled_phi1`: amplitude chosen so that `z(0)` is this multiple of `K`.
    pub threshold_multiple: Option<f64>,
    pub c: Option<f64>,
    pub width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_end: Spanned<f64>,
    pub dt: f64,
    #[serde(default = "yes")]
    pub adaptive: bool,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub dt_min: Option<f64>,
    pub dt_max: Option<f64>,
    pub safety: Option<f64>,
    pub max_steps: Option<u64>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub sup_threshold: Option<f64>,
    pub functional_threshold: Option<f64>,
    #[serde(default)]
    pub watch: Vec<Spanned<MonitorKind>>,
    pub cell_jump_fraction: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub out_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub expect: Expect,
    #[serde(default)]
    pub monitors: Vec<Spanned<MonitorKind>>,
    #[serde(default)]
    pub checks: Vec<Spanned<CheckSpec>>,
    pub model: ModelSection,
    pub domain: DomainSection,
    pub initial: InitialSection,
    pub time: TimeSection,
    #[serde(default)]
    pub policy: PolicySection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Everything a run needs, resolved from a validated config.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub spec: ModelSpec,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub periodic: bool,
    pub controller: StepController,
    pub policy: BlowupPolicy,
    pub monitors: Vec<MonitorKind>,
    pub checks: Vec<CheckSpec>,
}

struct LineMap<'a>(&'a str);

impl LineMap<'_> {
    fn line(&self, span: &Range<usize>) -> Option<usize> {
        let start = span.start.min(self.0.len());
        if span.is_empty() && start == 0 {
            return None;
        }
        Some(self.0[..start].matches('\n').count() + 1)
    }

    fn err(&self, span: &Range<usize>, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.line(span),
            message: message.into(),
        }
    }
}

/// Parses and validates a config, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let lines = LineMap(text);
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().and_then(|s| lines.line(&s)),
        message: e.message().trim().to_string(),
    })?;
    resolve_with(&cfg, &lines)?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// Resolves a config produced by [`parse_config`].
    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        resolve_with(self, &LineMap(""))
    }

    pub fn family(&self) -> FamilyName {
        *self.model.family.get_ref()
    }

    pub fn out_dir(&self) -> String {
        self.output
            .out_dir
            .clone()
            .unwrap_or_else(|| format!("out/{}", self.id))
    }
}

fn resolve_with(cfg: &ExperimentConfig, lines: &LineMap) -> Result<Resolved, ConfigError> {
    if cfg.id.is_empty() || cfg.id.contains(['/', '\\']) {
        return Err(lines.err(&(0..0), format!("invalid id `{}`", cfg.id)));
    }
    let spec = resolve_model(&cfg.model, lines)?;

    let d = &cfg.domain;
    let a = d
        .a
        .get_ref()
        .value()
        .ok_or_else(|| lines.err(&d.a.span(), "a must be a number or a multiple of pi"))?;
    let b = d
        .b
        .get_ref()
        .value()
        .ok_or_else(|| lines.err(&d.b.span(), "b must be a number or a multiple of pi"))?;
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(lines.err(&d.b.span(), format!("domain needs a < b (got {a}, {b})")));
    }
    let n = *d.n.get_ref();
    if n < 4 {
        return Err(lines.err(&d.n.span(), format!("n must be at least 4 (got {n})")));
    }
    let periodic = spec.bc == BoundaryCondition::Periodic;
    if let Some(layout) = &d.layout {
        let want = if periodic { LayoutName::Periodic } else { LayoutName::Bounded };
        if *layout.get_ref() != want {
            return Err(lines.err(
                &layout.span(),
                format!(
                    "layout {:?} does not match {} boundary conditions",
                    layout.get_ref(),
                    spec.bc.label()
                ),
            ));
        }
    }

    validate_initial(&cfg.initial, cfg.family(), &spec, lines)?;

    let t = &cfg.time;
    let t_end = *t.t_end.get_ref();
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(lines.err(&t.t_end.span(), format!("t_end must be positive (got {t_end})")));
    }
    let mut ctrl = if t.adaptive {
        StepController::adaptive(t.dt, t_end)
    } else {
        StepController::fixed(t.dt)
    };
    if let Some(v) = t.rtol {
        ctrl.rtol = v;
    }
    if let Some(v) = t.atol {
        ctrl.atol = v;
    }
    if let Some(v) = t.dt_min {
        ctrl.dt_min = v;
    }
    if let Some(v) = t.dt_max {
        ctrl.dt_max = v;
    }
    if let Some(v) = t.safety {
        ctrl.safety = v;
    }
    if let Some(v) = t.max_steps {
        ctrl.max_steps = v;
    }
    ctrl.validate()
        .map_err(|e| lines.err(&t.t_end.span(), format!("[time]: {e}")))?;

    let monitors: Vec<MonitorKind> = cfg.monitors.iter().map(|m| *m.get_ref()).collect();
    for (i, m) in cfg.monitors.iter().enumerate() {
        if monitors[..i].contains(m.get_ref()) {
            return Err(lines.err(&m.span(), format!("monitor {} listed twice", m.get_ref().name())));
        }
        let bounded_only = matches!(
            m.get_ref(),
            MonitorKind::WeightedPhi1 | MonitorKind::GradWeightedPhi1
        );
        if bounded_only && periodic {
            return Err(lines.err(&m.span(), format!("monitor {} needs a bounded domain", m.get_ref().name())));
        }
        if *m.get_ref() == MonitorKind::AnalyticityRadius && !periodic {
            return Err(lines.err(&m.span(), "monitor analyticity_radius needs a periodic domain"));
        }
    }

    let p = &cfg.policy;
    let mut policy = BlowupPolicy::default();
    if let Some(v) = p.sup_threshold {
        policy.sup_threshold = v;
    }
    if let Some(v) = p.functional_threshold {
        policy.functional_threshold = v;
    }
    for w in &p.watch {
        if !monitors.contains(w.get_ref()) {
            return Err(lines.err(
                &w.span(),
                format!("watched functional {} is not among the monitors", w.get_ref().name()),
            ));
        }
        policy.watch.push(*w.get_ref());
    }
    if let Some(f) = p.cell_jump_fraction {
        if !(f > 0.0 && f <= 2.0) {
            return Err(lines.err(&(0..0), format!("cell_jump_fraction must lie in (0, 2] (got {f})")));
        }
        policy.cell_jump_fraction = Some(f);
    }

    let mut checks: Vec<CheckSpec> = Vec::new();
    for c in &cfg.checks {
        let spec_c = *c.get_ref();
        let span = c.span();
        if checks.iter().any(|k| k.name == spec_c.name) {
            return Err(lines.err(&span, format!("check {} listed twice", spec_c.name.name())));
        }
        if !(spec_c.tol >= 0.0 && spec_c.tol.is_finite()) {
            return Err(lines.err(&span, format!("check {} needs a finite tol >= 0", spec_c.name.name())));
        }
        if let Some(m) = spec_c.name.monitor(cfg.family()) {
            if !monitors.contains(&m) {
                return Err(lines.err(
                    &span,
                    format!("check {} needs monitor {}", spec_c.name.name(), m.name()),
                ));
            }
        }
        check_applicable(spec_c.name, &spec, &cfg.time)
            .map_err(|msg| lines.err(&span, msg))?;
        checks.push(spec_c);
    }

    Ok(Resolved {
        spec,
        a,
        b,
        n: n as usize,
        periodic,
        controller: ctrl,
        policy,
        monitors,
        checks,
    })
}

fn resolve_model(m: &ModelSection, lines: &LineMap) -> Result<ModelSpec, ConfigError> {
    let fam_span = m.family.span();
    let name = *m.family.get_ref();
    let given = [
        ("nu", m.nu.is_some()),
        ("p", m.p.is_some()),
        ("kappa", m.kappa.is_some()),
        ("alpha", m.alpha.is_some()),
        ("convention", m.convention.is_some()),
    ];
    let (needed, optional): (&[&str], &[&str]) = match name {
        FamilyName::Vhj => (&["p"], &[]),
        FamilyName::KsIntegrated => (&[], &["convention"]),
        FamilyName::KsDifferentiated => (&[], &[]),
        FamilyName::ViscousBurgers | FamilyName::RiccatiHeat => (&["nu"], &[]),
        FamilyName::HyperviscousBurgers => (&["kappa", "alpha"], &["nu"]),
    };
    for (key, present) in given {
        if present && !needed.contains(&key) && !optional.contains(&key) {
            return Err(lines.err(&fam_span, format!("key `{key}` is not used by {name:?}")));
        }
        if !present && needed.contains(&key) {
            return Err(lines.err(&fam_span, format!("{name:?} requires key `{key}` in [model]")));
        }
    }
    let family = match name {
        FamilyName::Vhj => Family::Vhj { p: m.p.unwrap_or_default() },
        FamilyName::KsIntegrated => Family::KsIntegrated {
            convention: m.convention.unwrap_or_default(),
        },
        FamilyName::KsDifferentiated => Family::KsDifferentiated,
        FamilyName::ViscousBurgers => Family::ViscousBurgers,
        FamilyName::HyperviscousBurgers => Family::HyperviscousBurgers {
            kappa: m.kappa.unwrap_or_default(),
            alpha: m.alpha.unwrap_or_default(),
        },
        FamilyName::RiccatiHeat => Family::RiccatiHeat,
    };
    let bc = *m.bc.get_ref();
    if !family.allowed_bcs().contains(&bc) {
        let names: Vec<&str> = family.allowed_bcs().iter().map(|b| b.label()).collect();
        return Err(lines.err(
            &m.bc.span(),
            format!(
                "{} requires {} boundary conditions (got {})",
                family.label(),
                names.join(" or "),
                bc.label()
            ),
        ));
    }
    ModelSpec::new(family, m.nu.unwrap_or(0.0), bc)
        .map(|s| s.with_dealias(m.dealias))
        .map_err(|e| lines.err(&fam_span, e.to_string()))
}

fn validate_initial(
    init: &InitialSection,
    family: FamilyName,
    spec: &ModelSpec,
    lines: &LineMap,
) -> Result<(), ConfigError> {
    let span = init.profile.span();
    let name = *init.profile.get_ref();
    let given = [
        ("k", init.k),
        ("amplitude", init.amplitude),
        ("threshold_multiple", init.threshold_multiple),
        ("c", init.c),
        ("width", init.width),
    ];
    let (needed, optional): (&[&str], &[&str]) = match name {
        ProfileName::SinMode | ProfileName::CosMode => (&["k"], &["amplitude"]),
        ProfileName::ScaledPhi1 => (&[], &["amplitude", "threshold_multiple"]),
        ProfileName::LogProfile => (&["c"], &["amplitude", "k"]),
        ProfileName::SteepTanh => (&["width"], &["amplitude", "k"]),
    };
    for (key, v) in given {
        let present = v.is_some();
        if present && !needed.contains(&key) && !optional.contains(&key) {
            return Err(lines.err(&span, format!("key `{key}` is not used by profile {name:?}")));
        }
        if !present && needed.contains(&key) {
            return Err(lines.err(&span, format!("profile {name:?} requires key `{key}`")));
        }
        if let Some(v) = v {
            if !v.is_finite() {
                return Err(lines.err(&span, format!("`{key}` must be finite")));
            }
        }
    }
    match name {
        ProfileName::ScaledPhi1 => {
            if spec.bc == BoundaryCondition::Periodic {
                return Err(lines.err(&span, "profile ScaledPhi1 needs a bounded domain"));
            }
            match (init.amplitude, init.threshold_multiple) {
                (Some(_), Some(_)) | (None, None) => {
                    return Err(lines.err(
                        &span,
                        "profile ScaledPhi1 takes exactly one of `amplitude` and `threshold_multiple`",
                    ))
                }
                (None, Some(_)) if !matches!(family, FamilyName::Vhj) || !matches!(spec.family, Family::Vhj { p } if p > 2.0) => {
                    return Err(lines.err(&span, "`threshold_multiple` needs the Vhj family with p > 2"))
                }
                _ => {}
            }
        }
        ProfileName::LogProfile => {
            let c = init.c.unwrap_or_default();
            let amp = init.amplitude.unwrap_or(1.0);
            if !(c > amp.abs()) {
                return Err(lines.err(&span, format!("log_profile needs c > |amplitude| (got {c}, {amp})")));
            }
        }
        ProfileName::SteepTanh => {
            if !(init.width.unwrap_or_default() > 0.0) {
                return Err(lines.err(&span, "steep_tanh needs width > 0"));
            }
        }
        _ => {}
    }
    Ok(())
}

fn check_applicable(name: CheckName, spec: &ModelSpec, time: &TimeSection) -> Result<(), String> {
    let bad = |what: &str| Err(format!("check {} applies to {what}", name.name()));
    match name {
        CheckName::ColeHopfError | CheckName::ColeHopfOrder => {
            let quadratic = matches!(spec.family, Family::Vhj { p } if p == 2.0);
            if !quadratic || !matches!(spec.bc, BoundaryCondition::Periodic | BoundaryCondition::Dirichlet) {
                return bad("Vhj with p = 2 under Periodic or Dirichlet conditions");
            }
            if name == CheckName::ColeHopfOrder && time.adaptive {
                return bad("fixed-step runs (adaptive = false)");
            }
        }
        CheckName::VhjZ | CheckName::ZNonDecreasing => {
            if !matches!(spec.family, Family::Vhj { p } if p > 2.0) || spec.bc != BoundaryCondition::Dirichlet {
                return bad("Vhj with p > 2 under Dirichlet conditions");
            }
        }
        CheckName::KsMass | CheckName::MassIncreasing => {
            if !matches!(spec.family, Family::KsIntegrated { .. }) || spec.bc == BoundaryCondition::Periodic {
                return bad("KsIntegrated on a bounded domain");
            }
        }
        CheckName::TitiEnergy => {
            if !matches!(spec.family, Family::KsIntegrated { .. }) {
                return bad("KsIntegrated");
            }
        }
        CheckName::RiccatiBound => {
            if !matches!(spec.family, Family::RiccatiHeat | Family::ViscousBurgers)
                || spec.bc == BoundaryCondition::Periodic
            {
                return bad("RiccatiHeat or ViscousBurgers on a bounded domain");
            }
        }
        _ => {}
    }
    Ok(())
}
