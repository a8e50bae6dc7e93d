//! Time stepping: IMEX Crank-Nicolson/Heun and classical RK4, adaptive
//! step doubling, and the policy turning divergence into a blow-up verdict.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::models::{ModelSpec, SplitRhs};
use crate::monitors::{evaluate, linear_fit, MonitorKind, MonitorSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepController {
    pub dt: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub safety: f64,
    pub rtol: f64,
    pub atol: f64,
    pub adaptive: bool,
    /// Hard cap on attempted steps.
    pub max_steps: u64,
}

impl StepController {
    pub fn fixed(dt: f64) -> Self {
        Self {
            dt,
            dt_min: dt,
            dt_max: dt,
            safety: 0.9,
            rtol: 1e-6,
            atol: 1e-9,
            adaptive: false,
            max_steps: 100_000_000,
        }
    }

    pub fn adaptive(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            dt_min: 1e-12 * t_end,
            dt_max: t_end,
            safety: 0.9,
            rtol: 1e-6,
            atol: 1e-9,
            adaptive: true,
            max_steps: 10_000_000,
        }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.dt_min > 0.0
            && self.dt_min <= self.dt
            && self.dt <= self.dt_max
            && self.safety > 0.0
            && self.safety <= 1.0
            && self.rtol > 0.0
            && self.atol > 0.0;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "step controller needs 0 < dt_min <= dt <= dt_max, safety in (0,1], positive tolerances: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupPolicy {
    pub sup_threshold: f64,
    pub functional_threshold: f64,
    pub watch: Vec<MonitorKind>,
    /// On bounded grids, fires once a single cell difference carries this
    /// fraction of `‖u‖_∞`: the gradient has collapsed to the grid scale.
    #[serde(default)]
    pub cell_jump_fraction: Option<f64>,
}

impl Default for BlowupPolicy {
    fn default() -> Self {
        Self {
            sup_threshold: 1e6,
            functional_threshold: 1e8,
            watch: Vec::new(),
            cell_jump_fraction: None,
        }
    }
}

impl BlowupPolicy {
    pub fn watching(watch: Vec<MonitorKind>) -> Self {
        Self {
            watch,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trigger {
    SupNorm { value: f64 },
    Functional { name: String, value: f64 },
    DtUnderflow { dt: f64, growing: String },
    NonFinite,
    GridScaleGradient { jump_fraction: f64 },
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::SupNorm { value } => write!(f, "sup norm {value:e} above threshold"),
            Trigger::Functional { name, value } => write!(f, "{name} = {value:e} above threshold"),
            Trigger::DtUnderflow { dt, growing } => {
                write!(f, "dt underflow ({dt:e}) while {growing} grows")
            }
            Trigger::NonFinite => write!(f, "non-finite values"),
            Trigger::GridScaleGradient { jump_fraction } => {
                write!(f, "one cell carries {jump_fraction:.3} of the sup norm")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Advanced,
    Blowup { t_star: f64, trigger: Trigger },
    Completed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub status: Status,
    /// Last finite accepted state.
    pub state: Field,
    pub t: f64,
    pub steps: u64,
    pub rejected: u64,
}

/// Largest `|u_{j+1} − u_j|` over `‖u‖_∞`.
pub fn cell_jump_fraction(u: &Field) -> f64 {
    let sup = u.sup();
    if sup == 0.0 {
        return 0.0;
    }
    let jump = u
        .values()
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    jump / sup
}

fn finite_or(f: Field, t: f64) -> Result<Field> {
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::NonFiniteOutput(t))
    }
}

/// One Crank-Nicolson step on the stiff part with a Heun predictor-corrector
/// on the non-stiff part:
///
/// `(I − dt/2 L) u* = (I + dt/2 L) u + dt N(u)`
/// `(I − dt/2 L) u⁺ = (I + dt/2 L) u + dt/2 (N(u) + N(u*))`
pub fn imex_step(split: &SplitRhs, u: &Field, dt: f64) -> Result<Field> {
    if dt == 0.0 {
        return Ok(u.clone());
    }
    let stiff = split.stiff();
    let explicit = u.axpy(0.5 * dt, &split.apply_stiff(u)?)?;
    let n0 = split.nonstiff(u)?;
    let predictor = stiff.solve_shifted(-0.5 * dt, &explicit.axpy(dt, &n0)?)?;
    let predictor = finite_or(predictor, dt)?;
    let n1 = split.nonstiff(&predictor)?;
    let rhs = explicit.axpy(0.5 * dt, &n0.axpy(1.0, &n1)?)?;
    let mut out = stiff.solve_shifted(-0.5 * dt, &rhs)?;
    split.bc().enforce(out.values_mut());
    finite_or(out, dt)
}

/// Classical fourth-order Runge-Kutta on the full right-hand side.
pub fn rk4_step(split: &SplitRhs, u: &Field, dt: f64) -> Result<Field> {
    if dt == 0.0 {
        return Ok(u.clone());
    }
    let k1 = split.rhs(u)?;
    let k2 = split.rhs(&u.axpy(0.5 * dt, &k1)?)?;
    let k3 = split.rhs(&u.axpy(0.5 * dt, &k2)?)?;
    let k4 = split.rhs(&u.axpy(dt, &k3)?)?;
    let sum = k1.axpy(2.0, &k2)?.axpy(2.0, &k3)?.axpy(1.0, &k4)?;
    let mut out = u.axpy(dt / 6.0, &sum)?;
    split.bc().enforce(out.values_mut());
    finite_or(out, dt)
}

struct Recorder<'a> {
    monitors: &'a [MonitorKind],
    series: BTreeMap<MonitorKind, MonitorSeries>,
}

impl<'a> Recorder<'a> {
    fn new(monitors: &'a [MonitorKind]) -> Self {
        let series = monitors
            .iter()
            .map(|&k| (k, MonitorSeries::new(k.name())))
            .collect();
        Self { monitors, series }
    }

    fn sample(&mut self, u: &Field, t: f64) -> Result<()> {
        for &kind in self.monitors {
            match evaluate(kind, u, t) {
                Ok((t, v)) => self.series.get_mut(&kind).expect("registered").push(t, v)?,
                Err(Error::UnresolvedSpectrum) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    fn last(&self, kind: MonitorKind) -> Option<f64> {
        self.series.get(&kind).and_then(|s| s.last()).map(|r| r.1)
    }

    /// A watched functional whose magnitude rose over its recent samples.
    fn growing(&self, watch: &[MonitorKind]) -> Option<MonitorKind> {
        watch.iter().copied().find(|k| {
            let rows = &self.series[k].rows;
            if rows.len() < 2 {
                return false;
            }
            let back = rows.len().saturating_sub(9);
            rows[rows.len() - 1].1.abs() > rows[back].1.abs()
        })
    }

    fn into_series(self) -> Vec<MonitorSeries> {
        let mut map = self.series;
        self.monitors
            .iter()
            .filter_map(|k| map.remove(k))
            .collect()
    }
}

/// Advances `u0` to `t_end` or until the policy detects blow-up. Monitors
/// are sampled at `t = 0` and after every accepted step.
pub fn integrate(
    model: &ModelSpec,
    u0: &Field,
    t_end: f64,
    ctrl: StepController,
    policy: &BlowupPolicy,
    monitors: &[MonitorKind],
) -> Result<(StepOutcome, Vec<MonitorSeries>)> {
    let split = model.split(u0.grid())?;
    integrate_split(&split, u0, t_end, ctrl, policy, monitors)
}

pub fn integrate_split(
    split: &SplitRhs,
    u0: &Field,
    t_end: f64,
    ctrl: StepController,
    policy: &BlowupPolicy,
    monitors: &[MonitorKind],
) -> Result<(StepOutcome, Vec<MonitorSeries>)> {
    ctrl.validate()?;
    if !(t_end > 0.0) {
        return Err(Error::InvalidArgument(format!("t_end must be positive (got {t_end})")));
    }
    if let Some(k) = policy.watch.iter().find(|k| !monitors.contains(k)) {
        return Err(Error::InvalidArgument(format!(
            "watched functional {} is not among the monitors",
            k.name()
        )));
    }
    if !u0.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let mut u = u0.clone();
    split.bc().enforce(u.values_mut());
    let mut rec = Recorder::new(monitors);
    rec.sample(&u, 0.0)?;

    let mut t = 0.0;
    let mut dt = ctrl.dt;
    let (mut steps, mut rejected) = (0u64, 0u64);
    let done = |status, state, t, steps, rejected| StepOutcome {
        status,
        state,
        t,
        steps,
        rejected,
    };

    while t < t_end {
        if steps + rejected >= ctrl.max_steps {
            return Err(Error::StepFailure { t, dt });
        }
        let remaining = t_end - t;
        let h = dt.min(remaining);
        let attempt = if ctrl.adaptive {
            let full = imex_step(split, &u, h);
            let half = imex_step(split, &u, 0.5 * h).and_then(|v| imex_step(split, &v, 0.5 * h));
            match (full, half) {
                (Ok(full), Ok(half)) => {
                    let scale = ctrl.atol + ctrl.rtol * half.sup();
                    let err = full.max_abs_diff(&half)? / scale;
                    if err.is_finite() {
                        Ok((half, err))
                    } else {
                        Err(Error::NonFiniteOutput(t))
                    }
                }
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        } else {
            imex_step(split, &u, h).map(|v| (v, 0.0))
        };

        let (next, err) = match attempt {
            Ok(ok) => ok,
            Err(Error::NonFiniteOutput(_)) | Err(Error::SingularSystem(_)) | Err(Error::NonFiniteField) => {
                if !ctrl.adaptive {
                    let status = Status::Blowup { t_star: t, trigger: Trigger::NonFinite };
                    return Ok((done(status, u, t, steps, rejected), rec.into_series()));
                }
                (u.clone(), f64::INFINITY)
            }
            Err(e) => return Err(e),
        };

        if ctrl.adaptive && err > 1.0 {
            rejected += 1;
            let shrink = if err.is_finite() {
                (ctrl.safety * err.powf(-1.0 / 3.0)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            dt = h * shrink;
            if dt < ctrl.dt_min {
                let status = match rec.growing(&policy.watch) {
                    Some(k) => Status::Blowup {
                        t_star: t,
                        trigger: Trigger::DtUnderflow { dt, growing: k.name().into() },
                    },
                    None if !err.is_finite() => Status::Blowup { t_star: t, trigger: Trigger::NonFinite },
                    None => return Err(Error::StepFailure { t, dt }),
                };
                return Ok((done(status, u, t, steps, rejected), rec.into_series()));
            }
            continue;
        }

        steps += 1;
        t = if h == remaining { t_end } else { t + h };
        u = next;
        rec.sample(&u, t)?;
        if ctrl.adaptive {
            let grow = if err > 0.0 {
                (ctrl.safety * err.powf(-1.0 / 3.0)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            if h == dt {
                dt = (h * grow).clamp(ctrl.dt_min, ctrl.dt_max);
            }
        }

        let sup = u.sup();
        if sup > policy.sup_threshold {
            let status = Status::Blowup { t_star: t, trigger: Trigger::SupNorm { value: sup } };
            return Ok((done(status, u, t, steps, rejected), rec.into_series()));
        }
        if let Some(theta) = policy.cell_jump_fraction {
            let frac = cell_jump_fraction(&u);
            if !u.grid().is_periodic() && frac >= theta {
                let trigger = Trigger::GridScaleGradient { jump_fraction: frac };
                let status = Status::Blowup { t_star: t, trigger };
                return Ok((done(status, u, t, steps, rejected), rec.into_series()));
            }
        }
        for &k in &policy.watch {
            if let Some(v) = rec.last(k) {
                if v.abs() > policy.functional_threshold {
                    let trigger = Trigger::Functional { name: k.name().into(), value: v };
                    let status = Status::Blowup { t_star: t, trigger };
                    return Ok((done(status, u, t, steps, rejected), rec.into_series()));
                }
            }
        }
    }
    Ok((done(Status::Completed, u, t, steps, rejected), rec.into_series()))
}

/// Fits `1/|value|` against `t` over the last quarter of the series (at
/// least four samples) and returns the zero crossing, or `+∞` when the fit
/// does not decrease.
pub fn estimate_blowup_time(series: &MonitorSeries) -> Result<f64> {
    if series.len() < 4 {
        return Err(Error::TooFewSamples { need: 4, got: series.len() });
    }
    let tail = (series.len() / 4).max(4);
    let pts: Vec<(f64, f64)> = series.rows[series.len() - tail..]
        .iter()
        .map(|&(t, v)| (t, 1.0 / v.abs()))
        .collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::InvalidArgument(format!("series {} has zero or non-finite samples", series.name)));
    }
    let (slope, intercept) = linear_fit(&pts);
    let scale = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    let span = pts[pts.len() - 1].0 - pts[0].0;
    if !(slope < 0.0) || slope.abs() * span <= 1e-12 * scale {
        return Ok(f64::INFINITY);
    }
    Ok(-intercept / slope)
}
