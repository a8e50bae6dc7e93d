//! Scalar functionals sampled along trajectories, and the runtime checks
//! that compare those series against the analytic inequalities.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{first_dirichlet_eigenpair, norm, quadrature, weighted_pairing, Field, NormKind};
use crate::operators::{one_sided_gradient, spectral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorKind {
    /// `∫ u dx`
    Mass,
    /// `‖u‖_{L²}`
    L2,
    /// `‖u‖_∞`
    Sup,
    /// `‖u_x‖_∞`
    GradSup,
    /// `z = ∫ u φ1 dx`
    WeightedPhi1,
    /// `y = ∫ u_x φ1 dx`
    GradWeightedPhi1,
    /// `‖u_x‖²_{L²}`
    KsEnergy,
    /// Exponential decay rate of the Fourier spectrum.
    AnalyticityRadius,
}

impl MonitorKind {
    pub const ALL: [MonitorKind; 8] = [
        MonitorKind::Mass,
        MonitorKind::L2,
        MonitorKind::Sup,
        MonitorKind::GradSup,
        MonitorKind::WeightedPhi1,
        MonitorKind::GradWeightedPhi1,
        MonitorKind::KsEnergy,
        MonitorKind::AnalyticityRadius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonitorKind::Mass => "mass",
            MonitorKind::L2 => "l2",
            MonitorKind::Sup => "sup",
            MonitorKind::GradSup => "grad_sup",
            MonitorKind::WeightedPhi1 => "weighted_phi1",
            MonitorKind::GradWeightedPhi1 => "grad_weighted_phi1",
            MonitorKind::KsEnergy => "ks_energy",
            MonitorKind::AnalyticityRadius => "analyticity_radius",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// `u_x` spectrally on periodic grids, one-sided at the ends otherwise.
fn gradient(u: &Field) -> Field {
    if u.grid().is_periodic() {
        let v = spectral::apply_multiplier(u.values(), u.grid().length(), |k, ny| {
            spectral::derivative_symbol(k, 1, ny)
        });
        u.with_values(v)
    } else {
        one_sided_gradient(u)
    }
}

/// Evaluates one functional of `u`, returning `(t, value)`.
pub fn evaluate(kind: MonitorKind, u: &Field, t: f64) -> Result<(f64, f64)> {
    if !u.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let value = match kind {
        MonitorKind::Mass => quadrature(u)?,
        MonitorKind::L2 => norm(u, NormKind::L2)?,
        MonitorKind::Sup => u.sup(),
        MonitorKind::GradSup => gradient(u).sup(),
        MonitorKind::WeightedPhi1 => {
            let e = first_dirichlet_eigenpair(u.grid())?;
            weighted_pairing(u, &e.phi1)?
        }
        MonitorKind::GradWeightedPhi1 => {
            let e = first_dirichlet_eigenpair(u.grid())?;
            weighted_pairing(&gradient(u), &e.phi1)?
        }
        MonitorKind::KsEnergy => quadrature(&gradient(u).map(|g| g * g))?,
        MonitorKind::AnalyticityRadius => analyticity_radius(u)?,
    };
    Ok((t, value))
}

/// Minus the least-squares slope of `log|û_k|` against the physical
/// wavenumber over `2 ≤ |k| ≤ 2n/5`, keeping coefficients above `1e−14`
/// relative to the largest one.
pub fn analyticity_radius(u: &Field) -> Result<f64> {
    if !u.grid().is_periodic() {
        return Err(Error::UnsupportedBoundary("analyticity_radius"));
    }
    let n = u.len();
    let c = spectral::forward(u.values());
    let top = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(top > 0.0) {
        return Err(Error::UnresolvedSpectrum);
    }
    let scale = 2.0 * std::f64::consts::PI / u.grid().length();
    let kmax = 2 * n / 5;
    let pts: Vec<(f64, f64)> = (2..=kmax)
        .filter_map(|k| {
            let a = c[k].norm();
            (a > 1e-14 * top).then(|| (k as f64 * scale, a.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::UnresolvedSpectrum);
    }
    let (slope, _) = linear_fit(&pts);
    Ok(-slope)
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonitorSeries {
    pub name: String,
    pub rows: Vec<(f64, f64)>,
}

impl MonitorSeries {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows(name: impl Into<String>, rows: Vec<(f64, f64)>) -> Result<Self> {
        let mut s = Self::new(name);
        for (t, v) in rows {
            s.push(t, v)?;
        }
        Ok(s)
    }

    /// Appends a sample; times must strictly increase.
    pub fn push(&mut self, t: f64, value: f64) -> Result<()> {
        if let Some(&(last, _)) = self.rows.last() {
            if !(t > last) {
                return Err(Error::InvalidArgument(format!(
                    "series {}: time {t} does not follow {last}",
                    self.name
                )));
            }
        }
        self.rows.push((t, value));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn first(&self) -> Option<(f64, f64)> {
        self.rows.first().copied()
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        self.rows.last().copied()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.1)
    }

    pub fn max_value(&self) -> Option<(f64, f64)> {
        self.rows
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// `t,<name>` header then one row per sample in round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = format!("t,{}\n", self.name);
        for (t, v) in &self.rows {
            let _ = writeln!(out, "{t:.16e},{v:.16e}");
        }
        out
    }

    /// Centered three-point derivative at interior samples, valid on
    /// non-uniform time grids.
    pub fn centered_derivative(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(3)
            .map(|w| {
                let ((t0, y0), (t1, y1), (t2, y2)) = (w[0], w[1], w[2]);
                let (h0, h1) = (t1 - t0, t2 - t1);
                let d = -h1 / (h0 * (h0 + h1)) * y0 + (h1 - h0) / (h0 * h1) * y1
                    + h0 / (h1 * (h0 + h1)) * y2;
                (t1, d)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub holds: bool,
    /// Smallest slack over the series, tolerance included; negative iff
    /// violated.
    pub worst_margin: f64,
    pub worst_t: f64,
    /// False when the hypotheses of the inequality are not met.
    pub applicable: bool,
}

impl CheckResult {
    fn from_margins(name: &str, margins: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let (worst_t, worst_margin) = margins
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0.0, 0.0));
        Self {
            name: name.to_string(),
            holds: worst_margin >= 0.0,
            worst_margin,
            worst_t,
            applicable: true,
        }
    }

    fn not_applicable(name: &str, t: f64) -> Self {
        Self {
            name: name.to_string(),
            holds: true,
            worst_margin: 0.0,
            worst_t: t,
            applicable: false,
        }
    }
}

fn require(series: &MonitorSeries, need: usize) -> Result<()> {
    if series.len() < need {
        return Err(Error::TooFewSamples {
            need,
            got: series.len(),
        });
    }
    Ok(())
}

/// `max_t value(t) ≤ u0_sup (1 + tol)`.
pub fn check_max_principle(series: &MonitorSeries, u0_sup: f64, tol: f64) -> Result<CheckResult> {
    require(series, 1)?;
    let cap = u0_sup * (1.0 + tol);
    Ok(CheckResult::from_margins(
        "max_principle",
        series.rows.iter().map(|&(t, v)| (t, cap - v)),
    ))
}

/// Holds iff the sup series overshoots `u0_sup` by at least
/// `min_overshoot · u0_sup` somewhere.
pub fn check_max_principle_lost(
    series: &MonitorSeries,
    u0_sup: f64,
    min_overshoot: f64,
) -> Result<CheckResult> {
    require(series, 1)?;
    let (t, v) = series.max_value().expect("non-empty");
    let margin = (v - u0_sup) / u0_sup - min_overshoot;
    Ok(CheckResult {
        name: "max_principle_lost".into(),
        holds: margin >= 0.0,
        worst_margin: margin,
        worst_t: t,
        applicable: true,
    })
}

/// `y(t) ≤ (t/8 + 1/y(0))^{−1} + tol` while the comparison hyperbola is
/// finite; vacuous unless `y(0) < −√8 ν`.
pub fn check_riccati_bound(y: &MonitorSeries, nu: f64, tol: f64) -> Result<CheckResult> {
    require(y, 1)?;
    let (t0, y0) = y.first().expect("non-empty");
    if !(y0 < -(8.0f64).sqrt() * nu) {
        return Ok(CheckResult::not_applicable("riccati_bound", t0));
    }
    let t_bound = -8.0 / y0;
    Ok(CheckResult::from_margins(
        "riccati_bound",
        y.rows
            .iter()
            .filter(|&&(t, _)| t - t0 < t_bound)
            .map(|&(t, v)| (t, 1.0 / ((t - t0) / 8.0 + 1.0 / y0) + tol - v)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum OdeForm {
    /// `m′ ≥ λ1/(2|Ω|) m²`
    KsMass { lam1: f64, vol: f64 },
    /// `z′ + λ1 z ≥ C z^p`
    VhjZ { lam1: f64, c: f64, p: f64 },
    /// `E(t) ≤ e^{t−t0} E(t0)`
    TitiEnergy,
}

impl OdeForm {
    pub fn name(&self) -> &'static str {
        match self {
            OdeForm::KsMass { .. } => "ks_mass",
            OdeForm::VhjZ { .. } => "vhj_z",
            OdeForm::TitiEnergy => "titi_energy",
        }
    }
}

/// Differential forms use centered differences of the series and compare
/// relative to the larger side; the energy form is checked integrated.
pub fn check_ode_inequality(series: &MonitorSeries, form: OdeForm, tol: f64) -> Result<CheckResult> {
    require(series, 2)?;
    let relative = |lhs: f64, rhs: f64| {
        let scale = lhs.abs().max(rhs.abs());
        if scale > 0.0 {
            (lhs - rhs) / scale + tol
        } else {
            tol
        }
    };
    let rows = &series.rows;
    let margins: Vec<(f64, f64)> = match form {
        OdeForm::TitiEnergy => {
            let (t0, e0) = rows[0];
            rows.iter()
                .map(|&(t, e)| {
                    let bound = (t - t0).exp() * e0;
                    let m = if bound > 0.0 {
                        (bound * (1.0 + tol) - e) / bound
                    } else {
                        -e.abs()
                    };
                    (t, m)
                })
                .collect()
        }
        OdeForm::KsMass { lam1, vol } => {
            require(series, 3)?;
            let value = |t: f64| series.rows.iter().find(|r| r.0 == t).map(|r| r.1).unwrap_or(0.0);
            series
                .centered_derivative()
                .into_iter()
                .map(|(t, d)| {
                    let m = value(t);
                    (t, relative(d, lam1 / (2.0 * vol) * m * m))
                })
                .collect()
        }
        OdeForm::VhjZ { lam1, c, p } => {
            require(series, 3)?;
            series
                .centered_derivative()
                .into_iter()
                .zip(rows[1..].iter())
                .map(|((t, d), &(_, z))| (t, relative(d + lam1 * z, c * z.abs().powf(p))))
                .collect()
        }
    };
    Ok(CheckResult::from_margins(form.name(), margins))
}

/// Holds iff the series never drops by more than `tol` relative between
/// consecutive samples.
pub fn check_non_decreasing(series: &MonitorSeries, tol: f64) -> Result<CheckResult> {
    require(series, 1)?;
    Ok(CheckResult::from_margins(
        "non_decreasing",
        series.rows.windows(2).map(|w| {
            let (a, b) = (w[0].1, w[1].1);
            (w[1].0, (b - a) / a.abs().max(f64::MIN_POSITIVE) + tol)
        }),
    ))
}

/// Holds iff every consecutive increment is positive; the margin is the
/// smallest increment relative to the earlier value.
pub fn check_strictly_increasing(series: &MonitorSeries) -> Result<CheckResult> {
    require(series, 2)?;
    let mut r = CheckResult::from_margins(
        "strictly_increasing",
        series.rows.windows(2).map(|w| {
            let (a, b) = (w[0].1, w[1].1);
            (w[1].0, (b - a) / a.abs().max(f64::MIN_POSITIVE))
        }),
    );
    r.holds = r.worst_margin > 0.0;
    Ok(r)
}

/// Diagnostic `dm/dt − ½‖u_x‖²` at interior samples of a mass series
/// paired with a `ks_energy` series on the same times.
pub fn mass_balance(mass: &MonitorSeries, energy: &MonitorSeries) -> Result<MonitorSeries> {
    require(mass, 3)?;
    if mass.len() != energy.len() || mass.times().zip(energy.times()).any(|(a, b)| a != b) {
        return Err(Error::InvalidArgument("mass and energy series must share sample times".into()));
    }
    let rows = mass
        .centered_derivative()
        .into_iter()
        .zip(energy.rows[1..].iter())
        .map(|((t, d), &(_, e))| (t, d - 0.5 * e))
        .collect();
    MonitorSeries::from_rows("mass_balance", rows)
}
