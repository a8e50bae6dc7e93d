//! Uniform 1D grids, sampled fields and the quadrature/norm layer.
//!
//! Bounded grids store both endpoints (`n + 1` nodes), so Dirichlet data
//! lives in the array and boundary enforcement is a plain assignment.
//! Periodic grids store `n` nodes and omit the right endpoint.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Periodic,
    Bounded,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::Periodic => "periodic",
            Layout::Bounded => "bounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    layout: Layout,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, n: usize, layout: Layout) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidGrid(format!("need a < b, got ({a}, {b})")));
        }
        if n < 4 {
            return Err(Error::InvalidGrid(format!("resolution {n} too small")));
        }
        Ok(Self { a, b, n, layout })
    }

    pub fn periodic(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(a, b, n, Layout::Periodic)
    }

    pub fn bounded(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(a, b, n, Layout::Bounded)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn is_periodic(&self) -> bool {
        self.layout == Layout::Periodic
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Number of stored nodes.
    pub fn len(&self) -> usize {
        match self.layout {
            Layout::Periodic => self.n,
            Layout::Bounded => self.n + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    /// Trapezoid weights; for periodic layouts every node carries `h`.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let h = self.h();
        let mut w = vec![h; self.len()];
        if self.layout == Layout::Bounded {
            w[0] = 0.5 * h;
            w[self.n] = 0.5 * h;
        }
        w
    }
}

/// Samples of a real function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
    diagnostic: bool,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            diagnostic: false,
        })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self {
            grid,
            values,
            diagnostic: false,
        }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self::from_fn(grid, |_| 0.0)
    }

    /// Marks a field that may legitimately hold non-finite values
    /// (state captured after a blow-up trigger).
    pub fn into_diagnostic(mut self) -> Self {
        self.diagnostic = true;
        self
    }

    pub fn is_diagnostic(&self) -> bool {
        self.diagnostic
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: self.grid,
            values,
            diagnostic: false,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Field) -> Result<Self> {
        self.zip_map(other, |a, b| a + s * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    L1,
    L2,
    Lp(f64),
    Sup,
}

/// Composite trapezoid rule (rectangle rule on periodic grids).
pub fn quadrature(f: &Field) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::NonFiniteField);
    }
    let g = &f.grid;
    let sum: f64 = match g.layout() {
        Layout::Periodic => f.values.iter().sum(),
        Layout::Bounded => {
            let n = g.n();
            0.5 * (f.values[0] + f.values[n]) + f.values[1..n].iter().sum::<f64>()
        }
    };
    Ok(g.length() * sum / g.n() as f64)
}

pub fn norm(f: &Field, kind: NormKind) -> Result<f64> {
    match kind {
        NormKind::Sup => {
            if !f.is_finite() {
                return Err(Error::NonFiniteField);
            }
            Ok(f.sup())
        }
        NormKind::L1 => quadrature(&f.map(f64::abs)),
        NormKind::L2 => Ok(quadrature(&f.map(|v| v * v))?.sqrt()),
        NormKind::Lp(p) => {
            if !(p >= 1.0) {
                return Err(Error::InvalidExponent(p));
            }
            Ok(quadrature(&f.map(|v| v.abs().powf(p)))?.powf(1.0 / p))
        }
    }
}

/// `∫ f w dx` on a shared grid.
pub fn weighted_pairing(f: &Field, w: &Field) -> Result<f64> {
    quadrature(&f.zip_map(w, |a, b| a * b)?)
}

/// First Dirichlet eigenpair of `-d²/dx²` on a bounded interval,
/// normalized so that `sup φ1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub lambda1: f64,
    pub phi1: Field,
}

pub fn first_dirichlet_eigenpair(grid: &Grid1D) -> Result<Eigenpair> {
    if grid.is_periodic() {
        return Err(Error::EigenpairNeedsBoundedDomain);
    }
    let (a, len) = (grid.a(), grid.length());
    let k = PI / len;
    let mut phi1 = Field::from_fn(*grid, |x| (k * (x - a)).sin());
    // exact zeros at the endpoints
    let n = grid.n();
    phi1.values_mut()[0] = 0.0;
    phi1.values_mut()[n] = 0.0;
    Ok(Eigenpair {
        lambda1: k * k,
        phi1,
    })
}
