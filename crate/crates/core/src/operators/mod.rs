//! Discrete differential operators.
//!
//! Periodic grids use exact spectral differentiation; bounded grids use
//! centered second-order differences closed by ghost nodes (see
//! [`boundary`]). Constant-coefficient combinations of derivatives plus an
//! optional fractional Laplacian form a [`LinearOperator`], which also
//! provides the implicit solves used by the time integrators.

pub mod banded;
pub mod boundary;
pub mod spectral;

use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

pub use banded::{BandedLu, BandedMatrix};
pub use boundary::{bc_residual, one_sided_gradient, BoundaryCondition};

use crate::error::{Error, Result};
use crate::field::{Field, Grid1D};

const FACTOR_CACHE_LIMIT: usize = 64;

/// `d^order f / dx^order` under the closure of `bc`.
pub fn derivative(f: &Field, order: usize, bc: BoundaryCondition) -> Result<Field> {
    if !(1..=4).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let mut coeffs = [0.0; 5];
    coeffs[order] = 1.0;
    LinearOperator::new(*f.grid(), bc, coeffs)?.apply(f)
}

/// `κ (−Δ)^α f` through the multiplier `|k|^{2α}`.
pub fn fractional_laplacian(f: &Field, alpha: f64, kappa: f64) -> Result<Field> {
    if !f.grid().is_periodic() {
        return Err(Error::FractionalNeedsPeriodic);
    }
    LinearOperator::new(*f.grid(), BoundaryCondition::Periodic, [0.0; 5])?
        .with_fractional(kappa, alpha)?
        .apply(f)
}

/// Solves `(I + c L) g = f`; pinned boundary rows are replaced by `g = 0`.
pub fn implicit_solve(op: &LinearOperator, c: f64, f: &Field) -> Result<Field> {
    op.solve_shifted(c, f)
}

/// `Σ_m coeffs[m] D^m + fractional` on a fixed grid and boundary condition.
#[derive(Debug)]
pub struct LinearOperator {
    grid: Grid1D,
    bc: BoundaryCondition,
    coeffs: [f64; 5],
    /// `(κ, α)` for the term `κ (−Δ)^α`.
    fractional: Option<(f64, f64)>,
    matrix: Option<BandedMatrix>,
    factors: RwLock<HashMap<u64, Arc<BandedLu>>>,
}

impl Clone for LinearOperator {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid,
            bc: self.bc,
            coeffs: self.coeffs,
            fractional: self.fractional,
            matrix: self.matrix.clone(),
            factors: RwLock::new(HashMap::new()),
        }
    }
}

impl LinearOperator {
    pub fn new(grid: Grid1D, bc: BoundaryCondition, coeffs: [f64; 5]) -> Result<Self> {
        bc.check_layout(&grid)?;
        let matrix = if grid.is_periodic() {
            None
        } else {
            Some(boundary::stencil_matrix(&grid, bc, &coeffs)?)
        };
        Ok(Self {
            grid,
            bc,
            coeffs,
            fractional: None,
            matrix,
            factors: RwLock::new(HashMap::new()),
        })
    }

    /// Adds `κ (−Δ)^α`; periodic grids only.
    pub fn with_fractional(mut self, kappa: f64, alpha: f64) -> Result<Self> {
        if !self.grid.is_periodic() {
            return Err(Error::FractionalNeedsPeriodic);
        }
        if !(alpha > 0.0) || !(kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "fractional term needs alpha > 0 and kappa >= 0 (got {alpha}, {kappa})"
            )));
        }
        self.fractional = Some((kappa, alpha));
        Ok(self)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn coeffs(&self) -> &[f64; 5] {
        &self.coeffs
    }

    pub fn fractional(&self) -> Option<(f64, f64)> {
        self.fractional
    }

    pub fn matrix(&self) -> Option<&BandedMatrix> {
        self.matrix.as_ref()
    }

    /// Matrix bandwidth on bounded grids; 0 for spectral operators.
    pub fn bandwidth(&self) -> usize {
        self.matrix.as_ref().map_or(0, BandedMatrix::bandwidth)
    }

    /// Fourier symbol at physical wavenumber `k` (periodic grids only).
    pub fn symbol(&self, k: f64) -> Option<Complex64> {
        self.grid.is_periodic().then(|| self.symbol_at(k, false))
    }

    fn symbol_at(&self, k: f64, nyquist: bool) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (order, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                s += c * spectral::derivative_symbol(k, order, nyquist);
            }
        }
        if let Some((kappa, alpha)) = self.fractional {
            if k != 0.0 {
                s += kappa * k.abs().powf(2.0 * alpha);
            }
        }
        s
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            bc: self.bc,
            coeffs: self.coeffs.map(|c| factor * c),
            fractional: self.fractional.map(|(k, a)| (factor * k, a)),
            matrix: self.matrix.as_ref().map(|m| m.scaled(factor)),
            factors: RwLock::new(HashMap::new()),
        }
    }

    fn check_field(&self, f: &Field) -> Result<()> {
        if *f.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn apply(&self, f: &Field) -> Result<Field> {
        self.check_field(f)?;
        let values = match &self.matrix {
            Some(m) => m.mul_vec(f.values()),
            None => spectral::apply_multiplier(f.values(), self.grid.length(), |k, ny| {
                self.symbol_at(k, ny)
            }),
        };
        Ok(f.with_values(values))
    }

    fn factor_for(&self, c: f64) -> Result<Arc<BandedLu>> {
        let key = c.to_bits();
        if let Some(lu) = self.factors.read().expect("factor cache poisoned").get(&key) {
            return Ok(lu.clone());
        }
        let m = self.matrix.as_ref().expect("bounded operator has a matrix");
        let mut shifted = m.shifted_identity(c);
        if self.bc.pins_boundary_values() {
            shifted.set_identity_row(0);
            shifted.set_identity_row(self.grid.n());
        }
        let lu = Arc::new(shifted.factor()?);
        let mut cache = self.factors.write().expect("factor cache poisoned");
        if cache.len() >= FACTOR_CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, lu.clone());
        Ok(lu)
    }

    /// Solves `(I + c L) g = f` with the boundary condition built in.
    pub fn solve_shifted(&self, c: f64, f: &Field) -> Result<Field> {
        self.check_field(f)?;
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!("shift {c} is not finite")));
        }
        match &self.matrix {
            Some(_) => {
                let mut rhs = f.values().to_vec();
                self.bc.enforce(&mut rhs);
                if c == 0.0 {
                    return Ok(f.with_values(rhs));
                }
                let lu = self.factor_for(c)?;
                let mut g = lu.solve(&rhs);
                self.bc.enforce(&mut g);
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SingularSystem("non-finite solution".into()));
                }
                Ok(f.with_values(g))
            }
            None => {
                let n = f.len();
                let mut coeffs = spectral::forward(f.values());
                let scale = 2.0 * std::f64::consts::PI / self.grid.length();
                for (j, cj) in coeffs.iter_mut().enumerate() {
                    let k = spectral::index_wavenumber(j, n) as f64 * scale;
                    let d = 1.0 + c * self.symbol_at(k, spectral::is_nyquist(j, n));
                    if d.norm() < 1e-14 {
                        return Err(Error::SingularSystem(format!(
                            "symbol 1 + c L vanishes at wavenumber {k}"
                        )));
                    }
                    *cj /= d;
                }
                Ok(f.with_values(spectral::inverse(coeffs)))
            }
        }
    }
}
