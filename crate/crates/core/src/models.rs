//! The model PDE families as stiff/non-stiff splittings, plus exact
//! solution oracles for the heat equation and the Cole-Hopf linearization
//! of the quadratic viscous Hamilton-Jacobi equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Grid1D};
use crate::operators::spectral::{self, Parity};
use crate::operators::{BoundaryCondition, LinearOperator};

/// Sign convention for the gradient term of the integrated KS equation.
///
/// `Standard` is `u_t + u_xxxx + u_xx + ½ u_x² = 0`. `Mirrored` flips the
/// sign of the quadratic term, which is the equation satisfied by `−u`;
/// integrating the mirrored form from `u0` is the standard form from `−u0`
/// observed through `−u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KsConvention {
    #[default]
    Standard,
    Mirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `u_t = u_xx + |u_x|^p`
    Vhj { p: f64 },
    /// `u_t = −u_xxxx − u_xx ∓ ½ u_x²`
    KsIntegrated {
        #[serde(default)]
        convention: KsConvention,
    },
    /// `v_t = −v_xxxx − v_xx − v v_x`
    KsDifferentiated,
    /// `u_t = ν u_xx − u u_x`
    ViscousBurgers,
    /// `u_t = −κ (−Δ)^α u + ν u_xx − u u_x`
    HyperviscousBurgers { kappa: f64, alpha: f64 },
    /// `ω_t = ν ω_xx − ω²`
    RiccatiHeat,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Vhj { .. } => "vhj",
            Family::KsIntegrated { .. } => "ks_integrated",
            Family::KsDifferentiated => "ks_differentiated",
            Family::ViscousBurgers => "viscous_burgers",
            Family::HyperviscousBurgers { .. } => "hyperviscous_burgers",
            Family::RiccatiHeat => "riccati_heat",
        }
    }

    /// Display name, e.g. `RiccatiHeat`.
    pub fn label(&self) -> &'static str {
        match self {
            Family::Vhj { .. } => "Vhj",
            Family::KsIntegrated { .. } => "KsIntegrated",
            Family::KsDifferentiated => "KsDifferentiated",
            Family::ViscousBurgers => "ViscousBurgers",
            Family::HyperviscousBurgers { .. } => "HyperviscousBurgers",
            Family::RiccatiHeat => "RiccatiHeat",
        }
    }

    pub fn allowed_bcs(&self) -> &'static [BoundaryCondition] {
        use BoundaryCondition::*;
        match self {
            Family::Vhj { .. } => &[Periodic, Dirichlet],
            Family::KsIntegrated { .. } => &[Periodic, NeumannKs, PokhozhaevKs],
            Family::KsDifferentiated => &[Periodic],
            Family::ViscousBurgers => &[Periodic, Neumann],
            Family::HyperviscousBurgers { .. } => &[Periodic],
            Family::RiccatiHeat => &[Dirichlet],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    /// Viscosity for the Burgers and Riccati-heat families.
    pub nu: f64,
    pub bc: BoundaryCondition,
    /// 2/3-rule truncation of the non-stiff term on periodic grids.
    #[serde(default)]
    pub dealias: bool,
}

impl ModelSpec {
    pub fn new(family: Family, nu: f64, bc: BoundaryCondition) -> Result<Self> {
        let spec = Self {
            family,
            nu,
            bc,
            dealias: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_dealias(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.family.allowed_bcs();
        if !allowed.contains(&self.bc) {
            let names: Vec<&str> = allowed.iter().map(|b| b.label()).collect();
            return Err(Error::InvalidModel(format!(
                "{} requires {} boundary conditions (got {})",
                self.family.label(),
                names.join(" or "),
                self.bc.label()
            )));
        }
        match self.family {
            Family::Vhj { p } if !(p >= 0.0) || !p.is_finite() => {
                return Err(Error::InvalidModel(format!("vhj needs p >= 0 (got {p})")))
            }
            Family::ViscousBurgers | Family::RiccatiHeat if !(self.nu > 0.0) => {
                return Err(Error::InvalidModel(format!(
                    "{} needs nu > 0 (got {})",
                    self.family.name(),
                    self.nu
                )))
            }
            Family::HyperviscousBurgers { kappa, alpha } => {
                if !(kappa > 0.0) || !(alpha > 1.0) || !(self.nu >= 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "hyperviscous_burgers needs kappa > 0, alpha > 1, nu >= 0 (got {kappa}, {alpha}, {})",
                        self.nu
                    )));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Coefficients of the stiff part in powers of `d/dx`, plus an optional
    /// `(κ, α)` meaning `−κ (−Δ)^α`.
    fn stiff_coefficients(&self) -> ([f64; 5], Option<(f64, f64)>) {
        match self.family {
            Family::Vhj { .. } => ([0.0, 0.0, 1.0, 0.0, 0.0], None),
            Family::KsIntegrated { .. } | Family::KsDifferentiated => {
                ([0.0, 0.0, -1.0, 0.0, -1.0], None)
            }
            Family::ViscousBurgers | Family::RiccatiHeat => ([0.0, 0.0, self.nu, 0.0, 0.0], None),
            Family::HyperviscousBurgers { kappa, alpha } => {
                ([0.0, 0.0, self.nu, 0.0, 0.0], Some((kappa, alpha)))
            }
        }
    }

    pub fn split(&self, grid: &Grid1D) -> Result<SplitRhs> {
        self.validate()?;
        self.bc.check_layout(grid)?;
        let (coeffs, frac) = self.stiff_coefficients();
        let mut stiff = LinearOperator::new(*grid, self.bc, coeffs)?;
        if let Some((kappa, alpha)) = frac {
            let minus_nu = coeffs.map(|c| -c);
            stiff = LinearOperator::new(*grid, self.bc, minus_nu)?
                .with_fractional(kappa, alpha)?
                .scaled(-1.0);
        }
        let gradient = LinearOperator::new(*grid, self.bc, [0.0, 1.0, 0.0, 0.0, 0.0])?;
        Ok(SplitRhs {
            spec: *self,
            grid: *grid,
            stiff,
            gradient,
        })
    }
}

/// `u_t = stiff(u) + nonstiff(u)` on a fixed grid.
#[derive(Debug, Clone)]
pub struct SplitRhs {
    spec: ModelSpec,
    grid: Grid1D,
    stiff: LinearOperator,
    gradient: LinearOperator,
}

impl SplitRhs {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.spec.bc
    }

    /// The linear dissipative part.
    pub fn stiff(&self) -> &LinearOperator {
        &self.stiff
    }

    pub fn apply_stiff(&self, u: &Field) -> Result<Field> {
        let mut out = self.stiff.apply(u)?;
        self.spec.bc.enforce(out.values_mut());
        Ok(out)
    }

    /// Every remaining term, evaluated explicitly.
    pub fn nonstiff(&self, u: &Field) -> Result<Field> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut values = match self.spec.family {
            Family::RiccatiHeat => u.values().iter().map(|w| -w * w).collect(),
            Family::Vhj { p } if self.spec.bc == BoundaryCondition::Dirichlet => {
                upwind_hamiltonian(u.values(), self.grid.h(), p)
            }
            Family::Vhj { p } => {
                let ux = self.gradient.apply(u)?;
                ux.values().iter().map(|g| g.abs().powf(p)).collect()
            }
            Family::KsIntegrated { convention } => {
                let s = match convention {
                    KsConvention::Standard => -0.5,
                    KsConvention::Mirrored => 0.5,
                };
                let ux = self.gradient.apply(u)?;
                ux.values().iter().map(|g| s * g * g).collect()
            }
            Family::KsDifferentiated | Family::ViscousBurgers | Family::HyperviscousBurgers { .. } => {
                let ux = self.gradient.apply(u)?;
                u.values()
                    .iter()
                    .zip(ux.values())
                    .map(|(v, g)| -v * g)
                    .collect::<Vec<f64>>()
            }
        };
        if self.spec.dealias && self.grid.is_periodic() {
            values = spectral::dealias(&values);
        }
        self.spec.bc.enforce(&mut values);
        Ok(u.with_values(values))
    }

    /// Full right-hand side.
    pub fn rhs(&self, u: &Field) -> Result<Field> {
        self.apply_stiff(u)?.axpy(1.0, &self.nonstiff(u)?)
    }
}

/// Monotone upwind approximation of `|u_x|^p` at interior nodes:
/// `max(max(−D⁻u, 0), max(D⁺u, 0))^p`. It is non-increasing in `u_{j−1}`'s
/// backward difference and non-decreasing in the forward difference, and
/// vanishes at discrete local maxima, so it cannot create new maxima.
fn upwind_hamiltonian(u: &[f64], h: f64, p: f64) -> Vec<f64> {
    let n = u.len() - 1;
    let mut out = vec![0.0; u.len()];
    for j in 1..n {
        let back = (u[j] - u[j - 1]) / h;
        let fwd = (u[j + 1] - u[j]) / h;
        let g = (-back).max(0.0).max(fwd.max(0.0));
        out[j] = g.powf(p);
    }
    out
}

/// Full right-hand side of `spec` at `u`.
pub fn rhs(spec: &ModelSpec, u: &Field) -> Result<Field> {
    spec.split(u.grid())?.rhs(u)
}

/// Exact solution of `u_t = ν u_xx` from sampled data, through the basis
/// diagonalizing the Laplacian under `bc` (Fourier, sine or cosine series).
pub fn heat_exact(u0: &Field, t: f64, nu: f64, bc: BoundaryCondition) -> Result<Field> {
    if !(t >= 0.0) || !(nu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "heat_exact needs t >= 0 and nu > 0 (got t = {t}, nu = {nu})"
        )));
    }
    bc.check_layout(u0.grid())?;
    let decay = |k: f64, _: bool| Complex64::new((-nu * k * k * t).exp(), 0.0);
    let len = u0.grid().length();
    let values = match bc {
        BoundaryCondition::Periodic => spectral::apply_multiplier(u0.values(), len, decay),
        BoundaryCondition::Dirichlet | BoundaryCondition::Neumann => {
            let parity = if bc == BoundaryCondition::Dirichlet {
                Parity::Odd
            } else {
                Parity::Even
            };
            let ext = spectral::reflect_extend(u0.values(), parity);
            let mut v = spectral::apply_multiplier(&ext, 2.0 * len, decay);
            v.truncate(u0.len());
            v
        }
        _ => return Err(Error::UnsupportedBoundary("heat_exact")),
    };
    Ok(u0.with_values(values))
}

/// Exact solution of `u_t = u_xx + u_x²` through `v = e^u`, `v_t = v_xx`.
///
/// Dirichlet data must vanish at the endpoints; then `v − 1` evolves under
/// the Dirichlet heat semigroup.
pub fn cole_hopf_exact(u0: &Field, t: f64, bc: BoundaryCondition) -> Result<Field> {
    let v0 = u0.map(f64::exp);
    if v0.values().iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::TransformUnderflow);
    }
    let v = match bc {
        BoundaryCondition::Periodic => heat_exact(&v0, t, 1.0, bc)?,
        BoundaryCondition::Dirichlet => {
            let n = u0.len() - 1;
            let ends = u0.values()[0].abs().max(u0.values()[n].abs());
            if ends > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "Dirichlet Cole-Hopf data must vanish at the endpoints (|u0| = {ends:e})"
                )));
            }
            let shifted = v0.map(|v| v - 1.0);
            heat_exact(&shifted, t, 1.0, bc)?.map(|w| w + 1.0)
        }
        _ => return Err(Error::UnsupportedBoundary("cole_hopf_exact")),
    };
    if v.values().iter().any(|&x| !(x > 0.0)) {
        return Err(Error::TransformUnderflow);
    }
    Ok(v.map(f64::ln))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Grid1D {
        Grid1D::periodic(0.0, 2.0 * PI, n).unwrap()
    }

    fn all_specs() -> Vec<(ModelSpec, Grid1D)> {
        use BoundaryCondition::*;
        let p = periodic(64);
        let b = Grid1D::bounded(0.0, PI, 64).unwrap();
        let mk = |f, nu, bc| ModelSpec::new(f, nu, bc).unwrap();
        vec![
            (mk(Family::Vhj { p: 4.0 }, 0.0, Periodic), p),
            (mk(Family::Vhj { p: 3.0 }, 0.0, Dirichlet), b),
            (mk(Family::KsIntegrated { convention: KsConvention::Standard }, 0.0, Periodic), p),
            (mk(Family::KsIntegrated { convention: KsConvention::Standard }, 0.0, NeumannKs), b),
            (mk(Family::KsIntegrated { convention: KsConvention::Mirrored }, 0.0, PokhozhaevKs), b),
            (mk(Family::KsDifferentiated, 0.0, Periodic), p),
            (mk(Family::ViscousBurgers, 0.1, Periodic), p),
            (mk(Family::ViscousBurgers, 0.1, Neumann), b),
            (mk(Family::HyperviscousBurgers { kappa: 1.0, alpha: 2.0 }, 0.01, Periodic), p),
            (mk(Family::RiccatiHeat, 0.1, Dirichlet), b),
        ]
    }

    #[test]
    fn zero_is_steady_for_every_family() {
        for (spec, g) in all_specs() {
            let r = rhs(&spec, &Field::zeros(g)).unwrap();
            assert_eq!(r.sup(), 0.0, "{:?}", spec.family);
        }
    }

    #[test]
    fn constants_are_steady_where_expected() {
        let g = periodic(64);
        for family in [Family::ViscousBurgers, Family::KsDifferentiated, Family::KsIntegrated { convention: KsConvention::Standard }] {
            let spec = ModelSpec::new(family, 0.3, BoundaryCondition::Periodic).unwrap();
            let r = rhs(&spec, &Field::from_fn(g, |_| 2.5)).unwrap();
            assert!(r.sup() < 1e-12, "{family:?}: {}", r.sup());
        }
    }

    #[test]
    fn vhj_quadratic_on_sine() {
        let g = periodic(64);
        let spec = ModelSpec::new(Family::Vhj { p: 2.0 }, 0.0, BoundaryCondition::Periodic).unwrap();
        let r = rhs(&spec, &Field::from_fn(g, f64::sin)).unwrap();
        let expect = Field::from_fn(g, |x| -x.sin() + x.cos().powi(2));
        assert!(r.max_abs_diff(&expect).unwrap() < 1e-12);
    }

    #[test]
    fn split_examples() {
        let g = periodic(32);
        let vhj = ModelSpec::new(Family::Vhj { p: 4.0 }, 0.0, BoundaryCondition::Periodic)
            .unwrap()
            .split(&g)
            .unwrap();
        for k in [1.0, 3.0] {
            let f = Field::from_fn(g, |x| (k * x).sin());
            let s = vhj.apply_stiff(&f).unwrap();
            assert!(s.max_abs_diff(&f.scale(-k * k)).unwrap() < 1e-11);
        }
        let ks = ModelSpec::new(Family::KsIntegrated { convention: KsConvention::Standard }, 0.0, BoundaryCondition::Periodic)
            .unwrap()
            .split(&g)
            .unwrap();
        for (k, expect) in [(0.5, 0.25 - 0.0625), (1.0, 0.0), (2.0, -12.0), (3.0, -72.0)] {
            assert_eq!(ks.stiff().symbol(k).unwrap().re, expect);
        }
        let b = Grid1D::bounded(0.0, PI, 32).unwrap();
        let ric = ModelSpec::new(Family::RiccatiHeat, 0.1, BoundaryCondition::Dirichlet)
            .unwrap()
            .split(&b)
            .unwrap();
        let f = Field::from_fn(b, |x| 3.0 * x.sin());
        let n = ric.nonstiff(&f).unwrap();
        assert!(n.max_abs_diff(&f.map(|v| -v * v)).unwrap() < 1e-12);
    }

    #[test]
    fn incompatible_boundary_conditions_are_rejected() {
        let e = ModelSpec::new(Family::RiccatiHeat, 0.1, BoundaryCondition::Periodic).unwrap_err();
        assert!(e.to_string().contains("RiccatiHeat requires Dirichlet"), "{e}");
        assert!(ModelSpec::new(Family::ViscousBurgers, 0.0, BoundaryCondition::Periodic).is_err());
        assert!(ModelSpec::new(Family::HyperviscousBurgers { kappa: 1.0, alpha: 1.0 }, 0.0, BoundaryCondition::Periodic).is_err());
        assert!(ModelSpec::new(Family::KsDifferentiated, 0.0, BoundaryCondition::NeumannKs).is_err());
        let spec = ModelSpec::new(Family::Vhj { p: 2.0 }, 0.0, BoundaryCondition::Dirichlet).unwrap();
        assert!(spec.split(&periodic(16)).is_err());
    }

    #[test]
    fn heat_exact_examples() {
        let b = Grid1D::bounded(0.0, PI, 128).unwrap();
        let s = Field::from_fn(b, f64::sin);
        let r = heat_exact(&s, 1.0, 1.0, BoundaryCondition::Dirichlet).unwrap();
        assert!(r.max_abs_diff(&s.scale((-1.0f64).exp())).unwrap() < 1e-12);
        let c = Field::from_fn(b, f64::cos);
        let r = heat_exact(&c, 1.0, 1.0, BoundaryCondition::Neumann).unwrap();
        assert!(r.max_abs_diff(&c.scale((-1.0f64).exp())).unwrap() < 1e-12);
        for (f, bc) in [(&s, BoundaryCondition::Dirichlet), (&c, BoundaryCondition::Neumann)] {
            let r = heat_exact(f, 0.0, 1.0, bc).unwrap();
            assert!(r.max_abs_diff(f).unwrap() < 1e-10);
        }
        let p = periodic(64);
        let f = Field::from_fn(p, |x| (x.sin()).exp());
        assert!(heat_exact(&f, 0.0, 1.0, BoundaryCondition::Periodic).unwrap().max_abs_diff(&f).unwrap() < 1e-10);
        assert!(heat_exact(&c, 1.0, 1.0, BoundaryCondition::NeumannKs).is_err());
    }

    #[test]
    fn cole_hopf_examples() {
        let p = periodic(128);
        let z = cole_hopf_exact(&Field::zeros(p), 3.0, BoundaryCondition::Periodic).unwrap();
        assert!(z.sup() < 1e-14);

        let u0 = Field::from_fn(p, |x| (2.0 + x.sin()).ln());
        for t in [0.3, 1.0] {
            let u = cole_hopf_exact(&u0, t, BoundaryCondition::Periodic).unwrap();
            let expect = Field::from_fn(p, |x| (2.0 + (-t as f64).exp() * x.sin()).ln());
            assert!(u.max_abs_diff(&expect).unwrap() < 1e-12);
        }

        let b = Grid1D::bounded(0.0, PI, 128).unwrap();
        let mut u0 = Field::from_fn(b, |x| (1.0 + 0.5 * x.sin()).ln());
        u0.values_mut()[0] = 0.0;
        u0.values_mut()[128] = 0.0;
        let u = cole_hopf_exact(&u0, 1.0, BoundaryCondition::Dirichlet).unwrap();
        let expect = Field::from_fn(b, |x| (1.0 + 0.5 * (-1.0f64).exp() * x.sin()).ln());
        assert!(u.max_abs_diff(&expect).unwrap() < 1e-12);

        let deep = Field::from_fn(p, |_| -800.0);
        assert_eq!(cole_hopf_exact(&deep, 1.0, BoundaryCondition::Periodic), Err(Error::TransformUnderflow));
    }

    #[test]
    fn ks_nonlinearity_integrates_to_zero_under_neumann_ks() {
        // ∫ u_x² u_xx dx = [u_x³/3] = 0 when u_x vanishes at both ends
        let errs: Vec<f64> = [64usize, 128, 256]
            .iter()
            .map(|&n| {
                let g = Grid1D::bounded(0.0, PI, n).unwrap();
                let u = Field::from_fn(g, |x| x.cos() + 0.3 * (2.0 * x).cos());
                let ux = crate::operators::derivative(&u, 1, BoundaryCondition::NeumannKs).unwrap();
                let uxx = crate::operators::derivative(&u, 2, BoundaryCondition::NeumannKs).unwrap();
                let prod = ux.zip_map(&uxx, |a, b| a * a * b).unwrap();
                crate::field::quadrature(&prod).unwrap().abs()
            })
            .collect();
        let h = PI / 64.0;
        assert!(errs[0] < 10.0 * h * h);
        assert!(errs.windows(2).all(|w| w[1] <= w[0] / 3.0 || w[1] < 1e-13), "{errs:?}");
    }
}
