//! Weighted functional inequalities built on the first Dirichlet
//! eigenfunction: singular integrals of `φ1^{−α}`, the `p = 2`
//! counterexample family, and the constant chain giving the blow-up
//! threshold `K`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid1D, Layout};
use crate::monitors::CheckResult;

const GL_ORDER: usize = 16;

fn gauss_legendre() -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(GL_ORDER).expect("non-zero"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativePowerIntegral {
    pub alpha: f64,
    pub value: f64,
    pub converged: bool,
    pub divergent: bool,
    /// Raw quadrature value at each refinement level.
    pub levels: Vec<f64>,
}

/// `∫_0^π sin(x)^{−α} dx`.
///
/// For `α < 1` the substitution `x = (π/2) s^q`, `q = 2/(1−α)`, turns the
/// endpoint singularity into a smooth integrand; trapezoid values on
/// doubling grids are Richardson-extrapolated. For `α ≥ 1` the integral
/// diverges and the levels (on `q = 2`, open at the singular end) grow
/// without settling.
pub fn phi_negative_power_integral(alpha: f64, refinement_levels: usize) -> Result<NegativePowerIntegral> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be positive (got {alpha})")));
    }
    if refinement_levels < 2 {
        return Err(Error::InvalidArgument("need at least two refinement levels".into()));
    }
    let q = if alpha < 1.0 { 2.0 / (1.0 - alpha) } else { 2.0 };
    let half = PI / 2.0;
    let integrand = |s: f64| -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let x = half * s.powf(q);
        x.sin().powf(-alpha) * half * q * s.powf(q - 1.0)
    };
    let levels: Vec<f64> = (0..refinement_levels)
        .map(|l| {
            let n = 16usize << l;
            let h = 1.0 / n as f64;
            let inner: f64 = (1..n).map(|j| integrand(j as f64 * h)).sum();
            2.0 * h * (inner + 0.5 * (integrand(0.0) + integrand(1.0)))
        })
        .collect();

    if alpha >= 1.0 {
        let d: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
        let divergent = d.windows(2).all(|w| w[1] > 0.5 * w[0] && w[1] > 0.0)
            && d.last().is_some_and(|&x| x > 0.0);
        return Ok(NegativePowerIntegral {
            alpha,
            value: *levels.last().expect("non-empty"),
            converged: false,
            divergent,
            levels,
        });
    }

    let rich: Vec<f64> = levels.windows(2).map(|w| w[1] + (w[1] - w[0]) / 3.0).collect();
    let value = *rich.last().expect("two levels");
    let converged = match rich.len() {
        1 => (levels[1] - levels[0]).abs() <= 1e-9 * value.abs(),
        m => (rich[m - 1] - rich[m - 2]).abs() <= 1e-9 * value.abs(),
    };
    Ok(NegativePowerIntegral {
        alpha,
        value,
        converged,
        divergent: false,
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRatio {
    pub eps: f64,
    pub ratio: f64,
    pub paper_lower_bound: f64,
}

/// `∫_{lo}^{hi} f` with Gauss-Legendre on geometrically graded panels.
fn geometric_gl(lo: f64, hi: f64, panels_per_decade: usize, f: impl Fn(f64) -> f64) -> f64 {
    let gl = gauss_legendre();
    let decades = (hi / lo).log10().max(1.0);
    let m = (decades * panels_per_decade as f64).ceil() as usize;
    let r = (hi / lo).powf(1.0 / m as f64);
    (0..m)
        .map(|i| {
            let a = lo * r.powi(i as i32);
            let b = if i + 1 == m { hi } else { a * r };
            gl.integrate(a, b, &f)
        })
        .sum()
}

/// Ratio `(∫ v_ε sin)² / ∫ (v_ε′)² sin` for the piecewise logarithmic
/// family on `(0, π)`: zero on `[0, ε²]`, `log(x/ε²)` on `[ε², ε]`, the
/// plateau `log(1/ε)`, mirrored on the right.
pub fn counterexample_ratio(eps: f64) -> Result<CounterexampleRatio> {
    if !(eps > 0.0 && eps < PI / 4.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, π/4) (got {eps})")));
    }
    let e2 = eps * eps;
    let plateau = (1.0 / eps).ln();
    let ramp = geometric_gl(e2, eps, 4, |x| (x / e2).ln() * x.sin());
    let pairing = 2.0 * ramp + plateau * 2.0 * eps.cos();
    let energy = 2.0 * geometric_gl(e2, eps, 4, |x| x.sin() / (x * x));
    Ok(CounterexampleRatio {
        eps,
        ratio: pairing * pairing / energy,
        paper_lower_bound: 9.0 * PI * PI / 128.0 * plateau,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantChain {
    pub p: f64,
    pub lambda1: f64,
    pub phi1_sup: f64,
    pub c_prime: f64,
    pub c_poincare: f64,
    pub c_weighted: f64,
    pub k: f64,
}

/// Constants of the weighted Poincaré inequality on a bounded interval
/// with `φ1` normalized to `sup φ1 = 1`, and the threshold
/// `K = (2λ1 / C_weighted)^{1/(p−1)}`.
pub fn constant_chain(p: f64, grid: &Grid1D) -> Result<ConstantChain> {
    if grid.layout() != Layout::Bounded {
        return Err(Error::EigenpairNeedsBoundedDomain);
    }
    if !(p > 2.0) || !p.is_finite() {
        return Err(Error::ChainNeedsSuperquadratic(p));
    }
    let len = grid.length();
    let lambda1 = (PI / len).powi(2);
    let integral = phi_negative_power_integral(1.0 / (p - 1.0), 14)?;
    let c_prime = (len / PI * integral.value).powf(1.0 - 1.0 / p);
    let c_poincare = len / 2.0;
    let phi1_sup = 1.0;
    let c_weighted = (phi1_sup * c_poincare * c_prime).powf(-p);
    let k = (2.0 * lambda1 / c_weighted).powf(1.0 / (p - 1.0));
    Ok(ConstantChain {
        p,
        lambda1,
        phi1_sup,
        c_prime,
        c_poincare,
        c_weighted,
        k,
    })
}

/// Both sides of `C |∫ v φ1|^p ≤ ∫ |v′|^p φ1` for the sine series
/// `v = Σ_j c_j sin(jπ(x−a)/L)` on `(a, a+L)`.
pub fn weighted_poincare_sides(chain: &ConstantChain, len: f64, coeffs: &[f64]) -> (f64, f64) {
    let w = PI / len;
    let pairing = coeffs.first().copied().unwrap_or(0.0) * len / 2.0;
    let lhs = chain.c_weighted * pairing.abs().powf(chain.p);
    let dv = |x: f64| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let k = (j + 1) as f64 * w;
                c * k * (k * x).cos()
            })
            .sum()
    };
    let gl = gauss_legendre();
    let panels = 8 * coeffs.len().max(1);
    let step = len / panels as f64;
    let rhs = (0..panels)
        .map(|i| {
            let a = i as f64 * step;
            gl.integrate(a, a + step, |x| dv(x).abs().powf(chain.p) * (w * x).sin())
        })
        .sum();
    (lhs, rhs)
}

/// Fuzzes the weighted Poincaré inequality with random sine series of
/// eight modes, `|c_j| ≤ 1/j²`; trial `i` draws from stream `i` of a
/// generator seeded with `seed`.
pub fn randomized_weighted_poincare_test(
    chain: &ConstantChain,
    len: f64,
    trials: usize,
    seed: u64,
) -> Result<CheckResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let margins = (0..trials).map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let coeffs: Vec<f64> = (1..=8)
            .map(|j| rng.gen_range(-1.0..1.0) / (j * j) as f64)
            .collect();
        let (lhs, rhs) = weighted_poincare_sides(chain, len, &coeffs);
        let scale = lhs.max(rhs).max(f64::MIN_POSITIVE);
        (i as f64, (rhs * (1.0 + 1e-6) - lhs) / scale)
    });
    let (worst_t, worst_margin) = margins
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one trial");
    Ok(CheckResult {
        name: "weighted_poincare".into(),
        holds: worst_margin >= 0.0,
        worst_margin,
        worst_t,
        applicable: true,
    })
}
