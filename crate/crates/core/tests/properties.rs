use std::f64::consts::PI;

use blowup_core::field::{quadrature, Field, Grid1D};
use blowup_core::integrators::{integrate, BlowupPolicy, StepController};
use blowup_core::models::{rhs, Family, KsConvention, ModelSpec};
use blowup_core::monitors::{analyticity_radius, MonitorKind};
use blowup_core::operators::{derivative, BoundaryCondition, LinearOperator};
use proptest::prelude::*;

fn smooth_periodic(g: Grid1D, c: &[f64]) -> Field {
    Field::from_fn(g, |x| {
        c.iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * x + 0.3 * j as f64).sin())
            .sum()
    })
}

/// Cosine series, which satisfy the Neumann-type closures on `(0, π)`.
fn cosine_series(g: Grid1D, c: &[f64]) -> Field {
    Field::from_fn(g, |x| {
        c.iter()
            .enumerate()
            .map(|(j, a)| a * ((j + 1) as f64 * x).cos())
            .sum()
    })
}

const BOUNDED: [BoundaryCondition; 4] = [
    BoundaryCondition::Dirichlet,
    BoundaryCondition::Neumann,
    BoundaryCondition::NeumannKs,
    BoundaryCondition::PokhozhaevKs,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_linear(
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        c1 in prop::collection::vec(-1.0..1.0f64, 4),
        c2 in prop::collection::vec(-1.0..1.0f64, 4),
        order in 1usize..=4,
    ) {
        let p = Grid1D::periodic(0.0, 2.0 * PI, 32).unwrap();
        let q = Grid1D::bounded(0.0, PI, 40).unwrap();
        let mut cases = vec![(p, BoundaryCondition::Periodic)];
        cases.extend(BOUNDED.iter().map(|&bc| (q, bc)));
        for (g, bc) in cases {
            let f = smooth_periodic(g, &c1);
            let h = smooth_periodic(g, &c2);
            let combo = f.scale(a).axpy(b, &h).unwrap();
            let lhs = derivative(&combo, order, bc).unwrap();
            let rhs = derivative(&f, order, bc).unwrap().scale(a)
                .axpy(b, &derivative(&h, order, bc).unwrap()).unwrap();
            let scale = 1.0 + lhs.sup();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10 * scale, "{bc:?} order {order}");
        }
    }

    #[test]
    fn split_matches_direct_formula(c in prop::collection::vec(-0.5..0.5f64, 5)) {
        let p = Grid1D::periodic(0.0, 2.0 * PI, 64).unwrap();
        let q = Grid1D::bounded(0.0, PI, 64).unwrap();
        let d = |u: &Field, m: usize, bc| derivative(u, m, bc).unwrap();
        let families = [
            (Family::Vhj { p: 3.0 }, 0.0, BoundaryCondition::Periodic, p),
            (Family::KsIntegrated { convention: KsConvention::Standard }, 0.0, BoundaryCondition::Periodic, p),
            (Family::KsIntegrated { convention: KsConvention::Mirrored }, 0.0, BoundaryCondition::NeumannKs, q),
            (Family::KsDifferentiated, 0.0, BoundaryCondition::Periodic, p),
            (Family::ViscousBurgers, 0.2, BoundaryCondition::Periodic, p),
            (Family::ViscousBurgers, 0.2, BoundaryCondition::Neumann, q),
            (Family::HyperviscousBurgers { kappa: 0.5, alpha: 2.0 }, 0.1, BoundaryCondition::Periodic, p),
        ];
        for (family, nu, bc, g) in families {
            let spec = ModelSpec::new(family, nu, bc).unwrap();
            let u = if g.is_periodic() { smooth_periodic(g, &c) } else { cosine_series(g, &c) };
            let got = rhs(&spec, &u).unwrap();
            let ux = d(&u, 1, bc);
            let expect = match family {
                Family::Vhj { p } => d(&u, 2, bc).zip_map(&ux, |a, b| a + b.abs().powf(p)).unwrap(),
                Family::KsIntegrated { convention } => {
                    let s = if convention == KsConvention::Standard { -0.5 } else { 0.5 };
                    d(&u, 4, bc).scale(-1.0).axpy(-1.0, &d(&u, 2, bc)).unwrap()
                        .zip_map(&ux, |a, b| a + s * b * b).unwrap()
                }
                Family::KsDifferentiated => {
                    let uux = u.zip_map(&ux, |a, b| a * b).unwrap();
                    d(&u, 4, bc).scale(-1.0).axpy(-1.0, &d(&u, 2, bc)).unwrap().axpy(-1.0, &uux).unwrap()
                }
                Family::ViscousBurgers => {
                    let uux = u.zip_map(&ux, |a, b| a * b).unwrap();
                    d(&u, 2, bc).scale(nu).axpy(-1.0, &uux).unwrap()
                }
                Family::HyperviscousBurgers { kappa, .. } => {
                    let uux = u.zip_map(&ux, |a, b| a * b).unwrap();
                    // (−Δ)² = ∂⁴
                    d(&u, 4, bc).scale(-kappa).axpy(nu, &d(&u, 2, bc)).unwrap().axpy(-1.0, &uux).unwrap()
                }
                Family::RiccatiHeat => unreachable!(),
            };
            let mut expect = expect;
            bc.enforce(expect.values_mut());
            let scale = 1.0 + expect.sup();
            prop_assert!(got.max_abs_diff(&expect).unwrap() < 1e-12 * scale * 10.0, "{family:?}");
        }
    }

    #[test]
    fn spectral_first_derivative_squared_is_second(c in prop::collection::vec(-1.0..1.0f64, 6)) {
        let g = Grid1D::periodic(0.0, 2.0 * PI, 32).unwrap();
        let f = smooth_periodic(g, &c);
        let d1 = derivative(&f, 1, BoundaryCondition::Periodic).unwrap();
        let d11 = derivative(&d1, 1, BoundaryCondition::Periodic).unwrap();
        let d2 = derivative(&f, 2, BoundaryCondition::Periodic).unwrap();
        prop_assert!(d11.max_abs_diff(&d2).unwrap() < 1e-11);
    }
}

/// `(phase, [(k, a_k)])` for `Σ a_k sin(kx + phase)` compatible with `bc`
/// on `(0, π)`; the Pokhozhaev combination satisfies `Σ a_k (k − k³) = 0`.
fn trig_series(bc: BoundaryCondition) -> (f64, Vec<(f64, f64)>) {
    match bc {
        BoundaryCondition::Dirichlet => (0.0, vec![(1.0, 1.0), (3.0, 0.4)]),
        BoundaryCondition::PokhozhaevKs => (0.0, vec![(1.0, 1.0), (3.0, -0.5), (5.0, 0.1)]),
        _ => (PI / 2.0, vec![(1.0, 1.0), (2.0, 0.3), (3.0, 0.4)]),
    }
}

fn trig_eval(bc: BoundaryCondition, x: f64, m: usize) -> f64 {
    let (phase, terms) = trig_series(bc);
    terms
        .iter()
        .map(|&(k, a)| a * k.powi(m as i32) * (k * x + phase + m as f64 * PI / 2.0).sin())
        .sum()
}

#[test]
fn bounded_closures_converge_at_second_order() {
    for bc in BOUNDED {
        let orders: &[usize] = match bc {
            BoundaryCondition::Dirichlet | BoundaryCondition::Neumann => &[1, 2],
            _ => &[1, 2, 3, 4],
        };
        for &m in orders {
            let err = |n: usize| {
                let g = Grid1D::bounded(0.0, PI, n).unwrap();
                let f = Field::from_fn(g, |x| trig_eval(bc, x, 0));
                let exact = Field::from_fn(g, |x| trig_eval(bc, x, m));
                derivative(&f, m, bc).unwrap().max_abs_diff(&exact).unwrap()
            };
            let (e1, e2) = (err(64), err(128));
            let order = (e1 / e2).log2();
            assert!(order >= 1.9, "{bc:?} D{m}: errors {e1:e} {e2:e}, order {order}");
        }
    }
}

#[test]
fn dirichlet_second_difference_is_symmetric_negative_definite() {
    for n in [8, 16, 33] {
        let g = Grid1D::bounded(0.0, 1.0, n).unwrap();
        let op = LinearOperator::new(g, BoundaryCondition::Dirichlet, [0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let m = op.matrix().unwrap();
        for i in 1..n {
            for j in 1..n {
                assert!((m.get(i, j) - m.get(j, i)).abs() < 1e-9);
            }
        }
        // interior quadratic form −Σ (u_{j+1} − u_j)² / h²
        let u: Vec<f64> = (0..=n).map(|j| if j == 0 || j == n { 0.0 } else { ((j * 7 % 5) as f64) - 2.0 }).collect();
        let au = m.mul_vec(&u);
        let q: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
        assert!(q < 0.0);
    }
}

#[test]
fn trajectories_are_bit_identical() {
    let g = Grid1D::periodic(0.0, 2.0 * PI, 64).unwrap();
    let spec = ModelSpec::new(Family::KsDifferentiated, 0.0, BoundaryCondition::Periodic).unwrap();
    let u0 = smooth_periodic(g, &[0.3, -0.2, 0.1]);
    let run = || {
        integrate(
            &spec,
            &u0,
            2.0,
            StepController::adaptive(1e-3, 2.0),
            &BlowupPolicy::default(),
            &[MonitorKind::Mass, MonitorKind::L2, MonitorKind::KsEnergy],
        )
        .unwrap()
    };
    let (a, sa) = run();
    let (b, sb) = run();
    assert_eq!(a.state.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
               b.state.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    for (x, y) in sa.iter().zip(&sb) {
        assert!(x.rows.iter().zip(&y.rows).all(|(p, q)| p.0.to_bits() == q.0.to_bits() && p.1.to_bits() == q.1.to_bits()));
    }
}

#[test]
fn periodic_burgers_conserves_mass() {
    let g = Grid1D::periodic(0.0, 2.0 * PI, 128).unwrap();
    let spec = ModelSpec::new(Family::ViscousBurgers, 0.05, BoundaryCondition::Periodic).unwrap();
    let u0 = Field::from_fn(g, |x| 0.7 + x.sin() + 0.2 * (2.0 * x).cos());
    let t_end = 5.0;
    let ctrl = StepController::adaptive(1e-3, t_end);
    let (out, series) = integrate(&spec, &u0, t_end, ctrl, &BlowupPolicy::default(), &[MonitorKind::Mass]).unwrap();
    let m0 = quadrature(&u0).unwrap();
    let drift = series[0].values().map(|m| (m - m0).abs()).fold(0.0, f64::max);
    assert!(drift <= ctrl.rtol * t_end * m0.abs(), "drift {drift:e}");
    assert!((quadrature(&out.state).unwrap() - m0).abs() <= ctrl.rtol * t_end * m0.abs());
}

#[test]
fn analyticity_radius_recovers_synthetic_decay() {
    for (n, sigma) in [(64, 0.5), (128, 0.5), (128, 0.3), (256, 0.2)] {
        let g = Grid1D::periodic(0.0, 2.0 * PI, n).unwrap();
        let u = Field::from_fn(g, |x| {
            (1..n / 2).map(|k| (-sigma * k as f64).exp() * (k as f64 * x + 0.1 * k as f64).cos()).sum()
        });
        let r = analyticity_radius(&u).unwrap();
        assert!((r - sigma).abs() < 0.05 * sigma, "n {n} sigma {sigma}: {r}");
    }
}
