//! The closed set of named initial-data profiles.

use std::f64::consts::PI;

use blowup_core::field::{Field, Grid1D};
use blowup_core::inequality::constant_chain;
use blowup_core::models::Family;

use crate::config::{InitialSection, ProfileName};

/// Initial data on `grid`; `x` is measured from the left endpoint.
/// `scaled_phi1` with a threshold multiple `m` picks the amplitude with
/// `z(0) = m K`, where `z(0) = ∫ A φ1² = A L/2`.
pub fn initial_field(init: &InitialSection, family: &Family, grid: Grid1D) -> blowup_core::Result<Field> {
    let a = grid.a();
    let len = grid.length();
    let k = init.k.unwrap_or(1.0);
    let amp = init.amplitude.unwrap_or(1.0);
    let field = match *init.profile.get_ref() {
        ProfileName::SinMode => Field::from_fn(grid, |x| amp * (k * (x - a)).sin()),
        ProfileName::CosMode => Field::from_fn(grid, |x| amp * (k * (x - a)).cos()),
        ProfileName::ScaledPhi1 => {
            let amp = match (init.amplitude, init.threshold_multiple, family) {
                (Some(v), _, _) => v,
                (None, Some(m), Family::Vhj { p }) => {
                    let chain = constant_chain(*p, &grid)?;
                    2.0 * m * chain.k / len
                }
                _ => 1.0,
            };
            Field::from_fn(grid, |x| amp * (PI * (x - a) / len).sin())
        }
        ProfileName::LogProfile => {
            let c = init.c.unwrap_or(2.0);
            Field::from_fn(grid, |x| (c + amp * (k * (x - a)).sin()).ln())
        }
        ProfileName::SteepTanh => {
            let w = init.width.unwrap_or(0.1);
            Field::from_fn(grid, |x| amp * ((k * (x - a)).sin() / w).tanh())
        }
    };
    Ok(field)
}
