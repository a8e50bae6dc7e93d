//! Pinned reproductions E1–E11. Each entry names the claim it checks and
//! the verdict that claim predicts.

use crate::config::{parse_config, Expect};
use crate::ineq::run_inequality_lab;
use crate::runner::{run, LabError, RunOutput};

#[derive(Debug, Clone, Copy)]
pub enum Source {
    /// Built-in config files, run in order.
    Configs(&'static [&'static str]),
    InequalityLab,
}

#[derive(Debug, Clone, Copy)]
pub struct RegistryEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub claim: &'static str,
    pub expect: Expect,
    pub source: Source,
}

pub const REGISTRY: [RegistryEntry; 11] = [
    RegistryEntry {
        id: "E1",
        description: "VHJ p = 2 periodic vs exact Cole-Hopf solution",
        claim: "the quadratic VHJ equation linearizes to the heat equation under u = log v",
        expect: Expect::Completed,
        source: Source::Configs(&[include_str!("../configs/E1.toml")]),
    },
    RegistryEntry {
        id: "E2",
        description: "VHJ p = 4 periodic, gradient maximum principle",
        claim: "periodic solutions are global and analytic; sup |u_x| does not grow",
        expect: Expect::Completed,
        source: Source::Configs(&[include_str!("../configs/E2.toml")]),
    },
    RegistryEntry {
        id: "E3",
        description: "Inequality lab: singular weights, p = 2 counterexample, Poincare fuzz",
        claim: "the weighted Poincare inequality holds for p > 2 and fails for p = 2",
        expect: Expect::Completed,
        source: Source::InequalityLab,
    },
    RegistryEntry {
        id: "E4",
        description: "VHJ p = 4 Dirichlet, data above the threshold K",
        claim: "z(0) > K forces blow-up before T** in a norm other than the sup norm",
        expect: Expect::Blowup,
        source: Source::Configs(&[include_str!("../configs/E4.toml")]),
    },
    RegistryEntry {
        id: "E5",
        description: "Integrated KS, Pokhozhaev BCs, positive mass",
        claim: "m(0) > 0 forces blow-up no later than 2|Omega|/(lambda1 m(0))",
        expect: Expect::Blowup,
        source: Source::Configs(&[include_str!("../configs/E5.toml")]),
    },
    RegistryEntry {
        id: "E6",
        description: "Integrated KS, Neumann-type BCs",
        claim: "solutions are global with |u_x|^2 at most e^t times its initial value",
        expect: Expect::Completed,
        source: Source::Configs(&[include_str!("../configs/E6.toml")]),
    },
    RegistryEntry {
        id: "E7",
        description: "Viscous Burgers, Neumann BCs",
        claim: "the viscous Burgers flow obeys the maximum principle",
        expect: Expect::Completed,
        source: Source::Configs(&[include_str!("../configs/E7.toml")]),
    },
    RegistryEntry {
        id: "E8",
        description: "Hyperviscous Burgers, steep data",
        claim: "higher-order dissipation loses the maximum principle",
        expect: Expect::Completed,
        source: Source::Configs(&[include_str!("../configs/E8.toml")]),
    },
    RegistryEntry {
        id: "E9",
        description: "Riccati-heat blow-up paired with advective Burgers",
        claim: "without advection y(t) blows up before -8/y(0); advection prevents it",
        expect: Expect::Blowup,
        source: Source::Configs(&[
            include_str!("../configs/E9.toml"),
            include_str!("../configs/E9-advection.toml"),
        ]),
    },
    RegistryEntry {
        id: "E10",
        description: "VHJ p = 3 Dirichlet, data above the threshold K",
        claim: "any p > 2 gives gradient blow-up for data above the threshold",
        expect: Expect::Blowup,
        source: Source::Configs(&[include_str!("../configs/E10.toml")]),
    },
    RegistryEntry {
        id: "E11",
        description: "Differentiated KS on a large periodic domain",
        claim: "periodic KS solutions are global and bounded",
        expect: Expect::Completed,
        source: Source::Configs(&[include_str!("../configs/E11.toml")]),
    },
];

pub fn entry(id: &str) -> Result<&'static RegistryEntry, LabError> {
    REGISTRY
        .iter()
        .find(|e| e.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| LabError::UnknownExperiment(id.to_string()))
}

/// `(id, expect, description)` rows.
pub fn list_experiments() -> Vec<(&'static str, Expect, &'static str)> {
    REGISTRY.iter().map(|e| (e.id, e.expect, e.description)).collect()
}

/// Runs a registered experiment. E9 yields two reports: the Riccati run
/// and its advective Burgers partner.
pub fn reproduce(id: &str) -> Result<Vec<RunOutput>, LabError> {
    let e = entry(id)?;
    match e.source {
        Source::InequalityLab => Ok(vec![run_inequality_lab(e.id, e.description)?]),
        Source::Configs(texts) => texts
            .iter()
            .map(|text| run(&parse_config(text)?))
            .collect(),
    }
}
