//! Numerical laboratory for boundary-condition-dependent blow-up in 1D
//! model PDEs: viscous Hamilton-Jacobi, Kuramoto-Sivashinsky, viscous and
//! hyperviscous Burgers, and the Riccati-heat equation.

pub mod error;
pub mod field;
pub mod inequality;
pub mod integrators;
pub mod models;
pub mod monitors;
pub mod operators;

pub use error::{Error, Result};
