//! Damped, driven discrete nonlinear Schrödinger lattices.
//!
//! The crate integrates ψ' = −iκAψ − γψ − iF(|ψ|²)ψ − ig⁽¹⁾(t) − ig⁽²⁾(t)ψ on
//! a finite window of ℤ and checks the dissipative estimates this system
//! satisfies: the energy inequality, absorbing balls, uniform tail decay,
//! contraction near the attractor, continuity in the driving, and a unique
//! periodic breather under strong damping.

pub mod breather;
pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod driving;
pub mod error;
pub mod init;
pub mod integrator;
pub mod lattice;
pub mod model;
pub mod nonlinearity;
pub mod output;
pub mod scenario;
pub mod sum;

pub use error::{Error, Result};
