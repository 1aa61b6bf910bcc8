//! Nonlinearity and nonclassicality of anharmonic oscillator ground states.
//!
//! The crate computes, for the modified harmonic oscillator, the Morse and
//! Pöschl-Teller potentials and a polynomially perturbed oscillator:
//!
//! * the entropic nonlinearity `η_NG = h(√det σ)` of the ground state,
//! * the Wigner negativity volume `δ` and its normalized form `ν = δ/(1+δ)`,
//! * the entanglement potential `ℰ` (entanglement entropy behind a 50:50
//!   beam splitter with a vacuum ancilla),
//! * the quadrature squeezing ratios `r_x`, `r_p`.
//!
//! Units are `ħ = m = 1` and all entropies are in nats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod fock;
pub mod measures;
pub mod oscillators;
pub mod perturb;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod wavefn;
pub mod wigner;

pub use error::{Error, Result};
