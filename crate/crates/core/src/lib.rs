//! Numerical simulator for continuous-variable quantum teleportation over
//! a two-mode squeezed vacuum resource.
//!
//! The resource √(1−λ²) Σ λⁿ |n⟩|n⟩ (λ = tanh r) is entangled two ways at
//! once — its joint quadratures are squeezed, and its photon numbers are
//! perfectly correlated — and each kind of correlation supports its own
//! teleportation protocol:
//!
//! * [`quad`] measures joint quadratures and repairs the output with
//!   phase-space displacements, on a position-grid wavefunction
//!   representation;
//! * [`numphase`] measures the photon-number difference and the canonical
//!   phase sum, and repairs the output with a phase rotation and a number
//!   displacement.
//!
//! [`fock`] supplies truncated Fock-space linear algebra, [`resource`]
//! builds the shared state two independent ways and exposes its
//! entanglement diagnostics, and [`analytics`] carries the closed forms
//! every numerical result is cross-checked against.

pub mod analytics;
pub mod error;
pub mod fock;
pub mod numphase;
pub mod quad;
pub mod resource;

pub use error::{Error, Result};
