//! Spectra of the perturbed harmonic oscillator `-y'' + x^2 y + q(x) y`.
//!
//! The crate computes reference eigenvalues with a Hermite-Galerkin method and a
//! finite-difference cross-check, evaluates the first-order eigenvalue shift and
//! its Bessel refinements, and implements the Airy/Wronskian machinery behind the
//! turning-point asymptotics (Langer map, Picard iteration, shooting Wronskian).

pub mod asymptotics;
pub mod cli_reporting;
pub mod potential;
pub mod quad;
pub mod quasiclassical_map;
pub mod reference_solver;
pub mod roots;
pub mod special_functions;
pub mod wronskian_engine;

pub use potential::{Potential, PotentialError, TrigSpectrum, TrigTerm};
