//! Macrorealism tests for oscillating, decaying neutral mesons.
//!
//! The crate evaluates the three-time Leggett-Garg inequalities, their
//! Wigner-form variants, and the no-signaling-in-time / arrow-of-time
//! equalities for a two-level system that both oscillates (mass splitting
//! `dm`) and decays (widths `gamma_s`, `gamma_l`). Two independent dynamics
//! backends are provided:
//!
//! * [`transition`]: closed-form Wigner-Weisskopf transition probabilities
//!   (the fast path used by everything downstream), and
//! * [`gkls`]: a trace-preserving GKLS master-equation integrator on the
//!   4-dimensional flavor (+) decay space, used as a numerical oracle for
//!   the analytic formulas and for sequential projective measurements.
//!
//! [`measurement`] combines single-interval probabilities into joint outcome
//! tables for two and three measurement times, [`macrorealism`] turns those
//! into the inequality/equality tests and time scans, and [`significance`]
//! estimates the statistical weight of an observed NSIT violation with a
//! pseudo-experiment Monte Carlo.
//!
//! The crate is `no_std` (with `alloc`); file IO, the CLI, and CSV output
//! live in the companion `mesomr-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod gkls;
pub mod macrorealism;
pub mod measurement;
pub mod particle;
pub mod registry;
pub mod significance;
pub mod transition;

pub use particle::{Flavor, MesonParams, Outcome, ParamError};
pub use registry::{parse_registry, write_registry, RegistryError, DEFAULT_REGISTRY};

/// Shorthand for the complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
