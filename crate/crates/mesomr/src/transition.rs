//! Closed-form Wigner-Weisskopf transition probabilities and amplitudes.
//!
//! All formulas are evaluated in the dimensionless variables `x = Gamma*dt`,
//! `y = dGamma*dt`, `z = dm*dt`. The decaying-cosh combination is expanded
//! as `e^{-x} cosh(y/2) = (e^{-(x - y/2)} + e^{-(x + y/2)})/2`, which never
//! overflows because `|y|/2 <= x` for validated parameters; this keeps the
//! formulas usable out to times where only the long-lived component is left.

// f64 math comes from libm in no_std builds; under test the std inherent
// methods shadow the trait, leaving the import formally unused.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use thiserror::Error;

use crate::particle::{Flavor, MesonParams};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TransitionError {
    #[error("negative time gap: {0}")]
    NegativeTime(f64),
    #[error("amplitude evolution requires cp_epsilon = 0")]
    CpViolatingAmplitudes,
}

/// `e^{-x} cosh(y/2)` in overflow-free form, `x >= |y|/2 >= 0`.
fn decayed_cosh(x: f64, half_y: f64) -> f64 {
    0.5 * ((-(x - half_y)).exp() + (-(x + half_y)).exp())
}

/// `cosh(a) - cos(z)` with a series guard against cancellation near zero.
///
/// For `|a|, |z| < 1e-4` the direct difference loses up to half the
/// significant digits; the quartic series is exact to O(1e-27) there and
/// returns exactly zero at `a = z = 0`.
fn cosh_minus_cos(a: f64, z: f64) -> f64 {
    if a.abs() < 1e-4 && z.abs() < 1e-4 {
        let a2 = a * a;
        let z2 = z * z;
        (a2 + z2) / 2.0 + (a2 * a2 - z2 * z2) / 24.0
    } else {
        a.cosh() - z.cos()
    }
}

fn check_dt(dt: f64) -> Result<(), TransitionError> {
    if dt < 0.0 || !dt.is_finite() {
        return Err(TransitionError::NegativeTime(dt));
    }
    Ok(())
}

/// Probability that a meson prepared in either flavor is detected in the
/// same flavor after `dt` seconds.
///
/// `(e^{-Gamma dt}/2) (cosh(dGamma dt/2) + cos(dm dt))`; independent of the
/// prepared flavor and of `cp_epsilon`. The value lies in `[0, 1]`.
pub fn survival_prob(params: &MesonParams, dt: f64) -> Result<f64, TransitionError> {
    check_dt(dt)?;
    let x = params.gamma_mean * dt;
    let half_y = params.gamma_split * dt / 2.0;
    let z = params.mass_split * dt;
    Ok(0.5 * (decayed_cosh(x, half_y) + (-x).exp() * z.cos()))
}

/// Probability that a meson prepared in flavor `from` is detected in the
/// conjugate flavor after `dt` seconds.
///
/// `(e^{-Gamma dt}/2) r (cosh(dGamma dt/2) - cos(dm dt))` with the CP
/// asymmetry `r = |1-eps|/|1+eps|` for `Particle -> Antiparticle` and its
/// inverse for the reverse direction; the product of the two directions is
/// independent of `eps`. The value is non-negative and exactly zero at
/// `dt = 0`.
pub fn oscillation_prob(
    params: &MesonParams,
    from: Flavor,
    dt: f64,
) -> Result<f64, TransitionError> {
    check_dt(dt)?;
    let x = params.gamma_mean * dt;
    let half_y = params.gamma_split * dt / 2.0;
    let z = params.mass_split * dt;
    // cosh(y/2) - cos(z) rescaled by the decay envelope; for arguments past
    // the series guard split the cosh into its stable exponentials.
    let envelope_diff = if half_y.abs() < 1e-4 && z.abs() < 1e-4 {
        (-x).exp() * cosh_minus_cos(half_y, z)
    } else {
        decayed_cosh(x, half_y) - (-x).exp() * z.cos()
    };
    let eps = params.cp_epsilon;
    let plus = (C64::new(1.0, 0.0) + eps).norm();
    let minus = (C64::new(1.0, 0.0) - eps).norm();
    let ratio = match from {
        Flavor::Particle => minus / plus,
        Flavor::Antiparticle => plus / minus,
    };
    Ok((0.5 * ratio * envelope_diff).max(0.0))
}

/// The epsilon-free combination `P_{F->Fbar}(dt1) * P_{Fbar->F}(dt2)`.
///
/// This is the only way oscillation probabilities enter the macrorealism
/// tests; the CP asymmetry factors cancel between the two directions.
pub fn oscillation_roundtrip(
    params: &MesonParams,
    from: Flavor,
    dt1: f64,
    dt2: f64,
) -> Result<f64, TransitionError> {
    let fwd = oscillation_prob(params, from, dt1)?;
    let bwd = oscillation_prob(params, from.conjugate(), dt2)?;
    Ok(fwd * bwd)
}

/// Mass-basis amplitudes `(f_S, f_L)` of an evolved flavor state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    /// Coefficient of the short-lived eigenstate.
    pub short: C64,
    /// Coefficient of the long-lived eigenstate.
    pub long: C64,
}

impl Amplitudes {
    /// Detection probability `|<flavor|psi>|^2` of the state these
    /// amplitudes describe.
    pub fn detect(&self, flavor: Flavor) -> f64 {
        let amp = match flavor {
            Flavor::Particle => {
                (self.short + self.long) * C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0)
            }
            Flavor::Antiparticle => {
                (self.short - self.long) * C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0)
            }
        };
        amp.norm_sqr()
    }

    /// Remaining norm `|f_S|^2 + |f_L|^2`; decay only removes norm.
    pub fn norm_sqr(&self) -> f64 {
        self.short.norm_sqr() + self.long.norm_sqr()
    }
}

/// Evolved mass-basis amplitudes of a flavor state prepared `dt` seconds ago.
///
/// `f_i = <psi_0|K_i> e^{-(i m_i + Gamma_i/2) dt}` with `m_S = 0`,
/// `m_L = dm`, and real flavor superpositions
/// `|particle> = (|K_S> + |K_L>)/sqrt(2)`,
/// `|antiparticle> = (|K_S> - |K_L>)/sqrt(2)`.
/// Implemented for the CP-symmetric case only (`cp_epsilon = 0`).
pub fn wwa_amplitudes(
    params: &MesonParams,
    initial: Flavor,
    dt: f64,
) -> Result<Amplitudes, TransitionError> {
    check_dt(dt)?;
    if params.cp_epsilon != C64::new(0.0, 0.0) {
        return Err(TransitionError::CpViolatingAmplitudes);
    }
    let (gamma_s, gamma_l) = params.component_widths();
    let overlap = core::f64::consts::FRAC_1_SQRT_2;
    let (c_s, c_l) = match initial {
        Flavor::Particle => (overlap, overlap),
        Flavor::Antiparticle => (overlap, -overlap),
    };
    let short = C64::new(c_s, 0.0) * C64::new(-gamma_s * dt / 2.0, 0.0).exp();
    let long = C64::new(c_l, 0.0) * C64::new(-gamma_l * dt / 2.0, -params.mass_split * dt).exp();
    Ok(Amplitudes { short, long })
}
