//! Physical parameters of a neutral-meson species and the two-valued
//! flavor/outcome labels used by the measurement protocol.

use alloc::string::String;

use thiserror::Error;

use crate::C64;

/// Violated parameter invariant, reported by [`MesonParams::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("gamma_mean > 0 violated")]
    GammaMeanPositive,
    #[error("width positivity violated: |gamma_split| must not exceed 2*gamma_mean")]
    WidthPositivity,
    #[error("lifetime_unit > 0 violated")]
    LifetimePositive,
    #[error("|cp_epsilon| < 1 violated")]
    CpEpsilonMagnitude,
    #[error("non-finite parameter value")]
    NonFinite,
}

/// Physical constants of one neutral-meson species.
///
/// Widths and the mass splitting are angular rates in 1/s (`hbar = 1`);
/// `lifetime_unit` is the proper mean lifetime in seconds and is used only
/// to scale the time axis at the interfaces. Absolute masses are not
/// observable here, so the mass basis is fixed to `m_S = 0`, `m_L = dm`.
#[derive(Debug, Clone, PartialEq)]
pub struct MesonParams {
    /// Text label, e.g. `"K0"`.
    pub name: String,
    /// Mean decay width `Gamma = (Gamma_S + Gamma_L) / 2` in 1/s.
    pub gamma_mean: f64,
    /// Width difference `dGamma = Gamma_S - Gamma_L` in 1/s.
    pub gamma_split: f64,
    /// Mass difference `dm = m_L - m_S` in 1/s.
    pub mass_split: f64,
    /// Proper mean lifetime `tau` in seconds (time-axis scale only; stored
    /// independently of the widths).
    pub lifetime_unit: f64,
    /// Complex CP-violation parameter `epsilon`; zero for CP-symmetric
    /// oscillation formulas.
    pub cp_epsilon: C64,
}

impl MesonParams {
    /// Checks every invariant and returns the record unchanged if all hold.
    ///
    /// The first violated invariant is reported by name; validation is
    /// idempotent.
    pub fn validate(self) -> Result<Self, ParamError> {
        if !(self.gamma_mean.is_finite()
            && self.gamma_split.is_finite()
            && self.mass_split.is_finite()
            && self.lifetime_unit.is_finite()
            && self.cp_epsilon.re.is_finite()
            && self.cp_epsilon.im.is_finite())
        {
            return Err(ParamError::NonFinite);
        }
        if self.gamma_mean <= 0.0 {
            return Err(ParamError::GammaMeanPositive);
        }
        if self.gamma_split.abs() > 2.0 * self.gamma_mean {
            return Err(ParamError::WidthPositivity);
        }
        if self.lifetime_unit <= 0.0 {
            return Err(ParamError::LifetimePositive);
        }
        if self.cp_epsilon.norm() >= 1.0 {
            return Err(ParamError::CpEpsilonMagnitude);
        }
        Ok(self)
    }

    /// Component decay widths `(Gamma_S, Gamma_L)` in 1/s.
    ///
    /// Both are non-negative for validated parameters.
    pub fn component_widths(&self) -> (f64, f64) {
        (
            self.gamma_mean + self.gamma_split / 2.0,
            self.gamma_mean - self.gamma_split / 2.0,
        )
    }

    /// Neutral-kaon preset (`K0`).
    pub fn kaon() -> Self {
        MesonParams {
            name: String::from("K0"),
            gamma_mean: 5.5939e9,
            gamma_split: 1.1149e10,
            mass_split: 0.5293e10,
            lifetime_unit: 8.954e-11,
            cp_epsilon: C64::new(0.0, 0.0),
        }
    }

    /// Strange-B-meson preset (`Bs`).
    pub fn b_s() -> Self {
        MesonParams {
            name: String::from("Bs"),
            gamma_mean: 6.615e11,
            gamma_split: 9.14e10,
            mass_split: 1.776e13,
            lifetime_unit: 1.470e-12,
            cp_epsilon: C64::new(0.0, 0.0),
        }
    }
}

/// Flavor label of the prepared or detected state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// The particle flavor state (e.g. `K0`).
    Particle,
    /// The conjugate flavor state (e.g. anti-`K0`).
    Antiparticle,
}

impl Flavor {
    /// The conjugate flavor; an involution.
    pub fn conjugate(self) -> Self {
        match self {
            Flavor::Particle => Flavor::Antiparticle,
            Flavor::Antiparticle => Flavor::Particle,
        }
    }
}

/// Outcome of one dichotomic flavor measurement: the meson is found in the
/// monitored flavor (`F`, observable value +1) or it is not (`NotF`, value
/// -1). `NotF` covers both the conjugate flavor and decayed states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    F,
    NotF,
}

impl Outcome {
    /// Both outcomes, in table-index order.
    pub const ALL: [Outcome; 2] = [Outcome::F, Outcome::NotF];

    /// Numeric value of the dichotomic observable: +1 for `F`, -1 for `NotF`.
    pub fn value(self) -> f64 {
        match self {
            Outcome::F => 1.0,
            Outcome::NotF => -1.0,
        }
    }

    /// Table index: 0 for `F`, 1 for `NotF`.
    pub fn index(self) -> usize {
        match self {
            Outcome::F => 0,
            Outcome::NotF => 1,
        }
    }

    /// The alternative outcome.
    pub fn negate(self) -> Self {
        match self {
            Outcome::F => Outcome::NotF,
            Outcome::NotF => Outcome::F,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kaon_preset_is_valid() {
        let p = MesonParams::kaon().validate().unwrap();
        assert_eq!(p.gamma_mean, 5.5939e9);
        assert_eq!(p.mass_split, 0.5293e10);
        assert_eq!(p.lifetime_unit, 8.954e-11);
    }

    #[test]
    fn component_widths_kaon() {
        let (gs, gl) = MesonParams::kaon().component_widths();
        // Gamma +/- dGamma/2 by hand: 5.5939e9 +/- 5.5745e9.
        assert!((gs - 1.11684e10).abs() / 1.11684e10 < 1e-12);
        assert!((gl - 1.94e7).abs() / 1.94e7 < 1e-9);
        assert!(gs >= 0.0 && gl >= 0.0);
    }

    #[test]
    fn component_widths_degenerate_and_boundary() {
        let mut p = MesonParams::kaon();
        p.gamma_mean = 1.0;
        p.gamma_split = 0.0;
        assert_eq!(p.component_widths(), (1.0, 1.0));
        p.gamma_split = 2.0;
        assert_eq!(p.clone().validate().unwrap().component_widths(), (2.0, 0.0));
    }

    #[test]
    fn validate_reports_first_violation() {
        let mut p = MesonParams::kaon();
        p.gamma_mean = 1.0;
        p.gamma_split = 3.0;
        assert_eq!(p.clone().validate(), Err(ParamError::WidthPositivity));
        p.gamma_mean = 0.0;
        assert_eq!(p.clone().validate(), Err(ParamError::GammaMeanPositive));
        p = MesonParams::kaon();
        p.lifetime_unit = -1.0;
        assert_eq!(p.clone().validate(), Err(ParamError::LifetimePositive));
        p = MesonParams::kaon();
        p.cp_epsilon = C64::new(0.8, 0.7);
        assert_eq!(p.validate(), Err(ParamError::CpEpsilonMagnitude));
    }

    #[test]
    fn validate_is_idempotent() {
        let once = MesonParams::b_s().validate().unwrap();
        let twice = once.clone().validate().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn flavor_conjugation_is_involution() {
        for f in [Flavor::Particle, Flavor::Antiparticle] {
            assert_eq!(f.conjugate().conjugate(), f);
        }
    }

    #[test]
    fn outcome_values() {
        assert_eq!(Outcome::F.value(), 1.0);
        assert_eq!(Outcome::NotF.value(), -1.0);
        assert_eq!(Outcome::F.negate(), Outcome::NotF);
    }
}
