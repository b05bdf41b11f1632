//! Joint outcome probabilities for sequences of flavor measurements.
//!
//! A meson is prepared in flavor `F` at `t0`; each later measurement asks
//! "is the system in flavor `F`?" and yields `F` or `NotF` (the latter
//! covering both the conjugate flavor and decay products). The analytic
//! tables chain single-interval transition probabilities:
//!
//! ```text
//! P(F, F)       = P_FF(dt1) P_FF(dt2)
//! P(F, NotF)    = P_FF(dt1) (1 - P_FF(dt2))
//! P(NotF, F)    = P_FFbar(dt1) P_FbarF(dt2)
//! P(NotF, NotF) = 1 - P_FF(dt1) - P_FFbar(dt1) P_FbarF(dt2)
//! ```
//!
//! The oracle variants rebuild the same tables from first principles as
//! unnormalized trace chains `Tr[Pi V [Pi V[rho] Pi]]` over the GKLS
//! evolution, with `1 - Pi_F` including the decay-sector projector.

use thiserror::Error;

use crate::gkls::{
    build_generators, gkls_evolve, projector_flavor, projector_not_flavor, ExtendedState, GklsError,
};
use crate::particle::{Flavor, MesonParams, Outcome};
use crate::transition::{oscillation_roundtrip, survival_prob, TransitionError};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MeasurementError {
    #[error(transparent)]
    Transition(#[from] TransitionError),
    #[error(transparent)]
    Gkls(#[from] GklsError),
    #[error("measurement times must be ordered: t0 <= t1 <= t2")]
    UnorderedTimes,
}

/// Joint distribution of two measurement outcomes.
///
/// `dt1` is the gap from preparation to the first measurement, `dt2` the
/// gap between the two measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist2 {
    p: [[f64; 2]; 2],
    pub params: MesonParams,
    pub flavor: Flavor,
    pub dt1: f64,
    pub dt2: f64,
}

impl JointDist2 {
    pub fn prob(&self, o1: Outcome, o2: Outcome) -> f64 {
        self.p[o1.index()][o2.index()]
    }

    /// Marginal over the first outcome.
    pub fn marginal_second(&self, o2: Outcome) -> f64 {
        self.p[0][o2.index()] + self.p[1][o2.index()]
    }

    /// Marginal over the second outcome.
    pub fn marginal_first(&self, o1: Outcome) -> f64 {
        self.p[o1.index()][0] + self.p[o1.index()][1]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    /// `<O1 O2>` under this distribution.
    pub fn correlator(&self) -> f64 {
        Outcome::ALL
            .iter()
            .flat_map(|&a| Outcome::ALL.iter().map(move |&b| (a, b)))
            .map(|(a, b)| a.value() * b.value() * self.prob(a, b))
            .sum()
    }
}

/// Joint distribution of three measurement outcomes at `t0 <= t1 <= t2`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDist3 {
    p: [[[f64; 2]; 2]; 2],
    pub params: MesonParams,
    pub flavor: Flavor,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
}

impl JointDist3 {
    pub fn prob(&self, o0: Outcome, o1: Outcome, o2: Outcome) -> f64 {
        self.p[o0.index()][o1.index()][o2.index()]
    }

    /// Marginal over the first (preparation-confirmation) outcome.
    pub fn marginal_o0(&self, o1: Outcome, o2: Outcome) -> f64 {
        self.p[0][o1.index()][o2.index()] + self.p[1][o1.index()][o2.index()]
    }

    /// Marginal over the middle outcome.
    pub fn marginal_o1(&self, o0: Outcome, o2: Outcome) -> f64 {
        self.p[o0.index()][0][o2.index()] + self.p[o0.index()][1][o2.index()]
    }

    /// Marginal over the final outcome.
    pub fn marginal_o2(&self, o0: Outcome, o1: Outcome) -> f64 {
        self.p[o0.index()][o1.index()][0] + self.p[o0.index()][o1.index()][1]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().flatten().flatten().sum()
    }
}

/// Analytic two-measurement joint distribution.
pub fn joint2(
    params: &MesonParams,
    flavor: Flavor,
    dt1: f64,
    dt2: f64,
) -> Result<JointDist2, MeasurementError> {
    let s1 = survival_prob(params, dt1)?;
    let s2 = survival_prob(params, dt2)?;
    let q = oscillation_roundtrip(params, flavor, dt1, dt2)?;
    let p = [[s1 * s2, s1 * (1.0 - s2)], [q, (1.0 - s1) - q]];
    Ok(JointDist2 {
        p,
        params: params.clone(),
        flavor,
        dt1,
        dt2,
    })
}

/// Analytic three-measurement joint distribution.
///
/// The measurement at `t0` confirms the freshly prepared flavor-`F` state:
/// it yields `F` with probability one and leaves the state unchanged, so
/// the `O0 = F` slice reproduces [`joint2`] over the remaining gaps and the
/// `O0 = NotF` slice is identically zero.
pub fn joint3(
    params: &MesonParams,
    flavor: Flavor,
    t0: f64,
    t1: f64,
    t2: f64,
) -> Result<JointDist3, MeasurementError> {
    if !(t0 <= t1 && t1 <= t2) {
        return Err(MeasurementError::UnorderedTimes);
    }
    let two = joint2(params, flavor, t1 - t0, t2 - t1)?;
    let mut p = [[[0.0; 2]; 2]; 2];
    for o1 in Outcome::ALL {
        for o2 in Outcome::ALL {
            p[0][o1.index()][o2.index()] = two.prob(o1, o2);
        }
    }
    Ok(JointDist3 {
        p,
        params: params.clone(),
        flavor,
        t0,
        t1,
        t2,
    })
}

fn oracle_projectors(flavor: Flavor) -> [(Outcome, crate::gkls::ExtMatrix); 2] {
    [
        (Outcome::F, projector_flavor(flavor)),
        (Outcome::NotF, projector_not_flavor(flavor)),
    ]
}

/// Two-measurement joint distribution from the projective GKLS oracle.
///
/// Evolves `|F><F|` on the extended space, applies the outcome projector,
/// evolves again, and reads each probability as an unnormalized trace.
/// Requires `cp_epsilon = 0`.
pub fn joint2_oracle(
    params: &MesonParams,
    flavor: Flavor,
    dt1: f64,
    dt2: f64,
    step: f64,
) -> Result<JointDist2, MeasurementError> {
    let gen = build_generators(params)?;
    let rho1 = gkls_evolve(&gen, &ExtendedState::pure_flavor(flavor), dt1, step)?;
    let mut p = [[0.0; 2]; 2];
    for (o1, proj1) in oracle_projectors(flavor) {
        let collapsed = rho1.project(&proj1);
        let rho2 = if collapsed.is_zero() {
            collapsed
        } else {
            gkls_evolve(&gen, &collapsed, dt2, step)?
        };
        for (o2, proj2) in oracle_projectors(flavor) {
            p[o1.index()][o2.index()] = rho2.expectation(&proj2);
        }
    }
    Ok(JointDist2 {
        p,
        params: params.clone(),
        flavor,
        dt1,
        dt2,
    })
}

/// Three-measurement joint distribution from the projective GKLS oracle.
///
/// Same trace chain as [`joint2_oracle`] with a third projection stage at
/// `t0`, acting on the freshly prepared state.
pub fn joint3_oracle(
    params: &MesonParams,
    flavor: Flavor,
    t0: f64,
    t1: f64,
    t2: f64,
    step: f64,
) -> Result<JointDist3, MeasurementError> {
    if !(t0 <= t1 && t1 <= t2) {
        return Err(MeasurementError::UnorderedTimes);
    }
    let gen = build_generators(params)?;
    let rho0 = ExtendedState::pure_flavor(flavor);
    let mut p = [[[0.0; 2]; 2]; 2];
    for (o0, proj0) in oracle_projectors(flavor) {
        let prepared = rho0.project(&proj0);
        if prepared.is_zero() {
            continue; // projected branch vanishes; so do all its entries
        }
        let rho1 = gkls_evolve(&gen, &prepared, t1 - t0, step)?;
        for (o1, proj1) in oracle_projectors(flavor) {
            let collapsed = rho1.project(&proj1);
            let rho2 = if collapsed.is_zero() {
                collapsed
            } else {
                gkls_evolve(&gen, &collapsed, t2 - t1, step)?
            };
            for (o2, proj2) in oracle_projectors(flavor) {
                p[o0.index()][o1.index()][o2.index()] = rho2.expectation(&proj2);
            }
        }
    }
    Ok(JointDist3 {
        p,
        params: params.clone(),
        flavor,
        t0,
        t1,
        t2,
    })
}

/// The three two-time correlators of the equidistant protocol
/// `t0 = 0, t1 = t, t2 = 2t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub c01: f64,
    pub c12: f64,
    pub c02: f64,
}

impl CorrelatorSet {
    /// The four Leggett-Garg combinations `1 +/- C01 +/- C12 +/- C02`; each
    /// equals twice the corresponding probability-form inequality value.
    pub fn lgi_combinations(&self) -> [f64; 4] {
        [
            1.0 + self.c01 + self.c12 + self.c02,
            1.0 - self.c01 - self.c12 + self.c02,
            1.0 + self.c01 - self.c12 - self.c02,
            1.0 - self.c01 + self.c12 - self.c02,
        ]
    }
}

/// Correlators of the equidistant three-measurement protocol:
/// `C01 = 2 P_FF(t) - 1`, `C02 = 2 P_FF(2t) - 1`, and
/// `C12 = 1 - 2 P_FF(t)(1 - P_FF(t)) - 2 P_FFbar(t) P_FbarF(t)`.
pub fn correlators(
    params: &MesonParams,
    flavor: Flavor,
    t: f64,
) -> Result<CorrelatorSet, MeasurementError> {
    let s1 = survival_prob(params, t)?;
    let s2 = survival_prob(params, 2.0 * t)?;
    let q = oscillation_roundtrip(params, flavor, t, t)?;
    Ok(CorrelatorSet {
        c01: 2.0 * s1 - 1.0,
        c12: 1.0 - 2.0 * s1 * (1.0 - s1) - 2.0 * q,
        c02: 2.0 * s2 - 1.0,
    })
}
