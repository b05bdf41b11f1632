//! Macrorealism tests: Leggett-Garg inequalities, their Wigner form, and
//! the no-signaling-in-time / arrow-of-time equalities, plus time-grid
//! scans over all of them.
//!
//! Everything is evaluated for the equidistant protocol `t0 = 0, t1 = t,
//! t2 = 2t` with the prepared flavor fixed as the monitored observable.
//! Wigner-form and NSIT/AoT conditions fix the outcomes `O0 = F,
//! O1 = NotF, O2 = NotF` except where an outcome is summed over; the
//! assignment is exposed as a parameter for exploration but defaults to
//! that choice.

use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::measurement::{correlators, joint2, joint3, CorrelatorSet, MeasurementError};
use crate::particle::{Flavor, MesonParams, Outcome};
use crate::transition::{oscillation_roundtrip, survival_prob};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MacroError {
    #[error(transparent)]
    Measurement(#[from] MeasurementError),
    #[error(transparent)]
    Transition(#[from] crate::transition::TransitionError),
    #[error("invalid grid: need 0 <= t_min < t_max and at least two points")]
    InvalidGrid,
    #[error("unknown quantity name '{0}'")]
    UnknownQuantity(String),
    #[error("no violation direction defined for quantity '{0}'")]
    NoViolationRule(&'static str),
}

/// Fixed outcome assignment for the Wigner-form and NSIT/AoT conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeAssignment {
    pub o0: Outcome,
    pub o1: Outcome,
    pub o2: Outcome,
}

impl Default for OutcomeAssignment {
    /// `O0 = F`, `O1 = NotF`, `O2 = NotF`.
    fn default() -> Self {
        OutcomeAssignment {
            o0: Outcome::F,
            o1: Outcome::NotF,
            o2: Outcome::NotF,
        }
    }
}

/// All test values at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroReport {
    /// Time of the first gap (seconds); measurements at `t` and `2t`.
    pub t: f64,
    /// Probability-form Leggett-Garg values `L1..L4`; macrorealism requires
    /// each `>= 0`.
    pub lgi: [f64; 4],
    /// Wigner-form values `W1..W3`; macrorealism requires each `<= 0`.
    /// `W1` and `W3` coincide identically.
    pub wlgi: [f64; 3],
    /// The single nontrivial NSIT combination
    /// `N(t) = P_FF(2t) - P_FF(t)^2 - P_FFbar(t) P_FbarF(t)`.
    pub nsit_n: f64,
    /// Left-minus-right residuals of the three NSIT equalities; the first
    /// equals `-N(t)`, the other two vanish.
    pub nsit_residuals: [f64; 3],
    /// Left-minus-right residuals of the three AoT equalities; all vanish.
    pub aot_residuals: [f64; 3],
}

/// The four probability-form Leggett-Garg values at the equidistant
/// protocol time `t`.
///
/// `L1 = P_FF(2t) + P_FF(t)^2 - q`, `L2 = P_FF(2t) - P_FF(t)^2 + q`,
/// `L3 = -P_FF(2t) - P_FF(t)^2 + 2 P_FF(t) + q`,
/// `L4 = -P_FF(2t) + P_FF(t)^2 + 2(1 - P_FF(t)) - q`,
/// with `q = P_FFbar(t) P_FbarF(t)`. Each combination equals half of the
/// corresponding correlator form `1 +/- C01 +/- C12 +/- C02`.
pub fn lgi_values(params: &MesonParams, flavor: Flavor, t: f64) -> Result<[f64; 4], MacroError> {
    let s1 = survival_prob(params, t)?;
    let s2 = survival_prob(params, 2.0 * t)?;
    let q = oscillation_roundtrip(params, flavor, t, t)?;
    Ok([
        s2 + s1 * s1 - q,
        s2 - s1 * s1 + q,
        -s2 - s1 * s1 + 2.0 * s1 + q,
        -s2 + s1 * s1 + 2.0 * (1.0 - s1) - q,
    ])
}

/// The three Wigner-form values at the equidistant protocol time `t`,
/// evaluated from the two-time tables of the pairs `(t1,t2)`, `(t0,t1)`,
/// and `(t0,t2)` with the fixed outcome assignment.
///
/// With the default assignment they reduce to
/// `W1 = W3 = P_FF(2t) - P_FF(t) - q` and `W2 = q - P_FF(2t)`.
pub fn wlgi_values_with(
    params: &MesonParams,
    flavor: Flavor,
    t: f64,
    outcomes: OutcomeAssignment,
) -> Result<[f64; 3], MacroError> {
    let OutcomeAssignment { o0, o1, o2 } = outcomes;
    let pair_12 = joint2(params, flavor, t, t)?; // measurements at t1, t2
    let pair_01 = joint2(params, flavor, 0.0, t)?; // measurements at t0, t1
    let pair_02 = joint2(params, flavor, 0.0, 2.0 * t)?; // measurements at t0, t2
    let w1 = pair_12.prob(o1, o2) - pair_01.prob(o0.negate(), o1) - pair_02.prob(o0, o2);
    let w2 = pair_02.prob(o0, o2) - pair_01.prob(o0, o1.negate()) - pair_12.prob(o1, o2);
    let w3 = pair_01.prob(o0, o1) - pair_12.prob(o1, o2.negate()) - pair_02.prob(o0, o2);
    Ok([w1, w2, w3])
}

/// [`wlgi_values_with`] at the default outcome assignment.
pub fn wlgi_values(params: &MesonParams, flavor: Flavor, t: f64) -> Result<[f64; 3], MacroError> {
    wlgi_values_with(params, flavor, t, OutcomeAssignment::default())
}

/// The NSIT combination `N(t) = P_FF(2t) - P_FF(t)^2 - P_FFbar(t) P_FbarF(t)`;
/// the statistics admit a macrorealist description at `t` iff it vanishes.
pub fn nsit_value(params: &MesonParams, flavor: Flavor, t: f64) -> Result<f64, MacroError> {
    let s1 = survival_prob(params, t)?;
    let s2 = survival_prob(params, 2.0 * t)?;
    let q = oscillation_roundtrip(params, flavor, t, t)?;
    Ok(s2 - s1 * s1 - q)
}

/// Left-minus-right residuals of the three NSIT equalities with the fixed
/// outcome assignment (summed outcomes marginalized).
///
/// * `NSIT(1)`: single-measurement `P(O2)` at `2t` against the O1-marginal
///   of the two-time table; the residual equals `-N(t)` (the `NotF`
///   complement flips the sign) and is the unique nontrivial condition.
/// * `NSIT(2)`: the `(t0, t2)` pair statistics of the full three-event
///   protocol (the sure-fire `O0` combined with the O1-marginal of the
///   `(t1, t2)` table) against the O1-sum of the three-time table. With
///   the deterministic confirmation at `t0` this repeats `NSIT(1)` rather
///   than adding a condition, so the residual vanishes.
/// * `NSIT(3)`: the `(t1, t2)` table against the O0-sum of the three-time
///   table; the preparation-confirming measurement does not disturb, so
///   the residual vanishes.
pub fn nsit_residuals_with(
    params: &MesonParams,
    flavor: Flavor,
    t: f64,
    outcomes: OutcomeAssignment,
) -> Result<[f64; 3], MacroError> {
    let OutcomeAssignment { o0, o1, o2 } = outcomes;
    let pair_12 = joint2(params, flavor, t, t)?;
    let three = joint3(params, flavor, 0.0, t, 2.0 * t)?;

    let single_o2 = single_time_prob(params, 2.0 * t, o2)?;
    let r1 = single_o2 - pair_12.marginal_second(o2);

    let sure_o0 = if o0 == Outcome::F { 1.0 } else { 0.0 };
    let r2 = sure_o0 * pair_12.marginal_second(o2) - three.marginal_o1(o0, o2);

    let r3 = pair_12.prob(o1, o2) - three.marginal_o0(o1, o2);

    Ok([r1, r2, r3])
}

/// [`nsit_residuals_with`] at the default outcome assignment.
pub fn nsit_residuals(
    params: &MesonParams,
    flavor: Flavor,
    t: f64,
) -> Result<[f64; 3], MacroError> {
    nsit_residuals_with(params, flavor, t, OutcomeAssignment::default())
}

/// Left-minus-right residuals of the three AoT equalities with the fixed
/// outcome assignment; computed from the joint tables (never hard-coded)
/// and all vanishing, since marginalizing the latest measurement always
/// recovers the shorter protocol.
pub fn aot_residuals_with(
    params: &MesonParams,
    flavor: Flavor,
    t: f64,
    outcomes: OutcomeAssignment,
) -> Result<[f64; 3], MacroError> {
    let OutcomeAssignment { o0, o1, o2: _ } = outcomes;
    let pair_01 = joint2(params, flavor, 0.0, t)?;
    let pair_12 = joint2(params, flavor, t, t)?;
    let three = joint3(params, flavor, 0.0, t, 2.0 * t)?;

    // AoT(1): P(O0, O1) vs the O2-sum of the three-time table.
    let r1 = pair_01.prob(o0, o1) - three.marginal_o2(o0, o1);
    // AoT(2): P(O0) vs the O1-sum of the (t0, t1) table.
    let sure_o0 = if o0 == Outcome::F { 1.0 } else { 0.0 };
    let r2 = sure_o0 - pair_01.marginal_first(o0);
    // AoT(3): P(O1) vs the O2-sum of the (t1, t2) table.
    let r3 = single_time_prob(params, t, o1)? - pair_12.marginal_first(o1);

    Ok([r1, r2, r3])
}

/// [`aot_residuals_with`] at the default outcome assignment.
pub fn aot_residuals(params: &MesonParams, flavor: Flavor, t: f64) -> Result<[f64; 3], MacroError> {
    aot_residuals_with(params, flavor, t, OutcomeAssignment::default())
}

/// Distribution of a single flavor measurement after `dt` seconds.
fn single_time_prob(params: &MesonParams, dt: f64, outcome: Outcome) -> Result<f64, MacroError> {
    let s = survival_prob(params, dt)?;
    Ok(match outcome {
        Outcome::F => s,
        Outcome::NotF => 1.0 - s,
    })
}

/// Computes the full [`MacroReport`] at one time point.
pub fn report(params: &MesonParams, flavor: Flavor, t: f64) -> Result<MacroReport, MacroError> {
    Ok(MacroReport {
        t,
        lgi: lgi_values(params, flavor, t)?,
        wlgi: wlgi_values(params, flavor, t)?,
        nsit_n: nsit_value(params, flavor, t)?,
        nsit_residuals: nsit_residuals(params, flavor, t)?,
        aot_residuals: aot_residuals(params, flavor, t)?,
    })
}

/// Correlator set of the same protocol, for factor-2 consistency checks
/// against the probability-form values.
pub fn protocol_correlators(
    params: &MesonParams,
    flavor: Flavor,
    t: f64,
) -> Result<CorrelatorSet, MacroError> {
    Ok(correlators(params, flavor, t)?)
}

/// One scanned quantity of a [`MacroReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    L1,
    L2,
    L3,
    L4,
    W1,
    W2,
    W3,
    N,
    Nsit1Resid,
    Nsit2Resid,
    Nsit3Resid,
    Aot1Resid,
    Aot2Resid,
    Aot3Resid,
}

impl Quantity {
    pub const ALL: [Quantity; 14] = [
        Quantity::L1,
        Quantity::L2,
        Quantity::L3,
        Quantity::L4,
        Quantity::W1,
        Quantity::W2,
        Quantity::W3,
        Quantity::N,
        Quantity::Nsit1Resid,
        Quantity::Nsit2Resid,
        Quantity::Nsit3Resid,
        Quantity::Aot1Resid,
        Quantity::Aot2Resid,
        Quantity::Aot3Resid,
    ];

    /// Stable column/flag name.
    pub fn name(self) -> &'static str {
        match self {
            Quantity::L1 => "L1",
            Quantity::L2 => "L2",
            Quantity::L3 => "L3",
            Quantity::L4 => "L4",
            Quantity::W1 => "W1",
            Quantity::W2 => "W2",
            Quantity::W3 => "W3",
            Quantity::N => "N",
            Quantity::Nsit1Resid => "nsit1_resid",
            Quantity::Nsit2Resid => "nsit2_resid",
            Quantity::Nsit3Resid => "nsit3_resid",
            Quantity::Aot1Resid => "aot1_resid",
            Quantity::Aot2Resid => "aot2_resid",
            Quantity::Aot3Resid => "aot3_resid",
        }
    }

    pub fn from_name(name: &str) -> Result<Quantity, MacroError> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == name)
            .ok_or_else(|| MacroError::UnknownQuantity(String::from(name)))
    }

    /// Extracts this quantity from a report.
    pub fn extract(self, r: &MacroReport) -> f64 {
        match self {
            Quantity::L1 => r.lgi[0],
            Quantity::L2 => r.lgi[1],
            Quantity::L3 => r.lgi[2],
            Quantity::L4 => r.lgi[3],
            Quantity::W1 => r.wlgi[0],
            Quantity::W2 => r.wlgi[1],
            Quantity::W3 => r.wlgi[2],
            Quantity::N => r.nsit_n,
            Quantity::Nsit1Resid => r.nsit_residuals[0],
            Quantity::Nsit2Resid => r.nsit_residuals[1],
            Quantity::Nsit3Resid => r.nsit_residuals[2],
            Quantity::Aot1Resid => r.aot_residuals[0],
            Quantity::Aot2Resid => r.aot_residuals[1],
            Quantity::Aot3Resid => r.aot_residuals[2],
        }
    }

    /// Whether `value` violates macrorealism for this quantity at the given
    /// threshold: `L* < -threshold`, `W* > threshold`, `|N| > threshold`.
    /// Residual quantities carry no violation direction.
    fn violates(self, value: f64, threshold: f64) -> Result<bool, MacroError> {
        match self {
            Quantity::L1 | Quantity::L2 | Quantity::L3 | Quantity::L4 => Ok(value < -threshold),
            Quantity::W1 | Quantity::W2 | Quantity::W3 => Ok(value > threshold),
            Quantity::N => Ok(value.abs() > threshold),
            other => Err(MacroError::NoViolationRule(other.name())),
        }
    }
}

/// Extrema of one quantity over a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantityStats {
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
    pub argmax: f64,
}

/// Per-quantity extrema of a [`ScanSeries`], in [`Quantity::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSummary {
    stats: [QuantityStats; 14],
}

impl ScanSummary {
    pub fn get(&self, q: Quantity) -> QuantityStats {
        self.stats[q as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Quantity, QuantityStats)> + '_ {
        Quantity::ALL.into_iter().map(move |q| (q, self.get(q)))
    }
}

/// Macrorealism reports over a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSeries {
    pub grid: Vec<f64>,
    pub reports: Vec<MacroReport>,
    pub summary: ScanSummary,
}

/// Evaluates the full report on a uniform grid of `n_points` times from
/// `t_min` to `t_max` inclusive.
pub fn scan(
    params: &MesonParams,
    flavor: Flavor,
    t_min: f64,
    t_max: f64,
    n_points: usize,
) -> Result<ScanSeries, MacroError> {
    if !(t_min >= 0.0 && t_min < t_max && t_min.is_finite() && t_max.is_finite() && n_points >= 2) {
        return Err(MacroError::InvalidGrid);
    }
    let step = (t_max - t_min) / (n_points - 1) as f64;
    let mut grid = Vec::with_capacity(n_points);
    let mut reports = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let t = if i + 1 == n_points {
            t_max
        } else {
            t_min + step * i as f64
        };
        grid.push(t);
        reports.push(report(params, flavor, t)?);
    }
    let summary = summarize(&grid, &reports);
    Ok(ScanSeries {
        grid,
        reports,
        summary,
    })
}

fn summarize(grid: &[f64], reports: &[MacroReport]) -> ScanSummary {
    let mut stats = [QuantityStats {
        min: f64::INFINITY,
        argmin: f64::NAN,
        max: f64::NEG_INFINITY,
        argmax: f64::NAN,
    }; 14];
    for (t, r) in grid.iter().zip(reports) {
        for q in Quantity::ALL {
            let v = q.extract(r);
            let s = &mut stats[q as usize];
            if v < s.min {
                s.min = v;
                s.argmin = *t;
            }
            if v > s.max {
                s.max = v;
                s.argmax = *t;
            }
        }
    }
    ScanSummary { stats }
}

/// Maximal runs of consecutive grid points where `quantity` is in violation
/// at the given threshold, reported as closed `(t_lo, t_hi)` intervals of
/// grid values.
pub fn violation_intervals(
    series: &ScanSeries,
    quantity: Quantity,
    threshold: f64,
) -> Result<Vec<(f64, f64)>, MacroError> {
    let mut intervals = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for (t, r) in series.grid.iter().zip(&series.reports) {
        if quantity.violates(quantity.extract(r), threshold)? {
            open = match open {
                None => Some((*t, *t)),
                Some((lo, _)) => Some((lo, *t)),
            };
        } else if let Some(run) = open.take() {
            intervals.push(run);
        }
    }
    if let Some(run) = open {
        intervals.push(run);
    }
    Ok(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particle::MesonParams;
    use crate::C64;
    use approx::assert_abs_diff_eq;

    fn kaon() -> MesonParams {
        MesonParams::kaon()
    }

    fn bs() -> MesonParams {
        MesonParams::b_s()
    }

    #[test]
    fn lgi_at_zero() {
        // At t = 0 the correlator identities force L = (2, 0, 0, 0): with
        // C01 = C12 = C02 = 1 the combinations 1 +/- C +/- C +/- C are
        // (4, 0, 0, 0), and each L is half of its combination.
        let l = lgi_values(&kaon(), Flavor::Particle, 0.0).unwrap();
        assert_eq!(l, [2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn lgi_at_tau_frozen() {
        let l = lgi_values(&kaon(), Flavor::Particle, kaon().lifetime_unit).unwrap();
        assert_abs_diff_eq!(l[0], 0.7584041550, epsilon = 1e-9);
        assert_abs_diff_eq!(l[1], 0.0217764579, epsilon = 1e-9);
        assert_abs_diff_eq!(l[2], 0.4638692014, epsilon = 1e-9);
        assert_abs_diff_eq!(l[3], 0.7559501857, epsilon = 1e-9);
    }

    #[test]
    fn wlgi_at_zero_and_tau() {
        let w = wlgi_values(&kaon(), Flavor::Particle, 0.0).unwrap();
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1], -1.0);
        assert_eq!(w[2], 0.0);

        let w = wlgi_values(&kaon(), Flavor::Particle, kaon().lifetime_unit).unwrap();
        assert_abs_diff_eq!(w[0], -0.2262205627, epsilon = 1e-9);
        assert_abs_diff_eq!(w[1], -0.3849161155, epsilon = 1e-9);
    }

    #[test]
    fn w1_equals_w3_exactly() {
        for params in [kaon(), bs()] {
            let tau = params.lifetime_unit;
            for k in 0..200 {
                let w = wlgi_values(&params, Flavor::Particle, k as f64 * tau / 17.0).unwrap();
                assert_eq!(w[0].to_bits(), w[2].to_bits(), "W1 != W3 at k = {k}");
            }
        }
    }

    #[test]
    fn nsit_trivial_points() {
        assert_eq!(nsit_value(&kaon(), Flavor::Particle, 0.0).unwrap(), 0.0);
        let tau = kaon().lifetime_unit;
        // Frozen oracle value at tau.
        let n = nsit_value(&kaon(), Flavor::Particle, tau).unwrap();
        assert_abs_diff_eq!(n, 0.011428076106, epsilon = 1e-9);
        // The kaon's long-lived component keeps N sizeable for hundreds of
        // short-lifetime units: N ~ (e^{-Gamma_L t} - e^{-Gamma_S t})^2 / 8.
        let n60 = nsit_value(&kaon(), Flavor::Particle, 60.0 * tau).unwrap();
        assert_abs_diff_eq!(n60, 0.1014803, epsilon = 1e-6);
        // The true t -> infinity decay scale is 1/Gamma_L ~ 574 tau.
        let far = nsit_value(&kaon(), Flavor::Particle, 5000.0 * tau).unwrap();
        assert!(far.abs() < 1e-7, "N(5000 tau) = {far}");
        // For Bs both widths are comparable, so 60 lifetimes suffice.
        let bs_far = nsit_value(&bs(), Flavor::Particle, 60.0 * bs().lifetime_unit).unwrap();
        assert!(bs_far.abs() < 1e-7, "N_Bs(60 tau) = {bs_far}");
    }

    #[test]
    fn nsit_matches_closed_form() {
        // Independent route: N(t) = e^{-2 Gamma t} (sinh^2(dG t/2) - sin^2(dm t))/2,
        // evaluated in overflow-free form.
        for params in [kaon(), bs()] {
            let tau = params.lifetime_unit;
            let (gs, gl) = params.component_widths();
            for k in 0..=100 {
                let t = k as f64 * tau / 5.0;
                let a = (-gl * t).exp() - (-gs * t).exp();
                let osc =
                    (-2.0 * params.gamma_mean * t).exp() * (params.mass_split * t).sin().powi(2);
                let closed = a * a / 8.0 - osc / 2.0;
                let n = nsit_value(&params, Flavor::Particle, t).unwrap();
                assert_abs_diff_eq!(n, closed, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn nsit_residual_structure() {
        let tau = kaon().lifetime_unit;
        let r0 = nsit_residuals(&kaon(), Flavor::Particle, 0.0).unwrap();
        assert_eq!(r0, [0.0, 0.0, 0.0]);

        let r = nsit_residuals(&kaon(), Flavor::Particle, tau).unwrap();
        assert_abs_diff_eq!(r[0], -0.011428076106, epsilon = 1e-9);
        assert!(r[1].abs() <= 1e-12 && r[2].abs() <= 1e-12);

        for k in 0..100 {
            let t = k as f64 * tau / 7.0;
            let r = nsit_residuals(&kaon(), Flavor::Particle, t).unwrap();
            let n = nsit_value(&kaon(), Flavor::Particle, t).unwrap();
            assert_abs_diff_eq!(r[0] + n, 0.0, epsilon = 1e-14);
            assert!(r[1].abs() <= 1e-12 && r[2].abs() <= 1e-12);
        }
    }

    #[test]
    fn aot_residuals_vanish_for_both_species() {
        for params in [kaon(), bs()] {
            let tau = params.lifetime_unit;
            for k in 0..100 {
                let r = aot_residuals(&params, Flavor::Particle, k as f64 * tau / 9.0).unwrap();
                for v in r {
                    assert!(v.abs() <= 1e-12, "{}: {v}", params.name);
                }
            }
        }
    }

    #[test]
    fn factor_two_identity_between_forms() {
        let tau = kaon().lifetime_unit;
        for k in 0..100 {
            let t = k as f64 * tau / 8.0 + 1e-3 * tau;
            let l = lgi_values(&kaon(), Flavor::Particle, t).unwrap();
            let c = protocol_correlators(&kaon(), Flavor::Particle, t).unwrap();
            for (combo, li) in c.lgi_combinations().iter().zip(l) {
                assert_abs_diff_eq!(*combo, 2.0 * li, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn reports_are_epsilon_invariant() {
        let tau = kaon().lifetime_unit;
        let base = kaon();
        for eps in [C64::new(0.1, 0.0), C64::new(0.3, 0.2)] {
            let mut cp = kaon();
            cp.cp_epsilon = eps;
            for k in 0..20 {
                let t = k as f64 * tau / 3.0;
                let a = report(&base, Flavor::Particle, t).unwrap();
                let b = report(&cp, Flavor::Particle, t).unwrap();
                for q in Quantity::ALL {
                    assert_abs_diff_eq!(q.extract(&a), q.extract(&b), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn trivial_time_points_satisfy_all_conditions() {
        // Where the NSIT/AoT residuals vanish, no LGI or WLGI may signal a
        // violation: checked at t = 0 and deep in the long-lived tail.
        for params in [kaon(), bs()] {
            let tau = params.lifetime_unit;
            for t in [0.0, 5000.0 * tau, 8000.0 * tau] {
                let r = report(&params, Flavor::Particle, t).unwrap();
                let residuals_small = r
                    .nsit_residuals
                    .iter()
                    .chain(&r.aot_residuals)
                    .all(|v| v.abs() <= 1e-12)
                    && r.nsit_n.abs() <= 1e-7;
                if residuals_small {
                    for l in r.lgi {
                        assert!(l >= -1e-10);
                    }
                    for w in r.wlgi {
                        assert!(w <= 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn scan_grid_and_summary() {
        let tau = kaon().lifetime_unit;
        let series = scan(&kaon(), Flavor::Particle, 0.0, 10.0 * tau, 2001).unwrap();
        assert_eq!(series.grid.len(), 2001);
        assert_eq!(series.grid[0], 0.0);
        assert_eq!(*series.grid.last().unwrap(), 10.0 * tau);

        // Summary agrees with a direct pass over the reports.
        for q in Quantity::ALL {
            let s = series.summary.get(q);
            let direct_min = series
                .reports
                .iter()
                .map(|r| q.extract(r))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(s.min, direct_min);
        }

        // Kaon scan: no LGI/WLGI violations anywhere, sizable N violation.
        for q in [Quantity::L1, Quantity::L2, Quantity::L3, Quantity::L4] {
            assert!(series.summary.get(q).min >= -1e-12);
        }
        for q in [Quantity::W1, Quantity::W2, Quantity::W3] {
            assert!(series.summary.get(q).max <= 1e-12);
        }
        assert!(series.summary.get(Quantity::N).max > 1e-3);
    }

    #[test]
    fn scan_two_points_hits_endpoints() {
        let tau = kaon().lifetime_unit;
        let series = scan(&kaon(), Flavor::Particle, 0.0, tau, 2).unwrap();
        assert_eq!(series.grid, alloc::vec![0.0, tau]);
        assert_eq!(series.reports.len(), 2);
    }

    #[test]
    fn scan_rejects_bad_grids() {
        assert_eq!(
            scan(&kaon(), Flavor::Particle, 1.0, 0.5, 10).unwrap_err(),
            MacroError::InvalidGrid
        );
        assert_eq!(
            scan(&kaon(), Flavor::Particle, 0.0, 1.0, 1).unwrap_err(),
            MacroError::InvalidGrid
        );
        assert_eq!(
            scan(&kaon(), Flavor::Particle, -1.0, 1.0, 10).unwrap_err(),
            MacroError::InvalidGrid
        );
    }

    #[test]
    fn bs_nsit_oscillates_at_twice_the_mass_splitting() {
        // Sign changes of N for Bs track the phase dm * 2t: about
        // floor(10 tau * 2 dm / pi) = 166 over [0, 10 tau]. The grid must
        // resolve the earliest dips, whose width shrinks like 1/k towards
        // t = 0.
        let params = bs();
        let tau = params.lifetime_unit;
        let series = scan(&params, Flavor::Particle, 0.0, 10.0 * tau, 32001).unwrap();
        let mut changes = 0usize;
        let mut prev = 0.0f64;
        for r in &series.reports {
            let v = r.nsit_n;
            if v != 0.0 {
                if prev != 0.0 && v.signum() != prev.signum() {
                    changes += 1;
                }
                prev = v;
            }
        }
        let predicted =
            (10.0 * tau * 2.0 * params.mass_split / core::f64::consts::PI).floor() as usize;
        assert_eq!(predicted, 166);
        assert!(
            changes.abs_diff(predicted) <= 2,
            "sign changes {changes} vs predicted {predicted}"
        );
    }

    #[test]
    fn violation_interval_extraction() {
        let tau = kaon().lifetime_unit;
        let series = scan(&kaon(), Flavor::Particle, 0.0, 10.0 * tau, 501).unwrap();

        // No LGI violations for the kaon.
        assert!(violation_intervals(&series, Quantity::L1, 1e-9)
            .unwrap()
            .is_empty());
        // N exceeds 1e-3 over a contiguous stretch.
        let runs = violation_intervals(&series, Quantity::N, 1e-3).unwrap();
        assert!(!runs.is_empty());
        for (lo, hi) in &runs {
            assert!(lo <= hi);
        }
        // An infinite threshold silences everything.
        assert!(violation_intervals(&series, Quantity::N, f64::INFINITY)
            .unwrap()
            .is_empty());
        // Residual quantities have no violation direction.
        assert!(matches!(
            violation_intervals(&series, Quantity::Aot1Resid, 1e-9),
            Err(MacroError::NoViolationRule(_))
        ));
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(Quantity::from_name(q.name()).unwrap(), q);
        }
        assert!(matches!(
            Quantity::from_name("L9"),
            Err(MacroError::UnknownQuantity(_))
        ));
    }
}
