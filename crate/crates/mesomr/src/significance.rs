//! Pseudo-experiment Monte Carlo for the significance of an NSIT violation.
//!
//! The null model is a macrorealist world sharing the single-interval
//! physics of the true model: the survival probability at `t` and the
//! oscillation probability are kept, while `P_FF(2t)`, the one quantity
//! the NSIT equality constrains, is replaced by `P_FF(t)^2 + P_osc(t)^2`
//! so that `N = 0` holds by construction. Each trial smears the three
//! input probabilities with independent relative Gaussian errors, clamps
//! them to `[0, 1]`, and recomputes the NSIT combination; the z-score
//! compares the true `N(t)` against the spread of those null samples.

use alloc::vec::Vec;

// f64 math comes from libm in no_std builds; under test the std inherent
// methods shadow the trait, leaving the import formally unused.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::macrorealism::{nsit_value, MacroError};
use crate::particle::{Flavor, MesonParams};
use crate::transition::{oscillation_roundtrip, survival_prob};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SignificanceError {
    #[error("rel_sigma must be positive and finite, got {0}")]
    InvalidRelSigma(f64),
    #[error("n_trials must be at least 100, got {0}")]
    TooFewTrials(u64),
    #[error("degenerate null spread (null_sd < 1e-300)")]
    DegenerateSpread,
    #[error(transparent)]
    Macro(#[from] MacroError),
    #[error(transparent)]
    Transition(#[from] crate::transition::TransitionError),
}

/// Configuration of one pseudo-experiment run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoConfig {
    /// Equidistant protocol time in seconds.
    pub t: f64,
    /// Relative Gaussian error applied to each measured probability.
    pub rel_sigma: f64,
    /// Number of pseudo-experiments.
    pub n_trials: u64,
    /// Seed; together with the trial index it fully determines all draws.
    pub seed: u64,
}

impl PseudoConfig {
    fn validate(&self) -> Result<(), SignificanceError> {
        if !(self.rel_sigma > 0.0 && self.rel_sigma.is_finite()) {
            return Err(SignificanceError::InvalidRelSigma(self.rel_sigma));
        }
        if self.n_trials < 100 {
            return Err(SignificanceError::TooFewTrials(self.n_trials));
        }
        Ok(())
    }
}

/// Outcome of a pseudo-experiment run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignificanceResult {
    /// The true-model NSIT combination `N(t)`.
    pub n_observed: f64,
    /// Sample mean of the null-model NSIT values.
    pub null_mean: f64,
    /// Sample standard deviation (Bessel-corrected) of the null samples.
    pub null_sd: f64,
    /// `(n_observed - null_mean) / null_sd`.
    pub z_score: f64,
    /// Number of trials actually used.
    pub n_trials: u64,
}

/// Runs the pseudo-experiment Monte Carlo.
///
/// Trial `i` draws from an independent ChaCha8 stream `(seed, stream = i)`,
/// so any parallel evaluation order reproduces the serial result; the
/// reduction over trials is performed in index order.
pub fn significance(
    params: &MesonParams,
    flavor: Flavor,
    cfg: &PseudoConfig,
) -> Result<SignificanceResult, SignificanceError> {
    cfg.validate()?;
    let n_observed = nsit_value(params, flavor, cfg.t)?;

    let s1 = survival_prob(params, cfg.t)?;
    let q = oscillation_roundtrip(params, flavor, cfg.t, cfg.t)?;
    // Measured oscillation probability entering N squared; the geometric
    // mean of the two directions, equal to either one at eps = 0.
    let osc = q.sqrt();
    let s2_null = s1 * s1 + q;

    let mut samples = Vec::with_capacity(cfg.n_trials as usize);
    for trial in 0..cfg.n_trials {
        let [g1, g2, g3] = trial_draws(cfg.seed, trial);
        let s1_hat = (s1 * (1.0 + cfg.rel_sigma * g1)).clamp(0.0, 1.0);
        let s2_hat = (s2_null * (1.0 + cfg.rel_sigma * g2)).clamp(0.0, 1.0);
        let osc_hat = (osc * (1.0 + cfg.rel_sigma * g3)).clamp(0.0, 1.0);
        samples.push(s2_hat - s1_hat * s1_hat - osc_hat * osc_hat);
    }

    let n = cfg.n_trials as f64;
    let null_mean = samples.iter().sum::<f64>() / n;
    let var = samples
        .iter()
        .map(|x| (x - null_mean) * (x - null_mean))
        .sum::<f64>()
        / (n - 1.0);
    let null_sd = var.sqrt();
    if !null_sd.is_finite() || null_sd < 1e-300 {
        return Err(SignificanceError::DegenerateSpread);
    }
    Ok(SignificanceResult {
        n_observed,
        null_mean,
        null_sd,
        z_score: (n_observed - null_mean) / null_sd,
        n_trials: cfg.n_trials,
    })
}

/// The three standard-normal draws of one trial, from its own substream.
fn trial_draws(seed: u64, trial: u64) -> [f64; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let mut draw = || StandardNormal.sample(&mut rng);
    [draw(), draw(), draw()]
}
