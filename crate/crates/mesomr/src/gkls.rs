//! GKLS master-equation backend on the extended flavor (+) decay space.
//!
//! The 4-dimensional Hilbert space is spanned by the ordered basis
//! `(|K_S>, |K_L>, |d_S>, |d_L>)`: the two mass eigenstates followed by one
//! decay sink per eigenstate. The mass operator acts on the flavor block
//! only (`M = diag(0, dm)`), and a single jump operator
//! `B = diag(sqrt(Gamma_S), sqrt(Gamma_L))` maps `|K_i> -> |d_i>`, so that
//! `B^dag B = diag(Gamma_S, Gamma_L)` reproduces the non-Hermitian width
//! term of the Wigner-Weisskopf Hamiltonian while keeping the total trace
//! conserved.

use nalgebra::{Matrix2, Matrix4, Vector4};
// f64 math comes from libm in no_std builds; under test the std inherent
// methods shadow the trait, leaving the import formally unused.
#[cfg_attr(test, allow(unused_imports))]
use num_traits::Float;
use thiserror::Error;

use crate::particle::{Flavor, MesonParams};
use crate::C64;

/// 4x4 complex matrix on the extended space.
pub type ExtMatrix = Matrix4<C64>;
/// 2x2 complex block (flavor or decay sector).
pub type Block = Matrix2<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GklsError {
    #[error("negative time gap: {0}")]
    NegativeTime(f64),
    #[error("integration step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("state contains non-finite entries")]
    NonFiniteState,
    #[error("generators require cp_epsilon = 0")]
    CpViolatingGenerators,
}

const ZERO: C64 = C64::new(0.0, 0.0);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The two generators of the GKLS equation for one meson species.
#[derive(Debug, Clone, PartialEq)]
pub struct GklsGenerators {
    mass_op: ExtMatrix,
    jump_op: ExtMatrix,
    damping: ExtMatrix, // cached B^dag B
}

impl GklsGenerators {
    /// Hermitian mass operator (flavor block `diag(0, dm)`).
    pub fn mass_op(&self) -> &ExtMatrix {
        &self.mass_op
    }

    /// Jump operator mapping flavor states onto decay states.
    pub fn jump_op(&self) -> &ExtMatrix {
        &self.jump_op
    }

    /// `B^dag B`, the width operator `diag(Gamma_S, Gamma_L)` on the flavor
    /// block.
    pub fn damping(&self) -> &ExtMatrix {
        &self.damping
    }

    /// Right-hand side of the master equation,
    /// `-i[M, rho] - (B'B rho + rho B'B - 2 B rho B')/2`.
    fn rhs(&self, rho: &ExtMatrix) -> ExtMatrix {
        let m = &self.mass_op;
        let g = &self.damping;
        let b = &self.jump_op;
        let commutator = m * rho - rho * m;
        let anticomm = g * rho + rho * g;
        let feed = b * rho * b.adjoint();
        commutator * C64::new(0.0, -1.0) - (anticomm - feed * c(2.0)) * c(0.5)
    }
}

/// Builds the GKLS generators for a validated, CP-symmetric parameter set.
///
/// The induced flavor-block dynamics coincides with the Schroedinger
/// evolution under the effective Hamiltonian `M - (i/2) diag(Gamma_S,
/// Gamma_L)`; see [`flavor_propagate_exact`].
pub fn build_generators(params: &MesonParams) -> Result<GklsGenerators, GklsError> {
    if params.cp_epsilon != ZERO {
        return Err(GklsError::CpViolatingGenerators);
    }
    let (gamma_s, gamma_l) = params.component_widths();
    let mut mass_op = ExtMatrix::zeros();
    mass_op[(1, 1)] = c(params.mass_split);
    let mut jump_op = ExtMatrix::zeros();
    jump_op[(2, 0)] = c(gamma_s.sqrt());
    jump_op[(3, 1)] = c(gamma_l.sqrt());
    let damping = jump_op.adjoint() * jump_op;
    Ok(GklsGenerators {
        mass_op,
        jump_op,
        damping,
    })
}

/// Density matrix on the extended flavor (+) decay space.
///
/// States are plain values; projecting does not renormalize, so chained
/// projections carry the joint-probability weight in their trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedState {
    rho: ExtMatrix,
}

impl ExtendedState {
    /// Pure flavor state `|F><F|` with an empty decay sector.
    pub fn pure_flavor(flavor: Flavor) -> Self {
        ExtendedState {
            rho: flavor_dyad(flavor),
        }
    }

    pub fn from_matrix(rho: ExtMatrix) -> Self {
        ExtendedState { rho }
    }

    pub fn matrix(&self) -> &ExtMatrix {
        &self.rho
    }

    /// Flavor sector (upper-left 2x2 block).
    pub fn flavor_block(&self) -> Block {
        self.rho.fixed_view::<2, 2>(0, 0).into_owned()
    }

    /// Decay sector (lower-right 2x2 block).
    pub fn decay_block(&self) -> Block {
        self.rho.fixed_view::<2, 2>(2, 2).into_owned()
    }

    /// Flavor-decay coherence block (upper-right 2x2); stays zero for
    /// states prepared in the flavor sector.
    pub fn coherence_block(&self) -> Block {
        self.rho.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Real part of the total trace.
    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `Tr(op * rho)`, real part.
    pub fn expectation(&self, op: &ExtMatrix) -> f64 {
        (op * self.rho).trace().re
    }

    /// `P rho P` for a projector `P`, without renormalization.
    pub fn project(&self, projector: &ExtMatrix) -> Self {
        ExtendedState {
            rho: projector * self.rho * projector,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rho.iter().all(|e| e.re == 0.0 && e.im == 0.0)
    }

    fn is_finite(&self) -> bool {
        self.rho
            .iter()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Largest Hermiticity defect `max |rho - rho^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.rho - self.rho.adjoint();
        d.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part; positive semidefiniteness
    /// up to integrator noise means this stays above roughly `-1e-9` for
    /// unit-trace states.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.rho + self.rho.adjoint()) * c(0.5);
        let eigs: Vector4<f64> = herm.symmetric_eigenvalues();
        eigs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `|F><F|` on the flavor block with exact dyadic entries +/- 1/2, so that
/// projection chains at zero elapsed time stay exact.
fn flavor_dyad(flavor: Flavor) -> ExtMatrix {
    let h = c(0.5);
    let s = match flavor {
        Flavor::Particle => h,
        Flavor::Antiparticle => -h,
    };
    let mut m = ExtMatrix::zeros();
    m[(0, 0)] = h;
    m[(0, 1)] = s;
    m[(1, 0)] = s;
    m[(1, 1)] = h;
    m
}

/// Projector `|F><F|` onto one flavor state (zero on the decay sector).
pub fn projector_flavor(flavor: Flavor) -> ExtMatrix {
    flavor_dyad(flavor)
}

/// Projector onto the decay sector.
pub fn projector_decay() -> ExtMatrix {
    let mut p = ExtMatrix::zeros();
    p[(2, 2)] = c(1.0);
    p[(3, 3)] = c(1.0);
    p
}

/// Projector onto the complement of `|F>`: the conjugate flavor plus the
/// whole decay sector, `1 - Pi_F = Pi_Fbar + Pi_d`.
pub fn projector_not_flavor(flavor: Flavor) -> ExtMatrix {
    ExtMatrix::identity() - projector_flavor(flavor)
}

/// Evolves a state for `dt` seconds with classical fixed-step fourth-order
/// integration of the master equation.
///
/// The number of steps is `round(dt / step)` (at least one), so `step` is
/// honored up to grid rounding. Trace is conserved to O(1e-10) per unit of
/// `Gamma dt` for the default step of `tau/2000`.
pub fn gkls_evolve(
    gen: &GklsGenerators,
    state: &ExtendedState,
    dt: f64,
    step: f64,
) -> Result<ExtendedState, GklsError> {
    if dt < 0.0 || !dt.is_finite() {
        return Err(GklsError::NegativeTime(dt));
    }
    if !state.is_finite() {
        return Err(GklsError::NonFiniteState);
    }
    if dt == 0.0 {
        return Ok(state.clone());
    }
    if step <= 0.0 || !step.is_finite() {
        return Err(GklsError::NonPositiveStep(step));
    }
    let n_steps = (dt / step).round().max(1.0) as u64;
    let h = dt / n_steps as f64;
    let half = c(h / 2.0);
    let sixth = c(h / 6.0);
    let mut rho = state.rho;
    for _ in 0..n_steps {
        let k1 = gen.rhs(&rho);
        let k2 = gen.rhs(&(rho + k1 * half));
        let k3 = gen.rhs(&(rho + k2 * half));
        let k4 = gen.rhs(&(rho + k3 * c(h)));
        rho += (k1 + (k2 + k3) * c(2.0) + k4) * sixth;
    }
    let out = ExtendedState { rho };
    if !out.is_finite() {
        return Err(GklsError::NonFiniteState);
    }
    Ok(out)
}

/// Exact (non-integrated) propagation of a flavor-sector density block:
/// `rho_f(dt) = E rho_f E^dag` with
/// `E = diag(e^{-(i m_S + Gamma_S/2) dt}, e^{-(i m_L + Gamma_L/2) dt})`.
///
/// Serves as a second, independent oracle for the flavor block of
/// [`gkls_evolve`].
pub fn flavor_propagate_exact(
    params: &MesonParams,
    rho_f: &Block,
    dt: f64,
) -> Result<Block, GklsError> {
    if dt < 0.0 || !dt.is_finite() {
        return Err(GklsError::NegativeTime(dt));
    }
    let (gamma_s, gamma_l) = params.component_widths();
    let e_s = C64::new(-gamma_s * dt / 2.0, 0.0).exp();
    let e_l = C64::new(-gamma_l * dt / 2.0, -params.mass_split * dt).exp();
    let prop = Block::new(e_s, ZERO, ZERO, e_l);
    Ok(prop * rho_f * prop.adjoint())
}
