//! Coherence quantifiers and the robustness solver.
//!
//! Three numbers summarize how far a state sits from the incoherent
//! (diagonal) set:
//!
//! * [`c_h`] — the split-modulus measure: sum of `|Re|` plus `|Im|` over all
//!   off-diagonal entries. Every term is directly measurable as a witness
//!   expectation value, which is what makes this the operational quantity of
//!   the crate.
//! * [`c_l1`] — the familiar sum of off-diagonal moduli.
//! * [`roc`] — the robustness: the least mixing weight of noise that erases
//!   all coherence, computed by a cutting-plane solver with a dual witness
//!   certificate.
//!
//! The three are ordered: `c_h >= c_l1 >= (sqrt(2)/2) c_h`, with the left
//! inequality tight exactly on states whose off-diagonals are real (or
//! purely imaginary), and `c_l1 >= roc` entrywise dominated variants are
//! covered in the crate-level tests. [`ratio_check`] reports the sandwich
//! for a given state.

mod roc;
mod simplex;

pub use roc::{
    roc, roc_lower_bound, scaling_check, RobustnessSolution, ScalingCheck, PSD_STOP,
    ROC_MAX_DIM, UNIT_BOUND_TOL,
};

use crate::linalg::DensityMatrix;

/// Split-modulus coherence: `sum_{l != m} |Re rho_lm| + |Im rho_lm|`.
///
/// Equals the h-pseudo-norm of the off-diagonal part of `rho`, and equals
/// the expectation value of the state's unified witness.
pub fn c_h(rho: &DensityMatrix) -> f64 {
    rho.matrix().offdiag().h_norm()
}

/// The l1 coherence: `sum_{l != m} |rho_lm|`.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    rho.matrix().offdiag_abs_sum()
}

/// Result of [`ratio_check`]: both measures and where the sandwich
/// `c_h >= c_l1 >= (sqrt(2)/2) c_h` stands for this state.
#[derive(Clone, Copy, Debug)]
pub struct RatioCheck {
    pub c_h: f64,
    pub c_l1: f64,
    /// `c_h >= c_l1 - tol`.
    pub upper_ok: bool,
    /// `c_l1 >= (sqrt(2)/2) c_h - tol`.
    pub lower_ok: bool,
    /// Upper side is an equality (real or purely imaginary off-diagonals).
    pub upper_tight: bool,
    /// Lower side is an equality (every off-diagonal has `|Re| = |Im|`).
    pub lower_tight: bool,
}

/// Evaluate both coherence measures and the sandwich between them.
/// Both `_ok` flags hold for every valid state; they are reported rather
/// than asserted so that sweeps can count outcomes.
pub fn ratio_check(rho: &DensityMatrix, tol: f64) -> RatioCheck {
    let ch = c_h(rho);
    let cl1 = c_l1(rho);
    let lower = std::f64::consts::FRAC_1_SQRT_2 * ch;
    let eq_tol = 1e-12 * (1.0 + ch.abs());
    RatioCheck {
        c_h: ch,
        c_l1: cl1,
        upper_ok: ch >= cl1 - tol,
        lower_ok: cl1 >= lower - tol,
        upper_tight: (ch - cl1).abs() <= eq_tol,
        lower_tight: (cl1 - lower).abs() <= eq_tol,
    }
}
