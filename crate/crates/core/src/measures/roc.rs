//! Robustness of coherence by eigenvalue cutting planes.
//!
//! The quantity solved here is the smallest `s >= 0` such that
//! `(rho + s*sigma) / (1 + s)` is incoherent for some state `sigma`.
//! Writing `D = (1+s)*delta` for the unnormalized incoherent cover, the
//! problem collapses to a semidefinite program over the diagonal alone:
//!
//! ```text
//!     minimize   sum_i d_i - 1
//!     subject to diag(d) - rho >= 0.
//! ```
//!
//! The solver relaxes the cone constraint to a growing family of linear
//! cuts `v' diag(d) v >= v' rho v`, each generated by the most negative
//! eigenvector of the current `diag(d) - rho`, and re-solves a small
//! covering LP between cuts. At convergence the LP multipliers assemble a
//! dual certificate: a witness `W*` with zero diagonal and `W* <= I` whose
//! detection value `-tr(W* rho)` matches `s` from below.

use num_complex::Complex64;

use super::simplex::solve_covering;
use crate::error::{Error, Result};
use crate::linalg::{
    max_eigenvalue, min_eigenvalue, trace_product, ComplexMatrix, DensityMatrix,
};
use crate::witness::{unified_witness, Witness};

/// Largest dimension accepted by [`roc`]; cutting-plane counts grow quickly
/// past this point.
pub const ROC_MAX_DIM: usize = 32;
/// Stop refining once `lambda_min(diag(d) - rho)` clears this level.
pub const PSD_STOP: f64 = 1e-9;
/// Hard cap on generated cuts before giving up.
const CUT_CAP: usize = 10_000;
/// Cuts whose coefficient rows are this parallel are considered duplicates.
const COSINE_DEDUP: f64 = 1.0 - 1e-10;
/// States with less coherence than this are treated as exactly incoherent.
const INCOHERENT_FLOOR: f64 = 1e-9;

/// Output of [`roc`].
#[derive(Clone, Debug)]
pub struct RobustnessSolution {
    /// Optimal robustness value `s`.
    pub value: f64,
    /// Diagonal of the unnormalized incoherent cover `D`; `sum - 1 = s`.
    pub incoherent_cover: Vec<f64>,
    /// Residual state `(D - rho)/s`; absent when `s` is zero.
    pub tau: Option<DensityMatrix>,
    /// Zero-diagonal witness certifying `s` from below; absent when `s` is
    /// zero or the certificate could not be validated.
    pub dual_witness: Option<Witness>,
    /// `-lambda_min(D - rho)`: how far the cover is from exact feasibility.
    pub primal_gap: f64,
    /// `value` minus the best certified lower bound.
    pub dual_gap: f64,
    /// Number of cutting planes generated.
    pub iterations: usize,
}

/// Lower bound on the robustness from a witness-like operator.
///
/// Requires every diagonal entry of `w` to be nonnegative (within `tol`) and
/// `lambda_max(w) <= 1 + tol`; under those constraints `max(0, -tr(w rho))`
/// never exceeds the robustness of `rho`.
pub fn roc_lower_bound(rho: &DensityMatrix, w: &ComplexMatrix, tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    if w.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(w.dim(), rho.dim()));
    }
    let defect = w.hermiticity_defect();
    if defect > tol.max(1e-12) * 1e3 {
        return Err(Error::InvalidBoundWitness(format!(
            "not Hermitian (deviation {defect:.3e})"
        )));
    }
    for i in 0..w.dim() {
        let diag = w[(i, i)].re;
        if diag < -tol {
            return Err(Error::InvalidBoundWitness(format!(
                "diagonal entry {i} is {diag:.6e}; the bound needs a nonnegative diagonal"
            )));
        }
    }
    let lam_max = max_eigenvalue(w, f64::INFINITY)?;
    if lam_max > 1.0 + tol {
        return Err(Error::InvalidBoundWitness(format!(
            "largest eigenvalue {lam_max:.12} exceeds 1; the operator must sit below the identity"
        )));
    }
    let t = trace_product(w, rho.matrix(), tol.max(1e-12) * 1e3)?;
    Ok((-t).max(0.0))
}

/// Solve the robustness program for `rho`.
pub fn roc(rho: &DensityMatrix, tol: f64) -> Result<RobustnessSolution> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    let d = rho.dim();
    if d > ROC_MAX_DIM {
        return Err(Error::Domain(format!(
            "robustness solver handles dimensions up to {ROC_MAX_DIM}, got {d}"
        )));
    }
    if rho.is_incoherent(tol.max(INCOHERENT_FLOOR)) {
        return Ok(RobustnessSolution {
            value: 0.0,
            incoherent_cover: (0..d).map(|i| rho.matrix()[(i, i)].re).collect(),
            tau: None,
            dual_witness: None,
            primal_gap: 0.0,
            dual_gap: 0.0,
            iterations: 0,
        });
    }

    let populations: Vec<f64> = (0..d).map(|i| rho.matrix()[(i, i)].re).collect();
    // The LP works in shifted variables x = d - diag(rho) >= 0, so the cut
    // v' diag(d) v >= v' rho v becomes a covering row with right-hand side
    // v' (rho - dephased(rho)) v.
    let offdiag = rho.matrix().offdiag();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let mut cut_vectors: Vec<Vec<Complex64>> = Vec::new();
    let mut x = vec![0.0f64; d];
    let mut multipliers: Vec<f64> = Vec::new();

    let mut lambda;
    let mut vector;
    loop {
        let cover = build_cover(&populations, &x)?;
        let gap_matrix = &cover - rho.matrix();
        let (lam, v) = min_eigenvalue(&gap_matrix, f64::INFINITY)?;
        lambda = lam;
        vector = v;
        if lambda >= -PSD_STOP {
            break;
        }
        if cut_vectors.len() >= CUT_CAP {
            let best_value: f64 = x.iter().sum();
            return Err(Error::NonConvergence {
                iterations: cut_vectors.len(),
                best_value,
                // The LP value is itself a lower bound on s: it relaxes the
                // cone to finitely many cuts.
                best_bound: best_value + lambda.min(0.0) * d as f64,
            });
        }

        let row: Vec<f64> = (0..d).map(|i| vector[i].norm_sqr()).collect();
        if is_duplicate(&rows, &row) {
            let best_value: f64 = x.iter().sum();
            return Err(Error::NonConvergence {
                iterations: cut_vectors.len(),
                best_value,
                best_bound: best_value + lambda.min(0.0) * d as f64,
            });
        }
        let mut b = 0.0;
        for i in 0..d {
            for j in 0..d {
                b += (vector[i].conj() * offdiag[(i, j)] * vector[j]).re;
            }
        }
        rows.push(row);
        rhs.push(b);
        cut_vectors.push(vector.clone());

        let lp = solve_covering(d, &rows, &rhs)
            .map_err(|e| Error::LinearProgram(format!("covering step failed: {e}")))?;
        debug_assert!(
            (lp.objective - lp.x.iter().sum::<f64>()).abs() <= 1e-9 * (1.0 + lp.objective.abs()),
            "covering objective disagrees with its own minimizer"
        );
        x = lp.x;
        multipliers = lp.multipliers;
    }

    let value: f64 = x.iter().sum();
    let primal_gap = (-lambda).max(0.0);
    let cover: Vec<f64> = (0..d).map(|i| populations[i] + x[i]).collect();

    if value <= INCOHERENT_FLOOR {
        return Ok(RobustnessSolution {
            value: 0.0,
            incoherent_cover: populations,
            tau: None,
            dual_witness: None,
            primal_gap,
            dual_gap: 0.0,
            iterations: cut_vectors.len(),
        });
    }

    let tau = residual_state(rho, &cover, value).ok();
    let (dual_witness, dual_gap) =
        dual_certificate(rho, &cut_vectors, &multipliers, value, tol);

    Ok(RobustnessSolution {
        value,
        incoherent_cover: cover,
        tau,
        dual_witness,
        primal_gap,
        dual_gap,
        iterations: cut_vectors.len(),
    })
}

/// Residual-state identity check: with `s` and `tau` from [`roc`], the
/// off-diagonal coherence satisfies `c_h(rho) = s * c_h(tau)` exactly, since
/// the cover is diagonal. Returns the achieved residual plus the measured
/// `c_h(tau)` and whether it stayed below `1 + 1e-6` (reported, not assumed:
/// see the unit-bound discussion in the crate tests).
#[derive(Clone, Debug)]
pub struct ScalingCheck {
    /// Robustness value used for the rescaling.
    pub value: f64,
    /// `|c_h(rho) - s * c_h(tau)|`.
    pub residual: f64,
    /// Off-diagonal coherence of the residual state.
    pub tau_coherence: f64,
    /// Whether `tau_coherence <= 1 + 1e-6`.
    pub unit_bound_ok: bool,
}

/// Tolerance used for the reported unit bound on the residual state.
pub const UNIT_BOUND_TOL: f64 = 1e-6;

/// Check the rescaling identity between a state's coherence and the
/// coherence of its robustness residual. Errors on incoherent input, where
/// the residual state is undefined.
pub fn scaling_check(rho: &DensityMatrix, tol: f64) -> Result<ScalingCheck> {
    let solution = roc(rho, tol)?;
    let (Some(tau), true) = (solution.tau.as_ref(), solution.value > 0.0) else {
        return Err(Error::IncoherentInput);
    };
    let lhs = super::c_h(rho);
    let tau_coherence = super::c_h(tau);
    let residual = (lhs - solution.value * tau_coherence).abs();
    Ok(ScalingCheck {
        value: solution.value,
        residual,
        tau_coherence,
        unit_bound_ok: tau_coherence <= 1.0 + UNIT_BOUND_TOL,
    })
}

fn build_cover(populations: &[f64], x: &[f64]) -> Result<ComplexMatrix> {
    let entries: Vec<f64> = populations.iter().zip(x).map(|(p, xi)| p + xi).collect();
    ComplexMatrix::from_diag(&entries)
}

fn is_duplicate(rows: &[Vec<f64>], candidate: &[f64]) -> bool {
    let norm_c = candidate.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm_c == 0.0 {
        return true;
    }
    for row in rows {
        let dot: f64 = row.iter().zip(candidate).map(|(a, b)| a * b).sum();
        let norm_r = row.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm_r > 0.0 && dot / (norm_r * norm_c) > COSINE_DEDUP {
            return true;
        }
    }
    false
}

fn residual_state(rho: &DensityMatrix, cover: &[f64], value: f64) -> Result<DensityMatrix> {
    let d = rho.dim();
    let mut m = ComplexMatrix::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            let base = if i == j {
                Complex64::new(cover[i], 0.0) - rho.matrix()[(i, i)]
            } else {
                -rho.matrix()[(i, j)]
            };
            m[(i, j)] = base / value;
        }
    }
    // The cover is feasible only up to the stopping threshold, so the
    // residual inherits a PSD defect of at most PSD_STOP / value.
    let tau_tol = (2.0 * PSD_STOP / value).max(2.0 * PSD_STOP);
    DensityMatrix::new(m, tau_tol)
}

/// Build the strongest available zero-diagonal dual witness and the gap it
/// leaves to `value`.
fn dual_certificate(
    rho: &DensityMatrix,
    cut_vectors: &[Vec<Complex64>],
    multipliers: &[f64],
    value: f64,
    tol: f64,
) -> (Option<Witness>, f64) {
    let mut best: Option<(ComplexMatrix, f64)> = None;

    if let Ok(w) = assemble_from_multipliers(rho.dim(), cut_vectors, multipliers) {
        if let Ok(bound) = roc_lower_bound(rho, &w, tol.max(1e-9)) {
            best = Some((w, bound));
        }
    }

    // Fallback: the unified witness of rho, scaled below the identity,
    // bounds the robustness by c_h / lambda_max. Usually looser, but always
    // available for coherent states.
    let need_fallback = best.as_ref().map_or(true, |(_, b)| value - *b > 1e-6);
    if need_fallback {
        if let Ok(unified) = unified_witness(rho, tol) {
            let detector = unified.detector.matrix().clone();
            if let Ok(lam_max) = max_eigenvalue(&detector, f64::INFINITY) {
                let scale = lam_max.max(1.0);
                let scaled = detector.scale(1.0 / scale);
                if let Ok(bound) = roc_lower_bound(rho, &scaled, tol.max(1e-9)) {
                    if best.as_ref().map_or(true, |(_, b)| bound > *b) {
                        best = Some((scaled, bound));
                    }
                }
            }
        }
    }

    match best {
        Some((m, bound)) => {
            let gap = (value - bound).max(0.0);
            (Witness::new(m, tol.max(1e-9)).ok(), gap)
        }
        None => (None, value),
    }
}

/// Assemble `W* = I - Y` where `Y = sum_k mu_k v_k v_k' + diag(nu)` takes the
/// LP multipliers of the active cuts and `nu` tops the diagonal up to one.
/// A final diagonal rescale pins `diag(W*) = 0` exactly, keeping `Y` PSD.
fn assemble_from_multipliers(
    dim: usize,
    cut_vectors: &[Vec<Complex64>],
    multipliers: &[f64],
) -> Result<ComplexMatrix> {
    let mut y = ComplexMatrix::zeros(dim)?;
    for (v, &mu) in cut_vectors.iter().zip(multipliers) {
        if mu <= 0.0 {
            continue;
        }
        for i in 0..dim {
            for j in 0..dim {
                y[(i, j)] += v[i] * v[j].conj() * mu;
            }
        }
    }
    for i in 0..dim {
        let slack = (1.0 - y[(i, i)].re).max(0.0);
        y[(i, i)] += Complex64::new(slack, 0.0);
    }
    // Exact unit diagonal via congruence with diag(Y)^(-1/2).
    let mut scales = vec![0.0f64; dim];
    for (i, s) in scales.iter_mut().enumerate() {
        let yii = y[(i, i)].re;
        if yii <= 0.0 {
            return Err(Error::LinearProgram(
                "dual assembly produced a nonpositive diagonal".into(),
            ));
        }
        *s = 1.0 / yii.sqrt();
    }
    let mut w = ComplexMatrix::zeros(dim)?;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                w[(i, j)] = -y[(i, j)] * scales[i] * scales[j];
            }
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, StateKind};
    use num_complex::Complex64;

    /// Closed form for qubits: minimizing d0 + d1 with
    /// (d0 - r00)(d1 - r11) >= |r01|^2 gives s = 2|r01| by AM-GM.
    fn qubit_oracle(rho: &DensityMatrix) -> f64 {
        2.0 * rho.matrix()[(0, 1)].norm()
    }

    fn qubit(re: f64, im: f64, p: f64) -> DensityMatrix {
        let m = ComplexMatrix::from_re_im(
            2,
            &[p, re, re, 1.0 - p],
            &[0.0, im, -im, 0.0],
        )
        .unwrap();
        DensityMatrix::new(m, 1e-9).unwrap()
    }

    #[test]
    fn incoherent_state_has_zero_robustness() {
        let rho = DensityMatrix::from_probabilities(&[0.3, 0.7]).unwrap();
        let sol = roc(&rho, 1e-9).unwrap();
        assert_eq!(sol.value, 0.0);
        assert!(sol.tau.is_none());
        assert!(sol.dual_witness.is_none());
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn balanced_superposition_has_unit_robustness() {
        let plus = DensityMatrix::pure(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let sol = roc(&plus, 1e-9).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-6, "value {}", sol.value);
        assert!(sol.primal_gap <= PSD_STOP);
        assert!(sol.dual_gap <= 1e-6, "dual gap {}", sol.dual_gap);
        let tau = sol.tau.unwrap();
        // tau = (D - rho)/s flips the off-diagonal sign.
        assert!((tau.matrix()[(0, 1)].re + 0.5).abs() < 1e-6);
    }

    #[test]
    fn qubit_solver_matches_the_analytic_oracle() {
        for seed in 0..40u64 {
            let kind = if seed % 2 == 0 {
                StateKind::Pure
            } else {
                StateKind::Mixed
            };
            let rho = random_density(2, kind, seed).unwrap();
            let sol = roc(&rho, 1e-9).unwrap();
            let oracle = qubit_oracle(&rho);
            assert!(
                (sol.value - oracle).abs() < 1e-6,
                "seed {seed}: solver {} oracle {}",
                sol.value,
                oracle
            );
            assert!(sol.primal_gap <= PSD_STOP);
            assert!(sol.dual_gap <= 1e-6, "seed {seed}: dual gap {}", sol.dual_gap);
        }
    }

    #[test]
    fn certificates_hold_on_random_states_up_to_dimension_five() {
        for dim in 2..=5usize {
            for seed in 0..12u64 {
                let rho = random_density(dim, StateKind::Mixed, 1000 + seed).unwrap();
                let sol = roc(&rho, 1e-9).unwrap();
                assert!(sol.value >= 0.0);
                assert!(sol.primal_gap <= PSD_STOP, "dim {dim} seed {seed}");
                assert!(
                    sol.dual_gap <= 1e-6,
                    "dim {dim} seed {seed}: dual gap {}",
                    sol.dual_gap
                );
                // Cover entries dominate the populations.
                for (i, &di) in sol.incoherent_cover.iter().enumerate() {
                    assert!(di >= rho.matrix()[(i, i)].re - 1e-12);
                }
                let total: f64 = sol.incoherent_cover.iter().sum();
                assert!((total - 1.0 - sol.value).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dual_witness_saturates_the_lower_bound() {
        let rho = qubit(0.25, 0.25, 0.5);
        let sol = roc(&rho, 1e-9).unwrap();
        let w = sol.dual_witness.as_ref().expect("certificate");
        for i in 0..2 {
            assert!(w.matrix()[(i, i)].norm() < 1e-12);
        }
        let bound = roc_lower_bound(&rho, w.matrix(), 1e-9).unwrap();
        assert!((bound - sol.value).abs() <= 1e-6);
    }

    #[test]
    fn lower_bound_rejects_bad_operators() {
        let rho = qubit(0.25, 0.0, 0.5);
        // Negative diagonal entry.
        let bad_diag = ComplexMatrix::from_re_im(
            2,
            &[-0.5, 0.0, 0.0, 0.0],
            &[0.0; 4],
        )
        .unwrap();
        assert!(matches!(
            roc_lower_bound(&rho, &bad_diag, 1e-9),
            Err(Error::InvalidBoundWitness(_))
        ));
        // Eigenvalue above one.
        let too_big = ComplexMatrix::from_re_im(
            2,
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0; 4],
        )
        .unwrap();
        assert!(matches!(
            roc_lower_bound(&rho, &too_big, 1e-9),
            Err(Error::InvalidBoundWitness(_))
        ));
        // Zero operator gives the trivial bound.
        let zero = ComplexMatrix::zeros(2).unwrap();
        assert_eq!(roc_lower_bound(&rho, &zero, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn negative_pauli_x_bounds_the_balanced_state()  {
        let plus = DensityMatrix::pure(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let w = ComplexMatrix::from_re_im(
            2,
            &[0.0, -1.0, -1.0, 0.0],
            &[0.0; 4],
        )
        .unwrap();
        let bound = roc_lower_bound(&plus, &w, 1e-9).unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_identity_on_the_balanced_state() {
        let plus = DensityMatrix::pure(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        ])
        .unwrap();
        let check = scaling_check(&plus, 1e-9).unwrap();
        assert!(check.residual <= 1e-6, "residual {}", check.residual);
        // Real off-diagonals: tau's coherence equals c_h / s = 1 here.
        assert!((check.tau_coherence - 1.0).abs() < 1e-6);
        assert!(check.unit_bound_ok);
    }

    #[test]
    fn scaling_identity_holds_while_the_unit_bound_can_fail() {
        // Balanced real and imaginary parts push the residual state's
        // coherence to sqrt(2): the identity still holds, the unit bound
        // does not. This is the documented counterexample shape.
        let rho = qubit(0.25, 0.25, 0.5);
        let check = scaling_check(&rho, 1e-9).unwrap();
        assert!(check.residual <= 1e-6, "residual {}", check.residual);
        assert!(
            (check.tau_coherence - std::f64::consts::SQRT_2).abs() < 1e-5,
            "tau coherence {}",
            check.tau_coherence
        );
        assert!(!check.unit_bound_ok);
    }

    #[test]
    fn scaling_check_rejects_incoherent_input() {
        let rho = DensityMatrix::from_probabilities(&[0.5, 0.5]).unwrap();
        assert!(matches!(
            scaling_check(&rho, 1e-9),
            Err(Error::IncoherentInput)
        ));
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let rho = DensityMatrix::maximally_mixed(33).unwrap();
        assert!(matches!(roc(&rho, 1e-9), Err(Error::Domain(_))));
    }
}
