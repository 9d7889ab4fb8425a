//! Incoherent quantum channels in Kraus form.
//!
//! A channel `rho -> sum_n K_n rho K_n'` preserves the incoherent set when
//! every Kraus operator maps diagonal matrices to diagonal matrices, which
//! for matrices means: at most one nonzero entry per column. This module
//! validates that structure, applies channels (totally or as selective
//! measurement outcomes), draws random incoherent channels for property
//! sweeps, and checks the flag-state inequality used to compare a mixture's
//! coherence with the coherence of its labelled ensemble.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{complex_normal, ComplexMatrix, DensityMatrix, DEFAULT_TOL};

/// Completeness is structural for generated channels; only the diagonal
/// accumulates rounding, so this is far tighter than the general tolerance.
pub const GENERATED_COMPLETENESS_TOL: f64 = 1e-12;

/// Diagnostics from [`validate_kraus`]. `valid` summarizes; the defects and
/// the failure message localize the first problem found.
#[derive(Clone, Debug)]
pub struct ChannelCheck {
    pub valid: bool,
    /// Why validation failed, naming the Kraus index and column involved.
    pub failure: Option<String>,
    /// Largest entrywise deviation of `sum K_n' K_n` from the identity.
    pub completeness_defect: f64,
    /// Largest second-place column magnitude across all Kraus operators;
    /// zero for a structurally incoherent channel.
    pub incoherence_defect: f64,
}

/// Check whether a Kraus family forms an incoherent channel: the operators
/// must resolve the identity, and each column of each operator may carry at
/// most one entry above `tol`.
pub fn validate_kraus(kraus: &[ComplexMatrix], tol: f64) -> ChannelCheck {
    let mut check = ChannelCheck {
        valid: false,
        failure: None,
        completeness_defect: f64::INFINITY,
        incoherence_defect: f64::INFINITY,
    };
    let Some(first) = kraus.first() else {
        check.failure = Some("channel needs at least one Kraus operator".into());
        return check;
    };
    let d = first.dim();
    if let Some(n) = kraus.iter().position(|k| k.dim() != d) {
        check.failure = Some(format!(
            "Kraus operator {n} has dimension {} but operator 0 has {d}",
            kraus[n].dim()
        ));
        return check;
    }

    // Completeness: sum K'K = I.
    let mut sum = ComplexMatrix::zeros(d).expect("dim already validated");
    for k in kraus {
        sum = &sum + &(&k.adjoint() * k);
    }
    let identity = ComplexMatrix::identity(d).expect("dim already validated");
    check.completeness_defect = sum.max_abs_diff(&identity).expect("same dim");

    // Incoherence: at most one entry of magnitude > tol per column.
    let mut worst_second = 0.0f64;
    let mut offender: Option<(usize, usize)> = None;
    for (n, k) in kraus.iter().enumerate() {
        for col in 0..d {
            let mut mags: Vec<f64> = (0..d).map(|row| k[(row, col)].norm()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let second = mags.get(1).copied().unwrap_or(0.0);
            if second > worst_second {
                worst_second = second;
                if second > tol {
                    offender = Some((n, col));
                }
            }
        }
    }
    check.incoherence_defect = worst_second;

    if check.completeness_defect > tol {
        check.failure = Some(format!(
            "Kraus operators do not resolve the identity (defect {:.3e})",
            check.completeness_defect
        ));
    } else if let Some((n, col)) = offender {
        check.failure = Some(format!(
            "Kraus operator {n}, column {col} has a second entry above tolerance \
             ({worst_second:.3e}); it maps some diagonal state to a coherent one"
        ));
    } else {
        check.valid = true;
    }
    check
}

/// A validated incoherent channel.
#[derive(Clone, Debug)]
pub struct IncoherentChannel {
    kraus: Vec<ComplexMatrix>,
    tol: f64,
}

impl IncoherentChannel {
    pub fn new(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Error::BadTolerance(tol));
        }
        let check = validate_kraus(&kraus, tol);
        if !check.valid {
            return Err(Error::NotIncoherentChannel(
                check.failure.unwrap_or_else(|| "unknown defect".into()),
            ));
        }
        Ok(Self { kraus, tol })
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// Total evolution `sum_n K_n rho K_n'`. The output trace is
    /// renormalized to absorb the channel's completeness defect (at most
    /// `tol`), so the result is always a valid state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        let mut out = ComplexMatrix::zeros(self.dim())?;
        for k in &self.kraus {
            let term = &(k * rho.matrix()) * &k.adjoint();
            out = &out + &term;
        }
        let trace = out.trace().re;
        if trace <= 0.0 {
            return Err(Error::NotIncoherentChannel(
                "channel annihilated the state".into(),
            ));
        }
        DensityMatrix::new(out.scale(1.0 / trace), self.tol.max(DEFAULT_TOL))
    }

    /// Selective application: one `(probability, normalized state)` pair per
    /// Kraus operator, omitting outcomes with probability at most `tol`.
    /// The retained probabilities sum to one minus the omitted mass.
    pub fn selective_outcomes(
        &self,
        rho: &DensityMatrix,
    ) -> Result<Vec<(f64, DensityMatrix)>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), self.dim()));
        }
        let mut outcomes = Vec::new();
        for k in &self.kraus {
            let term = &(k * rho.matrix()) * &k.adjoint();
            let p = term.trace().re;
            if p <= self.tol {
                continue;
            }
            let state = DensityMatrix::new(term.scale(1.0 / p), self.tol.max(DEFAULT_TOL))?;
            outcomes.push((p, state));
        }
        Ok(outcomes)
    }
}

/// Amplitude distribution for [`random_incoherent_channel_with`].
///
/// The split-modulus measure treats the real and imaginary parts of a matrix
/// entry separately, so it is *not* insensitive to the phases a channel
/// attaches: a diagonal phase unitary is incoherent yet can trade real for
/// imaginary weight and inflate the measure by up to `sqrt(2)`. Channels
/// whose amplitudes are real never mix the two parts, and under them the
/// measure is genuinely monotone. Sweeps draw from both families to map out
/// that boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmplitudeKind {
    /// Complex-normal amplitudes: generic phases.
    Complex,
    /// Real-normal amplitudes: phase-free channels.
    Real,
}

/// Draw a random incoherent channel with `n_kraus` operators on dimension
/// `d`, deterministically from `seed`, with complex-normal amplitudes.
pub fn random_incoherent_channel(
    d: usize,
    n_kraus: usize,
    seed: u64,
) -> Result<IncoherentChannel> {
    random_incoherent_channel_with(d, n_kraus, AmplitudeKind::Complex, seed)
}

/// Draw a random incoherent channel with the given amplitude distribution.
///
/// Construction: each operator receives a random permutation assigning a
/// target row to every column, so no two columns of the completeness sum can
/// ever collide — the off-diagonal entries of `sum K'K` are structurally
/// zero. Each column is active in at least one operator (and in others with
/// probability one half), jointly normalized per column. The result is
/// exactly complete up to diagonal rounding.
pub fn random_incoherent_channel_with(
    d: usize,
    n_kraus: usize,
    amplitudes: AmplitudeKind,
    seed: u64,
) -> Result<IncoherentChannel> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "channel dimension must be at least 2, got {d}"
        )));
    }
    if n_kraus == 0 {
        return Err(Error::Domain("need at least one Kraus operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Target rows per operator.
    let mut targets: Vec<Vec<usize>> = Vec::with_capacity(n_kraus);
    for _ in 0..n_kraus {
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut rng);
        targets.push(perm);
    }

    // Amplitudes: every column needs at least one active operator.
    let mut slots = vec![vec![Complex64::new(0.0, 0.0); d]; n_kraus];
    for col in 0..d {
        let mandatory = rng.random_range(0..n_kraus);
        for (n, row) in slots.iter_mut().enumerate() {
            if n == mandatory || rng.random::<f64>() < 0.5 {
                row[col] = match amplitudes {
                    AmplitudeKind::Complex => complex_normal(&mut rng),
                    AmplitudeKind::Real => {
                        Complex64::new(complex_normal(&mut rng).re, 0.0)
                    }
                };
            }
        }
        let norm: f64 = slots
            .iter()
            .map(|row| row[col].norm_sqr())
            .sum::<f64>()
            .sqrt();
        for row in slots.iter_mut() {
            row[col] /= norm;
        }
    }

    let mut kraus = Vec::with_capacity(n_kraus);
    for n in 0..n_kraus {
        let mut k = ComplexMatrix::zeros(d)?;
        for col in 0..d {
            k[(targets[n][col], col)] = slots[n][col];
        }
        kraus.push(k);
    }
    IncoherentChannel::new(kraus, GENERATED_COMPLETENESS_TOL)
}

/// Result of [`c2c_check`]: the coherence of the plain mixture versus the
/// coherence of the flagged ensemble `sum_i p_i |i><i| (x) rho_i`.
#[derive(Clone, Copy, Debug)]
pub struct FlagStateCheck {
    /// `mixture_coherence >= block_coherence - tol`.
    pub holds: bool,
    /// Coherence of `sum_i p_i rho_i`.
    pub mixture_coherence: f64,
    /// Coherence of the block-diagonal flagged state.
    pub block_coherence: f64,
}

/// Compare the coherence of a mixture with the coherence of its flagged
/// ensemble.
///
/// The flagged state is block diagonal, so its coherence is exactly
/// `sum_i p_i c_h(rho_i)` — attaching an incoherent flag neither creates
/// nor hides coherence within a part. The reported inequality therefore
/// reduces to strong monotonicity and is guaranteed only when the parts
/// arise from a measurement of the mixture by an incoherent channel;
/// arbitrary convex decompositions can violate it (split the maximally
/// mixed qubit into two balanced superpositions and the block side is
/// positive while the mixture side is zero).
pub fn c2c_check(parts: &[(f64, DensityMatrix)], tol: f64) -> Result<FlagStateCheck> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::BadTolerance(tol));
    }
    if parts.is_empty() {
        return Err(Error::Domain("ensemble needs at least one part".into()));
    }
    let d = parts[0].1.dim();
    if parts.iter().any(|(_, rho)| rho.dim() != d) {
        return Err(Error::Domain("ensemble parts have mixed dimensions".into()));
    }
    let total: f64 = parts.iter().map(|(p, _)| *p).sum();
    if parts.iter().any(|(p, _)| *p < -1e-12) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "part probabilities must be nonnegative and sum to 1, got {total:.12}"
        )));
    }

    // Normalize the weights so both constructed states carry unit trace even
    // when the inputs sum to 1 only within tolerance.
    let mut mixture = ComplexMatrix::zeros(d)?;
    for (p, rho) in parts {
        mixture = mixture.add_scaled(p / total, rho.matrix())?;
    }
    let mixture_coherence = mixture.offdiag().h_norm();

    let block_dim = parts.len() * d;
    let mut block = ComplexMatrix::zeros(block_dim)?;
    for (i, (p, rho)) in parts.iter().enumerate() {
        let offset = i * d;
        for a in 0..d {
            for b in 0..d {
                block[(offset + a, offset + b)] = rho.matrix()[(a, b)] * (p / total);
            }
        }
    }
    let block_coherence = block.offdiag().h_norm();

    Ok(FlagStateCheck {
        holds: mixture_coherence >= block_coherence - tol,
        mixture_coherence,
        block_coherence,
    })
}
