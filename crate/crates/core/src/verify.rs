//! Self-checking property sweeps behind the `verify` subcommand.
//!
//! Each suite exercises the documented invariants of one part of the crate
//! and returns a structured report: named checks, each with a pass flag and
//! a one-line detail. Suite names follow the command-line tokens; check
//! names describe the behavior under test.
//!
//! Checks whose name ends in `-flagged` record empirical findings that are
//! deliberately reported rather than asserted — every one corresponds to a
//! documented boundary of the split-modulus measure (phase-sensitive
//! channels, free-form ensemble decompositions, the residual-state unit
//! bound) or to a reference value that disagrees with the exact
//! combinatorics. They never gate the suite; the detail line carries the
//! observed numbers so the finding stays visible.
//!
//! Every suite derives its randomness from the caller's seed, so a given
//! configuration always produces the identical report.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{c2c_check, random_incoherent_channel_with, AmplitudeKind};
use crate::io::fmt_float;
use crate::linalg::random::{random_density_with, random_unit_vector, StateKind};
use crate::linalg::{eigh, min_eigenvalue, trace_product, ComplexMatrix, DEFAULT_TOL};
use crate::measures::{c_h, c_l1, roc, scaling_check};
use crate::witness::{
    construct_witness, estimate_xi, generator_witness, is_finer, random_witness_with,
    unified_witness, GeneratorPart, Witness,
};
use crate::{scheduler, tomo, DensityMatrix, Error, Result};

/// One verification suite, named after its command-line token.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    /// Pseudo-norm and dense linear-algebra invariants.
    Norm,
    /// Witness optimality is equivalent to a vanishing diagonal.
    Theorem1,
    /// Constructed witnesses are optimal and detect their source state.
    Theorem2,
    /// Ordering relations between a witness and a finer one.
    Lemma1,
    /// Measure behavior under incoherent channels and ensembles.
    Theorem3,
    /// Robustness solver and the measure-rescaling identity.
    Theorem4,
    /// Expected-measurement analysis of the adaptive detection walk.
    ExpectedMeasurements,
    /// Tomography round trips and noise calibration (runs under `all`).
    Tomography,
}

impl Suite {
    /// All suites, in report order.
    pub const ALL: [Suite; 8] = [
        Suite::Norm,
        Suite::Theorem1,
        Suite::Theorem2,
        Suite::Lemma1,
        Suite::Theorem3,
        Suite::Theorem4,
        Suite::Tomography,
        Suite::ExpectedMeasurements,
    ];

    /// Stable name used in reports and on the command line.
    pub fn token(self) -> &'static str {
        match self {
            Suite::Norm => "norm",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Lemma1 => "lemma1",
            Suite::Theorem3 => "theorem3",
            Suite::Theorem4 => "theorem4",
            Suite::ExpectedMeasurements => "e_n",
            Suite::Tomography => "tomography",
        }
    }
}

/// Sweep sizing and seeding for the verification suites.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// Base trial count; each suite scales it to its own sweep sizes.
    pub trials: usize,
    pub seed: u64,
    /// Structural tolerance forwarded to constructors.
    pub tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: 1000,
            seed: 0,
            tol: DEFAULT_TOL,
        }
    }
}

/// Outcome of one named check within a suite.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Run a single suite.
pub fn run(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.trials == 0 {
        return Err(Error::Domain("verification needs at least one trial".into()));
    }
    if !cfg.tol.is_finite() || cfg.tol <= 0.0 {
        return Err(Error::BadTolerance(cfg.tol));
    }
    let checks = match suite {
        Suite::Norm => norm_suite(cfg)?,
        Suite::Theorem1 => theorem1_suite(cfg)?,
        Suite::Theorem2 => theorem2_suite(cfg)?,
        Suite::Lemma1 => lemma1_suite(cfg)?,
        Suite::Theorem3 => theorem3_suite(cfg)?,
        Suite::Theorem4 => theorem4_suite(cfg)?,
        Suite::ExpectedMeasurements => expected_suite(cfg)?,
        Suite::Tomography => tomography_suite(cfg)?,
    };
    Ok(SuiteReport {
        suite: suite.token(),
        checks,
    })
}

/// Run every suite in report order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    Suite::ALL.iter().map(|&s| run(s, cfg)).collect()
}

// ---- shared helpers --------------------------------------------------------

fn suite_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn flagged(name: &'static str, detail: String) -> Check {
    Check {
        name,
        passed: true,
        detail: format!("flagged: {detail}"),
    }
}

fn random_general<R: Rng>(d: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(d)?;
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = crate::linalg::complex_normal(rng);
        }
    }
    Ok(m)
}

/// Density matrix with exactly real entries (imaginary parts identically
/// zero), drawn as a normalized real Gram matrix.
fn random_real_density<R: Rng>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    loop {
        let mut g = vec![vec![0.0f64; d]; d];
        for row in &mut g {
            for x in row.iter_mut() {
                *x = crate::linalg::complex_normal(rng).re;
            }
        }
        let mut m = ComplexMatrix::zeros(d)?;
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for (gi, gj) in g[i].iter().zip(&g[j]) {
                    s += gi * gj;
                }
                m[(i, j)] = num_complex::Complex64::new(s, 0.0);
            }
        }
        let tr = m.trace().re;
        if tr < 1e-9 {
            continue;
        }
        return DensityMatrix::new(m.scale(1.0 / tr), DEFAULT_TOL);
    }
}

fn max_abs_diag(m: &ComplexMatrix) -> f64 {
    (0..m.dim()).fold(0.0f64, |w, i| w.max(m[(i, i)].norm()))
}

// ---- norm suite -------------------------------------------------------------

fn eig_min_2x2(m: &ComplexMatrix) -> f64 {
    let a = m[(0, 0)].re;
    let c = m[(1, 1)].re;
    let half_gap = 0.5 * (a - c);
    0.5 * (a + c) - (half_gap * half_gap + m[(0, 1)].norm_sqr()).sqrt()
}

/// Smallest eigenvalue of a 3x3 Hermitian matrix by the trigonometric
/// solution of its characteristic polynomial.
fn eig_min_3x3(m: &ComplexMatrix) -> f64 {
    let q = m.trace().re / 3.0;
    let p1 = m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr() + m[(1, 2)].norm_sqr();
    let dq: Vec<f64> = (0..3).map(|i| m[(i, i)].re - q).collect();
    let p2 = dq.iter().map(|x| x * x).sum::<f64>() + 2.0 * p1;
    if p2 <= 1e-30 {
        return q;
    }
    let p = (p2 / 6.0).sqrt();
    let b: Vec<num_complex::Complex64> = (0..3)
        .flat_map(|i| {
            (0..3).map(move |j| {
                let shift = if i == j { q } else { 0.0 };
                (m[(i, j)] - shift) / p
            })
        })
        .collect();
    let det = b[0] * (b[4] * b[8] - b[5] * b[7]) - b[1] * (b[3] * b[8] - b[5] * b[6])
        + b[2] * (b[3] * b[7] - b[4] * b[6]);
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos()
}

fn norm_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 1);
    let trials = cfg.trials;

    let mut dephase_drift = 0.0f64;
    let mut definite_failures = 0usize;
    let mut homogeneity_worst = 0.0f64;
    let mut triangle_worst = f64::NEG_INFINITY;
    let mut submult_worst = f64::NEG_INFINITY;
    let mut trace_sym_worst = 0.0f64;
    let mut closed_form_worst = 0.0f64;

    for t in 0..trials {
        let d = 2 + t % 7;
        let a = random_general(d, &mut rng)?;
        let b = random_general(d, &mut rng)?;

        let da = a.dephase();
        dephase_drift = dephase_drift.max(da.dephase().max_abs_diff(&da)?);

        let na = a.h_norm();
        let nb = b.h_norm();
        if na <= 0.0 || (na <= 1e-10) != (a.max_abs() <= 1e-10) {
            definite_failures += 1;
        }

        let c_re = -2.0 + 4.0 * rng.random::<f64>();
        let scaled = a.scale(c_re);
        homogeneity_worst = homogeneity_worst.max((scaled.h_norm() - c_re.abs() * na).abs());
        let c_im = num_complex::Complex64::new(0.0, -2.0 + 4.0 * rng.random::<f64>());
        let scaled_im = a.scale_complex(c_im);
        homogeneity_worst = homogeneity_worst.max((scaled_im.h_norm() - c_im.norm() * na).abs());

        let sum = a.add_scaled(1.0, &b)?;
        triangle_worst = triangle_worst.max(sum.h_norm() - (na + nb));
        let prod = a.matmul(&b)?;
        submult_worst = submult_worst.max(prod.h_norm() - na * nb);

        let ha = a.hermitian_part();
        let hb = b.hermitian_part();
        let fwd = trace_product(&ha, &hb, DEFAULT_TOL)?;
        let rev = trace_product(&hb, &ha, DEFAULT_TOL)?;
        trace_sym_worst = trace_sym_worst.max((fwd - rev).abs());

        for small_d in [2usize, 3] {
            let h = random_general(small_d, &mut rng)?.hermitian_part();
            let (lmin, _) = min_eigenvalue(&h, DEFAULT_TOL)?;
            let oracle = if small_d == 2 {
                eig_min_2x2(&h)
            } else {
                eig_min_3x3(&h)
            };
            closed_form_worst = closed_form_worst.max((lmin - oracle).abs());
        }
    }

    // A unit-modulus scalar with both real and imaginary part changes the
    // value: the pseudo-norm is deliberately not claimed homogeneous there.
    let mut probe = ComplexMatrix::zeros(2)?;
    probe[(0, 1)] = num_complex::Complex64::new(1.0, 0.0);
    let c = num_complex::Complex64::new(1.0, 1.0) / std::f64::consts::SQRT_2;
    let counterexample_gap = (probe.scale_complex(c).h_norm() - probe.h_norm()).abs();

    Ok(vec![
        check(
            "dephase-idempotent",
            dephase_drift == 0.0,
            format!("max drift {} over {trials} matrices (must be exactly 0)", fmt_float(dephase_drift)),
        ),
        check(
            "pseudo-norm-definite",
            definite_failures == 0,
            format!("{definite_failures} definiteness failures over {trials} matrices"),
        ),
        check(
            "pseudo-norm-homogeneous-real-imaginary",
            homogeneity_worst <= 1e-10,
            format!("max |scale defect| {} (bound {})", fmt_float(homogeneity_worst), fmt_float(1e-10)),
        ),
        check(
            "complex-scalar-counterexample-documented",
            counterexample_gap > 0.1,
            format!(
                "unit scalar with equal parts shifts the value by {}; general complex homogeneity is not claimed",
                fmt_float(counterexample_gap)
            ),
        ),
        check(
            "pseudo-norm-triangle",
            triangle_worst <= 1e-10,
            format!("max excess {} (bound {})", fmt_float(triangle_worst), fmt_float(1e-10)),
        ),
        check(
            "pseudo-norm-submultiplicative",
            submult_worst <= 1e-10,
            format!("max excess {} (bound {})", fmt_float(submult_worst), fmt_float(1e-10)),
        ),
        check(
            "trace-product-symmetric",
            trace_sym_worst <= 1e-12,
            format!("max asymmetry {} (bound {})", fmt_float(trace_sym_worst), fmt_float(1e-12)),
        ),
        check(
            "min-eigenvalue-closed-forms",
            closed_form_worst <= 1e-10,
            format!(
                "max deviation from 2x2/3x3 characteristic-polynomial roots {} (bound {})",
                fmt_float(closed_form_worst),
                fmt_float(1e-10)
            ),
        ),
    ])
}

// ---- theorem1 suite ----------------------------------------------------------

fn theorem1_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 2);
    let trials = cfg.trials;
    let mut classification_failures = 0usize;
    let mut refinement_failures = 0usize;
    let mut refinements = 0usize;

    for t in 0..trials {
        let d = 2 + t % 5;
        let zero_diag = t % 2 == 0;
        let w = random_witness_with(d, zero_diag, &mut rng)?;
        let optimal = w.is_optimal();
        if optimal != (max_abs_diag(w.matrix()) <= 1e-9) {
            classification_failures += 1;
        }
        if !zero_diag {
            refinements += 1;
            // Dropping the diagonal leaves a strictly finer witness: the
            // original decomposes over it with the diagonal as the
            // positive remainder.
            let stripped = Witness::new(w.matrix().offdiag(), DEFAULT_TOL)?;
            let report = is_finer(&w, &stripped)?;
            let ok = stripped.is_optimal()
                && report.finer
                && report.epsilon.unwrap_or(0.0) > 0.0
                && report.xi_lower.unwrap_or(0.0) >= 1.0;
            if !ok {
                refinement_failures += 1;
            }
        }
    }

    Ok(vec![
        check(
            "optimal-iff-zero-diagonal",
            classification_failures == 0,
            format!("{classification_failures} misclassifications over {trials} random witnesses"),
        ),
        check(
            "diagonal-subtraction-strictly-refines",
            refinement_failures == 0,
            format!("{refinement_failures} failures over {refinements} non-optimal witnesses"),
        ),
    ])
}

// ---- theorem2 suite ----------------------------------------------------------

fn theorem2_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 3);
    let trials = cfg.trials;

    let mut diag_worst = 0.0f64;
    let mut expectation_worst = f64::NEG_INFINITY;
    let mut optimal_failures = 0usize;
    let mut duality_worst = 0.0f64;

    let mut used = 0usize;
    while used < trials {
        let d = 2 + used % 5;
        let kind = if used % 4 == 0 { StateKind::Pure } else { StateKind::Mixed };
        let rho = random_density_with(d, kind, &mut rng)?;
        if rho.is_incoherent(cfg.tol) {
            continue;
        }
        used += 1;

        let w = construct_witness(&rho, cfg.tol)?;
        diag_worst = diag_worst.max(max_abs_diag(w.matrix()));
        expectation_worst = expectation_worst.max(w.expectation(&rho)?);
        if !w.is_optimal() {
            optimal_failures += 1;
        }

        let unified = unified_witness(&rho, cfg.tol)?;
        let gap = (unified.expectation - c_h(&rho)).abs();
        let direct = trace_product(unified.witness.matrix(), rho.matrix(), DEFAULT_TOL)?;
        duality_worst = duality_worst.max(gap.max((direct - c_h(&rho)).abs()));
    }

    // The off-diagonal family: traceless, pairwise orthogonal, and of
    // uniform strength 1/2 under the trace inner product.
    let mut ortho_worst = 0.0f64;
    for d in 2..=6 {
        let mut family = Vec::new();
        for l in 0..d {
            for m in (l + 1)..d {
                family.push(generator_witness(d, l, m, GeneratorPart::Real)?);
                family.push(generator_witness(d, l, m, GeneratorPart::Imag)?);
            }
        }
        for (a, wa) in family.iter().enumerate() {
            for (b, wb) in family.iter().enumerate() {
                let overlap = trace_product(wa.matrix(), wb.matrix(), DEFAULT_TOL)?;
                let target = if a == b { 0.5 } else { 0.0 };
                ortho_worst = ortho_worst.max((overlap - target).abs());
            }
        }
    }

    Ok(vec![
        check(
            "constructed-witness-zero-diagonal",
            diag_worst == 0.0,
            format!("max |diagonal| {} over {trials} states (must be exactly 0)", fmt_float(diag_worst)),
        ),
        check(
            "constructed-witness-detects-source",
            expectation_worst < -1e-12,
            format!("max expectation {} (bound {})", fmt_float(expectation_worst), fmt_float(-1e-12)),
        ),
        check(
            "constructed-witness-optimal",
            optimal_failures == 0,
            format!("{optimal_failures} non-optimal constructions over {trials} states"),
        ),
        check(
            "generator-family-orthonormal-half",
            ortho_worst <= 1e-12,
            format!(
                "max deviation from tr(G_a G_b) = (1/2) delta_ab is {} (bound {})",
                fmt_float(ortho_worst),
                fmt_float(1e-12)
            ),
        ),
        check(
            "unified-witness-matches-measure",
            duality_worst <= 1e-10,
            format!("max |expectation - measure| {} (bound {})", fmt_float(duality_worst), fmt_float(1e-10)),
        ),
    ])
}

// ---- lemma1 suite -----------------------------------------------------------

/// Construct a decomposable witness pair whose detection set is reachable
/// by random mixed states: the ratio estimator samples exactly that
/// distribution, so a pair is only accepted once a quick draw finds enough
/// detected states.
fn finer_pair<R: Rng>(
    d: usize,
    probe_budget: usize,
    rng: &mut R,
) -> Result<(Witness, Witness, f64)> {
    for _ in 0..500 {
        let w2 = random_witness_with(d, true, rng)?;
        // Full-rank but shallow positive part: a deep one pushes the
        // detection set into the tail of the sampling distribution.
        let v = random_unit_vector(d, rng);
        let p = ComplexMatrix::outer(&v, &v)?
            .add_scaled(0.15 + 0.25 * rng.random::<f64>(), &ComplexMatrix::identity(d)?)?;
        let eps = 0.08 + 0.14 * rng.random::<f64>();
        let m1 = w2.matrix().scale(1.0 - eps).add_scaled(eps, &p)?;
        let Ok(w1) = Witness::new(m1, DEFAULT_TOL) else {
            continue;
        };
        let mut hits = 0usize;
        for _ in 0..probe_budget {
            let rho = random_density_with(d, StateKind::Mixed, rng)?;
            if w1.expectation(&rho)? < -1e-3 {
                hits += 1;
                if hits >= 5 {
                    break;
                }
            }
        }
        if hits >= 5 {
            return Ok((w1, w2, eps));
        }
    }
    Err(Error::Domain(
        "could not construct a witness pair with a reachable detection set".into(),
    ))
}

fn lemma1_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 4);
    let pairs = (cfg.trials / 20).clamp(4, 50);
    let states_per_pair = cfg.trials;
    let xi_samples = (cfg.trials * 2).clamp(200, 2000);

    let mut pair_failures = 0usize;
    let mut boundary_worst = f64::NEG_INFINITY;
    let mut boundary_states = 0usize;
    let mut dominance_worst = f64::NEG_INFINITY;
    let mut dominance_states = 0usize;
    let mut ratio_worst = f64::NEG_INFINITY;
    let mut ratio_states = 0usize;
    let mut xi_min = f64::INFINITY;
    let mut xi_consistency_worst = f64::NEG_INFINITY;

    for pair_idx in 0..pairs {
        let d = 2 + pair_idx % 4;
        let (w1, w2, _) = finer_pair(d, (xi_samples / 2).max(100), &mut rng)?;
        let report = is_finer(&w1, &w2)?;
        if !(report.finer
            && report.epsilon.unwrap_or(0.0) > 0.0
            && report.xi_lower.unwrap_or(0.0) >= 1.0)
        {
            pair_failures += 1;
            continue;
        }
        let xi_hat = estimate_xi(&w1, &w2, xi_samples, cfg.seed.wrapping_add(pair_idx as u64))?;
        xi_min = xi_min.min(xi_hat);
        xi_consistency_worst =
            xi_consistency_worst.max(report.xi_lower.unwrap_or(1.0) - xi_hat);

        let mut detected: Option<(DensityMatrix, f64)> = None;
        let mut missed: Option<(DensityMatrix, f64)> = None;
        for s in 0..states_per_pair {
            let kind = if s % 4 == 0 { StateKind::Pure } else { StateKind::Mixed };
            let rho = random_density_with(d, kind, &mut rng)?;
            let t1 = w1.expectation(&rho)?;
            let t2 = w2.expectation(&rho)?;
            if t1 < -1e-12 {
                dominance_states += 1;
                dominance_worst = dominance_worst.max(t2 - t1);
                if detected.is_none() {
                    detected = Some((rho, t1));
                }
            } else if t1 > 1e-12 {
                ratio_states += 1;
                ratio_worst = ratio_worst.max(t2 - xi_hat * t1);
                if missed.is_none() {
                    missed = Some((rho, t1));
                }
            }
        }

        // States prepared exactly on the coarse witness's boundary: mix one
        // detected and one undetected sample to cancel the expectation.
        if let (Some((rho_neg, t_neg)), Some((rho_pos, t_pos))) = (detected, missed) {
            let t = t_pos / (t_pos - t_neg);
            let boundary = rho_pos.mix(t, &rho_neg)?;
            if w1.expectation(&boundary)?.abs() <= 1e-10 {
                boundary_states += 1;
                boundary_worst = boundary_worst.max(w2.expectation(&boundary)?);
            }
        }
    }

    Ok(vec![
        check(
            "constructed-pairs-accepted",
            pair_failures == 0,
            format!("{pair_failures} of {pairs} constructed decompositions rejected"),
        ),
        check(
            "finer-zero-boundary",
            boundary_worst <= 1e-9,
            format!(
                "max fine-witness expectation {} on {boundary_states} boundary states (bound {})",
                fmt_float(boundary_worst),
                fmt_float(1e-9)
            ),
        ),
        check(
            "finer-dominates-on-detection-set",
            dominance_worst <= 1e-9,
            format!(
                "max (fine - coarse) expectation {} on {dominance_states} detected states (bound {})",
                fmt_float(dominance_worst),
                fmt_float(1e-9)
            ),
        ),
        check(
            "finer-ratio-bound-above",
            ratio_worst <= 1e-9,
            format!(
                "max excess over the ratio bound {} on {ratio_states} undetected states (bound {})",
                fmt_float(ratio_worst),
                fmt_float(1e-9)
            ),
        ),
        check(
            "detection-ratio-at-least-one",
            xi_min >= 1.0 - 1e-9,
            format!("min ratio estimate {} (bound {})", fmt_float(xi_min), fmt_float(1.0 - 1e-9)),
        ),
        check(
            "xi-consistent-with-decomposition",
            xi_consistency_worst <= 1e-6,
            format!(
                "max (certified lower bound - estimate) {} (bound {})",
                fmt_float(xi_consistency_worst),
                fmt_float(1e-6)
            ),
        ),
    ])
}

// ---- theorem3 suite ----------------------------------------------------------

fn theorem3_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 5);
    let trials = cfg.trials;

    // C1: the measure is nonnegative and vanishes exactly on diagonal states.
    let mut faithful_failures = 0usize;
    for t in 0..trials {
        let d = 2 + t % 4;
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;
        let coherent_value = c_h(&rho);
        let dephased_value = c_h(&rho.dephased());
        let max_off = rho.matrix().max_offdiag_abs();
        let ok = coherent_value >= 0.0
            && dephased_value == 0.0
            && coherent_value + 1e-15 >= max_off
            && (coherent_value > 1e-9 || max_off <= 1e-9);
        if !ok {
            faithful_failures += 1;
        }
    }

    // Phase-free channels: both measures asserted monotone.
    let mut real_mono_worst = f64::NEG_INFINITY;
    let mut real_strong_worst = f64::NEG_INFINITY;
    let mut preserve_failures = 0usize;
    for t in 0..trials {
        let d = 2 + t % 4;
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;
        let ch = random_incoherent_channel_with(
            d,
            d,
            AmplitudeKind::Real,
            cfg.seed.wrapping_add(1_000_000 + t as u64),
        )?;
        let out = ch.apply(&rho)?;
        real_mono_worst = real_mono_worst
            .max(c_h(&out) - c_h(&rho))
            .max(c_l1(&out) - c_l1(&rho));
        let mut selected_h = 0.0;
        let mut selected_l1 = 0.0;
        for (p, part) in ch.selective_outcomes(&rho)? {
            selected_h += p * c_h(&part);
            selected_l1 += p * c_l1(&part);
        }
        real_strong_worst = real_strong_worst
            .max(selected_h - c_h(&rho))
            .max(selected_l1 - c_l1(&rho));
        if !ch.apply(&rho.dephased())?.is_incoherent(cfg.tol) {
            preserve_failures += 1;
        }
    }

    // Generic-phase channels: the modulus measure stays the asserted
    // control; the split-modulus measure is phase-sensitive and its
    // violations are counted, not asserted away.
    let mut complex_l1_worst = f64::NEG_INFINITY;
    let mut complex_h_violations = 0usize;
    let mut complex_h_worst = 0.0f64;
    let mut complex_h_strong_violations = 0usize;
    let mut complex_h_strong_worst = 0.0f64;
    for t in 0..trials {
        let d = 2 + t % 4;
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;
        let ch = random_incoherent_channel_with(
            d,
            d,
            AmplitudeKind::Complex,
            cfg.seed.wrapping_add(2_000_000 + t as u64),
        )?;
        let out = ch.apply(&rho)?;
        complex_l1_worst = complex_l1_worst.max(c_l1(&out) - c_l1(&rho));
        let gain = c_h(&out) - c_h(&rho);
        if gain > 1e-9 {
            complex_h_violations += 1;
            complex_h_worst = complex_h_worst.max(gain);
        }
        let mut selected_h = 0.0;
        let mut selected_l1 = 0.0;
        for (p, part) in ch.selective_outcomes(&rho)? {
            selected_h += p * c_h(&part);
            selected_l1 += p * c_l1(&part);
        }
        complex_l1_worst = complex_l1_worst.max(selected_l1 - c_l1(&rho));
        let strong_gain = selected_h - c_h(&rho);
        if strong_gain > 1e-9 {
            complex_h_strong_violations += 1;
            complex_h_strong_worst = complex_h_strong_worst.max(strong_gain);
        }
        if !ch.apply(&rho.dephased())?.is_incoherent(cfg.tol) {
            preserve_failures += 1;
        }
    }

    // C3: mixing never creates coherence beyond the ensemble average.
    let mut convexity_worst = f64::NEG_INFINITY;
    for t in 0..trials {
        let d = 2 + t % 4;
        let parts = 2 + t % 3;
        let mut weights: Vec<f64> = (0..parts).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let states: Vec<DensityMatrix> = (0..parts)
            .map(|k| {
                let kind = if k % 2 == 0 { StateKind::Mixed } else { StateKind::Pure };
                random_density_with(d, kind, &mut rng)
            })
            .collect::<Result<_>>()?;
        let mut mixture = ComplexMatrix::zeros(d)?;
        let mut avg_h = 0.0;
        let mut avg_l1 = 0.0;
        for (w, s) in weights.iter().zip(&states) {
            mixture = mixture.add_scaled(*w, s.matrix())?;
            avg_h += w * c_h(s);
            avg_l1 += w * c_l1(s);
        }
        let mixed = DensityMatrix::new(mixture, DEFAULT_TOL)?;
        convexity_worst = convexity_worst
            .max(c_h(&mixed) - avg_h)
            .max(c_l1(&mixed) - avg_l1);
    }

    // Flagged ensembles: the block state's coherence equals the ensemble
    // average exactly, and equality holds for dephasing interpolations.
    let mut identity_worst = 0.0f64;
    let mut dephasing_worst = 0.0f64;
    let mut input_bound_worst = f64::NEG_INFINITY;
    let mut free_form_violations = 0usize;
    let mut free_form_worst = 0.0f64;
    let c2c_trials = trials.min(400);
    for t in 0..c2c_trials {
        let d = 2 + t % 3;
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;

        let tmix = rng.random::<f64>();
        let parts = vec![(1.0 - tmix, rho.clone()), (tmix, rho.dephased())];
        let fc = c2c_check(&parts, cfg.tol)?;
        let avg: f64 = parts.iter().map(|(p, s)| p * c_h(s)).sum();
        identity_worst = identity_worst.max((fc.block_coherence - avg).abs());
        dephasing_worst = dephasing_worst.max((fc.mixture_coherence - fc.block_coherence).abs());

        let ch = random_incoherent_channel_with(
            d,
            d,
            AmplitudeKind::Real,
            cfg.seed.wrapping_add(3_000_000 + t as u64),
        )?;
        let outcomes = ch.selective_outcomes(&rho)?;
        if !outcomes.is_empty() {
            let fc = c2c_check(&outcomes, cfg.tol)?;
            input_bound_worst = input_bound_worst.max(fc.block_coherence - c_h(&rho));
        }

        // Free-form decompositions: a mixture of random pure states can be
        // far less coherent than its parts, so the flagged comparison runs
        // the other way; count how often.
        let parts = 2 + t % 3;
        let mut weights: Vec<f64> = (0..parts).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        let decomposition: Vec<(f64, DensityMatrix)> = weights
            .into_iter()
            .map(|w| Ok((w, random_density_with(d, StateKind::Pure, &mut rng)?)))
            .collect::<Result<_>>()?;
        let fc = c2c_check(&decomposition, cfg.tol)?;
        if !fc.holds {
            free_form_violations += 1;
            free_form_worst = free_form_worst.max(fc.block_coherence - fc.mixture_coherence);
        }
    }

    Ok(vec![
        check(
            "measure-nonnegative-faithful",
            faithful_failures == 0,
            format!("{faithful_failures} faithfulness failures over {trials} states"),
        ),
        check(
            "phase-free-monotone",
            real_mono_worst <= 1e-9,
            format!(
                "max coherence gain {} under {trials} phase-free channels (bound {})",
                fmt_float(real_mono_worst),
                fmt_float(1e-9)
            ),
        ),
        check(
            "phase-free-strong-monotone",
            real_strong_worst <= 1e-9,
            format!(
                "max selective-average gain {} (bound {})",
                fmt_float(real_strong_worst),
                fmt_float(1e-9)
            ),
        ),
        check(
            "convexity",
            convexity_worst <= 1e-9,
            format!(
                "max mixing gain {} over {trials} ensembles (bound {})",
                fmt_float(convexity_worst),
                fmt_float(1e-9)
            ),
        ),
        check(
            "incoherence-preserved",
            preserve_failures == 0,
            format!("{preserve_failures} channels mapped a diagonal state off the diagonal"),
        ),
        check(
            "modulus-control-monotone",
            complex_l1_worst <= 1e-9,
            format!(
                "max modulus-measure gain {} under generic-phase channels (bound {})",
                fmt_float(complex_l1_worst),
                fmt_float(1e-9)
            ),
        ),
        flagged(
            "complex-phase-monotonicity-flagged",
            format!(
                "split-modulus measure grew under {complex_h_violations} of {trials} generic-phase channels \
                 (max gain {}) and under {complex_h_strong_violations} selective averages (max gain {}); \
                 phase unitaries trade real for imaginary weight, so this is expected and documented",
                fmt_float(complex_h_worst),
                fmt_float(complex_h_strong_worst)
            ),
        ),
        check(
            "flagged-ensemble-identity",
            identity_worst <= 1e-12,
            format!(
                "max |block coherence - ensemble average| {} (bound {})",
                fmt_float(identity_worst),
                fmt_float(1e-12)
            ),
        ),
        check(
            "dephasing-split-equality",
            dephasing_worst <= 1e-12,
            format!(
                "max |mixture - block| {} for dephasing interpolations (bound {})",
                fmt_float(dephasing_worst),
                fmt_float(1e-12)
            ),
        ),
        check(
            "measured-ensemble-input-bound",
            input_bound_worst <= 1e-9,
            format!(
                "max (ensemble average - input coherence) {} under phase-free measurements (bound {})",
                fmt_float(input_bound_worst),
                fmt_float(1e-9)
            ),
        ),
        flagged(
            "free-decomposition-direction-flagged",
            format!(
                "{free_form_violations} of {c2c_trials} free-form decompositions had a more coherent \
                 ensemble than mixture (max gap {}); convexity runs the other way, so the comparison \
                 only holds for measurement-induced ensembles",
                fmt_float(free_form_worst)
            ),
        ),
    ])
}

// ---- theorem4 suite ----------------------------------------------------------

fn theorem4_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 6);
    let trials = cfg.trials;

    let mut qubit_worst = 0.0f64;
    for _ in 0..trials {
        let rho = random_density_with(2, StateKind::Mixed, &mut rng)?;
        let sol = roc(&rho, cfg.tol)?;
        let oracle = 2.0 * rho.matrix()[(0, 1)].norm();
        qubit_worst = qubit_worst.max((sol.value - oracle).abs());
    }

    let mut feasibility_worst = f64::NEG_INFINITY;
    let mut value_consistency_worst = 0.0f64;
    let mut dual_gap_worst = f64::NEG_INFINITY;
    let mut dual_sign_worst = f64::NEG_INFINITY;
    for t in 0..trials {
        let d = 2 + t % 3;
        let kind = if t % 3 == 0 { StateKind::Pure } else { StateKind::Mixed };
        let rho = random_density_with(d, kind, &mut rng)?;
        let sol = roc(&rho, cfg.tol)?;
        // Independent feasibility audit of the reported cover.
        let mut cover = ComplexMatrix::zeros(d)?;
        for (i, &di) in sol.incoherent_cover.iter().enumerate() {
            cover[(i, i)] = num_complex::Complex64::new(di, 0.0);
        }
        let gap = cover.add_scaled(-1.0, rho.matrix())?;
        let (lmin, _) = min_eigenvalue(&gap, DEFAULT_TOL)?;
        feasibility_worst = feasibility_worst.max(-lmin);
        let mass: f64 = sol.incoherent_cover.iter().sum();
        value_consistency_worst = value_consistency_worst.max((mass - 1.0 - sol.value).abs());
        dual_gap_worst = dual_gap_worst.max(sol.dual_gap);
        dual_sign_worst = dual_sign_worst.max(-sol.dual_gap);
    }

    let mut duality_worst = 0.0f64;
    let mut linearity_worst = 0.0f64;
    let mut shift_worst = 0.0f64;
    for t in 0..trials {
        let d = 2 + t % 4;
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;
        if !rho.is_incoherent(cfg.tol) {
            let unified = unified_witness(&rho, cfg.tol)?;
            duality_worst = duality_worst.max((unified.expectation - c_h(&rho)).abs());
        }
        let t_mix = rng.random::<f64>();
        let mixed = rho.mix(t_mix, &rho.dephased())?;
        linearity_worst = linearity_worst.max((c_h(&mixed) - (1.0 - t_mix) * c_h(&rho)).abs());
        // Replacing rho by c*I - rho negates every off-diagonal entry and
        // leaves the split-modulus sum unchanged.
        let c_shift = 1.0 + rng.random::<f64>();
        let shifted = ComplexMatrix::identity(d)?
            .scale(c_shift)
            .add_scaled(-1.0, rho.matrix())?;
        shift_worst = shift_worst
            .max((shifted.offdiag().h_norm() - rho.matrix().offdiag().h_norm()).abs());
    }

    let rescale_trials = trials.min(500);
    let mut residual_worst = 0.0f64;
    let mut unit_bound_violations = 0usize;
    let mut tau_coherence_max = 0.0f64;
    let mut used = 0usize;
    while used < rescale_trials {
        let d = 2 + used % 3;
        let kind = if used % 3 == 0 { StateKind::Pure } else { StateKind::Mixed };
        let rho = random_density_with(d, kind, &mut rng)?;
        if rho.is_incoherent(cfg.tol) {
            continue;
        }
        used += 1;
        let sc = scaling_check(&rho, cfg.tol)?;
        residual_worst = residual_worst.max(sc.residual);
        tau_coherence_max = tau_coherence_max.max(sc.tau_coherence);
        if !sc.unit_bound_ok {
            unit_bound_violations += 1;
        }
    }

    Ok(vec![
        check(
            "qubit-robustness-oracle",
            qubit_worst <= 1e-6,
            format!(
                "max |solver - twice the off-diagonal modulus| {} over {trials} qubits (bound {})",
                fmt_float(qubit_worst),
                fmt_float(1e-6)
            ),
        ),
        check(
            "cover-feasible-value-consistent",
            feasibility_worst <= 1e-9 && value_consistency_worst <= 1e-12,
            format!(
                "max cover infeasibility {} (bound {}); max |mass - 1 - value| {} (bound {})",
                fmt_float(feasibility_worst),
                fmt_float(1e-9),
                fmt_float(value_consistency_worst),
                fmt_float(1e-12)
            ),
        ),
        check(
            "dual-bound-below-value",
            dual_sign_worst <= 1e-9 && dual_gap_worst <= 1e-4,
            format!(
                "max negative gap {} (bound {}); max dual gap {} (bound {})",
                fmt_float(dual_sign_worst),
                fmt_float(1e-9),
                fmt_float(dual_gap_worst),
                fmt_float(1e-4)
            ),
        ),
        check(
            "measure-witness-duality",
            duality_worst <= 1e-10,
            format!("max |witness expectation - measure| {} (bound {})", fmt_float(duality_worst), fmt_float(1e-10)),
        ),
        check(
            "dephasing-mixture-linearity",
            linearity_worst <= 1e-12,
            format!("max linearity defect {} (bound {})", fmt_float(linearity_worst), fmt_float(1e-12)),
        ),
        check(
            "identity-shift-invariance",
            shift_worst <= 1e-12,
            format!("max measure change under identity shifts {} (bound {})", fmt_float(shift_worst), fmt_float(1e-12)),
        ),
        check(
            "rescaling-residual-identity",
            residual_worst <= 1e-6,
            format!(
                "max |coherence - value * residual coherence| {} over {rescale_trials} states (bound {})",
                fmt_float(residual_worst),
                fmt_float(1e-6)
            ),
        ),
        flagged(
            "residual-unit-bound-flagged",
            format!(
                "residual-state coherence exceeded 1 for {unit_bound_violations} of {rescale_trials} states \
                 (max {}); the rescaling identity pins it at the state's coherence over its robustness, \
                 which the split-modulus measure does not cap at 1, so it is reported, not assumed",
                fmt_float(tau_coherence_max)
            ),
        ),
    ])
}

// ---- expected-measurements suite ---------------------------------------------

fn expected_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut range_failures = 0usize;
    let mut identity_failures = 0usize;
    let mut boundary_failures = 0usize;
    for n in 1..=20usize {
        let mut previous = 0.0;
        for i in 0..=n {
            let e = scheduler::expected_measurements(n, i)?;
            if !(1.0 - 1e-12..=n as f64 + 1e-12).contains(&e) || e + 1e-12 < previous {
                range_failures += 1;
            }
            previous = e;
            let exact = scheduler::expected_measurements_exact(n, i)?;
            let closed = if i == n {
                BigRational::from_integer(BigInt::from(n))
            } else {
                BigRational::new(BigInt::from(n + 1), BigInt::from(n - i + 1))
            };
            if exact != closed {
                identity_failures += 1;
            }
        }
        if scheduler::expected_measurements(n, 0)? != 1.0
            || scheduler::expected_measurements(n, n)? != n as f64
        {
            boundary_failures += 1;
        }
    }

    // Monte Carlo versus the exact mean, exhaustively over small walks.
    let mc_trials = ((cfg.trials as u64) * 10).clamp(2_000, 100_000);
    let mut mc_worst_sigma = 0.0f64;
    let mut mc_failures = 0usize;
    let mut mc_pairs = 0usize;
    for n in 1..=12usize {
        for i in 0..=n {
            mc_pairs += 1;
            let e = scheduler::expected_measurements(n, i)?;
            let (mean, stderr) = scheduler::monte_carlo_measurements(
                n,
                i,
                mc_trials,
                cfg.seed
                    .wrapping_add((n as u64) << 32)
                    .wrapping_add(i as u64),
            )?;
            if stderr == 0.0 {
                if mean != e {
                    mc_failures += 1;
                }
            } else {
                let sigmas = (mean - e).abs() / stderr;
                mc_worst_sigma = mc_worst_sigma.max(sigmas);
                if sigmas > 3.0 {
                    mc_failures += 1;
                }
            }
        }
    }

    let spot_trials = ((cfg.trials as u64) * 100).clamp(5_000, 1_000_000);
    let spot = scheduler::expectation_report(56, 28, spot_trials, cfg.seed.wrapping_add(77))?;
    let spot_sigmas = if spot.mc_stderr > 0.0 {
        (spot.e_mc - spot.e_formula).abs() / spot.mc_stderr
    } else {
        f64::INFINITY
    };

    let reference_gap = (scheduler::QUOTED_MEAN_56_28 - spot.e_formula).abs();
    let doubled = scheduler::expected_measurements(112, 56)?;

    // Mean walk length of the detector against the waiting-time mean, on a
    // state whose imaginary components all vanish exactly.
    let mut rng = suite_rng(cfg.seed, 7);
    let d = 3usize;
    let basis = tomo::su_basis(d)?;
    let rho = loop {
        let candidate = random_real_density(d, &mut rng)?;
        if candidate.matrix().max_offdiag_abs() > 1e-2 {
            let small = (0..d)
                .flat_map(|l| ((l + 1)..d).map(move |m| (l, m)))
                .any(|(l, m)| candidate.matrix()[(l, m)].re.abs() < 1e-3);
            if !small {
                break candidate;
            }
        }
    };
    let n_obs = d * d - d;
    let zeros = n_obs / 2;
    let expected_walk = scheduler::expected_measurements(n_obs, zeros)?;
    let walks = ((cfg.trials as u64) * 100).clamp(5_000, 100_000);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut diagonal_requests = 0usize;
    for k in 0..walks {
        let result = scheduler::detect(
            |j, _| {
                if !basis.is_offdiag(j) {
                    diagonal_requests += 1;
                }
                tomo::expectation_record(&rho, &basis, j)
            },
            d,
            scheduler::OrderPolicy::Random,
            0,
            1e-3,
            cfg.seed.wrapping_add(500_000 + k),
        )?;
        let used = result.measurements_used as f64;
        sum += used;
        sumsq += used * used;
        if result
            .ordering
            .iter()
            .chain(result.witness_index.iter())
            .any(|&j| j >= n_obs)
        {
            diagonal_requests += 1;
        }
    }
    let mean_walk = sum / walks as f64;
    let walk_var = (sumsq / walks as f64 - mean_walk * mean_walk).max(0.0);
    let walk_stderr = (walk_var / walks as f64).sqrt();
    let walk_sigmas = if walk_stderr > 0.0 {
        (mean_walk - expected_walk).abs() / walk_stderr
    } else {
        f64::INFINITY
    };

    Ok(vec![
        check(
            "expectation-in-range-monotone",
            range_failures == 0,
            format!("{range_failures} range/monotonicity failures across all walks up to 20 observables"),
        ),
        check(
            "term-sum-equals-closed-form",
            identity_failures == 0,
            format!("{identity_failures} exact-rational mismatches between the term sum and (N+1)/(N-i+1)"),
        ),
        check(
            "boundary-cases-exact",
            boundary_failures == 0,
            format!("{boundary_failures} boundary failures (no zeros -> 1, all zeros -> N)"),
        ),
        check(
            "monte-carlo-exhaustive-agreement",
            mc_failures == 0,
            format!(
                "{mc_failures} of {mc_pairs} small configurations outside 3 standard errors \
                 (worst {} sigma at {mc_trials} trials each)",
                fmt_float(mc_worst_sigma)
            ),
        ),
        check(
            "monte-carlo-midsize-agreement",
            spot_sigmas <= 3.0,
            format!(
                "56-observable walk with 28 zeros: mean {} vs exact {} ({} sigma at {spot_trials} trials)",
                fmt_float(spot.e_mc),
                fmt_float(spot.e_formula),
                fmt_float(spot_sigmas)
            ),
        ),
        flagged(
            "reference-value-discrepancy-flagged",
            format!(
                "quoted mean {} differs from the exact value {} by {}; it instead matches the \
                 same formula with both counts doubled ({} at 112 observables, 56 zeros)",
                fmt_float(scheduler::QUOTED_MEAN_56_28),
                fmt_float(spot.e_formula),
                fmt_float(reference_gap),
                fmt_float(doubled)
            ),
        ),
        check(
            "walk-mean-matches-expectation",
            walk_sigmas <= 3.0,
            format!(
                "mean adaptive walk length {} vs {} expected ({} sigma over {walks} orderings)",
                fmt_float(mean_walk),
                fmt_float(expected_walk),
                fmt_float(walk_sigmas)
            ),
        ),
        check(
            "walk-never-touches-diagonals",
            diagonal_requests == 0,
            format!("{diagonal_requests} diagonal-observable requests across all walks"),
        ),
    ])
}

// ---- tomography suite ---------------------------------------------------------

fn tomography_suite(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = suite_rng(cfg.seed, 8);

    let mut round_trip_worst = 0.0f64;
    for d in [2usize, 3, 4, 8] {
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;
        let basis = tomo::su_basis(d)?;
        let records: Vec<_> = (0..basis.len())
            .map(|j| tomo::expectation_record(&rho, &basis, j))
            .collect::<Result<_>>()?;
        let rec = tomo::reconstruct(d, &records, &basis)?;
        round_trip_worst = round_trip_worst
            .max(rec.raw.max_abs_diff(rho.matrix())?)
            .max(rec.projected.matrix().max_abs_diff(rho.matrix())?);
    }

    let mut protocol_gap_worst = 0.0f64;
    for _ in 0..cfg.trials.min(100) {
        let rho = random_density_with(2, StateKind::Mixed, &mut rng)?;
        let basis = tomo::su_basis(2)?;
        let records: Vec<_> = (0..basis.len())
            .map(|j| tomo::expectation_record(&rho, &basis, j))
            .collect::<Result<_>>()?;
        let from_generators = tomo::reconstruct(2, &records, &basis)?;
        let from_stokes = tomo::stokes_reconstruct(&tomo::stokes_expectation(&rho, 1e6)?)?;
        protocol_gap_worst =
            protocol_gap_worst.max(from_generators.raw.max_abs_diff(&from_stokes.raw)?);
    }

    let basis2 = tomo::su_basis(2)?;
    let plus = DensityMatrix::pure(&[
        num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        num_complex::Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    ])?;
    let diag_record = tomo::expectation_record(&plus, &basis2, basis2.n_offdiag())?;
    let diagonal_rejected =
        tomo::coherence_decision(&[diag_record], &basis2, 1e-3).is_err();
    let offdiag_records: Vec<_> = (0..basis2.n_offdiag())
        .map(|j| tomo::expectation_record(&plus, &basis2, j))
        .collect::<Result<_>>()?;
    let decision = tomo::coherence_decision(&offdiag_records, &basis2, 1e-3)?;

    // Standard errors should shrink like the square root of the shot
    // budget: compare two budgets a decade apart.
    let mixed = random_density_with(2, StateKind::Mixed, &mut rng)?;
    let seeds = (cfg.trials / 5).clamp(31, 201);
    let mut ratios = Vec::with_capacity(seeds);
    for k in 0..seeds {
        let low = tomo::measure_generator(&mixed, &basis2, 0, 1_000, cfg.seed.wrapping_add(k as u64))?;
        let high =
            tomo::measure_generator(&mixed, &basis2, 0, 10_000, cfg.seed.wrapping_add(9_000 + k as u64))?;
        if high.stderr > 0.0 {
            ratios.push(low.stderr / high.stderr);
        }
    }
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let ratio_median = ratios[ratios.len() / 2];
    let sqrt10 = 10.0f64.sqrt();
    let scaling_ok = (sqrt10 / 3.0..=sqrt10 * 3.0).contains(&ratio_median);

    // Noisy estimates leave the state set only before projection.
    let mut projection_failures = 0usize;
    let mut raw_off_cone = 0usize;
    let noisy_runs = cfg.trials.min(60);
    for k in 0..noisy_runs {
        let d = 2 + k % 3;
        let rho = random_density_with(d, StateKind::Mixed, &mut rng)?;
        let basis = tomo::su_basis(d)?;
        let records: Vec<_> = (0..basis.len())
            .map(|j| tomo::measure_generator(&rho, &basis, j, 200, cfg.seed.wrapping_add(k as u64)))
            .collect::<Result<_>>()?;
        let rec = tomo::reconstruct(d, &records, &basis)?;
        let (raw_min, _) = min_eigenvalue(&rec.raw, DEFAULT_TOL)?;
        if raw_min < -DEFAULT_TOL {
            raw_off_cone += 1;
        }
        let e = eigh(rec.projected.matrix(), DEFAULT_TOL)?;
        let trace: f64 = e.values.iter().sum();
        if e.values.iter().any(|&v| v < -DEFAULT_TOL) || (trace - 1.0).abs() > 1e-12 {
            projection_failures += 1;
        }
    }

    // Qubit reconstruction error at a large shot budget, calibrated against
    // the expected parametric rate.
    let noise_seeds = cfg.trials.clamp(50, 200);
    let mut errors = Vec::with_capacity(noise_seeds);
    let target = random_density_with(2, StateKind::Mixed, &mut rng)?;
    for k in 0..noise_seeds {
        let records: Vec<_> = (0..basis2.len())
            .map(|j| {
                tomo::measure_generator(&target, &basis2, j, 1_000_000, cfg.seed.wrapping_add(40_000 + k as u64))
            })
            .collect::<Result<_>>()?;
        let rec = tomo::reconstruct(2, &records, &basis2)?;
        errors.push(
            rec.projected
                .matrix()
                .add_scaled(-1.0, target.matrix())?
                .frobenius_norm(),
        );
    }
    errors.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let error_median = errors[errors.len() / 2];
    let band_ok = (0.3e-3..=3.0e-3).contains(&error_median);

    Ok(vec![
        check(
            "expectation-round-trip-exact",
            round_trip_worst <= 1e-10,
            format!(
                "max entrywise round-trip error {} across dimensions 2, 3, 4, 8 (bound {})",
                fmt_float(round_trip_worst),
                fmt_float(1e-10)
            ),
        ),
        check(
            "two-protocol-consistency",
            protocol_gap_worst <= 1e-10,
            format!(
                "max disagreement between intensity-ratio and generator reconstructions {} (bound {})",
                fmt_float(protocol_gap_worst),
                fmt_float(1e-10)
            ),
        ),
        check(
            "decisions-use-offdiagonals-only",
            diagonal_rejected && decision.coherent,
            format!(
                "diagonal records rejected: {diagonal_rejected}; off-diagonal records decide: {}",
                decision.coherent
            ),
        ),
        check(
            "stderr-scales-inverse-sqrt",
            scaling_ok,
            format!(
                "median stderr ratio across a decade of shots {} (expected near {}, accepted within x3)",
                fmt_float(ratio_median),
                fmt_float(sqrt10)
            ),
        ),
        check(
            "noisy-estimates-project-to-states",
            projection_failures == 0,
            format!(
                "{projection_failures} invalid projections over {noisy_runs} noisy reconstructions \
                 ({raw_off_cone} raw estimates left the cone, as expected at low shots)"
            ),
        ),
        check(
            "qubit-noise-error-band",
            band_ok,
            format!(
                "median reconstruction error {} at 1e6 shots over {noise_seeds} seeds (band {} to {})",
                fmt_float(error_median),
                fmt_float(0.3e-3),
                fmt_float(3.0e-3)
            ),
        ),
    ])
}
