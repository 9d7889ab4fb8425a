//! Simulated photon-count tomography.
//!
//! The module provides an orthogonal generator basis for traceless Hermitian
//! observables, two simulated measurement protocols — a four-intensity
//! polarization protocol for qubits and a projective generator protocol for
//! qudits — linear state reconstruction with a positive-semidefinite repair
//! step, and a multiple-testing-corrected coherence verdict built from the
//! off-diagonal measurement records alone.
//!
//! Every generator `g` is traceless with `tr(g^2) = 1/2`, so a state expands
//! as `rho = I/d + sum_j 2 tr(rho g_j) g_j`. The off-diagonal generators read
//! the real and imaginary components of individual matrix entries; the
//! diagonal family reads population contrasts. Coherence therefore lives
//! entirely in the off-diagonal records: the diagonal family never enters a
//! verdict.
//!
//! Noise models: intensity counts are Poisson (independent detectors, no
//! shared shot budget); projective measurements are multinomial over the
//! generator's eigenvectors (a fixed number of repetitions of one setting).
//! Both protocols expose an expectation mode that skips sampling and reports
//! exact Born means, used as the infinite-shot reference throughout the
//! tests.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::{eigh, trace_product, ComplexMatrix, DensityMatrix, HermitianOperator, DEFAULT_TOL};
use crate::witness::{generator_witness, GeneratorPart};

/// Largest dimension for which a generator basis is constructed. Costs grow
/// as `d^4` through the completeness sweeps; this cap keeps them interactive.
pub const BASIS_MAX_DIM: usize = 32;

/// Eigenvalues closer than this are treated as one measurement outcome when
/// building count histograms. Generator spectra are exact at machine
/// precision, so the merge only has to absorb solver rounding.
const OUTCOME_MERGE_TOL: f64 = 1e-9;

/// An infinite-shot record reports a nonzero component when the exact mean
/// exceeds this; below it the component is a true zero up to rounding.
pub const EXACT_RECORD_TOL: f64 = 1e-12;

/// One off-diagonal generator: reads the real or imaginary component of the
/// `(l, m)` entry of a density matrix, `l < m`.
#[derive(Clone, Debug)]
pub struct OffdiagGenerator {
    pub l: usize,
    pub m: usize,
    pub part: GeneratorPart,
    pub operator: HermitianOperator,
}

/// Identity of a generator inside a [`GeneratorBasis`]: an off-diagonal
/// component reader, or the `k`-th diagonal population contrast.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorLabel {
    Offdiag {
        l: usize,
        m: usize,
        part: GeneratorPart,
    },
    Diag {
        k: usize,
    },
}

/// An orthogonal basis of `d^2 - 1` traceless Hermitian generators, split
/// into the `d^2 - d` off-diagonal component readers and `d - 1` diagonal
/// contrasts. Flat indices enumerate off-diagonal generators first (pairs in
/// lexicographic order, real before imaginary), then the diagonal family.
#[derive(Clone, Debug)]
pub struct GeneratorBasis {
    dim: usize,
    offdiag: Vec<OffdiagGenerator>,
    diag: Vec<HermitianOperator>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total number of generators, `d^2 - 1`.
    pub fn len(&self) -> usize {
        self.offdiag.len() + self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of off-diagonal generators, `d^2 - d`.
    pub fn n_offdiag(&self) -> usize {
        self.offdiag.len()
    }

    pub fn offdiag(&self) -> &[OffdiagGenerator] {
        &self.offdiag
    }

    pub fn diag(&self) -> &[HermitianOperator] {
        &self.diag
    }

    /// True when flat index `j` names an off-diagonal generator.
    pub fn is_offdiag(&self, j: usize) -> bool {
        j < self.offdiag.len()
    }

    /// Generator at flat index `j`.
    pub fn operator(&self, j: usize) -> Result<&HermitianOperator> {
        if j < self.offdiag.len() {
            Ok(&self.offdiag[j].operator)
        } else if j < self.len() {
            Ok(&self.diag[j - self.offdiag.len()])
        } else {
            Err(Error::Domain(format!(
                "generator index {j} out of range for a basis of {} generators",
                self.len()
            )))
        }
    }

    /// Label of the generator at flat index `j`.
    pub fn label(&self, j: usize) -> Result<GeneratorLabel> {
        if j < self.offdiag.len() {
            let g = &self.offdiag[j];
            Ok(GeneratorLabel::Offdiag {
                l: g.l,
                m: g.m,
                part: g.part,
            })
        } else if j < self.len() {
            Ok(GeneratorLabel::Diag {
                k: j - self.offdiag.len() + 1,
            })
        } else {
            Err(Error::Domain(format!(
                "generator index {j} out of range for a basis of {} generators",
                self.len()
            )))
        }
    }

    /// Flat index of a labelled generator.
    pub fn index_of(&self, label: GeneratorLabel) -> Result<usize> {
        let d = self.dim;
        match label {
            GeneratorLabel::Offdiag { l, m, part } => {
                if l >= m || m >= d {
                    return Err(Error::Domain(format!(
                        "no off-diagonal generator for pair ({l},{m}) at dimension {d}"
                    )));
                }
                let pair_rank = l * d - l * (l + 1) / 2 + (m - l - 1);
                Ok(2 * pair_rank + usize::from(part == GeneratorPart::Imag))
            }
            GeneratorLabel::Diag { k } => {
                if k == 0 || k >= d {
                    return Err(Error::Domain(format!(
                        "no diagonal generator {k} at dimension {d}; valid range is 1..{d}"
                    )));
                }
                Ok(self.offdiag.len() + k - 1)
            }
        }
    }
}

/// Build the generator basis for dimension `d`, `2 <= d <= 32`.
///
/// The off-diagonal generators are the elementary component readers with
/// eigenvalues -1/2 and 1/2; the diagonal family is
/// `D_k = (sum_{l<k} |l><l| - k |k><k|) / sqrt(2 k (k+1))` for
/// `k = 1..d-1`, normalized to the same `tr(D_k^2) = 1/2`.
pub fn su_basis(d: usize) -> Result<GeneratorBasis> {
    if !(2..=BASIS_MAX_DIM).contains(&d) {
        return Err(Error::Domain(format!(
            "generator basis needs 2 <= d <= {BASIS_MAX_DIM}, got {d}"
        )));
    }
    let mut offdiag = Vec::with_capacity(d * d - d);
    for l in 0..d {
        for m in (l + 1)..d {
            for part in [GeneratorPart::Real, GeneratorPart::Imag] {
                let w = generator_witness(d, l, m, part)?;
                offdiag.push(OffdiagGenerator {
                    l,
                    m,
                    part,
                    operator: HermitianOperator::new(w.matrix().clone(), DEFAULT_TOL)?,
                });
            }
        }
    }
    let mut diag = Vec::with_capacity(d - 1);
    for k in 1..d {
        let scale = 1.0 / (2.0 * k as f64 * (k as f64 + 1.0)).sqrt();
        let mut g = ComplexMatrix::zeros(d)?;
        for l in 0..k {
            g[(l, l)] = Complex64::new(scale, 0.0);
        }
        g[(k, k)] = Complex64::new(-(k as f64) * scale, 0.0);
        diag.push(HermitianOperator::new(g, DEFAULT_TOL)?);
    }
    Ok(GeneratorBasis { dim: d, offdiag, diag })
}

/// Outcome tally for one generator measurement. `values` lists the distinct
/// outcome eigenvalues in ascending order and `counts` how many of the
/// `shots` draws landed on each. A record with `shots == 0` is an
/// infinite-shot (expectation-mode) record: `estimate` is the exact Born
/// mean, `stderr` is zero, and the histogram is empty.
#[derive(Clone, Debug)]
pub struct CountRecord {
    /// Flat generator index within the basis that produced the record.
    pub index: usize,
    pub shots: u64,
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    /// Empirical mean outcome (exact mean for `shots == 0`).
    pub estimate: f64,
    /// Standard error of `estimate`; never zero for sampled records thanks
    /// to the resolution floor `(max - min) / (2 shots)`.
    pub stderr: f64,
}

impl CountRecord {
    /// True for infinite-shot records produced by [`expectation_record`].
    pub fn is_exact(&self) -> bool {
        self.shots == 0
    }
}

/// Measure generator `j` on `rho` with a finite shot budget: diagonalize the
/// generator, draw a multinomial sample over its eigenvectors with Born
/// probabilities, and summarize the outcome histogram.
///
/// The standard error is the sample standard deviation over `sqrt(shots)`,
/// floored at `(max_outcome - min_outcome) / (2 shots)` so that a histogram
/// concentrated on a single outcome still reports its resolution limit
/// rather than a spurious zero.
pub fn measure_generator(
    rho: &DensityMatrix,
    basis: &GeneratorBasis,
    j: usize,
    shots: u64,
    seed: u64,
) -> Result<CountRecord> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(basis.dim(), rho.dim()));
    }
    if shots == 0 {
        return Err(Error::Domain(
            "sampled measurement needs at least one shot".into(),
        ));
    }
    let g = basis.operator(j)?;
    let e = eigh(g.matrix(), DEFAULT_TOL)?;

    let d = basis.dim();
    let mut raw_probs = Vec::with_capacity(d);
    for k in 0..d {
        let p = rho.matrix().quadratic_form(&e.vector(k))?.re.max(0.0);
        raw_probs.push(p);
    }
    let total: f64 = raw_probs.iter().sum();
    for p in &mut raw_probs {
        *p /= total;
    }

    // Merge numerically degenerate eigenvalues into single outcomes.
    let mut values = Vec::new();
    let mut probs = Vec::new();
    let mut k = 0;
    while k < d {
        let mut hi = k;
        while hi + 1 < d && e.values[hi + 1] - e.values[k] <= OUTCOME_MERGE_TOL {
            hi += 1;
        }
        let members = hi - k + 1;
        values.push(e.values[k..=hi].iter().sum::<f64>() / members as f64);
        probs.push(raw_probs[k..=hi].iter().sum::<f64>());
        k = hi + 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = multinomial(&probs, shots, &mut rng);

    let n = shots as f64;
    let estimate = values
        .iter()
        .zip(&counts)
        .map(|(v, &c)| v * c as f64)
        .sum::<f64>()
        / n;
    let second = values
        .iter()
        .zip(&counts)
        .map(|(v, &c)| v * v * c as f64)
        .sum::<f64>()
        / n;
    let variance = if shots > 1 {
        ((second - estimate * estimate) * n / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let spread = values.last().expect("at least one outcome") - values[0];
    let stderr = (variance / n).sqrt().max(spread / (2.0 * n));

    Ok(CountRecord {
        index: j,
        shots,
        values,
        counts,
        estimate,
        stderr,
    })
}

/// Infinite-shot record for generator `j`: the estimate is the exact trace
/// mean `tr(rho g_j)`, the standard error zero, the histogram empty.
pub fn expectation_record(
    rho: &DensityMatrix,
    basis: &GeneratorBasis,
    j: usize,
) -> Result<CountRecord> {
    if rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(basis.dim(), rho.dim()));
    }
    let g = basis.operator(j)?;
    let estimate = trace_product(g.matrix(), rho.matrix(), DEFAULT_TOL)?;
    Ok(CountRecord {
        index: j,
        shots: 0,
        values: Vec::new(),
        counts: Vec::new(),
        estimate,
        stderr: 0.0,
    })
}

/// Draw a multinomial sample by chaining binomials over the categories.
fn multinomial<R: rand::Rng>(probs: &[f64], shots: u64, rng: &mut R) -> Vec<u64> {
    let bins = probs.len();
    let mut counts = vec![0u64; bins];
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    for k in 0..bins.saturating_sub(1) {
        if remaining == 0 {
            return counts;
        }
        let p = if mass_left > f64::MIN_POSITIVE {
            (probs[k] / mass_left).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let draw = Binomial::new(remaining, p)
            .expect("probability is clamped to [0, 1]")
            .sample(rng);
        counts[k] = draw;
        remaining -= draw;
        mass_left = (mass_left - probs[k]).max(0.0);
    }
    counts[bins - 1] = remaining;
    counts
}

/// A linear tomographic estimate next to its repaired version. `raw` is the
/// direct inversion of the measured means: Hermitian with unit trace, but
/// possibly indefinite under shot noise. `projected` clips negative
/// eigenvalues and renormalizes the trace, yielding a valid state that
/// coincides with `raw` whenever `raw` is already positive semidefinite.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub raw: ComplexMatrix,
    pub projected: DensityMatrix,
}

/// Clip the spectrum at zero and renormalize the trace.
fn project_to_state(m: &ComplexMatrix) -> Result<DensityMatrix> {
    let e = eigh(m, DEFAULT_TOL)?;
    let clipped: Vec<f64> = e.values.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain(
            "estimate has no positive spectral weight to project onto".into(),
        ));
    }
    let mut out = ComplexMatrix::zeros(m.dim())?;
    for k in 0..m.dim() {
        if clipped[k] > 0.0 {
            let v = e.vector(k);
            let outer = ComplexMatrix::outer(&v, &v)?;
            out = out.add_scaled(clipped[k] / total, &outer)?;
        }
    }
    let trace = out.trace().re;
    DensityMatrix::new(out.scale(1.0 / trace), DEFAULT_TOL)
}

/// Rebuild a state from one record per generator:
/// `rho_hat = I/d + sum_j 2 estimate_j g_j`, exact for expectation-mode
/// records, plus the projected repair for noisy ones.
pub fn reconstruct(
    d: usize,
    records: &[CountRecord],
    basis: &GeneratorBasis,
) -> Result<Reconstruction> {
    if d != basis.dim() {
        return Err(Error::DimensionMismatch(d, basis.dim()));
    }
    let mut seen = vec![false; basis.len()];
    let mut raw = ComplexMatrix::identity(d)?.scale(1.0 / d as f64);
    for rec in records {
        if rec.index >= basis.len() {
            return Err(Error::Domain(format!(
                "record for generator {} but the basis has {} generators",
                rec.index,
                basis.len()
            )));
        }
        if seen[rec.index] {
            return Err(Error::Domain(format!(
                "two records for generator {}; reconstruction needs exactly one each",
                rec.index
            )));
        }
        seen[rec.index] = true;
        raw = raw.add_scaled(2.0 * rec.estimate, basis.operator(rec.index)?.matrix())?;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Domain(format!(
            "no record for generator {missing}; reconstruction needs all {}",
            basis.len()
        )));
    }
    let projected = project_to_state(&raw)?;
    Ok(Reconstruction { raw, projected })
}

/// Four intensity counts from the qubit polarization protocol. `n[0]` is the
/// half-intensity reference, `n[1]` the horizontal projection, `n[2]` the
/// diagonal projection onto `(|0> - |1>)/sqrt(2)`, and `n[3]` the circular
/// projection onto `(|0> - i|1>)/sqrt(2)`; `flux` is the source intensity
/// constant. Sampled records hold integer-valued counts; expectation-mode
/// records hold the exact means.
#[derive(Clone, Debug)]
pub struct StokesRecord {
    pub n: [f64; 4],
    pub flux: f64,
}

fn stokes_means(rho: &DensityMatrix, flux: f64) -> Result<[f64; 4]> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(2, rho.dim()));
    }
    if !(flux.is_finite() && flux > 0.0) {
        return Err(Error::Domain(format!(
            "intensity constant must be positive and finite, got {flux}"
        )));
    }
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let horizontal = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let diagonal = [Complex64::new(inv, 0.0), Complex64::new(-inv, 0.0)];
    let circular = [Complex64::new(inv, 0.0), Complex64::new(0.0, -inv)];
    Ok([
        flux / 2.0,
        flux * rho.matrix().quadratic_form(&horizontal)?.re.max(0.0),
        flux * rho.matrix().quadratic_form(&diagonal)?.re.max(0.0),
        flux * rho.matrix().quadratic_form(&circular)?.re.max(0.0),
    ])
}

/// Exact intensity means for a qubit state: the infinite-flux reference for
/// [`stokes_simulate`].
pub fn stokes_expectation(rho: &DensityMatrix, flux: f64) -> Result<StokesRecord> {
    Ok(StokesRecord {
        n: stokes_means(rho, flux)?,
        flux,
    })
}

/// Simulate the four intensity measurements with independent Poisson counts
/// around the exact means.
pub fn stokes_simulate(rho: &DensityMatrix, flux: f64, seed: u64) -> Result<StokesRecord> {
    let means = stokes_means(rho, flux)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = [0.0f64; 4];
    for (slot, &mean) in n.iter_mut().zip(means.iter()) {
        *slot = if mean > f64::MIN_POSITIVE {
            Poisson::new(mean)
                .expect("mean is positive and finite")
                .sample(&mut rng)
        } else {
            0.0
        };
    }
    Ok(StokesRecord { n, flux })
}

/// Invert a four-intensity record into a qubit estimate.
///
/// With contrasts `S_0 = 2 n_0` and `S_k = 2 (n_k - n_0)`, the population
/// difference is `S_1 / S_0`, the real off-diagonal component is
/// `-S_2 / (2 S_0)`, and the imaginary one `+S_3 / (2 S_0)`; the signs
/// follow from the projection directions above and are pinned by the
/// expectation-mode round-trip tests. Coherence is therefore read entirely
/// from the second and third contrasts: the estimate is incoherent exactly
/// when `S_2 = S_3 = 0`, regardless of `S_1`.
pub fn stokes_reconstruct(rec: &StokesRecord) -> Result<Reconstruction> {
    if rec.n[0] <= 0.0 {
        return Err(Error::Domain(
            "reference count n0 must be positive to normalize the contrasts".into(),
        ));
    }
    if rec.n.iter().any(|&c| !c.is_finite() || c < 0.0) {
        return Err(Error::BadCounts(format!(
            "intensity counts must be finite and nonnegative, got {:?}",
            rec.n
        )));
    }
    let s0 = 2.0 * rec.n[0];
    let s1 = 2.0 * (rec.n[1] - rec.n[0]) / s0;
    let s2 = 2.0 * (rec.n[2] - rec.n[0]) / s0;
    let s3 = 2.0 * (rec.n[3] - rec.n[0]) / s0;
    let mut raw = ComplexMatrix::zeros(2)?;
    raw[(0, 0)] = Complex64::new((1.0 + s1) / 2.0, 0.0);
    raw[(1, 1)] = Complex64::new((1.0 - s1) / 2.0, 0.0);
    raw[(0, 1)] = Complex64::new(-s2 / 2.0, s3 / 2.0);
    raw[(1, 0)] = Complex64::new(-s2 / 2.0, -s3 / 2.0);
    let projected = project_to_state(&raw)?;
    Ok(Reconstruction { raw, projected })
}

/// Verdict of the multiple-testing coherence decision, with the signed
/// z-score of every tested record and the Bonferroni-corrected two-sided
/// threshold they were held to.
#[derive(Clone, Debug)]
pub struct CoherenceDecision {
    pub coherent: bool,
    /// Flat index of the most significant witnessing generator; present
    /// exactly when `coherent` is true.
    pub witness_index: Option<usize>,
    pub threshold: f64,
    /// `(generator index, estimate / stderr)` per record, in input order.
    pub z_scores: Vec<(usize, f64)>,
}

/// Signed z-score of a record: `estimate / stderr` for sampled records
/// (which must carry a positive standard error), and the exact
/// classification for infinite-shot records — infinite z for a nonzero
/// mean, zero otherwise.
pub(crate) fn record_z(rec: &CountRecord) -> Result<f64> {
    if rec.is_exact() {
        Ok(if rec.estimate.abs() > EXACT_RECORD_TOL {
            rec.estimate.signum() * f64::INFINITY
        } else {
            0.0
        })
    } else if rec.stderr <= 0.0 {
        Err(Error::ZeroStderr)
    } else {
        Ok(rec.estimate / rec.stderr)
    }
}

/// Decide coherence from off-diagonal measurement records: the state is
/// declared coherent when any `|estimate| / stderr` clears the two-sided
/// normal quantile at level `alpha`, Bonferroni-corrected over the number of
/// tested records. Expectation-mode records are classified exactly (infinite
/// z for a nonzero mean); sampled records must carry a positive standard
/// error. Diagonal generator records are rejected: populations cannot
/// witness coherence.
pub fn coherence_decision(
    records: &[CountRecord],
    basis: &GeneratorBasis,
    alpha: f64,
) -> Result<CoherenceDecision> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "significance level must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    if records.is_empty() {
        return Err(Error::EmptyDetectionSet);
    }
    let mut z_scores = Vec::with_capacity(records.len());
    for rec in records {
        if !basis.is_offdiag(rec.index) {
            return Err(Error::Domain(format!(
                "record for generator {} reads populations; only off-diagonal \
                 generators can witness coherence",
                rec.index
            )));
        }
        z_scores.push((rec.index, record_z(rec)?));
    }
    let per_test = alpha / (2.0 * records.len() as f64);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let threshold = normal.inverse_cdf(1.0 - per_test);

    let mut witness_index = None;
    let mut best = threshold;
    for &(index, z) in &z_scores {
        if z.abs() > best {
            best = z.abs();
            witness_index = Some(index);
        }
    }
    Ok(CoherenceDecision {
        coherent: witness_index.is_some(),
        witness_index,
        threshold,
        z_scores,
    })
}
