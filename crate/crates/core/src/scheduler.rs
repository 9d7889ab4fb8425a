//! Adaptive coherence detection and its measurement-count analysis.
//!
//! A state is coherent as soon as a single off-diagonal component reads
//! significantly nonzero, so a detector can walk the off-diagonal
//! observables one at a time and stop early. The interesting quantity is
//! the number of measurements the walk needs: with `N` observables of which
//! `i` read zero on the state, sampling without replacement puts the first
//! nonzero at position `(N + 1)/(N - i + 1)` on average. This module
//! provides the walk itself, the expected count both as the term-by-term
//! hypergeometric sum and in closed form (exact big-rational arithmetic in
//! both cases), a Monte Carlo cross-check, and the uniform-superposition
//! example configuration used in the acceptance report.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::tomo::{record_z, CountRecord, BASIS_MAX_DIM};

/// When a full walk finds nothing significant, the verdict is downgraded
/// from incoherent to inconclusive if any confidence band still reaches
/// component magnitudes at or above this floor: the data then cannot rule
/// out a coherent state of practically relevant size.
pub const PLAUSIBLE_COMPONENT_FLOOR: f64 = 0.05;

/// Mean measurement count quoted in earlier reports for the dimension-8
/// uniform superposition. Under the observable counting used here that
/// configuration has `N = 56` off-diagonal observables with `i = 28` zeros,
/// and the exact expectation is `57/29 ≈ 1.9655`. The quoted value instead
/// matches a per-component counting with `N = 112` and `i = 56`
/// (`113/57 ≈ 1.98245`); reports print both numbers and flag the gap rather
/// than preferring one silently.
pub const QUOTED_MEAN_56_28: f64 = 1.982;

/// How the detector orders the off-diagonal observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderPolicy {
    /// Uniformly random permutation drawn from the seed.
    Random,
    /// Flat index order.
    Fixed,
}

/// Outcome of a detection walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Coherent,
    Incoherent,
    Inconclusive,
}

/// Result of [`detect`]: the verdict, how many measurements the walk used,
/// the witnessing generator for a coherent verdict, the permutation walked,
/// and the signed z-score of every measurement actually taken.
#[derive(Clone, Debug)]
pub struct DetectionResult {
    pub verdict: Verdict,
    pub measurements_used: usize,
    /// Flat index of the generator that triggered the coherent verdict;
    /// present exactly when `verdict` is [`Verdict::Coherent`].
    pub witness_index: Option<usize>,
    pub ordering: Vec<usize>,
    pub z_scores: Vec<f64>,
}

/// Walk the `d^2 - d` off-diagonal observables in permutation order,
/// measuring each through `oracle(index, shots)` until one reads
/// significantly nonzero.
///
/// The significance threshold is the two-sided normal quantile at `alpha`
/// with Bonferroni correction over all `d^2 - d` possibly-tested
/// observables, so a full walk on an incoherent state stays below `alpha`
/// overall. `shots` is forwarded to the oracle; `0` selects the exact
/// (infinite-shot) mode, a single shot is rejected because it cannot carry
/// a standard error. Diagonal observables are never requested.
pub fn detect<F>(
    mut oracle: F,
    d: usize,
    policy: OrderPolicy,
    shots: u64,
    alpha: f64,
    seed: u64,
) -> Result<DetectionResult>
where
    F: FnMut(usize, u64) -> Result<CountRecord>,
{
    if !(2..=BASIS_MAX_DIM).contains(&d) {
        return Err(Error::Domain(format!(
            "detection needs 2 <= d <= {BASIS_MAX_DIM}, got {d}"
        )));
    }
    if shots == 1 {
        return Err(Error::Domain(
            "one shot cannot carry a standard error; use at least two, or zero \
             for the exact mode"
                .into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "significance level must lie strictly between 0 and 1, got {alpha}"
        )));
    }

    let n = d * d - d;
    let mut ordering: Vec<usize> = (0..n).collect();
    if policy == OrderPolicy::Random {
        ordering.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let threshold = normal.inverse_cdf(1.0 - alpha / (2.0 * n as f64));

    let mut z_scores = Vec::new();
    let mut plausible_band = false;
    for (step, &j) in ordering.iter().enumerate() {
        let rec = oracle(j, shots)?;
        if rec.index != j {
            return Err(Error::Domain(format!(
                "oracle answered for generator {} when asked for {j}",
                rec.index
            )));
        }
        let z = record_z(&rec)?;
        z_scores.push(z);
        if z.abs() > threshold {
            return Ok(DetectionResult {
                verdict: Verdict::Coherent,
                measurements_used: step + 1,
                witness_index: Some(j),
                ordering,
                z_scores,
            });
        }
        if rec.estimate.abs() + threshold * rec.stderr >= PLAUSIBLE_COMPONENT_FLOOR {
            plausible_band = true;
        }
    }
    let verdict = if plausible_band {
        Verdict::Inconclusive
    } else {
        Verdict::Incoherent
    };
    Ok(DetectionResult {
        verdict,
        measurements_used: n,
        witness_index: None,
        ordering,
        z_scores,
    })
}

/// Exact expected number of measurements until the first nonzero, as a big
/// rational: `sum_{m=1}^{i+1} m * [C(i, m-1)/C(N, m-1)] * (N-i)/(N-m+1)`
/// for `1 <= i <= N-1`, with the boundary cases `1` at `i = 0` and `N` at
/// `i = N` (a walk over only-zero observables measures all of them).
pub fn expected_measurements_exact(n: usize, i: usize) -> Result<BigRational> {
    if n == 0 || i > n {
        return Err(Error::Domain(format!(
            "zero count {i} out of range for {n} observables"
        )));
    }
    if i == 0 {
        return Ok(BigRational::one());
    }
    if i == n {
        return Ok(BigRational::from(BigInt::from(n)));
    }
    let mut sum = BigRational::zero();
    // Running ratio C(i, m-1) / C(N, m-1), extended one factor per term.
    let mut ratio = BigRational::one();
    for m in 1..=(i + 1) {
        if m > 1 {
            let t = m - 2;
            ratio *= BigRational::new(BigInt::from(i - t), BigInt::from(n - t));
        }
        let stop_here = BigRational::new(BigInt::from(n - i), BigInt::from(n - (m - 1)));
        sum += BigRational::from(BigInt::from(m)) * &ratio * stop_here;
    }
    Ok(sum)
}

/// [`expected_measurements_exact`] converted to floating point at the end.
pub fn expected_measurements(n: usize, i: usize) -> Result<f64> {
    let exact = expected_measurements_exact(n, i)?;
    exact
        .to_f64()
        .ok_or_else(|| Error::Domain("expected measurement count overflows f64".into()))
}

/// Closed form of the same expectation, `(N + 1) / (N - i + 1)`: the
/// waiting-time mean for the first of `N - i` nonzeros under sampling
/// without replacement. Agrees exactly with the term-by-term sum.
pub fn expected_measurements_closed(n: usize, i: usize) -> Result<f64> {
    if n == 0 || i > n {
        return Err(Error::Domain(format!(
            "zero count {i} out of range for {n} observables"
        )));
    }
    if i == n {
        return Ok(n as f64);
    }
    Ok((n as f64 + 1.0) / ((n - i) as f64 + 1.0))
}

/// Expected measurement count averaged over a uniformly random number of
/// zero components: `(1/(N+1)) * sum_{i=0}^{N} E(N, i)`, evaluated in exact
/// rational arithmetic.
pub fn expected_measurements_avg(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain(
            "the average needs at least one observable".into(),
        ));
    }
    let mut sum = BigRational::zero();
    for i in 0..=n {
        sum += expected_measurements_exact(n, i)?;
    }
    let avg = sum / BigRational::from(BigInt::from(n + 1));
    avg.to_f64()
        .ok_or_else(|| Error::Domain("averaged measurement count overflows f64".into()))
}

/// Empirical mean stopping index over uniformly random measurement orders
/// of `N` observables with `i` designated zero, with its standard error.
/// A walk that never meets a nonzero (only possible at `i = N`) counts as
/// `N` measurements.
pub fn monte_carlo_measurements(
    n: usize,
    i: usize,
    trials: u64,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 || i > n {
        return Err(Error::Domain(format!(
            "zero count {i} out of range for {n} observables"
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one trial".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    for _ in 0..trials {
        let mut zeros_left = i;
        let mut slots_left = n;
        let mut stop = n;
        for step in 1..=n {
            if zeros_left == 0 {
                stop = step;
                break;
            }
            // The next draw is a zero with probability zeros_left/slots_left.
            if rng.random_range(0..slots_left) < zeros_left {
                zeros_left -= 1;
                slots_left -= 1;
            } else {
                stop = step;
                break;
            }
        }
        let s = stop as f64;
        sum += s;
        sum_sq += s * s;
    }
    let t = trials as f64;
    let mean = sum / t;
    let stderr = if trials > 1 {
        (((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0) / t).sqrt()
    } else {
        0.0
    };
    Ok((mean, stderr))
}

/// Side-by-side comparison of the three routes to the expected measurement
/// count for one `(N, i)` configuration.
#[derive(Clone, Debug)]
pub struct ExpectationReport {
    pub n: usize,
    pub i: usize,
    /// Term-by-term hypergeometric sum.
    pub e_formula: f64,
    /// Closed-form waiting-time mean `(N+1)/(N-i+1)`.
    pub e_closed: f64,
    /// Monte Carlo mean over random measurement orders.
    pub e_mc: f64,
    pub mc_stderr: f64,
}

/// Evaluate all three expectation routes on one configuration.
pub fn expectation_report(n: usize, i: usize, trials: u64, seed: u64) -> Result<ExpectationReport> {
    let e_formula = expected_measurements(n, i)?;
    let e_closed = expected_measurements_closed(n, i)?;
    let (e_mc, mc_stderr) = monte_carlo_measurements(n, i, trials, seed)?;
    Ok(ExpectationReport {
        n,
        i,
        e_formula,
        e_closed,
        e_mc,
        mc_stderr,
    })
}

/// The equal-amplitude pure state at dimension 8 (the three-qubit showcase
/// configuration): every density-matrix entry equals `1/8`, so all 28 real
/// off-diagonal components are nonzero and all 28 imaginary ones vanish.
pub fn uniform_superposition(d: usize) -> Result<DensityMatrix> {
    if d != 8 {
        return Err(Error::Domain(format!(
            "the uniform-superposition example is fixed at dimension 8, got {d}"
        )));
    }
    DensityMatrix::pure(&vec![Complex64::new(1.0, 0.0); d])
}
