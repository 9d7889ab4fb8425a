//! Shared fixtures and independent oracles for the integration suites.
//!
//! Everything here is computed by a different route than the library code
//! under test: exact `i64` rational arithmetic for the worked example, the
//! closed two-term product form for the qubit robustness, and a sequential
//! probability-mass sum for the detection-walk expectation. Agreement
//! between these and the library is what the suites assert.

// Every integration test target compiles its own copy of this module and
// uses a different subset of it.
#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;

use cohlab::linalg::{ComplexMatrix, DensityMatrix};

/// A 3x3 rational symmetric matrix as rows of `Rational64`.
pub type RationalMatrix = [[Rational64; 3]; 3];

fn rat(num: i64, den: i64) -> Rational64 {
    Rational64::new(num, den)
}

/// The exact worked example: a qutrit state and two witnesses whose trace
/// pairings are `0` and `-1/5` in exact arithmetic.
pub fn worked_example() -> (RationalMatrix, RationalMatrix, RationalMatrix) {
    let rho = [
        [rat(4, 7), rat(-2, 7), rat(-1, 7)],
        [rat(-2, 7), rat(2, 7), rat(0, 7)],
        [rat(-1, 7), rat(0, 7), rat(1, 7)],
    ];
    let w1 = [
        [rat(1, 4), rat(1, 4), rat(2, 4)],
        [rat(1, 4), rat(1, 4), rat(0, 4)],
        [rat(2, 4), rat(0, 4), rat(2, 4)],
    ];
    let w2 = [
        [rat(1, 5), rat(3, 5), rat(1, 5)],
        [rat(3, 5), rat(1, 5), rat(1, 5)],
        [rat(1, 5), rat(1, 5), rat(1, 5)],
    ];
    (rho, w1, w2)
}

/// Exact `tr(a b)` for rational symmetric matrices.
pub fn rational_trace_product(a: &RationalMatrix, b: &RationalMatrix) -> Rational64 {
    let mut sum = rat(0, 1);
    for i in 0..3 {
        for j in 0..3 {
            sum += a[i][j] * b[j][i];
        }
    }
    sum
}

/// Render a rational matrix as the complex floating-point type the library
/// consumes.
pub fn to_complex(m: &RationalMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let v = *m[i][j].numer() as f64 / *m[i][j].denom() as f64;
            out[(i, j)] = Complex64::new(v, 0.0);
        }
    }
    out
}

/// Closed-form robustness of a qubit state: twice the off-diagonal modulus.
pub fn qubit_roc(rho: &DensityMatrix) -> f64 {
    2.0 * rho.matrix()[(0, 1)].norm()
}

/// Expected number of draws until the first nonzero observable when walking
/// a uniformly random permutation of `n` observables of which `zeros` read
/// zero; a walk over only zeros exhausts all `n`.
///
/// Computed as the direct probability-mass sum
/// `sum_m m * P(first nonzero at draw m)` with sequential products instead
/// of binomial coefficients, so it shares no code path with the library's
/// exact rational formula.
pub fn expected_walk_oracle(n: usize, zeros: usize) -> f64 {
    assert!(n >= 1 && zeros <= n);
    if zeros == n {
        return n as f64;
    }
    let (n_f, z_f) = (n as f64, zeros as f64);
    let nonzero = n_f - z_f;
    let mut expectation = 0.0;
    // P(first nonzero at draw m)
    //   = (n - zeros)/(n - m + 1) * prod_{k < m-1} (zeros - k)/(n - k).
    let mut prefix = 1.0; // probability the first m-1 draws are all zeros
    for m in 1..=(zeros + 1) {
        let m_f = m as f64;
        let p_here = prefix * nonzero / (n_f - m_f + 1.0);
        expectation += m_f * p_here;
        prefix *= (z_f - (m_f - 1.0)) / (n_f - (m_f - 1.0));
    }
    expectation
}

/// Grid oracle for qutrit robustness: minimize the total diagonal surplus
/// `x0 + x1 + x2` subject to `diag(x) - offdiag(rho)` being positive
/// semidefinite, by scanning `(x0, x1)` on a grid and minimizing `x2` in
/// closed form per point, then refining around the coarse minimizer.
///
/// With `A = [[x0, -r01], [-r01*, x1]]` and the third column `(-r02, -r12)`,
/// feasibility needs `det A >= 0`, the two mixed principal minors give
/// `x2 >= |r02|^2 / x0` and `x2 >= |r12|^2 / x1`, and the full determinant
/// is linear in `x2` with slope `det A`, so the minimal feasible `x2` is a
/// maximum of three closed-form lower bounds. Every grid value is the
/// objective of a feasible point, so the scan returns a certified upper
/// bound; the refinement pass brings it within the comparison tolerance of
/// the true minimum.
pub fn grid_roc_qutrit(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let (r01, r02, r12) = (m[(0, 1)], m[(0, 2)], m[(1, 2)]);
    let (a01, a02, a12) = (r01.norm_sqr(), r02.norm_sqr(), r12.norm_sqr());
    // det of the full matrix at x2 = 0 is -(x0 a12 + x1 a02 + cross).
    let cross = 2.0 * (r01 * r12 * r02.conj()).re;

    let objective = |x0: f64, x1: f64| -> f64 {
        let det_a = x0 * x1 - a01;
        if det_a < 0.0 {
            return f64::INFINITY;
        }
        let l_02 = if x0 > 0.0 {
            a02 / x0
        } else if a02 > 0.0 {
            return f64::INFINITY;
        } else {
            0.0
        };
        let l_12 = if x1 > 0.0 {
            a12 / x1
        } else if a12 > 0.0 {
            return f64::INFINITY;
        } else {
            0.0
        };
        let det_at_zero = -(x0 * a12 + x1 * a02 + cross);
        let l_det = if det_a > 1e-18 {
            (-det_at_zero / det_a).max(0.0)
        } else if det_at_zero >= -1e-12 {
            0.0
        } else {
            return f64::INFINITY;
        };
        x0 + x1 + l_02.max(l_12).max(l_det)
    };

    let scan = |lo0: f64, hi0: f64, lo1: f64, hi1: f64, step: f64| -> (f64, f64, f64) {
        let mut best = (f64::INFINITY, lo0, lo1);
        let n0 = ((hi0 - lo0) / step).ceil() as usize + 1;
        let n1 = ((hi1 - lo1) / step).ceil() as usize + 1;
        for i in 0..n0 {
            let x0 = lo0 + i as f64 * step;
            for j in 0..n1 {
                let x1 = lo1 + j as f64 * step;
                let g = objective(x0, x1);
                if g < best.0 {
                    best = (g, x0, x1);
                }
            }
        }
        best
    };

    // Row sums bound the search: x_i = sum_j |r_ij| is feasible by diagonal
    // dominance, so the minimizer's coordinates never exceed them.
    let hi0 = r01.norm() + r02.norm();
    let hi1 = r01.norm() + r12.norm();
    let coarse_step = 1e-3;
    let (coarse, b0, b1) = scan(0.0, hi0 + coarse_step, 0.0, hi1 + coarse_step, coarse_step);
    assert!(coarse.is_finite(), "coarse scan found no feasible cover");
    let fine_step = 1e-5;
    let window = 2.0 * coarse_step;
    let (fine, _, _) = scan(
        (b0 - window).max(0.0),
        b0 + window,
        (b1 - window).max(0.0),
        b1 + window,
        fine_step,
    );
    fine.min(coarse)
}

/// Random density matrix with strictly real entries: a normalized Gram
/// matrix of a real random square factor, so coherence sits entirely in the
/// real off-diagonal part.
pub fn random_real_density<R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix {
    loop {
        let mut g = vec![vec![0.0f64; dim]; dim];
        for row in &mut g {
            for x in row.iter_mut() {
                *x = rng.random::<f64>() * 2.0 - 1.0;
            }
        }
        let mut m = ComplexMatrix::zeros(dim).unwrap();
        let mut trace = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let dot: f64 = (0..dim).map(|k| g[i][k] * g[j][k]).sum();
                m[(i, j)] = Complex64::new(dot, 0.0);
            }
        }
        for i in 0..dim {
            trace += m[(i, i)].re;
        }
        if trace < 1e-9 {
            continue;
        }
        let m = m.scale(1.0 / trace);
        if let Ok(rho) = DensityMatrix::new(m, 1e-9) {
            return rho;
        }
    }
}
