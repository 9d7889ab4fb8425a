//! Seeded random states.
//!
//! All randomness in the crate flows through ChaCha8 seeded from a `u64`, so
//! every sweep, benchmark, and CLI run is reproducible bit for bit from its
//! seed.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::ComplexMatrix;
use super::DensityMatrix;
use crate::error::Result;

/// Which ensemble `random_density` draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateKind {
    /// Outer product of a uniformly random unit vector.
    Pure,
    /// `G G^dag / tr(G G^dag)` with i.i.d. complex-normal `G`; full rank
    /// almost surely.
    Mixed,
}

pub fn complex_normal<R: rand::Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Uniformly random unit vector in `C^d` (normalized complex-normal draw).
pub fn random_unit_vector<R: rand::Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-100 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Random density matrix, deterministic per `(dim, kind, seed)`.
pub fn random_density(dim: usize, kind: StateKind, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(dim, kind, &mut rng)
}

/// As [`random_density`] but drawing from a caller-owned stream, for sweeps
/// that need many states from one seed.
pub fn random_density_with<R: rand::Rng>(
    dim: usize,
    kind: StateKind,
    rng: &mut R,
) -> Result<DensityMatrix> {
    match kind {
        StateKind::Pure => {
            let v = random_unit_vector(dim, rng);
            DensityMatrix::pure(&v)
        }
        StateKind::Mixed => {
            let mut g = ComplexMatrix::zeros(dim)?;
            for i in 0..dim {
                for j in 0..dim {
                    g[(i, j)] = complex_normal(rng);
                }
            }
            let gg = &g * &g.adjoint();
            let tr = gg.trace().re;
            DensityMatrix::new(gg.scale(1.0 / tr), super::matrix::DEFAULT_TOL)
        }
    }
}
