//! Matrix core: dense complex matrices, validated quantum state and
//! observable wrappers, a Hermitian eigensolver, and seeded random states.

pub mod eigen;
pub mod matrix;
pub mod random;

pub use eigen::{eigh, max_eigenvalue, min_eigenvalue, Eigh};
pub use matrix::{trace_product, ComplexMatrix, DEFAULT_TOL, MAX_DIM, TRACE_TOL};
pub use random::{complex_normal, random_density, random_density_with, StateKind};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A validated density matrix: Hermitian and positive semidefinite within
/// tolerance, unit trace within [`TRACE_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::BadTolerance(tol));
        }
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne(tr.re));
        }
        let (min_eig, _) = eigen::min_eigenvalue(&m, tol)?;
        if min_eig < -tol {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { m })
    }

    /// `|psi><psi|` from a state vector; the vector is normalized here.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-100 {
            return Err(Error::Domain("state vector is numerically zero".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        let m = ComplexMatrix::outer(&unit, &unit)?;
        Ok(Self { m })
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = ComplexMatrix::identity(dim)?.scale(1.0 / dim as f64);
        Ok(Self { m })
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        let sum: f64 = p.iter().sum();
        if p.iter().any(|&x| x < 0.0) || (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::Domain(
                "probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        Ok(Self {
            m: ComplexMatrix::from_diag(p)?,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// The dephased (diagonal) state with the same populations.
    pub fn dephased(&self) -> Self {
        Self {
            m: self.m.dephase(),
        }
    }

    /// True when every off-diagonal entry is at most `tol` in modulus.
    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.m.max_offdiag_abs() <= tol
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.m.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Convex mixture `(1-t) self + t other`.
    pub fn mix(&self, t: f64, other: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("mixing weight {t} outside [0,1]")));
        }
        let m = self.m.scale(1.0 - t).add_scaled(t, &other.m)?;
        // Convexity preserves all three defining properties; revalidation
        // guards only against dimension mismatch and rounding drift.
        Self::new(m, DEFAULT_TOL)
    }
}

/// A validated Hermitian operator (observable).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// Real expectation value `tr(A rho)`.
    pub fn expectation(&self, rho: &DensityMatrix, tol: f64) -> Result<f64> {
        trace_product(&self.m, rho.matrix(), tol)
    }
}

/// Trace distance `||a - b||_1 / 2` between two Hermitian matrices.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<f64> {
    let diff = a.add_scaled(-1.0, b)?;
    let e = eigen::eigh(&diff, tol)?;
    Ok(0.5 * e.values.iter().map(|v| v.abs()).sum::<f64>())
}
