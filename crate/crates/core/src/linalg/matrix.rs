//! Dense complex matrices in row-major order.
//!
//! Everything in this crate works at desk scale (dimension at most
//! [`MAX_DIM`]), so a flat `Vec<Complex64>` with no blocking or sparsity is
//! the right representation: simple indexing, cheap clones, and no dependency
//! on an external linear-algebra stack.

use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::error::{Error, Result};

/// Hard cap on matrix dimension. The algorithms here are dense and cubic;
/// anything larger than this is outside the intended scale and is rejected
/// up front rather than silently crawling.
pub const MAX_DIM: usize = 64;

/// Default numerical tolerance used for Hermiticity, positivity, and
/// incoherence checks when the caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Tolerance on `tr(rho) = 1` for density matrices. Trace normalization is
/// cheap and exact up to rounding, so this is much tighter than the general
/// tolerance.
pub const TRACE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("matrix dimension must be positive".into()));
        }
        if dim > MAX_DIM {
            return Err(Error::DimensionCap(dim));
        }
        Ok(Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Build from separate real and imaginary parts, both row-major of
    /// length `dim * dim`. Rejects length mismatches and non-finite entries.
    pub fn from_re_im(dim: usize, re: &[f64], im: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        let n = dim * dim;
        if re.len() != n || im.len() != n {
            return Err(Error::Parse(format!(
                "expected {} entries for dim {}, got re={} im={}",
                n,
                dim,
                re.len(),
                im.len()
            )));
        }
        for k in 0..n {
            if !re[k].is_finite() || !im[k].is_finite() {
                return Err(Error::Parse(format!(
                    "non-finite entry at flat index {k}"
                )));
            }
            m.data[k] = Complex64::new(re[k], im[k]);
        }
        Ok(m)
    }

    /// Diagonal matrix with the given real entries.
    pub fn from_diag(diag: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(diag.len())?;
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        Ok(m)
    }

    /// `|i><j|` in the computational basis.
    pub fn basis_outer(dim: usize, i: usize, j: usize) -> Result<Self> {
        if i >= dim || j >= dim {
            return Err(Error::Domain(format!(
                "basis index ({i},{j}) out of range for dim {dim}"
            )));
        }
        let mut m = Self::zeros(dim)?;
        m[(i, j)] = Complex64::new(1.0, 0.0);
        Ok(m)
    }

    /// Outer product `u v^dag` of two vectors of equal length.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch(u.len(), v.len()));
        }
        let mut m = Self::zeros(u.len())?;
        for i in 0..u.len() {
            for j in 0..v.len() {
                m[(i, j)] = u[i] * v[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Row-major real and imaginary parts, for serialization.
    pub fn to_parts(&self) -> (Vec<f64>, Vec<f64>) {
        let re = self.data.iter().map(|z| z.re).collect();
        let im = self.data.iter().map(|z| z.im).collect();
        (re, im)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Largest entrywise deviation `|A - A^dag|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(A + A^dag) / 2`. Used before eigendecomposition so that rounding in
    /// upstream arithmetic cannot leak into the spectral routines.
    pub fn hermitian_part(&self) -> Self {
        let mut out = Self::zeros(self.dim).expect("dim already validated");
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// Projection onto the diagonal: keeps `A_ii`, zeroes every off-diagonal
    /// entry exactly.
    pub fn dephase(&self) -> Self {
        let mut out = Self::zeros(self.dim).expect("dim already validated");
        for i in 0..self.dim {
            out[(i, i)] = self[(i, i)];
        }
        out
    }

    /// `A - dephase(A)`: the off-diagonal part.
    pub fn offdiag(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out[(i, i)] = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Entrywise absolute-part sum `sum |Re a_lm| + sum |Im a_lm|` over the
    /// full matrix. This is a pseudo-norm: it is definite and satisfies the
    /// triangle inequality and submultiplicativity, but it is homogeneous
    /// only under real or purely imaginary scalars.
    pub fn h_norm(&self) -> f64 {
        self.data.iter().map(|z| z.re.abs() + z.im.abs()).sum()
    }

    /// Sum of moduli of the off-diagonal entries.
    pub fn offdiag_abs_sum(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    s += self[(i, j)].norm();
                }
            }
        }
        s
    }

    /// Largest off-diagonal modulus; zero iff the matrix is diagonal.
    pub fn max_offdiag_abs(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    worst = worst.max(self[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |w, z| w.max(z.norm()))
    }

    /// Largest entrywise modulus of `A - B`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut worst: f64 = 0.0;
        for k in 0..self.data.len() {
            worst = worst.max((self.data[k] - other.data[k]).norm());
        }
        Ok(worst)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= c;
        }
        out
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z *= c;
        }
        out
    }

    /// `A + c B`, the workhorse for affine pencils.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for k in 0..out.data.len() {
            out.data[k] += c * other.data[k];
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let d = self.dim;
        let mut out = Self::zeros(d)?;
        for i in 0..d {
            for k in 0..d {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, v.len()));
        }
        let d = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for i in 0..d {
            for j in 0..d {
                out[i] += self[(i, j)] * v[j];
            }
        }
        Ok(out)
    }

    /// `v^dag A v`, real part and imaginary part.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Result<Complex64> {
        let av = self.mul_vec(v)?;
        Ok(v.iter().zip(av.iter()).map(|(x, y)| x.conj() * y).sum())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(1.0, other)
            .expect("matrix addition requires equal dimensions")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(-1.0, other)
            .expect("matrix subtraction requires equal dimensions")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other)
            .expect("matrix product requires equal dimensions")
    }
}

/// `tr(A B)` for a Hermitian pair. The product trace of two Hermitian
/// matrices is real; if rounding or a non-Hermitian operand leaves an
/// imaginary residue above `tol`, that is reported as an error instead of
/// being silently dropped.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    if acc.im.abs() > tol {
        return Err(Error::NotHermitian(acc.im.abs()));
    }
    Ok(acc.re)
}
