//! Small dense complex matrices: Hermitian eigendecomposition by cyclic
//! Jacobi rotations, Cholesky factorization and hyperplane bases.
//!
//! Sizes here are tiny (at most a handful of rows), so everything is
//! row-major `Vec` storage without blocking.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[Complex<T>]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            data: entries.to_vec(),
        }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// Real matrix from a row-major slice of reals.
    pub fn from_real_rows(rows: usize, cols: usize, entries: &[T]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        Self {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.scale(s)).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(half))
    }

    /// Principal submatrix on the given (ordered) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    /// `v* M v` for a square matrix.
    pub fn quadratic_form(&self, v: &[Complex<T>]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            let mut row = Complex::new(T::zero(), T::zero());
            for j in 0..self.cols {
                row = row + self[(i, j)] * v[j];
            }
            acc = acc + v[i].conj() * row;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self[(i, j)] * v[j])
            })
            .collect()
    }

    /// Lower-triangular `L` with `self = L L*`.
    ///
    /// Fails with a domain error when the matrix is not Hermitian positive
    /// definite.
    pub fn cholesky(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Domain("Cholesky of a non-square matrix".into()));
        }
        let n = self.rows;
        let scale = self.frobenius_norm().max(T::min_positive_value());
        if self.hermitian_defect() > T::lit(1e3) * T::epsilon() * scale {
            return Err(Error::Domain("matrix is not Hermitian".into()));
        }
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d = d - l[(j, k)].norm_sqr();
            }
            if !(d > T::zero()) || !d.is_finite() {
                return Err(Error::Domain("matrix is not positive definite".into()));
            }
            let djj = d.sqrt();
            l[(j, j)] = Complex::new(djj, T::zero());
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s.unscale(djj);
            }
        }
        Ok(l)
    }

    /// Inverse of a nonsingular lower-triangular matrix.
    pub fn lower_triangular_inverse(&self) -> Self {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col {
                    Complex::new(T::one(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                for k in col..i {
                    s = s - self[(i, k)] * inv[(k, col)];
                }
                inv[(i, col)] = s / self[(i, i)];
            }
        }
        inv
    }

    /// Eigendecomposition of the Hermitian part by cyclic Jacobi sweeps.
    ///
    /// Eigenvalues come back in descending order (stable on ties) with the
    /// matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> Result<HermitianEigen<T>> {
        if !self.is_square() {
            return Err(Error::Domain("eigendecomposition of a non-square matrix".into()));
        }
        let n = self.rows;
        if self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        let mut a = self.hermitian_part();
        let mut v = Self::identity(n);
        let frob = a.frobenius_norm();
        let tol = T::epsilon() * frob;
        for _sweep in 0..64 {
            if a.off_diagonal_norm() <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("finite eigenvalues"));
        let values = order.iter().map(|&i| diag[i]).collect();
        let vectors = Self::from_fn(n, n, |r, c| v[(r, order[c])]);
        Ok(HermitianEigen { values, vectors })
    }

    fn off_diagonal_norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    s = s + self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// One two-sided Jacobi rotation zeroing entry `(p, q)` of a Hermitian
/// matrix: a diagonal phase makes the entry real, then a real Givens
/// rotation annihilates it.
fn jacobi_rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let n = a.rows;
    let phase = apq.unscale(r);
    let phase_conj = phase.conj();
    // a <- D* a D with D = diag(.., e^{-iα} at q, ..)
    for j in 0..n {
        a[(q, j)] = a[(q, j)] * phase;
    }
    for j in 0..n {
        a[(j, q)] = a[(j, q)] * phase_conj;
    }
    for j in 0..n {
        v[(j, q)] = v[(j, q)] * phase_conj;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    for j in 0..n {
        let ajp = a[(j, p)];
        let ajq = a[(j, q)];
        a[(j, p)] = ajp.scale(c) - ajq.scale(s);
        a[(j, q)] = ajp.scale(s) + ajq.scale(c);
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj.scale(c) - aqj.scale(s);
        a[(q, j)] = apj.scale(s) + aqj.scale(c);
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    for j in 0..n {
        let vjp = v[(j, p)];
        let vjq = v[(j, q)];
        v[(j, p)] = vjp.scale(c) - vjq.scale(s);
        v[(j, q)] = vjp.scale(s) + vjq.scale(c);
    }
}

/// Output of [`CMatrix::eigh`].
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Descending eigenvalues.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, one per column.
    pub vectors: CMatrix<T>,
}

/// Orthonormal basis (as columns of an `n × (n-1)` matrix) of the
/// orthogonal complement of a nonzero vector `w`, built from a Householder
/// reflector.
pub fn complement_basis<T: Real>(w: &[Complex<T>]) -> Result<CMatrix<T>> {
    let n = w.len();
    let norm = w.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::Domain("hyperplane normal must be a nonzero finite vector".into()));
    }
    let w0 = w[0];
    let unit_phase = if w0.norm() > T::zero() {
        w0.unscale(w0.norm())
    } else {
        Complex::new(T::one(), T::zero())
    };
    let alpha = -unit_phase.scale(norm);
    let mut h = w.to_vec();
    h[0] = h[0] - alpha;
    let hh = h.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
    let two = T::lit(2.0);
    // Columns 1..n of I - 2 h h*/(h*h).
    Ok(CMatrix::from_fn(n, n - 1, |i, j| {
        let col = j + 1;
        let delta = if i == col { T::one() } else { T::zero() };
        Complex::new(delta, T::zero()) - (h[i] * h[col].conj()).scale(two / hh)
    }))
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + aik * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch in sum");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch in difference");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn max_abs_diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }

    #[test]
    fn eigh_of_diagonal_sorts_descending() {
        let m = CMatrix::from_real_diagonal(&[1.0f64, 3.0, 2.0]);
        let e = m.eigh().unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigh_of_complex_2x2_matches_closed_form() {
        // [[2, 1+i], [1-i, 3]]: eigenvalues (5 ± sqrt(1 + 8)) / 2 = 4, 1
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]);
        let e = m.eigh().unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let v = &e.vectors;
        let recon = &(v * &CMatrix::from_real_diagonal(&e.values)) * &v.adjoint();
        assert!(max_abs_diff(&recon, &m) < 1e-14);
    }

    #[test]
    fn cholesky_reconstructs_and_rejects_indefinite() {
        let a = CMatrix::from_row_slice(2, 2, &[c(4.0, 0.0), c(1.0, -2.0), c(1.0, 2.0), c(6.0, 0.0)]);
        let l = a.cholesky().unwrap();
        assert!(max_abs_diff(&(&l * &l.adjoint()), &a) < 1e-14);
        let linv = l.lower_triangular_inverse();
        assert!(max_abs_diff(&(&linv * &l), &CMatrix::identity(2)) < 1e-14);

        let bad = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(bad.cholesky(), Err(Error::Domain(_))));
    }

    #[test]
    fn complement_basis_is_orthonormal_and_orthogonal_to_normal() {
        let w = vec![c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.0)];
        let u = complement_basis(&w).unwrap();
        assert_eq!((u.rows(), u.cols()), (3, 2));
        let gram = &u.adjoint() * &u;
        assert!(max_abs_diff(&gram, &CMatrix::identity(2)) < 1e-14);
        for j in 0..2 {
            let dot: Complex<f64> = (0..3).map(|i| w[i].conj() * u[(i, j)]).sum();
            assert!(dot.norm() < 1e-14);
        }
        assert!(complement_basis::<f64>(&[c(0.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn eigh_works_in_single_precision() {
        let m = CMatrix::<f32>::from_real_rows(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let e = m.eigh().unwrap();
        assert!((e.values[0] - 3.0).abs() < 1e-6);
        assert!((e.values[1] - 1.0).abs() < 1e-6);
    }
}
