//! Phase reduction of block Hermitian matrices.
//!
//! For `M = [[A, C], [C*, B]]` with `B = diag(λ)` and `Q_I(M) < π`, the
//! Schur complement with respect to `B + iI` splits the total phase exactly:
//!
//! ```text
//! Q_{I + C F C*}(A − C E C*) + Q_I(B) = Q_I(M),
//! E = diag(λ/(1+λ²)),  F = diag(1/(1+λ²)),
//! ```
//!
//! and replacing `E` by `D = diag(Im∏_{k≠i}(λ_k+i) / Im∏(λ_k+i))` gives the
//! subadditive bounds
//! `Q_I(A − C D C*) + Q_I(B) ≤ Q_I(M)` and the same with `P` on the
//! reduced and full matrices. The `P` bound rests on the hyperplane
//! characterization `P_A(B) = max_V Q_{A|V}(B|V)`, which [`minmax_p`]
//! evaluates numerically.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{complement_basis, CMatrix};
use crate::phase::{matrix_phase, phase_q, HermitianPair, MatrixPhase, Spectrum};
use crate::scalar::Real;

/// Admissibility margin below `π` for the total phase of the block.
pub const ADMISSIBILITY_MARGIN: f64 = 1e-9;

/// `[[A, C], [C*, diag(λ)]]`.
#[derive(Debug, Clone)]
pub struct BlockHermitian<T> {
    a: CMatrix<T>,
    c: CMatrix<T>,
    lambda: Vec<T>,
}

impl<T: Real> BlockHermitian<T> {
    pub fn new(a: CMatrix<T>, c: CMatrix<T>, lambda: Vec<T>) -> Result<Self> {
        let p = a.rows();
        let q = lambda.len();
        if !a.is_square() || p == 0 || q == 0 || c.rows() != p || c.cols() != q {
            return Err(Error::Domain(format!(
                "block shapes do not fit: A {}x{}, C {}x{}, B {q}x{q}",
                a.rows(),
                a.cols(),
                c.rows(),
                c.cols()
            )));
        }
        let tol = T::lit(1e3) * T::epsilon() * a.frobenius_norm().max(T::one());
        if !a.is_hermitian(tol) {
            return Err(Error::Domain("upper-left block is not Hermitian".into()));
        }
        if lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::Domain("non-finite diagonal entry in B".into()));
        }
        Ok(Self { a, c, lambda })
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn c(&self) -> &CMatrix<T> {
        &self.c
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    pub fn assembled(&self) -> CMatrix<T> {
        let p = self.a.rows();
        let q = self.lambda.len();
        CMatrix::from_fn(p + q, p + q, |i, j| match (i < p, j < p) {
            (true, true) => self.a[(i, j)],
            (true, false) => self.c[(i, j - p)],
            (false, true) => self.c[(j, i - p)].conj(),
            (false, false) => {
                if i == j {
                    Complex::new(self.lambda[i - p], T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }
        })
    }

    /// Phases of the assembled matrix against the identity.
    pub fn block_phase(&self) -> Result<MatrixPhase<T>> {
        Ok(matrix_phase(&HermitianPair::standard(self.assembled())?))
    }

    /// `Q_I(B)` for the diagonal block.
    pub fn diagonal_phase(&self) -> T {
        self.lambda
            .iter()
            .fold(T::zero(), |acc, &l| acc + (T::FRAC_PI_2() - l.atan()))
    }

    pub fn is_admissible(&self) -> Result<bool> {
        Ok(self.block_phase()?.q < T::PI() - T::lit(ADMISSIBILITY_MARGIN))
    }

    fn require_admissible(&self) -> Result<()> {
        let q = self.block_phase()?.q;
        if q < T::PI() - T::lit(ADMISSIBILITY_MARGIN) {
            Ok(())
        } else {
            Err(Error::Branch(format!("block total phase {q} is not below pi")))
        }
    }

    /// `C · diag(w) · C*`.
    fn weighted_gram(&self, w: &[T]) -> CMatrix<T> {
        let p = self.a.rows();
        CMatrix::from_fn(p, p, |i, j| {
            w.iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (k, &wk)| {
                    acc + (self.c[(i, k)] * self.c[(j, k)].conj()).scale(wk)
                })
        })
    }
}

/// Diagonals `D, E, F` of the reduction, aligned with `B`'s diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionDiagonals<T> {
    pub d: Vec<T>,
    pub e: Vec<T>,
    pub f: Vec<T>,
}

pub fn reduction_diagonals<T: Real>(lambda: &[T]) -> Result<ReductionDiagonals<T>> {
    let spectrum = Spectrum::new(lambda.to_vec())?;
    let q = phase_q(&spectrum);
    if q >= T::PI() {
        return Err(Error::Branch(format!("Q(lambda) = {q} is not below pi")));
    }
    let prod = |skip: Option<usize>| {
        lambda
            .iter()
            .enumerate()
            .filter(|&(k, _)| Some(k) != skip)
            .fold(Complex::new(T::one(), T::zero()), |acc, (_, &l)| acc * Complex::new(l, T::one()))
    };
    let im_full = prod(None).im;
    let d = (0..lambda.len()).map(|i| prod(Some(i)).im / im_full).collect();
    let e = lambda.iter().map(|&l| l / (T::one() + l * l)).collect();
    let f = lambda.iter().map(|&l| T::one() / (T::one() + l * l)).collect();
    Ok(ReductionDiagonals { d, e, f })
}

/// `(A − C E C*, I + C F C*)`, whose pencil phase plus `Q_I(B)` equals the
/// block's total phase.
pub fn schur_identity_split<T: Real>(m: &BlockHermitian<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    m.require_admissible()?;
    let diag = reduction_diagonals(&m.lambda)?;
    let reduced = (&m.a - &m.weighted_gram(&diag.e)).hermitian_part();
    let metric = (&CMatrix::identity(m.a.rows()) + &m.weighted_gram(&diag.f)).hermitian_part();
    Ok((reduced, metric))
}

/// `A − C D C*`.
pub fn reduced_form<T: Real>(m: &BlockHermitian<T>) -> Result<CMatrix<T>> {
    m.require_admissible()?;
    let diag = reduction_diagonals(&m.lambda)?;
    Ok((&m.a - &m.weighted_gram(&diag.d)).hermitian_part())
}

/// Restriction of both forms of the pencil to the hyperplane
/// `{x : v* A x = 0}`, expressed in an orthonormal basis of it.
pub fn restrict_hyperplane<T: Real>(pair: &HermitianPair<T>, v: &[Complex<T>]) -> Result<HermitianPair<T>> {
    let n = pair.dim();
    if n < 2 {
        return Err(Error::Domain("hyperplane restriction needs dimension at least 2".into()));
    }
    if v.len() != n {
        return Err(Error::Domain("normal vector has the wrong length".into()));
    }
    let w = pair.a().mul_vec(v);
    let basis = complement_basis(&w)?;
    let basis_adj = basis.adjoint();
    let a = (&(&basis_adj * pair.a()) * &basis).hermitian_part();
    let b = (&(&basis_adj * pair.b()) * &basis).hermitian_part();
    HermitianPair::new(a, b)
}

/// Settings for the hyperplane maximization.
#[derive(Debug, Clone, Copy)]
pub struct MinMaxOptions {
    pub random_starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once the accepted update of the unit normal is below this.
    pub normal_tol: f64,
}

impl Default for MinMaxOptions {
    fn default() -> Self {
        Self {
            random_starts: 64,
            seed: 0x5eed_4a11,
            max_iterations: 200,
            normal_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinMaxResult<T> {
    /// Largest hyperplane phase found.
    pub value: T,
    /// Normal `v` (original coordinates) whose hyperplane `{v* A x = 0}`
    /// attains `value`.
    pub normal: Vec<Complex<T>>,
}

/// Phase of the compression of a Hermitian `m` to `u^⊥`, and its gradient
/// with respect to rotations of the unit normal `u`.
fn compressed_phase<T: Real>(m: &CMatrix<T>, u: &[Complex<T>]) -> Result<(T, Vec<Complex<T>>)> {
    let basis = complement_basis(u)?;
    let comp = &(&basis.adjoint() * m) * &basis;
    let eig = comp.eigh()?;
    let mu_u = m.mul_vec(u);
    let n = u.len();
    let mut q = T::zero();
    let mut grad = vec![Complex::new(T::zero(), T::zero()); n];
    let two = T::lit(2.0);
    for (j, &mu) in eig.values.iter().enumerate() {
        q = q + (T::FRAC_PI_2() - mu.atan());
        let z: Vec<Complex<T>> = basis.mul_vec(&eig.vectors.column(j));
        // z* M u
        let coupling = z
            .iter()
            .zip(&mu_u)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (zi, mi)| acc + zi.conj() * mi);
        let weight = two / (T::one() + mu * mu);
        for (g, zi) in grad.iter_mut().zip(&z) {
            *g = *g + (*zi * coupling).scale(weight);
        }
    }
    Ok((q, grad))
}

fn normalized<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    let norm = v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
    v.iter().map(|z| z.unscale(norm)).collect()
}

/// `max` over hyperplanes of the restricted total phase, by projected
/// gradient ascent over unit normals from random starts plus the pencil's
/// eigenvector normals.
pub fn minmax_p<T: Real>(pair: &HermitianPair<T>, opts: &MinMaxOptions) -> Result<MinMaxResult<T>> {
    let n = pair.dim();
    let q_full = phase_q(pair.spectrum());
    if q_full >= T::PI() {
        return Err(Error::Branch(format!("pencil total phase {q_full} is not below pi")));
    }
    if n == 1 {
        return Ok(MinMaxResult {
            value: T::zero(),
            normal: vec![Complex::new(T::one(), T::zero())],
        });
    }
    let m = pair.whitened();
    let eig = m.eigh()?;
    let mut starts: Vec<Vec<Complex<T>>> = (0..n).map(|j| eig.vectors.column(j)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_starts {
        let v: Vec<Complex<T>> = (0..n)
            .map(|_| {
                Complex::new(
                    T::lit(rng.random::<f64>() - 0.5),
                    T::lit(rng.random::<f64>() - 0.5),
                )
            })
            .collect();
        starts.push(normalized(&v));
    }

    let tol = T::lit(opts.normal_tol);
    let mut best: Option<(T, Vec<Complex<T>>)> = None;
    for start in starts {
        let mut u = start;
        let (mut q, mut grad) = compressed_phase(m, &u)?;
        let mut step = T::one();
        for _ in 0..opts.max_iterations {
            let gnorm = grad.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
            if gnorm <= tol {
                break;
            }
            let mut accepted = false;
            while step * gnorm > tol {
                let trial: Vec<Complex<T>> = u.iter().zip(&grad).map(|(a, g)| a + g.scale(step)).collect();
                let trial = normalized(&trial);
                let (tq, tg) = compressed_phase(m, &trial)?;
                if tq > q {
                    u = trial;
                    q = tq;
                    grad = tg;
                    accepted = true;
                    step = (step * T::lit(2.0)).min(T::lit(16.0));
                    break;
                }
                step = step / T::lit(2.0);
            }
            if !accepted {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
            best = Some((q, u));
        }
    }
    let (value, u) = best.expect("at least one start");
    // Hyperplane {x : (L* v)*(L* x) = 0} ⇔ u = L* v.
    let normal = pair.whitening().adjoint().mul_vec(&u);
    Ok(MinMaxResult { value, normal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::phase_p;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn diagonals_examples() {
        let d = reduction_diagonals(&[1.0f64, 1.0]).unwrap();
        assert!((d.d[0] - 0.5).abs() < 1e-15 && (d.d[1] - 0.5).abs() < 1e-15);
        assert_eq!(d.e, vec![0.5, 0.5]);
        let d = reduction_diagonals(&[0.0]).unwrap();
        assert_eq!((d.d[0], d.e[0], d.f[0]), (0.0, 0.0, 1.0));
        assert!(matches!(reduction_diagonals(&[-1.0, -1.0]), Err(Error::Branch(_))));
    }

    #[test]
    fn zero_coupling_keeps_a() {
        let a = CMatrix::from_row_slice(2, 2, &[c(1.0), Complex::new(0.5, 0.2), Complex::new(0.5, -0.2), c(2.0)]);
        let m = BlockHermitian::new(a.clone(), CMatrix::zeros(2, 1), vec![3.0]).unwrap();
        let (reduced, metric) = schur_identity_split(&m).unwrap();
        assert!((&reduced - &a).frobenius_norm() < 1e-15);
        assert!((&metric - &CMatrix::identity(2)).frobenius_norm() < 1e-15);
        assert!((&reduced_form(&m).unwrap() - &a).frobenius_norm() < 1e-15);
        let q_a = matrix_phase(&HermitianPair::standard(a).unwrap()).q;
        let q_block = m.block_phase().unwrap().q;
        assert!((q_a + m.diagonal_phase() - q_block).abs() < 1e-14);
    }

    #[test]
    fn boundary_block_is_rejected() {
        // Eigenvalues ±|c| give total phase exactly π.
        let m = BlockHermitian::new(CMatrix::from_real_diagonal(&[0.0]), CMatrix::from_real_rows(1, 1, &[0.5]), vec![0.0])
            .unwrap();
        assert!(matches!(schur_identity_split(&m), Err(Error::Branch(_))));
        assert!(matches!(reduced_form(&m), Err(Error::Branch(_))));
    }

    #[test]
    fn restriction_of_diagonal_pair_drops_coordinate() {
        let pair = HermitianPair::standard(CMatrix::from_real_diagonal(&[1.0, 2.0, 3.0])).unwrap();
        let e1 = vec![c(0.0), c(1.0), c(0.0)];
        let r = restrict_hyperplane(&pair, &e1).unwrap();
        let vals = r.spectrum().values();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let scaled: Vec<Complex<f64>> = e1.iter().map(|z| z * Complex::new(0.0, -4.0)).collect();
        let r2 = restrict_hyperplane(&pair, &scaled).unwrap();
        assert!((phase_q(r.spectrum()) - phase_q(r2.spectrum())).abs() < 1e-14);
        assert!(restrict_hyperplane(&pair, &[c(0.0), c(0.0), c(0.0)]).is_err());
    }

    #[test]
    fn minmax_on_diagonal_pencil() {
        let pair = HermitianPair::standard(CMatrix::from_real_diagonal(&[1.0, 2.0, 3.0])).unwrap();
        let r = minmax_p(&pair, &MinMaxOptions::default()).unwrap();
        let expected = (FRAC_PI_2 - 1f64.atan()) + (FRAC_PI_2 - 2f64.atan());
        assert!((r.value - expected).abs() < 1e-8);
        assert!((r.value - phase_p(pair.spectrum())).abs() < 1e-8);
        let restricted = restrict_hyperplane(&pair, &r.normal).unwrap();
        assert!((phase_q(restricted.spectrum()) - r.value).abs() < 1e-10);
    }

    #[test]
    fn minmax_two_dimensional_sweep() {
        // Lines through the origin of C²: sweep real and complex directions.
        let b = CMatrix::from_row_slice(2, 2, &[c(2.0), Complex::new(0.3, 0.4), Complex::new(0.3, -0.4), c(0.5)]);
        let pair = HermitianPair::standard(b).unwrap();
        let mut sweep_max = f64::MIN;
        for k in 0..2000 {
            let t = PI * k as f64 / 2000.0;
            for phase in [0.0, 0.5 * PI, PI, 1.5 * PI] {
                let v = vec![c(t.cos()), Complex::from_polar(t.sin(), phase)];
                let r = restrict_hyperplane(&pair, &v).unwrap();
                sweep_max = sweep_max.max(phase_q(r.spectrum()));
            }
        }
        let lmax = pair.spectrum().values()[0];
        let expected = FRAC_PI_2 - (pair.spectrum().values()[1]).atan();
        let r = minmax_p(&pair, &MinMaxOptions::default()).unwrap();
        assert!((r.value - expected).abs() < 1e-8);
        assert!(sweep_max <= r.value + 1e-10);
        assert!(lmax > pair.spectrum().values()[1]);
    }
}
