//! Eigenvalue algebra of the Lagrangian phase operator.
//!
//! For a spectrum `λ = (λ_1, …, λ_n)` the angles are `θ_i = arccot λ_i` in
//! `(0, π)`, the total phase is `Q(λ) = Σ θ_i` and the subdominant phase is
//! `P(λ) = max_i Σ_{k≠i} θ_k`. The concave operator
//!
//! ```text
//! F(λ) = Re∏(λ_k + i) / Im∏(λ_k + i) − f / Im∏(λ_k + i) − cot θ₀
//!      = cot Q(λ) − f / Im∏(λ_k + i) − cot θ₀
//! ```
//!
//! vanishes exactly on solutions of `Re∏ − cot θ₀ Im∏ = f`. Its gradient and
//! Hessian are evaluated from leave-one-out and leave-two-out partial
//! products of `λ_k + i`, which keeps every formula free of `1/tan`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Real;

/// `arccot` on the branch `(0, π)`, computed as `π/2 − arctan x`.
pub fn arccot<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("arccot of non-finite value {x}")));
    }
    Ok(T::FRAC_PI_2() - x.atan())
}

#[inline]
fn arccot_unchecked<T: Real>(x: T) -> T {
    T::FRAC_PI_2() - x.atan()
}

/// Ordered real spectrum (descending, stable on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("spectrum must have at least one entry".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite spectrum entry {bad}")));
        }
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        Ok(Self { values })
    }

    /// `n` copies of `value`.
    pub fn constant(value: T, n: usize) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Angles `arccot λ_i`, aligned with [`values`](Self::values).
    pub fn angles(&self) -> Vec<T> {
        self.values.iter().map(|&v| arccot_unchecked(v)).collect()
    }

    /// Entrywise shift by `s`.
    pub fn shifted(&self, s: T) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| v + s).collect())
    }
}

/// Cone parameters `0 < θ₀ < Θ₀ < π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeParams<T> {
    /// Bound on the subdominant phase `P`; also the target phase of the
    /// equation.
    pub target_phase: T,
    /// Bound on the total phase `Q`.
    pub phase_cap: T,
}

impl<T: Real> ConeParams<T> {
    pub fn new(target_phase: T, phase_cap: T) -> Result<Self> {
        let ok = target_phase > T::zero() && target_phase < phase_cap && phase_cap < T::PI();
        if !ok || !target_phase.is_finite() || !phase_cap.is_finite() {
            return Err(Error::config(
                "cone-params",
                format!("need 0 < theta0 < Theta0 < pi, got theta0 = {target_phase}, Theta0 = {phase_cap}"),
            ));
        }
        Ok(Self {
            target_phase,
            phase_cap,
        })
    }
}

/// `(Re, Im)` of `∏ (λ_k + i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexProduct<T> {
    pub re: T,
    pub im: T,
}

/// Explicit constants of the lower bound on `Im∏(λ_k + i)` over
/// `{Q ≤ Θ₀}`; they depend only on `n` and `Θ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConstants<T> {
    /// Lower bound for `Im∏(λ_k + i)`: `min(n·slope/tan_slope·cot^{n−1}(Θ₀/2), sin_floor)`.
    pub im_lower_bound: T,
    /// `min(sin(Θ₀/2), sin Θ₀)`: floor of `sin` on `[Θ₀/2, Θ₀]`.
    pub sin_floor: T,
    /// `sin Θ₀ / Θ₀`: `sin x ≥ sin_slope · x` on `(0, Θ₀)`.
    pub sin_slope: T,
    /// `tan(Θ₀/2) / (Θ₀/2)`: `tan x ≤ tan_slope · x` on `(0, Θ₀/2)`.
    pub tan_slope: T,
}

pub fn phase_q<T: Real>(s: &Spectrum<T>) -> T {
    s.values.iter().fold(T::zero(), |acc, &v| acc + arccot_unchecked(v))
}

/// Subdominant phase; zero (empty sum) for a single eigenvalue.
pub fn phase_p<T: Real>(s: &Spectrum<T>) -> T {
    if s.len() == 1 {
        return T::zero();
    }
    // Largest eigenvalue has the smallest angle, and it sits first.
    phase_q(s) - arccot_unchecked(s.values[0])
}

fn product_of<T: Real>(values: impl Iterator<Item = T>) -> Complex<T> {
    values.fold(Complex::new(T::one(), T::zero()), |acc, v| acc * Complex::new(v, T::one()))
}

pub fn complex_product<T: Real>(s: &Spectrum<T>) -> ComplexProduct<T> {
    let p = product_of(s.values.iter().copied());
    ComplexProduct { re: p.re, im: p.im }
}

pub fn phase_constants<T: Real>(n: usize, phase_cap: T) -> Result<PhaseConstants<T>> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(phase_cap > T::zero() && phase_cap < T::PI()) {
        return Err(Error::Domain(format!("Theta0 = {phase_cap} outside (0, pi)")));
    }
    let half = phase_cap / T::lit(2.0);
    let sin_floor = half.sin().min(phase_cap.sin());
    let sin_slope = phase_cap.sin() / phase_cap;
    let tan_slope = half.tan() / half;
    let cot_half = T::one() / half.tan();
    let im_lower_bound = (T::count(n) * sin_slope / tan_slope * cot_half.powi(n as i32 - 1)).min(sin_floor);
    Ok(PhaseConstants {
        im_lower_bound,
        sin_floor,
        sin_slope,
        tan_slope,
    })
}

/// `P(s) < θ₀ − margin` and `Q(s) < Θ₀ − margin`.
pub fn cone_contains<T: Real>(s: &Spectrum<T>, cone: &ConeParams<T>, margin: T) -> bool {
    phase_p(s) < cone.target_phase - margin && phase_q(s) < cone.phase_cap - margin
}

/// `1 / (cot Q(s) − cot Θ)`, convex in `λ` on the cone.
pub fn reciprocal_gauge<T: Real>(s: &Spectrum<T>, cap: T) -> Result<T> {
    if !(cap > T::zero() && cap < T::PI()) {
        return Err(Error::Domain(format!("gauge cap {cap} outside (0, pi)")));
    }
    let q = phase_q(s);
    if q >= cap {
        return Err(Error::Domain(format!("total phase {q} not below gauge cap {cap}")));
    }
    let p = complex_product(s);
    Ok(T::one() / (p.re / p.im - T::one() / cap.tan()))
}

/// The operator `F` for a fixed right-hand side `f` and target phase `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOperator<T> {
    pub rhs: T,
    pub target_phase: T,
}

/// Partial products used by the derivative formulas.
struct Partials<T> {
    full: Complex<T>,
    /// `∏_{k≠i} (λ_k + i)` for each `i`.
    without: Vec<Complex<T>>,
}

impl<T: Real> Partials<T> {
    fn new(values: &[T]) -> Self {
        let full = product_of(values.iter().copied());
        let without = (0..values.len())
            .map(|i| product_of(values.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v)))
            .collect();
        Self { full, without }
    }

    fn without_pair(values: &[T], i: usize, j: usize) -> Complex<T> {
        product_of(
            values
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, &v)| v),
        )
    }
}

impl<T: Real> PhaseOperator<T> {
    pub fn new(rhs: T, target_phase: T) -> Self {
        Self { rhs, target_phase }
    }

    fn checked_im(&self, p: &Complex<T>) -> Result<T> {
        if p.im > T::zero() {
            Ok(p.im)
        } else {
            Err(Error::Branch(format!(
                "Im prod(lambda_k + i) = {} is not positive",
                p.im
            )))
        }
    }

    pub fn value(&self, s: &Spectrum<T>) -> Result<T> {
        self.value_at(s.values())
    }

    /// `F` at an unordered coordinate vector.
    pub fn value_at(&self, values: &[T]) -> Result<T> {
        let p = product_of(values.iter().copied());
        let im = self.checked_im(&p)?;
        Ok((p.re - self.rhs) / im - T::one() / self.target_phase.tan())
    }

    /// `∂F/∂λ_i = (|∏_{k≠i}|² + f Im∏_{k≠i}) / (Im∏)²`, aligned with the
    /// spectrum's entries.
    pub fn gradient(&self, s: &Spectrum<T>) -> Result<Vec<T>> {
        self.gradient_at(s.values())
    }

    pub fn gradient_at(&self, values: &[T]) -> Result<Vec<T>> {
        let parts = Partials::new(values);
        let im = self.checked_im(&parts.full)?;
        let im2 = im * im;
        Ok(parts
            .without
            .iter()
            .map(|w| (w.norm_sqr() + self.rhs * w.im) / im2)
            .collect())
    }

    /// Full Hessian, row-major `n × n`, symmetric by construction.
    pub fn hessian(&self, s: &Spectrum<T>) -> Result<Vec<Vec<T>>> {
        self.hessian_at(s.values())
    }

    pub fn hessian_at(&self, values: &[T]) -> Result<Vec<Vec<T>>> {
        let n = values.len();
        let parts = Partials::new(values);
        let im = self.checked_im(&parts.full)?;
        let cot_q = parts.full.re / im;
        let im2 = im * im;
        let im3 = im2 * im;
        let two = T::lit(2.0);
        let f = self.rhs;
        let mut h = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            let wi = parts.without[i];
            let li = values[i];
            // csc²Q / (1+λ_i²)² = |∏_{k≠i}|² / (Im² (1+λ_i²))
            let diag_cot = two * (cot_q - li) * wi.norm_sqr() / (im2 * (T::one() + li * li));
            h[i][i] = diag_cot - two * f * wi.im * wi.im / im3;
            for j in (i + 1)..n {
                let wj = parts.without[j];
                let wij = Partials::without_pair(values, i, j);
                let off = two * cot_q * wij.norm_sqr() / im2 + f * wij.im / im2 - two * f * wi.im * wj.im / im3;
                h[i][j] = off;
                h[j][i] = off;
            }
        }
        Ok(h)
    }

    /// Value of `F_A(B)` for a Hermitian pencil.
    pub fn matrix_value(&self, pair: &HermitianPair<T>) -> Result<T> {
        self.value(&pair.spectrum)
    }

    /// First-order linearization of `B ↦ F_A(B)`:
    /// `L = Σ_i (∂F/∂λ_i) w_i w_i*` with `A`-orthonormal pencil eigenvectors
    /// `w_i`, so that `d/dε F_A(B + εH) = tr(L H)`.
    pub fn linearization(&self, pair: &HermitianPair<T>) -> Result<CMatrix<T>> {
        let grad = self.gradient(&pair.spectrum)?;
        let n = pair.dim();
        let w = &pair.vectors;
        Ok(CMatrix::from_fn(n, n, |r, c| {
            grad.iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (i, &g)| {
                    acc + (w[(r, i)] * w[(c, i)].conj()).scale(g)
                })
        }))
    }
}

/// Worst normalized curvature of `F` at `f = 0`:
/// `max_u uᵀ(Hess F)u / (κ Σ u_i²/(1+λ_i²))` with
/// `κ = ∏(1+λ_k²)/(Im∏)³`. Strictly negative values certify the uniform
/// concavity margin at this spectrum.
pub fn concavity_ratio<T: Real>(s: &Spectrum<T>) -> Result<T> {
    let op = PhaseOperator::new(T::zero(), T::FRAC_PI_2());
    let h = op.hessian(s)?;
    let p = complex_product(s);
    let kappa = (p.re * p.re + p.im * p.im) / (p.im * p.im * p.im);
    let n = s.len();
    // Congruence by W^{-1/2}, W = κ diag(1/(1+λ²)).
    let scale: Vec<T> = s
        .values()
        .iter()
        .map(|&l| ((T::one() + l * l) / kappa).sqrt())
        .collect();
    let m = CMatrix::from_fn(n, n, |i, j| Complex::new(h[i][j] * scale[i] * scale[j], T::zero()));
    Ok(m.eigh()?.values[0])
}

/// Admissible lower bound on `f` for `n ≥ 4`:
/// `min(1/100, C₆(cot θ₀ − cot Θ₀)/2, ε̂₁₀/(6n))`, where `eps10` is the
/// measured concavity margin (a positive number).
pub fn epsilon2<T: Real>(n: usize, cone: &ConeParams<T>, eps10: T) -> Result<T> {
    let k = phase_constants(n, cone.phase_cap)?;
    let cot_gap = T::one() / cone.target_phase.tan() - T::one() / cone.phase_cap.tan();
    Ok(T::lit(0.01)
        .min(k.im_lower_bound * cot_gap / T::lit(2.0))
        .min(eps10 / (T::lit(6.0) * T::count(n))))
}

/// Coordinatewise bound on the zero set
/// `{λ' ∈ Γ : F(λ') = 0, λ' ≥ λ}` for a cone member `λ`.
pub fn zero_set_bound<T: Real>(s: &Spectrum<T>, op: &PhaseOperator<T>, cone: &ConeParams<T>) -> Result<Vec<T>> {
    let n = s.len();
    let theta0 = cone.target_phase;
    let cot = |x: T| T::one() / x.tan();
    if n == 1 {
        return Ok(vec![op.rhs + cot(theta0)]);
    }
    if !cone_contains(s, cone, T::zero()) {
        return Err(Error::Domain("base spectrum is not a cone member".into()));
    }
    let k = phase_constants(n, cone.phase_cap)?;
    let half_cap = cone.phase_cap / T::lit(2.0);
    let growth = k
        .sin_floor
        .min(T::count(n - 1) * k.sin_slope / k.tan_slope * cot(half_cap).powi(n as i32 - 2));
    let angles = s.angles();
    let q = angles.iter().fold(T::zero(), |a, &b| a + b);
    Ok(angles
        .iter()
        .map(|&ti| {
            let rest = q - ti;
            let geometric = cot((theta0 - rest) / T::lit(2.0));
            let forcing = op.rhs.abs() / (growth * (cot((theta0 + rest) / T::lit(2.0)) - cot(theta0)));
            geometric.max(forcing)
        })
        .collect())
}

/// Hermitian pencil `(A, B)` with `A` positive definite, together with its
/// generalized eigenvalues (the spectrum of `A⁻¹B`) and `A`-orthonormal
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianPair<T> {
    a: CMatrix<T>,
    b: CMatrix<T>,
    spectrum: Spectrum<T>,
    vectors: CMatrix<T>,
    whitened: CMatrix<T>,
    whitening: CMatrix<T>,
}

impl<T: Real> HermitianPair<T> {
    pub fn new(a: CMatrix<T>, b: CMatrix<T>) -> Result<Self> {
        if !a.is_square() || !b.is_square() || a.rows() != b.rows() || a.rows() == 0 {
            return Err(Error::Domain("pencil matrices must be square of equal positive size".into()));
        }
        let tol = T::lit(1e3) * T::epsilon() * b.frobenius_norm().max(T::one());
        if !b.is_hermitian(tol) {
            return Err(Error::Domain("B is not Hermitian".into()));
        }
        let l = a.cholesky()?;
        let l_inv = l.lower_triangular_inverse();
        let l_inv_adj = l_inv.adjoint();
        let whitened = (&(&l_inv * &b) * &l_inv_adj).hermitian_part();
        let eig = whitened.eigh()?;
        let vectors = &l_inv_adj * &eig.vectors;
        let spectrum = Spectrum::new(eig.values)?;
        Ok(Self {
            a,
            b,
            spectrum,
            vectors,
            whitened,
            whitening: l_inv,
        })
    }

    /// Pair `(I, B)`.
    pub fn standard(b: CMatrix<T>) -> Result<Self> {
        Self::new(CMatrix::identity(b.rows()), b)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &CMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &CMatrix<T> {
        &self.b
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    /// `A`-orthonormal eigenvectors as columns, aligned with the spectrum.
    pub fn vectors(&self) -> &CMatrix<T> {
        &self.vectors
    }

    /// `L⁻¹ B L⁻*` for the Cholesky factor `A = L L*`.
    pub fn whitened(&self) -> &CMatrix<T> {
        &self.whitened
    }

    /// `L⁻¹` for the Cholesky factor `A = L L*`.
    pub fn whitening(&self) -> &CMatrix<T> {
        &self.whitening
    }
}

/// Phases of a Hermitian pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPhase<T> {
    pub q: T,
    pub p: T,
    pub spectrum: Spectrum<T>,
}

pub fn matrix_phase<T: Real>(pair: &HermitianPair<T>) -> MatrixPhase<T> {
    MatrixPhase {
        q: phase_q(&pair.spectrum),
        p: phase_p(&pair.spectrum),
        spectrum: pair.spectrum.clone(),
    }
}
