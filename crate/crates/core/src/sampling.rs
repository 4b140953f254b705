//! Seeded random generators for spectra, cone parameters and Hermitian
//! matrices, used by the fuzz campaigns.
//!
//! Every sample draws from its own ChaCha stream derived from a root seed,
//! a suite tag and the sample index, so campaigns give the same numbers
//! however the samples are scheduled across threads.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::Result;
use crate::linalg::CMatrix;
use crate::phase::{cone_contains, phase_q, ConeParams, Spectrum};
use crate::reduction::BlockHermitian;

/// Smallest per-entry angle drawn by the spectrum sampler, which keeps
/// every eigenvalue below `cot(0.02) ≈ 50`.
pub const MIN_ANGLE: f64 = 0.02;

/// Independent generator for sample `index` of the campaign `tag`.
pub fn sample_rng(root: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}

/// `0.1 ≤ θ₀ < Θ₀ ≤ π − 0.05` with a gap of at least `0.05`.
pub fn random_cone<R: Rng>(rng: &mut R) -> ConeParams<f64> {
    let hi = std::f64::consts::PI - 0.05;
    let theta0 = rng.random_range(0.1..hi - 0.05);
    let cap = rng.random_range(theta0 + 0.05..hi);
    ConeParams::new(theta0, cap).expect("sampled cone parameters are ordered")
}

/// Spectrum from angles `θ_i ≥ MIN_ANGLE` with prescribed total.
fn spectrum_from_total<R: Rng>(n: usize, total: f64, rng: &mut R) -> Option<Spectrum<f64>> {
    let free = total - MIN_ANGLE * n as f64;
    if free <= 0.0 {
        return None;
    }
    let weights: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = weights.iter().sum();
    let mut values = Vec::with_capacity(n);
    for w in weights {
        let angle = MIN_ANGLE + free * w / sum;
        if angle >= std::f64::consts::PI {
            return None;
        }
        values.push(1.0 / angle.tan());
    }
    Spectrum::new(values).ok()
}

/// Uniform-in-total-angle member of the open cone `P < θ₀, Q < Θ₀`.
pub fn random_cone_spectrum<R: Rng>(n: usize, cone: &ConeParams<f64>, rng: &mut R) -> Spectrum<f64> {
    let q_max = if n == 1 {
        cone.phase_cap
    } else {
        cone.phase_cap.min(cone.target_phase * n as f64 / (n - 1) as f64)
    };
    let q_min = MIN_ANGLE * n as f64;
    loop {
        // A quarter of the draws hug the upper boundary.
        let total = if rng.random_bool(0.25) {
            q_max - (q_max - q_min) * 0.05 * rng.random::<f64>()
        } else {
            rng.random_range(q_min..q_max)
        };
        if let Some(s) = spectrum_from_total(n, total, rng) {
            if cone_contains(&s, cone, 0.0) {
                return s;
            }
        }
    }
}

/// Spectrum with total angle in `(0.05, π − 0.05)`, so `Im∏(λ_k + i) > 0`.
pub fn random_branch_spectrum<R: Rng>(n: usize, rng: &mut R) -> Spectrum<f64> {
    loop {
        let total = rng.random_range(MIN_ANGLE * n as f64 + 0.05..std::f64::consts::PI - 0.05);
        if let Some(s) = spectrum_from_total(n, total, rng) {
            if phase_q(&s) < std::f64::consts::PI - 0.05 {
                return s;
            }
        }
    }
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_complex_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<f64> {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(rng), normal(rng)))
}

/// Hermitian with entries of unit scale.
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> CMatrix<f64> {
    random_complex_matrix(n, n, rng).hermitian_part()
}

/// `G G* / n + I/10` for Gaussian `G`: positive definite and well scaled.
pub fn random_positive_definite<R: Rng>(n: usize, rng: &mut R) -> CMatrix<f64> {
    let g = random_complex_matrix(n, n, rng);
    let gram = (&g * &g.adjoint()).scale(1.0 / n as f64);
    (&gram + &CMatrix::identity(n).scale(0.1)).hermitian_part()
}

/// Unitary from Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix<f64> {
    let g = random_complex_matrix(n, n, rng);
    let mut q = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut v = g.column(j);
        for k in 0..j {
            let proj = (0..n).fold(Complex64::new(0.0, 0.0), |acc, i| acc + q[(i, k)].conj() * v[i]);
            for (i, vi) in v.iter_mut().enumerate() {
                *vi -= q[(i, k)] * proj;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (i, vi) in v.iter().enumerate() {
            q[(i, j)] = vi / norm;
        }
    }
    q
}

/// `B` with `A⁻¹B` having exactly the given spectrum:
/// `B = L U diag(λ) U* L*` for `A = L L*` and a random unitary `U`.
pub fn matrix_with_spectrum<R: Rng>(a: &CMatrix<f64>, s: &Spectrum<f64>, rng: &mut R) -> Result<CMatrix<f64>> {
    let l = a.cholesky()?;
    let u = random_unitary(s.len(), rng);
    let lu = &l * &u;
    let d = CMatrix::from_real_diagonal(s.values());
    Ok((&(&lu * &d) * &lu.adjoint()).hermitian_part())
}

/// Invertible congruence factor `S = U diag(σ)` with `σ_i ∈ [0.5, 2]`.
pub fn random_congruence<R: Rng>(n: usize, rng: &mut R) -> CMatrix<f64> {
    let u = random_unitary(n, rng);
    let sigma: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    &u * &CMatrix::from_real_diagonal(&sigma)
}

/// Block `[[A, C], [C*, diag(λ)]]` with Gaussian entries, shifted by a
/// multiple of the identity so that the total phase of the assembled matrix
/// is a uniform draw from `(0.05, π − 0.05)`.
pub fn random_admissible_block<R: Rng>(p: usize, q: usize, rng: &mut R) -> Result<BlockHermitian<f64>> {
    let a = random_hermitian(p, rng);
    let c = random_complex_matrix(p, q, rng);
    let lambda: Vec<f64> = (0..q).map(|_| normal(rng)).collect();
    let raw = BlockHermitian::new(a.clone(), c.clone(), lambda.clone())?;
    let mu = raw.assembled().eigh()?.values;
    let target = rng.random_range(0.05..std::f64::consts::PI - 0.05);
    let total = |t: f64| {
        mu.iter()
            .map(|m| std::f64::consts::FRAC_PI_2 - (m + t).atan())
            .sum::<f64>()
    };
    // Total phase decreases in the shift.
    let (mut lo, mut hi) = (-1.0, 1.0);
    while total(lo) < target {
        lo *= 2.0;
    }
    while total(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let shifted_a = &a + &CMatrix::identity(p).scale(t);
    BlockHermitian::new(shifted_a, c, lambda.iter().map(|l| l + t).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{phase_p, HermitianPair};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = sample_rng(7, 1, 3).random();
        let b: f64 = sample_rng(7, 1, 3).random();
        let c: f64 = sample_rng(7, 1, 4).random();
        let d: f64 = sample_rng(7, 2, 3).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn cone_spectra_are_members() {
        let mut rng = sample_rng(1, 0, 0);
        for n in 1..=6 {
            for _ in 0..200 {
                let cone = random_cone(&mut rng);
                let s = random_cone_spectrum(n, &cone, &mut rng);
                assert!(phase_q(&s) < cone.phase_cap);
                assert!(phase_p(&s) < cone.target_phase);
            }
        }
    }

    #[test]
    fn prescribed_spectrum_is_reproduced() {
        let mut rng = sample_rng(2, 0, 0);
        let a = random_positive_definite(4, &mut rng);
        let s = Spectrum::new(vec![3.0, 1.0, -0.5, 0.25]).unwrap();
        let b = matrix_with_spectrum(&a, &s, &mut rng).unwrap();
        let pair = HermitianPair::new(a, b).unwrap();
        for (x, y) in pair.spectrum().values().iter().zip(s.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = sample_rng(3, 0, 0);
        let u = random_unitary(5, &mut rng);
        let defect = &(&u.adjoint() * &u) - &CMatrix::identity(5);
        assert!(defect.frobenius_norm() < 1e-13);
    }

    #[test]
    fn admissible_blocks_have_total_phase_below_pi() {
        let mut rng = sample_rng(4, 0, 0);
        for p in 1..=3 {
            for q in 1..=3 {
                let m = random_admissible_block(p, q, &mut rng).unwrap();
                let phase = m.block_phase().unwrap().q;
                assert!(phase > 0.04 && phase < std::f64::consts::PI - 0.04);
            }
        }
    }
}
