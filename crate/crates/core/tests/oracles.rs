//! Dense Hermitian routines and node spectra against nalgebra.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use proptest::prelude::*;

use dhym::phase::{matrix_phase, phase_p, phase_q, HermitianPair};
use dhym::torus::node_eigen;
use dhym::{CMatrix, CMatrix32, Spectrum, Spectrum32};

fn hermitian(n: usize, entries: &[(f64, f64)]) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| {
        let (re, im) = entries[i * n + j];
        let (tr, ti) = entries[j * n + i];
        if i == j {
            Complex64::new(re, 0.0)
        } else if i < j {
            Complex64::new(re, im)
        } else {
            Complex64::new(tr, -ti)
        }
    })
}

fn to_nalgebra(m: &CMatrix) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(z.re, z.im)
    })
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn oracle_eigenvalues(m: &CMatrix) -> Vec<f64> {
    sorted_desc(to_nalgebra(m).symmetric_eigen().eigenvalues.iter().copied().collect())
}

fn matrix_case() -> impl Strategy<Value = (usize, Vec<(f64, f64)>)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobi_eigenvalues_match_nalgebra((n, e) in matrix_case()) {
        let m = hermitian(n, &e);
        let ours = m.eigh().unwrap();
        let oracle = oracle_eigenvalues(&m);
        let scale = m.frobenius_norm().max(1.0);
        for (a, b) in ours.values.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
        }
        // A v = λ v for every returned pair.
        for k in 0..n {
            let v = ours.vectors.column(k);
            let av = m.mul_vec(&v);
            let err = av.iter().zip(&v).map(|(x, y)| (x - y * ours.values[k]).norm()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-11 * scale);
        }
    }

    #[test]
    fn node_spectra_match_nalgebra((n, e) in (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n)))) {
        let m = hermitian(n, &e);
        let ours = node_eigen(n, m.as_slice());
        let oracle = oracle_eigenvalues(&m);
        for (a, b) in ours.values.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-12 * m.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn pencil_spectrum_matches_whitened_oracle((n, e) in matrix_case(), g in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 36)) {
        // A = G G* + I is positive definite.
        let gm = CMatrix::from_fn(n, n, |i, j| Complex64::new(g[i * 6 + j].0, g[i * 6 + j].1));
        let a = &(&gm * &gm.adjoint()) + &CMatrix::identity(n);
        let b = hermitian(n, &e);
        let pair = HermitianPair::new(a.clone(), b.clone()).unwrap();
        // Oracle: eigenvalues of L⁻¹ B L⁻* with nalgebra's own Cholesky.
        let l = to_nalgebra(&a).cholesky().unwrap().l();
        let l_inv = l.try_inverse().unwrap();
        let w = &l_inv * to_nalgebra(&b) * l_inv.adjoint();
        let w = (&w + w.adjoint()) * Complex::new(0.5, 0.0);
        let oracle = sorted_desc(w.symmetric_eigen().eigenvalues.iter().copied().collect());
        let scale = oracle.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in pair.spectrum().values().iter().zip(&oracle) {
            prop_assert!((x - y).abs() <= 1e-9 * scale, "{x} vs {y}");
        }
        let ph = matrix_phase(&pair);
        let q_oracle: f64 = oracle.iter().map(|l| std::f64::consts::FRAC_PI_2 - l.atan()).sum();
        prop_assert!((ph.q - q_oracle).abs() <= 1e-9 * n as f64);
    }

    #[test]
    fn single_precision_tracks_double(values in prop::collection::vec(-4.0..4.0f64, 1..6)) {
        let s64 = Spectrum::new(values.clone()).unwrap();
        let s32 = Spectrum32::new(values.iter().map(|&v| v as f32).collect()).unwrap();
        prop_assert!((phase_q(&s32) as f64 - phase_q(&s64)).abs() <= 1e-5);
        prop_assert!((phase_p(&s32) as f64 - phase_p(&s64)).abs() <= 1e-5);
    }
}

#[test]
fn single_precision_eigenvalues_of_a_fixed_matrix() {
    let m = CMatrix32::from_fn(3, 3, |i, j| {
        let v = [[2.0, 0.5, 0.0], [0.5, -1.0, 0.25], [0.0, 0.25, 0.5]][i][j];
        num_complex::Complex32::new(v, 0.0)
    });
    let ours = m.eigh().unwrap();
    let m64 = CMatrix::from_fn(3, 3, |i, j| Complex64::new(m[(i, j)].re as f64, 0.0));
    for (a, b) in ours.values.iter().zip(oracle_eigenvalues(&m64)) {
        assert!((*a as f64 - b).abs() < 1e-5);
    }
}
