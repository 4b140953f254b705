//! Eigen-analysis of the small Hermitian matrix stored at one node.

use num_complex::Complex64;

use crate::linalg::CMatrix;

/// Eigenvalues (descending) and orthonormal eigenvectors of one node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEigen {
    pub values: Vec<f64>,
    /// Row-major `n × n`; column `k` pairs with `values[k]`.
    pub vectors: Vec<Complex64>,
}

/// Closed form for `n ≤ 2`, Jacobi sweeps for `n = 3`.
pub fn node_eigen(n: usize, entries: &[Complex64]) -> NodeEigen {
    match n {
        1 => NodeEigen {
            values: vec![entries[0].re],
            vectors: vec![Complex64::new(1.0, 0.0)],
        },
        2 => eigen_2x2(entries),
        _ => {
            let e = CMatrix::from_row_slice(n, n, entries)
                .eigh()
                .expect("finite node matrix");
            NodeEigen {
                values: e.values,
                vectors: e.vectors.as_slice().to_vec(),
            }
        }
    }
}

fn eigen_2x2(m: &[Complex64]) -> NodeEigen {
    let a = m[0].re;
    let d = m[3].re;
    // Hermitian part of the off-diagonal entry.
    let b = (m[1] + m[2].conj()) * 0.5;
    let mid = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let r = half_gap.hypot(b.norm());
    let (hi, lo) = (mid + r, mid - r);
    if r == 0.0 {
        return NodeEigen {
            values: vec![hi, lo],
            vectors: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        };
    }
    // Two candidate null vectors of M − hi·I; keep the better conditioned.
    let u = [b, Complex64::new(hi - a, 0.0)];
    let w = [Complex64::new(hi - d, 0.0), b.conj()];
    let nu = u[0].norm_sqr() + u[1].norm_sqr();
    let nw = w[0].norm_sqr() + w[1].norm_sqr();
    let (v, norm) = if nu >= nw { (u, nu.sqrt()) } else { (w, nw.sqrt()) };
    let v0 = v[0] / norm;
    let v1 = v[1] / norm;
    // Second column: orthogonal complement (-conj(v1), conj(v0)).
    NodeEigen {
        values: vec![hi, lo],
        vectors: vec![v0, -v1.conj(), v1, v0.conj()],
    }
}

/// `Σ_k g_k v_k v_k*` as a row-major `n × n` matrix.
pub fn spectral_combination(n: usize, eigen: &NodeEigen, weights: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for (k, &g) in weights.iter().enumerate() {
        for i in 0..n {
            let vi = eigen.vectors[i * n + k];
            for j in 0..n {
                out[i * n + j] += vi * eigen.vectors[j * n + k].conj() * g;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(n: usize, e: &NodeEigen) -> Vec<Complex64> {
        spectral_combination(n, e, &e.values)
    }

    #[test]
    fn two_by_two_matches_definition() {
        let cases: [[Complex64; 4]; 4] = [
            [1.0.into(), Complex64::new(0.3, -0.7), Complex64::new(0.3, 0.7), (-2.0).into()],
            [1.0.into(), 0.0.into(), 0.0.into(), 1.0.into()],
            [5.0.into(), Complex64::new(1e-9, 0.0), Complex64::new(1e-9, 0.0), 1.0.into()],
            [1.0.into(), Complex64::new(1e-9, 2e-9), Complex64::new(1e-9, -2e-9), 5.0.into()],
        ];
        for m in cases {
            let e = node_eigen(2, &m);
            assert!(e.values[0] >= e.values[1]);
            let back = reconstruct(2, &e);
            for (x, y) in back.iter().zip(&m) {
                assert!((x - y).norm() < 1e-14, "{m:?}");
            }
        }
    }

    #[test]
    fn three_by_three_via_jacobi() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                2.0.into(),
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.3, 0.0),
                Complex64::new(0.1, -0.2),
                1.0.into(),
                Complex64::new(0.0, 0.5),
                Complex64::new(-0.3, 0.0),
                Complex64::new(0.0, -0.5),
                (-1.0).into(),
            ],
        );
        let e = node_eigen(3, m.as_slice());
        let back = reconstruct(3, &e);
        for (x, y) in back.iter().zip(m.as_slice()) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
