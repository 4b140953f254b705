//! Fourier differentiation on the periodic grid.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::linalg::CMatrix;
use crate::torus::field::{HermitianField, PotentialField};
use crate::torus::grid::TorusGrid;

/// Multiplier of `∂_a ∂_b` on the wavevector `k`.
///
/// Mixed and first-order factors drop the unpaired Nyquist mode so that the
/// discrete operator maps real fields to real fields; same-axis second
/// derivatives keep it.
pub fn second_derivative_symbol(grid: &TorusGrid, k: &[i64], a: usize, b: usize) -> f64 {
    let nyquist = -((grid.size() / 2) as i64);
    if a == b {
        let w = TAU * k[a] as f64;
        -w * w
    } else if k[a] == nyquist || k[b] == nyquist {
        0.0
    } else {
        -(TAU * TAU) * (k[a] * k[b]) as f64
    }
}

/// Multiplier of the `(i, j̄)` entry of `∂∂̄`:
/// `¼[(∂x_i∂x_j + ∂y_i∂y_j) + i(∂x_i∂y_j − ∂y_i∂x_j)]`.
pub fn ddbar_symbol(grid: &TorusGrid, k: &[i64], i: usize, j: usize) -> Complex64 {
    let s = |a, b| second_derivative_symbol(grid, k, a, b);
    let (xi, xj, yi, yj) = (grid.x_axis(i), grid.x_axis(j), grid.y_axis(i), grid.y_axis(j));
    Complex64::new(s(xi, xj) + s(yi, yj), s(xi, yj) - s(yi, xj)) * 0.25
}

/// FFT plans plus tabulated `∂∂̄` multipliers for one grid.
pub struct Spectral {
    grid: TorusGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Upper-triangle index pairs `(i, j)`, `i ≤ j`, in row order.
    pairs: Vec<(usize, usize)>,
    /// `symbols[p][node]` for pair `p`.
    symbols: Vec<Vec<Complex64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish_non_exhaustive()
    }
}

impl Spectral {
    pub fn new(grid: &TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.size());
        let inverse = planner.plan_fft_inverse(grid.size());
        let n = grid.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let symbols = pairs
            .iter()
            .map(|&(i, j)| {
                (0..grid.nodes())
                    .into_par_iter()
                    .map(|node| ddbar_symbol(grid, &grid.wavevector(node), i, j))
                    .collect()
            })
            .collect();
        Self {
            grid: *grid,
            forward,
            inverse,
            pairs,
            symbols,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// In-place multidimensional DFT, one axis at a time. The inverse is
    /// unnormalized.
    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let size = self.grid.size();
        let fft = if inverse { &self.inverse } else { &self.forward };
        let scratch_len = fft.get_inplace_scratch_len();
        for axis in 0..self.grid.axes() {
            let stride = self.grid.stride(axis);
            if stride == 1 {
                data.par_chunks_mut(size).for_each_init(
                    || vec![Complex64::new(0.0, 0.0); scratch_len],
                    |scratch, line| fft.process_with_scratch(line, scratch),
                );
                continue;
            }
            let block = stride * size;
            // Gather each strided line into contiguous storage, transform,
            // then scatter back in a fixed order.
            let mut lines = vec![Complex64::new(0.0, 0.0); data.len()];
            {
                let src = &*data;
                lines.par_chunks_mut(size).enumerate().for_each_init(
                    || vec![Complex64::new(0.0, 0.0); scratch_len],
                    |scratch, (l, line)| {
                        let base = (l / stride) * block + l % stride;
                        for (k, z) in line.iter_mut().enumerate() {
                            *z = src[base + k * stride];
                        }
                        fft.process_with_scratch(line, scratch);
                    },
                );
            }
            for (l, line) in lines.chunks(size).enumerate() {
                let base = (l / stride) * block + l % stride;
                for (k, z) in line.iter().enumerate() {
                    data[base + k * stride] = *z;
                }
            }
        }
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, false);
        data
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, mut spectrum: Vec<Complex64>) -> Vec<Complex64> {
        self.transform(&mut spectrum, true);
        let scale = 1.0 / self.grid.nodes() as f64;
        spectrum.par_iter_mut().for_each(|z| *z *= scale);
        spectrum
    }

    /// Index pairs `(i, j)`, `i ≤ j`, of the stored multipliers.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        self.pairs.iter().position(|&p| p == (i, j)).expect("upper-triangle pair")
    }

    /// `∂∂̄ φ` at every node, exact for band-limited `φ`.
    pub fn ddbar(&self, phi: &[f64]) -> HermitianField {
        let n = self.grid.dim();
        let hat = self.forward_real(phi);
        let mut out = HermitianField::zeros(n, self.grid.nodes());
        // Diagonal entries are real: two per complex transform.
        let diag: Vec<usize> = (0..n).collect();
        for chunk in diag.chunks(2) {
            let first = &self.symbols[self.pair_index(chunk[0], chunk[0])];
            let second = chunk.get(1).map(|&i| &self.symbols[self.pair_index(i, i)]);
            let packed: Vec<Complex64> = (0..hat.len())
                .into_par_iter()
                .map(|k| {
                    let mut z = hat[k] * first[k].re;
                    if let Some(s) = second {
                        z += Complex64::i() * hat[k] * s[k].re;
                    }
                    z
                })
                .collect();
            let values = self.inverse(packed);
            let data = out.as_mut_slice();
            for (node, v) in values.iter().enumerate() {
                data[node * n * n + chunk[0] * n + chunk[0]] = Complex64::new(v.re, 0.0);
                if let Some(&i) = chunk.get(1) {
                    data[node * n * n + i * n + i] = Complex64::new(v.im, 0.0);
                }
            }
        }
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            if i == j {
                continue;
            }
            let sym = &self.symbols[p];
            let spec: Vec<Complex64> = hat.par_iter().zip(sym).map(|(h, s)| h * s).collect();
            let values = self.inverse(spec);
            let data = out.as_mut_slice();
            for (node, v) in values.iter().enumerate() {
                data[node * n * n + i * n + j] = *v;
                data[node * n * n + j * n + i] = v.conj();
            }
        }
        out
    }

    /// Multiplier of `ψ ↦ tr(K · ∂∂̄ψ)` for a constant Hermitian `K`.
    pub fn trace_symbol(&self, k: &CMatrix<f64>) -> Vec<f64> {
        (0..self.grid.nodes())
            .into_par_iter()
            .map(|node| {
                self.pairs
                    .iter()
                    .zip(&self.symbols)
                    .map(|(&(i, j), sym)| {
                        if i == j {
                            k[(i, i)].re * sym[node].re
                        } else {
                            2.0 * (k[(i, j)] * sym[node].conj()).re
                        }
                    })
                    .sum()
            })
            .collect()
    }

    /// Mean-zero solution of `tr(K ∂∂̄ψ) = rhs − mean(rhs)` for the
    /// multiplier `sigma` from [`Spectral::trace_symbol`]. Modes where the
    /// multiplier vanishes are dropped.
    pub fn solve_symbol(&self, sigma: &[f64], rhs: &[f64]) -> Vec<f64> {
        let scale = sigma.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let floor = 1e-14 * scale;
        let mut hat = self.forward_real(rhs);
        hat.par_iter_mut().zip(sigma).enumerate().for_each(|(k, (h, &s))| {
            if k == 0 || s.abs() <= floor {
                *h = Complex64::new(0.0, 0.0);
            } else {
                *h /= s;
            }
        });
        self.inverse(hat).into_iter().map(|z| z.re).collect()
    }
}

/// One-shot `∂∂̄ φ`.
pub fn ddbar(phi: &PotentialField, grid: &TorusGrid) -> HermitianField {
    Spectral::new(grid).ddbar(phi.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(grid: &TorusGrid, f: impl Fn(&[f64]) -> f64 + Sync) -> Vec<f64> {
        (0..grid.nodes()).map(|node| f(&grid.position(node))).collect()
    }

    #[test]
    fn transform_round_trip() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let sp = Spectral::new(&grid);
        let v: Vec<f64> = (0..grid.nodes()).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        let back = sp.inverse(sp.forward_real(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b.re).abs() < 1e-13 && b.im.abs() < 1e-13);
        }
    }

    #[test]
    fn single_cosine_in_one_dimension() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let phi = sample(&grid, |x| (TAU * x[0]).cos());
        let h = Spectral::new(&grid).ddbar(&phi);
        for node in 0..grid.nodes() {
            let x = grid.position(node);
            let expected = -PI * PI * (TAU * x[0]).cos();
            assert!((h.entry(node, 0, 0).re - expected).abs() < 1e-11);
            assert!(h.entry(node, 0, 0).im.abs() < 1e-15);
        }
    }

    #[test]
    fn mixed_term_in_two_dimensions() {
        // φ = cos(2πx₁)cos(2πy₂): the (1,2̄) entry is (i/4)·4π² sin(2πx₁) sin(2πy₂).
        let grid = TorusGrid::new(2, 8).unwrap();
        let phi = sample(&grid, |x| (TAU * x[0]).cos() * (TAU * x[3]).cos());
        let h = Spectral::new(&grid).ddbar(&phi);
        for node in 0..grid.nodes() {
            let x = grid.position(node);
            let (c1, s1) = ((TAU * x[0]).cos(), (TAU * x[0]).sin());
            let (c4, s4) = ((TAU * x[3]).cos(), (TAU * x[3]).sin());
            let d11 = -PI * PI * c1 * c4;
            let d22 = -PI * PI * c1 * c4;
            let d12 = Complex64::new(0.0, PI * PI * s1 * s4);
            assert!((h.entry(node, 0, 0).re - d11).abs() < 1e-11);
            assert!((h.entry(node, 1, 1).re - d22).abs() < 1e-11);
            assert!((h.entry(node, 0, 1) - d12).norm() < 1e-11);
            assert!((h.entry(node, 1, 0) - d12.conj()).norm() < 1e-11);
        }
        assert_eq!(h.hermitian_defect(), 0.0);
    }

    #[test]
    fn constants_are_annihilated() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let h = Spectral::new(&grid).ddbar(&vec![3.5; grid.nodes()]);
        assert!(h.as_slice().iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn symbol_inverse_recovers_mean_zero_potential() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let sp = Spectral::new(&grid);
        let k = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.5, 0.0),
                Complex64::new(0.2, -0.4),
                Complex64::new(0.2, 0.4),
                Complex64::new(0.8, 0.0),
            ],
        );
        let psi = sample(&grid, |x| (TAU * (x[0] + 2.0 * x[3])).sin() + 0.3 * (TAU * (x[1] - x[2])).cos());
        let h = sp.ddbar(&psi);
        let rhs: Vec<f64> = (0..grid.nodes())
            .map(|node| {
                let mut t = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        t += (k[(i, j)] * h.entry(node, j, i)).re;
                    }
                }
                t
            })
            .collect();
        let back = sp.solve_symbol(&sp.trace_symbol(&k), &rhs);
        for (a, b) in psi.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
