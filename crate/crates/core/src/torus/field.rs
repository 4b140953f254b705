use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{compensated_sum, mean};
use crate::torus::grid::TorusGrid;

/// One `n × n` Hermitian matrix per grid node, stored node-major with
/// row-major entries inside each node.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianField {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianField {
    pub fn zeros(dim: usize, nodes: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim * nodes],
        }
    }

    pub fn constant(matrix: &CMatrix<f64>, nodes: usize) -> Self {
        let dim = matrix.rows();
        let mut data = Vec::with_capacity(dim * dim * nodes);
        for _ in 0..nodes {
            data.extend_from_slice(matrix.as_slice());
        }
        Self { dim, data }
    }

    /// Wraps raw node-major data.
    pub fn from_data(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim * dim) {
            return Err(Error::Domain("field data length is not a multiple of n*n".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> usize {
        self.data.len() / (self.dim * self.dim)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn node(&self, node: usize) -> &[Complex64] {
        let m = self.dim * self.dim;
        &self.data[node * m..(node + 1) * m]
    }

    pub fn node_mut(&mut self, node: usize) -> &mut [Complex64] {
        let m = self.dim * self.dim;
        &mut self.data[node * m..(node + 1) * m]
    }

    pub fn node_matrix(&self, node: usize) -> CMatrix<f64> {
        CMatrix::from_row_slice(self.dim, self.dim, self.node(node))
    }

    pub fn entry(&self, node: usize, row: usize, col: usize) -> Complex64 {
        self.node(node)[row * self.dim + col]
    }

    /// `self + scale · other`.
    pub fn axpy(&self, scale: f64, other: &HermitianField) -> HermitianField {
        assert_eq!(self.data.len(), other.data.len(), "field shapes differ");
        let data = self
            .data
            .par_iter()
            .zip(&other.data)
            .map(|(a, b)| a + b * scale)
            .collect();
        HermitianField { dim: self.dim, data }
    }

    pub fn scaled(&self, s: f64) -> HermitianField {
        HermitianField {
            dim: self.dim,
            data: self.data.par_iter().map(|z| z * s).collect(),
        }
    }

    /// Adds `s·I` at every node.
    pub fn add_identity(&self, s: f64) -> HermitianField {
        let mut out = self.clone();
        let d = self.dim;
        out.data.par_chunks_mut(d * d).for_each(|node| {
            for i in 0..d {
                node[i * d + i] += s;
            }
        });
        out
    }

    /// Entrywise grid means.
    pub fn mean_matrix(&self) -> CMatrix<f64> {
        let d = self.dim;
        let nodes = self.nodes();
        CMatrix::from_fn(d, d, |r, c| {
            let k = r * d + c;
            let re = compensated_sum((0..nodes).map(|i| self.data[i * d * d + k].re));
            let im = compensated_sum((0..nodes).map(|i| self.data[i * d * d + k].im));
            Complex64::new(re, im) / nodes as f64
        })
    }

    /// Largest `|H_ij − conj(H_ji)|` over all nodes.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim;
        self.data
            .chunks(d * d)
            .map(|node| {
                let mut worst = 0.0f64;
                for i in 0..d {
                    for j in 0..d {
                        worst = worst.max((node[i * d + j] - node[j * d + i].conj()).norm());
                    }
                }
                worst
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &HermitianField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Real scalar per node.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    values: Vec<f64>,
}

impl PotentialField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("potential has non-finite entries".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(nodes: usize) -> Self {
        Self {
            values: vec![0.0; nodes],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Copy with the grid mean removed.
    pub fn centered(&self) -> Self {
        let m = self.mean();
        Self {
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }

    pub fn is_mean_zero(&self, tol: f64) -> bool {
        self.mean().abs() <= tol
    }
}

/// One trigonometric term `amplitude · cos(2π k·x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    /// Integer wavevector over the real axes `x₁,…,xₙ,y₁,…,yₙ`.
    pub wavevector: Vec<i64>,
    pub amplitude: f64,
    pub phase: f64,
}

fn check_modes(modes: &[Mode], grid: &TorusGrid) -> Result<()> {
    for m in modes {
        if m.wavevector.len() != grid.axes() {
            return Err(Error::config(
                "mode-shape",
                format!("wavevector {:?} needs {} components", m.wavevector, grid.axes()),
            ));
        }
        if !grid.resolves(&m.wavevector) {
            return Err(Error::config(
                "nyquist",
                format!("wavevector {:?} is not below N/2 = {}", m.wavevector, grid.size() / 2),
            ));
        }
        if !m.amplitude.is_finite() || !m.phase.is_finite() {
            return Err(Error::config("mode-value", "mode amplitude and phase must be finite"));
        }
    }
    Ok(())
}

fn synthesize(modes: &[Mode], grid: &TorusGrid, offset: f64) -> Vec<f64> {
    (0..grid.nodes())
        .into_par_iter()
        .map(|node| {
            let x = grid.position(node);
            offset
                + modes
                    .iter()
                    .map(|m| {
                        let arg: f64 = m.wavevector.iter().zip(&x).map(|(&k, &xa)| k as f64 * xa).sum();
                        m.amplitude * (std::f64::consts::TAU * arg + m.phase).cos()
                    })
                    .sum::<f64>()
        })
        .collect()
}

/// A constant Hermitian matrix plus `∂∂̄` of a trigonometric potential.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSpec {
    pub constant: CMatrix<f64>,
    pub modes: Vec<Mode>,
}

impl FormSpec {
    pub fn constant(constant: CMatrix<f64>) -> Self {
        Self {
            constant,
            modes: Vec::new(),
        }
    }

    pub fn validate(&self, grid: &TorusGrid) -> Result<()> {
        if self.constant.rows() != grid.dim() || !self.constant.is_square() {
            return Err(Error::config(
                "form-shape",
                format!("constant part must be {0}x{0}", grid.dim()),
            ));
        }
        if !self.constant.is_hermitian(1e-12 * self.constant.frobenius_norm().max(1.0)) {
            return Err(Error::config("form-hermitian", "constant part is not Hermitian"));
        }
        check_modes(&self.modes, grid)
    }

    /// The potential whose `∂∂̄` is the nonconstant part.
    pub fn potential(&self, grid: &TorusGrid) -> Result<PotentialField> {
        self.validate(grid)?;
        PotentialField::new(synthesize(&self.modes, grid, 0.0))
    }
}

/// A real function `constant + Σ amplitude·cos(2π k·x + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSpec {
    pub constant: f64,
    pub modes: Vec<Mode>,
}

impl ScalarSpec {
    pub fn constant(value: f64) -> Self {
        Self {
            constant: value,
            modes: Vec::new(),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.modes.iter().all(|m| m.amplitude == 0.0)
    }

    pub fn sample(&self, grid: &TorusGrid) -> Result<Vec<f64>> {
        check_modes(&self.modes, grid)?;
        Ok(synthesize(&self.modes, grid, self.constant))
    }
}

/// Right-hand side: a constant or one value per node.
#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Constant(f64),
    Field(Vec<f64>),
}

impl Rhs {
    #[inline]
    pub fn at(&self, node: usize) -> f64 {
        match self {
            Rhs::Constant(c) => *c,
            Rhs::Field(v) => v[node],
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Rhs::Constant(c) => *c,
            Rhs::Field(v) => mean(v),
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            Rhs::Constant(c) => *c,
            Rhs::Field(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// `self + shift` pointwise.
    pub fn shifted(&self, shift: f64) -> Rhs {
        match self {
            Rhs::Constant(c) => Rhs::Constant(c + shift),
            Rhs::Field(v) => Rhs::Field(v.iter().map(|x| x + shift).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_shift_and_means() {
        let grid = TorusGrid::new(2, 8).unwrap();
        let base = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.2, 0.3),
                Complex64::new(0.2, -0.3),
                Complex64::new(2.0, 0.0),
            ],
        );
        let field = HermitianField::constant(&base, grid.nodes()).add_identity(0.5);
        let m = field.mean_matrix();
        assert!((m[(0, 0)].re - 1.5).abs() < 1e-15 && (m[(1, 1)].re - 2.5).abs() < 1e-15);
        assert_eq!(field.hermitian_defect(), 0.0);
        assert_eq!(field.entry(17, 0, 1), Complex64::new(0.2, 0.3));
    }

    #[test]
    fn nyquist_modes_are_rejected() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let spec = FormSpec {
            constant: CMatrix::identity(1),
            modes: vec![Mode {
                wavevector: vec![4, 0],
                amplitude: 1.0,
                phase: 0.0,
            }],
        };
        assert_eq!(spec.validate(&grid).unwrap_err().reason_code(), "nyquist");
        let bad_shape = ScalarSpec {
            constant: 0.0,
            modes: vec![Mode {
                wavevector: vec![1],
                amplitude: 1.0,
                phase: 0.0,
            }],
        };
        assert_eq!(bad_shape.sample(&grid).unwrap_err().reason_code(), "mode-shape");
    }

    #[test]
    fn scalar_synthesis_matches_formula() {
        let grid = TorusGrid::new(1, 8).unwrap();
        let s = ScalarSpec {
            constant: 0.5,
            modes: vec![Mode {
                wavevector: vec![1, 2],
                amplitude: 0.25,
                phase: 0.3,
            }],
        };
        let v = s.sample(&grid).unwrap();
        let node = grid.index(&[3, 5]);
        let expected = 0.5 + 0.25 * (std::f64::consts::TAU * (3.0 / 8.0 + 2.0 * 5.0 / 8.0) + 0.3).cos();
        assert!((v[node] - expected).abs() < 1e-14);
        assert!((mean(&v) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn centered_potential_has_zero_mean() {
        let p = PotentialField::new(vec![1.0, 2.0, 3.0, 6.0]).unwrap().centered();
        assert!(p.is_mean_zero(1e-15));
        assert!(PotentialField::new(vec![f64::NAN]).is_err());
    }
}
