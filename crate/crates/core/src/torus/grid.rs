use crate::error::{Error, Result};

/// Largest supported complex dimension of the torus.
pub const MAX_DIM: usize = 3;

/// Uniform periodic grid on the flat torus `ℂⁿ/ℤ²ⁿ`.
///
/// Real axes are ordered `x₁,…,xₙ,y₁,…,yₙ`; axis `a` has stride `N^a` in
/// the linear node index, so axis 0 varies fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    dim: usize,
    size: usize,
    nodes: usize,
}

impl TorusGrid {
    /// `dim` complex dimensions, `size` nodes per real axis.
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::config("grid", format!("complex dimension {dim} outside 1..=3")));
        }
        if size < 8 || !size.is_power_of_two() {
            return Err(Error::config("grid", format!("grid size {size} must be a power of two >= 8")));
        }
        let nodes = size.pow(2 * dim as u32);
        Ok(Self { dim, size, nodes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nodes per real axis.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn axes(&self) -> usize {
        2 * self.dim
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.size.pow(axis as u32)
    }

    /// Real axis carrying `x_i`.
    pub fn x_axis(&self, i: usize) -> usize {
        i
    }

    /// Real axis carrying `y_i`.
    pub fn y_axis(&self, i: usize) -> usize {
        self.dim + i
    }

    /// Per-axis integer coordinates of a node.
    pub fn coords(&self, node: usize) -> Vec<usize> {
        let mut rest = node;
        (0..self.axes())
            .map(|_| {
                let c = rest % self.size;
                rest /= self.size;
                c
            })
            .collect()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.size + (c % self.size))
    }

    /// Position of a node in `[0,1)^{2n}`.
    pub fn position(&self, node: usize) -> Vec<f64> {
        self.coords(node)
            .into_iter()
            .map(|c| c as f64 / self.size as f64)
            .collect()
    }

    /// Signed wavenumber of a frequency index: `k` for `k < N/2`, else `k − N`.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let half = self.size / 2;
        if index < half {
            index as i64
        } else {
            index as i64 - self.size as i64
        }
    }

    pub fn wavevector(&self, node: usize) -> Vec<i64> {
        self.coords(node).into_iter().map(|c| self.wavenumber(c)).collect()
    }

    /// Whether a wavevector is resolved without touching the Nyquist mode.
    pub fn resolves(&self, k: &[i64]) -> bool {
        let half = (self.size / 2) as i64;
        k.len() == self.axes() && k.iter().all(|&c| c.abs() < half)
    }
}
