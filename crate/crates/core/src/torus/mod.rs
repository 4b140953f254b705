//! Discrete `(1,1)`-forms on the flat complex torus with `χ` the identity.
//!
//! Every integral `∫_M (·) χⁿ` becomes a grid mean, so `∫ χⁿ = 1`.

pub mod field;
pub mod grid;
pub mod io;
pub mod node;
pub mod spectral;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase::PhaseOperator;
use crate::scalar::{mean, sup_norm};

pub use field::{FormSpec, HermitianField, Mode, PotentialField, Rhs, ScalarSpec};
pub use grid::TorusGrid;
pub use node::{node_eigen, NodeEigen};
pub use spectral::{ddbar, Spectral};

/// `constant + ∂∂̄(spec potential) + ∂∂̄φ`.
pub fn assemble_omega(spec: &FormSpec, phi: &PotentialField, spectral: &Spectral) -> Result<HermitianField> {
    let grid = spectral.grid();
    let base = spec.potential(grid)?;
    if phi.len() != grid.nodes() {
        return Err(Error::Domain("potential does not match the grid".into()));
    }
    let total: Vec<f64> = base.values().iter().zip(phi.values()).map(|(a, b)| a + b).collect();
    let form = spectral.ddbar(&total);
    let constant = HermitianField::constant(&spec.constant, grid.nodes());
    Ok(constant.axpy(1.0, &form))
}

fn product(values: &[f64]) -> Complex64 {
    values
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &l| acc * Complex64::new(l, 1.0))
}

fn total_angle(values: &[f64]) -> f64 {
    values.iter().map(|&l| std::f64::consts::FRAC_PI_2 - l.atan()).sum()
}

/// Eigenvalues at every node, in node order.
pub fn node_spectra(omega: &HermitianField) -> Vec<Vec<f64>> {
    let n = omega.dim();
    (0..omega.nodes())
        .into_par_iter()
        .map(|node| node::node_eigen(n, omega.node(node)).values)
        .collect()
}

/// Per-node residual of `F` and its aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub values: Vec<f64>,
    pub sup: f64,
    pub mean: f64,
}

/// `F(λ(node), f(node), θ₀)` at every node.
pub fn residual_field(omega: &HermitianField, f: &Rhs, target_phase: f64) -> Result<ResidualField> {
    let n = omega.dim();
    let values: Vec<Result<f64>> = (0..omega.nodes())
        .into_par_iter()
        .map(|node| {
            let lam = node::node_eigen(n, omega.node(node)).values;
            PhaseOperator::new(f.at(node), target_phase)
                .value_at(&lam)
                .map_err(|_| Error::NodeBranch {
                    node,
                    q: total_angle(&lam),
                })
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(ResidualField {
        sup: sup_norm(&values),
        mean: mean(&values),
        values,
    })
}

/// Pointwise `Re∏(λ_k + i) − cot θ₀·Im∏(λ_k + i)` at every node.
pub fn integrand_field(omega: &HermitianField, target_phase: f64) -> Result<Vec<f64>> {
    let n = omega.dim();
    let cot = 1.0 / target_phase.tan();
    let values: Vec<Result<f64>> = (0..omega.nodes())
        .into_par_iter()
        .map(|node| {
            let lam = node::node_eigen(n, omega.node(node)).values;
            let p = product(&lam);
            if p.im <= 0.0 {
                return Err(Error::NodeBranch {
                    node,
                    q: total_angle(&lam),
                });
            }
            Ok(p.re - cot * p.im)
        })
        .collect();
    values.into_iter().collect()
}

/// Grid mean of the integrand: the constant `f̄` with
/// `∫ f̄ χⁿ = ∫ (Re(ω+iχ)ⁿ − cot θ₀ Im(ω+iχ)ⁿ)`.
pub fn integrability_constant(omega: &HermitianField, target_phase: f64) -> Result<f64> {
    Ok(mean(&integrand_field(omega, target_phase)?))
}

/// Extreme phases over the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseExtremes {
    pub max_p: f64,
    pub max_q: f64,
    /// Node attaining `max_p`.
    pub p_node: usize,
    /// Node attaining `max_q`.
    pub q_node: usize,
}

pub fn phase_extremes(omega: &HermitianField) -> PhaseExtremes {
    let per_node: Vec<(f64, f64)> = node_spectra(omega)
        .into_iter()
        .map(|lam| {
            let q = total_angle(&lam);
            let min_angle = std::f64::consts::FRAC_PI_2 - lam[0].atan();
            (if lam.len() == 1 { 0.0 } else { q - min_angle }, q)
        })
        .collect();
    let mut ext = PhaseExtremes {
        max_p: f64::NEG_INFINITY,
        max_q: f64::NEG_INFINITY,
        p_node: 0,
        q_node: 0,
    };
    for (node, &(p, q)) in per_node.iter().enumerate() {
        if p > ext.max_p {
            ext.max_p = p;
            ext.p_node = node;
        }
        if q > ext.max_q {
            ext.max_q = q;
            ext.q_node = node;
        }
    }
    ext
}
