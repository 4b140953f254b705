//! Numerics for the supercritical deformed Hermitian-Yang-Mills equation.
//!
//! - [`phase`]: the eigenvalue phase operator, its derivatives and cone.
//! - [`reduction`]: phase inequalities for block Hermitian matrices.
//! - [`torus`]: discrete `(1,1)`-forms on flat complex tori.
//! - [`solver`]: Newton-Krylov continuation for the equation on a torus.
//! - [`stability`]: subtorus integrals along test families.
//! - [`verify`]: randomized property campaigns.
//! - [`cli`]: the `dhym` experiment runner.
//!
//! The eigenvalue and dense-matrix layers are generic over [`Real`]
//! (`f32`/`f64`); the grid, solver and campaigns run in `f64`.

// `!(x > 0.0)` is the NaN-rejecting test used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod error;
pub mod linalg;
pub mod phase;
pub mod reduction;
pub mod sampling;
pub mod scalar;
pub mod solver;
pub mod stability;
pub mod torus;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Spectrum = phase::Spectrum<f64>;
pub type ConeParams = phase::ConeParams<f64>;
pub type PhaseOperator = phase::PhaseOperator<f64>;
pub type PhaseConstants = phase::PhaseConstants<f64>;
pub type HermitianPair = phase::HermitianPair<f64>;
pub type CMatrix = linalg::CMatrix<f64>;
pub type BlockHermitian = reduction::BlockHermitian<f64>;

pub type Spectrum32 = phase::Spectrum<f32>;
pub type ConeParams32 = phase::ConeParams<f32>;
pub type PhaseOperator32 = phase::PhaseOperator<f32>;
pub type HermitianPair32 = phase::HermitianPair<f32>;
pub type CMatrix32 = linalg::CMatrix<f32>;

pub use solver::{solve, PathKind, Problem, SolveReport, SolverConfig};
pub use stability::{family_margin, monotonicity_check, subtorus_integral, FamilyRule, TestFamily};
pub use torus::{FormSpec, HermitianField, Rhs, ScalarSpec, TorusGrid};
