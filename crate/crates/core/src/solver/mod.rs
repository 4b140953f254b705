//! Damped Newton-Krylov solver for
//! `cot Q(λ(ω_φ)) − (f + c)/Im∏(λ_k + i) − cot θ₀ = 0` on the torus, with
//! the potential `φ` (mean zero) and the constant `c` as unknowns, driven
//! along continuity paths.

pub mod gmres;
pub mod newton;
pub mod paths;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::ConeParams;
use crate::torus::{assemble_omega, FormSpec, HermitianField, PotentialField, Rhs, Spectral, TorusGrid};

pub use newton::{damped_step, evaluate, newton_direction, newton_solve, Direction, Evaluation, Iterate, NewtonOutcome};
pub use paths::{solve, ContinuityState, PathFailure, PathTrail, SolveReport};

/// Which continuation the solver runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Scaled warm start from a constant form, then `add_chi`, then `deform_f`.
    WarmStart,
    /// `ω₀ + sχ` from the upper end down to `s = 0`, then `deform_f`.
    AddChi,
    /// Solve at the mean of `f`, then deform the right-hand side to `f`.
    DeformF,
    /// Newton on the target equation from `φ = 0`.
    Direct,
}

impl PathKind {
    pub fn name(self) -> &'static str {
        match self {
            PathKind::WarmStart => "warm_start",
            PathKind::AddChi => "add_chi",
            PathKind::DeformF => "deform_f",
            PathKind::Direct => "direct",
        }
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Target sup-norm of the residual.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Relative tolerance of each Krylov solve.
    pub krylov_tol: f64,
    pub krylov_restart: usize,
    /// Required distance of every node's `P` and `Q` from the cone walls.
    pub cone_margin: f64,
    /// Smallest damping factor before a Newton step is declared stalled.
    pub damping_min: f64,
    pub path: PathKind,
    /// Initial (and largest) path increment is `1 / path_steps`.
    pub path_steps: usize,
    /// Smallest path increment before a path is declared failed.
    pub min_path_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-9,
            max_newton: 50,
            krylov_tol: 1e-10,
            krylov_restart: 40,
            cone_margin: 1e-3,
            damping_min: 2f64.powi(-20),
            path: PathKind::WarmStart,
            path_steps: 16,
            min_path_step: 2f64.powi(-10),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, cone: &ConeParams<f64>) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("krylov_tol", self.krylov_tol),
            ("damping_min", self.damping_min),
            ("min_path_step", self.min_path_step),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config("solver-params", format!("{name} must be positive")));
            }
        }
        if self.max_newton == 0 || self.krylov_restart == 0 || self.path_steps == 0 {
            return Err(Error::config(
                "solver-params",
                "max_newton, krylov_restart and path_steps must be positive",
            ));
        }
        if self.damping_min >= 1.0 || self.min_path_step > 1.0 / self.path_steps as f64 {
            return Err(Error::config(
                "solver-params",
                "damping_min must be below 1 and min_path_step at most 1/path_steps",
            ));
        }
        if !(self.cone_margin >= 0.0 && self.cone_margin < cone.target_phase) {
            return Err(Error::config("solver-params", "cone_margin must lie in [0, target_phase)"));
        }
        Ok(())
    }
}

/// The equation data: grid, cone, background form `ω₀`, right-hand side `f`.
#[derive(Debug)]
pub struct Problem {
    grid: TorusGrid,
    cone: ConeParams<f64>,
    omega0: HermitianField,
    f: Rhs,
    spectral: Spectral,
}

impl Problem {
    pub fn new(grid: TorusGrid, cone: ConeParams<f64>, omega0: &FormSpec, f: Rhs) -> Result<Self> {
        let spectral = Spectral::new(&grid);
        let field = assemble_omega(omega0, &PotentialField::zeros(grid.nodes()), &spectral)?;
        Self::with_spectral(grid, cone, field, f, spectral)
    }

    pub fn from_field(grid: TorusGrid, cone: ConeParams<f64>, omega0: HermitianField, f: Rhs) -> Result<Self> {
        let spectral = Spectral::new(&grid);
        Self::with_spectral(grid, cone, omega0, f, spectral)
    }

    fn with_spectral(
        grid: TorusGrid,
        cone: ConeParams<f64>,
        omega0: HermitianField,
        f: Rhs,
        spectral: Spectral,
    ) -> Result<Self> {
        if omega0.nodes() != grid.nodes() || omega0.dim() != grid.dim() {
            return Err(Error::config("form-shape", "background form does not match the grid"));
        }
        if let Rhs::Field(v) = &f {
            if v.len() != grid.nodes() {
                return Err(Error::config("rhs-shape", "right-hand side does not match the grid"));
            }
        }
        Ok(Self {
            grid,
            cone,
            omega0,
            f,
            spectral,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn cone(&self) -> &ConeParams<f64> {
        &self.cone
    }

    pub fn omega0(&self) -> &HermitianField {
        &self.omega0
    }

    pub fn rhs(&self) -> &Rhs {
        &self.f
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// `ω₀ + ∂∂̄φ`.
    pub fn omega_phi(&self, phi: &[f64]) -> HermitianField {
        self.omega0.axpy(1.0, &self.spectral.ddbar(phi))
    }
}

/// One equation along a path: background `scale·ω₀ + shift·χ` and
/// right-hand side `rhs + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub form_scale: f64,
    pub identity_shift: f64,
    pub rhs: Rhs,
}

impl Target {
    /// The target equation itself.
    pub fn direct(problem: &Problem) -> Self {
        Self {
            form_scale: 1.0,
            identity_shift: 0.0,
            rhs: problem.rhs().clone(),
        }
    }

    pub fn base_form(&self, problem: &Problem) -> HermitianField {
        problem.omega0().scaled(self.form_scale).add_identity(self.identity_shift)
    }
}
