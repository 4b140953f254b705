use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase::PhaseOperator;
use crate::scalar::{compensated_sum, mean, sup_norm};
use crate::solver::gmres::gmres;
use crate::solver::{Problem, SolverConfig};
use crate::torus::node::{node_eigen, spectral_combination};
use crate::torus::{HermitianField, PhaseExtremes, Rhs};

/// Residual and linearization of the equation at one iterate.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub residual: Vec<f64>,
    pub sup: f64,
    pub extremes: PhaseExtremes,
    /// Every node satisfies `P < θ₀ − margin` and `Q < Θ₀ − margin`.
    pub in_cone: bool,
    /// Row-major `∂F/∂ω` per node.
    linearization: Vec<Complex64>,
    /// `1 / Im∏(λ_k + i)` per node, the sensitivity of `F` to `−c`.
    inv_im: Vec<f64>,
}

impl Evaluation {
    pub fn linearization(&self) -> &[Complex64] {
        &self.linearization
    }

    pub fn inv_im(&self) -> &[f64] {
        &self.inv_im
    }
}

struct NodeEval {
    residual: f64,
    p: f64,
    q: f64,
    inv_im: f64,
    linearization: Vec<Complex64>,
}

/// Evaluates the residual, the per-node linearization and the cone status of
/// `ω = base + ∂∂̄φ` with right-hand side `rhs + c`.
pub fn evaluate(
    problem: &Problem,
    base: &HermitianField,
    rhs: &Rhs,
    phi: &[f64],
    c: f64,
    margin: f64,
) -> Result<Evaluation> {
    let omega = base.axpy(1.0, &problem.spectral().ddbar(phi));
    let n = omega.dim();
    let target = problem.cone().target_phase;
    let nodes: Vec<Result<NodeEval>> = (0..omega.nodes())
        .into_par_iter()
        .map(|node| {
            let eig = node_eigen(n, omega.node(node));
            let angles: Vec<f64> = eig
                .values
                .iter()
                .map(|&l| std::f64::consts::FRAC_PI_2 - l.atan())
                .collect();
            let q: f64 = angles.iter().sum();
            let p = if n == 1 { 0.0 } else { q - angles[0] };
            let op = PhaseOperator::new(rhs.at(node) + c, target);
            let residual = op.value_at(&eig.values).map_err(|_| Error::NodeBranch { node, q })?;
            let gradient = op.gradient_at(&eig.values)?;
            let im = eig
                .values
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &l| acc * Complex64::new(l, 1.0))
                .im;
            Ok(NodeEval {
                residual,
                p,
                q,
                inv_im: 1.0 / im,
                linearization: spectral_combination(n, &eig, &gradient),
            })
        })
        .collect();
    let nodes = nodes.into_iter().collect::<Result<Vec<NodeEval>>>()?;
    let mut extremes = PhaseExtremes {
        max_p: f64::NEG_INFINITY,
        max_q: f64::NEG_INFINITY,
        p_node: 0,
        q_node: 0,
    };
    for (i, e) in nodes.iter().enumerate() {
        if e.p > extremes.max_p {
            extremes.max_p = e.p;
            extremes.p_node = i;
        }
        if e.q > extremes.max_q {
            extremes.max_q = e.q;
            extremes.q_node = i;
        }
    }
    let cone = problem.cone();
    let in_cone = extremes.max_p < cone.target_phase - margin && extremes.max_q < cone.phase_cap - margin;
    let residual: Vec<f64> = nodes.iter().map(|e| e.residual).collect();
    Ok(Evaluation {
        sup: sup_norm(&residual),
        residual,
        extremes,
        in_cone,
        inv_im: nodes.iter().map(|e| e.inv_im).collect(),
        linearization: nodes.into_iter().flat_map(|e| e.linearization).collect(),
    })
}

/// Newton correction `(ψ, dc)`.
#[derive(Debug, Clone)]
pub struct Direction {
    pub psi: Vec<f64>,
    pub dc: f64,
    pub krylov_iterations: usize,
}

/// `tr(L·∂∂̄ψ) − dc/Im∏` at every node.
fn apply_jacobian(problem: &Problem, eval: &Evaluation, psi: &[f64], dc: f64) -> Vec<f64> {
    let h = problem.spectral().ddbar(psi);
    let n = h.dim();
    let lin = &eval.linearization;
    (0..h.nodes())
        .into_par_iter()
        .map(|node| {
            let hn = h.node(node);
            let ln = &lin[node * n * n..(node + 1) * n * n];
            let mut t = 0.0;
            for i in 0..n {
                t += ln[i * n + i].re * hn[i * n + i].re;
                for j in (i + 1)..n {
                    t += 2.0 * (ln[i * n + j] * hn[i * n + j].conj()).re;
                }
            }
            t - dc * eval.inv_im[node]
        })
        .collect()
}

/// Solves `tr(L·∂∂̄ψ) − dc/Im∏ = −F` by right-preconditioned GMRES. The
/// preconditioner inverts the grid-averaged constant-coefficient operator
/// spectrally and fixes `dc` from the residual mean.
pub fn newton_direction(problem: &Problem, eval: &Evaluation, config: &SolverConfig) -> Result<Direction> {
    let grid = problem.grid();
    let n = grid.dim();
    let nodes = grid.nodes();
    let averaged = HermitianField::from_data(n, eval.linearization.clone())?.mean_matrix();
    let sigma = problem.spectral().trace_symbol(&averaged);
    let mean_inv_im = mean(&eval.inv_im);
    let precondition = |z: &[f64]| -> (Vec<f64>, f64) {
        let psi = problem.spectral().solve_symbol(&sigma, z);
        (psi, -mean(z) / mean_inv_im)
    };
    let rhs: Vec<f64> = eval.residual.iter().map(|r| -r).collect();
    let out = gmres(
        |z| {
            let (psi, dc) = precondition(z);
            apply_jacobian(problem, eval, &psi, dc)
        },
        &rhs,
        config.krylov_restart,
        config.krylov_tol,
        10 * nodes,
    )?;
    let (psi, dc) = precondition(&out.solution);
    Ok(Direction {
        psi,
        dc,
        krylov_iterations: out.iterations,
    })
}

/// A point `(φ, c)` together with its evaluation.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub phi: Vec<f64>,
    pub c: f64,
    pub eval: Evaluation,
}

/// Largest `2⁻ᵏ` keeping every node in the cone with margin and the residual
/// sup-norm within 1.5 times the current one.
pub fn damped_step(
    problem: &Problem,
    base: &HermitianField,
    rhs: &Rhs,
    current: &Iterate,
    direction: &Direction,
    config: &SolverConfig,
) -> Result<(Iterate, f64)> {
    let mut step = 1.0;
    while step >= config.damping_min {
        let phi: Vec<f64> = current
            .phi
            .iter()
            .zip(&direction.psi)
            .map(|(p, d)| p + step * d)
            .collect();
        let c = current.c + step * direction.dc;
        if let Ok(eval) = evaluate(problem, base, rhs, &phi, c, config.cone_margin) {
            if eval.in_cone && eval.sup <= 1.5 * current.eval.sup {
                return Ok((Iterate { phi, c, eval }, step));
            }
        }
        step *= 0.5;
    }
    Err(Error::Stall {
        min_step: config.damping_min,
    })
}

/// Converged Newton iterate and its history.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub iterate: Iterate,
    pub iterations: usize,
    /// Residual sup-norm before each step and at the end.
    pub history: Vec<f64>,
    pub steps: Vec<f64>,
    pub krylov_iterations: usize,
}

/// Damped Newton from `(φ₀, c₀)` on `base + ∂∂̄φ` with right-hand side
/// `rhs + c`.
pub fn newton_solve(
    problem: &Problem,
    base: &HermitianField,
    rhs: &Rhs,
    phi0: Vec<f64>,
    c0: f64,
    config: &SolverConfig,
) -> Result<NewtonOutcome> {
    let eval = evaluate(problem, base, rhs, &phi0, c0, config.cone_margin)?;
    if !eval.in_cone {
        return Err(Error::Branch(format!(
            "starting point leaves the cone: max P = {} at node {}, max Q = {} at node {}",
            eval.extremes.max_p, eval.extremes.p_node, eval.extremes.max_q, eval.extremes.q_node
        )));
    }
    let mut current = Iterate { phi: phi0, c: c0, eval };
    let mut history = vec![current.eval.sup];
    let mut steps = Vec::new();
    let mut krylov = 0;
    for iteration in 0..=config.max_newton {
        if current.eval.sup <= config.newton_tol {
            return Ok(NewtonOutcome {
                iterate: current,
                iterations: iteration,
                history,
                steps,
                krylov_iterations: krylov,
            });
        }
        if iteration == config.max_newton {
            break;
        }
        let direction = newton_direction(problem, &current.eval, config)?;
        krylov += direction.krylov_iterations;
        let (next, step) = damped_step(problem, base, rhs, &current, &direction, config)?;
        current = next;
        // Keep the potential exactly mean-zero.
        let m = compensated_sum(current.phi.iter().copied()) / current.phi.len() as f64;
        current.phi.iter_mut().for_each(|v| *v -= m);
        history.push(current.eval.sup);
        steps.push(step);
    }
    Err(Error::NotConverged {
        iterations: config.max_newton,
        residual: current.eval.sup,
    })
}
