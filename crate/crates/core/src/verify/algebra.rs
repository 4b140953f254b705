//! Campaigns over the scalar operator `F` and its matrix form `F_A`.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::phase::{
    complex_product, concavity_ratio, cone_contains, epsilon2, matrix_phase, phase_constants, phase_p, phase_q,
    reciprocal_gauge, zero_set_bound, ConeParams, HermitianPair, PhaseOperator, Spectrum,
};
use crate::sampling::{
    matrix_with_spectrum, random_branch_spectrum, random_congruence, random_cone, random_cone_spectrum,
    random_hermitian, random_positive_definite,
};
use crate::verify::{run_property, Observation, PropertyOutcome, SuiteReport, VerifyConfig};

/// Relative tolerance of the gradient check (central step `1e-5`).
pub const GRADIENT_FD_TOL: f64 = 1e-6;
/// Relative tolerance of the Hessian check (central step `1e-3`).
pub const HESSIAN_FD_TOL: f64 = 1e-4;
/// Largest Hessian eigenvalue accepted at `f = 0`.
pub const CONCAVITY_TOL: f64 = 1e-10;
pub const IDENTITY_TOL: f64 = 1e-10;
/// Dimensions covered by the derivative checks.
pub const FD_MAX_N: usize = 6;
const FD_RHS: [f64; 3] = [0.0, 0.01, -0.01];

fn rows_max_abs(h: &[Vec<f64>]) -> f64 {
    h.iter().flatten().fold(0.0, |m: f64, v| m.max(v.abs()))
}

fn relative(diff: f64, scale: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

fn shifted(values: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut v = values.to_vec();
    v[i] += h;
    v
}

/// `(n, f)` for sample `i` of the derivative checks.
fn fd_case(i: u64) -> (usize, f64) {
    let combo = (i % (FD_MAX_N * FD_RHS.len()) as u64) as usize;
    (combo / FD_RHS.len() + 1, FD_RHS[combo % FD_RHS.len()])
}

fn fd_sample(rng: &mut ChaCha8Rng, i: u64) -> (usize, PhaseOperator<f64>, Spectrum<f64>) {
    let (n, f) = fd_case(i);
    let cone = random_cone(rng);
    let s = random_cone_spectrum(n, &cone, rng);
    (n, PhaseOperator::new(f, cone.target_phase), s)
}

/// Central differences of the closed-form gradient, differencing `F`.
fn hessian_fd(name: &str, h: f64, seed: u64, total: usize) -> PropertyOutcome {
    run_property(name, HESSIAN_FD_TOL, seed, total, |rng, i| {
        let (_, op, s) = fd_sample(rng, i);
        let lam = s.values();
        let hess = op.hessian(&s)?;
        let mut diff: f64 = 0.0;
        for (k, row) in hess.iter().enumerate() {
            let up = op.gradient_at(&shifted(lam, k, h))?;
            let down = op.gradient_at(&shifted(lam, k, -h))?;
            for (j, hkj) in row.iter().enumerate() {
                diff = diff.max(((up[j] - down[j]) / (2.0 * h) - hkj).abs());
            }
        }
        Ok(Observation::at_most(relative(diff, rows_max_abs(&hess)), HESSIAN_FD_TOL))
    })
}

/// Central-difference checks of the closed-form gradient (step `1e-5`,
/// differencing `F`) and Hessian (step `1e-3`, differencing the gradient),
/// for `n = 1..=6` and `f ∈ {0, ±0.01}`.
///
/// Near `Q → π` the `1e-3` step's truncation error alone can exceed the
/// `1e-4` tolerance; the same check at step `1e-4` is reported alongside.
pub fn derivative_fidelity(config: &VerifyConfig) -> SuiteReport {
    let total = config.fd_samples * FD_MAX_N * FD_RHS.len();
    let gradient = run_property("gradient-fd", GRADIENT_FD_TOL, config.seed, total, |rng, i| {
        let (_, op, s) = fd_sample(rng, i);
        let lam = s.values();
        let g = op.gradient(&s)?;
        let h = 1e-5;
        let mut diff: f64 = 0.0;
        for (k, gk) in g.iter().enumerate() {
            let fd = (op.value_at(&shifted(lam, k, h))? - op.value_at(&shifted(lam, k, -h))?) / (2.0 * h);
            diff = diff.max((fd - gk).abs());
        }
        let scale = g.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        Ok(Observation::at_most(relative(diff, scale), GRADIENT_FD_TOL))
    });
    let hessian = hessian_fd("hessian-fd", 1e-3, config.seed, total);
    let refined = hessian_fd("hessian-fd-step-1e-4", 1e-4, config.seed, total);
    SuiteReport {
        suite: "derivatives",
        properties: vec![gradient, hessian, refined],
    }
}

/// Empirical concavity margin for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConcavityMargin {
    pub n: usize,
    /// Worst (largest) normalized curvature ratio over the samples.
    pub eps10_hat: f64,
    /// `−eps10_hat / 2`, the uniform margin asserted for `n ≥ 4`.
    pub eps5: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub suite: SuiteReport,
    /// Dimensions `4..=max_n`.
    pub concavity_margins: Vec<ConcavityMargin>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.suite.passed()
    }

    /// Measured `ε₁₀` (positive) for `n ≥ 4`, when it was measured negative.
    pub fn eps10(&self, n: usize) -> Option<f64> {
        self.concavity_margins
            .iter()
            .find(|m| m.n == n && m.eps10_hat < 0.0)
            .map(|m| -m.eps10_hat)
    }
}

/// `ε₂` for a sampled cone: the `ε̂₁₀` term only enters for `n ≥ 4`.
pub fn epsilon2_for(n: usize, cone: &ConeParams<f64>, eps10: Option<f64>) -> Result<f64> {
    if n <= 3 {
        return epsilon2(n, cone, f64::INFINITY);
    }
    match eps10 {
        Some(e) => epsilon2(n, cone, e),
        None => Err(Error::Domain(format!("no measured concavity margin for n = {n}"))),
    }
}

/// Smallest admissible right-hand side: `0` for `n ≤ 3`, `−ε₂` otherwise.
fn rhs_floor(n: usize, cone: &ConeParams<f64>, eps10: Option<f64>) -> Result<f64> {
    if n <= 3 {
        Ok(0.0)
    } else {
        Ok(-epsilon2_for(n, cone, eps10)?)
    }
}

fn draw_rhs(rng: &mut ChaCha8Rng, floor: f64) -> f64 {
    if rng.random_bool(0.25) {
        floor
    } else {
        rng.random_range(floor..2.0)
    }
}

fn dimension(i: u64, max_n: usize) -> usize {
    1 + (i % max_n as u64) as usize
}

fn permuted(s: &Spectrum<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v = s.values().to_vec();
    v.shuffle(rng);
    v
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

fn max_eigenvalue(h: &[Vec<f64>]) -> Result<f64> {
    let n = h.len();
    let m = CMatrix::from_fn(n, n, |i, j| Complex64::new(h[i][j], 0.0));
    Ok(m.eigh()?.values[0])
}

fn distance_to_walls(s: &Spectrum<f64>, cone: &ConeParams<f64>) -> f64 {
    (cone.target_phase - phase_p(s)).min(cone.phase_cap - phase_q(s))
}

/// Boundary-avoidance sample: walks the ray `λ + t·1` down to the wall of
/// the closed cone, checks `F < 0` there, then locates the root of `F`
/// above it and measures its distance to the walls.
fn ray_root_margin(s: &Spectrum<f64>, op: &PhaseOperator<f64>, cone: &ConeParams<f64>) -> Result<f64> {
    let lam = s.values();
    let at = |t: f64| Spectrum::new(lam.iter().map(|l| l + t).collect());
    let outside = |t: f64| -> Result<bool> { Ok(distance_to_walls(&at(t)?, cone) <= 0.0) };
    let mut lo = -1.0;
    while !outside(lo)? {
        lo *= 2.0;
    }
    let mut hi = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if outside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // `lo` is on or just past the wall.
    let wall = at(lo)?;
    let f_wall = op.value(&wall)?;
    if !(f_wall < 0.0) {
        return Ok(-f_wall.abs());
    }
    let mut up = 1.0;
    while op.value(&at(up)?)? <= 0.0 {
        up *= 2.0;
    }
    let (mut a, mut b) = (lo, up);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if op.value(&at(mid)?)? < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(distance_to_walls(&at(b)?, cone))
}

/// Scans the zero set `{F = 0, λ' ≥ λ}` for `n = 2` along both coordinate
/// families and returns the largest relative excess over the bound.
fn zero_set_excess(s: &Spectrum<f64>, op: &PhaseOperator<f64>, cone: &ConeParams<f64>) -> Result<f64> {
    let bound = zero_set_bound(s, op, cone)?;
    let lam = s.values();
    let offsets: Vec<f64> = std::iter::once(0.0)
        .chain((0..=36).map(|k| 1e-3 * 10f64.powf(k as f64 / 4.0)))
        .collect();
    let mut excess = f64::NEG_INFINITY;
    for free in 0..2 {
        let solved = 1 - free;
        for &a in &offsets {
            let point = |b: f64| {
                let mut v = lam.to_vec();
                v[free] += a;
                v[solved] += b;
                v
            };
            if op.value_at(&point(0.0))? >= 0.0 {
                continue;
            }
            let mut hi = 1.0;
            while op.value_at(&point(hi))? < 0.0 {
                hi *= 2.0;
                if hi > 1e15 {
                    break;
                }
            }
            if op.value_at(&point(hi))? < 0.0 {
                continue;
            }
            let mut lo = 0.0;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if op.value_at(&point(mid))? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = point(hi);
            for (v, b) in root.iter().zip(&bound) {
                excess = excess.max((v - b) / b.abs().max(1.0));
            }
        }
    }
    Ok(excess)
}

/// Runs every scalar and matrix property of the operator.
pub fn algebra_suite(config: &VerifyConfig) -> Result<AlgebraReport> {
    let seed = config.seed;
    let samples = config.samples;
    let max_n = config.max_n;
    if max_n == 0 {
        return Err(Error::config("verify-params", "max_n must be positive"));
    }
    let mut props: Vec<PropertyOutcome> = Vec::new();

    props.push(run_property("trig-factorization", 1e-12, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let values: Vec<f64> = (0..n).map(|_| 4.0 * (rng.random::<f64>() - 0.5) * 3.0).collect();
        let s = Spectrum::new(values)?;
        let p = complex_product(&s);
        let q = phase_q(&s);
        let r: f64 = s.values().iter().map(|l| (1.0 + l * l).sqrt()).product();
        let err = (p.re - q.cos() * r).abs().max((p.im - q.sin() * r).abs()) / r;
        Ok(Observation::at_most(err, 1e-12))
    }));

    props.push(run_property("im-lower-bound", 0.0, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let c6 = phase_constants(n, cone.phase_cap)?.im_lower_bound;
        Ok(Observation::at_least(complex_product(&s).im / c6, 1.0))
    }));

    props.push(run_property("inverse-im-derivative-bound", 1e-12, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let c6 = phase_constants(n, cone.phase_cap)?.im_lower_bound;
        let lam = s.values();
        let im = complex_product(&s).im;
        let r2: f64 = lam.iter().map(|l| 1.0 + l * l).product();
        let mut worst = f64::NEG_INFINITY;
        for k in 0..n {
            let without = Spectrum::new(lam.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &v)| v).collect());
            let im_without = match without {
                Ok(w) => complex_product(&w).im,
                Err(_) => 1.0,
            };
            let lhs = im_without.abs() / (im * im);
            let rhs = (r2 / (im * im * im) / c6).sqrt() / (1.0 + lam[k] * lam[k]).sqrt();
            worst = worst.max(lhs / rhs - 1.0);
        }
        Ok(Observation::at_most(worst, 1e-12))
    }));

    props.push(run_property("concavity-f0", CONCAVITY_TOL, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let h = PhaseOperator::new(0.0, cone.target_phase).hessian(&s)?;
        Ok(Observation::at_most(max_eigenvalue(&h)?, CONCAVITY_TOL))
    }));

    let mut margins = Vec::new();
    for n in 4..=max_n {
        let out = run_property(&format!("concavity-margin-n{n}"), 0.0, seed, samples, |rng, _| {
            let cone = random_cone(rng);
            let s = random_cone_spectrum(n, &cone, rng);
            let ratio = concavity_ratio(&s)?;
            Ok(Observation {
                value: ratio,
                slack: if ratio < 0.0 { -ratio } else { -1.0 },
            })
        });
        margins.push(ConcavityMargin {
            n,
            eps10_hat: out.worst_value,
            eps5: -out.worst_value / 2.0,
        });
        props.push(out);
    }
    let report_margins = margins.clone();
    let eps10 = move |n: usize| margins.iter().find(|m| m.n == n && m.eps10_hat < 0.0).map(|m| -m.eps10_hat);

    props.push(run_property("gradient-positive", 0.0, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let floor = -epsilon2_for(n, &cone, eps10(n))?.min(1.0);
        let f = if rng.random_bool(0.25) {
            floor * (1.0 - 1e-3 * rng.random::<f64>())
        } else {
            rng.random_range(floor..2.0)
        };
        let g = PhaseOperator::new(f, cone.target_phase).gradient(&s)?;
        let min = g.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Observation {
            value: min,
            slack: if min > 0.0 { min } else { -1.0 },
        })
    }));

    props.push(run_property("boundary-avoidance", 0.0, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let f = draw_rhs(rng, rhs_floor(n, &cone, eps10(n))?);
        let margin = ray_root_margin(&s, &PhaseOperator::new(f, cone.target_phase), &cone)?;
        Ok(Observation {
            value: margin,
            slack: if margin > 0.0 { margin } else { -1.0 },
        })
    }));

    let scan_samples = (samples / 100).max(1);
    props.push(run_property("zero-set-bounded-n2", 1e-9, seed, scan_samples, |rng, _| {
        let cone = random_cone(rng);
        let s = random_cone_spectrum(2, &cone, rng);
        let f = draw_rhs(rng, 0.0);
        let excess = zero_set_excess(&s, &PhaseOperator::new(f, cone.target_phase), &cone)?;
        Ok(Observation::at_most(excess, 1e-9))
    }));

    props.push(run_property("cone-convexity", 0.0, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let a = random_cone_spectrum(n, &cone, rng);
        let b = random_cone_spectrum(n, &cone, rng);
        let mid = Spectrum::new(midpoint(&permuted(&a, rng), &permuted(&b, rng)))?;
        let inside = cone_contains(&mid, &cone, 0.0);
        let d = distance_to_walls(&mid, &cone);
        Ok(Observation {
            value: d,
            slack: if inside { d } else { -1.0 },
        })
    }));

    props.push(run_property("schur-monotonicity", 1e-12, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let f = draw_rhs(rng, rhs_floor(n, &cone, eps10(n))?);
        let g = PhaseOperator::new(f, cone.target_phase).gradient(&s)?;
        let scale = g.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        // Descending spectrum ⇒ ascending gradient.
        let worst = g.windows(2).map(|w| (w[0] - w[1]) / scale).fold(f64::NEG_INFINITY, f64::max);
        Ok(Observation::at_most(worst.max(0.0), 1e-12))
    }));

    let pencil = |rng: &mut ChaCha8Rng, n: usize, cone: &ConeParams<f64>| -> Result<(CMatrix<f64>, CMatrix<f64>, CMatrix<f64>)> {
        let a = random_positive_definite(n, rng);
        let s1 = random_cone_spectrum(n, cone, rng);
        let s2 = random_cone_spectrum(n, cone, rng);
        let b1 = matrix_with_spectrum(&a, &s1, rng)?;
        let b2 = matrix_with_spectrum(&a, &s2, rng)?;
        Ok((a, b1, b2))
    };

    props.push(run_property("matrix-concavity", IDENTITY_TOL, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let (a, b1, b2) = pencil(rng, n, &cone)?;
        let f = draw_rhs(rng, rhs_floor(n, &cone, eps10(n))?);
        let op = PhaseOperator::new(f, cone.target_phase);
        let mid = (&b1 + &b2).scale(0.5);
        let v1 = op.matrix_value(&HermitianPair::new(a.clone(), b1)?)?;
        let v2 = op.matrix_value(&HermitianPair::new(a.clone(), b2)?)?;
        let vm = op.matrix_value(&HermitianPair::new(a, mid)?)?;
        Ok(Observation::at_least(vm - 0.5 * (v1 + v2), -IDENTITY_TOL))
    }));

    props.push(run_property("matrix-cone-convexity", 0.0, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let (a, b1, b2) = pencil(rng, n, &cone)?;
        let mid = HermitianPair::new(a, (&b1 + &b2).scale(0.5))?;
        let inside = cone_contains(mid.spectrum(), &cone, 0.0);
        let d = distance_to_walls(mid.spectrum(), &cone);
        Ok(Observation {
            value: d,
            slack: if inside { d } else { -1.0 },
        })
    }));

    props.push(run_property("congruence-invariance", IDENTITY_TOL, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let a = random_positive_definite(n, rng);
        let s = random_branch_spectrum(n, rng);
        let b = matrix_with_spectrum(&a, &s, rng)?;
        let t = random_congruence(n, rng);
        let t_adj = t.adjoint();
        let base = matrix_phase(&HermitianPair::new(a.clone(), b.clone())?);
        let moved = matrix_phase(&HermitianPair::new(
            (&(&t_adj * &a) * &t).hermitian_part(),
            (&(&t_adj * &b) * &t).hermitian_part(),
        )?);
        let err = (base.q - moved.q).abs().max((base.p - moved.p).abs());
        Ok(Observation::at_most(err, IDENTITY_TOL))
    }));

    props.push(run_property("reciprocal-gauge-convexity", IDENTITY_TOL, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let a = random_cone_spectrum(n, &cone, rng);
        let b = random_cone_spectrum(n, &cone, rng);
        let mid = Spectrum::new(midpoint(&permuted(&a, rng), &permuted(&b, rng)))?;
        let cap = cone.phase_cap;
        let gap = 0.5 * (reciprocal_gauge(&a, cap)? + reciprocal_gauge(&b, cap)?) - reciprocal_gauge(&mid, cap)?;
        Ok(Observation::at_least(gap, -IDENTITY_TOL))
    }));

    props.push(run_property("linearization-second-order", 0.05, seed, samples, |rng, i| {
        let n = dimension(i, max_n);
        let cone = random_cone(rng);
        let a = random_positive_definite(n, rng);
        let s = random_cone_spectrum(n, &cone, rng);
        let b = matrix_with_spectrum(&a, &s, rng)?;
        let h = random_hermitian(n, rng);
        let f = draw_rhs(rng, 0.0);
        let op = PhaseOperator::new(f, cone.target_phase);
        let base = HermitianPair::new(a.clone(), b.clone())?;
        let l = op.linearization(&base)?;
        let slope = (&l * &h).trace().re;
        let f0 = op.matrix_value(&base)?;
        let err = |eps: f64| -> Result<f64> {
            let moved = HermitianPair::new(a.clone(), (&b + &h.scale(eps)).hermitian_part())?;
            Ok((op.matrix_value(&moved)? - f0 - eps * slope).abs())
        };
        let (e1, e2) = (err(1e-3)?, err(1e-4)?);
        // Second order: shrinking ε tenfold shrinks the error a hundredfold,
        // down to the rounding floor.
        let floor = 1e-11 * f0.abs().max(1.0);
        Ok(Observation::at_most(e2, 0.05 * e1 + floor))
    }));

    Ok(AlgebraReport {
        suite: SuiteReport {
            suite: "algebra",
            properties: props,
        },
        concavity_margins: report_margins,
    })
}
