//! Campaigns over the block reduction and the hyperplane min-max principle.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::phase::{arccot, matrix_phase, phase_p, phase_q, HermitianPair};
use crate::reduction::{
    minmax_p, reduced_form, reduction_diagonals, restrict_hyperplane, schur_identity_split, BlockHermitian,
    MinMaxOptions,
};
use crate::sampling::{matrix_with_spectrum, random_admissible_block, random_branch_spectrum, random_positive_definite};
use crate::verify::{run_property, Observation, SuiteReport, VerifyConfig};

pub const DIAGONAL_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-10;
pub const MINMAX_TOL: f64 = 1e-8;
/// Random hyperplanes tried per pencil by the hyperplane bound.
pub const HYPERPLANES_PER_PAIR: usize = 16;
const BLOCK_SIZES: usize = 3;

/// `(p, q)` cycling over `{1,2,3}²`.
fn block_shape(i: u64) -> (usize, usize) {
    let k = (i % (BLOCK_SIZES * BLOCK_SIZES) as u64) as usize;
    (k / BLOCK_SIZES + 1, k % BLOCK_SIZES + 1)
}

fn block_sample(rng: &mut rand_chacha::ChaCha8Rng, i: u64) -> Result<BlockHermitian<f64>> {
    let (p, q) = block_shape(i);
    random_admissible_block(p, q, rng)
}

fn q_of_pair(a: crate::linalg::CMatrix<f64>, b: crate::linalg::CMatrix<f64>) -> Result<f64> {
    Ok(phase_q(HermitianPair::new(a, b)?.spectrum()))
}

fn q_standard(b: crate::linalg::CMatrix<f64>) -> Result<(f64, f64)> {
    let ph = matrix_phase(&HermitianPair::standard(b)?);
    Ok((ph.q, ph.p))
}

fn pencil_sample(rng: &mut rand_chacha::ChaCha8Rng, i: u64) -> Result<HermitianPair<f64>> {
    let n = 2 + (i % 3) as usize;
    let a = random_positive_definite(n, rng);
    let s = random_branch_spectrum(n, rng);
    let b = matrix_with_spectrum(&a, &s, rng)?;
    HermitianPair::new(a, b)
}

/// Runs every block-reduction property.
pub fn matrix_suite(config: &VerifyConfig) -> SuiteReport {
    let seed = config.seed;
    let samples = config.matrix_samples;
    let mut props = Vec::new();

    props.push(run_property("diagonal-relation", DIAGONAL_TOL, seed, samples, |rng, i| {
        let q = 1 + (i % BLOCK_SIZES as u64) as usize;
        let s = random_branch_spectrum(q, rng);
        let lam: Vec<f64> = s.values().to_vec();
        let diag = reduction_diagonals(&lam)?;
        let cot_q = 1.0 / phase_q(&s).tan();
        let err = (0..q)
            .map(|k| (diag.d[k] - diag.e[k] + cot_q * diag.f[k]).abs())
            .fold(0.0, f64::max);
        Ok(Observation::at_most(err, DIAGONAL_TOL))
    }));

    props.push(run_property("phase-identity", IDENTITY_TOL, seed, samples, |rng, i| {
        let m = block_sample(rng, i)?;
        let (reduced, metric) = schur_identity_split(&m)?;
        let lhs = q_of_pair(metric, reduced)? + m.diagonal_phase();
        let rhs = m.block_phase()?.q;
        Ok(Observation::at_most((lhs - rhs).abs(), IDENTITY_TOL))
    }));

    props.push(run_property("q-subadditivity", IDENTITY_TOL, seed, samples, |rng, i| {
        let m = block_sample(rng, i)?;
        let (q_red, _) = q_standard(reduced_form(&m)?)?;
        let slack = m.block_phase()?.q - q_red - m.diagonal_phase();
        Ok(Observation::at_least(slack, -IDENTITY_TOL))
    }));

    props.push(run_property("p-subadditivity", IDENTITY_TOL, seed, samples, |rng, i| {
        let m = block_sample(rng, i)?;
        let (_, p_red) = q_standard(reduced_form(&m)?)?;
        let slack = m.block_phase()?.p - p_red - m.diagonal_phase();
        Ok(Observation::at_least(slack, -IDENTITY_TOL))
    }));

    props.push(run_property("single-row-bound", IDENTITY_TOL, seed, samples, |rng, i| {
        let q = 1 + (i % BLOCK_SIZES as u64) as usize;
        let m = random_admissible_block(1, q, rng)?;
        let a = m.a()[(0, 0)].re;
        let slack = m.block_phase()?.q - arccot(a)? - m.diagonal_phase();
        Ok(Observation::at_least(slack, -IDENTITY_TOL))
    }));

    let pairs = config.pair_samples;
    props.push(run_property("minmax-matches-p", MINMAX_TOL, seed, pairs, |rng, i| {
        let pair = pencil_sample(rng, i)?;
        let opts = MinMaxOptions {
            seed: seed ^ i.wrapping_mul(0x2545_f491_4f6c_dd1d),
            ..MinMaxOptions::default()
        };
        let found = minmax_p(&pair, &opts)?;
        Ok(Observation::at_most((found.value - matrix_phase(&pair).p).abs(), MINMAX_TOL))
    }));

    props.push(run_property("hyperplane-bound", IDENTITY_TOL, seed, pairs, |rng, i| {
        let pair = pencil_sample(rng, i)?;
        let p = phase_p(pair.spectrum());
        let n = pair.dim();
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..HYPERPLANES_PER_PAIR {
            let v: Vec<Complex64> = (0..n)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    Complex64::new(re, im)
                })
                .collect();
            let restricted = restrict_hyperplane(&pair, &v)?;
            worst = worst.max(phase_q(restricted.spectrum()) - p);
        }
        // Eigenvector normals attain the bound.
        let vectors = pair.vectors();
        let mut best = f64::NEG_INFINITY;
        for j in 0..n {
            // Normal `v` with `{v* A x = 0}` orthogonal to eigenvector `j`: v = w_j.
            let restricted = restrict_hyperplane(&pair, &vectors.column(j))?;
            best = best.max(phase_q(restricted.spectrum()));
        }
        let attained = (best - p).abs();
        Ok(Observation {
            value: worst,
            slack: (IDENTITY_TOL - worst).min(MINMAX_TOL - attained),
        })
    }));

    SuiteReport {
        suite: "matrix",
        properties: props,
    }
}
