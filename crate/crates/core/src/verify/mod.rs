//! Randomized property campaigns over the phase algebra and the block
//! reduction.
//!
//! Each property draws its samples from independent streams keyed by the
//! root seed, the property name and the sample index. Samples run in
//! parallel and are reduced in index order, so outcomes do not depend on the
//! thread count.

pub mod algebra;
pub mod matrix;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::sampling::sample_rng;

/// Sample counts and the root seed of a campaign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples per scalar property.
    pub samples: usize,
    /// Largest dimension drawn by the scalar properties.
    pub max_n: usize,
    /// Samples per `(n, f)` combination of the derivative checks.
    pub fd_samples: usize,
    /// Samples per block-reduction property.
    pub matrix_samples: usize,
    /// Pencils for the hyperplane min-max checks.
    pub pair_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            samples: 100_000,
            max_n: 5,
            fd_samples: 1000,
            matrix_samples: 10_000,
            pair_samples: 1000,
        }
    }
}

/// One sample's result: the measured quantity and its signed distance to
/// failure (nonnegative passes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub value: f64,
    pub slack: f64,
}

impl Observation {
    /// Passes when `value ≤ limit`.
    pub fn at_most(value: f64, limit: f64) -> Self {
        Self {
            value,
            slack: limit - value,
        }
    }

    /// Passes when `value ≥ floor`.
    pub fn at_least(value: f64, floor: f64) -> Self {
        Self {
            value,
            slack: value - floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureNote {
    pub sample: u64,
    pub detail: String,
}

/// Aggregate of one property over its samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub tolerance: f64,
    /// Measured value at the sample with the smallest slack.
    pub worst_value: f64,
    pub worst_slack: f64,
    pub worst_sample: u64,
    pub first_failure: Option<FailureNote>,
    pub passed: bool,
}

/// FNV-1a of the property name: the stream tag of its samples.
pub fn property_tag(name: &str) -> u64 {
    name.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Evaluates `check` on `samples` independent draws.
pub fn run_property<F>(name: &str, tolerance: f64, seed: u64, samples: usize, check: F) -> PropertyOutcome
where
    F: Fn(&mut ChaCha8Rng, u64) -> Result<Observation> + Sync,
{
    let tag = property_tag(name);
    let results: Vec<Result<Observation>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| check(&mut sample_rng(seed, tag, i), i))
        .collect();
    let mut out = PropertyOutcome {
        name: name.to_string(),
        samples,
        failures: 0,
        tolerance,
        worst_value: f64::NAN,
        worst_slack: f64::INFINITY,
        worst_sample: 0,
        first_failure: None,
        passed: true,
    };
    for (i, r) in results.into_iter().enumerate() {
        let i = i as u64;
        let failed = match r {
            Ok(obs) => {
                if obs.slack < out.worst_slack || obs.slack.is_nan() && !out.worst_slack.is_nan() {
                    out.worst_slack = obs.slack;
                    out.worst_value = obs.value;
                    out.worst_sample = i;
                }
                (!(obs.slack >= 0.0)).then(|| format!("value {:e}, slack {:e}", obs.value, obs.slack))
            }
            Err(e) => Some(format!("{} ({})", e, e.reason_code())),
        };
        if let Some(detail) = failed {
            out.failures += 1;
            if out.first_failure.is_none() {
                out.first_failure = Some(FailureNote { sample: i, detail });
            }
        }
    }
    out.passed = out.failures == 0;
    out
}

/// All outcomes of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub properties: Vec<PropertyOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyOutcome> {
        self.properties.iter().find(|p| p.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use rand::Rng;

    #[test]
    fn outcome_tracks_worst_and_first_failure() {
        let out = run_property("toy", 0.0, 7, 50, |rng, i| {
            let x: f64 = rng.random();
            if i == 10 {
                return Err(Error::Domain("boom".into()));
            }
            Ok(Observation::at_most(x, 0.9))
        });
        assert_eq!(out.samples, 50);
        assert!(!out.passed);
        assert!(out.failures >= 1);
        let first = out.first_failure.unwrap();
        assert!(first.sample <= 10);
        assert!(out.worst_slack <= 0.9);
    }

    #[test]
    fn outcomes_do_not_depend_on_thread_count() {
        let check = |rng: &mut ChaCha8Rng, _| Ok(Observation::at_least(rng.random::<f64>(), 0.0));
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_property("det", 0.0, 3, 1000, check));
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_property("det", 0.0, 3, 1000, check));
        assert_eq!(one, many);
    }
}
