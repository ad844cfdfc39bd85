//! Monte Carlo averages of the kernel over a momentum distribution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::distribution::{MomentumDistribution, MomentumProfile};
use super::kernel::{correlator_integrand, correlator_sharp};
use crate::error::{Error, Result};
use crate::relkin::{ParticleKinematics, Vec3};
use crate::rng::substream;

/// Samples per seed-derived substream.
pub const CHUNK_SIZE: usize = 4096;
pub const MIN_SAMPLES: usize = 100;
/// Fraction of rejected (degenerate) draws above which the estimate carries a warning.
pub const REJECTION_WARNING_FRACTION: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub rejected: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl CorrelatorEstimate {
    pub(crate) fn exact(value: f64, samples: usize) -> Self {
        Self { value, standard_error: 0.0, samples, rejected: 0, warning: None }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.n as f64 / n as f64);
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        Self { n, mean, m2 }
    }

    pub(crate) fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean, sample variance over `n`.
    pub(crate) fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

pub(crate) struct McRun<const N: usize> {
    pub moments: [Moments; N],
    pub rejected: u64,
}

/// Averages `eval` over `samples` momentum pairs drawn from `dist`.
///
/// Pairs are drawn in chunks of [`CHUNK_SIZE`], chunk `k` from substream `k`
/// of `seed`, and chunk statistics are merged in chunk order, so the result
/// is bitwise identical for any number of worker threads. JointGaussian pairs
/// are symmetrized by averaging `eval` over the exchange of the two momenta.
pub(crate) fn run<const N: usize, F>(dist: &MomentumDistribution, samples: usize, seed: u64, eval: F) -> Result<McRun<N>>
where
    F: Fn(&ParticleKinematics<f64>, &ParticleKinematics<f64>) -> Result<[f64; N]> + Sync,
{
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    dist.validate()?;
    let symmetrize = matches!(dist.profile, MomentumProfile::JointGaussian { .. });
    let chunks = samples.div_ceil(CHUNK_SIZE);
    let max_rejected = samples as u64;

    let per_chunk: Vec<McRun<N>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = substream(seed, chunk as u64);
            let len = CHUNK_SIZE.min(samples - chunk * CHUNK_SIZE);
            let mut moments = [Moments::default(); N];
            let mut rejected = 0u64;
            let mut accepted = 0;
            while accepted < len {
                let pair = dist.sample_ordered(&mut rng);
                let k1 = dist.kinematics(pair.p1)?;
                let k2 = dist.kinematics(pair.p2)?;
                let values = if symmetrize {
                    eval(&k1, &k2).and_then(|x| {
                        let y = eval(&k2, &k1)?;
                        Ok(std::array::from_fn(|i| 0.5 * (x[i] + y[i])))
                    })
                } else {
                    eval(&k1, &k2)
                };
                match values {
                    Ok(values) => {
                        for (m, v) in moments.iter_mut().zip(values) {
                            m.push(v);
                        }
                        accepted += 1;
                    }
                    Err(Error::DegenerateObservable { .. }) => {
                        rejected += 1;
                        if rejected > max_rejected {
                            return Err(Error::TooManyRejections { rejected });
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(McRun { moments, rejected })
        })
        .collect::<Result<_>>()?;

    let mut total = McRun { moments: [Moments::default(); N], rejected: 0 };
    for part in per_chunk {
        for (acc, m) in total.moments.iter_mut().zip(part.moments) {
            *acc = acc.merge(m);
        }
        total.rejected += part.rejected;
    }
    Ok(total)
}

pub(crate) fn rejection_warning(rejected: u64, samples: usize) -> Option<String> {
    let fraction = rejected as f64 / (samples as f64 + rejected as f64);
    (fraction > REJECTION_WARNING_FRACTION).then(|| {
        format!("{rejected} degenerate momentum draws rejected ({:.2}% of draws)", 100.0 * fraction)
    })
}

/// Monte Carlo estimate of `<f| a (x) b |f>` for the pair density `dist`.
///
/// A sharp distribution involves no randomness and returns the closed form
/// with zero standard error.
pub fn correlator_mc(
    a_dir: Vec3<f64>,
    b_dir: Vec3<f64>,
    dist: &MomentumDistribution,
    samples: usize,
    seed: u64,
) -> Result<CorrelatorEstimate> {
    if let MomentumProfile::Sharp { .. } = dist.profile {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidConfig(format!(
                "Monte Carlo needs at least {MIN_SAMPLES} samples, got {samples}"
            )));
        }
        let value = correlator_sharp(a_dir, b_dir, dist.mean_velocity()?)?;
        return Ok(CorrelatorEstimate::exact(value, samples));
    }
    let run = run::<1, _>(dist, samples, seed, |k1, k2| Ok([correlator_integrand(a_dir, b_dir, k1, k2)?]))?;
    let [m] = run.moments;
    Ok(CorrelatorEstimate {
        value: m.mean(),
        standard_error: m.standard_error(),
        samples,
        rejected: run.rejected,
        warning: rejection_warning(run.rejected, samples),
    })
}
