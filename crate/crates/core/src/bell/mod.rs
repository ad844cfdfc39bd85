//! CHSH/Bell averages, figure scans and the momentum-corrected threshold.

mod scan;

use serde::{Deserialize, Serialize};

use crate::correlator::mc::{self, CorrelatorEstimate};
use crate::correlator::{correlator_integrand, correlator_sharp, MomentumDistribution, MomentumProfile};
use crate::error::{Error, Result};
use crate::relkin::{ParticleKinematics, Vec3};
use crate::scalar::Real;

pub use scan::{scan_figure, Figure, ScanMetadata, ScanSpec, ScanTable};

/// Tolerance on `|v| = 1` for measurement directions (widened to a few ulps for `f32`).
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Alice's `a`, `a'` and Bob's `b`, `b'` measurement directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellConfig<T> {
    pub a: Vec3<T>,
    pub a_prime: Vec3<T>,
    pub b: Vec3<T>,
    pub b_prime: Vec3<T>,
}

impl<T: Real> BellConfig<T> {
    pub fn new(a: Vec3<T>, a_prime: Vec3<T>, b: Vec3<T>, b_prime: Vec3<T>) -> Result<Self> {
        let config = Self { a, a_prime, b, b_prime };
        config.validate()?;
        Ok(config)
    }

    /// Coplanar set maximizing the violation at rest:
    /// `a = (1,1,0)/sqrt2`, `a' = (-1,1,0)/sqrt2`, `b = (0,1,0)`, `b' = (1,0,0)`.
    pub fn coplanar() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self {
            a: Vec3::new(s, s, T::zero()),
            a_prime: Vec3::new(-s, s, T::zero()),
            b: Vec3::unit_y(),
            b_prime: Vec3::unit_x(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let tol = T::lit(UNIT_TOLERANCE).max(T::epsilon() * T::lit(8.0));
        for (name, v) in self.named() {
            let dev = (v.norm() - T::one()).abs();
            if !(dev <= tol) {
                return Err(Error::InvalidConfig(format!("direction {name} = ({v}) is not unit length")));
            }
        }
        Ok(())
    }

    pub fn named(&self) -> [(&'static str, Vec3<T>); 4] {
        [("a", self.a), ("a'", self.a_prime), ("b", self.b), ("b'", self.b_prime)]
    }

    /// Setting pairs in CHSH order `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(Vec3<T>, Vec3<T>); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }

    /// `-(a.b + a.b' + a'.b - a'.b')`, the Bell average of a singlet at rest.
    pub fn classical_chsh(&self) -> T {
        -chsh_combination(self.pairs().map(|(x, y)| x.dot(y)))
    }
}

impl<T: Real> Default for BellConfig<T> {
    fn default() -> Self {
        Self::coplanar()
    }
}

/// `k[0] + k[1] + k[2] - k[3]` for correlators in CHSH order.
pub fn chsh_combination<T: Real>(k: [T; 4]) -> T {
    k[0] + k[1] + k[2] - k[3]
}

/// Bell average for both particles moving with velocity `beta_vec`.
pub fn bell_average_sharp<T: Real>(config: &BellConfig<T>, beta_vec: Vec3<T>) -> Result<T> {
    let mut k = [T::zero(); 4];
    for (slot, (x, y)) in k.iter_mut().zip(config.pairs()) {
        *slot = correlator_sharp(x, y, beta_vec)?;
    }
    Ok(chsh_combination(k))
}

/// Bell average for one pair of definite momenta, `a`/`a'` on particle 1.
pub fn bell_average_kinematics<T: Real>(
    config: &BellConfig<T>,
    kin1: &ParticleKinematics<T>,
    kin2: &ParticleKinematics<T>,
) -> Result<T> {
    let mut k = [T::zero(); 4];
    for (slot, (x, y)) in k.iter_mut().zip(config.pairs()) {
        *slot = correlator_integrand(x, y, kin1, kin2)?;
    }
    Ok(chsh_combination(k))
}

/// Monte Carlo Bell average over `dist`.
///
/// The four correlators share one momentum sample stream; their standard
/// errors are combined in quadrature.
pub fn bell_average_mc(
    config: &BellConfig<f64>,
    dist: &MomentumDistribution,
    samples: usize,
    seed: u64,
) -> Result<CorrelatorEstimate> {
    config.validate()?;
    if let MomentumProfile::Sharp { .. } = dist.profile {
        if samples < mc::MIN_SAMPLES {
            return Err(Error::InvalidConfig(format!(
                "Monte Carlo needs at least {} samples, got {samples}",
                mc::MIN_SAMPLES
            )));
        }
        let value = bell_average_sharp(config, dist.mean_velocity()?)?;
        return Ok(CorrelatorEstimate::exact(value, samples));
    }
    let pairs = config.pairs();
    let run = mc::run::<4, _>(dist, samples, seed, |k1, k2| {
        let mut k = [0.0; 4];
        for (slot, (x, y)) in k.iter_mut().zip(pairs) {
            *slot = correlator_integrand(x, y, k1, k2)?;
        }
        Ok(k)
    })?;
    let value = chsh_combination(run.moments.map(|m| m.mean()));
    let standard_error = run
        .moments
        .iter()
        .map(|m| m.standard_error().powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(CorrelatorEstimate {
        value,
        standard_error,
        samples,
        rejected: run.rejected,
        warning: mc::rejection_warning(run.rejected, samples),
    })
}

/// Expected no-eavesdropper `|c|` for a beam with momentum density `dist`,
/// the reference that replaces `2 sqrt2` in the eavesdropping test.
pub fn corrected_threshold(
    config: &BellConfig<f64>,
    dist: &MomentumDistribution,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    Ok(bell_average_mc(config, dist, samples, seed)?.value.abs())
}
