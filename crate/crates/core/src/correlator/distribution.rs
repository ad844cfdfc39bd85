use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relkin::{ParticleKinematics, Vec3};

/// Shape of the pair momentum density `|f(p1, p2)|^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentumProfile {
    /// Both particles carry exactly `momentum`.
    Sharp { momentum: Vec3<f64> },
    /// One Gaussian momentum shared by both particles, `|f(p1)|^2 delta(p1 - p2)`.
    CorrelatedGaussian { mean: Vec3<f64>, sigma: Vec3<f64> },
    /// Independent Gaussians for each particle, symmetrized under exchange.
    JointGaussian {
        mean1: Vec3<f64>,
        sigma1: Vec3<f64>,
        mean2: Vec3<f64>,
        sigma2: Vec3<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumDistribution {
    pub mass: f64,
    pub profile: MomentumProfile,
}

/// Lab momenta of one pair; particle 1 goes to Alice, particle 2 to Bob.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumPair {
    pub p1: Vec3<f64>,
    pub p2: Vec3<f64>,
}

/// Momentum of a particle of `mass` moving with velocity `beta_vec`.
pub fn momentum_for_velocity(mass: f64, beta_vec: Vec3<f64>) -> Result<Vec3<f64>> {
    Ok(ParticleKinematics::from_velocity(mass, beta_vec)?.momentum())
}

impl MomentumDistribution {
    pub fn new(mass: f64, profile: MomentumProfile) -> Result<Self> {
        let dist = Self { mass, profile };
        dist.validate()?;
        Ok(dist)
    }

    pub fn sharp(mass: f64, momentum: Vec3<f64>) -> Result<Self> {
        Self::new(mass, MomentumProfile::Sharp { momentum })
    }

    /// Sharp beam moving with velocity `beta_vec`.
    pub fn sharp_velocity(mass: f64, beta_vec: Vec3<f64>) -> Result<Self> {
        Self::sharp(mass, momentum_for_velocity(mass, beta_vec)?)
    }

    /// Shared-momentum Gaussian centred on velocity `beta_vec`, per-axis widths in momentum units.
    pub fn correlated_gaussian_velocity(mass: f64, beta_vec: Vec3<f64>, sigma: Vec3<f64>) -> Result<Self> {
        let mean = momentum_for_velocity(mass, beta_vec)?;
        Self::new(mass, MomentumProfile::CorrelatedGaussian { mean, sigma })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::InvalidConfig(format!("mass must be positive, got {}", self.mass)));
        }
        let check_mean = |v: Vec3<f64>| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("non-finite mean momentum ({v})")))
            }
        };
        let check_sigma = |s: Vec3<f64>| {
            if s.is_finite() && s.x >= 0.0 && s.y >= 0.0 && s.z >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("standard deviations must be >= 0, got ({s})")))
            }
        };
        match self.profile {
            MomentumProfile::Sharp { momentum } => check_mean(momentum),
            MomentumProfile::CorrelatedGaussian { mean, sigma } => {
                check_mean(mean)?;
                check_sigma(sigma)
            }
            MomentumProfile::JointGaussian { mean1, sigma1, mean2, sigma2 } => {
                check_mean(mean1)?;
                check_mean(mean2)?;
                check_sigma(sigma1)?;
                check_sigma(sigma2)
            }
        }
    }

    pub fn is_sharp(&self) -> bool {
        matches!(self.profile, MomentumProfile::Sharp { .. })
    }

    /// Whether both particles always share one momentum.
    pub fn is_delta_correlated(&self) -> bool {
        !matches!(self.profile, MomentumProfile::JointGaussian { .. })
    }

    pub fn kinematics(&self, p: Vec3<f64>) -> Result<ParticleKinematics<f64>> {
        ParticleKinematics::new(self.mass, p)
    }

    /// Draws a pair without exchange symmetrization.
    pub fn sample_ordered<R: Rng + ?Sized>(&self, rng: &mut R) -> MomentumPair {
        match self.profile {
            MomentumProfile::Sharp { momentum } => MomentumPair { p1: momentum, p2: momentum },
            MomentumProfile::CorrelatedGaussian { mean, sigma } => {
                let p = gaussian(rng, mean, sigma);
                MomentumPair { p1: p, p2: p }
            }
            MomentumProfile::JointGaussian { mean1, sigma1, mean2, sigma2 } => {
                let p1 = gaussian(rng, mean1, sigma1);
                let p2 = gaussian(rng, mean2, sigma2);
                MomentumPair { p1, p2 }
            }
        }
    }

    /// Draws a pair from the exchange-symmetric density.
    ///
    /// Always consumes one extra uniform for the exchange coin.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> MomentumPair {
        let pair = self.sample_ordered(rng);
        let swap: f64 = rng.random();
        if swap < 0.5 {
            pair
        } else {
            MomentumPair { p1: pair.p2, p2: pair.p1 }
        }
    }

    /// Mean lab velocity of particle 1 (the beam velocity for delta-correlated profiles).
    pub fn mean_velocity(&self) -> Result<Vec3<f64>> {
        let p = match self.profile {
            MomentumProfile::Sharp { momentum } => momentum,
            MomentumProfile::CorrelatedGaussian { mean, .. } => mean,
            MomentumProfile::JointGaussian { mean1, .. } => mean1,
        };
        Ok(self.kinematics(p)?.beta_vec())
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, mean: Vec3<f64>, sigma: Vec3<f64>) -> Vec3<f64> {
    let z = |rng: &mut R| -> f64 { rng.sample(StandardNormal) };
    Vec3::new(
        mean.x + sigma.x * z(rng),
        mean.y + sigma.y * z(rng),
        mean.z + sigma.z * z(rng),
    )
}
