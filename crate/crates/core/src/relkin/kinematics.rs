use serde::{Deserialize, Serialize};

use super::{FourVector, Vec3};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// On-shell massive particle described by its lab-frame 3-momentum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParticleKinematics<T> {
    mass: T,
    momentum: Vec3<T>,
}

impl<T: Real> ParticleKinematics<T> {
    pub fn new(mass: T, momentum: Vec3<T>) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::Domain(format!("mass must be positive and finite, got {mass}")));
        }
        if !momentum.is_finite() {
            return Err(Error::Domain(format!("momentum must be finite, got ({momentum})")));
        }
        Ok(Self { mass, momentum })
    }

    pub fn at_rest(mass: T) -> Result<Self> {
        Self::new(mass, Vec3::zero())
    }

    /// Builds the particle moving with velocity `beta_vec` (`|beta_vec| < 1`).
    pub fn from_velocity(mass: T, beta_vec: Vec3<T>) -> Result<Self> {
        let beta2 = beta_vec.norm_squared();
        if !(beta2 < T::one()) {
            return Err(Error::Domain(format!(
                "speed must satisfy |beta| < 1, got |beta| = {}",
                beta2.sqrt()
            )));
        }
        let gamma = (T::one() - beta2).sqrt().recip();
        Self::new(mass, beta_vec * (mass * gamma))
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    pub fn momentum(&self) -> Vec3<T> {
        self.momentum
    }

    /// `p0 = sqrt(m^2 + |p|^2)`.
    pub fn energy(&self) -> T {
        self.mass.hypot(self.momentum.norm())
    }

    pub fn four_momentum(&self) -> FourVector<T> {
        FourVector::from_parts(self.energy(), self.momentum)
    }

    /// `sqrt(1 - beta^2) = m / p0`, evaluated without cancellation.
    pub fn inverse_gamma(&self) -> T {
        self.mass / self.energy()
    }

    pub fn beta_vec(&self) -> Vec3<T> {
        self.momentum * self.energy().recip()
    }

    pub fn beta(&self) -> T {
        self.momentum.norm() / self.energy()
    }

    /// Unit direction of motion; `None` at rest.
    pub fn direction(&self) -> Option<Vec3<T>> {
        self.momentum.try_normalize()
    }
}
