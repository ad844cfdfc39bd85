//! Minkowski 4-vectors with signature (+,-,-,-), natural units.

use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::scalar::Real;

/// A four-vector `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FourVector<T> {
    pub t: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> FourVector<T> {
    pub const fn new(t: T, x: T, y: T, z: T) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_parts(t: T, space: Vec3<T>) -> Self {
        Self::new(t, space.x, space.y, space.z)
    }

    /// Purely spatial world-vector `(0, a)`, the lab-frame measurement axis.
    pub fn spacelike(a: Vec3<T>) -> Self {
        Self::from_parts(T::zero(), a)
    }

    pub fn spatial(self) -> Vec3<T> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn dot(self, other: Self) -> T {
        minkowski_dot(self, other)
    }

    pub fn norm_sqr(self) -> T {
        self.dot(self)
    }
}

/// `u_t v_t - u_x v_x - u_y v_y - u_z v_z`.
pub fn minkowski_dot<T: Real>(u: FourVector<T>, v: FourVector<T>) -> T {
    u.t * v.t - u.x * v.x - u.y * v.y - u.z * v.z
}
