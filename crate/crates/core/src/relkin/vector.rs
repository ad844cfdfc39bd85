use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Cartesian 3-vector in the laboratory frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    /// Spherical direction `(cos phi sin theta, sin phi sin theta, cos theta)`.
    pub fn from_angles(phi: T, theta: T) -> Self {
        Self::new(phi.cos() * theta.sin(), phi.sin() * theta.sin(), theta.cos())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Returns `None` for the zero vector.
    pub fn try_normalize(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self * n.recip())
        } else {
            None
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Component of `self` perpendicular to the unit vector `n`.
    pub fn perpendicular_to(self, n: Self) -> Self {
        self - n * self.dot(n)
    }

    /// Rotation by `angle` about the unit `axis` (Rodrigues).
    pub fn rotated(self, axis: Self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        self * c + axis.cross(self) * s + axis * (axis.dot(self) * (T::one() - c))
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        let f = |v: T| U::from_f64(v.to_f64().expect("finite")).expect("representable");
        Vec3::new(f(self.x), f(self.y), f(self.z))
    }
}

impl<T: Real> From<[T; 3]> for Vec3<T> {
    fn from(v: [T; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> fmt::Display for Vec3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.x, self.y, self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_is_right_handed() {
        let x = Vec3::<f64>::unit_x();
        let y = Vec3::<f64>::unit_y();
        assert_eq!(x.cross(y), Vec3::<f64>::unit_z());
    }

    #[test]
    fn rotation_about_z_by_quarter_turn() {
        let r = Vec3::<f64>::unit_x().rotated(Vec3::<f64>::unit_z(), std::f64::consts::FRAC_PI_2);
        assert!((r - Vec3::<f64>::unit_y()).norm() < 1e-15);
    }

    #[test]
    fn zero_vector_has_no_direction() {
        assert!(Vec3::<f64>::zero().try_normalize().is_none());
    }

    #[test]
    fn display_is_comma_separated() {
        assert_eq!(Vec3::<f64>::new(1.0, -0.5, 0.0).to_string(), "1,-0.5,0");
    }
}
