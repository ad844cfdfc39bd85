//! 2x2 complex matrices for spin-1/2 observables.
//!
//! Generators are normalized to eigenvalues +-1/2, i.e. `s_k = sigma_k / 2`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use super::Vec3;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> SpinMatrix<T> {
    pub fn new(m: [[Complex<T>; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self::new([[z, z], [z, z]])
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Self::new([[o, z], [z, o]])
    }

    /// Pauli matrices `sigma_x, sigma_y, sigma_z`.
    pub fn pauli() -> [Self; 3] {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        [
            Self::new([[z, o], [o, z]]),
            Self::new([[z, -i], [i, z]]),
            Self::new([[o, z], [z, -o]]),
        ]
    }

    /// Spin-1/2 generators `s_k = sigma_k / 2`.
    pub fn generators() -> [Self; 3] {
        let half = T::lit(0.5);
        Self::pauli().map(|s| s.scale(half))
    }

    /// `v . s`, the generator contraction with a real 3-vector.
    pub fn contract(v: Vec3<T>) -> Self {
        let [sx, sy, sz] = Self::generators();
        sx.scale(v.x) + sy.scale(v.y) + sz.scale(v.z)
    }

    /// `exp(-i angle axis.s)`, the SU(2) element covering a rotation about `axis`.
    pub fn rotation(axis: Vec3<T>, angle: T) -> Self {
        let half = angle * T::lit(0.5);
        let (s, c) = half.sin_cos();
        let sigma = Self::contract(axis).scale(T::lit(2.0));
        let minus_i_sin = Complex::new(T::zero(), -s);
        Self::identity().scale(c) + sigma.scale_complex(minus_i_sin)
    }

    pub fn scale(self, k: T) -> Self {
        self.scale_complex(Complex::new(k, T::zero()))
    }

    pub fn scale_complex(self, k: Complex<T>) -> Self {
        Self::new(self.m.map(|row| row.map(|e| e * k)))
    }

    pub fn adjoint(self) -> Self {
        let m = self.m;
        Self::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn trace(self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn determinant(self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn commutator(self, other: Self) -> Self {
        self * other - other * self
    }

    pub fn frobenius_norm(self) -> T {
        self.m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, e| acc + e.norm_sqr())
            .sqrt()
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(self, other: Self) -> T {
        (self - other)
            .m
            .iter()
            .flatten()
            .fold(T::zero(), |acc, e| acc.max(e.norm()))
    }

    pub fn is_hermitian(self, tol: T) -> bool {
        self.max_abs_diff(self.adjoint()) <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(self) -> [T; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let off = self.m[0][1].norm();
        let mean = (a + d) * T::lit(0.5);
        let r = ((a - d) * T::lit(0.5)).hypot(off);
        [mean - r, mean + r]
    }
}

impl<T: Real> Add for SpinMatrix<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

impl<T: Real> Sub for SpinMatrix<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-T::one())
    }
}

impl<T: Real> Mul for SpinMatrix<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = SpinMatrix<f64>;

    #[test]
    fn generator_algebra() {
        // [s_x, s_y] = i s_z
        let [sx, sy, sz] = M::generators();
        let i = Complex::new(0.0, 1.0);
        assert!(sx.commutator(sy).max_abs_diff(sz.scale_complex(i)) < 1e-15);
    }

    #[test]
    fn generator_eigenvalues_are_half() {
        for s in M::generators() {
            let [lo, hi] = s.hermitian_eigenvalues();
            assert!((lo + 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_conjugates_generators() {
        let axis = Vec3::<f64>::new(0.0, 0.0, 1.0);
        let angle = 0.7;
        let u = M::rotation(axis, angle);
        let v = Vec3::<f64>::new(0.3, -0.4, 0.5);
        let lhs = u * M::contract(v) * u.adjoint();
        let rhs = M::contract(v.rotated(axis, angle));
        assert!(lhs.max_abs_diff(rhs) < 1e-14);
    }
}
