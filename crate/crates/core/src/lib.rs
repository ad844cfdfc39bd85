//! Relativistic spin correlations for massive spin-1/2 EPR pairs.
//!
//! * [`relkin`]: Minkowski kinematics and the Pauli-Lubanski spin observables.
//! * [`correlator`]: the pair correlation kernel, its sharp-momentum closed
//!   form and Monte Carlo averages over momentum distributions.
//! * [`bell`]: CHSH averages, figure scans and the momentum-corrected threshold.
//! * [`ekert`]: an Ekert key-distribution run with an optional
//!   intercept-resend eavesdropper and a statistical Bell test.
//!
//! The kinematics and closed forms are generic over [`Real`] (`f32`, `f64`);
//! the aliases below fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod correlator;
pub mod ekert;
mod error;
pub mod relkin;
pub mod rng;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec3f64 = relkin::Vec3<f64>;
pub type Vec3f32 = relkin::Vec3<f32>;
pub type FourVectorF64 = relkin::FourVector<f64>;
pub type KinematicsF64 = relkin::ParticleKinematics<f64>;
pub type KinematicsF32 = relkin::ParticleKinematics<f32>;
pub type SpinMatrixF64 = relkin::SpinMatrix<f64>;
pub type BellConfigF64 = bell::BellConfig<f64>;
