//! Minkowski kinematics and relativistic spin observables.

mod four_vector;
mod kinematics;
mod observables;
mod spin;
mod vector;

pub use four_vector::{minkowski_dot, FourVector};
pub use kinematics::ParticleKinematics;
pub use observables::{
    commutator_norm, pl_eigenvalue, spin_axis, spin_axis_for_velocity, spin_observable,
    spin_operator, spin_projection, unit_axis, DEGENERATE_AXIS_NORM,
};
pub use spin::SpinMatrix;
pub use vector::Vec3;
