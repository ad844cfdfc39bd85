//! Pauli-Lubanski projections and the normalized yes-no spin observables.

use super::{FourVector, ParticleKinematics, SpinMatrix, Vec3};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Norm below which a boosted spin axis is treated as degenerate.
pub const DEGENERATE_AXIS_NORM: f64 = 1e-14;

/// Eigenvalue magnitude `w(a,p) = j3 sqrt((a.p)^2 - a^2 p^2)` of `a.W`.
///
/// `j3` must be a positive half-integer. For a lab-frame spacelike unit
/// `a = (0, a_vec)` the radicand reduces to `(a_vec.p_vec)^2 + m^2`.
pub fn pl_eigenvalue<T: Real>(a: FourVector<T>, kin: &ParticleKinematics<T>, j3: T) -> Result<T> {
    let twice = j3 * T::lit(2.0);
    if !(j3 > T::zero()) || twice.round() != twice {
        return Err(Error::Domain(format!("j3 must be a positive half-integer, got {j3}")));
    }
    let p = kin.four_momentum();
    let ap = a.dot(p);
    let radicand = ap * ap - a.norm_sqr() * p.norm_sqr();
    if radicand < T::zero() {
        return Err(Error::Domain(format!(
            "negative radicand {radicand} for a = ({}, {}) and p = ({}, {})",
            a.t,
            a.spatial(),
            p.t,
            p.spatial()
        )));
    }
    Ok(j3 * radicand.sqrt())
}

/// Boosted spin axis `sqrt(1-beta^2) a_perp + (a.n) n` for a particle with
/// velocity `beta_vec`, `|beta_vec| <= 1`. At rest this is `a` itself.
pub fn spin_axis_for_velocity<T: Real>(a: Vec3<T>, beta_vec: Vec3<T>) -> Vec3<T> {
    let beta2 = beta_vec.norm_squared();
    match beta_vec.try_normalize() {
        None => a,
        Some(n) => {
            let inv_gamma = (T::one() - beta2).max(T::zero()).sqrt();
            boost_axis(a, n, inv_gamma)
        }
    }
}

/// Same as [`spin_axis_for_velocity`] but with `sqrt(1-beta^2)` taken as `m/p0`.
pub fn spin_axis<T: Real>(a: Vec3<T>, kin: &ParticleKinematics<T>) -> Vec3<T> {
    match kin.direction() {
        None => a,
        Some(n) => boost_axis(a, n, kin.inverse_gamma()),
    }
}

fn boost_axis<T: Real>(a: Vec3<T>, n: Vec3<T>, inv_gamma: T) -> Vec3<T> {
    let along = a.dot(n);
    (a - n * along) * inv_gamma + n * along
}

/// Unit boosted axis, or the degenerate-observable error.
pub fn unit_axis<T: Real>(a: Vec3<T>, v: Vec3<T>) -> Result<Vec3<T>> {
    let norm = v.norm();
    if !(norm >= T::lit(DEGENERATE_AXIS_NORM)) {
        return Err(Error::DegenerateObservable {
            norm: norm.to_f64().unwrap_or(f64::NAN),
            direction: a.to_string(),
        });
    }
    Ok(v * norm.recip())
}

/// The yes-no observable `a.W / w(a,p)` for spin 1/2, eigenvalues exactly +-1.
pub fn spin_observable<T: Real>(a_dir: Vec3<T>, kin: &ParticleKinematics<T>) -> Result<SpinMatrix<T>> {
    let v = unit_axis(a_dir, spin_axis(a_dir, kin))?;
    // s has eigenvalues +-1/2; rescale by 1/j3 = 2.
    Ok(SpinMatrix::contract(v).scale(T::lit(2.0)))
}

/// Unnormalized projection `a.S` of the relativistic spin operator `S = W/p0`.
pub fn spin_projection<T: Real>(a_dir: Vec3<T>, kin: &ParticleKinematics<T>) -> SpinMatrix<T> {
    SpinMatrix::contract(spin_axis(a_dir, kin))
}

/// Components `S_k` of the relativistic spin operator.
pub fn spin_operator<T: Real>(kin: &ParticleKinematics<T>) -> [SpinMatrix<T>; 3] {
    [Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z()].map(|e| spin_projection(e, kin))
}

/// Frobenius norm of `[a.S, b.S]`.
///
/// With `s = sigma/2` the rest-frame value for orthogonal unit `a`, `b` is `sqrt(2)/2`.
pub fn commutator_norm<T: Real>(a_dir: Vec3<T>, b_dir: Vec3<T>, kin: &ParticleKinematics<T>) -> T {
    spin_projection(a_dir, kin)
        .commutator(spin_projection(b_dir, kin))
        .frobenius_norm()
}
