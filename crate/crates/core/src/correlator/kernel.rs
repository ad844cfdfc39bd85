//! Per-momentum correlation kernel and its sharp-momentum closed form.

use crate::error::{Error, Result};
use crate::relkin::{spin_axis, spin_axis_for_velocity, unit_axis, ParticleKinematics, Vec3};
use crate::scalar::Real;

fn kernel_from_axes<T: Real>(a: Vec3<T>, va: Vec3<T>, b: Vec3<T>, vb: Vec3<T>) -> Result<T> {
    let ua = unit_axis(a, va)?;
    let ub = unit_axis(b, vb)?;
    // + 0 turns -0.0 into 0.0
    Ok((-ua.dot(ub)).max(-T::one()).min(T::one()) + T::zero())
}

/// Signed EPR kernel `K(p1, p2; a, b) = -v1(a).v2(b) / (|v1(a)| |v2(b)|)`.
///
/// Particle 1 carries the `a` measurement, particle 2 the `b` measurement.
/// Integrating `K` against the pair momentum density gives `<f|a (x) b|f>`.
pub fn correlator_integrand<T: Real>(
    a_dir: Vec3<T>,
    b_dir: Vec3<T>,
    kin1: &ParticleKinematics<T>,
    kin2: &ParticleKinematics<T>,
) -> Result<T> {
    kernel_from_axes(a_dir, spin_axis(a_dir, kin1), b_dir, spin_axis(b_dir, kin2))
}

/// The kernel evaluated directly from the two velocities; accepts `|beta| = 1`.
pub fn velocity_kernel<T: Real>(
    a_dir: Vec3<T>,
    b_dir: Vec3<T>,
    beta1: Vec3<T>,
    beta2: Vec3<T>,
) -> Result<T> {
    for beta in [beta1, beta2] {
        if beta.norm_squared() > T::one() {
            return Err(Error::Domain(format!("superluminal velocity ({beta})")));
        }
    }
    kernel_from_axes(
        a_dir,
        spin_axis_for_velocity(a_dir, beta1),
        b_dir,
        spin_axis_for_velocity(b_dir, beta2),
    )
}

/// Sharp-momentum correlation for a pair sharing velocity `beta_vec`:
///
/// `-(a.b - beta^2 a_perp.b_perp) / (sqrt(1 + beta^2[(n.a)^2 - 1]) sqrt(1 + beta^2[(n.b)^2 - 1]))`
///
/// with `perp` taken relative to `n = beta_vec / |beta_vec|`.
pub fn correlator_sharp<T: Real>(a_dir: Vec3<T>, b_dir: Vec3<T>, beta_vec: Vec3<T>) -> Result<T> {
    let beta2 = beta_vec.norm_squared();
    if !(beta2 < T::one()) {
        return Err(Error::Domain(format!(
            "sharp correlator needs |beta| < 1, got {}",
            beta2.sqrt()
        )));
    }
    let Some(n) = beta_vec.try_normalize() else {
        return Ok(T::zero() - a_dir.dot(b_dir));
    };
    let an = a_dir.dot(n);
    let bn = b_dir.dot(n);
    let perp = a_dir.perpendicular_to(n).dot(b_dir.perpendicular_to(n));
    let numerator = a_dir.dot(b_dir) - beta2 * perp;
    let da = (T::one() + beta2 * (an * an - T::one())).sqrt();
    let db = (T::one() + beta2 * (bn * bn - T::one())).sqrt();
    Ok(T::zero() - numerator / (da * db))
}

/// Kernel for one slow and one fast particle (particle 1 measured along `a`).
pub fn correlator_mixed<T: Real>(
    a_dir: Vec3<T>,
    b_dir: Vec3<T>,
    kin_slow: &ParticleKinematics<T>,
    kin_fast: &ParticleKinematics<T>,
) -> Result<T> {
    correlator_integrand(a_dir, b_dir, kin_slow, kin_fast)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut ChaCha8Rng) -> Vec3<f64> {
        loop {
            let v = Vec3::<f64>::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v * (1.0 / n);
            }
        }
    }

    fn random_kin(rng: &mut ChaCha8Rng) -> ParticleKinematics<f64> {
        let beta = rng.random_range(0.0..0.999);
        ParticleKinematics::<f64>::from_velocity(rng.random_range(0.1..3.0), random_unit(rng) * beta).unwrap()
    }

    #[test]
    fn same_axis_same_momentum_is_perfectly_anticorrelated() {
        let kin = ParticleKinematics::<f64>::from_velocity(1.0, Vec3::<f64>::new(0.3, 0.5, -0.2)).unwrap();
        let a = Vec3::<f64>::new(0.0, 0.6, 0.8);
        assert!((correlator_integrand(a, a, &kin, &kin).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rest_frame_is_minus_dot() {
        let kin = ParticleKinematics::<f64>::at_rest(1.0).unwrap();
        let a = Vec3::<f64>::new(0.6, 0.8, 0.0);
        let b = Vec3::<f64>::new(0.0, 0.6, 0.8);
        let k = correlator_integrand(a, b, &kin, &kin).unwrap();
        assert!((k + a.dot(b)).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_axes_at_45_degrees_to_motion() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = Vec3::<f64>::new(s, 0.0, s);
        let b = Vec3::<f64>::new(-s, 0.0, s);
        for beta in [0.1, 0.5, s.sqrt(), 0.9, 0.99] {
            let kin = ParticleKinematics::<f64>::from_velocity(1.0, Vec3::<f64>::new(0.0, 0.0, beta)).unwrap();
            let k = correlator_integrand(a, b, &kin, &kin).unwrap();
            let b2 = beta * beta;
            assert!((k + b2 / (2.0 - b2)).abs() < 1e-12);
        }
        // beta^2 = 1/2 gives -1/3
        let kin = ParticleKinematics::<f64>::from_velocity(1.0, Vec3::<f64>::new(0.0, 0.0, s)).unwrap();
        assert!((correlator_integrand(a, b, &kin, &kin).unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_at_rest_and_equal_axes() {
        let a = Vec3::<f64>::new(0.6, 0.8, 0.0);
        let b = Vec3::<f64>::new(0.0, 0.0, 1.0);
        assert_eq!(correlator_sharp(a, b, Vec3::<f64>::zero()).unwrap(), -a.dot(b));
        let beta = Vec3::<f64>::new(0.2, -0.7, 0.4);
        assert!((correlator_sharp(a, a, beta).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sharp_rejects_superluminal() {
        let a = Vec3::<f64>::unit_x();
        assert!(correlator_sharp(a, a, Vec3::<f64>::new(1.0, 0.0, 0.0)).is_err());
        assert!(correlator_sharp(a, a, Vec3::<f64>::new(0.8, 0.7, 0.0)).is_err());
    }

    #[test]
    fn sharp_tends_to_minus_one_for_ultrarelativistic_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut tested = 0;
        while tested < 1000 {
            let (a, b, n) = (random_unit(&mut rng), random_unit(&mut rng), random_unit(&mut rng));
            // the O(1 - beta^2) correction scales as 1/(a.n)^2; 0.3 keeps it under 5e-3
            if a.dot(n).abs() <= 0.3 || b.dot(n).abs() <= 0.3 {
                continue;
            }
            let k = correlator_sharp(a, b, n * 0.9999).unwrap();
            // sign follows sign(a.n)(b.n); with a.n, b.n of equal sign the limit is -1
            let expect = -(a.dot(n) * b.dot(n)).signum();
            assert!((k - expect).abs() < 1e-2, "k = {k}");
            tested += 1;
        }
    }

    #[test]
    fn closed_form_agrees_with_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
            let kin = random_kin(&mut rng);
            let k = correlator_integrand(a, b, &kin, &kin).unwrap();
            let s = correlator_sharp(a, b, kin.beta_vec()).unwrap();
            worst = worst.max((k - s).abs());
        }
        assert!(worst < 1e-12, "max deviation {worst}");
    }

    #[test]
    fn kernel_bounded_and_swap_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100_000 {
            let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
            let (k1, k2) = (random_kin(&mut rng), random_kin(&mut rng));
            let k = correlator_integrand(a, b, &k1, &k2).unwrap();
            assert!((-1.0..=1.0).contains(&k));
            assert_eq!(k, correlator_integrand(b, a, &k2, &k1).unwrap());
        }
    }

    #[test]
    fn kernel_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2000 {
            let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
            let (k1, k2) = (random_kin(&mut rng), random_kin(&mut rng));
            let axis = random_unit(&mut rng);
            let angle = rng.random_range(-3.0..3.0);
            let rot = |kin: &ParticleKinematics<f64>| {
                ParticleKinematics::<f64>::new(kin.mass(), kin.momentum().rotated(axis, angle)).unwrap()
            };
            let k = correlator_integrand(a, b, &k1, &k2).unwrap();
            let kr = correlator_integrand(a.rotated(axis, angle), b.rotated(axis, angle), &rot(&k1), &rot(&k2))
                .unwrap();
            assert!((k - kr).abs() < 1e-10);
        }
    }

    #[test]
    fn perpendicular_motion_keeps_nonrelativistic_value() {
        let a = Vec3::<f64>::new(0.6, 0.8, 0.0);
        let b = Vec3::<f64>::new(-0.8, 0.6, 0.0);
        let b2 = Vec3::<f64>::new(1.0, 0.0, 0.0);
        for beta in [0.0, 0.3, 0.9, 0.999, 0.999999] {
            // the literal closed form cancels (1 - beta^2) between numerator and denominator
            let tol = if beta < 0.9999 { 1e-12 } else { 1e-9 };
            let v = Vec3::<f64>::new(0.0, 0.0, beta);
            assert!((correlator_sharp(a, b, v).unwrap() + a.dot(b)).abs() < tol);
            assert!((correlator_sharp(a, b2, v).unwrap() + a.dot(b2)).abs() < tol);
            let kin = ParticleKinematics::<f64>::from_velocity(1.0, v).unwrap();
            assert!((correlator_integrand(a, b2, &kin, &kin).unwrap() + a.dot(b2)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_speeds() {
        let rest = ParticleKinematics::<f64>::at_rest(1.0).unwrap();
        let a = Vec3::<f64>::new(0.6, 0.8, 0.0);
        let b = Vec3::<f64>::new(0.0, 1.0, 0.0);
        assert!((correlator_mixed(a, b, &rest, &rest).unwrap() + a.dot(b)).abs() < 1e-15);
        let n = Vec3::<f64>::new(0.0, 0.0, 1.0);
        let fast = ParticleKinematics::<f64>::from_velocity(1.0, n * 0.999999).unwrap();
        assert!((correlator_mixed(n, n, &rest, &fast).unwrap() + 1.0).abs() < 1e-12);
        // fast particle's axis collapses onto n: K -> -(a.n) sign(b.n)
        let a2 = Vec3::<f64>::new(0.6, 0.0, 0.8);
        let b2 = Vec3::<f64>::new(0.0, 0.6, 0.8);
        let k = correlator_mixed(a2, b2, &rest, &fast).unwrap();
        assert!((k + 0.8).abs() < 1e-3);
    }

    #[test]
    fn velocity_kernel_reaches_light_speed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = Vec3::<f64>::new(s, 0.0, s);
        let b = Vec3::<f64>::new(-s, 0.0, s);
        let n = Vec3::<f64>::new(0.0, 0.0, 1.0);
        assert!((velocity_kernel(a, b, n, n).unwrap() + 1.0).abs() < 1e-15);
        assert!(velocity_kernel(Vec3::<f64>::unit_x(), b, n, n).is_err());
    }
}
