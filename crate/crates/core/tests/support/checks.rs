//! Independent checks shared by the property tests and the acceptance suite.

#![allow(dead_code)]

use railnoise_core::{Complex64, InterferometerSpec, RailSpec, ResponseAmplitudes, SuspensionEnd};

/// Identical ends with the given spring, dashpot and mass.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricEnds {
    pub stiffness: f64,
    pub damping: f64,
    pub mass: f64,
}

/// Bending, Sagnac and acceleration phases (rad) transcribed from the
/// closed form: unscaled boundary coefficients, `a = γ(x₊−x₋)/(2α)`,
/// `b = γ(x₊+x₋)/(2β)`, then the three-line phase expression.
pub fn closed_form_phase(
    rail: &RailSpec,
    ends: SymmetricEnds,
    ifm: &InterferometerSpec,
    omega: f64,
    xm: Complex64,
    xp: Complex64,
) -> [Complex64; 3] {
    let ei = rail.material.young_modulus * rail.section.second_moment_y;
    let rho_a = rail.material.density * rail.section.area;
    let kappa = (rho_a * omega * omega / ei).powf(0.25);
    let x = kappa * rail.half_length;
    let (s, co, sh, ch) = (x.sin(), x.cos(), x.sinh(), x.cosh());
    let r = Complex64::new(ends.mass * omega * omega, 0.0) / Complex64::new(ends.stiffness, -ends.damping * omega);
    let r_inv = r.inv();

    let alpha = Complex64::from((ch * s - sh * co) * ch) - r_inv * (2.0 * x * ch * sh * s);
    let beta = Complex64::from((ch * s + sh * co) * sh) - r_inv * (2.0 * x * ch * sh * co);
    let gamma = -r_inv * (x * ch * sh);
    let a = gamma * (xp - xm) / (alpha * 2.0);
    let b = gamma * (xp + xm) / (beta * 2.0);

    let kl12 = kappa * ifm.grating_distance;
    let wt = omega * ifm.time_of_flight();
    let scale = 2.0 * ifm.phase_scale();
    let bending = b * (1.0 - kl12.cos() + (1.0 - kl12.cosh()) * co / ch) * scale;
    let sagnac = Complex64::i() * a * (kl12.sin() + kl12.sinh() * s / sh) * wt.sin() * scale;
    let accel = b * (kl12.cos() + kl12.cosh() * co / ch) * (1.0 - wt.cos()) * scale;
    [bending, sagnac, accel]
}

pub fn max_abs_shape(amps: &ResponseAmplitudes, half: f64) -> f64 {
    (0..=200)
        .map(|i| amps.shape(-half + 2.0 * half * i as f64 / 200.0).unwrap().norm())
        .fold(0.0, f64::max)
}

/// Largest end torque `|X''(±L)|/(κ²·max|X|)` and largest relative mismatch
/// between the shear force `−ε·EI·X'''(εL)` and the support force
/// `−(K − iμω)(X(εL) − x_ε)`.
pub fn boundary_residuals(
    rail: &RailSpec,
    ends: [SuspensionEnd; 2],
    amps: &ResponseAmplitudes,
    omega: f64,
    x: [Complex64; 2],
) -> (f64, f64) {
    let half = rail.half_length;
    let kappa = amps.kappa;
    let x_max = max_abs_shape(amps, half);
    let ei = rail.material.young_modulus * rail.section.second_moment_y;
    let mut torque: f64 = 0.0;
    let mut force: f64 = 0.0;
    for (i, eps) in [-1.0, 1.0].into_iter().enumerate() {
        let z = eps * half;
        torque = torque.max(amps.curvature(z).unwrap().norm() / (kappa * kappa * x_max));
        let end = ends[i];
        let shear = -amps.third_derivative(z).unwrap() * (eps * ei);
        let spring = -Complex64::new(end.stiffness, -end.damping * omega) * (amps.shape(z).unwrap() - x[i]);
        let scale = shear
            .norm()
            .max(spring.norm())
            .max(Complex64::new(end.stiffness, end.damping * omega).norm() * x[i].norm());
        force = force.max((shear - spring).norm() / scale);
    }
    (torque, force)
}
