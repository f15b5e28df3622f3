//! Forced response of the suspended rail.
//!
//! For each angular frequency the rail shape is
//! `X(z) = a sin κz + b cos κz + c sinh κz + d cosh κz`. Torque-free ends fix
//! `c` and `d` in terms of `a` and `b`; the spring/damper force balance at the
//! two ends leaves a 2×2 complex system for `(a, b)` driven by the support
//! motions `x₋`, `x₊`.
//!
//! The end equations are stored divided by `cosh(κL)·sinh(κL)` so that only
//! `tanh` and ratios of hyperbolic functions appear; nothing overflows for
//! large `κL`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beam::{dispersion_kappa, pendular_q_factors, RailSpec};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Relative size of the determinant below which the boundary system is
/// treated as singular.
const SINGULAR_REL_TOL: f64 = 1e-13;

/// Validity limit of the low-frequency closed forms.
pub const LOWFREQ_MAX_KAPPA_L: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Minus,
    Plus,
}

impl End {
    /// `ε = ∓1`.
    pub fn sign(self) -> f64 {
        match self {
            End::Minus => -1.0,
            End::Plus => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuspensionEnd {
    /// Spring constant, N/m.
    pub stiffness: f64,
    /// Damping coefficient, kg/s.
    pub damping: f64,
}

impl SuspensionEnd {
    pub fn new(stiffness: f64, damping: f64) -> Result<Self> {
        ensure_non_negative("stiffness", stiffness)?;
        ensure_non_negative("damping", damping)?;
        Ok(Self { stiffness, damping })
    }

    /// `(K - iμω)/(m·ω²)`, the reciprocal of the suspension ratio `R`. Finite
    /// for every end, zero for a free end.
    pub fn inverse_ratio(&self, mass: f64, omega: f64) -> Complex64 {
        Complex64::new(self.stiffness, -self.damping * omega) / (mass * omega * omega)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuspensionSpec {
    pub minus_end: SuspensionEnd,
    pub plus_end: SuspensionEnd,
    /// Mass parameter used in `R`; defaults to `ρ·A·L` of the rail.
    pub mass_override: Option<f64>,
}

impl SuspensionSpec {
    pub fn new(minus_end: SuspensionEnd, plus_end: SuspensionEnd, mass_override: Option<f64>) -> Result<Self> {
        SuspensionEnd::new(minus_end.stiffness, minus_end.damping)?;
        SuspensionEnd::new(plus_end.stiffness, plus_end.damping)?;
        if let Some(m) = mass_override {
            ensure_positive("mass_override", m)?;
        }
        Ok(Self {
            minus_end,
            plus_end,
            mass_override,
        })
    }

    pub fn symmetric(end: SuspensionEnd, mass_override: Option<f64>) -> Result<Self> {
        Self::new(end, end, mass_override)
    }

    /// Identical ends parameterized by the in-phase pendular frequency and its
    /// quality factor: `K = m·ω_osc²`, `μ = m·ω_osc/Q_osc`.
    pub fn from_pendular(mass: f64, omega_osc: f64, q_osc: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("omega_osc", omega_osc)?;
        ensure_positive("q_osc", q_osc)?;
        let end = SuspensionEnd::new(mass * omega_osc * omega_osc, mass * omega_osc / q_osc)?;
        Self::symmetric(end, Some(mass))
    }

    pub fn end(&self, end: End) -> &SuspensionEnd {
        match end {
            End::Minus => &self.minus_end,
            End::Plus => &self.plus_end,
        }
    }

    pub fn mass(&self, rail: &RailSpec) -> f64 {
        self.mass_override.unwrap_or_else(|| rail.half_mass())
    }

    pub fn is_symmetric(&self) -> bool {
        self.minus_end == self.plus_end
    }

    /// No damping at either end.
    pub fn is_undamped(&self) -> bool {
        self.minus_end.damping == 0.0 && self.plus_end.damping == 0.0
    }
}

/// Suspension ratio `R = m·ω²/(K - iμω)`.
///
/// A free end (`K = μ = 0`) yields an infinite real part; callers that need
/// to handle that case should work with [`SuspensionEnd::inverse_ratio`].
pub fn ratio_r(end: &SuspensionEnd, mass: f64, omega: f64) -> Result<Complex64> {
    ensure_positive("omega", omega)?;
    ensure_positive("mass", mass)?;
    let denom = Complex64::new(end.stiffness, -end.damping * omega);
    if denom.norm() == 0.0 {
        return Ok(Complex64::new(f64::INFINITY, 0.0));
    }
    Ok(Complex64::new(mass * omega * omega, 0.0) / denom)
}

/// Coefficients of one end equation `α a + ε β b = ε γ x_ε`, divided by
/// `cosh(κL)·sinh(κL)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndCoefficients {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCoefficients {
    pub kappa_l: f64,
    pub minus: EndCoefficients,
    pub plus: EndCoefficients,
}

impl BoundaryCoefficients {
    pub fn end(&self, end: End) -> &EndCoefficients {
        match end {
            End::Minus => &self.minus,
            End::Plus => &self.plus,
        }
    }

    /// Determinant of the 2×2 system in `(a, b)`.
    pub fn determinant(&self) -> Complex64 {
        self.minus.alpha * self.plus.beta + self.minus.beta * self.plus.alpha
    }
}

fn end_coefficients(kappa_l: f64, inv_r: Complex64) -> EndCoefficients {
    let x = kappa_l;
    let (s, co) = x.sin_cos();
    let th = x.tanh();
    EndCoefficients {
        alpha: Complex64::new(s / th - co, 0.0) - inv_r * (2.0 * x * s),
        beta: Complex64::new(s + co * th, 0.0) - inv_r * (2.0 * x * co),
        gamma: -inv_r * x,
    }
}

pub fn boundary_coefficients(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    omega: f64,
) -> Result<BoundaryCoefficients> {
    let kappa = dispersion_kappa(rail, omega)?;
    let kappa_l = kappa * rail.half_length;
    let mass = suspension.mass(rail);
    Ok(BoundaryCoefficients {
        kappa_l,
        minus: end_coefficients(kappa_l, suspension.minus_end.inverse_ratio(mass, omega)),
        plus: end_coefficients(kappa_l, suspension.plus_end.inverse_ratio(mass, omega)),
    })
}

/// Complex amplitudes of the rail shape at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseAmplitudes {
    pub kappa: f64,
    pub half_length: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// `f(κz)/g(κL)` for `f, g ∈ {sinh, cosh}` without overflow.
fn hyperbolic_ratio(u: f64, v: f64, num_sinh: bool, den_sinh: bool) -> f64 {
    let au = u.abs();
    let eu = (-2.0 * au).exp();
    let ev = (-2.0 * v).exp();
    let num = if num_sinh { u.signum() * (1.0 - eu) } else { 1.0 + eu };
    let den = if den_sinh { 1.0 - ev } else { 1.0 + ev };
    (au - v).exp() * num / den
}

impl ResponseAmplitudes {
    fn from_ab(kappa: f64, half_length: f64, a: Complex64, b: Complex64) -> Self {
        let x = kappa * half_length;
        Self {
            kappa,
            half_length,
            a,
            b,
            c: a * (x.sin() / x.sinh()),
            d: b * (x.cos() / x.cosh()),
        }
    }

    pub fn kappa_l(&self) -> f64 {
        self.kappa * self.half_length
    }

    fn check_z(&self, z: f64) -> Result<()> {
        if !z.is_finite() || z.abs() > self.half_length * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "z = {z} m outside the rail [-{0}, {0}] m",
                self.half_length
            )));
        }
        Ok(())
    }

    /// Displacement `X(z, ω)` of the neutral line.
    pub fn shape(&self, z: f64) -> Result<Complex64> {
        self.check_z(z)?;
        let (u, x) = (self.kappa * z, self.kappa_l());
        let odd = u.sin() + x.sin() * hyperbolic_ratio(u, x, true, true);
        let even = u.cos() + x.cos() * hyperbolic_ratio(u, x, false, false);
        Ok(self.a * odd + self.b * even)
    }

    /// `X(z) − X(0)`, evaluated without cancelling the rigid-body part, so it
    /// keeps full relative precision when `κL ≪ 1`.
    pub fn offset_from_center(&self, z: f64) -> Result<Complex64> {
        self.check_z(z)?;
        let (y, x) = (self.kappa * z, self.kappa_l());
        let odd = y.sin() + x.sin() * hyperbolic_ratio(y, x, true, true);
        // even = cos y − 1 + (cos x/cosh x)(cosh y − 1)
        //      = 2 cos x·sinh²(y/2)/cosh x − 2 sin²(y/2)
        let u = 0.5 * y.abs();
        let even = if x < 1.0 {
            let (sh_u, sn_u) = (u.sinh(), u.sin());
            let (sh_h, sn_h) = ((0.5 * x).sinh(), (0.5 * x).sin());
            let ch_minus_co = 2.0 * (sh_h * sh_h + sn_h * sn_h);
            2.0 * sinh_minus_sin(u) * (sh_u + sn_u) - 2.0 * sh_u * sh_u * ch_minus_co / x.cosh()
        } else {
            let r = hyperbolic_ratio(u, 0.5 * x, true, false);
            let sh2_over_ch = r * r * 0.5 * (1.0 + 1.0 / x.cosh());
            let sn_u = u.sin();
            2.0 * x.cos() * sh2_over_ch - 2.0 * sn_u * sn_u
        };
        Ok(self.a * odd + self.b * even)
    }

    /// Second derivative `∂²X/∂z²`, proportional to the bending torque.
    pub fn curvature(&self, z: f64) -> Result<Complex64> {
        self.check_z(z)?;
        let (u, x) = (self.kappa * z, self.kappa_l());
        let odd = -u.sin() + x.sin() * hyperbolic_ratio(u, x, true, true);
        let even = -u.cos() + x.cos() * hyperbolic_ratio(u, x, false, false);
        Ok((self.a * odd + self.b * even) * self.kappa.powi(2))
    }

    /// Third derivative `∂³X/∂z³`, proportional to the shear force.
    pub fn third_derivative(&self, z: f64) -> Result<Complex64> {
        self.check_z(z)?;
        let (u, x) = (self.kappa * z, self.kappa_l());
        let odd = -u.cos() + x.sin() * hyperbolic_ratio(u, x, false, true);
        let even = u.sin() + x.cos() * hyperbolic_ratio(u, x, true, false);
        Ok((self.a * odd + self.b * even) * self.kappa.powi(3))
    }
}

/// `sinh u − sin u`, by its series for small `u`.
fn sinh_minus_sin(u: f64) -> f64 {
    if u.abs() < 0.5 {
        let u2 = u * u;
        let u4 = u2 * u2;
        // 2(u³/3! + u⁷/7! + u¹¹/11! + u¹⁵/15!)
        2.0 * u * u2 * (1.0 / 6.0 + u4 * (1.0 / 5040.0 + u4 * (1.0 / 39_916_800.0 + u4 / 1.307_674_368e12)))
    } else {
        u.sinh() - u.sin()
    }
}

/// Solves the end conditions for the response amplitudes driven by the
/// support motions `x_minus`, `x_plus`.
pub fn solve_amplitudes(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    omega: f64,
    x_minus: Complex64,
    x_plus: Complex64,
) -> Result<ResponseAmplitudes> {
    let coeffs = boundary_coefficients(rail, suspension, omega)?;
    let (m, p) = (coeffs.minus, coeffs.plus);
    // α₋a − β₋b = −γ₋x₋ ;  α₊a + β₊b = γ₊x₊
    let det = coeffs.determinant();
    let scale = (m.alpha.norm() + m.beta.norm()) * (p.alpha.norm() + p.beta.norm());
    if !(det.norm() > SINGULAR_REL_TOL * scale) {
        return Err(Error::ResonanceSingularity {
            frequency_hz: crate::omega_to_hz(omega),
        });
    }
    let rhs_minus = -m.gamma * x_minus;
    let rhs_plus = p.gamma * x_plus;
    let a = (rhs_minus * p.beta + m.beta * rhs_plus) / det;
    let b = (m.alpha * rhs_plus - p.alpha * rhs_minus) / det;
    Ok(ResponseAmplitudes::from_ab(
        coeffs.kappa_l / rail.half_length,
        rail.half_length,
        a,
        b,
    ))
}

/// Determinant of the boundary system at `omega`. Real when both ends are
/// undamped; its sign changes bracket the undamped resonances.
pub fn determinant(rail: &RailSpec, suspension: &SuspensionSpec, omega: f64) -> Result<Complex64> {
    Ok(boundary_coefficients(rail, suspension, omega)?.determinant())
}

/// Low-frequency closed forms `a = (x₊−x₋)/(4κL)·3/(3−R)` and
/// `b = (x₊+x₋)/(4(1−R))`, valid for identical ends and `κL ≪ 1`.
///
/// This is a diagnostic/oracle path; [`solve_amplitudes`] is the production
/// solver.
pub fn amplitudes_lowfreq(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    omega: f64,
    x_minus: Complex64,
    x_plus: Complex64,
) -> Result<(Complex64, Complex64)> {
    if !suspension.is_symmetric() {
        return Err(Error::Unsupported(
            "low-frequency amplitudes require identical ends".into(),
        ));
    }
    let kappa_l = dispersion_kappa(rail, omega)? * rail.half_length;
    if kappa_l >= LOWFREQ_MAX_KAPPA_L {
        return Err(Error::Unsupported(format!(
            "kappa*L = {kappa_l:.4} is outside the low-frequency range (< {LOWFREQ_MAX_KAPPA_L})"
        )));
    }
    let inv_r = suspension.minus_end.inverse_ratio(suspension.mass(rail), omega);
    // 3/(3−R) = 3R⁻¹/(3R⁻¹ − 1), 1/(1−R) = R⁻¹/(R⁻¹ − 1); finite for free ends.
    let rot = inv_r * 3.0 / (inv_r * 3.0 - 1.0);
    let osc = inv_r / (inv_r - 1.0);
    let a = (x_plus - x_minus) / (4.0 * kappa_l) * rot;
    let b = (x_plus + x_minus) / 4.0 * osc;
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendularModes {
    /// In-phase (translational) resonance, rad/s.
    pub omega_osc: f64,
    /// Rotational resonance about the rail center, rad/s.
    pub omega_rot: f64,
    /// Infinite when the ends are undamped.
    pub q_osc: f64,
    pub q_rot: f64,
}

/// Pendular resonances of a rail on identical end supports.
pub fn pendular_modes(rail: &RailSpec, suspension: &SuspensionSpec) -> Result<PendularModes> {
    if !suspension.is_symmetric() {
        return Err(Error::Unsupported(
            "pendular modes with different end supports mix translation and rotation; \
             only identical ends are handled"
                .into(),
        ));
    }
    let end = suspension.minus_end;
    ensure_positive("suspension stiffness", end.stiffness)?;
    let mass = suspension.mass(rail);
    let omega_osc = (end.stiffness / mass).sqrt();
    let omega_rot = omega_osc * 3f64.sqrt();
    let (q_osc, q_rot) = if end.damping > 0.0 {
        pendular_q_factors(mass, end.damping, omega_osc, omega_rot)?
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(PendularModes {
        omega_osc,
        omega_rot,
        q_osc,
        q_rot,
    })
}
