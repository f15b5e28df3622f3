//! Interferometer phase driven by the rail motion.
//!
//! The phase of order `p` is `p·k_G·[2x₂(t) − x₁(t−T) − x₃(t+T)]`, with the
//! gratings at `z = −L₁₂, 0, +L₁₂` and `T = L₁₂/u` the atom time of flight.
//! The result is split into three parts by its dependence on `T`:
//!
//! * bending: the value at `T = 0` (instantaneous misalignment `δ`),
//! * Sagnac: the part odd in `T` (rotation of the rail),
//! * acceleration: the remaining even part.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beam::{dispersion_kappa, find_bending_modes, RailSpec};
use crate::error::{ensure_positive, Error, Result};
use crate::suspension::{solve_amplitudes, ResponseAmplitudes, SuspensionSpec};

/// Validity limit on `ωT` of the low-frequency phase formula.
pub const LOWFREQ_MAX_OMEGA_T: f64 = 0.3;

/// Validity limit on `κL` of the low-frequency phase formula. Wider than the
/// amplitude limit: the phase combines `a` and `b` so that their leading
/// truncation errors largely cancel (about 5e-4 relative at `κL = 0.36`).
pub const LOWFREQ_PHASE_MAX_KAPPA_L: f64 = 0.5;

/// Bending coefficient of the low-frequency phase formula, `5·0.890²/12`
/// rounded as commonly quoted.
pub const LOWFREQ_BENDING_COEFFICIENT: f64 = 0.330;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSpec {
    /// Grating wavevector `k_G`, rad/m.
    pub grating_wavevector: f64,
    /// Distance between consecutive gratings `L₁₂`, m.
    pub grating_distance: f64,
    /// Atom velocity along the rail, m/s.
    pub atom_velocity: f64,
    /// Diffraction order `p ≥ 1`.
    pub order: u32,
    /// Wavevector of the optical readout gratings, rad/m.
    pub optical_grating_wavevector: Option<f64>,
}

impl InterferometerSpec {
    pub fn new(
        grating_wavevector: f64,
        grating_distance: f64,
        atom_velocity: f64,
        order: u32,
    ) -> Result<Self> {
        let spec = Self {
            grating_wavevector,
            grating_distance,
            atom_velocity,
            order,
            optical_grating_wavevector: None,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        ensure_positive("grating_wavevector", self.grating_wavevector)?;
        ensure_positive("grating_distance", self.grating_distance)?;
        ensure_positive("atom_velocity", self.atom_velocity)?;
        if self.order == 0 {
            return Err(Error::Domain("diffraction order must be >= 1".into()));
        }
        if let Some(k) = self.optical_grating_wavevector {
            ensure_positive("optical_grating_wavevector", k)?;
        }
        Ok(())
    }

    /// Checks the spec on its own and against the rail it is mounted on.
    pub fn validate(&self, rail: &RailSpec) -> Result<()> {
        self.check()?;
        if self.grating_distance > rail.half_length {
            return Err(Error::Domain(format!(
                "grating distance {} m exceeds the rail half length {} m",
                self.grating_distance, rail.half_length
            )));
        }
        Ok(())
    }

    /// Atom time of flight between consecutive gratings, s.
    pub fn time_of_flight(&self) -> f64 {
        self.grating_distance / self.atom_velocity
    }

    /// `p·k_G`, rad/m.
    pub fn phase_scale(&self) -> f64 {
        self.order as f64 * self.grating_wavevector
    }
}

/// Phase (rad) and its decomposition for one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseParts {
    /// Delayed-sum phase, evaluated directly.
    pub total: Complex64,
    pub bending: Complex64,
    pub sagnac: Complex64,
    pub acceleration: Complex64,
}

impl PhaseParts {
    pub fn scaled(&self, k: Complex64) -> Self {
        Self {
            total: self.total * k,
            bending: self.bending * k,
            sagnac: self.sagnac * k,
            acceleration: self.acceleration * k,
        }
    }

    pub fn sum_of_parts(&self) -> Complex64 {
        self.bending + self.sagnac + self.acceleration
    }
}

impl std::ops::Add for PhaseParts {
    type Output = PhaseParts;
    fn add(self, rhs: Self) -> Self {
        Self {
            total: self.total + rhs.total,
            bending: self.bending + rhs.bending,
            sagnac: self.sagnac + rhs.sagnac,
            acceleration: self.acceleration + rhs.acceleration,
        }
    }
}

/// Per-end phase transfer functions (rad per metre of support motion).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTransfer {
    pub nu: f64,
    pub minus: PhaseParts,
    pub plus: PhaseParts,
}

impl PhaseTransfer {
    /// Phase produced by the support motions `x_minus`, `x_plus`.
    pub fn apply(&self, x_minus: Complex64, x_plus: Complex64) -> PhaseParts {
        self.minus.scaled(x_minus) + self.plus.scaled(x_plus)
    }
}

/// Delayed-sum phase for grating positions `X(∓l12)`, `X(0)` read at
/// `t ∓ delay`; not scaled by `p·k_G`.
///
/// Written in terms of the offsets `X(±l12) − X(0)`, combined into their sum
/// and difference, so the rigid-body and antisymmetric motions, which
/// dominate at low frequency, cancel analytically.
pub(crate) fn delayed_sum(
    amps: &ResponseAmplitudes,
    l12: f64,
    omega: f64,
    delay: f64,
) -> Result<PhaseParts> {
    let x_center = amps.shape(0.0)?;
    let off_first = amps.offset_from_center(-l12)?;
    let off_last = amps.offset_from_center(l12)?;
    let even = off_first + off_last;
    let odd = off_last - off_first;
    let wt = omega * delay;
    let (sin_wt, cos_wt) = wt.sin_cos();
    let half_sin = (0.5 * wt).sin();
    let one_minus_cos = 2.0 * half_sin * half_sin;
    // 2X(0) − X(−l12)e^{iωT} − X(l12)e^{−iωT}
    let total = x_center * (2.0 * one_minus_cos) - even * cos_wt + odd * Complex64::new(0.0, sin_wt);
    Ok(PhaseParts {
        total,
        bending: -even,
        sagnac: odd * Complex64::new(0.0, sin_wt),
        acceleration: (x_center * 2.0 + even) * one_minus_cos,
    })
}

/// Exact phase for given support motions, from the full boundary solve.
pub fn phase_response_exact(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    interferometer: &InterferometerSpec,
    omega: f64,
    x_minus: Complex64,
    x_plus: Complex64,
) -> Result<PhaseParts> {
    interferometer.validate(rail)?;
    let amps = solve_amplitudes(rail, suspension, omega, x_minus, x_plus)?;
    let parts = delayed_sum(
        &amps,
        interferometer.grating_distance,
        omega,
        interferometer.time_of_flight(),
    )?;
    Ok(parts.scaled(Complex64::new(interferometer.phase_scale(), 0.0)))
}

/// Per-end transfer functions: the phase for unit motion of each support
/// with the other one at rest.
pub fn phase_transfer_exact(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    interferometer: &InterferometerSpec,
    omega: f64,
) -> Result<PhaseTransfer> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    Ok(PhaseTransfer {
        nu: crate::omega_to_hz(omega),
        minus: phase_response_exact(rail, suspension, interferometer, omega, one, zero)?,
        plus: phase_response_exact(rail, suspension, interferometer, omega, zero, one)?,
    })
}

/// Low-frequency phase
/// `p·k_G·[(x₊−x₋)·3iωT/(3−R) + (x₊+x₋)·(0.330(ωT₀)² + (ωT)²)/(2(1−R))]`.
///
/// The grating distance is replaced by the half length inside the
/// wavevector factors, so this matches the exact result for `L₁₂ ≈ L`.
pub fn phase_transfer_lowfreq(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    interferometer: &InterferometerSpec,
    omega: f64,
    x_minus: Complex64,
    x_plus: Complex64,
) -> Result<Complex64> {
    interferometer.validate(rail)?;
    let omega_t = omega * interferometer.time_of_flight();
    if omega_t >= LOWFREQ_MAX_OMEGA_T {
        return Err(Error::Unsupported(format!(
            "omega*T = {omega_t:.4} is outside the low-frequency range (< {LOWFREQ_MAX_OMEGA_T})"
        )));
    }
    if !suspension.is_symmetric() {
        return Err(Error::Unsupported(
            "the low-frequency phase formula requires identical ends".into(),
        ));
    }
    let kappa_l = dispersion_kappa(rail, omega)? * rail.half_length;
    if kappa_l >= LOWFREQ_PHASE_MAX_KAPPA_L {
        return Err(Error::Unsupported(format!(
            "kappa*L = {kappa_l:.4} is outside the low-frequency range (< {LOWFREQ_PHASE_MAX_KAPPA_L})"
        )));
    }
    let t0 = find_bending_modes(rail, 0)?.period_t0;
    let inv_r = suspension.minus_end.inverse_ratio(suspension.mass(rail), omega);
    let rot = inv_r * 3.0 / (inv_r * 3.0 - 1.0);
    let osc = inv_r / (inv_r - 1.0);
    let sagnac = (x_plus - x_minus) * Complex64::new(0.0, omega_t) * rot;
    let even = (x_plus + x_minus)
        * ((LOWFREQ_BENDING_COEFFICIENT * (omega * t0).powi(2) + omega_t * omega_t) / 2.0)
        * osc;
    Ok((sagnac + even) * interferometer.phase_scale())
}

/// Phase read by an optical three-grating interferometer, `p·k·δ`.
pub fn optical_phase(delta: f64, order: u32, k_g_opt: f64) -> f64 {
    order as f64 * k_g_opt * delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{CrossSection, Material};
    use crate::hz_to_omega;
    use crate::suspension::SuspensionEnd;

    fn rail() -> RailSpec {
        RailSpec::new(
            Material::new(72.4e9, 2790.0).unwrap(),
            CrossSection::new(1.49e-2, 3.3e-5).unwrap(),
            0.7,
        )
        .unwrap()
    }

    fn susp() -> SuspensionSpec {
        SuspensionSpec::symmetric(SuspensionEnd::new(1e6, 560.0).unwrap(), Some(58.0)).unwrap()
    }

    fn ifm(l12: f64) -> InterferometerSpec {
        InterferometerSpec::new(1.8727e7, l12, 1065.0, 1).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn common_motion_at_dc_gives_no_phase() {
        let x = c(1e-6);
        let spec = ifm(0.605);
        let parts = phase_response_exact(&rail(), &susp(), &spec, 1e-5, x, x).unwrap();
        assert!(parts.total.norm() < 1e-9 * spec.phase_scale() * x.norm());
    }

    #[test]
    fn common_motion_has_no_sagnac_part() {
        let x = Complex64::new(0.4, -0.2);
        for nu in [3.0, 40.0, 460.0] {
            let parts =
                phase_response_exact(&rail(), &susp(), &ifm(0.605), hz_to_omega(nu), x, x).unwrap();
            assert_eq!(parts.sagnac, c(0.0));
        }
    }

    #[test]
    fn parts_add_up() {
        let t = phase_transfer_exact(&rail(), &susp(), &ifm(0.605), hz_to_omega(77.0)).unwrap();
        for p in [t.minus, t.plus] {
            assert!((p.sum_of_parts() - p.total).norm() <= 1e-12 * p.total.norm());
        }
        let both = t.apply(c(1.0), c(1.0));
        let direct =
            phase_response_exact(&rail(), &susp(), &ifm(0.605), hz_to_omega(77.0), c(1.0), c(1.0))
                .unwrap();
        assert!((both.total - direct.total).norm() <= 1e-12 * direct.total.norm());
    }

    #[test]
    fn reversing_the_atoms_flips_only_sagnac() {
        let amps = solve_amplitudes(&rail(), &susp(), 500.0, c(0.1), c(1.0)).unwrap();
        let fwd = delayed_sum(&amps, 0.6, 500.0, 5e-4).unwrap();
        let rev = delayed_sum(&amps, 0.6, 500.0, -5e-4).unwrap();
        assert_eq!(fwd.bending, rev.bending);
        assert_eq!(fwd.acceleration, rev.acceleration);
        assert!((fwd.sagnac + rev.sagnac).norm() < 1e-15 * fwd.sagnac.norm());
    }

    #[test]
    fn lowfreq_common_motion_structure() {
        let rail = rail();
        let spec = ifm(0.7);
        let omega = hz_to_omega(2.0);
        let x0 = c(1e-7);
        let got = phase_transfer_lowfreq(&rail, &susp(), &spec, omega, x0, x0).unwrap();
        let t0 = find_bending_modes(&rail, 0).unwrap().period_t0;
        let wt = omega * spec.time_of_flight();
        let r = crate::suspension::ratio_r(&susp().minus_end, 58.0, omega).unwrap();
        let expect = x0 * spec.phase_scale() * (0.330 * (omega * t0).powi(2) + wt * wt) / (1.0 - r);
        assert!((got - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn lowfreq_differential_motion_is_pure_sagnac() {
        let rail = rail();
        let spec = ifm(0.7);
        let omega = hz_to_omega(2.0);
        let x0 = c(1e-7);
        let got = phase_transfer_lowfreq(&rail, &susp(), &spec, omega, -x0, x0).unwrap();
        let wt = omega * spec.time_of_flight();
        let r = crate::suspension::ratio_r(&susp().minus_end, 58.0, omega).unwrap();
        let expect = x0 * 2.0 * spec.phase_scale() * Complex64::new(0.0, 3.0 * wt) / (3.0 - r);
        assert!((got - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn lowfreq_tracks_exact_with_full_length() {
        let rail = rail();
        let spec = ifm(0.7);
        for (nu, tol) in [(1.0, 1e-4), (5.0, 1e-3)] {
            let omega = hz_to_omega(nu);
            let exact = phase_response_exact(&rail, &susp(), &spec, omega, c(0.0), c(1.0))
                .unwrap()
                .total;
            let approx = phase_transfer_lowfreq(&rail, &susp(), &spec, omega, c(0.0), c(1.0)).unwrap();
            assert!(((approx - exact) / exact).norm() < tol, "{nu}: {approx} vs {exact}");
        }
    }

    #[test]
    fn lowfreq_rejects_out_of_range() {
        let err = phase_transfer_lowfreq(&rail(), &susp(), &ifm(0.7), hz_to_omega(200.0), c(0.0), c(1.0));
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn grating_distance_must_fit_on_rail() {
        let err = phase_transfer_exact(&rail(), &susp(), &ifm(0.8), 10.0);
        assert!(matches!(err, Err(Error::Domain(_))));
        assert!(InterferometerSpec::new(1.0, 0.5, 1000.0, 0).is_err());
    }

    #[test]
    fn optical_readout_example() {
        assert!((optical_phase(3e-9, 1, 3.14e5) - 9.42e-4).abs() < 1e-12);
        assert!((optical_phase(3e-9, 2, 3.14e5) - 1.884e-3).abs() < 1e-12);
    }
}
