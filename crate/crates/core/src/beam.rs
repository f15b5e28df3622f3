//! Rail material and geometry, the beam dispersion relation, free-bending
//! resonances and their quality factors.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};
use crate::roots::bracketed_root;

/// Rounded value of `(κ₀L)²` used in the closed-form first bending frequency.
pub const FIRST_MODE_COEFFICIENT: f64 = 5.593;

/// Half-width of the search bracket around each approximate root, in units of κL.
const ROOT_BRACKET_HALF_WIDTH: f64 = 0.4;
const ROOT_REL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Young's modulus, N/m².
    pub young_modulus: f64,
    /// Mass density, kg/m³.
    pub density: f64,
}

impl Material {
    pub fn new(young_modulus: f64, density: f64) -> Result<Self> {
        ensure_positive("young_modulus", young_modulus)?;
        ensure_positive("density", density)?;
        Ok(Self {
            young_modulus,
            density,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    /// Area, m².
    pub area: f64,
    /// Second moment of area about the bending axis, m⁴.
    pub second_moment_y: f64,
}

impl CrossSection {
    pub fn new(area: f64, second_moment_y: f64) -> Result<Self> {
        ensure_positive("area", area)?;
        ensure_positive("second_moment_y", second_moment_y)?;
        Ok(Self {
            area,
            second_moment_y,
        })
    }

    /// Like [`CrossSection::new`], additionally checking `I_y < A·extent²`
    /// where `extent` is the largest transverse distance from the neutral line.
    pub fn with_extent(area: f64, second_moment_y: f64, extent: f64) -> Result<Self> {
        ensure_positive("extent", extent)?;
        let section = Self::new(area, second_moment_y)?;
        if second_moment_y >= area * extent * extent {
            return Err(Error::Domain(format!(
                "second_moment_y {second_moment_y} m^4 is not achievable with area {area} m^2 \
                 and transverse extent {extent} m"
            )));
        }
        Ok(section)
    }
}

/// Everything the beam model needs about the rail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RailSpec {
    pub material: Material,
    pub section: CrossSection,
    /// Half the rail length `L`; the rail spans `z ∈ [-L, L]`.
    pub half_length: f64,
}

impl RailSpec {
    pub fn new(material: Material, section: CrossSection, half_length: f64) -> Result<Self> {
        Material::new(material.young_modulus, material.density)?;
        CrossSection::new(section.area, section.second_moment_y)?;
        ensure_positive("half_length", half_length)?;
        Ok(Self {
            material,
            section,
            half_length,
        })
    }

    /// `E·I_y/(ρ·A)`, m⁴/s².
    pub fn stiffness_ratio(&self) -> f64 {
        self.material.young_modulus * self.section.second_moment_y
            / (self.material.density * self.section.area)
    }

    /// `ρ·A`, kg/m.
    pub fn linear_density(&self) -> f64 {
        self.material.density * self.section.area
    }

    /// `ρ·A·L` with `L` the half length. This is the default mass parameter
    /// of the suspension formulas; see [`crate::SuspensionSpec::mass_override`].
    pub fn half_mass(&self) -> f64 {
        self.linear_density() * self.half_length
    }

    /// Angular frequency of a bending wave with wavevector `kappa`.
    pub fn omega_for_kappa(&self, kappa: f64) -> f64 {
        self.stiffness_ratio().sqrt() * kappa * kappa
    }

    /// Closed-form first bending frequency `5.593·√(E·I_y/(ρ·A·L⁴))`.
    pub fn omega0_closed_form(&self) -> f64 {
        FIRST_MODE_COEFFICIENT * self.stiffness_ratio().sqrt() / self.half_length.powi(2)
    }

    /// Returns a copy whose Young's modulus is rescaled so that the first
    /// free bending resonance lands on `omega0`. Used to pin the model to a
    /// measured resonance without touching the geometry.
    pub fn with_first_bending_frequency(&self, omega0: f64) -> Result<Self> {
        ensure_positive("omega0", omega0)?;
        let current = self.omega_for_kappa(resonance_root(0)? / self.half_length);
        let mut rail = *self;
        rail.material.young_modulus *= (omega0 / current).powi(2);
        Ok(rail)
    }
}

/// Spatial wavevector of a bending wave at angular frequency `omega`:
/// `κ = (ρ·A·ω²/(E·I_y))^{1/4}`.
pub fn dispersion_kappa(rail: &RailSpec, omega: f64) -> Result<f64> {
    ensure_positive("omega", omega)?;
    Ok((omega / rail.stiffness_ratio().sqrt()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Symmetric shape; only the cosine/cosh amplitudes are excited.
    Even,
    /// Antisymmetric shape; only the sine/sinh amplitudes are excited.
    Odd,
}

impl Parity {
    pub fn of_index(n: usize) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BendingMode {
    pub index: usize,
    /// Wavevector, 1/m.
    pub kappa: f64,
    /// Angular frequency, rad/s.
    pub omega: f64,
    pub parity: Parity,
    pub q_factor: Option<f64>,
}

impl BendingMode {
    /// Dimensionless root `κ·L`.
    pub fn kappa_l(&self, rail: &RailSpec) -> f64 {
        self.kappa * rail.half_length
    }

    /// Damping `μ` that gives this mode quality factor `q`; inverse of
    /// [`mode_q_factors`].
    pub fn damping_for_q(&self, rail: &RailSpec, mass: f64, q: f64) -> Result<f64> {
        ensure_positive("mass", mass)?;
        ensure_positive("q", q)?;
        Ok(mass * self.omega * g_factor(self.kappa_l(rail), self.parity) / (8.0 * q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalSolution {
    /// Modes sorted by ascending frequency, `modes[n].index == n`.
    pub modes: Vec<BendingMode>,
    pub omega0: f64,
    /// Period of the first bending resonance, `2π/ω₀`.
    pub period_t0: f64,
}

/// Approximate n-th root of the free-free resonance condition,
/// `κₙL ≈ (2n+3)π/4 + (-1)ⁿ/cosh((2n+3)π/2)`.
pub fn root_approximation(n: usize) -> f64 {
    let center = (2 * n + 3) as f64 * PI / 4.0;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    center + sign / (2.0 * center).cosh()
}

/// `cos(2x) - 1/cosh(2x)`, the overflow-free form of `cos(2x)·cosh(2x) = 1`.
pub fn resonance_residual(kappa_l: f64) -> f64 {
    (2.0 * kappa_l).cos() - sech(2.0 * kappa_l)
}

/// n-th nonzero root `κₙL` of the free-free resonance condition.
pub fn resonance_root(n: usize) -> Result<f64> {
    let center = (2 * n + 3) as f64 * PI / 4.0;
    bracketed_root(
        resonance_residual,
        center - ROOT_BRACKET_HALF_WIDTH,
        center + ROOT_BRACKET_HALF_WIDTH,
        ROOT_REL_TOL,
    )
    .map_err(|e| Error::Solver(format!("bending root n={n}: {e}")))
}

/// First `n_max + 1` free bending resonances of the rail.
pub fn find_bending_modes(rail: &RailSpec, n_max: usize) -> Result<ModalSolution> {
    let modes = (0..=n_max)
        .map(|n| {
            let kappa = resonance_root(n)? / rail.half_length;
            Ok(BendingMode {
                index: n,
                kappa,
                omega: rail.omega_for_kappa(kappa),
                parity: Parity::of_index(n),
                q_factor: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let omega0 = modes[0].omega;
    let closed_form = rail.omega0_closed_form();
    if ((closed_form - omega0) / omega0).abs() > 1e-3 {
        return Err(Error::Solver(format!(
            "first root gives omega0 = {omega0} rad/s but closed form gives {closed_form} rad/s"
        )));
    }
    Ok(ModalSolution {
        modes,
        omega0,
        period_t0: crate::TWO_PI / omega0,
    })
}

/// Shape factor of the bending-mode quality factor; the branch depends on the
/// mode parity.
pub fn g_factor(kappa_l: f64, parity: Parity) -> f64 {
    let x = kappa_l;
    let sinc2 = (2.0 * x).sin() / (2.0 * x);
    match parity {
        Parity::Even => (1.0 + sinc2) * (x.cos().powi(-2) + sech(x).powi(2)),
        Parity::Odd => (1.0 - sinc2) * (x.sin().powi(-2) + csch(x).powi(2)),
    }
}

/// Fills in `Qₙ = m·ωₙ·g(κₙL)/(8μ)` for every mode.
///
/// `mass` is the suspension mass parameter (nominally `ρ·A·L`).
pub fn mode_q_factors(
    rail: &RailSpec,
    mass: f64,
    mu: f64,
    modes: &ModalSolution,
) -> Result<ModalSolution> {
    ensure_positive("mu", mu)?;
    ensure_positive("mass", mass)?;
    let mut out = modes.clone();
    for mode in &mut out.modes {
        let g = g_factor(mode.kappa_l(rail), mode.parity);
        mode.q_factor = Some(mass * mode.omega * g / (8.0 * mu));
    }
    Ok(out)
}

/// Quality factors of the two pendular resonances, `(Q_osc, Q_rot)` with
/// `Q_osc = m·ω_osc/μ` and `Q_rot = m·ω_rot/(3μ)`.
pub fn pendular_q_factors(mass: f64, mu: f64, omega_osc: f64, omega_rot: f64) -> Result<(f64, f64)> {
    ensure_positive("mass", mass)?;
    ensure_positive("mu", mu)?;
    ensure_positive("omega_osc", omega_osc)?;
    ensure_positive("omega_rot", omega_rot)?;
    Ok((mass * omega_osc / mu, mass * omega_rot / (3.0 * mu)))
}

pub(crate) fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

fn csch(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    x.signum() * 2.0 * e / (1.0 - e * e)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn paper_rail() -> RailSpec {
        RailSpec::new(
            Material::new(72.4e9, 2790.0).unwrap(),
            CrossSection::new(1.49e-2, 3.3e-5).unwrap(),
            0.7,
        )
        .unwrap()
    }

    #[test]
    fn dispersion_at_first_resonance() {
        let rail = paper_rail();
        let kappa = dispersion_kappa(&rail, 2736.4).unwrap();
        assert!((kappa - 3.3784).abs() < 5e-4, "{kappa}");
        assert!((kappa * rail.half_length - 2.365).abs() < 5e-4);
    }

    #[test]
    fn dispersion_at_measured_second_resonance() {
        let kappa = dispersion_kappa(&paper_rail(), crate::hz_to_omega(1375.0)).unwrap();
        assert!((kappa - 6.0031).abs() < 5e-4, "{kappa}");
    }

    #[test]
    fn dispersion_quarter_power_law() {
        let rail = paper_rail();
        let k1 = dispersion_kappa(&rail, 100.0).unwrap();
        let k4 = dispersion_kappa(&rail, 400.0).unwrap();
        assert!((k4 / k1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dispersion_rejects_non_positive_omega() {
        assert!(matches!(
            dispersion_kappa(&paper_rail(), 0.0),
            Err(Error::Domain(_))
        ));
        assert!(dispersion_kappa(&paper_rail(), -3.0).is_err());
    }

    #[test]
    fn first_two_roots() {
        let modes = find_bending_modes(&paper_rail(), 1).unwrap();
        assert_eq!(modes.modes.len(), 2);
        let r0 = modes.modes[0].kappa_l(&paper_rail());
        let r1 = modes.modes[1].kappa_l(&paper_rail());
        assert!((r0 - 2.36502).abs() < 1e-5, "{r0}");
        assert!((r1 - 3.92660).abs() < 1e-5, "{r1}");
        let ratio = modes.modes[1].omega / modes.modes[0].omega;
        assert!((ratio - 2.757).abs() < 5e-4, "{ratio}");
    }

    #[test]
    fn paper_rail_first_frequency() {
        let modes = find_bending_modes(&paper_rail(), 0).unwrap();
        let nu0 = crate::omega_to_hz(modes.omega0);
        assert!((nu0 - 435.5).abs() < 0.05, "{nu0}");
        assert!((modes.period_t0 - 1.0 / nu0).abs() < 1e-15);
    }

    #[test]
    fn omega0_scales_as_inverse_square_of_length() {
        let rail = paper_rail();
        let mut long = rail;
        long.half_length *= 2.0;
        let a = find_bending_modes(&rail, 0).unwrap().omega0;
        let b = find_bending_modes(&long, 0).unwrap().omega0;
        assert!((a / b - 4.0).abs() < 1e-12);
    }

    #[test]
    fn parity_alternates_and_roots_are_accurate() {
        let rail = paper_rail();
        let sol = find_bending_modes(&rail, 40).unwrap();
        for (n, mode) in sol.modes.iter().enumerate() {
            assert_eq!(mode.index, n);
            assert_eq!(mode.parity, Parity::of_index(n));
            let x = mode.kappa_l(&rail);
            assert!(resonance_residual(x).abs() < 1e-10, "n={n}");
            let gap = (x - root_approximation(n)).abs();
            let bound = if n == 0 { 0.01 } else { 1e-3 };
            assert!(gap < bound, "n={n} gap={gap}");
            let ratio = mode.omega / sol.omega0;
            let expect = (mode.kappa / sol.modes[0].kappa).powi(2);
            assert!((ratio / expect - 1.0).abs() < 1e-10);
        }
        assert!(sol.modes.windows(2).all(|w| w[0].omega < w[1].omega));
    }

    #[test]
    fn g_factor_and_q_of_first_mode() {
        let rail = paper_rail().with_first_bending_frequency(crate::hz_to_omega(460.4)).unwrap();
        let sol = find_bending_modes(&rail, 1).unwrap();
        assert!((crate::omega_to_hz(sol.omega0) - 460.4).abs() < 1e-9);
        let g0 = g_factor(sol.modes[0].kappa_l(&rail), Parity::Even);
        assert!((g0 - 1.577).abs() < 1e-3, "{g0}");
        let with_q = mode_q_factors(&rail, 58.0, 560.0, &sol).unwrap();
        let q0 = with_q.modes[0].q_factor.unwrap();
        assert!((q0 - 59.1).abs() < 0.05, "{q0}");
        let doubled = mode_q_factors(&rail, 58.0, 1120.0, &sol).unwrap();
        for (a, b) in with_q.modes.iter().zip(&doubled.modes) {
            assert!((a.q_factor.unwrap() / b.q_factor.unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn q_of_second_mode_is_same_order_as_measured() {
        // Mode 1 placed on the measured 1375 Hz line.
        let rail = paper_rail();
        let x1 = resonance_root(1).unwrap();
        let g1 = g_factor(x1, Parity::Odd);
        let q1 = 58.0 * crate::hz_to_omega(1375.0) * g1 / (8.0 * 560.0);
        assert!(g1 > 0.0);
        assert!(q1 > 6.5 && q1 < 650.0, "{q1}");
        let _ = rail;
    }

    #[test]
    fn q_factors_reject_bad_damping() {
        let rail = paper_rail();
        let sol = find_bending_modes(&rail, 0).unwrap();
        assert!(mode_q_factors(&rail, 58.0, 0.0, &sol).is_err());
        assert!(mode_q_factors(&rail, 58.0, -1.0, &sol).is_err());
    }

    #[test]
    fn pendular_q_values() {
        let w = crate::hz_to_omega(40.0);
        let (q_osc, q_rot) = pendular_q_factors(58.0, 560.0, w, w * 3f64.sqrt()).unwrap();
        assert!((q_osc - 26.03).abs() < 0.01, "{q_osc}");
        assert!((q_rot - q_osc / 3f64.sqrt()).abs() < 1e-12);
        let (h_osc, h_rot) = pendular_q_factors(58.0, 1120.0, w, w * 3f64.sqrt()).unwrap();
        assert!((q_osc / h_osc - 2.0).abs() < 1e-12);
        assert!((q_rot / h_rot - 2.0).abs() < 1e-12);
        assert!(pendular_q_factors(58.0, 0.0, w, w).is_err());
    }

    #[test]
    fn section_extent_check() {
        assert!(CrossSection::with_extent(1.49e-2, 3.3e-5, 0.1).is_ok());
        assert!(CrossSection::with_extent(1e-4, 1e-3, 0.1).is_err());
    }

    #[test]
    fn invalid_material_rejected() {
        assert!(Material::new(0.0, 1.0).is_err());
        assert!(Material::new(1.0, f64::NAN).is_err());
    }
}
