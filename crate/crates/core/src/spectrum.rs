//! Phase-noise spectra and their band integrals.
//!
//! The two supports are taken to move with the same kind of spectrum but no
//! phase relation, so their contributions add in power:
//! `|Φ(ν)/p|² = |H₋(ν)|²·S₋(ν) + |H₊(ν)|²·S₊(ν)`. This is a poor assumption at
//! the lowest frequencies where both ends move together, hence the default
//! 2 Hz floor on the band.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam::{find_bending_modes, mode_q_factors, pendular_q_factors, RailSpec};
use crate::error::{Error, Result};
use crate::noise::NoiseSpectrum;
use crate::phase::{phase_transfer_exact, InterferometerSpec};
use crate::roots::bracketed_root;
use crate::suspension::{determinant, SuspensionSpec};
use crate::{hz_to_omega, omega_to_hz};

/// Lowest band edge accepted while the low-frequency guard is on, Hz.
pub const LOW_FREQUENCY_FLOOR_HZ: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
            return Err(Error::Domain(format!("invalid band [{lo}, {hi}] Hz")));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridDensity {
    /// Log-spaced base grid with this many points across the band.
    PerBand(usize),
    /// Log-spaced base grid anchored at the decades, independent of the band
    /// edges; bands split at a grid node then integrate additively.
    PerDecade(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub density: GridDensity,
    /// Refinement factor inside resonance windows.
    pub densify_factor: usize,
    /// Window half-size around each resonance, in resonance half-widths.
    pub densify_half_widths: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            density: GridDensity::PerBand(2000),
            densify_factor: 10,
            densify_half_widths: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseOptions {
    pub grid: GridSpec,
    /// Refuse bands starting below 2 Hz, where the uncorrelated-ends
    /// assumption breaks down.
    pub low_freq_guard: bool,
}

impl Default for PhaseNoiseOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            low_freq_guard: true,
        }
    }
}

/// A resonance the grid should resolve: frequency (Hz) and quality factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnownResonance {
    pub nu: f64,
    pub q: f64,
}

/// Pendular resonances and the first two bending resonances of the rail on
/// its suspension. For unequal ends the mean stiffness and damping are used;
/// undamped resonances get an infinite Q.
pub fn known_resonances(rail: &RailSpec, suspension: &SuspensionSpec) -> Result<Vec<KnownResonance>> {
    let mass = suspension.mass(rail);
    let stiffness = 0.5 * (suspension.minus_end.stiffness + suspension.plus_end.stiffness);
    let damping = 0.5 * (suspension.minus_end.damping + suspension.plus_end.damping);
    let mut out = Vec::new();
    if stiffness > 0.0 {
        let omega_osc = (stiffness / mass).sqrt();
        let omega_rot = omega_osc * 3f64.sqrt();
        let (q_osc, q_rot) = if damping > 0.0 {
            pendular_q_factors(mass, damping, omega_osc, omega_rot)?
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        out.push(KnownResonance { nu: omega_to_hz(omega_osc), q: q_osc });
        out.push(KnownResonance { nu: omega_to_hz(omega_rot), q: q_rot });
    }
    let modes = find_bending_modes(rail, 1)?;
    let modes = if damping > 0.0 {
        mode_q_factors(rail, mass, damping, &modes)?
    } else {
        modes
    };
    for mode in &modes.modes {
        out.push(KnownResonance {
            nu: omega_to_hz(mode.omega),
            q: mode.q_factor.unwrap_or(f64::INFINITY),
        });
    }
    Ok(out)
}

/// Log-spaced nodes `10^(anchor + k·step)` inside `[lo, hi]`.
fn anchored_nodes(anchor: f64, step: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let k_lo = ((lo.log10() - anchor) / step).ceil() as i64;
    let k_hi = ((hi.log10() - anchor) / step).floor() as i64;
    for k in k_lo..=k_hi {
        let nu = 10f64.powf(anchor + k as f64 * step);
        if nu >= lo && nu <= hi {
            out.push(nu);
        }
    }
}

/// Evaluation grid for a band: log-spaced base nodes, refined by
/// `densify_factor` within `densify_half_widths` half-widths of each known
/// resonance, always including both band edges.
pub fn frequency_grid(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    band: Band,
    grid: &GridSpec,
) -> Result<Vec<f64>> {
    let (anchor, step) = match grid.density {
        GridDensity::PerBand(n) if n >= 2 => (band.lo.log10(), (band.hi / band.lo).log10() / (n - 1) as f64),
        GridDensity::PerDecade(n) if n >= 1 => (0.0, 1.0 / n as f64),
        _ => return Err(Error::Domain("grid needs at least 2 points per band or 1 per decade".into())),
    };
    if grid.densify_factor == 0 || !(grid.densify_half_widths >= 0.0) {
        return Err(Error::Domain("invalid densification settings".into()));
    }
    let mut nodes = vec![band.lo, band.hi];
    anchored_nodes(anchor, step, band.lo, band.hi, &mut nodes);
    if grid.densify_factor > 1 {
        let fine = step / grid.densify_factor as f64;
        for res in known_resonances(rail, suspension)? {
            if !res.q.is_finite() {
                continue;
            }
            let half_width = res.nu / (2.0 * res.q);
            let lo = (res.nu - grid.densify_half_widths * half_width).max(band.lo);
            let hi = (res.nu + grid.densify_half_widths * half_width).min(band.hi);
            if lo < hi {
                anchored_nodes(anchor, fine, lo, hi, &mut nodes);
            }
        }
    }
    nodes.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(nodes.len());
    for nu in nodes {
        match out.last() {
            Some(&prev) if (nu - prev).abs() <= 1e-12 * nu => {
                // Prefer the exact band edge over a nearby computed node.
                if nu == band.hi {
                    *out.last_mut().expect("non-empty") = nu;
                }
            }
            _ => out.push(nu),
        }
    }
    Ok(out)
}

/// Trapezoid integral of samples `ys` on the nodes `xs`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid integral restricted to `[lo, hi]`, interpolating linearly at
/// edges that fall between nodes.
pub fn trapezoid_between(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> f64 {
    let mut sum = 0.0;
    for (x, y) in xs.windows(2).zip(ys.windows(2)) {
        let (a, b) = (x[0].max(lo), x[1].min(hi));
        if b <= a {
            continue;
        }
        let at = |t: f64| y[0] + (y[1] - y[0]) * (t - x[0]) / (x[1] - x[0]);
        let ya = if a == x[0] { y[0] } else { at(a) };
        let yb = if b == x[1] { y[1] } else { at(b) };
        sum += 0.5 * (b - a) * (ya + yb);
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    /// Hz.
    pub nu: f64,
    /// `|Φ/p|²`, rad²/Hz.
    pub phi2_total: f64,
    /// Sagnac part only, rad²/Hz.
    pub phi2_sagnac: f64,
    /// Grating misalignment `δ = 2x₂ − x₁ − x₃`, m²/Hz.
    pub delta2: f64,
    pub psd_minus: f64,
    pub psd_plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseResult {
    pub spectrum: Vec<SpectrumPoint>,
    pub band: Band,
    /// `⟨Φ²⟩/p²`, rad².
    pub mean_square_total: f64,
    /// `⟨Φ_Sagnac²⟩/p²`, rad².
    pub mean_square_sagnac: f64,
    /// `⟨δ²⟩`, m².
    pub mean_square_bending: f64,
}

impl PhaseNoiseResult {
    fn from_points(spectrum: Vec<SpectrumPoint>, band: Band) -> Self {
        let (total, sagnac, bending) = integrate_points(&spectrum, band.lo, band.hi);
        Self {
            spectrum,
            band,
            mean_square_total: total,
            mean_square_sagnac: sagnac,
            mean_square_bending: bending,
        }
    }

    /// `(⟨Φ²⟩/p², ⟨Φ_Sagnac²⟩/p², ⟨δ²⟩)` over a sub-band.
    pub fn integrate(&self, lo: f64, hi: f64) -> (f64, f64, f64) {
        integrate_points(&self.spectrum, lo, hi)
    }

    pub fn sagnac_share(&self) -> f64 {
        if self.mean_square_total > 0.0 {
            self.mean_square_sagnac / self.mean_square_total
        } else {
            0.0
        }
    }

    /// `√⟨δ²⟩`, m.
    pub fn rms_bending(&self) -> f64 {
        self.mean_square_bending.sqrt()
    }
}

fn integrate_points(points: &[SpectrumPoint], lo: f64, hi: f64) -> (f64, f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| p.nu).collect();
    let column = |f: fn(&SpectrumPoint) -> f64| -> Vec<f64> { points.iter().map(f).collect() };
    (
        trapezoid_between(&xs, &column(|p| p.phi2_total), lo, hi),
        trapezoid_between(&xs, &column(|p| p.phi2_sagnac), lo, hi),
        trapezoid_between(&xs, &column(|p| p.delta2), lo, hi),
    )
}

fn check_band(band: Band, spectra: [&NoiseSpectrum; 2], options: &PhaseNoiseOptions) -> Result<()> {
    if options.low_freq_guard && band.lo < LOW_FREQUENCY_FLOOR_HZ {
        return Err(Error::Domain(format!(
            "band starts at {} Hz, below {LOW_FREQUENCY_FLOOR_HZ} Hz where both supports move \
             together; disable the low-frequency guard to override",
            band.lo
        )));
    }
    for s in spectra {
        let (lo, hi) = s.support();
        if band.lo < lo {
            return Err(Error::OutOfRange { nu: band.lo, lo, hi });
        }
        if band.hi > hi {
            return Err(Error::OutOfRange { nu: band.hi, lo, hi });
        }
    }
    Ok(())
}

/// With no damping anywhere, the boundary determinant is real; a sign change
/// between grid nodes marks a resonance whose peak would not integrate.
fn reject_undamped_resonances(rail: &RailSpec, suspension: &SuspensionSpec, grid: &[f64]) -> Result<()> {
    if !suspension.is_undamped() {
        return Ok(());
    }
    let det = |nu: f64| -> f64 {
        determinant(rail, suspension, hz_to_omega(nu)).map(|d| d.re).unwrap_or(f64::NAN)
    };
    let values: Vec<f64> = grid.iter().map(|&nu| det(nu)).collect();
    for (i, w) in values.windows(2).enumerate() {
        if w[0] == 0.0 || w[0].signum() != w[1].signum() {
            let frequency_hz = if w[0] == 0.0 {
                grid[i]
            } else {
                bracketed_root(det, grid[i], grid[i + 1], 1e-12).unwrap_or(grid[i])
            };
            return Err(Error::UndampedResonance { frequency_hz });
        }
    }
    Ok(())
}

/// Phase-noise spectrum, normalized per `p²`, and its band integrals.
pub fn phase_noise_spectrum(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    interferometer: &InterferometerSpec,
    noise_minus: &NoiseSpectrum,
    noise_plus: &NoiseSpectrum,
    band: Band,
    options: &PhaseNoiseOptions,
) -> Result<PhaseNoiseResult> {
    interferometer.validate(rail)?;
    check_band(band, [noise_minus, noise_plus], options)?;
    let grid = frequency_grid(rail, suspension, band, &options.grid)?;
    reject_undamped_resonances(rail, suspension, &grid)?;

    let unit_order = InterferometerSpec {
        order: 1,
        ..*interferometer
    };
    let k_g = interferometer.grating_wavevector;
    let points = grid
        .par_iter()
        .map(|&nu| {
            let h = phase_transfer_exact(rail, suspension, &unit_order, hz_to_omega(nu)).map_err(|e| match e {
                Error::ResonanceSingularity { frequency_hz } if suspension.is_undamped() => {
                    Error::UndampedResonance { frequency_hz }
                }
                other => other,
            })?;
            let psd_minus = noise_minus.sample_psd(nu)?;
            let psd_plus = noise_plus.sample_psd(nu)?;
            let power = |minus: f64, plus: f64| minus * psd_minus + plus * psd_plus;
            Ok(SpectrumPoint {
                nu,
                phi2_total: power(h.minus.total.norm_sqr(), h.plus.total.norm_sqr()),
                phi2_sagnac: power(h.minus.sagnac.norm_sqr(), h.plus.sagnac.norm_sqr()),
                delta2: power(h.minus.bending.norm_sqr(), h.plus.bending.norm_sqr()) / (k_g * k_g),
                psd_minus,
                psd_plus,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseNoiseResult::from_points(points, band))
}

/// RMS grating misalignment `√⟨δ²⟩` (m) over the band. Only the grating
/// positions of `interferometer` matter here.
pub fn rms_bending(
    rail: &RailSpec,
    suspension: &SuspensionSpec,
    interferometer: &InterferometerSpec,
    noise_minus: &NoiseSpectrum,
    noise_plus: &NoiseSpectrum,
    band: Band,
    options: &PhaseNoiseOptions,
) -> Result<f64> {
    phase_noise_spectrum(rail, suspension, interferometer, noise_minus, noise_plus, band, options)
        .map(|r| r.rms_bending())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{CrossSection, Material};
    use crate::noise::PsdSample;
    use crate::suspension::SuspensionEnd;

    fn rail() -> RailSpec {
        RailSpec::new(
            Material::new(72.4e9, 2790.0).unwrap(),
            CrossSection::new(1.49e-2, 3.3e-5).unwrap(),
            0.7,
        )
        .unwrap()
    }

    fn susp(mu: f64) -> SuspensionSpec {
        SuspensionSpec::symmetric(SuspensionEnd::new(1e6, mu).unwrap(), Some(58.0)).unwrap()
    }

    fn ifm() -> InterferometerSpec {
        InterferometerSpec::new(1.8727e7, 0.605, 1065.0, 1).unwrap()
    }

    fn flat(psd: f64) -> NoiseSpectrum {
        NoiseSpectrum::new(vec![PsdSample { nu: 1.0, psd }, PsdSample { nu: 2000.0, psd }]).unwrap()
    }

    #[test]
    fn zero_noise_gives_zero() {
        let z = NoiseSpectrum::zero(1.0, 2000.0).unwrap();
        let band = Band::new(2.0, 1000.0).unwrap();
        let r = phase_noise_spectrum(&rail(), &susp(500.0), &ifm(), &z, &z, band, &Default::default())
            .unwrap();
        assert_eq!(r.mean_square_total, 0.0);
        assert_eq!(r.mean_square_sagnac, 0.0);
        assert_eq!(r.rms_bending(), 0.0);
    }

    #[test]
    fn narrow_band_rectangle_limit() {
        let rail = rail();
        let susp = susp(500.0);
        let s = 1e-16;
        let band = Band::new(200.0, 201.0).unwrap();
        let r = phase_noise_spectrum(&rail, &susp, &ifm(), &flat(s), &flat(s), band, &Default::default())
            .unwrap();
        let h = phase_transfer_exact(&rail, &susp, &ifm(), hz_to_omega(200.5)).unwrap();
        let total = (h.minus.total.norm_sqr() + h.plus.total.norm_sqr()) * s;
        assert!((r.mean_square_total / total - 1.0).abs() < 5e-3);
        let bend = (h.minus.bending.norm_sqr() + h.plus.bending.norm_sqr()) * s;
        let k = ifm().grating_wavevector;
        assert!((r.rms_bending() / (bend.sqrt() / k) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn mean_squares_are_trapezoids_of_their_spectra() {
        let band = Band::new(2.0, 1000.0).unwrap();
        let r = phase_noise_spectrum(&rail(), &susp(500.0), &ifm(), &flat(1e-16), &flat(2e-16), band, &Default::default())
            .unwrap();
        let xs: Vec<f64> = r.spectrum.iter().map(|p| p.nu).collect();
        let tot: Vec<f64> = r.spectrum.iter().map(|p| p.phi2_total).collect();
        let sag: Vec<f64> = r.spectrum.iter().map(|p| p.phi2_sagnac).collect();
        assert!((trapezoid(&xs, &tot) / r.mean_square_total - 1.0).abs() < 1e-10);
        assert!((trapezoid(&xs, &sag) / r.mean_square_sagnac - 1.0).abs() < 1e-10);
        assert!(r.mean_square_sagnac > 0.0);
    }

    #[test]
    fn grid_keeps_edges_and_refines_resonances() {
        let rail = rail();
        let band = Band::new(2.0, 1000.0).unwrap();
        let grid = frequency_grid(&rail, &susp(500.0), band, &GridSpec::default()).unwrap();
        assert_eq!(grid[0], 2.0);
        assert_eq!(*grid.last().unwrap(), 1000.0);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
        let base_ratio = (1000f64 / 2.0).powf(1.0 / 1999.0);
        let near_osc = grid
            .windows(2)
            .filter(|w| (w[0] - 20.9).abs() < 0.5)
            .map(|w| w[1] / w[0])
            .fold(f64::INFINITY, f64::min);
        assert!(near_osc < 1.0 + (base_ratio - 1.0) / 5.0);
    }

    #[test]
    fn guard_and_support_errors() {
        let opts = PhaseNoiseOptions::default();
        let n = flat(1e-16);
        let low = Band::new(1.0, 100.0).unwrap();
        let err = phase_noise_spectrum(&rail(), &susp(500.0), &ifm(), &n, &n, low, &opts).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let open = PhaseNoiseOptions { low_freq_guard: false, ..opts };
        assert!(phase_noise_spectrum(&rail(), &susp(500.0), &ifm(), &n, &n, low, &open).is_ok());
        let wide = Band::new(2.0, 3000.0).unwrap();
        let err = phase_noise_spectrum(&rail(), &susp(500.0), &ifm(), &n, &n, wide, &opts).unwrap_err();
        assert!(matches!(err, Error::OutOfRange { .. }));
    }

    #[test]
    fn undamped_resonance_in_band_is_an_error() {
        let n = flat(1e-16);
        let band = Band::new(10.0, 100.0).unwrap();
        let err = phase_noise_spectrum(&rail(), &susp(0.0), &ifm(), &n, &n, band, &Default::default())
            .unwrap_err();
        match err {
            Error::UndampedResonance { frequency_hz } => assert!((frequency_hz / 20.9 - 1.0).abs() < 0.01),
            other => panic!("{other}"),
        }
    }
}
