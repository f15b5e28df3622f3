//! Frequency-domain model of a suspended elastic rail carrying the three
//! gratings of a Mach-Zehnder atom interferometer.
//!
//! The rail is an Euler-Bernoulli beam of length `2L` hanging on two
//! spring/damper supports. Support motion spectra are propagated through the
//! beam response to the interferometer phase, which is then band-integrated
//! and turned into a fringe-visibility prediction.
//!
//! Conventions used throughout the crate:
//!
//! * SI units, angular frequency (rad/s) internally; Hz only where a field
//!   or argument is explicitly named `nu` or `*_hz`.
//! * Fourier convention `x(t) = Re[x(ω) e^{-iωt}]`, so a delay `τ`
//!   multiplies an amplitude by `e^{iωτ}`.
//! * Power spectral densities are one-sided, in m²/Hz (support motion) or
//!   rad²/Hz (phase).

pub mod beam;
pub mod error;
pub mod noise;
pub mod phase;
pub mod roots;
pub mod spectrum;
pub mod suspension;
pub mod visibility;

pub use beam::{
    dispersion_kappa, find_bending_modes, mode_q_factors, pendular_q_factors, BendingMode,
    CrossSection, Material, ModalSolution, Parity, RailSpec,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use noise::{Interpolation, NoiseSpectrum, PowerLawSegment, PsdSample};
pub use phase::{
    optical_phase, phase_response_exact, phase_transfer_exact, phase_transfer_lowfreq,
    InterferometerSpec, PhaseParts, PhaseTransfer,
};
pub use spectrum::{
    phase_noise_spectrum, rms_bending, Band, GridDensity, GridSpec, PhaseNoiseOptions,
    PhaseNoiseResult, SpectrumPoint,
};
pub use suspension::{
    boundary_coefficients, pendular_modes, solve_amplitudes, BoundaryCoefficients, End,
    PendularModes, ResponseAmplitudes, SuspensionEnd, SuspensionSpec,
};
pub use visibility::{fit_visibility, visibility, VisibilityModel, VisibilityPoint};

/// `2π`, spelled out because Hz/rad·s⁻¹ conversions are everywhere.
pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Converts a frequency in Hz to angular frequency.
#[inline]
pub fn hz_to_omega(nu: f64) -> f64 {
    TWO_PI * nu
}

/// Converts an angular frequency to Hz.
#[inline]
pub fn omega_to_hz(omega: f64) -> f64 {
    omega / TWO_PI
}
