//! Support-motion power spectral densities: CSV input/output, interpolation,
//! constant extension and piecewise power-law synthesis.
//!
//! All spectra are one-sided, in m²/Hz, over positive frequencies.

use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdSample {
    /// Frequency, Hz.
    pub nu: f64,
    /// One-sided PSD, m²/Hz.
    pub psd: f64,
}

/// Constant continuation of the last sample up to `to_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extension {
    pub from_hz: f64,
    pub to_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    #[default]
    LogLog,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpectrum {
    samples: Vec<PsdSample>,
    extension: Option<Extension>,
    interpolation: Interpolation,
}

impl NoiseSpectrum {
    pub fn new(samples: Vec<PsdSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "a spectrum needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            validate_sample(s).map_err(|message| Error::Parse {
                line: i + 1,
                row: i,
                message,
            })?;
            if i > 0 && !(s.nu > samples[i - 1].nu) {
                return Err(Error::Parse {
                    line: i + 1,
                    row: i,
                    message: monotonic_message(samples[i - 1].nu, s.nu),
                });
            }
        }
        Ok(Self {
            samples,
            extension: None,
            interpolation: Interpolation::LogLog,
        })
    }

    /// A spectrum that is identically zero on `[lo, hi]`.
    pub fn zero(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![PsdSample { nu: lo, psd: 0.0 }, PsdSample { nu: hi, psd: 0.0 }])
    }

    /// Holds the last sample's value constant up to `to_hz`.
    pub fn extended_to(mut self, to_hz: f64) -> Result<Self> {
        let last = self.last().nu;
        ensure_positive("extension end", to_hz)?;
        if to_hz > last {
            self.extension = Some(Extension {
                from_hz: last,
                to_hz,
            });
        }
        Ok(self)
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn samples(&self) -> &[PsdSample] {
        &self.samples
    }

    pub fn extension(&self) -> Option<Extension> {
        self.extension
    }

    fn last(&self) -> &PsdSample {
        self.samples.last().expect("at least two samples")
    }

    /// Frequency range on which [`NoiseSpectrum::sample_psd`] is defined.
    pub fn support(&self) -> (f64, f64) {
        let hi = self.extension.map_or(self.last().nu, |e| e.to_hz);
        (self.samples[0].nu, hi)
    }

    /// PSD at `nu` (Hz).
    ///
    /// Log-log interpolation between samples; a segment touching a zero
    /// sample falls back to linear interpolation. Inside the extension band
    /// the last sample's value is returned.
    pub fn sample_psd(&self, nu: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        if !(nu >= lo && nu <= hi) {
            return Err(Error::OutOfRange { nu, lo, hi });
        }
        let last = self.last();
        if nu >= last.nu {
            return Ok(last.psd);
        }
        let i = self.samples.partition_point(|s| s.nu <= nu);
        let (left, right) = (self.samples[i - 1], self.samples[i]);
        if nu == left.nu {
            return Ok(left.psd);
        }
        let log_ok = self.interpolation == Interpolation::LogLog && left.psd > 0.0 && right.psd > 0.0;
        Ok(if log_ok {
            let t = (nu / left.nu).ln() / (right.nu / left.nu).ln();
            (left.psd.ln() + t * (right.psd / left.psd).ln()).exp()
        } else {
            let t = (nu - left.nu) / (right.nu - left.nu);
            left.psd + t * (right.psd - left.psd)
        })
    }

    /// Multiplies every PSD value by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.psd *= factor;
        }
        out
    }
}

fn validate_sample(s: &PsdSample) -> std::result::Result<(), String> {
    if !(s.nu.is_finite() && s.nu > 0.0) {
        return Err(format!("frequency must be finite and > 0, got {}", s.nu));
    }
    if !s.psd.is_finite() {
        return Err(format!("PSD must be finite, got {}", s.psd));
    }
    if s.psd < 0.0 {
        return Err(format!("negative PSD {}", s.psd));
    }
    Ok(())
}

fn monotonic_message(prev: f64, nu: f64) -> String {
    if nu == prev {
        format!("duplicate frequency {nu} Hz")
    } else {
        format!("frequencies must increase: {nu} Hz after {prev} Hz")
    }
}

/// Reads a two-column CSV (`freq_hz, psd_m2_per_hz`).
///
/// Blank lines and lines starting with `#` are ignored; a single non-numeric
/// header row is allowed before the data. Errors carry the 1-based file line
/// and the 0-based data row.
pub fn load_spectrum<R: Read>(source: R) -> Result<NoiseSpectrum> {
    let reader = BufReader::new(source);
    let mut samples: Vec<PsdSample> = Vec::new();
    let mut header_allowed = true;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = samples.len();
        let err = |message: String| Error::Parse {
            line: idx + 1,
            row,
            message,
        };
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [f, p] => f.parse::<f64>().ok().zip(p.parse::<f64>().ok()),
            _ => None,
        };
        let Some((nu, psd)) = parsed else {
            if header_allowed && fields.len() == 2 && fields.iter().all(|f| f.parse::<f64>().is_err()) {
                header_allowed = false;
                continue;
            }
            return Err(err(format!("expected two numeric columns, got {trimmed:?}")));
        };
        header_allowed = false;
        let sample = PsdSample { nu, psd };
        validate_sample(&sample).map_err(err)?;
        if let Some(prev) = samples.last() {
            if !(nu > prev.nu) {
                return Err(err(monotonic_message(prev.nu, nu)));
            }
        }
        samples.push(sample);
    }
    NoiseSpectrum::new(samples)
}

pub fn parse_spectrum(text: &str) -> Result<NoiseSpectrum> {
    load_spectrum(text.as_bytes())
}

/// Writes the samples as CSV with a header, 17 significant digits per value
/// so that [`load_spectrum`] reproduces them exactly.
pub fn write_spectrum<W: Write>(spectrum: &NoiseSpectrum, mut out: W) -> Result<()> {
    writeln!(out, "freq_hz,psd_m2_per_hz")?;
    for s in spectrum.samples() {
        writeln!(out, "{:.16e},{:.16e}", s.nu, s.psd)?;
    }
    Ok(())
}

/// One piece of a piecewise power law: `psd(ν) = psd_start·(ν/ν_start)^slope`
/// on `[nu_start, nu_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSegment {
    pub nu_start: f64,
    pub nu_end: f64,
    pub psd_start: f64,
    /// Log-log slope (decades of PSD per decade of frequency).
    pub slope: f64,
}

impl PowerLawSegment {
    pub fn psd_at(&self, nu: f64) -> f64 {
        self.psd_start * (nu / self.nu_start).powf(self.slope)
    }

    /// Segment starting where `prev` ends, at its end value.
    pub fn continuing(prev: &PowerLawSegment, nu_end: f64, slope: f64) -> Self {
        Self {
            nu_start: prev.nu_end,
            nu_end,
            psd_start: prev.psd_at(prev.nu_end),
            slope,
        }
    }
}

pub const DEFAULT_POINTS_PER_DECADE: usize = 50;

/// Samples a contiguous piecewise power law at `points_per_decade`
/// log-spaced points (at least one interval per segment). At a shared
/// boundary the later segment's starting value wins.
pub fn synth_spectrum(segments: &[PowerLawSegment], points_per_decade: usize) -> Result<NoiseSpectrum> {
    if segments.is_empty() {
        return Err(Error::Domain("no segments".into()));
    }
    if points_per_decade == 0 {
        return Err(Error::Domain("points_per_decade must be >= 1".into()));
    }
    for (i, seg) in segments.iter().enumerate() {
        ensure_positive("nu_start", seg.nu_start)?;
        if !(seg.nu_end > seg.nu_start) || !seg.nu_end.is_finite() {
            return Err(Error::Domain(format!(
                "segment {i}: nu_end {} must exceed nu_start {}",
                seg.nu_end, seg.nu_start
            )));
        }
        if !(seg.psd_start.is_finite() && seg.psd_start >= 0.0) || !seg.slope.is_finite() {
            return Err(Error::Domain(format!("segment {i}: invalid level or slope")));
        }
        if i > 0 {
            let prev_end = segments[i - 1].nu_end;
            if seg.nu_start < prev_end {
                return Err(Error::Domain(format!(
                    "segment {i} overlaps the previous one ({} < {prev_end})",
                    seg.nu_start
                )));
            }
            if seg.nu_start > prev_end {
                return Err(Error::Domain(format!(
                    "gap between segments {} and {i} ({prev_end} .. {})",
                    i - 1,
                    seg.nu_start
                )));
            }
        }
    }

    let mut samples = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let decades = (seg.nu_end / seg.nu_start).log10();
        let intervals = ((decades * points_per_decade as f64).ceil() as usize).max(1);
        let first = if i == 0 { 0 } else { 1 };
        if i > 0 {
            // Shared boundary: the new segment's start value replaces the old end.
            let boundary = samples.last_mut().expect("previous segment sampled");
            *boundary = PsdSample {
                nu: seg.nu_start,
                psd: seg.psd_start,
            };
        }
        for k in first..=intervals {
            let nu = if k == intervals {
                seg.nu_end
            } else {
                seg.nu_start * 10f64.powf(decades * k as f64 / intervals as f64)
            };
            samples.push(PsdSample {
                nu,
                psd: seg.psd_at(nu),
            });
        }
    }
    NoiseSpectrum::new(samples)
}
