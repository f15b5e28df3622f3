//! TOML run configuration.
//!
//! Every section maps onto one library type; validation errors carry the
//! dotted path of the offending field.

use std::path::{Path, PathBuf};

use railnoise_core::noise::{load_spectrum, synth_spectrum};
use railnoise_core::{
    hz_to_omega, Band, CrossSection, GridDensity, GridSpec, InterferometerSpec, Interpolation,
    Material, NoiseSpectrum, PhaseNoiseOptions, PowerLawSegment, RailSpec, SuspensionEnd,
    SuspensionSpec,
};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::profiles;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub rail: Option<RailConfig>,
    pub suspension: Option<SuspensionConfig>,
    pub interferometer: Option<InterferometerConfig>,
    pub noise: Option<NoiseConfig>,
    pub band: Option<BandConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub modes: ModesConfig,
    pub visibility: Option<VisibilityConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RailConfig {
    /// Pa.
    pub young_modulus: f64,
    /// kg/m³.
    pub density: f64,
    /// m².
    pub area: f64,
    /// m⁴.
    pub second_moment_y: f64,
    /// m.
    pub half_length: f64,
    /// Largest transverse extent of the section, m; enables the I < A·h² check.
    pub extent: Option<f64>,
    /// Measured first bending resonance, Hz. Rescales Young's modulus to match.
    pub first_bending_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndConfig {
    pub stiffness: f64,
    #[serde(default)]
    pub damping: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuspensionConfig {
    /// Mass entering the end-force ratio, kg. Defaults to ρ·A·L.
    pub mass: Option<f64>,
    /// Shared by both ends unless `minus`/`plus` override it. N/m.
    pub stiffness: Option<f64>,
    /// kg/s.
    pub damping: Option<f64>,
    /// Identical ends given by the in-phase pendular resonance instead.
    pub pendular_hz: Option<f64>,
    pub pendular_q: Option<f64>,
    pub minus: Option<EndConfig>,
    pub plus: Option<EndConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometerConfig {
    /// rad/m.
    pub grating_wavevector: f64,
    /// m.
    pub grating_distance: f64,
    /// m/s.
    pub atom_velocity: f64,
    #[serde(default = "one")]
    pub order: u32,
    /// rad/m.
    pub optical_grating_wavevector: Option<f64>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolationConfig {
    #[default]
    LogLog,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Spectrum used for both ends.
    pub file: Option<String>,
    pub minus_file: Option<String>,
    pub plus_file: Option<String>,
    /// Piecewise power law used for both ends when no file is given.
    pub synth: Option<SynthConfig>,
    /// Hold the last sample constant up to this frequency, Hz.
    pub extend_to_hz: Option<f64>,
    #[serde(default)]
    pub interpolation: InterpolationConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub nu_start: f64,
    /// m²/Hz at `nu_start`.
    pub psd_start: f64,
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    pub segments: Vec<SynthSegmentConfig>,
}

fn default_ppd() -> usize {
    railnoise_core::noise::DEFAULT_POINTS_PER_DECADE
}

/// One power-law piece; give either its log-log slope or its end value.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSegmentConfig {
    pub nu_end: f64,
    pub slope: Option<f64>,
    pub psd_end: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub nu_min: f64,
    pub nu_max: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points_per_band: Option<usize>,
    pub points_per_decade: Option<usize>,
    #[serde(default = "default_densify")]
    pub densify_factor: usize,
    #[serde(default = "default_half_widths")]
    pub densify_half_widths: f64,
    #[serde(default = "yes")]
    pub low_freq_guard: bool,
}

fn default_densify() -> usize {
    GridSpec::default().densify_factor
}

fn default_half_widths() -> f64 {
    GridSpec::default().densify_half_widths
}

fn yes() -> bool {
    true
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            points_per_band: None,
            points_per_decade: None,
            densify_factor: default_densify(),
            densify_half_widths: default_half_widths(),
            low_freq_guard: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    /// Highest mode index reported.
    #[serde(default = "one_usize")]
    pub n_max: usize,
}

fn one_usize() -> usize {
    1
}

impl Default for ModesConfig {
    fn default() -> Self {
        Self { n_max: 1 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityConfig {
    pub v_max: Option<f64>,
    /// rad².
    pub phi1_sq: Option<f64>,
    #[serde(default = "default_max_order")]
    pub max_order: u32,
    /// CSV of `order,visibility[,sigma]` for fits.
    pub data: Option<String>,
}

fn default_max_order() -> u32 {
    3
}

/// Where relative paths in a configuration are resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Dir(PathBuf),
    /// A profile compiled into the binary; paths name bundled files, then
    /// files relative to the working directory.
    Builtin,
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    pub origin: Origin,
}

/// Applies `key.path=value` overrides to a parsed TOML document.
pub fn apply_overrides(doc: &mut toml::Table, sets: &[String]) -> CliResult<()> {
    for set in sets {
        let (key, raw) = set
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{set}` is not of the form key=value")))?;
        let value = parse_value(raw.trim());
        let path: Vec<&str> = key.trim().split('.').collect();
        if path.iter().any(|p| p.is_empty()) {
            return Err(CliError::Config(format!("override `{set}` has an empty key segment")));
        }
        let mut table = &mut *doc;
        for part in &path[..path.len() - 1] {
            let entry = table
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            table = entry
                .as_table_mut()
                .ok_or_else(|| CliError::Config(format!("override `{set}`: `{part}` is not a table")))?;
        }
        table.insert(path[path.len() - 1].to_string(), value);
    }
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

pub fn parse_config(text: &str, sets: &[String], source: &str) -> CliResult<Config> {
    let mut doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("{source}: {e}")))?;
    apply_overrides(&mut doc, sets)?;
    Config::deserialize(doc).map_err(|e| CliError::Config(format!("{source}: {e}")))
}

/// Reads a configuration file, or a bundled profile by name.
pub fn load(path: Option<&Path>, profile: Option<&str>, sets: &[String]) -> CliResult<LoadedConfig> {
    match (path, profile) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --config or --profile, not both".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let config = parse_config(&text, sets, &path.display().to_string())?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok(LoadedConfig { config, origin: Origin::Dir(dir) })
        }
        (None, Some(name)) => {
            let text = profiles::profile(name).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown profile `{name}` (available: {})",
                    profiles::PROFILE_NAMES.join(", ")
                ))
            })?;
            let config = parse_config(text, sets, &format!("profile `{name}`"))?;
            Ok(LoadedConfig { config, origin: Origin::Builtin })
        }
        (None, None) => Err(CliError::Config(
            "no configuration: pass --config FILE, --profile NAME, or set RAILNOISE_CONFIG".into(),
        )),
    }
}

fn field<T>(path: &str, r: railnoise_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::from_core_at(path, e))
}

impl RailConfig {
    pub fn build(&self) -> CliResult<RailSpec> {
        let material = field("rail", Material::new(self.young_modulus, self.density))?;
        let section = match self.extent {
            Some(h) => field("rail", CrossSection::with_extent(self.area, self.second_moment_y, h))?,
            None => field("rail", CrossSection::new(self.area, self.second_moment_y))?,
        };
        let rail = field("rail", RailSpec::new(material, section, self.half_length))?;
        match self.first_bending_hz {
            Some(nu) => field("rail.first_bending_hz", rail.with_first_bending_frequency(hz_to_omega(nu))),
            None => Ok(rail),
        }
    }
}

impl SuspensionConfig {
    pub fn build(&self) -> CliResult<SuspensionSpec> {
        if let Some(nu) = self.pendular_hz {
            if self.stiffness.is_some() || self.damping.is_some() || self.minus.is_some() || self.plus.is_some() {
                return Err(CliError::Config(
                    "suspension: pendular_hz excludes stiffness, damping, minus and plus".into(),
                ));
            }
            let q = self
                .pendular_q
                .ok_or_else(|| CliError::Config("suspension.pendular_q: required with pendular_hz".into()))?;
            let mass = self
                .mass
                .ok_or_else(|| CliError::Config("suspension.mass: required with pendular_hz".into()))?;
            return field("suspension", SuspensionSpec::from_pendular(mass, hz_to_omega(nu), q));
        }
        if self.pendular_q.is_some() {
            return Err(CliError::Config("suspension.pendular_q: only valid with pendular_hz".into()));
        }
        let shared = match self.stiffness {
            Some(k) => Some(field("suspension", SuspensionEnd::new(k, self.damping.unwrap_or(0.0)))?),
            None => None,
        };
        let end = |name: &str, own: Option<EndConfig>| -> CliResult<SuspensionEnd> {
            match (own, shared) {
                (Some(e), _) => field(&format!("suspension.{name}"), SuspensionEnd::new(e.stiffness, e.damping)),
                (None, Some(s)) => Ok(s),
                (None, None) => Err(CliError::Config(format!(
                    "suspension.{name}: no stiffness given (set suspension.stiffness or [suspension.{name}])"
                ))),
            }
        };
        let minus = end("minus", self.minus)?;
        let plus = end("plus", self.plus)?;
        field("suspension.mass", SuspensionSpec::new(minus, plus, self.mass))
    }
}

impl InterferometerConfig {
    pub fn build(&self, rail: &RailSpec) -> CliResult<InterferometerSpec> {
        let mut spec = field(
            "interferometer",
            InterferometerSpec::new(self.grating_wavevector, self.grating_distance, self.atom_velocity, self.order),
        )?;
        spec.optical_grating_wavevector = self.optical_grating_wavevector;
        field("interferometer", spec.validate(rail))?;
        Ok(spec)
    }
}

impl SynthConfig {
    pub fn segments(&self) -> CliResult<Vec<PowerLawSegment>> {
        if self.segments.is_empty() {
            return Err(CliError::Config("noise.synth.segments: at least one segment required".into()));
        }
        let mut out: Vec<PowerLawSegment> = Vec::with_capacity(self.segments.len());
        for (i, seg) in self.segments.iter().enumerate() {
            let (nu_start, psd_start) = match out.last() {
                Some(prev) => (prev.nu_end, prev.psd_at(prev.nu_end)),
                None => (self.nu_start, self.psd_start),
            };
            let path = format!("noise.synth.segments[{i}]");
            if !(seg.nu_end > nu_start) {
                return Err(CliError::Config(format!("{path}.nu_end: must exceed {nu_start} Hz")));
            }
            let slope = match (seg.slope, seg.psd_end) {
                (Some(s), None) => s,
                (None, Some(end)) if end > 0.0 && psd_start > 0.0 => {
                    (end / psd_start).log10() / (seg.nu_end / nu_start).log10()
                }
                (None, Some(_)) => {
                    return Err(CliError::Config(format!("{path}.psd_end: needs positive end values")))
                }
                _ => return Err(CliError::Config(format!("{path}: give exactly one of slope, psd_end"))),
            };
            out.push(PowerLawSegment { nu_start, nu_end: seg.nu_end, psd_start, slope });
        }
        Ok(out)
    }

    pub fn build(&self) -> CliResult<NoiseSpectrum> {
        field("noise.synth", synth_spectrum(&self.segments()?, self.points_per_decade))
    }
}

impl LoadedConfig {
    pub fn rail(&self) -> CliResult<RailSpec> {
        self.config
            .rail
            .as_ref()
            .ok_or_else(|| CliError::Config("rail: section required for this command".into()))?
            .build()
    }

    pub fn suspension(&self) -> CliResult<SuspensionSpec> {
        self.config
            .suspension
            .as_ref()
            .ok_or_else(|| CliError::Config("suspension: section required for this command".into()))?
            .build()
    }

    pub fn interferometer(&self, rail: &RailSpec) -> CliResult<InterferometerSpec> {
        self.config
            .interferometer
            .as_ref()
            .ok_or_else(|| CliError::Config("interferometer: section required for this command".into()))?
            .build(rail)
    }

    pub fn band(&self) -> CliResult<Band> {
        let b = self
            .config
            .band
            .ok_or_else(|| CliError::Config("band: section required for this command".into()))?;
        field("band", Band::new(b.nu_min, b.nu_max))
    }

    pub fn options(&self) -> CliResult<PhaseNoiseOptions> {
        let g = &self.config.grid;
        let density = match (g.points_per_band, g.points_per_decade) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "grid: give at most one of points_per_band, points_per_decade".into(),
                ))
            }
            (Some(n), None) => GridDensity::PerBand(n),
            (None, Some(n)) => GridDensity::PerDecade(n),
            (None, None) => GridSpec::default().density,
        };
        Ok(PhaseNoiseOptions {
            grid: GridSpec {
                density,
                densify_factor: g.densify_factor,
                densify_half_widths: g.densify_half_widths,
            },
            low_freq_guard: g.low_freq_guard,
        })
    }

    /// Resolves a path named in the configuration to file contents.
    pub fn read_file(&self, name: &str) -> CliResult<String> {
        match &self.origin {
            Origin::Dir(dir) => {
                let path = dir.join(name);
                std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
            }
            // Names not shipped with the profile are taken relative to the
            // working directory.
            Origin::Builtin => match profiles::bundled_file(name) {
                Some(text) => Ok(text.to_string()),
                None => std::fs::read_to_string(name).map_err(|e| CliError::Io(format!("{name}: {e}"))),
            },
        }
    }

    /// Noise spectra for the minus and plus ends.
    pub fn noise(&self) -> CliResult<(NoiseSpectrum, NoiseSpectrum)> {
        let n = self
            .config
            .noise
            .as_ref()
            .ok_or_else(|| CliError::Config("noise: section required for this command".into()))?;
        let load = |key: &str, name: &str| -> CliResult<NoiseSpectrum> {
            let text = self.read_file(name)?;
            load_spectrum(text.as_bytes()).map_err(|e| CliError::from_core_at(&format!("noise.{key} ({name})"), e))
        };
        let (minus, plus) = match (&n.file, &n.minus_file, &n.plus_file, &n.synth) {
            (Some(f), None, None, None) => {
                let s = load("file", f)?;
                (s.clone(), s)
            }
            (None, Some(m), Some(p), None) => (load("minus_file", m)?, load("plus_file", p)?),
            (None, None, None, Some(synth)) => {
                let s = synth.build()?;
                (s.clone(), s)
            }
            _ => {
                return Err(CliError::Config(
                    "noise: give exactly one of file, minus_file+plus_file, or synth".into(),
                ))
            }
        };
        let finish = |s: NoiseSpectrum| -> CliResult<NoiseSpectrum> {
            let s = s.with_interpolation(match n.interpolation {
                InterpolationConfig::LogLog => Interpolation::LogLog,
                InterpolationConfig::Linear => Interpolation::Linear,
            });
            match n.extend_to_hz {
                Some(to) => field("noise.extend_to_hz", s.extended_to(to)),
                None => Ok(s),
            }
        };
        Ok((finish(minus)?, finish(plus)?))
    }
}
