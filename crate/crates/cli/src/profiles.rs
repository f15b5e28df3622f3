//! Configuration profiles and data files compiled into the binary.

pub const PROFILE_NAMES: &[&str] = &["paper", "paper-noise", "seismic-synth"];

pub fn profile(name: &str) -> Option<&'static str> {
    match name {
        "paper" => Some(include_str!("../profiles/paper.toml")),
        "paper-noise" => Some(include_str!("../profiles/paper_noise.toml")),
        "seismic-synth" => Some(include_str!("../profiles/seismic_synth.toml")),
        _ => None,
    }
}

/// Files referenced by the bundled profiles.
pub fn bundled_file(name: &str) -> Option<&'static str> {
    match name {
        "seismic_example.csv" => Some(include_str!("../profiles/seismic_example.csv")),
        _ => None,
    }
}
