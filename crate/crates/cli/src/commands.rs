//! One function per subcommand; each returns the report printed on stdout.

use std::path::{Path, PathBuf};

use railnoise_core::noise::write_spectrum;
use railnoise_core::{
    find_bending_modes, fit_visibility, hz_to_omega, mode_q_factors, omega_to_hz, optical_phase,
    pendular_modes, phase_noise_spectrum, solve_amplitudes, visibility, Complex64, PhaseNoiseResult,
    SuspensionSpec, VisibilityModel, VisibilityPoint,
};

use crate::config::LoadedConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Format, Report};

pub fn modes(cfg: &LoadedConfig, n_max: Option<usize>, damping_for_q: Option<f64>) -> CliResult<Report> {
    let rail = cfg.rail()?;
    let n_max = n_max.unwrap_or(cfg.config.modes.n_max);
    let mut solution = find_bending_modes(&rail, n_max)?;
    let suspension = match &cfg.config.suspension {
        Some(s) => Some(s.build()?),
        None => None,
    };
    let mass = suspension.as_ref().map_or(rail.half_mass(), |s| s.mass(&rail));
    let damping = suspension
        .as_ref()
        .map_or(0.0, |s| 0.5 * (s.minus_end.damping + s.plus_end.damping));
    if damping > 0.0 {
        solution = mode_q_factors(&rail, mass, damping, &solution)?;
    }

    let mut columns = vec!["n", "parity", "kappa_l", "nu_hz", "ratio_to_nu0", "q"];
    if damping_for_q.is_some() {
        columns.push("damping_for_q_kg_per_s");
    }
    let mut report = Report::new(&columns)
        .meta("nu0_closed_form_hz", omega_to_hz(rail.omega0_closed_form()))
        .meta("nu0_hz", omega_to_hz(solution.omega0))
        .meta("period_t0_s", solution.period_t0)
        .meta("mass_kg", mass)
        .meta("damping_kg_per_s", damping);
    for mode in &solution.modes {
        let mut row = vec![
            Cell::from(mode.index),
            Cell::from(mode.parity.to_string()),
            Cell::from(mode.kappa_l(&rail)),
            Cell::from(omega_to_hz(mode.omega)),
            Cell::from(mode.omega / solution.omega0),
            Cell::from(mode.q_factor),
        ];
        if let Some(q) = damping_for_q {
            row.push(Cell::from(mode.damping_for_q(&rail, mass, q)?));
        }
        report.push(row);
    }
    Ok(report)
}

pub fn pendular(cfg: &LoadedConfig) -> CliResult<Report> {
    let rail = cfg.rail()?;
    let suspension = cfg.suspension()?;
    let mut report = Report::new(&["convention", "mass_kg", "nu_osc_hz", "nu_rot_hz", "q_osc", "q_rot"]);
    let mut row = |label: &str, s: &SuspensionSpec| -> CliResult<()> {
        let m = pendular_modes(&rail, s)?;
        report.push(vec![
            label.into(),
            s.mass(&rail).into(),
            omega_to_hz(m.omega_osc).into(),
            omega_to_hz(m.omega_rot).into(),
            m.q_osc.into(),
            m.q_rot.into(),
        ]);
        Ok(())
    };
    row("configured", &suspension)?;
    if suspension.mass_override.is_some() {
        // Same supports carrying only the rail's own half mass rho*A*L.
        let strict = SuspensionSpec { mass_override: None, ..suspension };
        row("rail", &strict)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EndArg {
    Minus,
    Plus,
}

/// Log-spaced frequencies including both ends.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * (step * i as f64).exp(),
        })
        .collect()
}

pub fn response(
    cfg: &LoadedConfig,
    nu_min: Option<f64>,
    nu_max: Option<f64>,
    points: usize,
    end: EndArg,
) -> CliResult<Report> {
    let rail = cfg.rail()?;
    let suspension = cfg.suspension()?;
    let band = cfg.config.band;
    let lo = nu_min.or(band.map(|b| b.nu_min)).unwrap_or(1.0);
    let hi = nu_max.or(band.map(|b| b.nu_max)).unwrap_or(2000.0);
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Config(format!("response: invalid frequency range [{lo}, {hi}] Hz")));
    }
    let (xm, xp) = match end {
        EndArg::Minus => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        EndArg::Plus => (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    };
    let mut report = Report::new(&["nu_hz", "kappa_l", "a_re", "a_im", "b_re", "b_im", "a_abs2", "b_abs2"])
        .meta("driven_end", match end {
            EndArg::Minus => "minus",
            EndArg::Plus => "plus",
        });
    for nu in log_grid(lo, hi, points) {
        let amps = solve_amplitudes(&rail, &suspension, hz_to_omega(nu), xm, xp)?;
        report.push(vec![
            nu.into(),
            amps.kappa_l().into(),
            amps.a.re.into(),
            amps.a.im.into(),
            amps.b.re.into(),
            amps.b.im.into(),
            amps.a.norm_sqr().into(),
            amps.b.norm_sqr().into(),
        ]);
    }
    Ok(report)
}

fn run_phase_noise(cfg: &LoadedConfig) -> CliResult<(PhaseNoiseResult, u32, Option<f64>)> {
    let rail = cfg.rail()?;
    let suspension = cfg.suspension()?;
    let ifm = cfg.interferometer(&rail)?;
    let (minus, plus) = cfg.noise()?;
    let band = cfg.band()?;
    let options = cfg.options()?;
    let result = phase_noise_spectrum(&rail, &suspension, &ifm, &minus, &plus, band, &options)?;
    Ok((result, ifm.order, ifm.optical_grating_wavevector))
}

fn summary(result: &PhaseNoiseResult, order: u32, k_opt: Option<f64>) -> Report {
    let p2 = f64::from(order).powi(2);
    let mut report = Report::new(&[])
        .meta("nu_min_hz", result.band.lo)
        .meta("nu_max_hz", result.band.hi)
        .meta("points", result.spectrum.len())
        .meta("order", order)
        .meta("mean_square_total_rad2_per_p2", result.mean_square_total)
        .meta("mean_square_sagnac_rad2_per_p2", result.mean_square_sagnac)
        .meta("sagnac_share", result.sagnac_share())
        .meta("mean_square_total_rad2", result.mean_square_total * p2)
        .meta("rms_bending_m", result.rms_bending());
    if let Some(k) = k_opt {
        report = report.meta("optical_phase_rms_rad", optical_phase(result.rms_bending(), order, k));
    }
    report
}

pub fn phase_noise(cfg: &LoadedConfig, output_dir: &Path, format: Format) -> CliResult<Report> {
    let (result, order, k_opt) = run_phase_noise(cfg)?;
    let mut table = Report::new(&[
        "nu_hz",
        "phi2_total_rad2_per_hz",
        "phi2_sagnac_rad2_per_hz",
        "delta2_m2_per_hz",
        "psd_minus_m2_per_hz",
        "psd_plus_m2_per_hz",
    ]);
    for p in &result.spectrum {
        table.push(vec![
            p.nu.into(),
            p.phi2_total.into(),
            p.phi2_sagnac.into(),
            p.delta2.into(),
            p.psd_minus.into(),
            p.psd_plus.into(),
        ]);
    }
    std::fs::create_dir_all(output_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", output_dir.display())))?;
    let spectrum_path = output_dir.join(format!("phase_noise.{}", format.extension()));
    write_report(&table, format, &spectrum_path)?;
    let summary = summary(&result, order, k_opt);
    write_report(&summary, Format::Json, &output_dir.join("summary.json"))?;
    Ok(summary)
}

fn write_report(report: &Report, format: Format, path: &Path) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    report.write(format, &mut out)?;
    std::io::Write::flush(&mut out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn rms_bending(cfg: &LoadedConfig) -> CliResult<Report> {
    let (result, order, k_opt) = run_phase_noise(cfg)?;
    let rms = result.rms_bending();
    let mut report = Report::new(&[])
        .meta("nu_min_hz", result.band.lo)
        .meta("nu_max_hz", result.band.hi)
        .meta("rms_bending_m", rms);
    if let Some(k) = k_opt {
        report = report
            .meta("order", order)
            .meta("optical_phase_rms_rad", optical_phase(rms, order, k));
    }
    Ok(report)
}

/// Visibility data: `order,visibility[,sigma]` rows, `#` comments, optional
/// header.
pub fn read_visibility_data(text: &str, source: &str) -> CliResult<Vec<VisibilityPoint>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{source}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let order = record.get(0).unwrap_or("").parse::<u32>();
        if i == 0 && order.is_err() {
            continue; // header
        }
        let bad = |what: &str| CliError::Config(format!("{source}: line {line}: invalid {what}"));
        let order = order.map_err(|_| bad("order"))?;
        let visibility = record
            .get(1)
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| bad("visibility"))?;
        let sigma = match record.get(2) {
            None | Some("") => None,
            Some(s) => Some(s.parse::<f64>().map_err(|_| bad("sigma"))?),
        };
        points.push(VisibilityPoint { order, visibility, sigma });
    }
    Ok(points)
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Data named on the command line, or else by the configuration.
fn visibility_data(cfg: Option<&LoadedConfig>, data: Option<&Path>) -> CliResult<Option<Vec<VisibilityPoint>>> {
    if let Some(path) = data {
        return read_visibility_data(&read_text(path)?, &path.display().to_string()).map(Some);
    }
    match cfg.and_then(|c| c.config.visibility.as_ref().and_then(|v| v.data.clone()).map(|d| (c, d))) {
        Some((c, name)) => read_visibility_data(&c.read_file(&name)?, &name).map(Some),
        None => Ok(None),
    }
}

pub fn visibility_forward(
    cfg: Option<&LoadedConfig>,
    v_max: Option<f64>,
    phi1_sq: Option<f64>,
    max_order: Option<u32>,
) -> CliResult<Report> {
    let vis_cfg = cfg.and_then(|c| c.config.visibility.as_ref());
    let v_max = v_max
        .or(vis_cfg.and_then(|v| v.v_max))
        .ok_or_else(|| CliError::Config("visibility.v_max: required (flag or config)".into()))?;
    let phi1_sq = phi1_sq
        .or(vis_cfg.and_then(|v| v.phi1_sq))
        .ok_or_else(|| CliError::Config("visibility.phi1_sq: required (flag or config)".into()))?;
    let max_order = max_order.or(vis_cfg.map(|v| v.max_order)).unwrap_or(3);
    let model = VisibilityModel::new(v_max, phi1_sq).map_err(|e| CliError::from_core_at("visibility", e))?;
    let mut report = Report::new(&["order", "visibility"]).meta("v_max", v_max).meta("phi1_sq_rad2", phi1_sq);
    for p in 0..=max_order {
        report.push(vec![p.into(), visibility(&model, p).into()]);
    }
    Ok(report)
}

pub fn visibility_fit(cfg: Option<&LoadedConfig>, data: Option<&Path>) -> CliResult<Report> {
    let points = visibility_data(cfg, data)?
        .ok_or_else(|| CliError::Config("visibility fit: pass --data FILE or set visibility.data".into()))?;
    let model = fit_visibility(&points)?;
    let mut report = Report::new(&["v_max", "v_max_sigma", "phi1_sq_rad2", "phi1_sq_sigma_rad2", "points"]);
    report.push(vec![
        model.v_max.into(),
        model.v_max_sigma.into(),
        model.phi1_sq.into(),
        model.phi1_sq_sigma.into(),
        points.len().into(),
    ]);
    Ok(report)
}

pub struct CompareArgs {
    pub predicted: Option<f64>,
    pub summary: Option<PathBuf>,
    pub data: Option<PathBuf>,
    pub phi1_sq: Option<f64>,
}

pub fn visibility_compare(cfg: Option<&LoadedConfig>, args: &CompareArgs) -> CliResult<Report> {
    let predicted = match (args.predicted, &args.summary) {
        (Some(v), None) => v,
        (None, Some(path)) => {
            let text = read_text(path)?;
            let json: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            json.get("mean_square_total_rad2_per_p2")
                .and_then(serde_json::Value::as_f64)
                .ok_or_else(|| {
                    CliError::Config(format!("{}: no mean_square_total_rad2_per_p2", path.display()))
                })?
        }
        _ => {
            return Err(CliError::Config(
                "visibility compare: give exactly one of --predicted, --summary".into(),
            ))
        }
    };
    let (fitted, sigma) = if let Some(v) = args.phi1_sq {
        if args.data.is_some() {
            return Err(CliError::Config(
                "visibility compare: give either --phi1-sq or --data, not both".into(),
            ));
        }
        (v, None)
    } else if let Some(points) = visibility_data(cfg, args.data.as_deref())? {
        let model = fit_visibility(&points)?;
        (model.phi1_sq, model.phi1_sq_sigma)
    } else {
        match cfg.and_then(|c| c.config.visibility.as_ref()).and_then(|v| v.phi1_sq) {
            Some(v) => (v, None),
            None => {
                return Err(CliError::Config(
                    "visibility compare: give --phi1-sq, --data, or visibility.phi1_sq".into(),
                ))
            }
        }
    };
    if !(fitted > 0.0) {
        return Err(CliError::Config("visibility compare: fitted phi1_sq must be > 0".into()));
    }
    let mut report = Report::new(&["predicted_phi1_sq_rad2", "fitted_phi1_sq_rad2", "fitted_sigma_rad2", "ratio"]);
    report.push(vec![predicted.into(), fitted.into(), sigma.into(), (predicted / fitted).into()]);
    Ok(report)
}

pub fn synth_noise(cfg: &LoadedConfig, comments: &[String], format: Format) -> CliResult<Vec<u8>> {
    let synth = cfg
        .config
        .noise
        .as_ref()
        .and_then(|n| n.synth.as_ref())
        .ok_or_else(|| CliError::Config("noise.synth: section required for this command".into()))?;
    let spectrum = synth.build()?;
    let mut out = Vec::new();
    match format {
        Format::Csv => {
            for c in comments {
                for line in c.lines() {
                    std::io::Write::write_all(&mut out, format!("# {line}\n").as_bytes())?;
                }
            }
            write_spectrum(&spectrum, &mut out)?;
        }
        Format::Json => {
            let mut report = Report::new(&["freq_hz", "psd_m2_per_hz"]);
            for s in spectrum.samples() {
                report.push(vec![s.nu.into(), s.psd.into()]);
            }
            report.write(Format::Json, &mut out)?;
        }
    }
    Ok(out)
}
