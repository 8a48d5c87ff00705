//! Command-line front end: parses a flat key/value config, applies CLI
//! overrides, dispatches one analysis subcommand, and writes deterministic
//! JSON + CSV data files plus a run manifest.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 runtime or
//! I/O error, 64 usage error.

mod config_file;
mod output;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use config_file::FullConfig;
use output::{fmt_num, Csv, Rendered};
use precollapse::config::ExperimentConfig;
use precollapse::constants::C;
use precollapse::decoherence::{self, CollisionEnvironment};
use precollapse::design;
use precollapse::experiment::{self, NullTestReport};
use precollapse::laser;
use precollapse::quantum::{ScenarioKind, Side};
use precollapse::radiation::{self, EmitterMode, EmitterPair};
use precollapse::spacetime::{self, ExtendedSpeed, Worldline};
use serde::Serialize;
use std::path::PathBuf;

/// Significance level of the simulate subcommand's null test.
const SIGNIFICANCE: f64 = 0.01;

/// Environment variable capping the Monte Carlo worker thread count.
const THREADS_VAR: &str = "PRECOLLAPSE_SIM_THREADS";

#[derive(Parser)]
#[command(
    name = "precollapse",
    version,
    about = "Design and simulate a twin-beam laser-probe test of collapse-front geometry"
)]
struct Cli {
    /// Config file of `key = value` lines; omitted keys keep their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Directory the data files and manifest are written into.
    #[arg(long, global = true, value_name = "DIR", default_value = "precollapse-out")]
    out: PathBuf,

    /// Overrides the config's master seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Overrides the config's scenario: conventional, hk, or speed:<m/s>.
    #[arg(long, global = true, value_name = "SCENARIO")]
    scenario: Option<ScenarioKind>,

    /// Overrides the config's atom count.
    #[arg(long, global = true, value_name = "N")]
    atoms: Option<u64>,

    /// Retunes the separation to the nearest odd-half-wavelength dark fringe.
    #[arg(long, global = true)]
    autotune: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo null experiment and its statistical verdict.
    Simulate,
    /// Scan photon counts over collapse speeds and probe lead times.
    Sweep,
    /// Tabulate twin-emitter dipole radiation patterns.
    Pattern,
    /// Check a beam specification against the experiment's requirements.
    Design,
    /// Tabulate the collapse-front geometry of the configured apparatus.
    Geometry,
    /// Report the photon detector's collision-collapse timescale.
    Decohere,
}

/// Failures routed to their exit codes: configuration problems (2) vs
/// everything that went wrong while computing or writing (3).
enum CliError {
    Config(String),
    Runtime(String),
}

impl From<precollapse::Error> for CliError {
    fn from(err: precollapse::Error) -> CliError {
        CliError::Runtime(err.to_string())
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let usage_ok = matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            return if usage_ok { 0 } else { 64 };
        }
    };
    if let Err(message) = configure_threads() {
        eprintln!("configuration error: {message}");
        return 2;
    }
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Config(message)) => {
            eprintln!("configuration error: {message}");
            2
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            3
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|err| format!("cannot configure the {threads}-thread pool: {err}"))
}

fn load_config(cli: &Cli) -> Result<FullConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|err| {
                CliError::Config(format!("cannot read {}: {err}", path.display()))
            })?;
            config_file::parse(&text).map_err(CliError::Config)?
        }
        None => FullConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.experiment.master_seed = seed;
    }
    if let Some(scenario) = cli.scenario {
        config.experiment.scenario = scenario;
    }
    if let Some(atoms) = cli.atoms {
        config.experiment.atom_count = atoms;
    }
    if cli.autotune {
        let experiment = &mut config.experiment;
        let tuning =
            laser::tune_separation(experiment.separation, experiment.laser_wavelength)
                .map_err(|err| CliError::Config(err.to_string()))?;
        if tuning.adjustment != 0.0 {
            eprintln!(
                "autotune: separation adjusted by {:+e} m to {:?} m (half-wave index {})",
                tuning.adjustment, tuning.separation, tuning.half_wave_index
            );
        }
        experiment.separation = tuning.separation;
    }
    config
        .experiment
        .validate()
        .map_err(|err| CliError::Config(err.to_string()))?;
    config
        .beam
        .validate()
        .map_err(|err| CliError::Config(err.to_string()))?;
    Ok(config)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let config = load_config(&cli)?;
    let canonical = config_file::canonical_text(&config);
    let sha = config_file::sha256_hex(&canonical);
    let (mut rendered, summary) = match cli.command {
        Command::Simulate => render_simulate(&config.experiment)?,
        Command::Sweep => render_sweep(&config.experiment)?,
        Command::Pattern => render_pattern(&config.experiment)?,
        Command::Design => render_design(&config)?,
        Command::Geometry => render_geometry(&config.experiment)?,
        Command::Decohere => render_decohere()?,
    };
    rendered.push(Rendered {
        name: "effective_config.txt",
        content: canonical,
    });
    let written = output::write_all(&cli.out, rendered, sha, config.experiment.master_seed)
        .map_err(CliError::Runtime)?;
    println!("{summary}");
    println!("wrote {} files to {}", written.len(), cli.out.display());
    Ok(())
}

fn json_file(name: &'static str, value: &impl Serialize) -> Result<Rendered, CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|err| CliError::Runtime(format!("cannot serialize {name}: {err}")))?;
    Ok(Rendered {
        name,
        content: text + "\n",
    })
}

fn num(value: f64) -> Result<String, CliError> {
    fmt_num(value).map_err(CliError::Runtime)
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    stats: &'a experiment::ExperimentStats,
    null_test: &'a NullTestReport,
}

fn render_simulate(
    experiment_config: &ExperimentConfig,
) -> Result<(Vec<Rendered>, String), CliError> {
    let (stats, outcomes) = experiment::run_traced(experiment_config)?;
    let hk_twin = ExperimentConfig {
        scenario: ScenarioKind::HellwigKraus,
        ..experiment_config.clone()
    };
    let expected_hk =
        experiment_config.atom_count as f64 * experiment::photon_probability(&hk_twin)?;
    let report = experiment::null_test(
        &stats,
        experiment_config.dark_rate,
        SIGNIFICANCE,
        expected_hk,
    )?;

    let mut trace = Csv::new(&[
        "atom_index",
        "detected_side",
        "excited",
        "photon_emitted",
        "emission_side",
        "emission_time_ns",
    ]);
    for outcome in &outcomes {
        let emission_side = match outcome.emission_side {
            Some(side) => side.to_string(),
            None => "none".to_string(),
        };
        let emission_time_ns = match outcome.emission_time_before_detection {
            Some(seconds) => num(seconds * 1e9)?,
            None => String::new(),
        };
        trace.row([
            outcome.atom_index.to_string(),
            outcome.detected_side.to_string(),
            outcome.excited.to_string(),
            outcome.photon_emitted.to_string(),
            emission_side,
            emission_time_ns,
        ]);
    }

    let summary = format!(
        "simulate [{}]: {} photons from {} atoms ({} dark counts); verdict: {}",
        experiment_config.scenario,
        stats.n_photons,
        stats.n_atoms,
        stats.noise_counts,
        report.verdict
    );
    let files = vec![
        json_file(
            "simulate.json",
            &SimulateReport {
                stats: &stats,
                null_test: &report,
            },
        )?,
        Rendered {
            name: "trace.csv",
            content: trace.into_text(),
        },
    ];
    Ok((files, summary))
}

fn render_sweep(experiment_config: &ExperimentConfig) -> Result<(Vec<Rendered>, String), CliError> {
    let speeds = [
        ExtendedSpeed::Finite(C),
        ExtendedSpeed::Finite(1.5 * C),
        ExtendedSpeed::Finite(2.0 * C),
        ExtendedSpeed::Finite(3.0 * C),
        ExtendedSpeed::Finite(6.0 * C),
        ExtendedSpeed::Infinite,
    ];
    let lead_times = [0.5e-9, 1e-9, 2.5e-9, 5e-9, 7.5e-9, 10e-9];
    let cells = experiment::scenario_sweep(experiment_config, &speeds, &lead_times)?;
    let mut csv = Csv::new(&[
        "scenario",
        "lead_time_s",
        "lead_time_ns",
        "probe_time_s",
        "probe_time_ns",
        "window_s",
        "window_ns",
        "expected_rate",
        "n_photons",
        "n_atoms",
    ]);
    for cell in &cells {
        csv.row([
            cell.scenario.to_string(),
            num(cell.lead_time)?,
            num(cell.lead_time * 1e9)?,
            num(cell.probe_time)?,
            num(cell.probe_time * 1e9)?,
            num(cell.window)?,
            num(cell.window * 1e9)?,
            num(cell.expected_rate)?,
            cell.n_photons.to_string(),
            cell.n_atoms.to_string(),
        ]);
    }
    let summary = format!(
        "sweep: {} cells ({} collapse speeds x {} lead times), {} atoms each",
        cells.len(),
        speeds.len(),
        lead_times.len(),
        experiment_config.atom_count
    );
    let files = vec![
        json_file("sweep.json", &cells)?,
        Rendered {
            name: "sweep.csv",
            content: csv.into_text(),
        },
    ];
    Ok((files, summary))
}

#[derive(Serialize)]
struct PatternScanSummary {
    name: &'static str,
    mode: &'static str,
    relative_phase_rad: f64,
    min_intensity: f64,
    max_intensity: f64,
}

#[derive(Serialize)]
struct PatternReport {
    separation_m: [f64; 3],
    polarization_axis: [f64; 3],
    wavenumber_per_m: f64,
    n_theta: usize,
    n_phi: usize,
    scans: Vec<PatternScanSummary>,
}

fn render_pattern(
    experiment_config: &ExperimentConfig,
) -> Result<(Vec<Rendered>, String), CliError> {
    let separation = [experiment_config.separation, 0.0, 0.0];
    let polarization = [0.0, 1.0, 0.0];
    let wavenumber = std::f64::consts::TAU / experiment_config.laser_wavelength;
    let (n_theta, n_phi) = (73, 72);
    let scans: [(&'static str, &'static str, EmitterMode, f64); 3] = [
        (
            "pattern_incoherent.csv",
            "incoherent",
            EmitterMode::Incoherent,
            0.0,
        ),
        (
            "pattern_coherent_in_phase.csv",
            "coherent",
            EmitterMode::Coherent,
            0.0,
        ),
        (
            "pattern_coherent_opposite_phase.csv",
            "coherent",
            EmitterMode::Coherent,
            std::f64::consts::PI,
        ),
    ];
    let mut files = Vec::new();
    let mut summaries = Vec::new();
    for (file_name, mode_name, mode, relative_phase) in scans {
        let pair = EmitterPair::new(separation, polarization, wavenumber, relative_phase, mode)?;
        let samples = radiation::pattern_scan(&pair, n_theta, n_phi);
        let mut csv = Csv::new(&["theta_rad", "phi_rad", "intensity"]);
        let mut min_intensity = f64::INFINITY;
        let mut max_intensity = f64::NEG_INFINITY;
        for sample in &samples {
            min_intensity = min_intensity.min(sample.intensity);
            max_intensity = max_intensity.max(sample.intensity);
            csv.row([num(sample.theta)?, num(sample.phi)?, num(sample.intensity)?]);
        }
        summaries.push(PatternScanSummary {
            name: file_name,
            mode: mode_name,
            relative_phase_rad: relative_phase,
            min_intensity,
            max_intensity,
        });
        files.push(Rendered {
            name: file_name,
            content: csv.into_text(),
        });
    }
    let report = PatternReport {
        separation_m: separation,
        polarization_axis: polarization,
        wavenumber_per_m: wavenumber,
        n_theta,
        n_phi,
        scans: summaries,
    };
    files.insert(0, json_file("pattern.json", &report)?);
    let summary = format!(
        "pattern: 3 scans of {} directions each (theta x phi = {n_theta} x {n_phi})",
        n_theta * n_phi
    );
    Ok((files, summary))
}

fn render_design(config: &FullConfig) -> Result<(Vec<Rendered>, String), CliError> {
    let report = design::feasibility_report(&config.beam, &config.experiment)?;
    let mut csv = Csv::new(&["quantity", "value"]);
    let mut kv = |key: &str, value: String| {
        csv.row([key.to_string(), value]);
    };
    kv("de_broglie_wavelength_m", num(report.de_broglie_wavelength)?);
    kv("diffraction_angle_rad", num(report.diffraction_angle)?);
    kv("separation_per_pair_m", num(report.separation_per_pair)?);
    kv("achievable_separation_m", num(report.achievable_separation)?);
    kv("target_separation_m", num(report.target_separation)?);
    kv("separation_feasible", report.separation_feasible.to_string());
    kv(
        "grating_pairs_needed",
        match report.grating_pairs_needed {
            Some(pairs) => pairs.to_string(),
            None => "none".to_string(),
        },
    );
    kv("tuned_separation_m", num(report.tuning.separation)?);
    kv("tuned_phase_rad", num(report.tuning.phase)?);
    kv("tuning_parity", format!("{:?}", report.tuning.parity).to_lowercase());
    kv("half_wave_index", report.tuning.half_wave_index.to_string());
    kv("crossing_time_s", num(report.timing.crossing_time)?);
    kv("crossing_time_ns", num(report.timing.crossing_time * 1e9)?);
    kv("precollapse_window_s", num(report.timing.precollapse_window)?);
    kv(
        "precollapse_window_ns",
        num(report.timing.precollapse_window * 1e9)?,
    );
    kv(
        "decay_time_available_s",
        num(report.timing.decay_time_available)?,
    );
    kv(
        "decay_time_available_ns",
        num(report.timing.decay_time_available * 1e9)?,
    );
    kv("decay_efficiency", num(report.timing.decay_efficiency)?);
    kv("shortfall_flag", report.timing.shortfall_flag.to_string());
    kv("detection_time_s", num(report.detection_time)?);
    kv("detection_time_ns", num(report.detection_time * 1e9)?);
    kv("beam_current_limit_per_s", num(report.beam_current_limit)?);
    kv("current_margin", num(report.current_margin)?);
    kv("current_feasible", report.current_feasible.to_string());
    kv(
        "parallelism_tolerance_rad",
        num(report.parallelism_tolerance)?,
    );
    kv("feasible", report.feasible.to_string());
    kv("verdict", report.verdict.clone());
    let summary = format!("design: {}", report.verdict);
    let files = vec![
        json_file("design.json", &report)?,
        Rendered {
            name: "design.csv",
            content: csv.into_text(),
        },
    ];
    Ok((files, summary))
}

#[derive(Serialize)]
struct GeometryReport {
    scenario: ScenarioKind,
    separation_m: f64,
    apex_lead_s: f64,
    scenario_window_s: f64,
    light_front_window_s: f64,
    static_twin_window_s: f64,
    crossing_time_s: f64,
    probe_time_s: f64,
    decay_budget_s: f64,
    /// Fastest collapse front the configured probe lead can still detect.
    discriminable_speed_bound_m_per_s: f64,
    discriminable_speed_bound_over_c: f64,
}

fn render_geometry(
    experiment_config: &ExperimentConfig,
) -> Result<(Vec<Rendered>, String), CliError> {
    let (a, b) = experiment_config.detector_events();
    let apex = spacetime::precollapse_apex(&a, &b)?;
    let apex_lead_s = a.t - apex.t;
    let worldline = experiment_config.peak_worldline(Side::L)?;
    let scenario_window_s = spacetime::precollapse_duration(
        &worldline,
        &a,
        &b,
        experiment_config.scenario.collapse_speed(),
    )?
    .duration;
    let light_front_window_s =
        spacetime::precollapse_duration(&worldline, &a, &b, ExtendedSpeed::Finite(C))?.duration;
    let static_worldline = Worldline::new(a, [0.0, 0.0, 0.0])?;
    let static_twin_window_s =
        spacetime::precollapse_duration(&static_worldline, &a, &b, ExtendedSpeed::Finite(C))?
            .duration;
    let crossing_time_s = experiment_config.focal_spot_width / experiment_config.beam_speed;
    let probe_time_s = experiment_config.probe_time_before_detection();
    let decay_budget_s = experiment_config.decay_time_available();
    let bound =
        spacetime::collapse_speed_bound(experiment_config.separation, probe_time_s)?;
    let report = GeometryReport {
        scenario: experiment_config.scenario,
        separation_m: experiment_config.separation,
        apex_lead_s,
        scenario_window_s,
        light_front_window_s,
        static_twin_window_s,
        crossing_time_s,
        probe_time_s,
        decay_budget_s,
        discriminable_speed_bound_m_per_s: bound,
        discriminable_speed_bound_over_c: bound / C,
    };
    let mut csv = Csv::new(&["quantity", "seconds", "nanoseconds"]);
    for (key, seconds) in [
        ("apex_lead", apex_lead_s),
        ("scenario_window", scenario_window_s),
        ("light_front_window", light_front_window_s),
        ("static_twin_window", static_twin_window_s),
        ("spot_crossing_time", crossing_time_s),
        ("probe_lead_time", probe_time_s),
        ("decay_time_available", decay_budget_s),
    ] {
        csv.row([key.to_string(), num(seconds)?, num(seconds * 1e9)?]);
    }
    let summary = format!(
        "geometry [{}]: apex lead {:.4} ns, static twin-peak window {:.4} ns, \
         scenario window {:.4} ns",
        experiment_config.scenario,
        apex_lead_s * 1e9,
        static_twin_window_s * 1e9,
        scenario_window_s * 1e9
    );
    let files = vec![
        json_file("geometry.json", &report)?,
        Rendered {
            name: "geometry.csv",
            content: csv.into_text(),
        },
    ];
    Ok((files, summary))
}

#[derive(Serialize)]
struct DecoherenceReport {
    atom_mass_kg: f64,
    atom_speed_m_per_s: f64,
    mean_free_path_m: f64,
    phase_threshold_rad: f64,
    collision_interval_s: f64,
    kinetic_energy_j: f64,
    phase_step_rad: f64,
    collisions_to_collapse: u64,
    time_to_collapse_s: f64,
    time_to_collapse_ns: f64,
    residual_coherence: f64,
}

fn render_decohere() -> Result<(Vec<Rendered>, String), CliError> {
    let env = CollisionEnvironment::sodium_detector();
    let collision_interval_s = env.collision_interval();
    let kinetic_energy_j = env.kinetic_energy();
    let phase_step_rad = decoherence::phase_step(kinetic_energy_j, collision_interval_s);
    let time_to_collapse_s = decoherence::time_to_collapse(&env)?;
    let collisions_to_collapse = (time_to_collapse_s / collision_interval_s).round() as u64;
    let residual_coherence = decoherence::coherence_after(collisions_to_collapse, phase_step_rad);
    let report = DecoherenceReport {
        atom_mass_kg: env.atom_mass,
        atom_speed_m_per_s: env.atom_speed,
        mean_free_path_m: env.mean_free_path,
        phase_threshold_rad: env.phase_threshold,
        collision_interval_s,
        kinetic_energy_j,
        phase_step_rad,
        collisions_to_collapse,
        time_to_collapse_s,
        time_to_collapse_ns: time_to_collapse_s * 1e9,
        residual_coherence,
    };
    let mut csv = Csv::new(&["quantity", "value"]);
    csv.row(["atom_mass_kg".to_string(), num(report.atom_mass_kg)?]);
    csv.row([
        "atom_speed_m_per_s".to_string(),
        num(report.atom_speed_m_per_s)?,
    ]);
    csv.row([
        "mean_free_path_m".to_string(),
        num(report.mean_free_path_m)?,
    ]);
    csv.row([
        "phase_threshold_rad".to_string(),
        num(report.phase_threshold_rad)?,
    ]);
    csv.row([
        "collision_interval_s".to_string(),
        num(report.collision_interval_s)?,
    ]);
    csv.row(["kinetic_energy_j".to_string(), num(report.kinetic_energy_j)?]);
    csv.row(["phase_step_rad".to_string(), num(report.phase_step_rad)?]);
    csv.row([
        "collisions_to_collapse".to_string(),
        report.collisions_to_collapse.to_string(),
    ]);
    csv.row([
        "time_to_collapse_s".to_string(),
        num(report.time_to_collapse_s)?,
    ]);
    csv.row([
        "time_to_collapse_ns".to_string(),
        num(report.time_to_collapse_ns)?,
    ]);
    csv.row([
        "residual_coherence".to_string(),
        num(report.residual_coherence)?,
    ]);
    let summary = format!(
        "decohere: the detector's photon state collapses in {:.4} ns \
         ({} collision(s), {:.2} rad per collision)",
        report.time_to_collapse_ns, report.collisions_to_collapse, report.phase_step_rad
    );
    let files = vec![
        json_file("decohere.json", &report)?,
        Rendered {
            name: "decohere.csv",
            content: csv.into_text(),
        },
    ];
    Ok((files, summary))
}
