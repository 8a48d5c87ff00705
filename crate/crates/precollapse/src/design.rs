//! Apparatus design calculators: matter-wave diffraction, the timing budget
//! of the probe-and-decay sequence, beam-current limits, and a combined
//! feasibility report for a beam/interferometer specification.

use crate::config::{BeamSpec, ExperimentConfig};
use crate::constants::{C, PLANCK_H};
use crate::decoherence::{self, CollisionEnvironment};
use crate::error::{Error, Result};
use crate::laser::{self, SeparationTuning};
use crate::quantum::Side;
use crate::spacetime::{self, ExtendedSpeed};
use serde::Serialize;

/// Safety factor between the optical wavelength and the path-length drift
/// the two probe spots may accumulate: drift is held to a tenth of a
/// wavelength so the interference contrast stays essentially perfect.
pub const SEPARATION_DRIFT_MARGIN: f64 = 10.0;

/// De Broglie wavelength of a particle, m.
pub fn de_broglie(mass: f64, speed: f64) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::config(
            "species_mass_kg",
            format!("must be > 0 and finite, got {mass}"),
        ));
    }
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::config(
            "species_speed_m_per_s",
            format!("must be > 0 and finite, got {speed}"),
        ));
    }
    Ok(PLANCK_H / (mass * speed))
}

/// Diffraction angle of the given order off a transmission grating, rad.
///
/// Order zero passes straight through; an order whose sine would exceed
/// unity does not propagate.
pub fn diffraction_angle(wavelength: f64, grating_period: f64, order: u32) -> Result<f64> {
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::config(
            "wavelength",
            format!("must be > 0 and finite, got {wavelength}"),
        ));
    }
    if !(grating_period > 0.0 && grating_period.is_finite()) {
        return Err(Error::config(
            "grating_period_m",
            format!("must be > 0 and finite, got {grating_period}"),
        ));
    }
    if order == 0 {
        return Ok(0.0);
    }
    let sine = order as f64 * wavelength / grating_period;
    if sine >= 1.0 {
        return Err(Error::EvanescentOrder { order });
    }
    Ok(sine.asin())
}

/// How the light-speed pre-collapse window divides between spot crossing
/// and spontaneous decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingReport {
    /// Time an atom spends inside the focal spot, s.
    pub crossing_time: f64,
    /// Light-front pre-collapse window of the configured geometry, s —
    /// the design target, whatever scenario a run later probes.
    pub precollapse_window: f64,
    /// Decay time left before detection when the spot is placed as late as
    /// the window allows (entry on the window edge), s.
    pub decay_time_available: f64,
    /// Fraction of excitations that decay in the available time.
    pub decay_efficiency: f64,
    /// Whether the crossing plus one lifetime overflow the window — the
    /// regime where the decay is necessarily truncated.
    pub shortfall_flag: bool,
}

/// Computes the timing budget of a configuration against the light-speed
/// collapse front.
pub fn timing_budget(config: &ExperimentConfig) -> Result<TimingReport> {
    config.validate()?;
    let crossing_time = config.focal_spot_width / config.beam_speed;
    let (a, b) = config.detector_events();
    let worldline = config.peak_worldline(Side::L)?;
    let precollapse_window =
        spacetime::precollapse_duration(&worldline, &a, &b, ExtendedSpeed::Finite(C))?.duration;
    let decay_time_available = (precollapse_window - 0.5 * crossing_time).max(0.0);
    let decay_efficiency = laser::decay_probability(decay_time_available, config.lifetime);
    let shortfall_flag = crossing_time + config.lifetime > precollapse_window;
    Ok(TimingReport {
        crossing_time,
        precollapse_window,
        decay_time_available,
        decay_efficiency,
        shortfall_flag,
    })
}

/// Highest atom flux that keeps, on average, at most one atom inside the
/// photon detector's collapse time, atoms/s.
pub fn beam_current_limit(detection_time: f64) -> Result<f64> {
    if !(detection_time > 0.0 && detection_time.is_finite()) {
        return Err(Error::config(
            "detection_time",
            format!("must be > 0 and finite, got {detection_time}"),
        ));
    }
    Ok(1.0 / detection_time)
}

/// Largest tilt between the two probe spots' wavefronts that keeps their
/// path-length difference within the drift margin across the spot, rad.
pub fn parallelism_tolerance(focal_spot_width: f64, wavelength: f64) -> Result<f64> {
    if !(focal_spot_width > 0.0 && focal_spot_width.is_finite()) {
        return Err(Error::config(
            "focal_spot_width_m",
            format!("must be > 0 and finite, got {focal_spot_width}"),
        ));
    }
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::config(
            "laser_wavelength_m",
            format!("must be > 0 and finite, got {wavelength}"),
        ));
    }
    Ok(wavelength / SEPARATION_DRIFT_MARGIN / focal_spot_width)
}

/// Everything the feasibility check measured, plus the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// Matter wavelength of the beam species, m.
    pub de_broglie_wavelength: f64,
    /// First separation stage's diffraction angle, rad.
    pub diffraction_angle: f64,
    /// Transverse separation one grating pair builds over the arm, m.
    pub separation_per_pair: f64,
    /// Separation the specified number of pairs reaches, m.
    pub achievable_separation: f64,
    /// Separation the experiment asks for, m.
    pub target_separation: f64,
    pub separation_feasible: bool,
    /// Pairs required to reach the target, when any number would do.
    pub grating_pairs_needed: Option<u64>,
    /// Dark-fringe tuning at the target separation.
    pub tuning: SeparationTuning,
    pub timing: TimingReport,
    /// Collision-collapse time of the photon detector, s.
    pub detection_time: f64,
    /// Flux ceiling the detection time imposes, atoms/s.
    pub beam_current_limit: f64,
    /// Ratio of that ceiling to the requested flux.
    pub current_margin: f64,
    pub current_feasible: bool,
    /// Spot-to-spot wavefront tilt the probe optics must hold, rad.
    pub parallelism_tolerance: f64,
    pub feasible: bool,
    pub verdict: String,
}

/// Checks whether a beam specification can realize an experiment
/// configuration: enough transverse separation, and a beam current the
/// photon detector can resolve atom by atom.
pub fn feasibility_report(spec: &BeamSpec, config: &ExperimentConfig) -> Result<FeasibilityReport> {
    spec.validate()?;
    config.validate()?;
    let de_broglie_wavelength = de_broglie(spec.species_mass, spec.species_speed)?;
    let diffraction_angle =
        diffraction_angle(de_broglie_wavelength, spec.grating_period, spec.diffraction_order)?;
    // One pair diffracts the beams apart and back parallel: the transverse
    // gain is collected over the full arm, on both beams.
    let separation_per_pair = 2.0 * spec.arm_length * diffraction_angle.tan();
    let achievable_separation = separation_per_pair * spec.grating_pairs as f64;
    let target_separation = config.separation;
    let separation_feasible = achievable_separation >= target_separation;
    let grating_pairs_needed = (separation_per_pair > 0.0)
        .then(|| (target_separation / separation_per_pair).ceil() as u64);
    let tuning = laser::tune_separation(target_separation, config.laser_wavelength)?;
    let timing = timing_budget(config)?;
    let detection_time = decoherence::time_to_collapse(&CollisionEnvironment::sodium_detector())?;
    let beam_current_limit = beam_current_limit(detection_time)?;
    let current_margin = beam_current_limit / config.flux;
    let current_feasible = current_margin >= 1.0;
    let parallelism_tolerance =
        parallelism_tolerance(config.focal_spot_width, config.laser_wavelength)?;
    let feasible = separation_feasible && current_feasible;
    let verdict = if feasible {
        format!(
            "feasible: {} grating pair(s) deliver {achievable_separation:.3e} m against the \
             {target_separation:.3e} m target, and the flux sits {current_margin:.1e}x under \
             the detector's atom-by-atom limit",
            spec.grating_pairs
        )
    } else {
        let mut blockers = Vec::new();
        if !separation_feasible {
            let remedy = match grating_pairs_needed {
                Some(pairs) => format!("{pairs} pair(s) would be needed"),
                None => "no number of pairs reaches it".to_string(),
            };
            blockers.push(format!(
                "separation shortfall: {} pair(s) reach {achievable_separation:.3e} m of the \
                 {target_separation:.3e} m target ({remedy})",
                spec.grating_pairs
            ));
        }
        if !current_feasible {
            blockers.push(format!(
                "beam current too high: flux {:.3e} atoms/s exceeds the \
                 {beam_current_limit:.3e} atoms/s detection limit",
                config.flux
            ));
        }
        format!("infeasible: {}", blockers.join("; "))
    };
    Ok(FeasibilityReport {
        de_broglie_wavelength,
        diffraction_angle,
        separation_per_pair,
        achievable_separation,
        target_separation,
        separation_feasible,
        grating_pairs_needed,
        tuning,
        timing,
        detection_time,
        beam_current_limit,
        current_margin,
        current_feasible,
        parallelism_tolerance,
        feasible,
        verdict,
    })
}
