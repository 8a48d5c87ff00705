//! The full parameter set of the twin-beam apparatus, with validation and
//! the derived geometry the other modules consume.
//!
//! Geometry convention (lab frame): the two beams travel along +z at the
//! beam speed, separated along x, and both detectors fire at `t = 0` at
//! `x = ∓D/2`. The probe laser crosses the beams transversally — along +x
//! when not oblique — a lead time before detection.

use crate::constants::{C, SODIUM_D_LINE_M, SODIUM_LIFETIME_S, SODIUM_MASS_KG};
use crate::error::{Error, Result};
use crate::laser::{self, LaserProbe, SeparationTuning};
use crate::quantum::{ScenarioKind, Side};
use crate::spacetime::{Event, Worldline};
use serde::{Deserialize, Serialize};

/// Everything the simulator needs to run the null experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Atomic beam speed, m/s.
    pub beam_speed: f64,
    /// Beam-to-beam separation, m. The default is the paper-of-record 3 m
    /// target retuned to the nearest odd half wavelength so the coherent
    /// state sits exactly on the dark fringe.
    pub separation: f64,
    /// Probe wavelength, m.
    pub laser_wavelength: f64,
    /// Lead time from focal-spot *exit* to detection, s.
    pub laser_lead_time: f64,
    /// Focal-spot width along the beams, m.
    pub focal_spot_width: f64,
    /// Peak single-beam excitation probability per crossing.
    pub peak_excitation: f64,
    /// Excited-state lifetime, s.
    pub lifetime: f64,
    /// Angle between the probe propagation direction and the separation
    /// axis, rad. The interference phase uses the projected separation.
    pub laser_obliquity: f64,
    /// Probability that a detection actually fires its collapse front.
    pub detector_efficiency: f64,
    /// Photon-detector dark-count rate, 1/s.
    pub dark_rate: f64,
    /// Number of atoms to simulate.
    pub atom_count: u64,
    /// Beam current, atoms/s; sets the run duration for dark counts.
    pub flux: f64,
    /// Collapse hypothesis to simulate.
    pub scenario: ScenarioKind,
    /// Master seed of the per-atom random streams.
    pub master_seed: u64,
    /// Evaluate coherence at focal-spot entry instead of mid-spot
    /// (worst-case placement for sensitivity studies).
    pub evaluate_at_spot_entry: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let tuned = laser::tune_separation(3.0, SODIUM_D_LINE_M)
            .expect("nominal tuning cannot fail")
            .separation;
        ExperimentConfig {
            beam_speed: 3000.0,
            separation: tuned,
            laser_wavelength: SODIUM_D_LINE_M,
            laser_lead_time: 5e-9,
            focal_spot_width: 15e-6,
            peak_excitation: 1.0,
            lifetime: SODIUM_LIFETIME_S,
            laser_obliquity: 0.0,
            detector_efficiency: 1.0,
            dark_rate: 0.0,
            atom_count: 100_000,
            flux: 1e7,
            scenario: ScenarioKind::HellwigKraus,
            master_seed: 0,
            evaluate_at_spot_entry: false,
        }
    }
}

impl ExperimentConfig {
    /// Checks every field against its physical range; the error names the
    /// offending field and the valid range.
    pub fn validate(&self) -> Result<()> {
        if !(self.beam_speed > 0.0 && self.beam_speed < C) {
            return Err(Error::config(
                "beam_speed_m_per_s",
                format!("must be in (0, c), got {}", self.beam_speed),
            ));
        }
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::config(
                "separation_m",
                format!("must be > 0 and finite, got {}", self.separation),
            ));
        }
        if !(self.laser_wavelength > 0.0 && self.laser_wavelength.is_finite()) {
            return Err(Error::config(
                "laser_wavelength_m",
                format!("must be > 0 and finite, got {}", self.laser_wavelength),
            ));
        }
        if !(self.laser_lead_time >= 0.0 && self.laser_lead_time.is_finite()) {
            return Err(Error::config(
                "laser_lead_time_s",
                format!("must be ≥ 0 and finite, got {}", self.laser_lead_time),
            ));
        }
        if !(self.focal_spot_width > 0.0 && self.focal_spot_width.is_finite()) {
            return Err(Error::config(
                "focal_spot_width_m",
                format!("must be > 0 and finite, got {}", self.focal_spot_width),
            ));
        }
        if !(0.0..=1.0).contains(&self.peak_excitation) {
            return Err(Error::config(
                "peak_excitation_p0",
                format!("must be in [0, 1], got {}", self.peak_excitation),
            ));
        }
        if !(self.lifetime > 0.0 && self.lifetime.is_finite()) {
            return Err(Error::config(
                "lifetime_s",
                format!("must be > 0 and finite, got {}", self.lifetime),
            ));
        }
        if !(0.0..std::f64::consts::FRAC_PI_2).contains(&self.laser_obliquity) {
            return Err(Error::config(
                "laser_obliquity_rad",
                format!("must be in [0, π/2), got {}", self.laser_obliquity),
            ));
        }
        if !(0.0..=1.0).contains(&self.detector_efficiency) {
            return Err(Error::config(
                "detector_efficiency",
                format!("must be in [0, 1], got {}", self.detector_efficiency),
            ));
        }
        if !(self.dark_rate >= 0.0 && self.dark_rate.is_finite()) {
            return Err(Error::config(
                "dark_rate_per_s",
                format!("must be ≥ 0 and finite, got {}", self.dark_rate),
            ));
        }
        if self.atom_count == 0 {
            return Err(Error::config("atom_count", "must be ≥ 1".to_string()));
        }
        if !(self.flux > 0.0 && self.flux.is_finite()) {
            return Err(Error::config(
                "flux_per_s",
                format!("must be > 0 and finite, got {}", self.flux),
            ));
        }
        if let ScenarioKind::FiniteSpeed(s) = self.scenario {
            if !(s > C) {
                return Err(Error::InvalidCollapseSpeed { speed: s });
            }
        }
        // A coherent atom on the bright side of the fringe must not saturate:
        // its excitation probability is p0·(1 + cos φ).
        let phase = self.tuning()?.phase;
        let coherent_peak = self.peak_excitation * (1.0 + phase.cos());
        if coherent_peak > 1.0 {
            return Err(Error::config(
                "peak_excitation_p0",
                format!(
                    "coherent excitation would reach {coherent_peak:.3} > 1 at this tuning; \
                     lower p0 to at most {:.3}",
                    1.0 / (1.0 + phase.cos())
                ),
            ));
        }
        Ok(())
    }

    /// The two simultaneous detection events, at `x = ∓D/2`, `t = 0`.
    pub fn detector_events(&self) -> (Event, Event) {
        let half = self.separation / 2.0;
        (
            Event::new(0.0, -half, 0.0, 0.0),
            Event::new(0.0, half, 0.0, 0.0),
        )
    }

    /// The detector event a given side's wavepacket terminates on.
    pub fn detector_event(&self, side: Side) -> Event {
        let (a, b) = self.detector_events();
        match side {
            Side::L => a,
            Side::R => b,
        }
    }

    /// Worldline of the wavepacket peak detected on `side`: transversally
    /// static, moving along the beam at the beam speed.
    pub fn peak_worldline(&self, side: Side) -> Result<Worldline> {
        Worldline::new(self.detector_event(side), [0.0, 0.0, self.beam_speed])
    }

    /// The probe beam as a [`LaserProbe`], tilted by the obliquity in the
    /// xz-plane with polarization along y.
    pub fn laser_probe(&self) -> Result<LaserProbe> {
        let a = self.laser_obliquity;
        LaserProbe::new(
            self.laser_wavelength,
            [a.cos(), 0.0, a.sin()],
            [0.0, 1.0, 0.0],
            self.focal_spot_width,
            self.peak_excitation,
        )
    }

    /// Tuning classification of the separation as the probe sees it: the
    /// separation projected onto the propagation direction.
    pub fn tuning(&self) -> Result<SeparationTuning> {
        let projected = self.separation * self.laser_obliquity.cos();
        SeparationTuning::classify(projected, self.laser_wavelength)
    }

    /// Time the probe's mid-spot crossing happens before detection:
    /// the lead time plus half the spot crossing (or the full crossing when
    /// evaluating at spot entry).
    pub fn probe_time_before_detection(&self) -> f64 {
        let crossing = self.focal_spot_width / self.beam_speed;
        if self.evaluate_at_spot_entry {
            self.laser_lead_time + crossing
        } else {
            self.laser_lead_time + crossing / 2.0
        }
    }

    /// Time an excitation at mid-spot leaves for the decay to land a photon
    /// before the atom reaches its detector.
    pub fn decay_time_available(&self) -> f64 {
        self.laser_lead_time + 0.5 * self.focal_spot_width / self.beam_speed
    }

    /// Run duration implied by the beam current, s.
    pub fn run_duration(&self) -> f64 {
        self.atom_count as f64 / self.flux
    }
}

/// Source-side beam parameters for the feasibility calculator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    /// Mass of the beam species, kg.
    pub species_mass: f64,
    /// Beam speed, m/s.
    pub species_speed: f64,
    /// Diffraction-grating period, m.
    pub grating_period: f64,
    /// Diffraction order used to split/steer the beams; order 0 means the
    /// beams are never separated.
    pub diffraction_order: u32,
    /// Free-flight length over which each grating pair separates the beams, m.
    pub arm_length: f64,
    /// Number of grating pairs stacked along the machine.
    pub grating_pairs: u32,
}

impl Default for BeamSpec {
    fn default() -> Self {
        BeamSpec {
            species_mass: SODIUM_MASS_KG,
            species_speed: 3000.0,
            grating_period: 20e-9,
            diffraction_order: 1,
            arm_length: 10.0,
            grating_pairs: 1,
        }
    }
}

impl BeamSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.species_mass > 0.0 && self.species_mass.is_finite()) {
            return Err(Error::config(
                "species_mass_kg",
                format!("must be > 0 and finite, got {}", self.species_mass),
            ));
        }
        if !(self.species_speed > 0.0 && self.species_speed < C) {
            return Err(Error::config(
                "species_speed_m_per_s",
                format!("must be in (0, c), got {}", self.species_speed),
            ));
        }
        if !(self.grating_period > 0.0 && self.grating_period.is_finite()) {
            return Err(Error::config(
                "grating_period_m",
                format!("must be > 0 and finite, got {}", self.grating_period),
            ));
        }
        if !(self.arm_length > 0.0 && self.arm_length.is_finite()) {
            return Err(Error::config(
                "arm_length_m",
                format!("must be > 0 and finite, got {}", self.arm_length),
            ));
        }
        if self.grating_pairs == 0 {
            return Err(Error::config("grating_pairs", "must be ≥ 1".to_string()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laser::Parity;
    use approx::assert_relative_eq;

    #[test]
    fn default_config_is_valid_and_exactly_tuned() {
        let config = ExperimentConfig::default();
        config.validate().unwrap();
        let tuning = config.tuning().unwrap();
        assert_eq!(tuning.parity, Parity::Odd);
        assert_eq!(tuning.phase, std::f64::consts::PI);
        assert_eq!(tuning.half_wave_index, 10_186_757);
        assert_relative_eq!(config.separation, 3.0, max_relative = 1e-7);
    }

    #[test]
    fn default_timing_matches_the_nominal_apparatus() {
        let config = ExperimentConfig::default();
        // 15 μm at 3000 m/s: a 5 ns crossing; mid-spot probe 7.5 ns out.
        assert_relative_eq!(
            config.focal_spot_width / config.beam_speed,
            5e-9,
            max_relative = 1e-12
        );
        assert_relative_eq!(config.probe_time_before_detection(), 7.5e-9, max_relative = 1e-12);
        assert_relative_eq!(config.decay_time_available(), 7.5e-9, max_relative = 1e-12);
        let entry = ExperimentConfig {
            evaluate_at_spot_entry: true,
            ..config
        };
        assert_relative_eq!(entry.probe_time_before_detection(), 10e-9, max_relative = 1e-12);
    }

    #[test]
    fn validation_names_the_offending_field() {
        let config = ExperimentConfig {
            beam_speed: -3.0,
            ..ExperimentConfig::default()
        };
        match config.validate() {
            Err(Error::InvalidConfig { field, message }) => {
                assert_eq!(field, "beam_speed_m_per_s");
                assert!(message.contains("(0, c)"));
            }
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_each_bad_field() {
        let base = ExperimentConfig::default();
        let bad = [
            ExperimentConfig { separation: 0.0, ..base.clone() },
            ExperimentConfig { laser_wavelength: -1.0, ..base.clone() },
            ExperimentConfig { laser_lead_time: -1e-9, ..base.clone() },
            ExperimentConfig { focal_spot_width: 0.0, ..base.clone() },
            ExperimentConfig { peak_excitation: 1.5, ..base.clone() },
            ExperimentConfig { lifetime: 0.0, ..base.clone() },
            ExperimentConfig { laser_obliquity: 2.0, ..base.clone() },
            ExperimentConfig { detector_efficiency: -0.1, ..base.clone() },
            ExperimentConfig { dark_rate: f64::NAN, ..base.clone() },
            ExperimentConfig { atom_count: 0, ..base.clone() },
            ExperimentConfig { flux: 0.0, ..base.clone() },
            ExperimentConfig { scenario: ScenarioKind::FiniteSpeed(1000.0), ..base.clone() },
        ];
        for config in bad {
            assert!(config.validate().is_err(), "should reject {config:?}");
        }
    }

    #[test]
    fn saturation_is_caught_at_validation_when_detuned() {
        // Detuned by a quarter wavelength: a coherent atom sees 1 + cos φ ≈ 1,
        // fine at p0 = 1; at the bright fringe it reaches 2·p0.
        let mut config = ExperimentConfig::default();
        config.separation += config.laser_wavelength / 2.0 * 0.999; // near even tuning
        let err = config.validate().unwrap_err();
        assert!(matches!(err, Error::InvalidConfig { field: "peak_excitation_p0", .. }));
        config.peak_excitation = 0.4;
        config.validate().unwrap();
    }

    #[test]
    fn detectors_straddle_the_origin_simultaneously() {
        let config = ExperimentConfig::default();
        let (a, b) = config.detector_events();
        assert_eq!(a.t, 0.0);
        assert_eq!(b.t, 0.0);
        assert_relative_eq!(b.x - a.x, config.separation, max_relative = 1e-15);
        assert_eq!(a.x, -b.x);
    }

    #[test]
    fn oblique_probe_projects_the_separation() {
        let config = ExperimentConfig {
            laser_obliquity: 0.3,
            ..ExperimentConfig::default()
        };
        let tuning = config.tuning().unwrap();
        // cos(0.3) shrinks the projected separation off the dark fringe.
        assert_eq!(tuning.parity, Parity::Detuned);
        let probe = config.laser_probe().unwrap();
        assert_relative_eq!(probe.direction[0], 0.3f64.cos(), max_relative = 1e-15);
    }

    #[test]
    fn beam_spec_validation() {
        BeamSpec::default().validate().unwrap();
        let bad = BeamSpec {
            grating_pairs: 0,
            ..BeamSpec::default()
        };
        assert!(bad.validate().is_err());
        // Order 0 is legal — it just never separates the beams.
        let zero_order = BeamSpec {
            diffraction_order: 0,
            ..BeamSpec::default()
        };
        zero_order.validate().unwrap();
    }

    #[test]
    fn config_survives_a_json_round_trip() {
        let config = ExperimentConfig {
            scenario: ScenarioKind::FiniteSpeed(4.5e8),
            ..ExperimentConfig::default()
        };
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, back);
    }
}
