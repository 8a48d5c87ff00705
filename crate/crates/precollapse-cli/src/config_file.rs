//! Flat `key = value` configuration files with units embedded in the key
//! names, plus the canonical serialization the run manifest hashes.
//!
//! An empty file is a complete configuration: every key has a default.
//! Unknown and duplicated keys are errors, so a typo cannot silently fall
//! back to a default.

use precollapse::config::{BeamSpec, ExperimentConfig};
use precollapse::quantum::ScenarioKind;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

/// The experiment parameters and the beam specification a config file sets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FullConfig {
    pub experiment: ExperimentConfig,
    pub beam: BeamSpec,
}

/// Every key the format accepts, in the canonical (sorted) order.
pub const KEYS: [&str; 21] = [
    "arm_length_m",
    "atom_count",
    "beam_speed_m_per_s",
    "dark_rate_per_s",
    "detector_efficiency",
    "diffraction_order",
    "evaluate_at_spot_entry",
    "flux_per_s",
    "focal_spot_width_m",
    "grating_pairs",
    "grating_period_m",
    "laser_lead_time_s",
    "laser_obliquity_rad",
    "laser_wavelength_m",
    "lifetime_s",
    "master_seed",
    "peak_excitation_p0",
    "scenario",
    "separation_m",
    "species_mass_kg",
    "species_speed_m_per_s",
];

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64, String> {
    let number: f64 = value
        .parse()
        .map_err(|_| format!("line {line}: {key}: expected a number, got {value:?}"))?;
    if !number.is_finite() {
        return Err(format!(
            "line {line}: {key}: expected a finite number, got {value:?}"
        ));
    }
    Ok(number)
}

fn parse_u64(key: &str, value: &str, line: usize) -> Result<u64, String> {
    value
        .parse()
        .map_err(|_| format!("line {line}: {key}: expected a non-negative integer, got {value:?}"))
}

fn parse_u32(key: &str, value: &str, line: usize) -> Result<u32, String> {
    value
        .parse()
        .map_err(|_| format!("line {line}: {key}: expected a non-negative integer, got {value:?}"))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool, String> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!(
            "line {line}: {key}: expected true or false, got {value:?}"
        )),
    }
}

/// Parses a configuration file's text; keys left unset keep their defaults.
pub fn parse(text: &str) -> Result<FullConfig, String> {
    let mut config = FullConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    for (index, raw_line) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw_line.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| format!("line {line}: expected `key = value`, got {content:?}"))?;
        let key = key.trim();
        let value = value.trim();
        let known = *KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| format!("line {line}: unknown key {key:?}"))?;
        if seen.contains(&known) {
            return Err(format!("line {line}: duplicate key {key:?}"));
        }
        seen.push(known);
        let experiment = &mut config.experiment;
        let beam = &mut config.beam;
        match known {
            "arm_length_m" => beam.arm_length = parse_f64(key, value, line)?,
            "atom_count" => experiment.atom_count = parse_u64(key, value, line)?,
            "beam_speed_m_per_s" => experiment.beam_speed = parse_f64(key, value, line)?,
            "dark_rate_per_s" => experiment.dark_rate = parse_f64(key, value, line)?,
            "detector_efficiency" => {
                experiment.detector_efficiency = parse_f64(key, value, line)?
            }
            "diffraction_order" => beam.diffraction_order = parse_u32(key, value, line)?,
            "evaluate_at_spot_entry" => {
                experiment.evaluate_at_spot_entry = parse_bool(key, value, line)?
            }
            "flux_per_s" => experiment.flux = parse_f64(key, value, line)?,
            "focal_spot_width_m" => experiment.focal_spot_width = parse_f64(key, value, line)?,
            "grating_pairs" => beam.grating_pairs = parse_u32(key, value, line)?,
            "grating_period_m" => beam.grating_period = parse_f64(key, value, line)?,
            "laser_lead_time_s" => experiment.laser_lead_time = parse_f64(key, value, line)?,
            "laser_obliquity_rad" => experiment.laser_obliquity = parse_f64(key, value, line)?,
            "laser_wavelength_m" => experiment.laser_wavelength = parse_f64(key, value, line)?,
            "lifetime_s" => experiment.lifetime = parse_f64(key, value, line)?,
            "master_seed" => experiment.master_seed = parse_u64(key, value, line)?,
            "peak_excitation_p0" => experiment.peak_excitation = parse_f64(key, value, line)?,
            "scenario" => {
                experiment.scenario = value
                    .parse::<ScenarioKind>()
                    .map_err(|err| format!("line {line}: scenario: {err}"))?
            }
            "separation_m" => experiment.separation = parse_f64(key, value, line)?,
            "species_mass_kg" => beam.species_mass = parse_f64(key, value, line)?,
            "species_speed_m_per_s" => beam.species_speed = parse_f64(key, value, line)?,
            _ => unreachable!("key list covers every match arm"),
        }
    }
    Ok(config)
}

/// Renders a configuration as sorted `key = value` lines. Floats use the
/// shortest representation that parses back to the identical value, so
/// `parse(canonical_text(c)) == c` always holds.
pub fn canonical_text(config: &FullConfig) -> String {
    let experiment = &config.experiment;
    let beam = &config.beam;
    let mut out = String::new();
    for key in KEYS {
        let value = match key {
            "arm_length_m" => format!("{:?}", beam.arm_length),
            "atom_count" => format!("{}", experiment.atom_count),
            "beam_speed_m_per_s" => format!("{:?}", experiment.beam_speed),
            "dark_rate_per_s" => format!("{:?}", experiment.dark_rate),
            "detector_efficiency" => format!("{:?}", experiment.detector_efficiency),
            "diffraction_order" => format!("{}", beam.diffraction_order),
            "evaluate_at_spot_entry" => format!("{}", experiment.evaluate_at_spot_entry),
            "flux_per_s" => format!("{:?}", experiment.flux),
            "focal_spot_width_m" => format!("{:?}", experiment.focal_spot_width),
            "grating_pairs" => format!("{}", beam.grating_pairs),
            "grating_period_m" => format!("{:?}", beam.grating_period),
            "laser_lead_time_s" => format!("{:?}", experiment.laser_lead_time),
            "laser_obliquity_rad" => format!("{:?}", experiment.laser_obliquity),
            "laser_wavelength_m" => format!("{:?}", experiment.laser_wavelength),
            "lifetime_s" => format!("{:?}", experiment.lifetime),
            "master_seed" => format!("{}", experiment.master_seed),
            "peak_excitation_p0" => format!("{:?}", experiment.peak_excitation),
            "scenario" => format!("{}", experiment.scenario),
            "separation_m" => format!("{:?}", experiment.separation),
            "species_mass_kg" => format!("{:?}", beam.species_mass),
            "species_speed_m_per_s" => format!("{:?}", beam.species_speed),
            _ => unreachable!("key list covers every match arm"),
        };
        writeln!(out, "{key} = {value}").expect("writing to a String cannot fail");
    }
    out
}

/// Hex SHA-256 of a canonical config text — the manifest's config hash.
pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use precollapse::constants::C;

    #[test]
    fn empty_text_yields_the_full_default_config() {
        assert_eq!(parse("").unwrap(), FullConfig::default());
        assert_eq!(parse("\n# only a comment\n\n").unwrap(), FullConfig::default());
    }

    #[test]
    fn a_sparse_file_overrides_only_its_keys() {
        let parsed = parse(
            "# probe earlier, smaller run\n\
             laser_lead_time_s = 2.5e-9\n\
             atom_count = 1000\n\
             scenario = speed:599584916\n",
        )
        .unwrap();
        assert_eq!(parsed.experiment.laser_lead_time, 2.5e-9);
        assert_eq!(parsed.experiment.atom_count, 1_000);
        assert_eq!(
            parsed.experiment.scenario,
            ScenarioKind::finite_speed(599_584_916.0).unwrap()
        );
        assert_eq!(parsed.beam, BeamSpec::default());
    }

    #[test]
    fn unknown_keys_are_named_in_the_error() {
        let err = parse("beam_sped_m_per_s = 3000\n").unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
        assert!(err.contains("beam_sped_m_per_s"), "{err}");
        assert!(err.contains("line 1"), "{err}");
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse("atom_count = 5\natom_count = 6\n").unwrap_err();
        assert!(err.contains("duplicate"), "{err}");
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn malformed_values_name_the_key() {
        let err = parse("beam_speed_m_per_s = fast\n").unwrap_err();
        assert!(err.contains("beam_speed_m_per_s"), "{err}");
        let err = parse("atom_count = -3\n").unwrap_err();
        assert!(err.contains("atom_count"), "{err}");
        let err = parse("evaluate_at_spot_entry = yes\n").unwrap_err();
        assert!(err.contains("true or false"), "{err}");
        let err = parse("scenario = sideways\n").unwrap_err();
        assert!(err.contains("scenario"), "{err}");
        let err = parse("lifetime_s = inf\n").unwrap_err();
        assert!(err.contains("finite"), "{err}");
        let err = parse("just words\n").unwrap_err();
        assert!(err.contains("key = value"), "{err}");
    }

    #[test]
    fn canonical_text_round_trips_exactly() {
        let mut config = FullConfig::default();
        assert_eq!(parse(&canonical_text(&config)).unwrap(), config);
        config.experiment.scenario = ScenarioKind::finite_speed(1.5 * C).unwrap();
        config.experiment.separation = 2.987_654_321e-1;
        config.experiment.master_seed = u64::MAX;
        config.experiment.evaluate_at_spot_entry = true;
        config.beam.grating_pairs = 519;
        config.beam.species_mass = 1.6735e-27;
        assert_eq!(parse(&canonical_text(&config)).unwrap(), config);
    }

    #[test]
    fn canonical_text_is_sorted_and_complete() {
        let text = canonical_text(&FullConfig::default());
        let keys: Vec<&str> = text
            .lines()
            .map(|line| line.split_once('=').unwrap().0.trim())
            .collect();
        assert_eq!(keys, KEYS);
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn config_hash_is_stable_and_content_sensitive() {
        let base = canonical_text(&FullConfig::default());
        assert_eq!(sha256_hex(&base), sha256_hex(&base));
        assert_eq!(sha256_hex(&base).len(), 64);
        let mut changed = FullConfig::default();
        changed.experiment.master_seed = 1;
        assert_ne!(sha256_hex(&base), sha256_hex(&canonical_text(&changed)));
    }
}
