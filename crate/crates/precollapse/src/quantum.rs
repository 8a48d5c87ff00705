//! Which-beam density matrices and the collapse scenarios that act on them.
//!
//! A single atom split between the left (`L`) and right (`R`) beam carries a
//! 2×2 density matrix. The off-diagonal element is the mutual coherence the
//! laser probe interrogates: an equal-amplitude coherent split has
//! `|ρ_LR| = 1/2`, a collapsed atom has `ρ_LR = 0`.

use crate::config::ExperimentConfig;
use crate::constants::C;
use crate::error::{Error, Result};
use crate::spacetime::{self, ExtendedSpeed};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which beam the atom ends up in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::L => write!(f, "L"),
            Side::R => write!(f, "R"),
        }
    }
}

/// Collapse hypothesis under test.
///
/// `Conventional` collapses instantaneously on the detection hyperplane;
/// `HellwigKraus` collapses along the past light cone (`s = c`); and
/// `FiniteSpeed` interpolates with a backward cone of speed `s > c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    Conventional,
    HellwigKraus,
    FiniteSpeed(f64),
}

impl ScenarioKind {
    /// Builds the interpolating scenario, rejecting speeds at or below c.
    pub fn finite_speed(s: f64) -> Result<Self> {
        if !(s > C) {
            return Err(Error::InvalidCollapseSpeed { speed: s });
        }
        Ok(ScenarioKind::FiniteSpeed(s))
    }

    /// Maps a collapse-front speed onto the scenario family: `c` is
    /// Hellwig–Kraus, `∞` is conventional, anything in between interpolates.
    pub fn from_collapse_speed(speed: ExtendedSpeed) -> Result<Self> {
        match speed {
            ExtendedSpeed::Infinite => Ok(ScenarioKind::Conventional),
            ExtendedSpeed::Finite(s) if s == C => Ok(ScenarioKind::HellwigKraus),
            ExtendedSpeed::Finite(s) if s > C => Ok(ScenarioKind::FiniteSpeed(s)),
            ExtendedSpeed::Finite(s) => Err(Error::InvalidCollapseSpeed { speed: s }),
        }
    }

    /// The collapse-front speed this scenario assigns to each detection.
    pub fn collapse_speed(&self) -> ExtendedSpeed {
        match self {
            ScenarioKind::Conventional => ExtendedSpeed::Infinite,
            ScenarioKind::HellwigKraus => ExtendedSpeed::Finite(C),
            ScenarioKind::FiniteSpeed(s) => ExtendedSpeed::Finite(*s),
        }
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioKind::Conventional => write!(f, "conventional"),
            ScenarioKind::HellwigKraus => write!(f, "hk"),
            ScenarioKind::FiniteSpeed(s) => write!(f, "speed:{s}"),
        }
    }
}

impl std::str::FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conventional" => Ok(ScenarioKind::Conventional),
            "hk" => Ok(ScenarioKind::HellwigKraus),
            other => {
                let Some(v) = other.strip_prefix("speed:") else {
                    return Err(Error::config(
                        "scenario",
                        format!("expected conventional | hk | speed:<m/s>, got {other:?}"),
                    ));
                };
                let speed: f64 = v.parse().map_err(|_| {
                    Error::config("scenario", format!("speed {v:?} is not a number"))
                })?;
                if speed == C {
                    return Ok(ScenarioKind::HellwigKraus);
                }
                ScenarioKind::finite_speed(speed)
            }
        }
    }
}

impl Serialize for ScenarioKind {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ScenarioKind {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Tolerance allowed on the trace and positivity checks; pure float slack.
const MATRIX_TOL: f64 = 1e-12;

/// A 2×2 single-atom density matrix in the `{L, R}` which-beam basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    p_ll: f64,
    p_rr: f64,
    rho_lr: Complex64,
}

impl DensityMatrix2 {
    /// Builds a matrix, enforcing unit trace, non-negative populations, and
    /// the positivity bound `|ρ_LR|² ≤ p_LL·p_RR`.
    pub fn new(p_ll: f64, p_rr: f64, rho_lr: Complex64) -> Result<Self> {
        if !p_ll.is_finite() || !p_rr.is_finite() || !rho_lr.re.is_finite() || !rho_lr.im.is_finite()
        {
            return Err(Error::InvalidDensityMatrix {
                reason: "non-finite entry".into(),
            });
        }
        if p_ll < 0.0 || p_rr < 0.0 {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("negative population: p_LL = {p_ll}, p_RR = {p_rr}"),
            });
        }
        if ((p_ll + p_rr) - 1.0).abs() > MATRIX_TOL {
            return Err(Error::InvalidDensityMatrix {
                reason: format!("trace {} must be 1", p_ll + p_rr),
            });
        }
        if rho_lr.norm_sqr() > p_ll * p_rr + MATRIX_TOL {
            return Err(Error::InvalidDensityMatrix {
                reason: format!(
                    "|rho_LR|² = {} exceeds p_LL·p_RR = {}",
                    rho_lr.norm_sqr(),
                    p_ll * p_rr
                ),
            });
        }
        Ok(DensityMatrix2 { p_ll, p_rr, rho_lr })
    }

    /// The maximally coherent equal split with relative phase `phase`:
    /// `(1/2, 1/2, e^{iφ}/2)`.
    pub fn coherent_twin(phase: f64) -> Self {
        DensityMatrix2 {
            p_ll: 0.5,
            p_rr: 0.5,
            rho_lr: Complex64::from_polar(0.5, phase),
        }
    }

    /// The fully mixed which-beam state (no mutual coherence, equal weights).
    pub fn mixed() -> Self {
        DensityMatrix2 {
            p_ll: 0.5,
            p_rr: 0.5,
            rho_lr: Complex64::ZERO,
        }
    }

    pub fn p_ll(&self) -> f64 {
        self.p_ll
    }

    pub fn p_rr(&self) -> f64 {
        self.p_rr
    }

    pub fn probability(&self, side: Side) -> f64 {
        match side {
            Side::L => self.p_ll,
            Side::R => self.p_rr,
        }
    }

    pub fn rho_lr(&self) -> Complex64 {
        self.rho_lr
    }

    /// True when the mutual coherence is exactly zero.
    pub fn is_collapsed(&self) -> bool {
        self.rho_lr == Complex64::ZERO
    }

    /// Tr ρ², 1 for pure states, 1/2 for the fully mixed equal split.
    pub fn purity(&self) -> f64 {
        self.p_ll * self.p_ll + self.p_rr * self.p_rr + 2.0 * self.rho_lr.norm_sqr()
    }

    /// Projects onto a definite side — the measurement outcome `side` — and
    /// renormalises. Errors when that side carries zero probability.
    pub fn selective_collapse(&self, side: Side) -> Result<DensityMatrix2> {
        if self.probability(side) == 0.0 {
            return Err(Error::InvalidCollapse { side });
        }
        Ok(match side {
            Side::L => DensityMatrix2 {
                p_ll: 1.0,
                p_rr: 0.0,
                rho_lr: Complex64::ZERO,
            },
            Side::R => DensityMatrix2 {
                p_ll: 0.0,
                p_rr: 1.0,
                rho_lr: Complex64::ZERO,
            },
        })
    }

    /// Erases the mutual coherence while keeping the populations: the
    /// outcome-averaged (nonselective) measurement.
    pub fn nonselective_collapse(&self) -> DensityMatrix2 {
        DensityMatrix2 {
            p_ll: self.p_ll,
            p_rr: self.p_rr,
            rho_lr: Complex64::ZERO,
        }
    }
}

/// The which-beam state a probe finds `dt` seconds before detection, under a
/// given collapse scenario, for the atom that will be detected on
/// `detected_side`.
///
/// The scenario's pre-collapse window is computed from the configured
/// geometry; the probe sees the collapsed state exactly when `dt` is inside
/// the window (boundary included — the window is closed, like the collapsed
/// region). `dt = 0` is collapsed under every scenario.
pub fn state_at(
    scenario: ScenarioKind,
    dt_before_detection: f64,
    config: &ExperimentConfig,
    detected_side: Side,
) -> Result<DensityMatrix2> {
    if !(dt_before_detection >= 0.0) {
        return Err(Error::config(
            "dt_before_detection",
            format!("must be ≥ 0, got {dt_before_detection}"),
        ));
    }
    let (a, b) = config.detector_events();
    let worldline = config.peak_worldline(detected_side)?;
    let window =
        spacetime::precollapse_duration(&worldline, &a, &b, scenario.collapse_speed())?.duration;
    if dt_before_detection > window {
        Ok(DensityMatrix2::coherent_twin(0.0))
    } else {
        DensityMatrix2::coherent_twin(0.0).selective_collapse(detected_side)
    }
}
