//! Collision-driven decoherence of the which-beam superposition, and the
//! effective detection time it implies.
//!
//! A detector gas randomises the relative phase of the two wavepackets: each
//! collision-free flight of duration `t` advances the relative phase by
//! `KE·t/ħ`, and collisions randomise it step by step. Once the accumulated
//! random phase exceeds a threshold the superposition is effectively
//! measured — this sets how quickly a detector "fires" and hence the maximum
//! usable beam current.

use crate::constants::{HBAR, SODIUM_MASS_KG};
use crate::error::{Error, Result};
use serde::Serialize;

/// A gas of detector atoms colliding with the beam atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEnvironment {
    /// Mass of the beam atom, kg.
    pub atom_mass: f64,
    /// Thermal speed of the beam atom in the detector, m/s.
    pub atom_speed: f64,
    /// Mean free path between collisions, m.
    pub mean_free_path: f64,
    /// Accumulated random phase treated as full collapse, rad.
    pub phase_threshold: f64,
}

impl CollisionEnvironment {
    pub fn new(
        atom_mass: f64,
        atom_speed: f64,
        mean_free_path: f64,
        phase_threshold: f64,
    ) -> Result<Self> {
        let fields: [(&'static str, f64); 4] = [
            ("atom_mass", atom_mass),
            ("atom_speed", atom_speed),
            ("mean_free_path", mean_free_path),
            ("phase_threshold", phase_threshold),
        ];
        for (field, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(field, format!("must be > 0 and finite, got {v}")));
            }
        }
        Ok(CollisionEnvironment {
            atom_mass,
            atom_speed,
            mean_free_path,
            phase_threshold,
        })
    }

    /// Sodium thermalising in a solid-state detector: ~500 m/s between
    /// collisions a fraction of a nanometre apart, with a 2π phase budget.
    pub fn sodium_detector() -> Self {
        CollisionEnvironment {
            atom_mass: SODIUM_MASS_KG,
            atom_speed: 500.0,
            mean_free_path: 0.1e-9,
            phase_threshold: std::f64::consts::TAU,
        }
    }

    /// Duration of one collision-free flight, s.
    pub fn collision_interval(&self) -> f64 {
        self.mean_free_path / self.atom_speed
    }

    /// Kinetic energy of the beam atom, J.
    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.atom_mass * self.atom_speed * self.atom_speed
    }
}

/// Relative phase accumulated over a collision-free flight: `KE·t/ħ`.
pub fn phase_step(kinetic_energy: f64, t: f64) -> f64 {
    kinetic_energy * t / HBAR
}

/// Coherence surviving `n` collisions with random phase steps of width
/// `sigma`: `e^{−nσ²/2}`, never below 0.
pub fn coherence_after(n: u64, sigma: f64) -> f64 {
    (-(n as f64) * sigma * sigma / 2.0).exp()
}

/// Time for collisions to randomise the relative phase past the threshold:
/// the smallest `n` with `√n·σ ≥ threshold`, times the collision interval.
pub fn time_to_collapse(env: &CollisionEnvironment) -> Result<f64> {
    let interval = env.collision_interval();
    let sigma = phase_step(env.kinetic_energy(), interval);
    if sigma == 0.0 {
        return Err(Error::NeverCollapses);
    }
    let ratio = env.phase_threshold / sigma;
    let n = (ratio * ratio).ceil().max(1.0);
    Ok(n * interval)
}
