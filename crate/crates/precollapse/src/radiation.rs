//! Dipole radiation patterns for one emitter and for a pair of separated
//! emitters, coherent or incoherent.
//!
//! A collapsed atom radiates from one beam only; an atom whose twin peaks
//! were both excited coherently radiates like a two-element phased array,
//! with fringes controlled by `k(n̂·d) + δ`. Averaging the coherent pattern
//! over a uniform relative phase δ reproduces the incoherent sum — the two
//! hypotheses differ only through the phase correlations, exactly like the
//! probe excitation itself.

use crate::error::{Error, Result};
use crate::vec3;
use serde::Serialize;

const UNIT_TOL: f64 = 1e-9;

/// How the two emitters' fields combine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitterMode {
    Coherent,
    Incoherent,
}

/// Two identical dipoles separated by `separation`, oscillating along
/// `polarization_axis`, radiating at wavenumber `k = 2π/λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterPair {
    pub separation: [f64; 3],
    pub polarization_axis: [f64; 3],
    pub wavenumber: f64,
    pub relative_phase: f64,
    pub mode: EmitterMode,
}

impl EmitterPair {
    pub fn new(
        separation: [f64; 3],
        polarization_axis: [f64; 3],
        wavenumber: f64,
        relative_phase: f64,
        mode: EmitterMode,
    ) -> Result<Self> {
        if !(wavenumber > 0.0) {
            return Err(Error::config(
                "wavenumber",
                format!("must be > 0, got {wavenumber}"),
            ));
        }
        if !vec3::is_unit(polarization_axis, UNIT_TOL) {
            return Err(Error::config(
                "polarization_axis",
                "must be a unit vector".to_string(),
            ));
        }
        Ok(EmitterPair {
            separation,
            polarization_axis,
            wavenumber,
            relative_phase,
            mode,
        })
    }
}

/// One sample of an angular emission scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionSample {
    /// Polar angle from the z axis, rad.
    pub theta: f64,
    /// Azimuth from the x axis, rad.
    pub phi: f64,
    /// Relative radiated intensity (single-dipole peak = 1).
    pub intensity: f64,
}

/// Unit direction for polar angle `theta` and azimuth `phi`.
pub fn direction(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Single-dipole angular factor `sin²Θ`, with Θ measured from the dipole
/// axis: `1 − (n̂·axis)²`.
pub fn single_dipole(n_hat: [f64; 3], axis: [f64; 3]) -> f64 {
    debug_assert!(vec3::is_unit(n_hat, 1e-6) && vec3::is_unit(axis, 1e-6));
    let c = vec3::dot(n_hat, axis);
    1.0 - c * c
}

/// Radiated intensity of the pair along `n̂`.
///
/// Coherent: `2·sin²Θ·(1 + cos(k(n̂·d) + δ))`; incoherent: `2·sin²Θ`.
pub fn pair_pattern(pair: &EmitterPair, n_hat: [f64; 3]) -> f64 {
    let dipole = single_dipole(n_hat, pair.polarization_axis);
    match pair.mode {
        EmitterMode::Incoherent => 2.0 * dipole,
        EmitterMode::Coherent => {
            let path_phase = pair.wavenumber * vec3::dot(n_hat, pair.separation);
            2.0 * dipole * (1.0 + (path_phase + pair.relative_phase).cos())
        }
    }
}

/// Regular angular scan of the pair pattern: `n_theta` polar samples over
/// `[0, π]` (endpoints included) by `n_phi` azimuthal samples over `[0, 2π)`.
pub fn pattern_scan(pair: &EmitterPair, n_theta: usize, n_phi: usize) -> Vec<DirectionSample> {
    assert!(
        n_theta >= 2 && n_phi >= 2,
        "need at least 2 samples per axis"
    );
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = std::f64::consts::TAU * j as f64 / n_phi as f64;
            out.push(DirectionSample {
                theta,
                phi,
                intensity: pair_pattern(pair, direction(theta, phi)),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{PI, TAU};

    fn pair(mode: EmitterMode, k_d: f64, delta: f64) -> EmitterPair {
        // Separation along x, dipoles along y: the xz-plane sees the full
        // fringe pattern with no dipole modulation.
        EmitterPair::new([k_d, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, delta, mode).unwrap()
    }

    #[test]
    fn single_dipole_vanishes_on_axis_and_peaks_broadside() {
        let axis = [0.0, 0.0, 1.0];
        assert_eq!(single_dipole([0.0, 0.0, 1.0], axis), 0.0);
        assert_eq!(single_dipole([1.0, 0.0, 0.0], axis), 1.0);
        assert_relative_eq!(
            single_dipole(direction(PI / 4.0, 0.0), axis),
            0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn incoherent_pair_is_twice_one_dipole_everywhere() {
        let p = pair(EmitterMode::Incoherent, 7.0, 1.3);
        for (theta, phi) in [(0.1, 0.0), (1.0, 2.0), (2.5, 4.0), (PI / 2.0, 1.0)] {
            let n = direction(theta, phi);
            assert_eq!(
                pair_pattern(&p, n),
                2.0 * single_dipole(n, p.polarization_axis)
            );
        }
    }

    #[test]
    fn coherent_pair_doubles_again_at_zero_path_and_phase() {
        let p = pair(EmitterMode::Coherent, 5.0, 0.0);
        // Broadside (n̂ ⊥ d): path phase is exactly zero.
        let n = [0.0, 0.0, 1.0];
        assert_eq!(pair_pattern(&p, n), 4.0);
    }

    #[test]
    fn coherent_pair_with_opposite_phase_cancels_at_zero_path_difference() {
        let p = pair(EmitterMode::Coherent, 5.0, PI);
        // n̂·d = 0 exactly for broadside directions, so 1 + cos(π) = 0 exactly.
        for n in [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]] {
            assert_eq!(pair_pattern(&p, n), 0.0);
        }
    }

    #[test]
    fn fringe_count_matches_the_path_difference_oracle() {
        // Oracle: sign changes of cos(k·d·sinψ + δ) across ψ ∈ [0, π/2].
        let k_d = 40.0;
        let delta = 0.4;
        let p = pair(EmitterMode::Coherent, k_d, delta);
        let m = 20_000;
        let mut crossings = 0u32;
        let mut last = (pair_pattern(&p, [0.0, 0.0, 1.0]) - 2.0).signum();
        let mut oracle_last = (delta.cos()).signum();
        let mut oracle_crossings = 0u32;
        for i in 1..=m {
            let psi = PI / 2.0 * i as f64 / m as f64;
            // Scan the xz-plane: n̂ = (sinψ, 0, cosψ); dipole factor is 1.
            let n = [psi.sin(), 0.0, psi.cos()];
            let sign = (pair_pattern(&p, n) - 2.0).signum();
            if sign != last && sign != 0.0 {
                crossings += 1;
                last = sign;
            }
            let o = (k_d * psi.sin() + delta).cos().signum();
            if o != oracle_last && o != 0.0 {
                oracle_crossings += 1;
                oracle_last = o;
            }
        }
        assert_eq!(crossings, oracle_crossings);
        let expected = k_d / PI;
        assert!(
            (crossings as f64 - expected).abs() <= 2.0,
            "{crossings} fringes vs k·d/π = {expected}"
        );
    }

    #[test]
    fn phase_averaged_coherent_equals_incoherent() {
        let k_d = 9.0;
        let inc = pair(EmitterMode::Incoherent, k_d, 0.0);
        let m = 10_000;
        for (theta, phi) in [(0.3, 0.2), (1.2, 4.0), (2.0, 1.0), (PI / 2.0, 0.05)] {
            let n = direction(theta, phi);
            let mut mean = 0.0;
            for j in 0..m {
                let delta = TAU * (j as f64 + 0.5) / m as f64;
                let coh = pair(EmitterMode::Coherent, k_d, delta);
                mean += pair_pattern(&coh, n);
            }
            mean /= m as f64;
            let expected = pair_pattern(&inc, n);
            assert_relative_eq!(mean, expected, max_relative = 1e-3, epsilon = 1e-9);
        }
    }

    #[test]
    fn total_power_of_an_aligned_short_baseline_pair_doubles() {
        // Quadrature oracle: ∫ I dΩ over a θ×φ grid with sinθ weights.
        let integrate = |p: &EmitterPair| {
            let (nt, np) = (400, 400);
            let mut total = 0.0;
            for i in 0..nt {
                let theta = PI * (i as f64 + 0.5) / nt as f64;
                for j in 0..np {
                    let phi = TAU * (j as f64 + 0.5) / np as f64;
                    total += pair_pattern(p, direction(theta, phi)) * theta.sin();
                }
            }
            total * (PI / nt as f64) * (TAU / np as f64)
        };
        // k·|d| → 0 with δ = 0: every direction interferes constructively.
        let coh = pair(EmitterMode::Coherent, 1e-8, 0.0);
        let inc = pair(EmitterMode::Incoherent, 1e-8, 0.0);
        assert_relative_eq!(integrate(&coh), 2.0 * integrate(&inc), max_relative = 1e-6);
        // And the incoherent total is twice one dipole's 8π/3.
        assert_relative_eq!(
            integrate(&inc),
            2.0 * 8.0 * PI / 3.0,
            max_relative = 1e-3
        );
    }

    #[test]
    fn scan_covers_the_grid_with_finite_intensities() {
        let p = pair(EmitterMode::Coherent, 30.0, 1.0);
        let scan = pattern_scan(&p, 2, 2);
        assert_eq!(scan.len(), 4);
        let scan = pattern_scan(&p, 7, 9);
        assert_eq!(scan.len(), 63);
        assert!(scan.iter().all(|s| s.intensity.is_finite()));
        assert!(scan.iter().all(|s| (0.0..=PI).contains(&s.theta)));
        assert!(scan.iter().all(|s| (0.0..TAU).contains(&s.phi)));
        // First and last polar rows sit exactly on the poles.
        assert_eq!(scan[0].theta, 0.0);
        assert_eq!(scan[62].theta, PI);
    }

    #[test]
    #[should_panic(expected = "at least 2 samples")]
    fn degenerate_scan_resolution_panics() {
        let p = pair(EmitterMode::Incoherent, 1.0, 0.0);
        pattern_scan(&p, 1, 8);
    }

    proptest! {
        #[test]
        fn pattern_is_invariant_under_separation_and_phase_negation(
            theta in 0.0f64..PI, phi in 0.0f64..TAU,
            k_d in 0.1f64..50.0, delta in -6.0f64..6.0,
        ) {
            // d → −d, δ → −δ flips the sign inside cos, which is even.
            let p = pair(EmitterMode::Coherent, k_d, delta);
            let q = EmitterPair::new(
                vec3::scale(p.separation, -1.0),
                p.polarization_axis,
                p.wavenumber,
                -delta,
                EmitterMode::Coherent,
            )
            .unwrap();
            let n = direction(theta, phi);
            let a = pair_pattern(&p, n);
            let b = pair_pattern(&q, n);
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn coherent_intensity_stays_in_the_envelope(
            theta in 0.0f64..PI, phi in 0.0f64..TAU,
            k_d in 0.0f64..100.0, delta in -10.0f64..10.0,
        ) {
            let p = pair(EmitterMode::Coherent, k_d, delta);
            let i = pair_pattern(&p, direction(theta, phi));
            prop_assert!(i >= 0.0);
            prop_assert!(i <= 4.0 + 1e-12);
        }
    }
}
