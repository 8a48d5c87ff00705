//! Monte Carlo engine for the twin-beam null experiment: per-atom sampling,
//! order-independent parallel aggregation, a one-sided Poisson null test,
//! and a collapse-speed/lead-time sweep.
//!
//! ## Randomness contract
//!
//! Atom `i` draws from a ChaCha8 generator seeded with the master seed and
//! switched to stream `i`; photon-detector dark counts use the reserved
//! stream [`NOISE_STREAM`]. Per-atom outcomes are therefore reproducible in
//! isolation, and because aggregation only sums integer counts, full-run
//! statistics are bit-identical at any degree of parallelism.
//!
//! The draw order within an atom's stream is a fixed contract:
//! 1. detected side (fair bit);
//! 2. detector-efficiency uniform — on failure the collapse front is voided
//!    and the atom scatters as if coherent;
//! 3. excitation uniform against the probe excitation probability;
//! 4. if excited, an exponential decay time by inverse CDF;
//! 5. if the photon came from a still-coherent atom, its emission side
//!    (fair bit) — a collapsed atom emits from its detected side.
//!
//! Coherence is evaluated once per atom, at the mid-spot crossing (or spot
//! entry when the config asks for the worst case); the decay budget always
//! runs from the mid-spot, the average excitation point.

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::laser;
use crate::quantum::{self, DensityMatrix2, ScenarioKind, Side};
use crate::spacetime::{self, ExtendedSpeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

/// RNG stream reserved for photon-detector dark counts.
pub const NOISE_STREAM: u64 = u64::MAX;

/// Minimum probability of detecting the pre-collapse signal (when present)
/// for a quiet run to count as a genuine null rather than inconclusive.
pub const NULL_POWER_TARGET: f64 = 0.9;

/// Everything one simulated atom did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomOutcome {
    /// Index of the atom — also its RNG stream.
    pub atom_index: u64,
    /// Which beam's detector fires at the end of the flight.
    pub detected_side: Side,
    /// Whether the probe found the which-beam coherence already destroyed.
    pub collapsed_at_probe: bool,
    /// Whether the probe excited the atom.
    pub excited: bool,
    /// Whether the excitation decayed into a photon before detection.
    pub photon_emitted: bool,
    /// Beam the photon was emitted from, when there was one.
    pub emission_side: Option<Side>,
    /// How long before detection the photon left, when there was one, s.
    pub emission_time_before_detection: Option<f64>,
}

/// Aggregated counts of a full run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentStats {
    pub n_atoms: u64,
    /// Photons scattered by beam atoms.
    pub n_photons: u64,
    /// Photons whose emission side matched the detected side.
    pub correlated_photons: u64,
    /// Detections on the left beam.
    pub n_left: u64,
    /// Detections on the right beam.
    pub n_right: u64,
    /// Photon-detector dark counts over the run.
    pub noise_counts: u64,
    /// Run duration implied by the beam current, s.
    pub duration_s: f64,
}

impl ExperimentStats {
    /// Beam-photon fraction per atom.
    pub fn photon_rate(&self) -> f64 {
        if self.n_atoms == 0 {
            return 0.0;
        }
        self.n_photons as f64 / self.n_atoms as f64
    }

    /// Binomial standard error of [`photon_rate`](Self::photon_rate).
    pub fn photon_rate_stderr(&self) -> f64 {
        if self.n_atoms == 0 {
            return 0.0;
        }
        let p = self.photon_rate();
        (p * (1.0 - p) / self.n_atoms as f64).sqrt()
    }

    /// Everything the photon detector counted: beam photons plus noise.
    pub fn total_counts(&self) -> u64 {
        self.n_photons + self.noise_counts
    }
}

/// Per-run constants of the atom sampler, computed once and shared across
/// threads.
struct Context {
    master_seed: u64,
    efficiency: f64,
    /// Whether a fired collapse front has already reached the probe.
    collapsed_if_front_fires: bool,
    p_excite_collapsed: f64,
    p_excite_coherent: f64,
    decay_budget: f64,
    lifetime: f64,
}

impl Context {
    fn new(config: &ExperimentConfig) -> Result<Context> {
        config.validate()?;
        let dt = config.probe_time_before_detection();
        // The two sides are mirror images; the window does not depend on
        // which detector ends up firing.
        let collapsed_if_front_fires =
            quantum::state_at(config.scenario, dt, config, Side::L)?.is_collapsed();
        let phase = config.tuning()?.phase;
        let coherent = DensityMatrix2::coherent_twin(0.0);
        let p_excite_coherent =
            laser::excitation_probability(&coherent, phase, config.peak_excitation)?;
        let p_excite_collapsed = laser::excitation_probability(
            &coherent.selective_collapse(Side::L)?,
            phase,
            config.peak_excitation,
        )?;
        Ok(Context {
            master_seed: config.master_seed,
            efficiency: config.detector_efficiency,
            collapsed_if_front_fires,
            p_excite_collapsed,
            p_excite_coherent,
            decay_budget: config.decay_time_available(),
            lifetime: config.lifetime,
        })
    }
}

fn fair_side(rng: &mut ChaCha8Rng) -> Side {
    if rng.random::<bool>() {
        Side::R
    } else {
        Side::L
    }
}

/// The per-atom sampler; infallible because all validation happened when the
/// [`Context`] was built.
fn sample_atom(ctx: &Context, atom_index: u64) -> AtomOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.master_seed);
    rng.set_stream(atom_index);
    let detected_side = fair_side(&mut rng);
    let front_fired = rng.random::<f64>() < ctx.efficiency;
    let collapsed_at_probe = front_fired && ctx.collapsed_if_front_fires;
    let p_excite = if collapsed_at_probe {
        ctx.p_excite_collapsed
    } else {
        ctx.p_excite_coherent
    };
    let excited = rng.random::<f64>() < p_excite;
    let mut photon_emitted = false;
    let mut emission_time_before_detection = None;
    if excited {
        let decay_time = -ctx.lifetime * (1.0 - rng.random::<f64>()).ln();
        if decay_time <= ctx.decay_budget {
            photon_emitted = true;
            emission_time_before_detection = Some(ctx.decay_budget - decay_time);
        }
    }
    let emission_side = if !photon_emitted {
        None
    } else if collapsed_at_probe {
        Some(detected_side)
    } else {
        Some(fair_side(&mut rng))
    };
    AtomOutcome {
        atom_index,
        detected_side,
        collapsed_at_probe,
        excited,
        photon_emitted,
        emission_side,
        emission_time_before_detection,
    }
}

/// Simulates one atom on its own RNG stream. The outcome depends only on
/// `(config, atom_index)` — in particular not on `atom_count`, so shrinking
/// or growing a run never changes the atoms it shares with another run.
pub fn simulate_atom(config: &ExperimentConfig, atom_index: u64) -> Result<AtomOutcome> {
    let ctx = Context::new(config)?;
    Ok(sample_atom(&ctx, atom_index))
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    photons: u64,
    correlated: u64,
    left: u64,
    right: u64,
}

impl Tally {
    fn add(mut self, outcome: &AtomOutcome) -> Tally {
        self.photons += outcome.photon_emitted as u64;
        self.correlated +=
            (outcome.emission_side == Some(outcome.detected_side)) as u64;
        match outcome.detected_side {
            Side::L => self.left += 1,
            Side::R => self.right += 1,
        }
        self
    }

    fn merge(self, other: Tally) -> Tally {
        Tally {
            photons: self.photons + other.photons,
            correlated: self.correlated + other.correlated,
            left: self.left + other.left,
            right: self.right + other.right,
        }
    }
}

fn assemble(config: &ExperimentConfig, tally: Tally) -> Result<ExperimentStats> {
    Ok(ExperimentStats {
        n_atoms: config.atom_count,
        n_photons: tally.photons,
        correlated_photons: tally.correlated,
        n_left: tally.left,
        n_right: tally.right,
        noise_counts: draw_noise_counts(config)?,
        duration_s: config.run_duration(),
    })
}

/// Runs the full experiment: `atom_count` independent atoms in parallel plus
/// Poisson dark counts, aggregated into integer counts whose values do not
/// depend on scheduling.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentStats> {
    let ctx = Context::new(config)?;
    let tally = (0..config.atom_count)
        .into_par_iter()
        .fold(Tally::default, |tally, i| tally.add(&sample_atom(&ctx, i)))
        .reduce(Tally::default, Tally::merge);
    assemble(config, tally)
}

/// Like [`run`], but also returns every per-atom outcome in atom order.
pub fn run_traced(config: &ExperimentConfig) -> Result<(ExperimentStats, Vec<AtomOutcome>)> {
    let ctx = Context::new(config)?;
    let outcomes: Vec<AtomOutcome> = (0..config.atom_count)
        .into_par_iter()
        .map(|i| sample_atom(&ctx, i))
        .collect();
    let tally = outcomes.iter().fold(Tally::default(), Tally::add);
    Ok((assemble(config, tally)?, outcomes))
}

fn draw_noise_counts(config: &ExperimentConfig) -> Result<u64> {
    let mean = config.dark_rate * config.run_duration();
    if mean == 0.0 {
        return Ok(0);
    }
    if !mean.is_finite() {
        return Err(Error::NonFinite {
            context: "dark-count mean",
            value: mean,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(NOISE_STREAM);
    let poisson = Poisson::new(mean).map_err(|_| {
        Error::config(
            "dark_rate_per_s",
            format!("cannot draw dark counts with mean {mean}"),
        )
    })?;
    Ok(poisson.sample(&mut rng) as u64)
}

/// Analytic per-atom photon probability for a configuration — the exact
/// expectation the Monte Carlo estimates.
pub fn photon_probability(config: &ExperimentConfig) -> Result<f64> {
    let ctx = Context::new(config)?;
    let p_decay = laser::decay_probability(ctx.decay_budget, config.lifetime);
    let p_collapsed = if ctx.collapsed_if_front_fires {
        ctx.efficiency
    } else {
        0.0
    };
    Ok((p_collapsed * ctx.p_excite_collapsed + (1.0 - p_collapsed) * ctx.p_excite_coherent)
        * p_decay)
}

/// Pre-collapse window of the configured geometry and scenario, s.
pub fn precollapse_window(config: &ExperimentConfig) -> Result<f64> {
    let (a, b) = config.detector_events();
    let worldline = config.peak_worldline(Side::L)?;
    Ok(
        spacetime::precollapse_duration(&worldline, &a, &b, config.scenario.collapse_speed())?
            .duration,
    )
}

/// Upper tail `P(X ≥ k)` of a Poisson distribution with the given mean.
pub fn poisson_tail(k: u64, mean: f64) -> f64 {
    debug_assert!(mean >= 0.0);
    if k == 0 {
        return 1.0;
    }
    if mean == 0.0 {
        return 0.0;
    }
    // P(X ≥ k | λ) equals the regularised lower incomplete gamma P(k, λ).
    statrs::function::gamma::gamma_lr(k as f64, mean)
}

/// Smallest count whose upper-tail probability under the noise-only
/// hypothesis is at or below the significance level.
pub fn critical_count(noise_mean: f64, significance: f64) -> u64 {
    debug_assert!(noise_mean >= 0.0 && significance > 0.0 && significance < 1.0);
    // tail(0) = 1 > significance; grow an upper bracket, then bisect.
    let mut lo = 0u64;
    let mut hi = 1u64;
    while poisson_tail(hi, noise_mean) > significance {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if poisson_tail(mid, noise_mean) > significance {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// What a run's photon counts say about the collapse hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Photon excess inconsistent with noise: pre-collapse is real.
    HkConfirmed,
    /// Counts consistent with noise, and the run had the power to see the
    /// pre-collapse signal had it been there.
    Null,
    /// The counts decide nothing at the requested significance and power.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::HkConfirmed => write!(f, "hk-confirmed"),
            Verdict::Null => write!(f, "null"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Full paper trail of a [`null_test`] evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullTestReport {
    /// Total counts the photon detector saw (beam photons + noise).
    pub observed_counts: u64,
    /// Expected noise-only counts over the run.
    pub expected_noise: f64,
    /// Expected beam-photon counts if pre-collapse were real.
    pub expected_hk_photons: f64,
    pub significance: f64,
    /// One-sided tail probability of the observation under noise alone.
    pub p_value: f64,
    /// Smallest count that would have been significant.
    pub critical_count: u64,
    /// Probability that a pre-collapse signal would have reached the
    /// critical count.
    pub power: f64,
    pub verdict: Verdict,
    pub caveat: Option<String>,
}

/// One-sided Poisson test of the observed counts against the dark-count
/// expectation.
///
/// `expected_hk_photons` is the beam-photon count the pre-collapse
/// hypothesis predicts for the same run (atom count × per-atom photon
/// probability, e.g. via [`photon_probability`]); it sets the power of the
/// test when the counts come out consistent with noise.
pub fn null_test(
    stats: &ExperimentStats,
    dark_rate: f64,
    significance: f64,
    expected_hk_photons: f64,
) -> Result<NullTestReport> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::config(
            "significance",
            format!("must be in (0, 1), got {significance}"),
        ));
    }
    if !(dark_rate >= 0.0 && dark_rate.is_finite()) {
        return Err(Error::config(
            "dark_rate_per_s",
            format!("must be ≥ 0 and finite, got {dark_rate}"),
        ));
    }
    if !(expected_hk_photons >= 0.0 && expected_hk_photons.is_finite()) {
        return Err(Error::config(
            "expected_hk_photons",
            format!("must be ≥ 0 and finite, got {expected_hk_photons}"),
        ));
    }
    let expected_noise = dark_rate * stats.duration_s;
    let observed = stats.total_counts();
    let p_value = poisson_tail(observed, expected_noise);
    let critical = critical_count(expected_noise, significance);
    let power = poisson_tail(critical, expected_noise + expected_hk_photons);
    let (verdict, caveat) = if stats.n_atoms == 0 {
        (
            Verdict::Inconclusive,
            Some("no atoms were simulated".to_string()),
        )
    } else if p_value < significance {
        (Verdict::HkConfirmed, None)
    } else if power >= NULL_POWER_TARGET {
        let caveat = (expected_noise == 0.0).then(|| {
            "zero-noise baseline: the verdict rests on the absence of any count; \
             a single photon would have confirmed pre-collapse"
                .to_string()
        });
        (Verdict::Null, caveat)
    } else {
        (
            Verdict::Inconclusive,
            Some(format!(
                "power {power:.3} is below the {NULL_POWER_TARGET} target: \
                 this run could not have excluded pre-collapse"
            )),
        )
    };
    Ok(NullTestReport {
        observed_counts: observed,
        expected_noise,
        expected_hk_photons,
        significance,
        p_value,
        critical_count: critical,
        power,
        verdict,
        caveat,
    })
}

/// One cell of a collapse-speed × lead-time sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub scenario: ScenarioKind,
    /// Probe lead time (spot exit to detection), s.
    pub lead_time: f64,
    /// Lead at which coherence was evaluated, s.
    pub probe_time: f64,
    /// Pre-collapse window of this cell's front, s.
    pub window: f64,
    /// Analytic per-atom photon probability.
    pub expected_rate: f64,
    pub n_photons: u64,
    pub n_atoms: u64,
}

/// Runs the experiment over every (collapse speed, lead time) pair, in
/// row-major order with speeds outermost.
pub fn scenario_sweep(
    base: &ExperimentConfig,
    speeds: &[ExtendedSpeed],
    lead_times: &[f64],
) -> Result<Vec<SweepCell>> {
    if speeds.is_empty() || lead_times.is_empty() {
        return Err(Error::config(
            "sweep",
            "speeds and lead times must be non-empty".to_string(),
        ));
    }
    let mut cells = Vec::with_capacity(speeds.len() * lead_times.len());
    for &speed in speeds {
        let scenario = ScenarioKind::from_collapse_speed(speed)?;
        for &lead_time in lead_times {
            let config = ExperimentConfig {
                scenario,
                laser_lead_time: lead_time,
                ..base.clone()
            };
            let stats = run(&config)?;
            cells.push(SweepCell {
                scenario,
                lead_time,
                probe_time: config.probe_time_before_detection(),
                window: precollapse_window(&config)?,
                expected_rate: photon_probability(&config)?,
                n_photons: stats.n_photons,
                n_atoms: stats.n_atoms,
            });
        }
    }
    Ok(cells)
}
