//! Events, boosts, interval classification, collapse fronts, and the
//! pre-collapse window geometry.
//!
//! The working frame is the lab frame of the twin-beam apparatus: both
//! detectors fire simultaneously at `t = 0`, separated along the x axis.
//! A collapse front generalises the two textbook collapse hypersurfaces —
//! the past light cone (`s = c`) and the constant-time hyperplane
//! (`s = ∞`) — into a one-parameter family of backward cones
//! `t_apex − t = dist/s`. Everything *strictly inside* both detectors' cones
//! is still coherent; everything else has already collapsed (the boundary
//! counts as collapsed).

use crate::constants::C;
use crate::error::{Error, Result};
use crate::vec3;
use serde::{Deserialize, Serialize};

/// Relative tolerance used to call an interval lightlike.
pub const LIGHTLIKE_REL_TOL: f64 = 1e-9;

/// A spacetime event `(t, x, y, z)` in seconds and metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Event {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Event { t, x, y, z }
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Euclidean distance to another event's spatial point, metres.
    pub fn spatial_distance(&self, other: &Event) -> f64 {
        vec3::norm(vec3::sub(self.position(), other.position()))
    }

    /// Invariant interval `c²Δt² − |Δx|²` between two events, m².
    pub fn interval_squared(&self, other: &Event) -> f64 {
        let dt = self.t - other.t;
        let dr = self.spatial_distance(other);
        (C * dt) * (C * dt) - dr * dr
    }
}

/// Causal character of the separation between two events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalKind {
    Timelike,
    Spacelike,
    Lightlike,
}

/// A signal or collapse speed that may be infinite.
///
/// Finite values are signed: the 1-D velocity-addition law acts on signed
/// velocities, and an infinite velocity boosts to the finite value `−c²/V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedSpeed {
    Finite(f64),
    Infinite,
}

impl ExtendedSpeed {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedSpeed::Infinite)
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            ExtendedSpeed::Finite(v) => Some(*v),
            ExtendedSpeed::Infinite => None,
        }
    }
}

/// A collapse hypersurface: a backward cone of speed `s ≥ c` from an apex.
///
/// `s = c` is the past light cone; `s = ∞` the constant-time hyperplane
/// through the apex. Points with `t_apex − t ≥ dist/s` lie on or behind the
/// front (the not-yet-collapsed side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseFront {
    apex: Event,
    speed: ExtendedSpeed,
}

impl CollapseFront {
    /// Builds a front, rejecting finite speeds below c.
    pub fn new(apex: Event, speed: ExtendedSpeed) -> Result<Self> {
        if let ExtendedSpeed::Finite(s) = speed {
            if !(s >= C) {
                return Err(Error::InvalidCollapseSpeed { speed: s });
            }
        }
        Ok(CollapseFront { apex, speed })
    }

    pub fn apex(&self) -> Event {
        self.apex
    }

    pub fn speed(&self) -> ExtendedSpeed {
        self.speed
    }
}

/// An inertial worldline: an anchor event plus a constant subluminal velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Worldline {
    anchor: Event,
    velocity: [f64; 3],
}

impl Worldline {
    /// Builds a worldline, rejecting |v| ≥ c.
    pub fn new(anchor: Event, velocity: [f64; 3]) -> Result<Self> {
        let speed = vec3::norm(velocity);
        if !(speed < C) {
            return Err(Error::SuperluminalWorldline { speed });
        }
        Ok(Worldline { anchor, velocity })
    }

    pub fn anchor(&self) -> Event {
        self.anchor
    }

    pub fn velocity(&self) -> [f64; 3] {
        self.velocity
    }

    /// Spatial position at lab time `t`.
    pub fn position_at(&self, t: f64) -> [f64; 3] {
        vec3::add(
            self.anchor.position(),
            vec3::scale(self.velocity, t - self.anchor.t),
        )
    }
}

/// Result of a pre-collapse window computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecollapseWindow {
    /// Time before detection during which the worldline point is already
    /// collapsed, seconds.
    pub duration: f64,
    /// Set when the worldline was never strictly inside the coherent region,
    /// so the window is vacuously zero.
    pub degenerate: bool,
}

/// Boosts an event along x with velocity `v` (standard configuration).
pub fn boost_event(e: &Event, v: f64) -> Result<Event> {
    if !(v.abs() < C) {
        return Err(Error::InvalidBoost { speed: v });
    }
    let gamma = 1.0 / (1.0 - (v / C) * (v / C)).sqrt();
    Ok(Event {
        t: gamma * (e.t - v * e.x / (C * C)),
        x: gamma * (e.x - v * e.t),
        y: e.y,
        z: e.z,
    })
}

/// Transforms a signed 1-D signal velocity into the frame moving at `v_frame`.
///
/// Finite velocities follow the relativistic addition law
/// `v' = (v − V)/(1 − vV/c²)`; an infinite velocity maps to `−c²/V`, and a
/// finite velocity whose denominator vanishes maps to infinity. `|v| = c` is
/// a fixed point.
pub fn transform_velocity(v: ExtendedSpeed, v_frame: f64) -> Result<ExtendedSpeed> {
    if !(v_frame.abs() < C) {
        return Err(Error::InvalidBoost { speed: v_frame });
    }
    match v {
        ExtendedSpeed::Infinite => {
            if v_frame == 0.0 {
                Ok(ExtendedSpeed::Infinite)
            } else {
                Ok(ExtendedSpeed::Finite(-C * C / v_frame))
            }
        }
        ExtendedSpeed::Finite(v) => {
            let denom = 1.0 - v * v_frame / (C * C);
            if denom == 0.0 {
                Ok(ExtendedSpeed::Infinite)
            } else {
                Ok(ExtendedSpeed::Finite((v - v_frame) / denom))
            }
        }
    }
}

/// Classifies the interval between two events, with a relative lightlike band.
///
/// `|c²Δt² − |Δx|²|` below `LIGHTLIKE_REL_TOL` times the larger of the two
/// squared legs counts as lightlike; coincident events are lightlike.
pub fn classify_interval(a: &Event, b: &Event) -> IntervalKind {
    let dt2 = (C * (a.t - b.t)).powi(2);
    let dr2 = {
        let d = a.spatial_distance(b);
        d * d
    };
    let s2 = dt2 - dr2;
    let scale = dt2.max(dr2);
    if s2.abs() <= LIGHTLIKE_REL_TOL * scale {
        IntervalKind::Lightlike
    } else if s2 > 0.0 {
        IntervalKind::Timelike
    } else {
        IntervalKind::Spacelike
    }
}

/// True when `p` lies in the collapsed region of `front`.
///
/// The collapsed region is the closed complement of the strict interior of
/// the front's backward cone, so boundary points count as collapsed.
pub fn in_collapsed_region(p: &Event, front: &CollapseFront) -> bool {
    let lead = front.apex.t - p.t; // time before the apex
    match front.speed {
        // Constant-time hyperplane: only strictly-earlier points are untouched.
        ExtendedSpeed::Infinite => lead <= 0.0,
        ExtendedSpeed::Finite(s) => {
            let dist = p.spatial_distance(&front.apex);
            // Strictly inside the cone means s·lead > dist.
            !(s * lead > dist)
        }
    }
}

fn require_simultaneous_spacelike(a: &Event, b: &Event) -> Result<()> {
    if a.t != b.t {
        return Err(Error::UnsupportedConfiguration { t_a: a.t, t_b: b.t });
    }
    match classify_interval(a, b) {
        IntervalKind::Spacelike => Ok(()),
        IntervalKind::Timelike => Err(Error::InvalidGeometry {
            found: "found a timelike separation",
        }),
        IntervalKind::Lightlike => Err(Error::InvalidGeometry {
            found: "found a lightlike separation",
        }),
    }
}

/// True when `p` is strictly inside the joint coherent region of two
/// simultaneous spacelike detection events with collapse speed `s`.
///
/// The coherent region is the intersection of the strict interiors of both
/// detectors' backward cones; everything else — boundaries included — has
/// collapsed.
pub fn coherent_region_contains(
    p: &Event,
    a: &Event,
    b: &Event,
    s: ExtendedSpeed,
) -> Result<bool> {
    require_simultaneous_spacelike(a, b)?;
    let front_a = CollapseFront::new(*a, s)?;
    let front_b = CollapseFront::new(*b, s)?;
    Ok(!in_collapsed_region(p, &front_a) && !in_collapsed_region(p, &front_b))
}

/// The latest event from which both detections are still reachable at speed c:
/// the joint pre-collapse apex, at the midpoint a half light-crossing early.
pub fn precollapse_apex(a: &Event, b: &Event) -> Result<Event> {
    require_simultaneous_spacelike(a, b)?;
    let d = a.spatial_distance(b);
    Ok(Event {
        t: a.t - d / (2.0 * C),
        x: 0.5 * (a.x + b.x),
        y: 0.5 * (a.y + b.y),
        z: 0.5 * (a.z + b.z),
    })
}

/// Lead time before detection at which `w` crosses the boundary of the
/// backward cone of speed `s` apexed at `apex` (at the detection time).
///
/// Solves `s²(t_det − t)² = |x_w(t) − x_apex|²` for the non-negative root.
/// Scaled by `1/s` so arbitrarily large finite speeds stay well-conditioned.
fn cone_exit_lead(w: &Worldline, apex: &Event, s: f64) -> f64 {
    let d0 = vec3::sub(w.position_at(apex.t), apex.position());
    let inv = 1.0 / s;
    let v = w.velocity();
    let vr = vec3::norm(v) * inv; // |v|/s < 1
    let qa = 1.0 - vr * vr;
    let qb = vec3::dot(d0, v) * inv * inv;
    let qc = vec3::norm(d0) * inv;
    let disc = (qb * qb + qa * qc * qc).sqrt();
    if qb > 0.0 {
        // Rationalised form avoids cancellation when the linear term dominates.
        qc * qc / (qb + disc)
    } else {
        (disc - qb) / qa
    }
}

/// Computes how long before its detection a wavepacket on `w` is already
/// collapsed, for simultaneous spacelike detections at `a` and `b`.
///
/// The worldline leaves the joint coherent region when it first crosses
/// either detector's front; the window is the remaining flight time. For
/// `s = ∞` the coherent region extends right up to the detection instant and
/// the window is zero.
pub fn precollapse_duration(
    w: &Worldline,
    a: &Event,
    b: &Event,
    s: ExtendedSpeed,
) -> Result<PrecollapseWindow> {
    require_simultaneous_spacelike(a, b)?;
    let s = match CollapseFront::new(*a, s)?.speed() {
        ExtendedSpeed::Infinite => {
            return Ok(PrecollapseWindow {
                duration: 0.0,
                degenerate: false,
            })
        }
        ExtendedSpeed::Finite(s) => s,
    };
    let lead_a = cone_exit_lead(w, a, s);
    let lead_b = cone_exit_lead(w, b, s);
    // Inside-both ends at the earlier of the two crossings, i.e. the larger lead.
    let duration = lead_a.max(lead_b);
    Ok(PrecollapseWindow {
        duration,
        degenerate: duration == 0.0,
    })
}

/// Largest collapse-front speed a probe placed `dt` before detection can
/// discriminate from instantaneous collapse, for beam separation `d`.
///
/// A front of speed `s` collapses the wavepackets during the final `d/s` of
/// flight, so the probe sees pre-collapse exactly when `s ≤ d/dt`.
pub fn collapse_speed_bound(d: f64, dt: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::config("separation", format!("must be > 0, got {d}")));
    }
    if !(dt > 0.0) {
        return Err(Error::config(
            "probe lead time",
            format!("must be > 0, got {dt}"),
        ));
    }
    Ok(d / dt)
}
