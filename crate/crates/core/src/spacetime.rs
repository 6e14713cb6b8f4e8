//! Minkowski geometry: events, intervals, causal order, and the protocol's
//! point layout.
//!
//! Natural units with c = 1 throughout. The metric signature is (+,−,−,−),
//! so `interval_squared` is positive for timelike pairs, negative for
//! spacelike pairs and zero on the light cone. The causal order uses the
//! closed future light cone: exact light-speed delivery is permitted.

use std::fmt;

use thiserror::Error;

/// Relative tolerance under which an interval counts as lightlike.
///
/// An interval² with |s²| ≤ `LIGHTLIKE_TOLERANCE · max(1, Δt²)` is treated
/// as zero, so geometry assembled from ordinary floating-point arithmetic
/// still lands exactly on the cone.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-9;

/// A point (x, y, z, t) in Minkowski coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl Event {
    pub const fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Event { x, y, z, t }
    }

    pub const fn origin() -> Self {
        Event::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.t.is_finite()
    }

    pub fn position(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Euclidean distance between the spatial parts.
    pub fn spatial_distance(&self, other: &Event) -> f64 {
        spatial_distance(self.position(), other.position())
    }

    /// Euclidean distance in all four coordinates; used for timing checks
    /// against designated anchors.
    pub fn coordinate_distance(&self, other: &Event) -> f64 {
        let dt = self.t - other.t;
        (self.spatial_distance(other).powi(2) + dt * dt).sqrt()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.x, self.y, self.z, self.t)
    }
}

pub fn spatial_distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Squared Minkowski interval s² = Δt² − Δx² − Δy² − Δz².
///
/// Symmetric in its arguments; zero exactly when the events are
/// lightlike-separated.
pub fn interval_squared(a: Event, b: Event) -> f64 {
    let dt = b.t - a.t;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let dz = b.z - a.z;
    dt * dt - dx * dx - dy * dy - dz * dz
}

fn lightlike_slack(a: Event, b: Event) -> f64 {
    let dt = b.t - a.t;
    LIGHTLIKE_TOLERANCE * f64::max(1.0, dt * dt)
}

/// Whether the interval between `a` and `b` is lightlike to tolerance.
pub fn is_lightlike(a: Event, b: Event) -> bool {
    interval_squared(a, b).abs() <= lightlike_slack(a, b)
}

/// Closed-future-light-cone causal order: true iff `b` is reachable from
/// `a` at or below light speed (`b.t ≥ a.t` and interval² ≥ 0, within the
/// lightlike tolerance). Every event precedes itself.
pub fn causally_precedes(a: Event, b: Event) -> bool {
    b.t >= a.t && interval_squared(a, b) >= -lightlike_slack(a, b)
}

/// Arrival event of a light-speed signal emitted at `from` toward the
/// static spatial point `position`.
pub fn light_arrival(from: Event, position: [f64; 3]) -> Event {
    let d = spatial_distance(from.position(), position);
    Event::new(position[0], position[1], position[2], from.t + d)
}

/// Boost along the x axis with the given rapidity. The squared interval
/// between any two events is invariant under applying this to both.
pub fn boost_x(e: Event, rapidity: f64) -> Event {
    let ch = rapidity.cosh();
    let sh = rapidity.sinh();
    Event::new(e.x * ch - e.t * sh, e.y, e.z, e.t * ch - e.x * sh)
}

/// One of the two unveiling directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wing {
    Q0,
    Q1,
}

impl Wing {
    pub const BOTH: [Wing; 2] = [Wing::Q0, Wing::Q1];

    pub fn index(self) -> usize {
        match self {
            Wing::Q0 => 0,
            Wing::Q1 => 1,
        }
    }

    pub fn from_index(i: usize) -> Wing {
        match i {
            0 => Wing::Q0,
            1 => Wing::Q1,
            _ => panic!("wing index out of range: {i}"),
        }
    }

    pub fn other(self) -> Wing {
        match self {
            Wing::Q0 => Wing::Q1,
            Wing::Q1 => Wing::Q0,
        }
    }
}

impl fmt::Display for Wing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("geometry scale x must be a positive finite real, got {0}")]
    InvalidScale(f64),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("lab processing delay must be non-negative and finite, got {0}")]
    InvalidDelay(f64),
    #[error("offset anchor {anchor} at {offset} is not causally ordered with {base}")]
    AcausalOffset {
        anchor: &'static str,
        base: Event,
        offset: Event,
    },
}

/// Spatial displacement plus processing delay of one laboratory relative to
/// its ideal protocol point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabOffset {
    pub displacement: [f64; 3],
    pub delay: f64,
}

impl LabOffset {
    pub const fn none() -> Self {
        LabOffset {
            displacement: [0.0, 0.0, 0.0],
            delay: 0.0,
        }
    }

    pub fn new(displacement: [f64; 3], delay: f64) -> Self {
        LabOffset {
            displacement,
            delay,
        }
    }

    fn validate(&self) -> Result<(), GeometryError> {
        if !(self.delay.is_finite() && self.delay >= 0.0) {
            return Err(GeometryError::InvalidDelay(self.delay));
        }
        if self.displacement.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(())
    }
}

/// Per-lab offsets for Bob's three laboratories. Alice's agents sit exactly
/// at P, Q0 and Q1; only Bob's labs are displaced in the non-ideal layout.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabOffsets {
    /// Bob's preparation lab, displaced into the causal past of P.
    pub prep: LabOffset,
    /// Bob's receiving labs, displaced into the causal futures of Q0/Q1.
    pub wings: [LabOffset; 2],
}

/// Anchor events for one protocol run.
///
/// `p`, `q0`, `q1` are the agreed protocol points; `bob_prep` is where Bob
/// prepares states (causal past of P) and `bob_wing[i]` is where his agent
/// receives the wing-i unveiling (causal future of Qi).
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub x: f64,
    pub p: Event,
    pub q0: Event,
    pub q1: Event,
    pub offsets: LabOffsets,
    pub bob_prep: Event,
    pub bob_wings: [Event; 2],
    /// Static worldline on which Bob performs the cross-wing comparison.
    pub comparison_position: [f64; 3],
}

impl Geometry {
    pub fn q(&self, wing: Wing) -> Event {
        match wing {
            Wing::Q0 => self.q0,
            Wing::Q1 => self.q1,
        }
    }

    pub fn bob_wing(&self, wing: Wing) -> Event {
        self.bob_wings[wing.index()]
    }

    /// Earliest event on the comparison worldline lying in the joint causal
    /// future of both wing receptions.
    pub fn comparison_event(&self, r0: Event, r1: Event) -> Event {
        let w = self.comparison_position;
        let t0 = r0.t + spatial_distance(r0.position(), w);
        let t1 = r1.t + spatial_distance(r1.position(), w);
        Event::new(w[0], w[1], w[2], f64::max(t0, t1))
    }
}

/// Ideal layout: P at the origin, Q0 = (x, 0, 0, x) and Q1 = (−x, 0, 0, x)
/// lightlike-separated from P, all of Bob's labs coincident with the
/// protocol points.
pub fn standard_geometry(x: f64) -> Result<Geometry, GeometryError> {
    offset_geometry(x, LabOffsets::default())
}

/// Non-ideal layout with Bob's labs displaced from the protocol points.
///
/// Each wing anchor Q'i = Qi + (displacement, delay) must stay in the
/// causal future of Qi, and the preparation anchor P' = P + (displacement,
/// −delay) must stay in the causal past of P; violating offsets are
/// rejected.
pub fn offset_geometry(x: f64, offsets: LabOffsets) -> Result<Geometry, GeometryError> {
    if !(x.is_finite() && x > 0.0) {
        return Err(GeometryError::InvalidScale(x));
    }
    offsets.prep.validate()?;
    offsets.wings[0].validate()?;
    offsets.wings[1].validate()?;

    let p = Event::origin();
    let q0 = Event::new(x, 0.0, 0.0, x);
    let q1 = Event::new(-x, 0.0, 0.0, x);

    let d = offsets.prep.displacement;
    let bob_prep = Event::new(p.x + d[0], p.y + d[1], p.z + d[2], p.t - offsets.prep.delay);
    if !causally_precedes(bob_prep, p) {
        return Err(GeometryError::AcausalOffset {
            anchor: "P'",
            base: p,
            offset: bob_prep,
        });
    }

    let mut bob_wings = [p; 2];
    for (i, q) in [q0, q1].into_iter().enumerate() {
        let o = offsets.wings[i];
        let anchor = Event::new(
            q.x + o.displacement[0],
            q.y + o.displacement[1],
            q.z + o.displacement[2],
            q.t + o.delay,
        );
        if !causally_precedes(q, anchor) {
            return Err(GeometryError::AcausalOffset {
                anchor: if i == 0 { "Q0'" } else { "Q1'" },
                base: q,
                offset: anchor,
            });
        }
        bob_wings[i] = anchor;
    }

    Ok(Geometry {
        x,
        p,
        q0,
        q1,
        offsets,
        bob_prep,
        bob_wings,
        comparison_position: [0.0, 0.0, 0.0],
    })
}

/// Latest moment on the static worldline at `position` from which both of
/// Bob's unveiling receptions are still causally reachable.
///
/// This is the supremum time T such that `(position, T)` causally precedes
/// both `q0b` and `q1b`; a commitment made on that worldline later than T
/// could not have produced data at both receptions.
pub fn latest_binding_time(
    q0b: Event,
    q1b: Event,
    position: [f64; 3],
) -> Result<f64, GeometryError> {
    if !q0b.is_finite() || !q1b.is_finite() || position.iter().any(|c| !c.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let t0 = q0b.t - spatial_distance(q0b.position(), position);
    let t1 = q1b.t - spatial_distance(q1b.position(), position);
    Ok(f64::min(t0, t1))
}
