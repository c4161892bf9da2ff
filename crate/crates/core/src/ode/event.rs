//! Event specification and localization on dense output.

use super::trajectory::{EventRecord, Trajectory};
use super::ProfileState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// u = 0 (the r-axis of the half-plane).
    CrossesVerticalAxis,
    /// u = v (the diagonal of the quadrant).
    CrossesDiagonal,
    /// sin(psi) = 0: tangent parallel to the u-axis.
    TangentHorizontal,
    /// cos(psi) = 0: tangent parallel to the v-axis.
    TangentVertical,
    /// v = const.
    HitsLine(f64),
    /// v reaches the axis handoff radius; normally reported through the
    /// HitFloor terminal rather than a sign change.
    HitsFloor,
    /// psi = const (mod 2 pi).
    ReachesAngle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    Rising,
    Falling,
    Any,
}

#[derive(Debug, Clone)]
pub struct EventSpec {
    pub id: String,
    pub kind: EventKind,
    pub direction: EventDirection,
}

impl EventSpec {
    pub fn new(id: impl Into<String>, kind: EventKind, direction: EventDirection) -> Self {
        EventSpec {
            id: id.into(),
            kind,
            direction,
        }
    }

    pub fn any(id: impl Into<String>, kind: EventKind) -> Self {
        EventSpec::new(id, kind, EventDirection::Any)
    }

    /// Scalar event function; events are located at its zero crossings.
    pub fn eval(&self, st: &ProfileState, floor_radius: f64) -> f64 {
        match self.kind {
            EventKind::CrossesVerticalAxis => st.u,
            EventKind::CrossesDiagonal => st.u - st.v,
            EventKind::TangentHorizontal => st.psi.sin(),
            EventKind::TangentVertical => st.psi.cos(),
            EventKind::HitsLine(v0) => st.v - v0,
            EventKind::HitsFloor => st.v - floor_radius,
            EventKind::ReachesAngle(psi0) => (0.5 * (st.psi - psi0)).sin(),
        }
    }
}

fn direction_matches(dir: EventDirection, before: f64, after: f64) -> bool {
    match dir {
        EventDirection::Any => true,
        EventDirection::Rising => before < after,
        EventDirection::Falling => before > after,
    }
}

/// Localizes all sign changes of each event function on the dense output.
///
/// Scans a uniform grid of `scan_points` intervals covering [0, s_max]
/// restricted to [0, s_end], then bisects each strict sign change to
/// `event_tol` in s. An exact interior zero at a grid node is kept when the
/// neighbors straddle zero; a zero at launch is never an event.
pub(crate) fn scan_events(
    traj: &Trajectory,
    specs: &[EventSpec],
    s_max: f64,
    scan_points: usize,
    event_tol: f64,
    floor_radius: f64,
) -> Vec<EventRecord> {
    let mut found: Vec<EventRecord> = Vec::new();
    if traj.s_end <= 0.0 || specs.is_empty() {
        return found;
    }
    let ds = s_max / scan_points as f64;
    let n = (traj.s_end / ds).ceil() as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| (i as f64 * ds).min(traj.s_end))
        .collect();

    for spec in specs {
        let g: Vec<f64> = grid
            .iter()
            .map(|&s| spec.eval(&traj.sample(s), floor_radius))
            .collect();
        for i in 0..n {
            let (ga, gb) = (g[i], g[i + 1]);
            if ga == 0.0 {
                // Interior node exactly on the zero set.
                if i > 0 && g[i - 1] * gb < 0.0 && direction_matches(spec.direction, g[i - 1], gb) {
                    found.push(EventRecord {
                        id: spec.id.clone(),
                        s: grid[i],
                        state: traj.sample(grid[i]),
                    });
                }
                continue;
            }
            if ga * gb < 0.0 && direction_matches(spec.direction, ga, gb) {
                let s_star = bisect_zero(
                    |s| spec.eval(&traj.sample(s), floor_radius),
                    grid[i],
                    grid[i + 1],
                    ga,
                    event_tol,
                );
                found.push(EventRecord {
                    id: spec.id.clone(),
                    s: s_star,
                    state: traj.sample(s_star),
                });
            }
        }
    }
    found.sort_by(|a, b| a.s.total_cmp(&b.s));
    found
}

fn bisect_zero<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, f_lo: f64, tol: f64) -> f64 {
    let mut fl = f_lo;
    for _ in 0..80 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fl * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            fl = fm;
        }
    }
    0.5 * (lo + hi)
}
