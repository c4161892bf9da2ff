//! Adaptive arc-length integration of the weighted geodesic systems with
//! dense output and event localization.
//!
//! All three systems share the same shape: unit-speed position with tangent
//! angle psi turning at the rate `d(phi)/dn`, the derivative of the metric's
//! log-weight along the leftward normal. The stepper is a Dormand-Prince
//! 5(4) pair with the standard quartic continuous extension.

mod axis;
mod event;
mod trajectory;

pub use axis::{
    axis_hit_report, axis_series, start_from_axis, start_from_axis_at, AxisSeries,
    DEFAULT_AXIS_HANDOFF,
};
pub use event::{EventDirection, EventKind, EventSpec};
pub use trajectory::{EventRecord, Terminal, Trajectory};

use crate::error::{Error, Result};
use crate::geometry::{MetricKind, MetricSpec};

/// Arc-length phase point of a profile geodesic: position (u, v), tangent
/// angle psi, arc length s. Unit speed holds by construction: the position
/// derivative is (cos psi, sin psi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileState {
    pub u: f64,
    pub v: f64,
    pub psi: f64,
    pub s: f64,
}

impl ProfileState {
    pub fn new(u: f64, v: f64, psi: f64) -> Self {
        ProfileState { u, v, psi, s: 0.0 }
    }
}

/// Axis-aligned integration window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl BBox {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Self {
        BBox {
            u_min,
            u_max,
            v_min,
            v_max,
        }
    }

    fn clearance(&self, u: f64, v: f64) -> f64 {
        (u - self.u_min)
            .min(self.u_max - u)
            .min(v - self.v_min)
            .min(self.v_max - v)
    }
}

/// Default window: [-3 sqrt(2n), 3 sqrt(2n)]^2 intersected with the domain
/// (scaled by the sphere radius for the other kinds).
pub fn default_bbox(m: &MetricSpec) -> BBox {
    let r = 3.0 * m.sphere_radius();
    match m.kind {
        MetricKind::Rotational { .. } => BBox::new(-r, r, 0.0, r),
        MetricKind::BiRotational { .. } => BBox::new(0.0, r, 0.0, r),
        MetricKind::Planar => BBox::new(-r, r, -r, r),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Localization tolerance for events, in arc length.
    pub event_tol: f64,
    /// Number of intervals in the event scan grid over [0, s_max].
    pub scan_points: usize,
    /// Axis handoff radius: integration stops when the singular coordinate
    /// drops below this.
    pub floor_radius: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Accept steps against an error-per-unit-step budget instead of
    /// error-per-step. Costs more steps but makes accumulated quantities
    /// (conserved-law drifts) scale at least linearly with the tolerance.
    pub error_per_unit_step: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            event_tol: 1e-12,
            scan_points: 10_000,
            floor_radius: DEFAULT_AXIS_HANDOFF,
            h_max: 0.5,
            max_steps: 2_000_000,
            error_per_unit_step: false,
        }
    }
}

impl IntegrateOptions {
    pub fn with_tolerances(mut self, rel: f64, abs: f64) -> Self {
        self.rel_tol = rel;
        self.abs_tol = abs;
        self
    }
}

/// Right-hand side of the unit-speed geodesic system.
pub(crate) fn rhs(m: &MetricSpec, u: f64, v: f64, psi: f64) -> [f64; 3] {
    let (cp, sp) = (psi.cos(), psi.sin());
    let (gu, gv) = m.grad_phi(crate::geometry::Point::new(u, v));
    [cp, sp, -gu * sp + gv * cp]
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights for the fifth interpolation coefficient.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

type Vec3 = [f64; 3];

fn axpy(y: &Vec3, k: &[Vec3], coeff: &[f64], h: f64) -> Vec3 {
    let mut out = *y;
    for (ki, &ci) in k.iter().zip(coeff) {
        if ci != 0.0 {
            for j in 0..3 {
                out[j] += h * ci * ki[j];
            }
        }
    }
    out
}

struct StepResult {
    y1: Vec3,
    err_norm: f64,
    k: [Vec3; 7],
}

fn try_step(m: &MetricSpec, y0: &Vec3, k1: &Vec3, h: f64, opts: &IntegrateOptions) -> Option<StepResult> {
    let mut k = [[0.0; 3]; 7];
    k[0] = *k1;
    for i in 0..6 {
        let yi = axpy(y0, &k[..=i], &A[i][..=i], h);
        if !m.in_domain(yi[0], yi[1]) || !yi.iter().all(|x| x.is_finite()) {
            return None;
        }
        k[i + 1] = rhs(m, yi[0], yi[1], yi[2]);
        let _ = C[i];
    }
    // Stage 7 is evaluated at the solution point: k[6] is FSAL.
    let y1 = axpy(y0, &k[..6], &A[5], h);
    if !m.in_domain(y1[0], y1[1]) || !y1.iter().all(|x| x.is_finite()) {
        return None;
    }

    let mut err_norm: f64 = 0.0;
    for j in 0..3 {
        let mut e = 0.0;
        for i in 0..7 {
            e += ERR[i] * k[i][j];
        }
        e *= h;
        let sc = opts.abs_tol + opts.rel_tol * y0[j].abs().max(y1[j].abs());
        err_norm += (e / sc) * (e / sc);
    }
    err_norm = (err_norm / 3.0).sqrt();
    if opts.error_per_unit_step {
        err_norm /= h.min(1.0);
    }
    if !err_norm.is_finite() {
        return None;
    }
    Some(StepResult { y1, err_norm, k })
}

fn dense_coeffs(y0: &Vec3, y1: &Vec3, k: &[Vec3; 7], h: f64) -> [[f64; 3]; 5] {
    let mut rcont = [[0.0; 3]; 5];
    for j in 0..3 {
        let ydiff = y1[j] - y0[j];
        let bspl = h * k[0][j] - ydiff;
        rcont[0][j] = y0[j];
        rcont[1][j] = ydiff;
        rcont[2][j] = bspl;
        rcont[3][j] = ydiff - h * k[6][j] - bspl;
        let mut c5 = 0.0;
        for i in 0..7 {
            c5 += D[i] * k[i][j];
        }
        rcont[4][j] = h * c5;
    }
    rcont
}

fn initial_step(m: &MetricSpec, y0: &Vec3, f0: &Vec3, s_max: f64, opts: &IntegrateOptions) -> f64 {
    let sc = |j: usize| opts.abs_tol + opts.rel_tol * y0[j].abs();
    let d0 = (0..3).map(|j| (y0[j] / sc(j)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..3).map(|j| (f0[j] / sc(j)).powi(2)).sum::<f64>().sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(opts.h_max).min(s_max);
    let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1], y0[2] + h0 * f0[2]];
    if !m.in_domain(y1[0], y1[1]) {
        return (h0 * 1e-3).max(1e-10);
    }
    let f1 = rhs(m, y1[0], y1[1], y1[2]);
    let d2 = (0..3)
        .map(|j| ((f1[j] - f0[j]) / sc(j)).powi(2))
        .sum::<f64>()
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(opts.h_max).min(s_max)
}

/// Scalar monitors whose zero crossing ends the trajectory inside a step.
enum Cut {
    Floor,
    Box,
}

/// Integrates the geodesic system from `initial` until `s_max`, a bounding
/// box exit, or an approach to a singular axis below the handoff radius;
/// then localizes every requested event on the dense output.
pub fn integrate(
    m: &MetricSpec,
    initial: ProfileState,
    events: &[EventSpec],
    s_max: f64,
    bbox: BBox,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    m.check_domain(crate::geometry::Point::new(initial.u, initial.v))?;
    if !(s_max > 0.0) {
        return Err(Error::Input(format!("s_max = {s_max} must be > 0")));
    }
    if !initial.psi.is_finite() {
        return Err(Error::Input("initial tangent angle must be finite".into()));
    }

    let floor = opts.floor_radius;
    // Distance to the nearest terminating floor (negative = past it).
    let floor_clearance = |u: f64, v: f64| -> f64 {
        match m.kind {
            MetricKind::Rotational { .. } => v - floor,
            MetricKind::BiRotational { .. } => (u - floor).min(v - floor),
            MetricKind::Planar => f64::MAX,
        }
    };

    let mut s = 0.0f64;
    let mut y: Vec3 = [initial.u, initial.v, initial.psi];
    let mut k1 = rhs(m, y[0], y[1], y[2]);
    let mut h = initial_step(m, &y, &k1, s_max, opts);
    let mut steps: Vec<trajectory::DenseStep> = Vec::new();
    let terminal;
    let mut facmax = 10.0;
    let mut err_prev = 1e-4f64;

    let h_floor_abs = 1e-14;
    let mut nsteps = 0usize;

    loop {
        if nsteps >= opts.max_steps {
            terminal = Terminal::StepFailure;
            break;
        }
        nsteps += 1;

        let last = s + h >= s_max;
        if last {
            h = s_max - s;
        }

        match try_step(m, &y, &k1, h, opts) {
            Some(step) if step.err_norm <= 1.0 => {
                let rcont = dense_coeffs(&y, &step.y1, &step.k, h);
                let mut dense = trajectory::DenseStep {
                    s0: s,
                    h_poly: h,
                    span: h,
                    rcont,
                };

                // Look for floor / box crossings inside the accepted step.
                let mut cut: Option<(f64, Cut)> = None;
                for (kind, clear) in [
                    (Cut::Floor, &floor_clearance as &dyn Fn(f64, f64) -> f64),
                    (Cut::Box, &|u, v| bbox.clearance(u, v)),
                ] {
                    let g = |sq: f64| {
                        let yq = dense.eval(sq);
                        clear(yq[0], yq[1])
                    };
                    let mut prev_s = s;
                    let mut prev_g = g(prev_s);
                    for q in 1..=4 {
                        let sq = s + h * q as f64 / 4.0;
                        let gq = g(sq);
                        if prev_g > 0.0 && gq <= 0.0 {
                            // Bisect the first crossing.
                            let (mut lo, mut hi) = (prev_s, sq);
                            for _ in 0..80 {
                                if hi - lo <= opts.event_tol {
                                    break;
                                }
                                let mid = 0.5 * (lo + hi);
                                if g(mid) > 0.0 {
                                    lo = mid;
                                } else {
                                    hi = mid;
                                }
                            }
                            let s_cut = 0.5 * (lo + hi);
                            if cut.as_ref().map_or(true, |(sc, _)| s_cut < *sc) {
                                cut = Some((s_cut, kind));
                            }
                            break;
                        }
                        prev_s = sq;
                        prev_g = gq;
                    }
                }

                if let Some((s_cut, kind)) = cut {
                    dense.span = s_cut - s;
                    let y_cut = dense.eval(s_cut);
                    steps.push(dense);
                    y = y_cut;
                    s = s_cut;
                    terminal = match kind {
                        Cut::Floor => Terminal::HitFloor,
                        Cut::Box => Terminal::LeftBoundingBox,
                    };
                    break;
                }

                steps.push(dense);
                s += h;
                y = step.y1;
                k1 = step.k[6];

                if last {
                    terminal = Terminal::ReachedMaxArcLength;
                    s = s_max;
                    break;
                }

                // PI step controller (Gustafsson): the smoothed error
                // sequence keeps invariant drift close to its systematic
                // linear-in-tolerance component.
                let scale = if step.err_norm == 0.0 {
                    facmax
                } else {
                    let beta = 0.04;
                    let alpha = 0.2 - 0.75 * beta;
                    (0.9 * step.err_norm.powf(-alpha) * err_prev.powf(beta)).clamp(0.2, facmax)
                };
                err_prev = step.err_norm.max(1e-4);
                facmax = 10.0;
                h = (h * scale).min(opts.h_max);
            }
            other => {
                // Rejected: either the error was too large or a stage left
                // the domain / overflowed.
                let shrink = match other {
                    Some(step) => (0.9 * step.err_norm.powf(-0.2)).clamp(0.1, 0.9),
                    None => 0.25,
                };
                h *= shrink;
                facmax = 1.0;
                if h < h_floor_abs * s.abs().max(1.0) {
                    terminal = Terminal::StepFailure;
                    break;
                }
            }
        }
    }

    let end = ProfileState {
        u: y[0],
        v: y[1],
        psi: y[2],
        s,
    };
    let mut traj = Trajectory::new(*m, steps, terminal, initial_with_s0(initial), end);
    traj.events = event::scan_events(&traj, events, s_max, opts.scan_points, opts.event_tol, floor);
    if terminal == Terminal::HitFloor {
        // A requested floor event is reported at the terminal state.
        for spec in events {
            if matches!(spec.kind, EventKind::HitsFloor) {
                traj.events.push(EventRecord {
                    id: spec.id.clone(),
                    s,
                    state: end,
                });
            }
        }
    }
    Ok(traj)
}

fn initial_with_s0(mut st: ProfileState) -> ProfileState {
    st.s = 0.0;
    st
}

/// Tangent angle at the given occurrence (0-based) of an event.
pub fn crossing_angle(t: &Trajectory, event_id: &str, occurrence: usize) -> Result<f64> {
    t.events_with_id(event_id)
        .nth(occurrence)
        .map(|e| e.state.psi)
        .ok_or_else(|| {
            Error::NotFound(format!(
                "event '{event_id}' occurrence {occurrence} (have {})",
                t.events_with_id(event_id).count()
            ))
        })
}
