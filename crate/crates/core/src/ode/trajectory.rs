//! Dense-output trajectory storage.

use crate::geometry::{MetricSpec, Point};

use super::{rhs, ProfileState};

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    ReachedMaxArcLength,
    /// Came within the handoff radius of a singular axis (r = 0 in the
    /// half-plane; either axis in the quadrant).
    HitFloor,
    LeftBoundingBox,
    /// Step size underflowed or the step budget ran out.
    StepFailure,
}

/// One accepted integrator step with its quartic interpolant.
///
/// The interpolant is valid for theta in [0, span / h_poly]; `span` is
/// shorter than `h_poly` when the step was truncated at a floor or box
/// crossing.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep {
    pub s0: f64,
    pub h_poly: f64,
    pub span: f64,
    pub rcont: [[f64; 3]; 5],
}

impl DenseStep {
    pub fn eval(&self, s: f64) -> [f64; 3] {
        let theta = ((s - self.s0) / self.h_poly).clamp(0.0, self.span / self.h_poly);
        let t1 = 1.0 - theta;
        let mut y = [0.0; 3];
        for i in 0..3 {
            let r = &self.rcont;
            y[i] = r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i])));
        }
        y
    }
}

/// A localized event occurrence.
#[derive(Debug, Clone)]
pub struct EventRecord {
    pub id: String,
    pub s: f64,
    pub state: ProfileState,
}

/// Dense-output integrated geodesic with localized event records.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub metric: MetricSpec,
    pub(crate) steps: Vec<DenseStep>,
    pub events: Vec<EventRecord>,
    pub terminal: Terminal,
    pub s_end: f64,
    initial: ProfileState,
    end: ProfileState,
}

impl Trajectory {
    pub(crate) fn new(
        metric: MetricSpec,
        steps: Vec<DenseStep>,
        terminal: Terminal,
        initial: ProfileState,
        end: ProfileState,
    ) -> Self {
        let s_end = end.s;
        Trajectory {
            metric,
            steps,
            events: Vec::new(),
            terminal,
            s_end,
            initial,
            end,
        }
    }

    pub fn initial_state(&self) -> ProfileState {
        self.initial
    }

    pub fn end_state(&self) -> ProfileState {
        self.end
    }

    /// State at arc length s (clamped to [0, s_end]).
    pub fn sample(&self, s: f64) -> ProfileState {
        if self.steps.is_empty() || s <= 0.0 {
            return self.initial;
        }
        if s >= self.s_end {
            return self.end;
        }
        // Binary search for the step containing s.
        let mut lo = 0usize;
        let mut hi = self.steps.len() - 1;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.steps[mid].s0 <= s {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let y = self.steps[lo].eval(s);
        ProfileState {
            u: y[0],
            v: y[1],
            psi: y[2],
            s,
        }
    }

    pub fn position(&self, s: f64) -> Point {
        let st = self.sample(s);
        Point::new(st.u, st.v)
    }

    /// Instantaneous turning rate psi'(s) from the geodesic system.
    pub fn psi_prime(&self, s: f64) -> f64 {
        let st = self.sample(s);
        rhs(&self.metric, st.u, st.v, st.psi)[2]
    }

    /// `n` states at uniform arc length over [0, s_end] (inclusive ends).
    pub fn uniform_grid(&self, n: usize) -> Vec<ProfileState> {
        let n = n.max(2);
        (0..n)
            .map(|i| self.sample(self.s_end * i as f64 / (n - 1) as f64))
            .collect()
    }

    /// Polyline of positions at uniform arc length.
    pub fn polyline(&self, n: usize) -> Vec<Point> {
        self.uniform_grid(n)
            .into_iter()
            .map(|st| Point::new(st.u, st.v))
            .collect()
    }

    pub fn events_with_id<'a>(&'a self, id: &str) -> impl Iterator<Item = &'a EventRecord> + 'a {
        let id = id.to_string();
        self.events.iter().filter(move |e| e.id == id)
    }

    /// Raw orthogonality defect |psi -+ pi/2| (mod pi) at the final state,
    /// meaningful when the trajectory ended on an axis floor.
    pub fn floor_defect(&self) -> Option<f64> {
        if self.terminal != Terminal::HitFloor {
            return None;
        }
        let psi = self.end.psi;
        let m = (psi - std::f64::consts::FRAC_PI_2).rem_euclid(std::f64::consts::PI);
        Some(m.min(std::f64::consts::PI - m))
    }
}
