//! Regularized starts and orthogonality measurements on the singular axes.
//!
//! The turning-rate terms (n-1)/r (half-plane) and M/x, M/y (quadrant) are
//! singular on the axes, but geodesics that meet an axis orthogonally extend
//! smoothly through it. Near such a hit, the curve is a graph over the axis
//! whose even Taylor expansion follows from the graph equation; we launch
//! from (and measure arrivals against) that expansion at a small handoff
//! height instead of integrating into the singularity.

use crate::error::{Error, Result};
use crate::geometry::{MetricKind, MetricSpec};

use super::ProfileState;

/// Handoff height for series starts and floor termination.
pub const DEFAULT_AXIS_HANDOFF: f64 = 1e-3;

/// Fourth-order even expansion of a geodesic graph about an orthogonal axis
/// hit: offset(h) = c + a2 h^2 + a4 h^4 where h is the distance from the
/// axis and c the hit coordinate along it.
#[derive(Debug, Clone, Copy)]
pub struct AxisSeries {
    pub c: f64,
    pub a2: f64,
    pub a4: f64,
}

/// Series coefficients at an orthogonal hit with singular exponent `m_sing`
/// on the crossed axis, exponent `m_other` on the free coordinate (0 in the
/// half-plane), hit coordinate `c`, and shrink coefficient `alpha`.
pub fn axis_series(m_sing: f64, m_other: f64, alpha: f64, c: f64) -> AxisSeries {
    let a2 = (m_other / c + alpha * c) / (2.0 * (1.0 + m_sing));
    let a4 = (8.0 * a2 * a2 * a2 - a2 * (alpha + m_other / (c * c))) / (4.0 * (3.0 + m_sing));
    AxisSeries { c, a2, a4 }
}

impl AxisSeries {
    pub fn offset(&self, h: f64) -> f64 {
        self.c + self.a2 * h * h + self.a4 * h * h * h * h
    }

    pub fn slope(&self, h: f64) -> f64 {
        2.0 * self.a2 * h + 4.0 * self.a4 * h * h * h
    }
}

fn series_for_rotational(m: &MetricSpec, t: f64) -> Result<AxisSeries> {
    let n = match m.kind {
        MetricKind::Rotational { n } => n,
        _ => {
            return Err(Error::Input(
                "axis start requires a rotational metric".into(),
            ))
        }
    };
    if !(t > 0.0) {
        return Err(Error::Input(format!("axis abscissa t = {t} must be > 0")));
    }
    Ok(axis_series((n - 1) as f64, 0.0, m.shrink_coeff, t))
}

/// State at height r = h0 of the geodesic that meets the x-axis orthogonally
/// at (t, 0), moving upward.
pub fn start_from_axis_at(m: &MetricSpec, t: f64, h0: f64) -> Result<ProfileState> {
    let series = series_for_rotational(m, t)?;
    let u = series.offset(h0);
    let slope = series.slope(h0);
    Ok(ProfileState {
        u,
        v: h0,
        psi: 1.0f64.atan2(slope),
        s: 0.0,
    })
}

/// [`start_from_axis_at`] with the default handoff height.
pub fn start_from_axis(m: &MetricSpec, t: f64) -> Result<ProfileState> {
    start_from_axis_at(m, t, DEFAULT_AXIS_HANDOFF)
}

/// Which axis a quadrant state sits next to.
fn quadrant_axis(state: &ProfileState) -> bool {
    // true: near u = 0 (the vertical axis); false: near v = 0.
    state.u < state.v
}

/// Series-corrected orthogonality defect of an axis arrival, signed.
///
/// Compares the measured graph slope at the handoff height with the slope
/// the orthogonal-hit expansion predicts there, as an angle. For a true
/// orthogonal hit this is O(h^5); the raw tangent-angle defect at the
/// handoff height is only O(h). Returns (hit coordinate, signed defect);
/// the defect's sign tracks which side of orthogonality the arrival leans
/// to, which continuation searches bisect on.
pub fn axis_hit_report(m: &MetricSpec, state: &ProfileState, h: f64) -> Result<(f64, f64)> {
    let (m_sing, m_other, measured_slope, free_coord) = match m.kind {
        MetricKind::Rotational { n } => {
            // Graph u = f(v): slope du/dv.
            ((n - 1) as f64, 0.0, state.psi.cos() / state.psi.sin(), state.u)
        }
        MetricKind::BiRotational { m1, m2 } => {
            if quadrant_axis(state) {
                // Near u = 0: graph v = w(u), slope dv/du.
                (m1 as f64, m2 as f64, state.psi.sin() / state.psi.cos(), state.v)
            } else {
                // Near v = 0: graph u = f(v), slope du/dv.
                (m2 as f64, m1 as f64, state.psi.cos() / state.psi.sin(), state.u)
            }
        }
        MetricKind::Planar => {
            return Err(Error::Input("planar metric has no singular axis".into()))
        }
    };
    // One refinement of the hit coordinate through the series offset.
    let mut c = free_coord;
    for _ in 0..2 {
        let series = axis_series(m_sing, m_other, m.shrink_coeff, c);
        c = free_coord - (series.offset(h) - series.c);
    }
    let series = axis_series(m_sing, m_other, m.shrink_coeff, c);
    let defect = measured_slope.atan() - series.slope(h).atan();
    Ok((c, defect))
}
