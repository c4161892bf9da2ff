//! Self-shrinking curves in the plane: integration, the two conservation
//! laws as drift monitors, and closure searches for petal curves.
//!
//! An arc-length parameterized curve with tangent angle theta shrinks
//! self-similarly iff its curvature satisfies kappa = alpha * nu, where
//! nu = -x sin(theta) + y cos(theta) is the normal support function. That is
//! exactly the planar weighted-geodesic system, so the shared integrator
//! does the work here.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{MetricSpec, Point};
use crate::ode::{integrate, BBox, IntegrateOptions, ProfileState, Trajectory};
use crate::search::{
    bisect_value, bracket_from_sweep, sweep, Classification, SearchResult, SymmetryAxis,
};

/// Phase point of a planar shrinker: position, tangent angle to the x-axis,
/// arc length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarState {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub s: f64,
}

impl PlanarState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        PlanarState { x, y, theta, s: 0.0 }
    }

    /// Tangential support function tau = X.T.
    pub fn tau(&self) -> f64 {
        self.x * self.theta.cos() + self.y * self.theta.sin()
    }

    /// Normal support function nu = X.N with N the left normal J T.
    pub fn nu(&self) -> f64 {
        -self.x * self.theta.sin() + self.y * self.theta.cos()
    }

    /// Signed curvature recovered from the shrinker equation.
    pub fn kappa(&self, alpha: f64) -> f64 {
        alpha * self.nu()
    }
}

impl From<ProfileState> for PlanarState {
    fn from(st: ProfileState) -> Self {
        PlanarState {
            x: st.u,
            y: st.v,
            theta: st.psi,
            s: st.s,
        }
    }
}

impl From<PlanarState> for ProfileState {
    fn from(st: PlanarState) -> Self {
        ProfileState {
            u: st.x,
            v: st.y,
            psi: st.theta,
            s: st.s,
        }
    }
}

/// A start whose tangent line passes through the origin stays a flat line
/// (kappa vanishes identically).
pub fn is_flat_start(initial: &PlanarState) -> bool {
    let scale = initial.x.abs() + initial.y.abs() + 1.0;
    initial.nu().abs() <= 1e-14 * scale
}

fn planar_metric(alpha: f64) -> Result<MetricSpec> {
    MetricSpec::planar().with_shrink_coeff(alpha)
}

fn planar_bbox(alpha: f64, initial: &PlanarState) -> BBox {
    let r0 = initial.x.hypot(initial.y);
    let half = (7.0 * (1.0 / -alpha).sqrt()).max(2.5 * r0);
    BBox::new(-half, half, -half, half)
}

pub fn integrate_planar_with(
    alpha: f64,
    initial: PlanarState,
    s_max: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let m = planar_metric(alpha)?;
    // Per-unit-step error control: the conservation-law drifts are
    // accumulated quantities, and this keeps them scaling linearly (or
    // better) with the tolerance.
    let mut opts = *opts;
    opts.error_per_unit_step = true;
    integrate(&m, initial.into(), &[], s_max, planar_bbox(alpha, &initial), &opts)
}

/// Integrates x' = cos(theta), y' = sin(theta),
/// theta' = alpha (-x sin(theta) + y cos(theta)).
pub fn integrate_planar(alpha: f64, initial: PlanarState, s_max: f64) -> Result<Trajectory> {
    integrate_planar_with(alpha, initial, s_max, &IntegrateOptions::default())
}

/// Max-over-arc-length deviation of the two conserved quantities from their
/// initial values: I1 = kappa e^{alpha (x^2+y^2)/2} and
/// I2 = kappa^2 + alpha ln(kappa^2) + (dkappa/dtheta)^2.
#[derive(Debug, Clone, Copy)]
pub struct ConservationReport {
    pub i1: f64,
    /// None when kappa vanished at every usable sample (flat line).
    pub i2: Option<f64>,
    pub drift1: f64,
    /// None when item 2 was not applicable anywhere.
    pub drift2: Option<f64>,
}

/// Floor on |theta'| = |kappa| below which a sample is excluded from the
/// second invariant (ln kappa^2 degenerates there anyway).
const KAPPA_FLOOR: f64 = 1e-12;

pub fn conservation_report(t: &Trajectory, alpha: f64, samples: usize) -> ConservationReport {
    let n = samples.max(16);
    let eval = |st: &PlanarState| -> (f64, Option<f64>) {
        let k = st.kappa(alpha);
        let i1 = k * (alpha * (st.x * st.x + st.y * st.y) / 2.0).exp();
        // dkappa/dtheta = kappa'(s) / theta'(s) with kappa' = -alpha kappa tau
        // from the structure equations; excluded below the |kappa| floor.
        let i2 = if k.abs() > KAPPA_FLOOR {
            let dkdth = -alpha * k * st.tau() / k;
            Some(k * k + alpha * (k * k).ln() + dkdth * dkdth)
        } else {
            None
        };
        (i1, i2)
    };

    let first: PlanarState = t.initial_state().into();
    let (i1_0, mut i2_0) = eval(&first);
    let mut drift1 = 0.0f64;
    let mut drift2: Option<f64> = None;
    for i in 0..=n {
        let st: PlanarState = t.sample(t.s_end * i as f64 / n as f64).into();
        let (i1, i2) = eval(&st);
        drift1 = drift1.max((i1 - i1_0).abs());
        match (i2, i2_0) {
            (Some(v), Some(v0)) => {
                let d = (v - v0).abs();
                drift2 = Some(drift2.map_or(d, |cur: f64| cur.max(d)));
            }
            (Some(v), None) => i2_0 = Some(v),
            _ => {}
        }
    }
    ConservationReport {
        i1: i1_0,
        i2: i2_0,
        drift1,
        drift2,
    }
}

/// Unwrapped polar angle advance along the trajectory from s = 0 to s_end,
/// accumulated over dense samples.
fn polar_advance(t: &Trajectory, s_end: f64, samples: usize) -> f64 {
    let mut total = 0.0;
    let st0 = t.sample(0.0);
    let mut prev = st0.v.atan2(st0.u);
    for i in 1..=samples {
        let st = t.sample(s_end * i as f64 / samples as f64);
        let ang = st.v.atan2(st.u);
        let mut d = ang - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
        prev = ang;
    }
    total
}

/// Arc lengths of the first `count` apsides (zeros of tau) after launch.
fn apsis_arclengths(t: &Trajectory, count: usize) -> Vec<f64> {
    let scan = 20_000usize;
    let mut out = Vec::new();
    let tau_at = |s: f64| -> f64 {
        let st: PlanarState = t.sample(s).into();
        st.tau()
    };
    let mut prev_s = t.s_end * 1.0 / scan as f64;
    let mut prev = tau_at(prev_s);
    for i in 2..=scan {
        let s = t.s_end * i as f64 / scan as f64;
        let g = tau_at(s);
        if prev * g < 0.0 {
            let (mut lo, mut hi, mut flo) = (prev_s, s, prev);
            for _ in 0..80 {
                if hi - lo < 1e-13 {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let fm = tau_at(mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
            if out.len() >= count {
                break;
            }
        }
        prev_s = s;
        prev = g;
    }
    out
}

/// Polar angle between the launch apsis and the next one (the apsidal
/// angle of the radial oscillation), None if no further apsis is reached.
fn apsidal_angle(alpha: f64, d: f64, opts: &IntegrateOptions) -> Option<f64> {
    let start = PlanarState::new(d, 0.0, std::f64::consts::FRAC_PI_2);
    let t = integrate_planar_with(alpha, start, 25.0, opts).ok()?;
    let apsides = apsis_arclengths(&t, 1);
    let s1 = *apsides.first()?;
    Some(polar_advance(&t, s1, 4000))
}

/// Searches for a closed petal curve making `rotation` turns around the
/// origin over `petals` radial oscillations, by period-matching on the
/// apsidal angle over the pericenter distance.
pub fn find_closed_planar(alpha: f64, rotation: u32, petals: u32) -> Result<SearchResult> {
    find_closed_planar_with(alpha, rotation, petals, &IntegrateOptions::default())
}

pub fn find_closed_planar_with(
    alpha: f64,
    rotation: u32,
    petals: u32,
    opts: &IntegrateOptions,
) -> Result<SearchResult> {
    if !(alpha < 0.0) {
        return Err(Error::Input("alpha must be < 0".into()));
    }
    if rotation < 1 || petals < 2 {
        return Err(Error::Input("need rotation >= 1 and petals >= 2".into()));
    }
    if gcd(rotation, petals) != 1 {
        return Err(Error::Input(format!(
            "rotation/petals = {rotation}/{petals} must be in lowest terms"
        )));
    }
    let target = std::f64::consts::PI * rotation as f64 / petals as f64;
    let r_circle = (1.0 / -alpha).sqrt();
    let f = |d: f64| apsidal_angle(alpha, d, opts).map(|a| a - target);

    let table = sweep(0.05 * r_circle, 0.995 * r_circle, 96, f);
    let Some((lo, hi)) = bracket_from_sweep(&table) else {
        return Err(Error::search_failure(
            format!("no pericenter closes a ({rotation},{petals}) petal curve"),
            table,
        ));
    };
    let (d_star, bracket) = bisect_value(lo, hi, 1e-12, f)?;

    // Assemble the closed curve: `petals` full radial periods.
    let start = PlanarState::new(d_star, 0.0, std::f64::consts::FRAC_PI_2);
    let t = integrate_planar_with(alpha, start, 25.0 * petals as f64, opts)?;
    let hits = apsis_arclengths(&t, 2 * petals as usize);
    if hits.len() < 2 * petals as usize {
        return Err(Error::search_failure(
            "converged pericenter did not produce enough apsides",
            table,
        ));
    }
    let s_close = hits[2 * petals as usize - 1];
    let end = t.sample(s_close);
    let start_state = t.initial_state();
    let position_gap = Point::new(end.u, end.v).dist(Point::new(start_state.u, start_state.v));
    let angle_gap =
        (end.psi - start_state.psi - 2.0 * std::f64::consts::PI * rotation as f64).abs();

    let mut residuals = BTreeMap::new();
    residuals.insert("position_gap".to_string(), position_gap);
    residuals.insert("angle_gap".to_string(), angle_gap);
    let report = conservation_report(&t, alpha, 4000);
    residuals.insert("conservation_drift_1".to_string(), report.drift1);
    if let Some(d2) = report.drift2 {
        residuals.insert("conservation_drift_2".to_string(), d2);
    }

    if position_gap > 1e-6 || angle_gap > 1e-6 {
        return Err(Error::search_failure(
            format!("closure residuals too large: gap {position_gap:.3e}, angle {angle_gap:.3e}"),
            table,
        ));
    }

    let n_pts = 600 * petals as usize;
    let profile: Vec<Point> = (0..n_pts)
        .map(|i| t.position(s_close * i as f64 / n_pts as f64))
        .collect();

    Ok(SearchResult {
        parameter: d_star,
        bracket,
        residuals,
        trajectory: Some(t),
        profile,
        classification: Classification::Unclassified,
        symmetry: SymmetryAxis::None,
    })
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::count_self_intersections;
    use crate::testutil::Lcg;

    const ALPHA: f64 = -0.5;

    #[test]
    fn circle_shrinker_closes_and_conserves() {
        // |alpha| R = 1/R gives R = sqrt 2; counterclockwise orientation
        // makes kappa = 1/sqrt(2) > 0.
        let r = 2.0f64.sqrt();
        let start = PlanarState::new(r, 0.0, std::f64::consts::FRAC_PI_2);
        assert!((start.kappa(ALPHA) - 1.0 / r).abs() < 1e-15);
        let circumference = 2.0 * std::f64::consts::PI * r;
        let t = integrate_planar(ALPHA, start, circumference).unwrap();
        let end = t.end_state();
        let gap = Point::new(end.u, end.v).dist(Point::new(r, 0.0));
        assert!(gap < 1e-8, "closure gap {gap}");

        let rep = conservation_report(&t, ALPHA, 2000);
        // I1 = (1/sqrt 2) e^{-1/2}, I2 = 1/2 - (1/2) ln(1/2).
        assert!((rep.i1 - 0.42888194248035344).abs() < 1e-12, "{}", rep.i1);
        let i2_expect = 0.5 - 0.5 * 0.5f64.ln();
        assert!((i2_expect - 0.8465735902799727).abs() < 1e-15);
        assert!((rep.i2.unwrap() - i2_expect).abs() < 1e-12);
        assert!(rep.drift1 < 1e-10, "{}", rep.drift1);
        assert!(rep.drift2.unwrap() < 1e-10);
    }

    #[test]
    fn flat_line_stays_flat() {
        // A line through the origin has nu = 0 identically.
        let start = PlanarState::new(0.0, 0.0, 0.7);
        assert!(is_flat_start(&start));
        let off_origin = PlanarState::new(1.0, 1.0, std::f64::consts::FRAC_PI_4);
        assert!(is_flat_start(&off_origin));
        let t = integrate_planar(ALPHA, off_origin, 4.0).unwrap();
        for st in t.uniform_grid(200) {
            let ps: PlanarState = st.into();
            assert!(ps.kappa(ALPHA).abs() < 1e-12);
        }
        let rep = conservation_report(&t, ALPHA, 500);
        assert!(rep.i1.abs() < 1e-15);
        assert!(rep.drift1 < 1e-12);
        assert!(rep.drift2.is_none(), "flat line has no entropy invariant");
    }

    #[test]
    fn generic_trajectory_conserves() {
        let start = PlanarState::new(1.2, 0.0, std::f64::consts::FRAC_PI_2);
        let t = integrate_planar(ALPHA, start, 50.0).unwrap();
        assert!(t.s_end > 49.9, "terminal {:?} at {}", t.terminal, t.s_end);
        let rep = conservation_report(&t, ALPHA, 5000);
        assert!(rep.drift1 < 1e-8, "{}", rep.drift1);
        assert!(rep.drift2.unwrap() < 1e-8, "{:?}", rep.drift2);
    }

    #[test]
    fn curvature_increases_with_radius() {
        // kappa = I1 e^{-alpha r^2 / 2} with -alpha > 0: along the curve,
        // kappa and the radius rise and fall together.
        let start = PlanarState::new(1.4, 0.3, 2.0);
        let t = integrate_planar(ALPHA, start, 30.0).unwrap();
        let grid = t.uniform_grid(3000);
        for w in grid.windows(2) {
            let a: PlanarState = w[0].into();
            let b: PlanarState = w[1].into();
            let (ra, rb) = (a.x.hypot(a.y), b.x.hypot(b.y));
            let (ka, kb) = (a.kappa(ALPHA).abs(), b.kappa(ALPHA).abs());
            if rb > ra + 1e-9 {
                assert!(kb >= ka - 1e-12, "kappa fell while radius rose");
            } else if rb < ra - 1e-9 {
                assert!(kb <= ka + 1e-12, "kappa rose while radius fell");
            }
        }
    }

    #[test]
    fn rotational_equivariance() {
        let opts = IntegrateOptions::default().with_tolerances(1e-12, 1e-14);
        let base = PlanarState::new(1.1, -0.2, 0.8);
        let t0 = integrate_planar_with(ALPHA, base, 12.0, &opts).unwrap();
        let mut rng = Lcg::new(41);
        for _ in 0..3 {
            let beta = rng.range(0.0, 2.0 * std::f64::consts::PI);
            let (cb, sb) = (beta.cos(), beta.sin());
            let rotated = PlanarState::new(
                cb * base.x - sb * base.y,
                sb * base.x + cb * base.y,
                base.theta + beta,
            );
            let t1 = integrate_planar_with(ALPHA, rotated, 12.0, &opts).unwrap();
            for i in 0..100 {
                let s = 12.0 * i as f64 / 99.0;
                let a = t0.sample(s);
                let b = t1.sample(s);
                let ax = cb * a.u - sb * a.v;
                let ay = sb * a.u + cb * a.v;
                assert!((ax - b.u).abs() < 1e-10, "x mismatch at s = {s}");
                assert!((ay - b.v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn petal_curve_two_three() {
        let res = find_closed_planar(ALPHA, 2, 3).unwrap();
        assert!(res.residuals["position_gap"] < 1e-6);
        assert!(res.residuals["angle_gap"] < 1e-6);
        assert!(res.residuals["conservation_drift_1"] < 1e-8);
        assert!(res.residuals["conservation_drift_2"] < 1e-8);
        assert!(res.parameter > 0.0 && res.parameter < 2.0f64.sqrt());
        // A petal curve with winding 2 is not embedded.
        assert!(count_self_intersections(&res.profile, true) >= 1);
    }

    #[test]
    fn petal_curve_one_two_is_impossible() {
        // The apsidal angle of a shrinker never reaches pi/2 (the classical
        // ratio window is open), so (1,2) has no closure.
        match find_closed_planar(ALPHA, 1, 2) {
            Err(Error::SearchFailure { sweep, .. }) => {
                assert!(!sweep.is_empty());
            }
            other => panic!("expected SearchFailure, got {other:?}"),
        }
    }

    #[test]
    fn input_validation() {
        assert!(find_closed_planar(ALPHA, 2, 4).is_err());
        assert!(find_closed_planar(ALPHA, 0, 3).is_err());
        assert!(find_closed_planar(0.5, 2, 3).is_err());
    }
}
