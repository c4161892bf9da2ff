//! Shooting problems for closed self-shrinkers with rotational symmetry:
//! the immersed sphere, a second immersed sphere, the embedded torus, and
//! the immersed torus, each found by bisection on an event functional that
//! changes sign across the target.
//!
//! Family S launches orthogonally from the rotation axis at (t, 0); family
//! T launches orthogonally from the r-axis at (0, t). Since the geodesic
//! equation is symmetric under u -> -u, an arc that returns to the r-axis
//! orthogonally closes up by reflection.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{MetricSpec, Point};
use crate::ode::{
    axis_hit_report, default_bbox, integrate, start_from_axis, EventDirection, EventKind,
    EventRecord, EventSpec, IntegrateOptions, ProfileState, Terminal, Trajectory,
};
use crate::search::{
    bisect_predicate, bisect_value, bracket_from_sweep, sweep, Classification, SearchResult,
    SymmetryAxis,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotFamily {
    /// Axis start: S[t](0) = (t, 0), S[t]'(0) = (0, 1), regularized by the
    /// orthogonal-hit series.
    S,
    /// Vertical-axis start: T[t](0) = (0, t), T[t]'(0) = (1, 0).
    T,
}

#[derive(Debug, Clone, Copy)]
pub struct ShotSpec {
    pub family: ShotFamily,
    pub t: f64,
    pub n: u32,
}

impl ShotSpec {
    pub fn new(family: ShotFamily, t: f64, n: u32) -> Self {
        ShotSpec { family, t, n }
    }
}

/// Event ids attached to every shot.
pub const EV_AXIS: &str = "vertical-axis";
pub const EV_VMAX: &str = "v-max";
pub const EV_VMIN: &str = "v-min";
pub const EV_TV: &str = "tangent-vertical";
pub const EV_CYL: &str = "cylinder-line";

fn standard_events(m: &MetricSpec) -> Vec<EventSpec> {
    vec![
        EventSpec::any(EV_AXIS, EventKind::CrossesVerticalAxis),
        EventSpec::new(EV_VMAX, EventKind::TangentHorizontal, EventDirection::Falling),
        EventSpec::new(EV_VMIN, EventKind::TangentHorizontal, EventDirection::Rising),
        EventSpec::any(EV_TV, EventKind::TangentVertical),
        EventSpec::any(
            EV_CYL,
            EventKind::HitsLine(m.cylinder_radius().expect("rotational metric")),
        ),
    ]
}

/// Shoots one trajectory with the standard event set.
pub fn shoot_with(spec: &ShotSpec, s_max: f64, opts: &IntegrateOptions) -> Result<Trajectory> {
    let m = MetricSpec::rotational(spec.n)?;
    if !(spec.t > 0.0) {
        return Err(Error::Input(format!("shot parameter t = {} must be > 0", spec.t)));
    }
    let initial = match spec.family {
        ShotFamily::S => start_from_axis(&m, spec.t)?,
        ShotFamily::T => ProfileState::new(0.0, spec.t, 0.0),
    };
    integrate(&m, initial, &standard_events(&m), s_max, default_bbox(&m), opts)
}

pub fn shoot(spec: &ShotSpec, s_max: f64) -> Result<Trajectory> {
    shoot_with(spec, s_max, &IntegrateOptions::default())
}

fn nth_event<'t>(t: &'t Trajectory, id: &str, k: usize) -> Option<&'t EventRecord> {
    t.events_with_id(id).nth(k)
}

/// The B/C/Q shape of a shot: B is the first height maximum, C the
/// following vertical-tangent point (the leftmost point of the second
/// graph component), Q the following height minimum.
#[derive(Debug, Clone)]
pub struct SignatureReport {
    pub b: Option<EventRecord>,
    pub c: Option<EventRecord>,
    pub q: Option<EventRecord>,
    /// psi' keeps one sign from launch to Q (strict convexity of the arc);
    /// false when Q is absent.
    pub convexity_ok: bool,
    /// Vertical-axis crossings in arc-length order.
    pub crossings: Vec<EventRecord>,
}

impl SignatureReport {
    /// Crossing pattern of the small-t shape: one axis crossing between
    /// launch and B, and another between C and Q.
    pub fn crossing_pattern_ok(&self) -> bool {
        let (Some(b), Some(c), Some(q)) = (&self.b, &self.c, &self.q) else {
            return false;
        };
        let before_b = self.crossings.iter().filter(|e| e.s < b.s).count();
        let c_to_q = self
            .crossings
            .iter()
            .filter(|e| e.s > c.s && e.s < q.s)
            .count();
        before_b == 1 && c_to_q == 1
    }
}

pub fn signature(t: &Trajectory) -> SignatureReport {
    let b = nth_event(t, EV_VMAX, 0).cloned();
    let c = b
        .as_ref()
        .and_then(|b| t.events_with_id(EV_TV).find(|e| e.s > b.s).cloned());
    let q = c
        .as_ref()
        .and_then(|c| t.events_with_id(EV_VMIN).find(|e| e.s > c.s).cloned());

    let convexity_ok = match &q {
        Some(q) => {
            let mut sign = 0.0f64;
            let mut ok = true;
            let samples = 1000;
            let mut s_values: Vec<f64> = (1..samples)
                .map(|i| q.s * i as f64 / samples as f64)
                .collect();
            s_values.extend(t.events.iter().filter(|e| e.s < q.s).map(|e| e.s));
            for s in s_values {
                let d = t.psi_prime(s);
                if d.abs() < 1e-13 {
                    continue;
                }
                if sign == 0.0 {
                    sign = d.signum();
                } else if d.signum() != sign {
                    ok = false;
                    break;
                }
            }
            ok && sign != 0.0
        }
        None => false,
    };

    SignatureReport {
        b,
        c,
        q,
        convexity_ok,
        crossings: t.events_with_id(EV_AXIS).cloned().collect(),
    }
}

/// u-coordinate of the turning point Q of S[t]; None when the shape has no
/// B -> C -> Q pattern. Positive for small t, negative above the immersed
/// sphere parameter.
pub fn immersed_sphere_functional(n: u32, t: f64, opts: &IntegrateOptions) -> Option<f64> {
    let traj = shoot_with(&ShotSpec::new(ShotFamily::S, t, n), 25.0, opts).ok()?;
    signature(&traj).q.map(|q| q.state.u)
}

/// u-coordinate of the second height maximum of a shot.
fn second_max_u(traj: &Trajectory) -> Option<f64> {
    nth_event(traj, EV_VMAX, 1).map(|e| e.state.u)
}

pub fn second_sphere_functional(n: u32, t: f64, opts: &IntegrateOptions) -> Option<f64> {
    let traj = shoot_with(&ShotSpec::new(ShotFamily::S, t, n), 30.0, opts).ok()?;
    second_max_u(&traj)
}

/// Crossing-angle defect psi - pi at the first return of T[t] to the
/// r-axis; zero exactly at the embedded torus.
pub fn embedded_torus_functional(n: u32, t: f64, opts: &IntegrateOptions) -> Option<f64> {
    let traj = shoot_with(&ShotSpec::new(ShotFamily::T, t, n), 20.0, opts).ok()?;
    nth_event(&traj, EV_AXIS, 0).map(|e| e.state.psi - std::f64::consts::PI)
}

pub fn immersed_torus_functional(n: u32, t: f64, opts: &IntegrateOptions) -> Option<f64> {
    let traj = shoot_with(&ShotSpec::new(ShotFamily::T, t, n), 30.0, opts).ok()?;
    second_max_u(&traj)
}

/// Largest parameter in the dyadic sweep 2^-1, ..., 2^-20 whose shot
/// matches the given predicate; the bracket's small-t anchor.
fn dyadic_anchor<F>(pred: F) -> Option<f64>
where
    F: Fn(f64) -> bool,
{
    (1..=20).map(|k| 0.5f64.powi(k)).find(|&t| pred(t))
}

/// Closes an arc whose endpoints both lie on the r-axis by appending its
/// reflection (interior points only, to avoid duplicated on-axis vertices).
fn mirrored_closed_polyline(arc: &[Point]) -> Vec<Point> {
    let mut out = arc.to_vec();
    out.extend(arc[1..arc.len() - 1].iter().rev().map(|p| p.mirror_u()));
    out
}

fn angle_distance_mod_2pi(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

/// Verification shots rerun the converged parameter with tolerances
/// tightened 100x: closure measurements at a floor arrival see the
/// (r / floor)^{n-1} error amplification of the axis approach.
fn verification_opts(opts: &IntegrateOptions) -> IntegrateOptions {
    opts.with_tolerances(opts.rel_tol * 1e-2, opts.abs_tol * 1e-2)
}

/// Residual entries shared by the S-family (axis-to-axis) searches:
/// orthogonality at the launch hit, the direct series-corrected defect at
/// the far hit, and the mirror-closure gaps.
fn sphere_closure_residuals(
    m: &MetricSpec,
    t_star: f64,
    traj: &Trajectory,
    opts: &IntegrateOptions,
    residuals: &mut BTreeMap<String, f64>,
) {
    let (_, launch_defect) =
        axis_hit_report(m, &traj.initial_state(), opts.floor_radius).unwrap_or((t_star, f64::NAN));
    residuals.insert("axis_hit_defect_launch".into(), launch_defect.abs());
    if traj.terminal == Terminal::HitFloor {
        let end = traj.end_state();
        if let Ok((c, defect)) = axis_hit_report(m, &end, opts.floor_radius) {
            residuals.insert("axis_hit_defect_far".into(), defect.abs());
            residuals.insert("closure_position_gap".into(), (c + t_star).abs());
        }
        // Mirror closure of the tangent angle: the far arrival is the
        // reversed reflection of the launch, psi_end = -psi_0 mod 2 pi.
        let gap = angle_distance_mod_2pi(end.psi, -traj.initial_state().psi);
        residuals.insert("closure_angle_gap".into(), gap);
    } else {
        residuals.insert("axis_hit_defect_far".into(), f64::NAN);
    }
}

/// Finds the immersed sphere: bisection over the side of the r-axis on
/// which the turning point Q of S[t] lands.
pub fn find_immersed_sphere(n: u32) -> Result<SearchResult> {
    find_immersed_sphere_with(n, &IntegrateOptions::default())
}

pub fn find_immersed_sphere_with(n: u32, opts: &IntegrateOptions) -> Result<SearchResult> {
    let m = MetricSpec::rotational(n)?;
    let sphere = m.sphere_radius();

    // Small-t anchor: the full B/C/Q signature with Q to the right of the
    // r-axis and the small-t crossing pattern.
    let small_t_ok = |t: f64| -> bool {
        let Ok(traj) = shoot_with(&ShotSpec::new(ShotFamily::S, t, n), 25.0, opts) else {
            return false;
        };
        let sig = signature(&traj);
        sig.convexity_ok
            && sig.crossing_pattern_ok()
            && sig.q.as_ref().map(|q| q.state.u > 0.0) == Some(true)
    };
    let lo = dyadic_anchor(small_t_ok).ok_or_else(|| {
        Error::search_failure("no dyadic parameter shows the small-t shape", Vec::new())
    })?;
    let hi = sphere * (1.0 - 1e-9);
    let pred = |t: f64| immersed_sphere_functional(n, t, opts).map(|u| u > 0.0) == Some(true);
    if pred(hi) {
        return Err(Error::search_failure(
            format!("Q is still right of the r-axis at t = {hi}"),
            Vec::new(),
        ));
    }
    let (x_star, bracket) = bisect_predicate(lo, hi, 1e-10, pred);

    // Verification shot continues past Q to the far axis hit.
    let traj = shoot_with(&ShotSpec::new(ShotFamily::S, x_star, n), 40.0, &verification_opts(opts))?;
    let sig = signature(&traj);
    let q = sig
        .q
        .as_ref()
        .ok_or_else(|| Error::search_failure("converged shot lost its Q point", Vec::new()))?;

    let mut residuals = BTreeMap::new();
    residuals.insert("q_axis_offset".into(), q.state.u.abs());
    sphere_closure_residuals(&m, x_star, &traj, opts, &mut residuals);

    Ok(SearchResult {
        parameter: x_star,
        bracket,
        residuals,
        profile: traj.polyline(4000),
        trajectory: Some(traj),
        classification: Classification::ImmersedSphere,
        symmetry: SymmetryAxis::VerticalAxis,
    })
}

/// Finds the second immersed sphere in (0, x_*): bisection on the side of
/// the r-axis on which the second height maximum of S[t] lands.
pub fn find_second_immersed_sphere(n: u32, x_star: f64) -> Result<SearchResult> {
    find_second_immersed_sphere_with(n, x_star, &IntegrateOptions::default())
}

pub fn find_second_immersed_sphere_with(
    n: u32,
    x_star: f64,
    opts: &IntegrateOptions,
) -> Result<SearchResult> {
    let m = MetricSpec::rotational(n)?;
    let f = |t: f64| second_sphere_functional(n, t, opts);
    let lo = dyadic_anchor(|t| f(t).map(|u| u < 0.0) == Some(true)).ok_or_else(|| {
        Error::search_failure(
            "no dyadic parameter puts the second maximum left of the r-axis",
            Vec::new(),
        )
    })?;
    let table = sweep(lo, x_star * (1.0 - 1e-4), 64, &f);
    let Some((blo, bhi)) = bracket_from_sweep(&table) else {
        return Err(Error::search_failure(
            "second-maximum functional has no sign change below x_*",
            table,
        ));
    };
    // The return leg from the second maximum to the far axis hit is long
    // and amplifies parameter error, so this bracket is driven tighter
    // than the other searches.
    let (x_star2, bracket) = bisect_value(blo, bhi, 1e-12, &f)?;

    let traj = shoot_with(&ShotSpec::new(ShotFamily::S, x_star2, n), 60.0, &verification_opts(opts))?;
    let second_max = nth_event(&traj, EV_VMAX, 1)
        .ok_or_else(|| Error::search_failure("converged shot lost its second maximum", table))?
        .clone();

    let mut residuals = BTreeMap::new();
    residuals.insert("second_max_axis_offset".into(), second_max.state.u.abs());
    sphere_closure_residuals(&m, x_star2, &traj, opts, &mut residuals);

    Ok(SearchResult {
        parameter: x_star2,
        bracket,
        residuals,
        profile: traj.polyline(6000),
        trajectory: Some(traj),
        classification: Classification::ImmersedSphere,
        symmetry: SymmetryAxis::VerticalAxis,
    })
}

/// Finds the embedded torus: continuation in the T family on the crossing
/// angle at the first return to the r-axis.
pub fn find_embedded_torus(n: u32) -> Result<SearchResult> {
    find_embedded_torus_with(n, &IntegrateOptions::default())
}

pub fn find_embedded_torus_with(n: u32, opts: &IntegrateOptions) -> Result<SearchResult> {
    let m = MetricSpec::rotational(n)?;
    let r_cyl = m.cylinder_radius().expect("rotational");
    let f = |t: f64| embedded_torus_functional(n, t, opts);
    let table = sweep(0.05 * r_cyl, 0.999 * r_cyl, 200, &f);
    let Some((blo, bhi)) = bracket_from_sweep(&table) else {
        return Err(Error::search_failure(
            "crossing-angle defect has no sign change in the T family",
            table,
        ));
    };
    let (t_star, bracket) = bisect_value(blo, bhi, 1e-10, &f)?;

    // The closed profile is the arc to the first crossing plus its mirror;
    // integrating to twice the crossing length certifies closure directly.
    let traj = shoot_with(&ShotSpec::new(ShotFamily::T, t_star, n), 25.0, &verification_opts(opts))?;
    let cross = nth_event(&traj, EV_AXIS, 0)
        .ok_or_else(|| Error::search_failure("converged shot lost its crossing", table.clone()))?
        .clone();
    let mut residuals = BTreeMap::new();
    residuals.insert(
        "crossing_angle_defect".into(),
        (cross.state.psi - std::f64::consts::PI).abs(),
    );
    let s_loop = 2.0 * cross.s;
    if traj.s_end >= s_loop {
        let back = traj.sample(s_loop);
        residuals.insert(
            "closure_position_gap".into(),
            Point::new(back.u, back.v).dist(Point::new(0.0, t_star)),
        );
        residuals.insert(
            "closure_angle_gap".into(),
            angle_distance_mod_2pi(back.psi, 2.0 * std::f64::consts::PI),
        );
    }

    let arc: Vec<Point> = (0..4000)
        .map(|i| traj.position(cross.s * i as f64 / 3999.0))
        .collect();
    let profile = mirrored_closed_polyline(&arc);
    if !crate::curve::is_simple_closed(&profile) {
        return Err(Error::search_failure(
            "embedded torus candidate is not simple",
            table,
        ));
    }
    let convex = {
        let samples = 2000;
        (1..samples).all(|i| traj.psi_prime(cross.s * i as f64 / samples as f64) > 0.0)
    };
    if !convex {
        return Err(Error::search_failure(
            "embedded torus candidate is not strictly convex",
            table,
        ));
    }

    Ok(SearchResult {
        parameter: t_star,
        bracket,
        residuals,
        profile,
        trajectory: Some(traj),
        classification: Classification::EmbeddedTorus,
        symmetry: SymmetryAxis::VerticalAxis,
    })
}

/// Finds the immersed torus: T-family continuation with t decreasing from
/// the cylinder radius, on the side of the second height maximum.
pub fn find_immersed_torus(n: u32) -> Result<SearchResult> {
    find_immersed_torus_with(n, &IntegrateOptions::default())
}

pub fn find_immersed_torus_with(n: u32, opts: &IntegrateOptions) -> Result<SearchResult> {
    let m = MetricSpec::rotational(n)?;
    let r_cyl = m.cylinder_radius().expect("rotational");
    let f = |t: f64| immersed_torus_functional(n, t, opts);

    // Sweep downward from the cylinder line; the first sign change marks
    // the transition away from the rightward-drifting oscillation.
    let table = sweep(0.3 * r_cyl, r_cyl * (1.0 - 1e-4), 200, &f);
    let mut bracket_pair = None;
    for w in table.windows(2).rev() {
        if let (Some(a), Some(b)) = (w[0].value, w[1].value) {
            if a * b < 0.0 {
                bracket_pair = Some((w[0].t, w[1].t));
                break;
            }
        }
    }
    let Some((blo, bhi)) = bracket_pair else {
        return Err(Error::search_failure(
            "second-maximum functional has no sign change under the cylinder line",
            table,
        ));
    };
    let (r_star, bracket) = bisect_value(blo, bhi, 1e-10, &f)?;

    let traj = shoot_with(&ShotSpec::new(ShotFamily::T, r_star, n), 45.0, &verification_opts(opts))?;
    let second_max = nth_event(&traj, EV_VMAX, 1)
        .ok_or_else(|| {
            Error::search_failure("converged shot lost its second maximum", table.clone())
        })?
        .clone();

    let mut residuals = BTreeMap::new();
    residuals.insert("second_max_axis_offset".into(), second_max.state.u.abs());
    let s_loop = 2.0 * second_max.s;
    if traj.s_end >= s_loop {
        let back = traj.sample(s_loop);
        residuals.insert(
            "closure_position_gap".into(),
            Point::new(back.u, back.v).dist(Point::new(0.0, r_star)),
        );
        residuals.insert(
            "closure_angle_gap".into(),
            angle_distance_mod_2pi(back.psi, traj.initial_state().psi),
        );
    }

    let arc: Vec<Point> = (0..6000)
        .map(|i| traj.position(second_max.s * i as f64 / 5999.0))
        .collect();
    let profile = mirrored_closed_polyline(&arc);

    Ok(SearchResult {
        parameter: r_star,
        bracket,
        residuals,
        profile,
        trajectory: Some(traj),
        classification: Classification::ImmersedTorus,
        symmetry: SymmetryAxis::VerticalAxis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::count_self_intersections;
    use crate::search::single_sign_change;

    fn opts() -> IntegrateOptions {
        IntegrateOptions::default()
    }

    #[test]
    fn sphere_shot_is_semicircle() {
        let n = 2;
        let m = MetricSpec::rotational(n).unwrap();
        let r = m.sphere_radius();
        let traj = shoot(&ShotSpec::new(ShotFamily::S, r, n), 10.0).unwrap();
        assert_eq!(traj.terminal, Terminal::HitFloor);
        // One crossing at the apex, which is the height maximum B.
        let sig = signature(&traj);
        assert_eq!(sig.crossings.len(), 1);
        let b = sig.b.expect("apex is a falling height maximum");
        assert!((b.state.v - r).abs() < 1e-8);
        assert!(b.state.u.abs() < 1e-8);
        // No C/Q pattern on a semicircle.
        assert!(sig.q.is_none());
    }

    #[test]
    fn cylinder_shot_has_no_signature() {
        let n = 2;
        let m = MetricSpec::rotational(n).unwrap();
        let traj = shoot(&ShotSpec::new(ShotFamily::T, m.cylinder_radius().unwrap(), n), 10.0)
            .unwrap();
        let sig = signature(&traj);
        assert!(sig.b.is_none() && sig.c.is_none() && sig.q.is_none());
        assert!(!sig.convexity_ok);
        assert!(sig.crossings.is_empty());
        // psi' vanishes along the line.
        for i in 0..100 {
            assert!(traj.psi_prime(traj.s_end * i as f64 / 99.0).abs() < 1e-9);
        }
    }

    #[test]
    fn small_t_signature_matches_graph_bounds() {
        // Height-maximum bound b_t >= sqrt(log(2 / (pi t^2))) and the
        // window on the blow-up abscissa from the small-t analysis.
        let n = 2;
        for &t in &[0.05, 0.02] {
            let traj = shoot(&ShotSpec::new(ShotFamily::S, t, n), 25.0).unwrap();
            let sig = signature(&traj);
            assert!(sig.convexity_ok, "t = {t}");
            assert!(sig.crossing_pattern_ok(), "t = {t}");
            let b = sig.b.unwrap();
            let bound = (2.0 / (std::f64::consts::PI * t * t)).ln().sqrt();
            assert!(b.state.v >= bound, "b_t = {} < {bound}", b.state.v);
            let floor = -4.0 * (n as f64 + 1.0) / bound;
            assert!(b.state.u > floor && b.state.u < 0.0, "u(B) = {}", b.state.u);
            // Q lies right of the axis for small t.
            assert!(sig.q.unwrap().state.u > 0.0);
            // The first arc is strictly convex: psi rises from launch to B.
            for i in 1..200 {
                let s = b.s * i as f64 / 200.0;
                assert!(traj.psi_prime(s) > 0.0, "psi' sign flip before B at s = {s}");
            }
        }
    }

    #[test]
    fn immersed_sphere_search() {
        let n = 2;
        let res = find_immersed_sphere(n).unwrap();
        let sphere = (2.0 * n as f64).sqrt();
        assert!(res.parameter < sphere, "x* = {} >= sqrt(2n)", res.parameter);
        assert!(res.bracket.1 - res.bracket.0 <= 1e-10);
        assert!(res.residuals["q_axis_offset"] < 1e-6);
        assert!(res.residuals["axis_hit_defect_launch"] < 1e-10);
        assert!(res.residuals["axis_hit_defect_far"] < 1e-6);
        assert!(res.residuals["closure_position_gap"] < 1e-6);
        assert!(res.residuals["closure_angle_gap"] < 1e-6);
        // Non-embeddedness witness: the arc crosses the r-axis before B.
        // At the converged parameter Q sits on the axis, so the second
        // crossing of the small-t pattern degenerates into the touch at Q;
        // only the first crossing survives the limit.
        let sig = signature(res.trajectory.as_ref().unwrap());
        let b = sig.b.as_ref().expect("B point");
        assert_eq!(sig.crossings.iter().filter(|e| e.s < b.s).count(), 1);
        // The functional flips exactly once across a window around x_*.
        assert!(single_sign_change(
            res.parameter - 5e-7,
            res.parameter + 5e-7,
            16,
            |t| immersed_sphere_functional(n, t, &opts())
        ));
    }

    #[test]
    fn second_immersed_sphere_search() {
        let n = 2;
        let x_star = find_immersed_sphere(n).unwrap().parameter;
        let res = find_second_immersed_sphere(n, x_star).unwrap();
        assert!(res.parameter > 0.0 && res.parameter < x_star);
        assert!(res.residuals["second_max_axis_offset"] < 1e-6);
        assert!(res.residuals["axis_hit_defect_far"] < 1e-6);
        assert!(res.residuals["closure_position_gap"] < 1e-6);
    }

    #[test]
    fn embedded_torus_search() {
        let n = 2;
        let res = find_embedded_torus(n).unwrap();
        let m = MetricSpec::rotational(n).unwrap();
        let r_cyl = m.cylinder_radius().unwrap();
        assert!(res.residuals["crossing_angle_defect"] < 1e-6);
        assert!(res.residuals["closure_position_gap"] < 1e-6);
        assert!(res.residuals["closure_angle_gap"] < 1e-6);
        // Intercepts straddle the stationary cylinder line.
        let bottom = res.parameter;
        let top = res
            .trajectory
            .as_ref()
            .unwrap()
            .events_with_id(EV_AXIS)
            .next()
            .unwrap()
            .state
            .v;
        assert!(bottom < r_cyl && r_cyl < top, "({bottom}, {top})");
        assert!(count_self_intersections(&res.profile, true) == 0);
        // Weighted length below the double-cover bound.
        let len = crate::geometry::weighted_length_closed(&m, &res.profile).unwrap();
        assert!(len < 4.0, "L_2 = {len}");
    }

    #[test]
    fn immersed_torus_search() {
        let n = 2;
        let res = find_immersed_torus(n).unwrap();
        let m = MetricSpec::rotational(n).unwrap();
        let r_cyl = m.cylinder_radius().unwrap();
        assert!(res.parameter > 0.0 && res.parameter < r_cyl);
        assert!(res.residuals["second_max_axis_offset"] < 1e-6);
        assert!(res.residuals["closure_position_gap"] < 1e-6);
        assert!(count_self_intersections(&res.profile, true) >= 2);
    }

    #[test]
    fn searches_are_deterministic() {
        let a = find_embedded_torus(2).unwrap();
        let b = find_embedded_torus(2).unwrap();
        assert_eq!(a.parameter.to_bits(), b.parameter.to_bits());
        assert_eq!(a.bracket.0.to_bits(), b.bracket.0.to_bits());
        assert_eq!(a.bracket.1.to_bits(), b.bracket.1.to_bits());
    }
}
