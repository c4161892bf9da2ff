//! Shooting in the quadrant for self-shrinkers with bi-rotational symmetry:
//! the symmetric (M1 = M2) geodesic equation is invariant under reflection
//! across the diagonal y = x, so arcs launched orthogonally from the
//! diagonal close up when they meet the diagonal orthogonally again
//! (torus-type profiles) or when they hit a coordinate axis orthogonally
//! (sphere-type profiles, using the reflected arc for the other axis).
//!
//! The closed examples here exist only as numerics: discovery proceeds by
//! dense parameter sweeps of crossing signatures, then bisection on the
//! first sign change matching each target's pattern.

use std::collections::BTreeMap;

use crate::error::{Error, Result, SweepSample};
use crate::geometry::{MetricSpec, Point};
use crate::ode::{
    axis_hit_report, default_bbox, integrate, EventKind, EventSpec, IntegrateOptions,
    ProfileState, Terminal, Trajectory,
};
use crate::search::{bisect_value, Classification, SearchResult, SymmetryAxis};

pub const EV_DIAG: &str = "diagonal";
pub const EV_TH: &str = "tangent-horizontal";
pub const EV_TV: &str = "tangent-vertical";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BiLaunch {
    /// T[t](0) = (t, t) with direction (-1/sqrt2, 1/sqrt2).
    DiagonalOrthogonal,
    /// Along the diagonal: the Clifford cone test.
    DiagonalTangent,
    Custom(Point, f64),
}

#[derive(Debug, Clone, Copy)]
pub struct BiShotSpec {
    /// Symmetric sphere-factor dimension M1 = M2 = M.
    pub m: u32,
    pub t: f64,
    pub launch: BiLaunch,
}

impl BiShotSpec {
    pub fn new(m: u32, t: f64, launch: BiLaunch) -> Self {
        BiShotSpec { m, t, launch }
    }
}

/// Orthogonal-crossing angle of the diagonal, oriented up-left.
pub const DIAGONAL_ORTHOGONAL_ANGLE: f64 = 3.0 * std::f64::consts::FRAC_PI_4;

/// Signed angular defect against orthogonal incidence on the diagonal,
/// folded into (-pi/2, pi/2].
pub fn diagonal_defect(psi: f64) -> f64 {
    let mut d = (psi - DIAGONAL_ORTHOGONAL_ANGLE).rem_euclid(std::f64::consts::PI);
    if d > std::f64::consts::FRAC_PI_2 {
        d -= std::f64::consts::PI;
    }
    d
}

#[derive(Debug, Clone, Copy)]
pub struct DiagonalCrossing {
    pub s: f64,
    pub position: Point,
    /// Signed crossing-angle defect against the diagonal's normal.
    pub angle_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisKind {
    /// The vertical axis u = 0.
    U,
    /// The horizontal axis v = 0.
    V,
}

#[derive(Debug, Clone, Copy)]
pub struct AxisHit {
    pub axis: AxisKind,
    /// Hit coordinate along the axis, series-extrapolated to the axis.
    pub coordinate: f64,
    /// Signed series-corrected orthogonality defect.
    pub defect: f64,
}

/// Crossing and closure bookkeeping for one quadrant shot.
#[derive(Debug, Clone)]
pub struct BiSignature {
    pub diagonal_crossings: Vec<DiagonalCrossing>,
    /// Terminal arrival on a coordinate axis, when the shot ended there.
    pub axis_hits: Vec<AxisHit>,
    /// (position gap, angle gap) at the best return to the launch point.
    pub loop_closure: Option<(f64, f64)>,
}

fn bi_events() -> Vec<EventSpec> {
    vec![
        EventSpec::any(EV_DIAG, EventKind::CrossesDiagonal),
        EventSpec::any(EV_TH, EventKind::TangentHorizontal),
        EventSpec::any(EV_TV, EventKind::TangentVertical),
    ]
}

pub fn shoot_bi_with(
    spec: &BiShotSpec,
    s_max: f64,
    opts: &IntegrateOptions,
) -> Result<(Trajectory, BiSignature)> {
    let metric = MetricSpec::bi_rotational(spec.m, spec.m)?;
    if !(spec.t > 0.0) {
        return Err(Error::Input(format!("launch parameter t = {} must be > 0", spec.t)));
    }
    let initial = match spec.launch {
        BiLaunch::DiagonalOrthogonal => {
            ProfileState::new(spec.t, spec.t, DIAGONAL_ORTHOGONAL_ANGLE)
        }
        BiLaunch::DiagonalTangent => {
            ProfileState::new(spec.t, spec.t, std::f64::consts::FRAC_PI_4)
        }
        BiLaunch::Custom(p, angle) => ProfileState { u: p.u, v: p.v, psi: angle, s: 0.0 },
    };
    let traj = integrate(&metric, initial, &bi_events(), s_max, default_bbox(&metric), opts)?;
    let signature = bi_signature(&metric, &traj, opts);
    Ok((traj, signature))
}

pub fn shoot_bi(spec: &BiShotSpec, s_max: f64) -> Result<(Trajectory, BiSignature)> {
    shoot_bi_with(spec, s_max, &IntegrateOptions::default())
}

fn bi_signature(metric: &MetricSpec, traj: &Trajectory, opts: &IntegrateOptions) -> BiSignature {
    let diagonal_crossings = traj
        .events_with_id(EV_DIAG)
        .map(|e| DiagonalCrossing {
            s: e.s,
            position: Point::new(e.state.u, e.state.v),
            angle_defect: diagonal_defect(e.state.psi),
        })
        .collect();
    let mut axis_hits = Vec::new();
    if traj.terminal == Terminal::HitFloor {
        let end = traj.end_state();
        if let Ok((coordinate, defect)) = axis_hit_report(metric, &end, opts.floor_radius) {
            axis_hits.push(AxisHit {
                axis: if end.u < end.v { AxisKind::U } else { AxisKind::V },
                coordinate,
                defect,
            });
        }
    }
    // Best return to the launch point, past an initial escape window.
    let start = traj.initial_state();
    let mut loop_closure = None;
    if traj.s_end > 2.0 {
        let samples = 3000;
        let mut best: Option<(f64, f64)> = None;
        for i in 0..=samples {
            let s = 1.0 + (traj.s_end - 1.0) * i as f64 / samples as f64;
            let st = traj.sample(s);
            let gap = Point::new(st.u, st.v).dist(Point::new(start.u, start.v));
            if best.map_or(true, |(g, _)| gap < g) {
                let two_pi = 2.0 * std::f64::consts::PI;
                let da = (st.psi - start.psi).rem_euclid(two_pi);
                best = Some((gap, da.min(two_pi - da)));
            }
        }
        loop_closure = best;
    }
    BiSignature {
        diagonal_crossings,
        axis_hits,
        loop_closure,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiTarget {
    EmbeddedT3,
    /// 1-based index into the immersed torus candidates, ordered by
    /// (crossing index, parameter).
    ImmersedT3(u8),
    /// 1-based index into the immersed sphere candidates, ordered by
    /// parameter.
    ImmersedS3(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiTopology {
    /// Closed loop in the open quadrant: rotates to a T^3.
    T3,
    /// Orthogonal hits on both coordinate axes: rotates to an S^3.
    S3,
    Unclassified,
}

#[derive(Debug, Clone, Copy)]
pub struct BiProfileReport {
    pub closure: BiTopology,
    pub self_intersections: usize,
    /// Dominant closure defect: crossing-angle defect for loops, axis-hit
    /// defect for sphere-type arcs.
    pub symmetry_defect: f64,
}

/// Classifies a trajectory from [`shoot_bi`] by its closure type.
pub fn classify_bi_profile(traj: &Trajectory) -> BiProfileReport {
    classify_bi_profile_with(traj, &IntegrateOptions::default())
}

pub fn classify_bi_profile_with(traj: &Trajectory, opts: &IntegrateOptions) -> BiProfileReport {
    let metric = traj.metric;
    let sig = bi_signature(&metric, traj, opts);
    const TOL: f64 = 1e-3;
    if let Some(hit) = sig.axis_hits.first() {
        if hit.defect.abs() < TOL {
            let arc = traj.polyline(3000);
            let profile = mirrored_open_diag(&arc);
            return BiProfileReport {
                closure: BiTopology::S3,
                self_intersections: crate::curve::count_self_intersections(&profile, false),
                symmetry_defect: hit.defect.abs(),
            };
        }
    }
    if let Some(cross) = sig
        .diagonal_crossings
        .iter()
        .find(|c| c.angle_defect.abs() < TOL)
    {
        let n_pts = 3000;
        let arc: Vec<Point> = (0..n_pts)
            .map(|i| traj.position(cross.s * i as f64 / (n_pts - 1) as f64))
            .collect();
        let profile = mirrored_closed_diag(&arc);
        return BiProfileReport {
            closure: BiTopology::T3,
            self_intersections: crate::curve::count_self_intersections(&profile, true),
            symmetry_defect: cross.angle_defect.abs(),
        };
    }
    BiProfileReport {
        closure: BiTopology::Unclassified,
        self_intersections: 0,
        symmetry_defect: f64::NAN,
    }
}

/// Closes an arc whose endpoints both lie on the diagonal by appending its
/// reflection (interior points only, so the on-diagonal endpoints are not
/// duplicated).
fn mirrored_closed_diag(arc: &[Point]) -> Vec<Point> {
    let mut out = arc.to_vec();
    out.extend(arc[1..arc.len() - 1].iter().rev().map(|p| p.swap()));
    out
}

/// The sphere-type profile is an open arc from one coordinate axis to the
/// other, passing through the diagonal launch point: the reflected arc
/// leads in, the arc itself leads out.
fn mirrored_open_diag(arc: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = arc.iter().rev().map(|p| p.swap()).collect();
    out.extend(arc[1..].iter().copied());
    out
}

/// Signed defect at the k-th diagonal crossing (0-based), None if absent.
fn crossing_defect_fn(
    m: u32,
    k: usize,
    s_max: f64,
    opts: &IntegrateOptions,
) -> impl Fn(f64) -> Option<(f64, Trajectory)> + '_ {
    move |t: f64| {
        let (traj, _) = shoot_bi_with(&BiShotSpec::new(m, t, BiLaunch::DiagonalOrthogonal), s_max, opts).ok()?;
        let cross = traj.events_with_id(EV_DIAG).nth(k)?;
        Some((diagonal_defect(cross.state.psi), traj))
    }
}

/// Signed axis-hit defect of the shot, None unless it ends on an axis.
fn axis_defect_fn(
    m: u32,
    s_max: f64,
    opts: &IntegrateOptions,
) -> impl Fn(f64) -> Option<(f64, Trajectory)> + '_ {
    move |t: f64| {
        let metric = MetricSpec::bi_rotational(m, m).ok()?;
        let (traj, _) = shoot_bi_with(&BiShotSpec::new(m, t, BiLaunch::DiagonalOrthogonal), s_max, opts).ok()?;
        if traj.terminal != Terminal::HitFloor {
            return None;
        }
        let (_, defect) = axis_hit_report(&metric, &traj.end_state(), opts.floor_radius).ok()?;
        Some((defect, traj))
    }
}

/// All bisected roots of `f` over brackets found on a uniform sweep, with
/// local refinement of isolated defined samples (the axis-hit basins can be
/// narrower than the sweep spacing).
fn sweep_roots<F>(
    lo: f64,
    hi: f64,
    samples: usize,
    refine: usize,
    tol: f64,
    f: F,
) -> (Vec<f64>, Vec<SweepSample>)
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    let coarse = crate::search::sweep(lo, hi, samples, &f);
    let mut brackets: Vec<(f64, f64)> = Vec::new();
    for w in coarse.windows(2) {
        if let (Some(a), Some(b)) = (w[0].value, w[1].value) {
            if a == 0.0 || a * b < 0.0 {
                brackets.push((w[0].t, w[1].t));
            }
        }
    }
    // Isolated defined samples: look for a sign change inside the
    // neighboring spacing.
    if refine > 0 {
        let spacing = (hi - lo) / (samples - 1) as f64;
        for (i, s) in coarse.iter().enumerate() {
            if s.value.is_none() {
                continue;
            }
            let left_missing = i == 0 || coarse[i - 1].value.is_none();
            let right_missing = i + 1 >= coarse.len() || coarse[i + 1].value.is_none();
            if left_missing || right_missing {
                let fine = crate::search::sweep(
                    (s.t - spacing).max(lo),
                    (s.t + spacing).min(hi),
                    refine,
                    &f,
                );
                for w in fine.windows(2) {
                    if let (Some(a), Some(b)) = (w[0].value, w[1].value) {
                        if a == 0.0 || a * b < 0.0 {
                            brackets.push((w[0].t, w[1].t));
                        }
                    }
                }
            }
        }
    }
    brackets.sort_by(|x, y| x.0.total_cmp(&y.0));
    brackets.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-9);
    let mut roots = Vec::new();
    for (blo, bhi) in brackets {
        if let Ok((root, _)) = bisect_value(blo, bhi, tol, &f) {
            if roots.iter().all(|r: &f64| (r - root).abs() > 1e-6) {
                roots.push(root);
            }
        }
    }
    (roots, coarse)
}

/// A converged closed candidate: parameter, arc trajectory, assembled
/// profile, closure residuals.
struct BiCandidate {
    t: f64,
    crossing_index: usize,
    traj: Trajectory,
    profile: Vec<Point>,
    residuals: BTreeMap<String, f64>,
    self_intersections: usize,
    simple: bool,
}

fn torus_candidate(
    m: u32,
    k: usize,
    t: f64,
    s_max: f64,
    opts: &IntegrateOptions,
) -> Option<BiCandidate> {
    let tight = opts.with_tolerances(opts.rel_tol * 1e-2, opts.abs_tol * 1e-2);
    let (traj, _) =
        shoot_bi_with(&BiShotSpec::new(m, t, BiLaunch::DiagonalOrthogonal), s_max, &tight).ok()?;
    let cross = traj.events_with_id(EV_DIAG).nth(k)?.clone();
    let n_pts = 4000;
    let arc: Vec<Point> = (0..n_pts)
        .map(|i| traj.position(cross.s * i as f64 / (n_pts - 1) as f64))
        .collect();
    let profile = mirrored_closed_diag(&arc);
    let mut residuals = BTreeMap::new();
    residuals.insert(
        "crossing_angle_defect".into(),
        diagonal_defect(cross.state.psi).abs(),
    );
    // Continuation closure: past the crossing the arc must retrace the
    // mirror back to the launch point.
    let s_loop = 2.0 * cross.s;
    if traj.s_end >= s_loop {
        let back = traj.sample(s_loop);
        let start = traj.initial_state();
        residuals.insert(
            "closure_position_gap".into(),
            Point::new(back.u, back.v).dist(Point::new(start.u, start.v)),
        );
        let two_pi = 2.0 * std::f64::consts::PI;
        let da = (back.psi - start.psi).rem_euclid(two_pi);
        residuals.insert("closure_angle_gap".into(), da.min(two_pi - da));
    }
    let simple = crate::curve::is_simple_closed(&profile);
    let self_intersections = crate::curve::count_self_intersections(&profile, true);
    Some(BiCandidate {
        t,
        crossing_index: k,
        traj,
        profile,
        residuals,
        self_intersections,
        simple,
    })
}

fn sphere_candidate(m: u32, t: f64, s_max: f64, opts: &IntegrateOptions) -> Option<BiCandidate> {
    let metric = MetricSpec::bi_rotational(m, m).ok()?;
    let tight = opts.with_tolerances(opts.rel_tol * 1e-2, opts.abs_tol * 1e-2);
    let (traj, _) =
        shoot_bi_with(&BiShotSpec::new(m, t, BiLaunch::DiagonalOrthogonal), s_max, &tight).ok()?;
    if traj.terminal != Terminal::HitFloor {
        return None;
    }
    let (coordinate, defect) = axis_hit_report(&metric, &traj.end_state(), opts.floor_radius).ok()?;
    let arc = traj.polyline(4000);
    let profile = mirrored_open_diag(&arc);
    let mut residuals = BTreeMap::new();
    residuals.insert("axis_hit_defect".into(), defect.abs());
    residuals.insert("axis_hit_coordinate".into(), coordinate);
    residuals.insert(
        "launch_diagonal_defect".into(),
        diagonal_defect(traj.initial_state().psi).abs(),
    );
    let self_intersections = crate::curve::count_self_intersections(&profile, false);
    Some(BiCandidate {
        t,
        crossing_index: 0,
        traj,
        profile,
        residuals,
        self_intersections,
        simple: self_intersections == 0,
    })
}

fn candidate_to_result(c: BiCandidate, classification: Classification) -> SearchResult {
    SearchResult {
        parameter: c.t,
        bracket: (c.t, c.t),
        residuals: c.residuals,
        profile: c.profile,
        trajectory: Some(c.traj),
        classification,
        symmetry: SymmetryAxis::Diagonal,
    }
}

/// Searches the diagonal shooting family for the requested closed profile.
pub fn find_symmetric_closed(m: u32, target: BiTarget) -> Result<SearchResult> {
    find_symmetric_closed_with(m, target, &IntegrateOptions::default())
}

pub fn find_symmetric_closed_with(
    m: u32,
    target: BiTarget,
    opts: &IntegrateOptions,
) -> Result<SearchResult> {
    let metric = MetricSpec::bi_rotational(m, m)?;
    // The discovery window scales with the sphere radius; for M = 1 it is
    // the sweep range [0.2, 4].
    let scale = metric.sphere_radius() / 6.0f64.sqrt();
    let (lo, hi) = (0.2 * scale, 4.0 * scale);
    let s_max = 30.0 * scale;

    match target {
        BiTarget::EmbeddedT3 => {
            let f = |t: f64| crossing_defect_fn(m, 0, s_max, opts)(t).map(|(d, _)| d);
            let (roots, table) = sweep_roots(lo, hi, 200, 0, 1e-10, f);
            for root in &roots {
                if let Some(c) = torus_candidate(m, 0, *root, s_max, opts) {
                    if c.simple && c.residuals["crossing_angle_defect"] < 1e-6 {
                        let bracket = (root - 1e-10, root + 1e-10);
                        let mut result = candidate_to_result(c, Classification::EmbeddedTorus);
                        result.bracket = bracket;
                        return Ok(result);
                    }
                }
            }
            Err(Error::search_failure(
                "no simple closed profile among first-crossing roots",
                table,
            ))
        }
        BiTarget::ImmersedT3(index) => {
            if index == 0 {
                return Err(Error::Input("immersed torus index is 1-based".into()));
            }
            let mut candidates: Vec<BiCandidate> = Vec::new();
            let mut table = Vec::new();
            for k in 0..3usize {
                let f = |t: f64| crossing_defect_fn(m, k, s_max, opts)(t).map(|(d, _)| d);
                let (roots, tbl) = sweep_roots(lo, hi, 200, 0, 1e-10, f);
                if k == 0 {
                    table = tbl;
                }
                for root in roots {
                    if let Some(c) = torus_candidate(m, k, root, s_max, opts) {
                        let closed = c
                            .residuals
                            .get("closure_position_gap")
                            .map_or(true, |g| *g < 1e-4);
                        if !c.simple
                            && c.self_intersections >= 1
                            && closed
                            && c.residuals["crossing_angle_defect"] < 1e-6
                            && candidates
                                .iter()
                                .all(|p| (p.t - c.t).abs() > 1e-6 || p.crossing_index != c.crossing_index)
                        {
                            candidates.push(c);
                        }
                    }
                }
            }
            candidates.sort_by(|a, b| {
                (a.crossing_index, a.t)
                    .partial_cmp(&(b.crossing_index, b.t))
                    .unwrap()
            });
            candidates
                .into_iter()
                .nth(index as usize - 1)
                .map(|c| candidate_to_result(c, Classification::ImmersedTorus))
                .ok_or_else(|| {
                    Error::search_failure(
                        format!("fewer than {index} immersed torus candidates"),
                        table,
                    )
                })
        }
        BiTarget::ImmersedS3(index) => {
            if index == 0 {
                return Err(Error::Input("immersed sphere index is 1-based".into()));
            }
            let f = |t: f64| axis_defect_fn(m, s_max, opts)(t).map(|(d, _)| d);
            // Axis arrivals amplify parameter error by (c / floor)^M times
            // the loop count, so this bracket runs tighter.
            let (roots, table) = sweep_roots(lo, hi, 400, 64, 1e-12, f);
            let mut candidates: Vec<BiCandidate> = Vec::new();
            for root in roots {
                if let Some(c) = sphere_candidate(m, root, s_max, opts) {
                    if c.self_intersections >= 1 && c.residuals["axis_hit_defect"] < 1e-6 {
                        candidates.push(c);
                    }
                }
            }
            candidates.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
            candidates
                .into_iter()
                .nth(index as usize - 1)
                .map(|c| candidate_to_result(c, Classification::ImmersedSphere))
                .ok_or_else(|| {
                    Error::search_failure(
                        format!("fewer than {index} immersed sphere candidates"),
                        table,
                    )
                })
        }
    }
}
