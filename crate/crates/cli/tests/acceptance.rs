//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured numbers (run with `--nocapture` to see them all).
//!
//! The flow-based criteria share their expensive converged runs through
//! OnceLocks and serialize behind a lock so wall-clock budgets are
//! measured without contention.

use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use shrinker_cli::commands::exact_suite;
use shrinker_core::birotational::{self, BiTarget, BiTopology};
use shrinker_core::csf::{self, FlowControls, FlowOutcome};
use shrinker_core::curve::{count_self_intersections, hausdorff_closed};
use shrinker_core::geometry::{gauss_area_rectangle, weighted_length_closed, MetricSpec, Point};
use shrinker_core::ode::{default_bbox, integrate, IntegrateOptions, ProfileState};
use shrinker_core::planar::{self, PlanarState};
use shrinker_core::quad::gauss_legendre;
use shrinker_core::search::single_sign_change;
use shrinker_core::shooting;
use shrinker_core::testutil::Lcg;
use shrinker_core::SearchResult;

fn flow_lock() -> std::sync::MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn flow_controls() -> FlowControls {
    FlowControls {
        max_time: 45.0,
        max_steps: 200_000,
        ..Default::default()
    }
}

fn csf_torus(n: u32) -> &'static (SearchResult, FlowOutcome) {
    static N2: OnceLock<(SearchResult, FlowOutcome)> = OnceLock::new();
    static N3: OnceLock<(SearchResult, FlowOutcome)> = OnceLock::new();
    let cell = match n {
        2 => &N2,
        3 => &N3,
        _ => panic!("unsupported n"),
    };
    cell.get_or_init(|| csf::find_pinned_parameter(n, &flow_controls()).expect("pinned search"))
}

#[test]
fn acceptance_1_exact_solution_residuals() {
    let start = Instant::now();
    let cases = exact_suite(2, 1).expect("exact suite");
    let elapsed = start.elapsed();
    let worst = cases.iter().map(|c| c.deviation).fold(0.0f64, f64::max);
    for c in &cases {
        assert!(
            c.deviation < 1e-8,
            "{}: deviation {:.3e} >= 1e-8",
            c.name,
            c.deviation
        );
    }
    assert!(elapsed.as_secs_f64() < 5.0, "suite took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: {} exact profiles, worst deviation {worst:.3e} (< 1e-8), {elapsed:.2?} (< 5 s)",
        cases.len()
    );
}

#[test]
fn acceptance_2_conservation_laws() {
    let alpha = -0.5;
    let mut rng = Lcg::new(2026);
    let mut starts = Vec::new();
    while starts.len() < 10 {
        let st = PlanarState::new(
            rng.range(0.4, 1.8),
            rng.range(-1.0, 1.0),
            rng.range(0.0, 2.0 * std::f64::consts::PI),
        );
        if st.nu().abs() > 0.05 {
            starts.push(st);
        }
    }
    let run = |rel: f64, abs: f64| -> (f64, f64) {
        let opts = IntegrateOptions::default().with_tolerances(rel, abs);
        let mut d1_max = 0.0f64;
        let mut d2_max = 0.0f64;
        for st in &starts {
            let traj = planar::integrate_planar_with(alpha, *st, 50.0, &opts).unwrap();
            let rep = planar::conservation_report(&traj, alpha, 5000);
            d1_max = d1_max.max(rep.drift1);
            d2_max = d2_max.max(rep.drift2.expect("non-flat"));
        }
        (d1_max, d2_max)
    };
    let (d1, d2) = run(1e-10, 1e-12);
    assert!(d1 < 1e-8, "I1 drift {d1:.3e}");
    assert!(d2 < 1e-8, "I2 drift {d2:.3e}");
    let (t1, t2) = run(1e-11, 1e-13);
    assert!(d1 / t1 >= 10.0, "I1 drift ratio {:.2}", d1 / t1);
    assert!(d2 / t2 >= 10.0, "I2 drift ratio {:.2}", d2 / t2);
    println!(
        "ACCEPTANCE 2 PASS: drifts {d1:.2e}/{d2:.2e} (< 1e-8), 10x tightening shrinks {:.1}x/{:.1}x (>= 10x)",
        d1 / t1,
        d2 / t2
    );
}

#[test]
fn acceptance_3_immersed_sphere() {
    let _guard = flow_lock();
    let start = Instant::now();
    let n = 2;
    let res = shooting::find_immersed_sphere(n).expect("immersed sphere");
    assert!(res.bracket.1 - res.bracket.0 < 1e-10, "bracket width");
    assert!(res.parameter < 2.0, "x_* = {} >= sqrt(4)", res.parameter);
    assert!(res.residuals["q_axis_offset"] < 1e-6);
    assert!(res.residuals["axis_hit_defect_launch"] < 1e-6);
    assert!(res.residuals["axis_hit_defect_far"] < 1e-6);
    // Non-embeddedness witness: the arc crosses the r-axis between the
    // launch and its height maximum. (The small-t pattern's second
    // crossing degenerates into the touch at Q in the converged limit.)
    let sig = shooting::signature(res.trajectory.as_ref().unwrap());
    let b = sig.b.as_ref().expect("B point");
    assert_eq!(
        sig.crossings.iter().filter(|e| e.s < b.s).count(),
        1,
        "crossing witness before B"
    );
    // Stability of the derived value under 100x tolerance tightening.
    let tight = IntegrateOptions::default().with_tolerances(1e-12, 1e-14);
    let res_tight = shooting::find_immersed_sphere_with(n, &tight).expect("tight rerun");
    let shift = (res.parameter - res_tight.parameter).abs();
    assert!(shift < 1e-6, "x_* moved by {shift:.3e} under tightening");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 3 PASS: x_* = {:.10} (< 2), bracket {:.1e}, tightened shift {shift:.2e} (< 1e-6), {elapsed:.2?} (< 30 s)",
        res.parameter,
        res.bracket.1 - res.bracket.0
    );
}

#[test]
fn acceptance_4_embedded_torus_two_ways() {
    let _guard = flow_lock();
    let start = Instant::now();
    let n = 2;
    let m = MetricSpec::rotational(n).unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;

    let shot = shooting::find_embedded_torus(n).expect("shooting torus");
    assert_eq!(count_self_intersections(&shot.profile, true), 0, "simple");
    let l_shot = weighted_length_closed(&m, &shot.profile).unwrap();
    assert!(l_shot < 4.0, "shooting L_2 = {l_shot}");

    let (csf_res, out) = csf_torus(2);
    assert!(out.monitors.residual < 1e-6, "CSF residual");
    let l_csf = out.monitors.length;
    assert!(l_csf < 4.0, "CSF L_2 = {l_csf}");
    let area_defect = (out.monitors.gauss_area - two_pi).abs();
    assert!(area_defect < 1e-3 * two_pi, "gauss area defect {area_defect:.3e}");
    for w in out.history.windows(2) {
        assert!(w[1].length <= w[0].length, "length history not monotone");
    }
    let d = hausdorff_closed(&csf_res.profile, &shot.profile);
    assert!(d < 1e-3, "hausdorff {d:.3e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 4 PASS: hausdorff {d:.2e} (< 1e-3), L_2 = {l_shot:.6}/{l_csf:.6} (< 4), area defect {area_defect:.2e}, monotone history, {elapsed:.2?} (< 5 min)"
    );
}

#[test]
fn acceptance_5_csf_constants() {
    let c0 = csf::compute_c0();
    assert!((c0 - 0.481).abs() < 5e-4, "c0 = {c0}");
    let b = csf::compute_phi(2, 1.0).unwrap();
    let area = gauss_area_rectangle(&MetricSpec::rotational(2).unwrap(), 1.0, b, c0).unwrap();
    let area_defect = (area - 2.0 * std::f64::consts::PI).abs();
    assert!(area_defect < 1e-10, "area identity defect {area_defect:.3e}");
    let closed_form = (b - 1.0 / b - std::f64::consts::PI / c0).abs();
    assert!(closed_form < 1e-8, "b - 1/b defect {closed_form:.3e}");
    // Defining residual of c0 itself.
    let residual =
        (-c0 * c0 / 4.0).exp() - 2.0 * gauss_legendre(|x| (-x * x / 4.0).exp(), 0.0, c0, 32);
    assert!(residual.abs() < 1e-12);
    println!(
        "ACCEPTANCE 5 PASS: c0 = {c0:.6} (~0.481), phi(1) = {b:.6}, area identity {area_defect:.1e} (< 1e-10), b-1/b defect {closed_form:.1e} (< 1e-8)"
    );
}

#[test]
fn acceptance_6_length_bound_n3() {
    let _guard = flow_lock();
    let start = Instant::now();
    let (_, out) = csf_torus(3);
    assert!(out.monitors.residual < 1e-6);
    let bound = 4.0 * std::f64::consts::PI.sqrt();
    let l3 = out.monitors.length;
    assert!(l3 < bound, "L_3 = {l3} >= {bound}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 6 PASS: L_3 = {l3:.6} < 4 sqrt(pi) = {bound:.6}, {elapsed:.2?} (< 5 min)"
    );
}

#[test]
fn acceptance_7_birotational_reproduction() {
    let _guard = flow_lock();
    let start = Instant::now();
    let m_bi = 1;

    let embedded = birotational::find_symmetric_closed(m_bi, BiTarget::EmbeddedT3).expect("T3");
    assert_eq!(count_self_intersections(&embedded.profile, true), 0, "simple");
    assert!(embedded.residuals["crossing_angle_defect"] < 1e-6);
    assert!(embedded.residuals["closure_position_gap"] < 1e-6);
    // Diagonal symmetry of the assembled profile.
    let sym_defect = diagonal_symmetry_defect(&embedded.profile);
    assert!(sym_defect < 1e-9, "diagonal symmetry {sym_defect:.3e}");
    let report = birotational::classify_bi_profile(embedded.trajectory.as_ref().unwrap());
    assert_eq!(report.closure, BiTopology::T3);

    let immersed_t3 =
        birotational::find_symmetric_closed(m_bi, BiTarget::ImmersedT3(1)).expect("immersed T3");
    assert!(immersed_t3.residuals["crossing_angle_defect"] < 1e-6);
    assert!(immersed_t3.residuals["closure_position_gap"] < 1e-6);
    let t3_crossings = count_self_intersections(&immersed_t3.profile, true);
    assert!(t3_crossings >= 1, "immersed T3 self-intersections");

    let immersed_s3 =
        birotational::find_symmetric_closed(m_bi, BiTarget::ImmersedS3(1)).expect("immersed S3");
    assert!(immersed_s3.residuals["axis_hit_defect"] < 1e-6);
    let s3_crossings = count_self_intersections(&immersed_s3.profile, true);
    assert!(s3_crossings >= 1, "immersed S3 self-intersections");
    // Two orthogonal axis hits: the measured one plus its diagonal mirror.
    let s3_traj = immersed_s3.trajectory.as_ref().unwrap();
    assert_eq!(s3_traj.terminal, shrinker_core::Terminal::HitFloor);
    let s3_report = birotational::classify_bi_profile(s3_traj);
    assert_eq!(s3_report.closure, BiTopology::S3);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 7 PASS: embedded T3 at t = {:.6} (simple, defect {:.1e}), immersed T3 at {:.6} ({} crossings), immersed S3 at {:.6} ({} crossings, axis defect {:.1e}), {elapsed:.2?} (< 5 min)",
        embedded.parameter,
        embedded.residuals["crossing_angle_defect"],
        immersed_t3.parameter,
        t3_crossings,
        immersed_s3.parameter,
        s3_crossings,
        immersed_s3.residuals["axis_hit_defect"]
    );
}

fn diagonal_symmetry_defect(profile: &[Point]) -> f64 {
    // The assembled profile lists the arc then its mirror: vertex k pairs
    // with the swapped vertex from the other half.
    let n = profile.len();
    let mut worst = 0.0f64;
    for (i, p) in profile.iter().enumerate() {
        let q = profile[(n - i) % n].swap();
        worst = worst.max(p.dist(q));
    }
    worst
}

#[test]
fn acceptance_8_property_suites() {
    let _guard = flow_lock();
    let start = Instant::now();

    // Reflection equivariance (half-plane) at 1e-10.
    let m2 = MetricSpec::rotational(3).unwrap();
    let tight = IntegrateOptions::default().with_tolerances(1e-12, 1e-14);
    let a = integrate(
        &m2,
        ProfileState::new(0.7, 1.4, 0.9),
        &[],
        6.0,
        default_bbox(&m2),
        &tight,
    )
    .unwrap();
    let b = integrate(
        &m2,
        ProfileState::new(-0.7, 1.4, std::f64::consts::PI - 0.9),
        &[],
        6.0,
        default_bbox(&m2),
        &tight,
    )
    .unwrap();
    let mut reflect_defect = 0.0f64;
    let s_common = a.s_end.min(b.s_end);
    for i in 0..400 {
        let s = s_common * i as f64 / 399.0;
        let (pa, pb) = (a.sample(s), b.sample(s));
        reflect_defect = reflect_defect
            .max((pa.u + pb.u).abs())
            .max((pa.v - pb.v).abs());
    }
    assert!(reflect_defect < 1e-10, "reflection defect {reflect_defect:.3e}");

    // Diagonal equivariance (quadrant) at 1e-10.
    let mb = MetricSpec::bi_rotational(1, 1).unwrap();
    let a = integrate(
        &mb,
        ProfileState::new(0.9, 1.7, 0.4),
        &[],
        5.0,
        default_bbox(&mb),
        &tight,
    )
    .unwrap();
    let b = integrate(
        &mb,
        ProfileState::new(1.7, 0.9, std::f64::consts::FRAC_PI_2 - 0.4),
        &[],
        5.0,
        default_bbox(&mb),
        &tight,
    )
    .unwrap();
    let mut diag_defect = 0.0f64;
    let s_common = a.s_end.min(b.s_end);
    for i in 0..400 {
        let s = s_common * i as f64 / 399.0;
        let (pa, pb) = (a.sample(s), b.sample(s));
        diag_defect = diag_defect
            .max((pa.u - pb.v).abs())
            .max((pa.v - pb.u).abs());
    }
    assert!(diag_defect < 1e-10, "diagonal defect {diag_defect:.3e}");

    // Gauss-Bonnet closure on the terminal geodesics. The leftover
    // gradient field at the stopping tolerance is sign-coherent, so the
    // signed total retains about half of N * residual; the curves are
    // polished a factor deeper before summing.
    let polish = FlowControls {
        tol_geodesic: 2.5e-7,
        ..flow_controls()
    };
    let mut gb_worst = 0.0f64;
    for n in [2u32, 3] {
        let (_, out) = csf_torus(n);
        let polished = csf::refine_pinned(&out.curve, out.curve.vertices.len(), &polish)
            .expect("polish run");
        let metric = MetricSpec::rotational(n).unwrap();
        let gb = csf::total_geodesic_curvature(&metric, &polished.curve.vertices).abs();
        assert!(gb < 1e-4, "n = {n}: total geodesic curvature {gb:.3e}");
        gb_worst = gb_worst.max(gb);
    }

    // Mesh-doubling stability of the terminal weighted length.
    let (_, out2) = csf_torus(2);
    let refined = csf::refine_pinned(&out2.curve, 512, &flow_controls()).expect("refined run");
    assert!(refined.monitors.residual < 1e-6);
    let rel = ((refined.monitors.length - out2.monitors.length) / out2.monitors.length).abs();
    assert!(rel < 1e-4, "mesh-doubling length shift {rel:.3e}");

    // Determinism: searches produce bit-identical parameters on rerun.
    let t1 = shooting::find_embedded_torus(2).unwrap();
    let t2 = shooting::find_embedded_torus(2).unwrap();
    assert_eq!(t1.parameter.to_bits(), t2.parameter.to_bits());
    // ... and the CLI emits byte-identical artifacts for identical configs.
    let dir1 = std::env::temp_dir().join(format!("sl-acc-det1-{}", std::process::id()));
    let dir2 = std::env::temp_dir().join(format!("sl-acc-det2-{}", std::process::id()));
    for d in [&dir1, &dir2] {
        let _ = std::fs::remove_dir_all(d);
        std::fs::create_dir_all(d).unwrap();
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_shrinker-lab"))
            .args([
                "shoot", "--family", "s", "--t", "1.1", "--n", "2", "--s-max", "12", "--out-dir",
            ])
            .arg(d)
            .status()
            .unwrap();
        assert!(status.success());
    }
    for name in ["shoot-s_trajectory.csv", "shoot-s.svg", "shoot-s.manifest"] {
        let x = std::fs::read(dir1.join(name)).unwrap();
        let y = std::fs::read(dir2.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between identical runs");
    }

    // Monotone event continuity across a converged bracket.
    assert!(single_sign_change(
        t1.parameter - 5e-7,
        t1.parameter + 5e-7,
        16,
        |t| shooting::embedded_torus_functional(2, t, &IntegrateOptions::default())
    ));

    println!(
        "ACCEPTANCE 8 PASS: equivariance {reflect_defect:.1e}/{diag_defect:.1e} (< 1e-10), Gauss-Bonnet {gb_worst:.1e} (< 1e-4), mesh-doubling {rel:.1e} (< 1e-4), deterministic reruns, {:.2?}",
        start.elapsed()
    );
}
