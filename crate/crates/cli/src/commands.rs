//! Subcommand implementations.

use std::path::{Path, PathBuf};

use shrinker_core::birotational::{self, BiLaunch, BiShotSpec, BiTarget};
use shrinker_core::csf::{self, FlowControls};
use shrinker_core::curve::hausdorff_closed;
use shrinker_core::geometry::{weighted_length_closed, MetricSpec, Point};
use shrinker_core::ode::{
    default_bbox, integrate, start_from_axis, BBox, IntegrateOptions, ProfileState, Terminal,
};
use shrinker_core::planar::{self, PlanarState};
use shrinker_core::shooting::{self, ShotFamily, ShotSpec};
use shrinker_core::SearchResult;

use crate::args::Flags;
use crate::csv;
use crate::manifest::{record_search, Manifest};
use crate::svg::{self, Decoration};
use crate::{write_atomic, CliError};

const USAGE: &str = "\
shrinker-lab: numerical closed self-shrinkers via weighted geodesics

subcommands:
  verify-exact --n <n> [--m <M>]           exact-solution residual suite
  planar [--alpha A] [--x X --y Y --theta TH --s-max S | --rotation p --petals q]
  shoot --family s|t|bi --t T [--n N | --m M] [--s-max S]
  find <sphere|sphere2|torus-embedded|torus-immersed> --n N
  csf --n N [--a A]                        variational closed geodesic
  find-bi --target <embedded-t3|immersed-t3-K|immersed-s3-K> [--m M]
  report --manifest PATH | --compare PATH PATH

common flags: --out-dir DIR (default out), --rel-tol R, --abs-tol A, --grid N";

pub fn dispatch(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Usage(USAGE.into()));
    };
    let rest = &args[1..];
    match command.as_str() {
        "verify-exact" => cmd_verify_exact(rest),
        "planar" => cmd_planar(rest),
        "shoot" => cmd_shoot(rest),
        "find" => cmd_find(rest),
        "csf" => cmd_csf(rest),
        "find-bi" => cmd_find_bi(rest),
        "report" => cmd_report(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err(CliError::Usage(format!(
            "unknown subcommand '{other}'\n{USAGE}"
        ))),
    }
}

fn out_dir(flags: &Flags) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(flags.get("out-dir").unwrap_or("out"));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn integrate_options(flags: &Flags) -> Result<IntegrateOptions, CliError> {
    let mut opts = IntegrateOptions::default();
    opts.rel_tol = flags.get_f64("rel-tol", opts.rel_tol)?;
    opts.abs_tol = flags.get_f64("abs-tol", opts.abs_tol)?;
    if opts.rel_tol <= 0.0 || opts.abs_tol <= 0.0 {
        return Err(CliError::Input("tolerances must be positive".into()));
    }
    Ok(opts)
}

/// One named case of the exact-solution suite: max positional deviation of
/// an integrated fundamental profile from its closed form.
pub struct ExactCase {
    pub name: &'static str,
    pub deviation: f64,
}

/// Integrates every fundamental example and measures the worst deviation
/// from the exact locus. Tolerances are tightened beyond the defaults
/// because the axis arrivals amplify error by (r/floor)^{n-1}.
pub fn exact_suite(n: u32, m_bi: u32) -> Result<Vec<ExactCase>, CliError> {
    // Tolerances beyond the defaults, and generous steps: the straight-line
    // profiles are unstable geodesics, so per-step noise is amplified
    // exponentially along the run and the injection count matters.
    let mut opts = IntegrateOptions::default().with_tolerances(1e-13, 1e-15);
    opts.h_max = 1.0;
    let mut cases = Vec::new();
    let wide = |half: f64| BBox::new(-half, half, 0.0, half);

    // Rotational spheres and cylinders for the requested n and n + 1.
    for nn in [n, n + 1] {
        let metric = MetricSpec::rotational(nn).map_err(CliError::from)?;
        let r_sph = metric.sphere_radius();
        let start = start_from_axis(&metric, r_sph).map_err(CliError::from)?;
        let traj = integrate(&metric, start, &[], 10.0, default_bbox(&metric), &opts)
            .map_err(CliError::from)?;
        let dev = traj
            .uniform_grid(4000)
            .iter()
            .map(|st| (st.u.hypot(st.v) - r_sph).abs())
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: if nn == n { "sphere-n" } else { "sphere-n+1" },
            deviation: dev,
        });

        // A length-10 piece of the line centered on the axis: the line is
        // an unstable geodesic and perturbations contract for u < 0.
        let r_cyl = metric.cylinder_radius().unwrap();
        let st = ProfileState::new(-5.0, r_cyl, 0.0);
        let traj = integrate(&metric, st, &[], 10.0, wide(12.0), &opts).map_err(CliError::from)?;
        let dev = traj
            .uniform_grid(2000)
            .iter()
            .map(|st| (st.v - r_cyl).abs())
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: if nn == n { "cylinder-n" } else { "cylinder-n+1" },
            deviation: dev,
        });
    }

    // Planar circle of radius sqrt 2.
    {
        let r = 2.0f64.sqrt();
        let start = PlanarState::new(r, 0.0, std::f64::consts::FRAC_PI_2);
        let traj =
            planar::integrate_planar_with(-0.5, start, 10.0, &opts).map_err(CliError::from)?;
        let dev = traj
            .uniform_grid(2000)
            .iter()
            .map(|st| (st.u.hypot(st.v) - r).abs())
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: "planar-circle",
            deviation: dev,
        });
    }

    // Quadrant: Clifford cone, both cylinders, round sphere.
    {
        let metric = MetricSpec::bi_rotational(m_bi, m_bi).map_err(CliError::from)?;
        let quad = |half: f64| BBox::new(0.0, half, 0.0, half);
        // The cone is traversed inward as well (contracting outside the
        // sphere radius, where most of the span lies).
        let c_far = 0.3 + 10.0 / std::f64::consts::SQRT_2;
        let (cone, _) = birotational::shoot_bi_with(
            &BiShotSpec::new(
                m_bi,
                c_far,
                BiLaunch::Custom(Point::new(c_far, c_far), 1.25 * std::f64::consts::PI),
            ),
            10.0,
            &opts,
        )
        .map_err(CliError::from)?;
        let dev = cone
            .uniform_grid(2000)
            .iter()
            .map(|st| (st.u - st.v).abs() / std::f64::consts::SQRT_2)
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: "clifford-cone",
            deviation: dev,
        });

        // The quadrant lines are traversed inward: tracking is contracting
        // for u above the cylinder radius, which is most of the span.
        let r_cyl = metric.cylinder_radius().unwrap();
        let st = ProfileState::new(10.1, r_cyl, std::f64::consts::PI);
        let traj = integrate(&metric, st, &[], 10.0, quad(12.0), &opts).map_err(CliError::from)?;
        let dev = traj
            .uniform_grid(2000)
            .iter()
            .map(|st| (st.v - r_cyl).abs())
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: "bi-cylinder-y",
            deviation: dev,
        });
        let st = ProfileState::new(r_cyl, 10.1, -std::f64::consts::FRAC_PI_2);
        let traj = integrate(&metric, st, &[], 10.0, quad(12.0), &opts).map_err(CliError::from)?;
        let dev = traj
            .uniform_grid(2000)
            .iter()
            .map(|st| (st.u - r_cyl).abs())
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: "bi-cylinder-x",
            deviation: dev,
        });

        let r_sph = metric.sphere_radius();
        let t0 = r_sph / std::f64::consts::SQRT_2;
        let (traj, _) = birotational::shoot_bi_with(
            &BiShotSpec::new(m_bi, t0, BiLaunch::DiagonalOrthogonal),
            10.0,
            &opts,
        )
        .map_err(CliError::from)?;
        let dev = traj
            .uniform_grid(2000)
            .iter()
            .map(|st| (st.u.hypot(st.v) - r_sph).abs())
            .fold(0.0, f64::max);
        cases.push(ExactCase {
            name: "bi-sphere",
            deviation: dev,
        });
    }
    Ok(cases)
}

fn cmd_verify_exact(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["n", "m", "out-dir"])?;
    let n = flags.get_u32("n", 2)?;
    let m_bi = flags.get_u32("m", 1)?;
    let cases = exact_suite(n, m_bi)?;
    let mut worst: f64 = 0.0;
    for case in &cases {
        println!("{:-16} deviation {:.3e}", case.name, case.deviation);
        worst = worst.max(case.deviation);
    }
    if worst < 1e-8 {
        println!("all {} residuals < 1e-8", cases.len());
        Ok(())
    } else {
        Err(CliError::SearchFailure(format!(
            "worst exact-solution deviation {worst:.3e} exceeds 1e-8"
        )))
    }
}

fn rotational_decorations(metric: &MetricSpec) -> Vec<Decoration> {
    vec![
        Decoration::HorizontalLine(metric.cylinder_radius().unwrap_or(0.0)),
        Decoration::Circle(metric.sphere_radius()),
    ]
}

fn bi_decorations(metric: &MetricSpec) -> Vec<Decoration> {
    vec![
        Decoration::Diagonal,
        Decoration::HorizontalLine(metric.cylinder_radius().unwrap_or(0.0)),
        Decoration::VerticalLine(metric.cylinder_radius().unwrap_or(0.0)),
        Decoration::Circle(metric.sphere_radius()),
    ]
}

/// Writes profile CSV + SVG + manifest for a search result; `stem` names
/// the artifact files inside the output directory.
fn emit_search_result(
    dir: &Path,
    stem: &str,
    res: &SearchResult,
    decorations: &[Decoration],
    mut man: Manifest,
) -> Result<(), CliError> {
    let csv_name = format!("{stem}_profile.csv");
    let svg_name = format!("{stem}.svg");
    write_atomic(&dir.join(&csv_name), &csv::curve_csv(&res.profile))?;
    write_atomic(
        &dir.join(&svg_name),
        &svg_with_decoration_spec(&res.profile, decorations),
    )?;
    man.set("profile_csv", &csv_name);
    man.set("svg", &svg_name);
    for (i, deco) in decorations.iter().enumerate() {
        man.set(&format!("decoration.{i}"), decoration_to_string(deco));
    }
    record_search(&mut man, res);
    write_atomic(&dir.join(format!("{stem}.manifest")), &man.to_text())?;
    println!(
        "{stem}: parameter {:.12e}, artifacts in {}",
        res.parameter,
        dir.display()
    );
    for (k, v) in &res.residuals {
        println!("  {k} = {v:.3e}");
    }
    Ok(())
}

fn svg_with_decoration_spec(profile: &[Point], decorations: &[Decoration]) -> String {
    svg::render(&[profile.to_vec()], decorations)
}

fn decoration_to_string(d: &Decoration) -> String {
    match d {
        Decoration::HorizontalLine(v) => format!("hline {v}"),
        Decoration::VerticalLine(u) => format!("vline {u}"),
        Decoration::Diagonal => "diagonal".into(),
        Decoration::Circle(r) => format!("circle {r}"),
    }
}

fn decoration_from_string(s: &str) -> Result<Decoration, CliError> {
    let mut parts = s.split_whitespace();
    match (parts.next(), parts.next()) {
        (Some("hline"), Some(v)) => Ok(Decoration::HorizontalLine(
            v.parse().map_err(|_| CliError::Input(format!("bad decoration '{s}'")))?,
        )),
        (Some("vline"), Some(u)) => Ok(Decoration::VerticalLine(
            u.parse().map_err(|_| CliError::Input(format!("bad decoration '{s}'")))?,
        )),
        (Some("diagonal"), None) => Ok(Decoration::Diagonal),
        (Some("circle"), Some(r)) => Ok(Decoration::Circle(
            r.parse().map_err(|_| CliError::Input(format!("bad decoration '{s}'")))?,
        )),
        _ => Err(CliError::Input(format!("bad decoration '{s}'"))),
    }
}

fn cmd_planar(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(
        args,
        &[
            "alpha", "x", "y", "theta", "s-max", "rotation", "petals", "out-dir", "rel-tol",
            "abs-tol", "grid",
        ],
    )?;
    let alpha = flags.get_f64("alpha", -0.5)?;
    let dir = out_dir(&flags)?;
    let opts = integrate_options(&flags)?;
    let grid = flags.get_usize("grid", 2000)?;

    if flags.get("rotation").is_some() || flags.get("petals").is_some() {
        let p = flags.get_u32("rotation", 2)?;
        let q = flags.get_u32("petals", 3)?;
        let res = planar::find_closed_planar_with(alpha, p, q, &opts).map_err(CliError::from)?;
        let mut man = Manifest::new();
        man.set("command", "planar-closed");
        man.set("alpha", alpha);
        man.set("rotation", p);
        man.set("petals", q);
        man.set("rel_tol", opts.rel_tol);
        man.set("abs_tol", opts.abs_tol);
        return emit_search_result(&dir, &format!("planar-{p}-{q}"), &res, &[], man);
    }

    let x = flags.get_f64("x", 1.2)?;
    let y = flags.get_f64("y", 0.0)?;
    let theta = flags.get_f64("theta", std::f64::consts::FRAC_PI_2)?;
    let s_max = flags.get_f64("s-max", 50.0)?;
    let start = PlanarState::new(x, y, theta);
    let traj = planar::integrate_planar_with(alpha, start, s_max, &opts).map_err(CliError::from)?;
    let report = planar::conservation_report(&traj, alpha, 4000);

    let csv_name = "planar_trajectory.csv";
    let svg_name = "planar.svg";
    write_atomic(&dir.join(csv_name), &csv::planar_csv(&traj, alpha, grid))?;
    write_atomic(
        &dir.join(svg_name),
        &svg::render(&[traj.polyline(grid)], &[]),
    )?;
    let mut man = Manifest::new();
    man.set("command", "planar");
    man.set("alpha", alpha);
    man.set("x", x);
    man.set("y", y);
    man.set("theta", theta);
    man.set("s_max", s_max);
    man.set("rel_tol", opts.rel_tol);
    man.set("abs_tol", opts.abs_tol);
    man.set("grid", grid);
    man.set("profile_csv", csv_name);
    man.set("svg", svg_name);
    man.set("drift_1", report.drift1);
    if let Some(d2) = report.drift2 {
        man.set("drift_2", d2);
    }
    if planar::is_flat_start(&start) {
        man.set("flat_line", "true");
    }
    write_atomic(&dir.join("planar.manifest"), &man.to_text())?;
    println!(
        "planar: drift_1 = {:.3e}, drift_2 = {}",
        report.drift1,
        report
            .drift2
            .map(|d| format!("{d:.3e}"))
            .unwrap_or_else(|| "n/a".into())
    );
    Ok(())
}

fn cmd_shoot(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(
        args,
        &["family", "t", "n", "m", "s-max", "out-dir", "rel-tol", "abs-tol", "grid"],
    )?;
    let family = flags.require("family")?.to_lowercase();
    let t = flags.get_f64("t", 1.0)?;
    let s_max = flags.get_f64("s-max", 25.0)?;
    let grid = flags.get_usize("grid", 2000)?;
    let dir = out_dir(&flags)?;
    let opts = integrate_options(&flags)?;

    let (traj, stem, decorations) = match family.as_str() {
        "s" | "t" => {
            let n = flags.get_u32("n", 2)?;
            let fam = if family == "s" { ShotFamily::S } else { ShotFamily::T };
            let traj = shooting::shoot_with(&ShotSpec::new(fam, t, n), s_max, &opts)
                .map_err(CliError::from)?;
            let metric = MetricSpec::rotational(n).map_err(CliError::from)?;
            (traj, format!("shoot-{family}"), rotational_decorations(&metric))
        }
        "bi" => {
            let m_bi = flags.get_u32("m", 1)?;
            let (traj, _) = birotational::shoot_bi_with(
                &BiShotSpec::new(m_bi, t, BiLaunch::DiagonalOrthogonal),
                s_max,
                &opts,
            )
            .map_err(CliError::from)?;
            let metric = MetricSpec::bi_rotational(m_bi, m_bi).map_err(CliError::from)?;
            (traj, "shoot-bi".to_string(), bi_decorations(&metric))
        }
        other => {
            return Err(CliError::Usage(format!(
                "--family must be s, t, or bi (got '{other}')"
            )))
        }
    };

    let csv_name = format!("{stem}_trajectory.csv");
    let svg_name = format!("{stem}.svg");
    write_atomic(&dir.join(&csv_name), &csv::trajectory_csv(&traj, grid))?;
    write_atomic(
        &dir.join(&svg_name),
        &svg::render(&[traj.polyline(grid)], &decorations),
    )?;
    let mut man = Manifest::new();
    man.set("command", "shoot");
    man.set("family", &family);
    man.set("t", t);
    man.set("s_max", s_max);
    man.set("grid", grid);
    man.set("rel_tol", opts.rel_tol);
    man.set("abs_tol", opts.abs_tol);
    if family == "bi" {
        man.set("m", flags.get_u32("m", 1)?);
    } else {
        man.set("n", flags.get_u32("n", 2)?);
    }
    man.set("profile_csv", &csv_name);
    man.set("svg", &svg_name);
    man.set(
        "terminal",
        match traj.terminal {
            Terminal::ReachedMaxArcLength => "max-arc-length",
            Terminal::HitFloor => "hit-floor",
            Terminal::LeftBoundingBox => "left-bbox",
            Terminal::StepFailure => "step-failure",
        },
    );
    man.set("s_end", traj.s_end);
    man.set("events", traj.events.len());
    for (i, deco) in decorations.iter().enumerate() {
        man.set(&format!("decoration.{i}"), decoration_to_string(deco));
    }
    write_atomic(&dir.join(format!("{stem}.manifest")), &man.to_text())?;
    println!(
        "{stem}: s_end {:.6}, {} events, terminal {:?}",
        traj.s_end,
        traj.events.len(),
        traj.terminal
    );
    Ok(())
}

fn cmd_find(args: &[String]) -> Result<(), CliError> {
    let Some(target) = args.first() else {
        return Err(CliError::Usage(
            "find needs a target: sphere | sphere2 | torus-embedded | torus-immersed".into(),
        ));
    };
    let flags = Flags::parse(&args[1..], &["n", "out-dir", "rel-tol", "abs-tol"])?;
    let n = flags.get_u32("n", 2)?;
    let dir = out_dir(&flags)?;
    let opts = integrate_options(&flags)?;
    let metric = MetricSpec::rotational(n).map_err(CliError::from)?;

    let (res, stem) = match target.as_str() {
        "sphere" => (
            shooting::find_immersed_sphere_with(n, &opts).map_err(CliError::from)?,
            "sphere",
        ),
        "sphere2" => {
            let first = shooting::find_immersed_sphere_with(n, &opts).map_err(CliError::from)?;
            (
                shooting::find_second_immersed_sphere_with(n, first.parameter, &opts)
                    .map_err(CliError::from)?,
                "sphere2",
            )
        }
        "torus-embedded" => (
            shooting::find_embedded_torus_with(n, &opts).map_err(CliError::from)?,
            "torus-embedded",
        ),
        "torus-immersed" => (
            shooting::find_immersed_torus_with(n, &opts).map_err(CliError::from)?,
            "torus-immersed",
        ),
        other => {
            return Err(CliError::Usage(format!(
                "unknown find target '{other}'"
            )))
        }
    };
    let mut man = Manifest::new();
    man.set("command", "find");
    man.set("target", target);
    man.set("n", n);
    man.set("rel_tol", opts.rel_tol);
    man.set("abs_tol", opts.abs_tol);
    man.set(
        "weighted_length",
        weighted_length_closed(&metric, &res.profile).map_err(CliError::from)?,
    );
    emit_search_result(&dir, stem, &res, &rotational_decorations(&metric), man)
}

fn cmd_csf(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(
        args,
        &["n", "a", "vertices", "tol", "max-time", "out-dir"],
    )?;
    let n = flags.get_u32("n", 2)?;
    let dir = out_dir(&flags)?;
    let mut controls = FlowControls::default();
    controls.num_vertices = flags.get_usize("vertices", controls.num_vertices)?;
    controls.tol_geodesic = flags.get_f64("tol", controls.tol_geodesic)?;
    controls.max_time = flags.get_f64("max-time", 45.0)?;
    controls.max_steps = 200_000;
    let metric = MetricSpec::rotational(n).map_err(CliError::from)?;

    let mut man = Manifest::new();
    man.set("command", "csf");
    man.set("n", n);
    man.set("vertices", controls.num_vertices);
    man.set("tol_geodesic", controls.tol_geodesic);
    man.set("max_time", controls.max_time);

    if let Some(a) = flags.get("a") {
        // Single evolution from a prescribed rectangle parameter.
        let a: f64 = a
            .parse()
            .map_err(|_| CliError::Input(format!("--a: '{a}' is not a number")))?;
        let out = csf::evolve(n, a, &controls).map_err(CliError::from)?;
        man.set("a", a);
        man.set(
            "terminal",
            match out.terminal {
                csf::FlowTerminal::ConvergedToGeodesic => "converged",
                csf::FlowTerminal::DriftAbove => "drift-above",
                csf::FlowTerminal::DriftBelow => "drift-below",
                csf::FlowTerminal::Budget => "budget",
            },
        );
        man.set("terminal_length", out.monitors.length);
        man.set("terminal_residual", out.monitors.residual);
        man.set("terminal_gauss_area", out.monitors.gauss_area);
        write_atomic(&dir.join("csf_history.csv"), &csv::history_csv(&out.history))?;
        write_atomic(&dir.join("csf_curve.csv"), &csv::curve_csv(&out.curve.vertices))?;
        write_atomic(
            &dir.join("csf.svg"),
            &svg::render(&[out.curve.vertices.clone()], &rotational_decorations(&metric)),
        )?;
        man.set("history_csv", "csf_history.csv");
        man.set("profile_csv", "csf_curve.csv");
        man.set("svg", "csf.svg");
        write_atomic(&dir.join("csf.manifest"), &man.to_text())?;
        println!(
            "csf: terminal {:?} at t = {:.4}, length {:.8}",
            out.terminal, out.curve.time, out.monitors.length
        );
        return Ok(());
    }

    let (res, out) = csf::find_pinned_parameter(n, &controls).map_err(CliError::from)?;
    man.set("a", res.parameter);
    man.set("terminal_length", out.monitors.length);
    man.set("terminal_residual", out.monitors.residual);
    man.set("terminal_gauss_area", out.monitors.gauss_area);
    man.set("history_csv", "csf_history.csv");
    write_atomic(&dir.join("csf_history.csv"), &csv::history_csv(&out.history))?;
    emit_search_result(&dir, "csf", &res, &rotational_decorations(&metric), man)
}

fn cmd_find_bi(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["target", "m", "out-dir", "rel-tol", "abs-tol"])?;
    let target_name = flags.require("target")?;
    let m_bi = flags.get_u32("m", 1)?;
    let dir = out_dir(&flags)?;
    let opts = integrate_options(&flags)?;
    let target = match target_name {
        "embedded-t3" => BiTarget::EmbeddedT3,
        "immersed-t3-1" => BiTarget::ImmersedT3(1),
        "immersed-t3-2" => BiTarget::ImmersedT3(2),
        "immersed-t3-3" => BiTarget::ImmersedT3(3),
        "immersed-s3-1" => BiTarget::ImmersedS3(1),
        "immersed-s3-2" => BiTarget::ImmersedS3(2),
        other => {
            return Err(CliError::Usage(format!(
                "unknown find-bi target '{other}'"
            )))
        }
    };
    let res =
        birotational::find_symmetric_closed_with(m_bi, target, &opts).map_err(CliError::from)?;
    let metric = MetricSpec::bi_rotational(m_bi, m_bi).map_err(CliError::from)?;
    let report = res
        .trajectory
        .as_ref()
        .map(|t| birotational::classify_bi_profile_with(t, &opts));
    let mut man = Manifest::new();
    man.set("command", "find-bi");
    man.set("target", target_name);
    man.set("m", m_bi);
    man.set("rel_tol", opts.rel_tol);
    man.set("abs_tol", opts.abs_tol);
    if let Some(report) = report {
        man.set(
            "topology",
            match report.closure {
                birotational::BiTopology::T3 => "t3",
                birotational::BiTopology::S3 => "s3",
                birotational::BiTopology::Unclassified => "unclassified",
            },
        );
        man.set("self_intersections", report.self_intersections);
    }
    emit_search_result(&dir, target_name, &res, &bi_decorations(&metric), man)
}

fn cmd_report(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["manifest", "compare", "against", "out-dir"])?;
    if let Some(path) = flags.get("manifest") {
        return regenerate(Path::new(path));
    }
    if let Some(first) = flags.get("compare") {
        let second = flags.require("against")?;
        let a = load_profile(Path::new(first))?;
        let b = load_profile(Path::new(second))?;
        let d = hausdorff_closed(&a, &b);
        println!("hausdorff_distance = {d:.6e}");
        return Ok(());
    }
    Err(CliError::Usage(
        "report needs --manifest PATH, or --compare PATH --against PATH".into(),
    ))
}

fn load_profile(manifest_path: &Path) -> Result<Vec<Point>, CliError> {
    let man = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let csv_path = dir.join(man.require("profile_csv")?);
    let text = std::fs::read_to_string(&csv_path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", csv_path.display())))?;
    csv::parse_profile_csv(&text)
}

/// Regenerates the SVG of a finished run from its manifest and profile CSV,
/// without recomputation; byte-identical to the original emission.
fn regenerate(manifest_path: &Path) -> Result<(), CliError> {
    let man = Manifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let profile = load_profile(manifest_path)?;
    let mut decorations = Vec::new();
    for i in 0.. {
        match man.get(&format!("decoration.{i}")) {
            Some(s) => decorations.push(decoration_from_string(s)?),
            None => break,
        }
    }
    let svg_name = man.require("svg")?;
    write_atomic(&dir.join(svg_name), &svg::render(&[profile], &decorations))?;
    println!("regenerated {svg_name} from {}", manifest_path.display());
    Ok(())
}
