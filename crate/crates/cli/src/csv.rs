//! Versioned CSV emitters. Every file opens with a schema comment line
//! `# shrinker-lab v1 <schema>`; floats print in shortest-roundtrip form,
//! so identical runs produce byte-identical files.

use shrinker_core::geometry::Point;
use shrinker_core::planar::PlanarState;
use shrinker_core::csf::FlowHistoryRow;
use shrinker_core::Trajectory;

use crate::CliError;

pub const SCHEMA_PREFIX: &str = "# shrinker-lab v1";

/// s,u,v,psi on a uniform grid, followed by an events block.
pub fn trajectory_csv(t: &Trajectory, grid: usize) -> String {
    let mut out = format!("{SCHEMA_PREFIX} trajectory\ns,u,v,psi\n");
    for st in t.uniform_grid(grid) {
        out.push_str(&format!("{},{},{},{}\n", st.s, st.u, st.v, st.psi));
    }
    out.push_str("# events\nevent_id,s,u,v,psi\n");
    for e in &t.events {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            e.id, e.s, e.state.u, e.state.v, e.state.psi
        ));
    }
    out
}

/// s,x,y,theta,kappa,I1,I2 for a planar shrinker trajectory. I2 is blank
/// where the curvature vanishes (flat stretches).
pub fn planar_csv(t: &Trajectory, alpha: f64, grid: usize) -> String {
    let mut out = format!("{SCHEMA_PREFIX} planar-trajectory\ns,x,y,theta,kappa,I1,I2\n");
    for st in t.uniform_grid(grid) {
        let ps: PlanarState = st.into();
        let kappa = ps.kappa(alpha);
        let i1 = kappa * (alpha * (ps.x * ps.x + ps.y * ps.y) / 2.0).exp();
        let i2 = if kappa.abs() > 1e-12 {
            let dkdth = -alpha * ps.tau();
            format!("{}", kappa * kappa + alpha * (kappa * kappa).ln() + dkdth * dkdth)
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            ps.s, ps.x, ps.y, ps.theta, kappa, i1, i2
        ));
    }
    out
}

/// Closed polygon, one vertex per row.
pub fn curve_csv(points: &[Point]) -> String {
    let mut out = format!("{SCHEMA_PREFIX} curve\nu,v\n");
    for p in points {
        out.push_str(&format!("{},{}\n", p.u, p.v));
    }
    out
}

/// Flow monitor history.
pub fn history_csv(rows: &[FlowHistoryRow]) -> String {
    let mut out = format!("{SCHEMA_PREFIX} flow-history\nt,length,gauss_area,max_speed,residual\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.time, r.length, r.gauss_area, r.max_speed, r.residual
        ));
    }
    out
}

/// Reads the positions back out of any of the emitted CSV schemas (used by
/// `report`): curve rows are (u, v); trajectory rows carry the position in
/// columns 2-3 after the arc length.
pub fn parse_profile_csv(text: &str) -> Result<Vec<Point>, CliError> {
    let mut lines = text.lines();
    let schema = match lines.next() {
        Some(header) if header.starts_with(SCHEMA_PREFIX) => {
            header[SCHEMA_PREFIX.len()..].trim().to_string()
        }
        other => {
            return Err(CliError::Input(format!(
                "not a shrinker-lab csv (header {other:?})"
            )))
        }
    };
    let position_columns = match schema.as_str() {
        "curve" => (0usize, 1usize),
        "trajectory" | "planar-trajectory" => (1, 2),
        other => {
            return Err(CliError::Input(format!(
                "csv schema '{other}' carries no profile"
            )))
        }
    };
    let mut points = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            // The events block of a trajectory follows the samples.
            break;
        }
        if line.chars().next().is_some_and(|c| c.is_alphabetic()) {
            continue; // column header
        }
        let cols: Vec<&str> = line.split(',').collect();
        let (iu, iv) = position_columns;
        let (Some(u), Some(v)) = (cols.get(iu), cols.get(iv)) else {
            return Err(CliError::Input(format!("bad csv row '{line}'")));
        };
        let u: f64 = u
            .parse()
            .map_err(|_| CliError::Input(format!("bad number '{u}'")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Input(format!("bad number '{v}'")))?;
        points.push(Point::new(u, v));
    }
    if points.len() < 3 {
        return Err(CliError::Input("profile csv has fewer than 3 vertices".into()));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_csv_round_trip() {
        let pts = vec![
            Point::new(0.1, 1.0),
            Point::new(-0.25, 2.0 / 3.0),
            Point::new(std::f64::consts::FRAC_1_SQRT_2, 1e-9),
        ];
        let text = curve_csv(&pts);
        let back = parse_profile_csv(&text).unwrap();
        assert_eq!(pts.len(), back.len());
        for (a, b) in pts.iter().zip(&back) {
            assert_eq!(a.u.to_bits(), b.u.to_bits());
            assert_eq!(a.v.to_bits(), b.v.to_bits());
        }
        // Re-emission is byte-identical.
        assert_eq!(text, curve_csv(&back));
    }
}
