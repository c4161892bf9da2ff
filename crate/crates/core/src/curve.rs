//! Polygonal curve utilities: resampling, curvature, intersection tests,
//! Hausdorff distance.

use crate::geometry::Point;

/// Signed Euclidean area of a closed polygon (positive for counterclockwise).
pub fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = vertices[i];
        let q = vertices[(i + 1) % n];
        acc += p.u * q.v - q.u * p.v;
    }
    0.5 * acc
}

/// Euclidean perimeter of a closed polygon.
pub fn perimeter(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].dist(vertices[(i + 1) % n]))
        .sum()
}

/// Three-point circumcircle curvature at `b`, signed positive when the
/// polyline turns left, together with the chord tangent angle at `b`.
pub fn three_point_curvature(a: Point, b: Point, c: Point) -> (f64, f64) {
    let e1 = (b.u - a.u, b.v - a.v);
    let e2 = (c.u - b.u, c.v - b.v);
    let l1 = e1.0.hypot(e1.1);
    let l2 = e2.0.hypot(e2.1);
    let chord = (c.u - a.u).hypot(c.v - a.v);
    let cross = e1.0 * e2.1 - e1.1 * e2.0;
    let k = if l1 * l2 * chord == 0.0 {
        0.0
    } else {
        2.0 * cross / (l1 * l2 * chord)
    };
    let tangent = (c.v - a.v).atan2(c.u - a.u);
    (k, tangent)
}

/// Resample a closed polygon to `n` vertices uniformly spaced in Euclidean
/// arc length, anchored at vertex 0 (which is preserved exactly).
pub fn resample_closed(vertices: &[Point], n: usize) -> Vec<Point> {
    let m = vertices.len();
    assert!(m >= 3 && n >= 3);
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        let d = vertices[i].dist(vertices[(i + 1) % m]);
        cum.push(cum[i] + d);
    }
    let total = cum[m];
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for i in 0..n {
        let target = total * i as f64 / n as f64;
        while seg + 1 < m && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        let p = vertices[seg];
        let q = vertices[(seg + 1) % m];
        out.push(Point::new(p.u + t * (q.u - p.u), p.v + t * (q.v - p.v)));
    }
    out
}

/// Resample a closed polygon to `n` vertices uniformly spaced in chordal
/// arc length, interpolating with a uniform Catmull-Rom spline through the
/// old vertices. Unlike chord interpolation this does not inscribe the new
/// polygon in the old one, so repeated resampling does not systematically
/// bleed enclosed area.
pub fn resample_closed_spline(vertices: &[Point], n: usize) -> Vec<Point> {
    let m = vertices.len();
    assert!(m >= 4 && n >= 3);
    let mut cum = Vec::with_capacity(m + 1);
    cum.push(0.0);
    for i in 0..m {
        cum.push(cum[i] + vertices[i].dist(vertices[(i + 1) % m]));
    }
    let total = cum[m];
    let cr = |p0: Point, p1: Point, p2: Point, p3: Point, t: f64| -> Point {
        let t2 = t * t;
        let t3 = t2 * t;
        let w0 = -0.5 * t + t2 - 0.5 * t3;
        let w1 = 1.0 - 2.5 * t2 + 1.5 * t3;
        let w2 = 0.5 * t + 2.0 * t2 - 1.5 * t3;
        let w3 = -0.5 * t2 + 0.5 * t3;
        Point::new(
            w0 * p0.u + w1 * p1.u + w2 * p2.u + w3 * p3.u,
            w0 * p0.v + w1 * p1.v + w2 * p2.v + w3 * p3.v,
        )
    };
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    for i in 0..n {
        let target = total * i as f64 / n as f64;
        while seg + 1 < m && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let t = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
        if t == 0.0 {
            out.push(vertices[seg]);
            continue;
        }
        let p0 = vertices[(seg + m - 1) % m];
        let p1 = vertices[seg];
        let p2 = vertices[(seg + 1) % m];
        let p3 = vertices[(seg + 2) % m];
        out.push(cr(p0, p1, p2, p3, t));
    }
    out
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u)
}

/// Proper-crossing test for two closed segments.
fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    false
}

/// Grid-accelerated count of proper self-crossings of a polyline
/// (`closed` adds the wrap-around edge). Adjacent edges are skipped.
pub fn count_self_intersections(pts: &[Point], closed: bool) -> usize {
    let n = pts.len();
    if n < 3 {
        return 0;
    }
    let nedges = if closed { n } else { n - 1 };
    let edge = |i: usize| -> (Point, Point) { (pts[i], pts[(i + 1) % n]) };

    // Bin edges into a uniform grid sized to the average edge length.
    let (mut lo_u, mut hi_u, mut lo_v, mut hi_v) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        lo_u = lo_u.min(p.u);
        hi_u = hi_u.max(p.u);
        lo_v = lo_v.min(p.v);
        hi_v = hi_v.max(p.v);
    }
    let span = (hi_u - lo_u).max(hi_v - lo_v).max(1e-12);
    let avg_edge = (0..nedges).map(|i| edge(i).0.dist(edge(i).1)).sum::<f64>() / nedges as f64;
    let cell = (avg_edge * 2.0).max(span / 512.0);
    let cols = ((hi_u - lo_u) / cell).ceil().max(1.0) as usize + 1;
    let rows = ((hi_v - lo_v) / cell).ceil().max(1.0) as usize + 1;
    let mut grid: Vec<Vec<u32>> = vec![Vec::new(); cols * rows];
    let cell_of = |u: f64, v: f64| -> (usize, usize) {
        let cu = (((u - lo_u) / cell) as usize).min(cols - 1);
        let cv = (((v - lo_v) / cell) as usize).min(rows - 1);
        (cu, cv)
    };
    for i in 0..nedges {
        let (a, b) = edge(i);
        let (c0, r0) = cell_of(a.u.min(b.u), a.v.min(b.v));
        let (c1, r1) = cell_of(a.u.max(b.u), a.v.max(b.v));
        for c in c0..=c1 {
            for r in r0..=r1 {
                grid[r * cols + c].push(i as u32);
            }
        }
    }

    // Buckets can repeat a pair; dedupe before the crossing test.
    let mut seen = std::collections::BTreeSet::new();
    let mut count = 0usize;
    for bucket in &grid {
        for (ai, &i) in bucket.iter().enumerate() {
            for &j in bucket.iter().skip(ai + 1) {
                let (i, j) = (i.min(j) as usize, i.max(j) as usize);
                if j == i + 1 || (closed && i == 0 && j == nedges - 1) {
                    continue;
                }
                if !seen.insert((i, j)) {
                    continue;
                }
                let (a, b) = edge(i);
                let (c, d) = edge(j);
                if segments_cross(a, b, c, d) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Simplicity test for a closed polygon.
pub fn is_simple_closed(vertices: &[Point]) -> bool {
    count_self_intersections(vertices, true) == 0
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (du, dv) = (b.u - a.u, b.v - a.v);
    let len2 = du * du + dv * dv;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.u - a.u) * du + (p.v - a.v) * dv) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.u + t * du, a.v + t * dv))
}

fn directed_hausdorff(from: &[Point], to: &[Point], to_closed: bool) -> f64 {
    let n = to.len();
    let nedges = if to_closed { n } else { n - 1 };
    let mut worst = 0.0f64;
    for &p in from {
        let mut best = f64::MAX;
        for i in 0..nedges {
            let d = point_segment_distance(p, to[i], to[(i + 1) % n]);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

/// Symmetric Hausdorff distance between two closed polygons.
pub fn hausdorff_closed(a: &[Point], b: &[Point]) -> f64 {
    directed_hausdorff(a, b, true).max(directed_hausdorff(b, a, true))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    #[test]
    fn area_and_orientation() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_curvature_on_circle() {
        let c = circle(200, 2.0);
        let (k, _) = three_point_curvature(c[0], c[1], c[2]);
        assert!((k - 0.5).abs() < 1e-4, "{k}");
    }

    #[test]
    fn resample_preserves_shape() {
        let c = circle(97, 1.0);
        let r = resample_closed(&c, 256);
        assert_eq!(r.len(), 256);
        assert_eq!(r[0].u, c[0].u);
        for p in &r {
            let rad = p.u.hypot(p.v);
            assert!((rad - 1.0).abs() < 1e-3);
        }
        // Uniform spacing.
        let d0 = r[0].dist(r[1]);
        for i in 0..r.len() {
            let d = r[i].dist(r[(i + 1) % r.len()]);
            assert!((d - d0).abs() < 1e-3 * d0);
        }
    }

    #[test]
    fn intersection_counts() {
        assert!(is_simple_closed(&circle(64, 1.0)));
        // Figure-eight: one proper crossing.
        let mut eight = Vec::new();
        let n = 200;
        for i in 0..n {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            eight.push(Point::new((2.0 * t).sin() * 0.5, t.sin()));
        }
        assert!(!is_simple_closed(&eight));
        assert_eq!(count_self_intersections(&eight, true), 1);
    }

    #[test]
    fn hausdorff_of_concentric_circles() {
        let a = circle(500, 1.0);
        let b = circle(500, 1.25);
        let d = hausdorff_closed(&a, &b);
        assert!((d - 0.25).abs() < 1e-3, "{d}");
    }
}
