//! Weighted geometries of the half-plane and quadrant.
//!
//! The half-plane metric is conformal to the flat metric with factor
//! `e^{2 phi}`, where `phi = (n-1) ln r + alpha (x^2 + r^2) / 2` and
//! `alpha < 0` is the shrink coefficient. Geodesics of this metric are the
//! profile curves of rotational self-shrinkers. The quadrant carries the
//! bi-rotational analogue `phi = M1 ln x + M2 ln y + alpha (x^2 + y^2) / 2`,
//! and the plane itself (no symmetry factor) carries
//! `phi = alpha (x^2 + y^2) / 2`, whose geodesics are self-shrinking curves
//! for the curve shortening flow.

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Default shrink coefficient: the hypersurface satisfies H = -X.N / 2.
pub const DEFAULT_SHRINK_COEFF: f64 = -0.5;

/// A point of the working plane. Interpreted as (x, r) in half-plane
/// contexts and (x, y) in quadrant contexts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub u: f64,
    pub v: f64,
}

impl Point {
    pub fn new(u: f64, v: f64) -> Self {
        Point { u, v }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.u - other.u).hypot(self.v - other.v)
    }

    /// Reflection across the v-axis (x -> -x).
    pub fn mirror_u(self) -> Point {
        Point::new(-self.u, self.v)
    }

    /// Reflection across the diagonal u = v.
    pub fn swap(self) -> Point {
        Point::new(self.v, self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// Half-plane r > 0; rotational symmetry with n >= 2 (hypersurface in R^{n+1}).
    Rotational { n: u32 },
    /// Open quadrant x, y > 0; bi-rotational symmetry with sphere factors
    /// S^{M1} and S^{M2}.
    BiRotational { m1: u32, m2: u32 },
    /// The full plane; self-shrinking curves for the curve shortening flow.
    Planar,
}

/// The weighted plane under study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub shrink_coeff: f64,
}

impl MetricSpec {
    pub fn rotational(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("rotational dimension n = {n} < 2")));
        }
        Ok(MetricSpec {
            kind: MetricKind::Rotational { n },
            shrink_coeff: DEFAULT_SHRINK_COEFF,
        })
    }

    pub fn bi_rotational(m1: u32, m2: u32) -> Result<Self> {
        if m1 < 1 || m2 < 1 {
            return Err(Error::Input(format!(
                "bi-rotational factors M1 = {m1}, M2 = {m2} must be >= 1"
            )));
        }
        Ok(MetricSpec {
            kind: MetricKind::BiRotational { m1, m2 },
            shrink_coeff: DEFAULT_SHRINK_COEFF,
        })
    }

    pub fn planar() -> Self {
        MetricSpec {
            kind: MetricKind::Planar,
            shrink_coeff: DEFAULT_SHRINK_COEFF,
        }
    }

    pub fn with_shrink_coeff(mut self, alpha: f64) -> Result<Self> {
        if !(alpha < 0.0) {
            return Err(Error::Input(format!("shrink coefficient {alpha} must be < 0")));
        }
        self.shrink_coeff = alpha;
        Ok(self)
    }

    /// Radius of the stationary cylinder line: r with (n-1)/r + alpha r = 0.
    /// For the quadrant this is the y = const cylinder, M2/y + alpha y = 0.
    /// sqrt(2(n-1)) resp. sqrt(2M) at the default coefficient.
    pub fn cylinder_radius(&self) -> Option<f64> {
        let a = -self.shrink_coeff;
        match self.kind {
            MetricKind::Rotational { n } => Some(((n - 1) as f64 / a).sqrt()),
            MetricKind::BiRotational { m2, .. } => Some((m2 as f64 / a).sqrt()),
            MetricKind::Planar => None,
        }
    }

    /// Radius of the round-sphere profile centered at the origin:
    /// sqrt(2n), sqrt(2(M1+M2+1)), or sqrt(2) for the circle shrinker,
    /// at the default coefficient.
    pub fn sphere_radius(&self) -> f64 {
        let a = -self.shrink_coeff;
        let k = match self.kind {
            MetricKind::Rotational { n } => n as f64,
            MetricKind::BiRotational { m1, m2 } => (m1 + m2 + 1) as f64,
            MetricKind::Planar => 1.0,
        };
        (k / a).sqrt()
    }

    pub fn check_domain(&self, p: Point) -> Result<()> {
        let ok = match self.kind {
            MetricKind::Rotational { .. } => p.v > 0.0,
            MetricKind::BiRotational { .. } => p.u > 0.0 && p.v > 0.0,
            MetricKind::Planar => true,
        };
        if ok && p.u.is_finite() && p.v.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point ({}, {}) outside domain of {:?}",
                p.u, p.v, self.kind
            )))
        }
    }

    /// Fast domain test used in integrator inner loops.
    pub fn in_domain(&self, u: f64, v: f64) -> bool {
        match self.kind {
            MetricKind::Rotational { .. } => v > 0.0,
            MetricKind::BiRotational { .. } => u > 0.0 && v > 0.0,
            MetricKind::Planar => true,
        }
    }

    /// Log of the length weight: the conformal metric is `e^{2 phi} (du^2 + dv^2)`.
    pub fn phi(&self, p: Point) -> f64 {
        let a = self.shrink_coeff;
        let q = 0.5 * a * (p.u * p.u + p.v * p.v);
        match self.kind {
            MetricKind::Rotational { n } => (n - 1) as f64 * p.v.ln() + q,
            MetricKind::BiRotational { m1, m2 } => {
                m1 as f64 * p.u.ln() + m2 as f64 * p.v.ln() + q
            }
            MetricKind::Planar => q,
        }
    }

    /// Euclidean gradient of phi.
    pub fn grad_phi(&self, p: Point) -> (f64, f64) {
        let a = self.shrink_coeff;
        match self.kind {
            MetricKind::Rotational { n } => (a * p.u, (n - 1) as f64 / p.v + a * p.v),
            MetricKind::BiRotational { m1, m2 } => {
                (m1 as f64 / p.u + a * p.u, m2 as f64 / p.v + a * p.v)
            }
            MetricKind::Planar => (a * p.u, a * p.v),
        }
    }

    /// Flat Laplacian of phi (used by the Gauss curvature).
    fn laplace_phi(&self, p: Point) -> f64 {
        let a = self.shrink_coeff;
        match self.kind {
            MetricKind::Rotational { n } => 2.0 * a - (n - 1) as f64 / (p.v * p.v),
            MetricKind::BiRotational { m1, m2 } => {
                2.0 * a - m1 as f64 / (p.u * p.u) - m2 as f64 / (p.v * p.v)
            }
            MetricKind::Planar => 2.0 * a,
        }
    }

    /// The length weight `e^{phi}` (density of weighted arc length).
    pub fn length_weight(&self, p: Point) -> f64 {
        self.phi(p).exp()
    }

    /// K * e^{2 phi} = -laplace(phi). For the half-plane at the default
    /// coefficient this is the flat-measure Gauss density 1 + (n-1)/r^2.
    pub fn gauss_density_flat(&self, p: Point) -> f64 {
        -self.laplace_phi(p)
    }
}

/// Conformal factor `e^{2 phi}` multiplying the flat metric.
pub fn conformal_factor(m: &MetricSpec, p: Point) -> Result<f64> {
    m.check_domain(p)?;
    Ok((2.0 * m.phi(p)).exp())
}

/// Gauss curvature of the weighted plane, `K = -e^{-2 phi} laplace(phi)`.
/// Positive everywhere for shrink coefficients < 0.
pub fn gauss_curvature(m: &MetricSpec, p: Point) -> Result<f64> {
    m.check_domain(p)?;
    Ok(-m.laplace_phi(p) * (-2.0 * m.phi(p)).exp())
}

/// Weighted length of a piecewise-linear curve, composite Gauss-Legendre
/// with `order` nodes per segment (>= 8 per the module contract).
pub fn weighted_length_with(m: &MetricSpec, curve: &[Point], order: usize) -> Result<f64> {
    if curve.len() < 2 {
        return Err(Error::Input(format!(
            "weighted length needs >= 2 points, got {}",
            curve.len()
        )));
    }
    for &p in curve {
        m.check_domain(p)?;
    }
    let mut total = 0.0;
    for w in curve.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let len = p0.dist(p1);
        if len == 0.0 {
            continue;
        }
        total += len
            * gauss_legendre(
                |t| {
                    m.length_weight(Point::new(
                        p0.u + t * (p1.u - p0.u),
                        p0.v + t * (p1.v - p0.v),
                    ))
                },
                0.0,
                1.0,
                order,
            );
    }
    Ok(total)
}

pub fn weighted_length(m: &MetricSpec, curve: &[Point]) -> Result<f64> {
    weighted_length_with(m, curve, 8)
}

/// Weighted length of a closed polygon (the closing edge is implied).
pub fn weighted_length_closed(m: &MetricSpec, vertices: &[Point]) -> Result<f64> {
    if vertices.len() < 3 {
        return Err(Error::Input("closed curve needs >= 3 vertices".into()));
    }
    let mut curve = vertices.to_vec();
    curve.push(vertices[0]);
    weighted_length(m, &curve)
}

/// Total Gauss area of the rectangle r in [a, b], x in [-c, c] in the
/// rotational half-plane. Since K e^{2 phi} integrates against the flat
/// measure, the closed form is 2c [ -2 alpha (b - a) + (n-1)(1/a - 1/b) ].
pub fn gauss_area_rectangle(m: &MetricSpec, a: f64, b: f64, c: f64) -> Result<f64> {
    let n = match m.kind {
        MetricKind::Rotational { n } => n,
        _ => return Err(Error::Input("gauss_area_rectangle needs a rotational metric".into())),
    };
    if !(a > 0.0) || a > b {
        return Err(Error::Input(format!("need 0 < a <= b, got a = {a}, b = {b}")));
    }
    if !(c > 0.0) {
        return Err(Error::Input(format!("need c > 0, got c = {c}")));
    }
    let alpha = m.shrink_coeff;
    Ok(2.0 * c * (-2.0 * alpha * (b - a) + (n - 1) as f64 * (1.0 / a - 1.0 / b)))
}

/// Antiderivative in u of the flat Gauss density, used by the Green's
/// theorem contour integral below.
fn gauss_density_antiderivative_u(m: &MetricSpec, u: f64, v: f64) -> f64 {
    let a = m.shrink_coeff;
    match m.kind {
        MetricKind::Rotational { n } => (-2.0 * a + (n - 1) as f64 / (v * v)) * u,
        MetricKind::BiRotational { m1, m2 } => {
            (-2.0 * a + m2 as f64 / (v * v)) * u - m1 as f64 / u
        }
        MetricKind::Planar => -2.0 * a * u,
    }
}

/// Total Gauss area enclosed by a simple, closed, positively oriented
/// polygon, via the contour integral of the antiderivative of the density:
/// integral of K dA over Omega = closed integral of F(u, v) dv, where
/// dF/du = K e^{2 phi}.
pub fn gauss_area_region(m: &MetricSpec, boundary: &[Point]) -> Result<f64> {
    if boundary.len() < 3 {
        return Err(Error::Input("region boundary needs >= 3 vertices".into()));
    }
    for &p in boundary {
        m.check_domain(p)?;
    }
    if !crate::curve::is_simple_closed(boundary) {
        return Err(Error::Geometry("region boundary is self-intersecting".into()));
    }
    let n = boundary.len();
    let mut total = 0.0;
    for i in 0..n {
        let p0 = boundary[i];
        let p1 = boundary[(i + 1) % n];
        let dv = p1.v - p0.v;
        if dv == 0.0 {
            continue;
        }
        total += dv
            * gauss_legendre(
                |t| {
                    gauss_density_antiderivative_u(
                        m,
                        p0.u + t * (p1.u - p0.u),
                        p0.v + t * (p1.v - p0.v),
                    )
                },
                0.0,
                1.0,
                8,
            );
    }
    Ok(total)
}

/// Geodesic curvature in the weighted metric from Euclidean data:
/// `k_g = e^{-phi} (k_euc - d(phi)/dn)` with n the leftward unit normal
/// of the tangent direction.
pub fn geodesic_curvature(
    m: &MetricSpec,
    p: Point,
    tangent_angle: f64,
    euclidean_curvature: f64,
) -> Result<f64> {
    m.check_domain(p)?;
    let (gu, gv) = m.grad_phi(p);
    let dphi_dn = -gu * tangent_angle.sin() + gv * tangent_angle.cos();
    Ok(conformal_curvature_shift(
        euclidean_curvature,
        m.phi(p),
        dphi_dn,
    ))
}

/// The bare conformal-change identity behind [`geodesic_curvature`]:
/// with phi == 0 it returns the Euclidean curvature unchanged.
pub fn conformal_curvature_shift(k_euc: f64, phi: f64, dphi_dn: f64) -> f64 {
    (-phi).exp() * (k_euc - dphi_dn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::Lcg;

    fn rot(n: u32) -> MetricSpec {
        MetricSpec::rotational(n).unwrap()
    }

    #[test]
    fn invariants_on_spec() {
        assert!(MetricSpec::rotational(1).is_err());
        assert!(MetricSpec::bi_rotational(0, 1).is_err());
        assert!(rot(2).with_shrink_coeff(0.5).is_err());
        assert!(rot(2).with_shrink_coeff(0.0).is_err());
    }

    #[test]
    fn conformal_factor_frozen_values() {
        // r^{2(n-1)} e^{-(x^2+r^2)/2} at (0, 1), n = 2: e^{-1/2}.
        let got = conformal_factor(&rot(2), Point::new(0.0, 1.0)).unwrap();
        assert!((got - 0.6065306597126334).abs() < 1e-15);
        // Quadrant density squared at (1, 1), M1 = M2 = 1: e^{-1}... the
        // conformal factor is x^2 y^2 e^{-(x^2+y^2)/2} = e^{-1}; its square
        // root (the length weight) is e^{-1/2}.
        let bi = MetricSpec::bi_rotational(1, 1).unwrap();
        let w = bi.length_weight(Point::new(1.0, 1.0));
        assert!((w - 0.6065306597126334).abs() < 1e-15);
        let f = conformal_factor(&bi, Point::new(1.0, 1.0)).unwrap();
        assert!((f - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn conformal_factor_reflection_symmetry() {
        let m = rot(3);
        let mut rng = Lcg::new(7);
        for _ in 0..50 {
            let p = Point::new(rng.range(-3.0, 3.0), rng.range(0.1, 4.0));
            let a = conformal_factor(&m, p).unwrap();
            let b = conformal_factor(&m, p.mirror_u()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn conformal_factor_domain_errors() {
        assert!(conformal_factor(&rot(2), Point::new(0.0, 0.0)).is_err());
        assert!(conformal_factor(&rot(2), Point::new(1.0, -0.5)).is_err());
        let bi = MetricSpec::bi_rotational(1, 1).unwrap();
        assert!(conformal_factor(&bi, Point::new(-1.0, 1.0)).is_err());
    }

    #[test]
    fn gauss_curvature_frozen_values() {
        // (r^2 + (n-1)) / r^{2n} e^{(x^2+r^2)/2}; n = 2, (0, sqrt 2): (3/4) e.
        let got = gauss_curvature(&rot(2), Point::new(0.0, 2.0f64.sqrt())).unwrap();
        assert!((got - 0.75 * std::f64::consts::E).abs() < 1e-13, "{got}");
        // n = 2, (0, 1): 2 e^{1/2}.
        let got = gauss_curvature(&rot(2), Point::new(0.0, 1.0)).unwrap();
        assert!((got - 2.0 * 0.5f64.exp()).abs() < 1e-13, "{got}");
    }

    #[test]
    fn gauss_curvature_positive_and_symmetric() {
        let mut rng = Lcg::new(11);
        for n in [2u32, 3, 5] {
            let m = rot(n);
            for _ in 0..100 {
                let p = Point::new(rng.range(-4.0, 4.0), rng.range(0.05, 5.0));
                let k = gauss_curvature(&m, p).unwrap();
                assert!(k > 0.0);
                assert_eq!(k, gauss_curvature(&m, p.mirror_u()).unwrap());
            }
        }
    }

    #[test]
    fn curvature_times_factor_is_flat_density() {
        // K * e^{2 phi} = 1 + (n-1)/r^2 at the default coefficient.
        let mut rng = Lcg::new(23);
        for n in [2u32, 3, 4] {
            let m = rot(n);
            for _ in 0..100 {
                let p = Point::new(rng.range(-3.0, 3.0), rng.range(0.1, 4.0));
                let lhs = gauss_curvature(&m, p).unwrap() * conformal_factor(&m, p).unwrap();
                let rhs = 1.0 + (n - 1) as f64 / (p.v * p.v);
                assert!(
                    ((lhs - rhs) / rhs).abs() < 1e-12,
                    "n = {n}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn weighted_length_degenerate_and_errors() {
        let m = rot(2);
        assert!(weighted_length(&m, &[Point::new(0.0, 1.0)]).is_err());
        let z = weighted_length(&m, &[Point::new(0.5, 1.0), Point::new(0.5, 1.0)]).unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn weighted_length_reflection_invariance() {
        let m = rot(3);
        let curve: Vec<Point> = (0..=32)
            .map(|i| {
                let t = i as f64 / 32.0;
                Point::new(1.5 * (t - 0.3), 1.0 + 0.5 * (3.0 * t).sin())
            })
            .collect();
        let mirrored: Vec<Point> = curve.iter().map(|p| p.mirror_u()).collect();
        let a = weighted_length(&m, &curve).unwrap();
        let b = weighted_length(&m, &mirrored).unwrap();
        assert!((a - b).abs() < 1e-14 * a.max(1.0));
    }

    #[test]
    fn weighted_length_double_cover_half_line() {
        // Double cover of x = 0 truncated at large R: 2 * integral of
        // r^{n-1} e^{-r^2/4} dr. For n = 2 the antiderivative is
        // -2 e^{-r^2/4}, so the full value is 4.
        let m = rot(2);
        let big = 14.0;
        let nseg = 400;
        let mut up: Vec<Point> = (0..=nseg)
            .map(|i| Point::new(0.0, 1e-9 + big * i as f64 / nseg as f64))
            .collect();
        let mut down = up.clone();
        down.reverse();
        up.extend(down);
        let len = weighted_length(&m, &up).unwrap();
        assert!((len - 4.0).abs() < 1e-9, "{len}");
    }

    #[test]
    fn gauss_area_rectangle_frozen_values() {
        let m = rot(2);
        let got = gauss_area_rectangle(&m, 1.0, 2.0, 0.5).unwrap();
        assert!((got - 1.5).abs() < 1e-14, "{got}");
        // Empty rectangle.
        let z = gauss_area_rectangle(&rot(4), 1.3, 1.3, 0.7).unwrap();
        assert_eq!(z, 0.0);
        assert!(gauss_area_rectangle(&m, 0.0, 1.0, 0.5).is_err());
        assert!(gauss_area_rectangle(&m, 2.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn gauss_area_rectangle_matches_2d_quadrature() {
        // Cross-check the closed form against a tensor midpoint rule on the
        // flat density, an independent route.
        let m = rot(3);
        let (a, b, c) = (0.7, 2.3, 0.45);
        let exact = gauss_area_rectangle(&m, a, b, c).unwrap();
        let (nx, nr) = (2000usize, 2000usize);
        let (dx, dr) = (2.0 * c / nx as f64, (b - a) / nr as f64);
        let mut acc = 0.0;
        for i in 0..nx {
            for j in 0..nr {
                let r = a + (j as f64 + 0.5) * dr;
                let _x = -c + (i as f64 + 0.5) * dx;
                acc += (1.0 + 2.0 / (r * r)) * dx * dr;
            }
        }
        assert!((exact - acc).abs() < 1e-6, "{exact} vs {acc}");
    }

    #[test]
    fn gauss_area_region_matches_rectangle() {
        let m = rot(2);
        let (a, b, c) = (1.0, 2.0, 0.5);
        // CCW rectangle boundary sampled along the edges.
        let mut pts = Vec::new();
        let k = 40;
        for i in 0..k {
            let t = i as f64 / k as f64;
            pts.push(Point::new(-c + 2.0 * c * t, a));
        }
        for i in 0..k {
            let t = i as f64 / k as f64;
            pts.push(Point::new(c, a + (b - a) * t));
        }
        for i in 0..k {
            let t = i as f64 / k as f64;
            pts.push(Point::new(c - 2.0 * c * t, b));
        }
        for i in 0..k {
            let t = i as f64 / k as f64;
            pts.push(Point::new(-c, b - (b - a) * t));
        }
        let got = gauss_area_region(&m, &pts).unwrap();
        let exact = gauss_area_rectangle(&m, a, b, c).unwrap();
        assert!((got - exact).abs() < 1e-12, "{got} vs {exact}");

        // Reflection across the r-axis (with orientation restored) leaves
        // the area unchanged.
        let mut mirrored: Vec<Point> = pts.iter().map(|p| p.mirror_u()).collect();
        mirrored.reverse();
        let gm = gauss_area_region(&m, &mirrored).unwrap();
        assert!((gm - exact).abs() < 1e-12);
    }

    #[test]
    fn gauss_area_region_rejects_self_intersection() {
        let m = rot(2);
        let bow = [
            Point::new(-1.0, 1.0),
            Point::new(1.0, 2.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 2.0),
        ];
        assert!(matches!(
            gauss_area_region(&m, &bow),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn gauss_bonnet_on_small_circle() {
        // For a small circle around (0, 2): total geodesic curvature plus
        // enclosed Gauss area equals 2 pi.
        let m = rot(2);
        let (cx, cv, rad) = (0.0, 2.0, 0.35);
        let k = 4000;
        let mut pts = Vec::with_capacity(k);
        for i in 0..k {
            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            pts.push(Point::new(cx + rad * t.cos(), cv + rad * t.sin()));
        }
        let area = gauss_area_region(&m, &pts).unwrap();
        // Weighted line integral of k_g: k_g ds_w = (k_euc - dphi/dn) ds_euc.
        let mut total_kg = 0.0;
        for i in 0..k {
            let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
            let p = Point::new(cx + rad * t.cos(), cv + rad * t.sin());
            let tangent = t + std::f64::consts::FRAC_PI_2;
            let (gu, gv) = m.grad_phi(p);
            let dphi_dn = -gu * tangent.sin() + gv * tangent.cos();
            total_kg += (1.0 / rad - dphi_dn) * (2.0 * std::f64::consts::PI * rad / k as f64);
        }
        let gb = total_kg + area;
        assert!(
            (gb - 2.0 * std::f64::consts::PI).abs() < 1e-6,
            "gauss-bonnet defect: {}",
            gb - 2.0 * std::f64::consts::PI
        );
    }

    #[test]
    fn geodesic_curvature_vanishes_on_fundamental_profiles() {
        for n in [2u32, 3, 6] {
            let m = rot(n);
            let r_cyl = m.cylinder_radius().unwrap();
            let r_sph = m.sphere_radius();
            for i in 0..100 {
                // Cylinder line r = sqrt(2(n-1)), horizontal tangent.
                let x = -3.0 + 6.0 * i as f64 / 99.0;
                let kg = geodesic_curvature(&m, Point::new(x, r_cyl), 0.0, 0.0).unwrap();
                assert!(kg.abs() < 1e-10, "cylinder n={n}: {kg}");

                // Sphere circle x^2 + r^2 = 2n with k_euc = 1/sqrt(2n),
                // sampled away from the axis where e^{-phi} blows up.
                let th = std::f64::consts::PI * (0.1 + 0.8 * i as f64 / 99.0);
                let p = Point::new(r_sph * th.cos(), r_sph * th.sin());
                let tangent = th + std::f64::consts::FRAC_PI_2;
                let kg = geodesic_curvature(&m, p, tangent, 1.0 / r_sph).unwrap();
                assert!(kg.abs() < 1e-10, "sphere n={n}: {kg}");

                // Flat plane through the origin: the vertical line x = 0.
                let r = 0.3 + 3.7 * i as f64 / 99.0;
                let kg = geodesic_curvature(
                    &m,
                    Point::new(0.0, r),
                    std::f64::consts::FRAC_PI_2,
                    0.0,
                )
                .unwrap();
                assert!(kg.abs() < 1e-10, "plane n={n}: {kg}");
            }
        }
    }

    #[test]
    fn conformal_shift_identity_case() {
        assert_eq!(conformal_curvature_shift(0.7, 0.0, 0.0), 0.7);
    }
}
