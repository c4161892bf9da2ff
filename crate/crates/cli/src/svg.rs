//! Deterministic SVG rendering of profile curves: fixed viewbox from the
//! data bounds plus a 10% margin, coordinate axes, reference lines, one
//! polyline per curve.

use shrinker_core::geometry::Point;

const CANVAS: f64 = 720.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone)]
pub enum Decoration {
    /// Horizontal line v = const (e.g. the cylinder radius).
    HorizontalLine(f64),
    /// Vertical line u = const.
    VerticalLine(f64),
    /// The diagonal u = v.
    Diagonal,
    /// Circle of the given radius about the origin.
    Circle(f64),
}

pub fn render(curves: &[Vec<Point>], decorations: &[Decoration]) -> String {
    // Data bounds with the axes always in view.
    let (mut lo_u, mut hi_u, mut lo_v, mut hi_v) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for c in curves {
        for p in c {
            lo_u = lo_u.min(p.u);
            hi_u = hi_u.max(p.u);
            lo_v = lo_v.min(p.v);
            hi_v = hi_v.max(p.v);
        }
    }
    if hi_u - lo_u < 1e-9 {
        hi_u += 1.0;
        lo_u -= 1.0;
    }
    if hi_v - lo_v < 1e-9 {
        hi_v += 1.0;
        lo_v -= 1.0;
    }
    let margin = 0.1 * (hi_u - lo_u).max(hi_v - lo_v);
    lo_u -= margin;
    hi_u += margin;
    lo_v -= margin;
    hi_v += margin;
    let span = (hi_u - lo_u).max(hi_v - lo_v);
    let scale = CANVAS / span;
    let height = (hi_v - lo_v) * scale;
    let width = (hi_u - lo_u) * scale;
    // SVG y grows downward; the plane's v grows upward.
    let x = |u: f64| (u - lo_u) * scale;
    let y = |v: f64| (hi_v - v) * scale;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.2} {height:.2}\" width=\"{width:.0}\" height=\"{height:.0}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#555\" stroke-width=\"1\"/>\n",
        x(lo_u), y(0.0), x(hi_u), y(0.0)
    ));
    out.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#555\" stroke-width=\"1\"/>\n",
        x(0.0), y(lo_v), x(0.0), y(hi_v)
    ));

    for deco in decorations {
        match deco {
            Decoration::HorizontalLine(v) => out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
                x(lo_u), y(*v), x(hi_u), y(*v)
            )),
            Decoration::VerticalLine(u) => out.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
                x(*u), y(lo_v), x(*u), y(hi_v)
            )),
            Decoration::Diagonal => {
                let d0 = lo_u.max(lo_v);
                let d1 = hi_u.min(hi_v);
                out.push_str(&format!(
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
                    x(d0), y(d0), x(d1), y(d1)
                ));
            }
            Decoration::Circle(r) => out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n",
                x(0.0), y(0.0), r * scale
            )),
        }
    }

    for (i, c) in curves.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for (j, p) in c.iter().enumerate() {
            path.push_str(if j == 0 { "M" } else { "L" });
            path.push_str(&format!("{:.3} {:.3} ", x(p.u), y(p.v)));
        }
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
            path.trim_end()
        ));
    }
    out.push_str("</svg>\n");
    out
}
