//! SVG drawings of point sets and spanners.

use std::fmt::Write as _;

use spanner_core::{PointSet, SpannerGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// Width of the image in pixels; the height follows the aspect ratio.
    pub width_px: f64,
    /// Dot radius as a fraction of the longer side of the bounding box.
    pub point_radius: f64,
    /// Stroke width as a fraction of the longer side of the bounding box.
    pub stroke_width: f64,
    pub draw_points: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { width_px: 800.0, point_radius: 0.003, stroke_width: 0.001, draw_points: true }
    }
}

const MARGIN: f64 = 0.02;

/// Points as dots and edges as segments, in a viewport that fits the bounding
/// box plus a 2% margin. The y axis points up.
pub fn render_svg(points: &PointSet, g: Option<&SpannerGraph>, opts: &SvgOptions) -> String {
    let mut s = String::new();
    let Some(bbox) = points.bounding_box() else {
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 1 1"></svg>"#,
            w = opts.width_px
        )
        .unwrap();
        return s;
    };
    let span = bbox.width().max(bbox.height());
    let span = if span > 0.0 { span } else { 1.0 };
    let m = MARGIN * span;
    let (vx, vy) = (bbox.min_x - m, -(bbox.max_y + m));
    let (vw, vh) = (bbox.width() + 2.0 * m, bbox.height() + 2.0 * m);
    let height_px = opts.width_px * vh / vw;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        opts.width_px, height_px, vx, vy, vw, vh
    )
    .unwrap();
    writeln!(s, r#"<rect x="{vx}" y="{vy}" width="{vw}" height="{vh}" fill="white"/>"#).unwrap();
    if let Some(g) = g {
        writeln!(s, r#"<g stroke="black" stroke-width="{}" stroke-linecap="round">"#, opts.stroke_width * span).unwrap();
        for (u, v, _) in g.edges() {
            let (a, b) = (points.get(u), points.get(v));
            writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, a.x, -a.y, b.x, -b.y).unwrap();
        }
        s.push_str("</g>\n");
    }
    if opts.draw_points {
        writeln!(s, r#"<g fill="crimson">"#).unwrap();
        let r = opts.point_radius * span;
        for p in points.iter() {
            writeln!(s, r#"<circle cx="{}" cy="{}" r="{r}"/>"#, p.x, -p.y).unwrap();
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}
