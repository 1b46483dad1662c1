//! SVG 1.1 figures: a function graph as one polyline, with optional framing
//! rectangles, point sets, Cantor stages drawn as bars under the plot, and
//! direction sets on an inset circle. Output is a pure function of the input.

use std::fmt::Write;

use crate::affine::CantorStage;
use crate::attractor::PointSet;
use crate::direction::DirectionSet;
use crate::geometry::Rectangle;
use crate::graph::SampledGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub stroke_width: f64,
    pub graph_color: String,
    pub overlay_color: String,
    pub point_radius: f64,
    /// Direction sets with more angles are thinned by striding.
    pub max_direction_ticks: usize,
    pub title: Option<String>,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
            margin: 40.0,
            stroke_width: 1.0,
            graph_color: "#1f4e79".into(),
            overlay_color: "#c0392b".into(),
            point_radius: 1.5,
            max_direction_ticks: 2048,
            title: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Overlay<'a> {
    Rectangles(&'a [Rectangle<f64>]),
    Cantor(&'a CantorStage<f64>),
    Points(&'a PointSet<f64>),
    Directions(&'a DirectionSet<f64>),
}

const CANTOR_BAND: f64 = 36.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    top: f64,
    w: f64,
    h: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        self.left + (x - self.x0) / (self.x1 - self.x0) * self.w
    }

    fn sy(&self, y: f64) -> f64 {
        self.top + (self.y1 - y) / (self.y1 - self.y0) * self.h
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn extend(b: &mut [f64; 4], x: f64, y: f64) {
    b[0] = b[0].min(x);
    b[1] = b[1].max(x);
    b[2] = b[2].min(y);
    b[3] = b[3].max(y);
}

pub fn render_svg(graph: Option<&SampledGraph<f64>>, overlays: &[Overlay<'_>], style: &Style) -> String {
    let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    if let Some(g) = graph {
        for (x, y) in g.xs().iter().zip(g.ys()) {
            extend(&mut b, *x, *y);
        }
    }
    let mut has_cantor = false;
    for o in overlays {
        match o {
            Overlay::Rectangles(rs) => {
                for r in *rs {
                    extend(&mut b, r.x_interval.lo, r.y_interval.lo);
                    extend(&mut b, r.x_interval.hi, r.y_interval.hi);
                }
            }
            Overlay::Points(ps) => {
                for p in ps.points() {
                    extend(&mut b, p.x, p.y);
                }
            }
            Overlay::Cantor(st) => {
                has_cantor = true;
                for i in &st.intervals {
                    b[0] = b[0].min(i.lo);
                    b[1] = b[1].max(i.hi);
                }
            }
            Overlay::Directions(_) => {}
        }
    }
    if !b[0].is_finite() {
        b = [0.0, 1.0, 0.0, 1.0];
    }
    if !b[2].is_finite() {
        b[2] = 0.0;
        b[3] = 1.0;
    }
    for (lo, hi) in [(0, 1), (2, 3)] {
        if b[hi] - b[lo] <= f64::EPSILON * b[lo].abs().max(1.0) {
            b[lo] -= 0.5;
            b[hi] += 0.5;
        }
    }
    let band = if has_cantor { CANTOR_BAND } else { 0.0 };
    let f = Frame {
        x0: b[0],
        x1: b[1],
        y0: b[2],
        y1: b[3],
        left: style.margin,
        top: style.margin,
        w: style.width - 2.0 * style.margin,
        h: style.height - 2.0 * style.margin - band,
    };

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = style.width,
        h = style.height
    );
    if let Some(t) = &style.title {
        let _ = writeln!(s, "<title>{}</title>", escape(t));
    }
    let _ = writeln!(
        s,
        "<rect class=\"frame\" x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.5\"/>",
        f.left, f.top, f.w, f.h
    );

    for o in overlays {
        if let Overlay::Rectangles(rs) = o {
            s.push_str("<g class=\"framing\">\n");
            for r in *rs {
                let (x, y) = (f.sx(r.x_interval.lo), f.sy(r.y_interval.hi));
                let _ = writeln!(
                    s,
                    "<rect class=\"framing-rect\" x=\"{x:.3}\" y=\"{y:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{c}\" fill-opacity=\"0.12\" stroke=\"{c}\" stroke-width=\"{sw}\"/>",
                    f.sx(r.x_interval.hi) - x,
                    f.sy(r.y_interval.lo) - y,
                    c = style.overlay_color,
                    sw = style.stroke_width * 0.75
                );
            }
            s.push_str("</g>\n");
        }
    }

    if let Some(g) = graph {
        let _ = write!(
            s,
            "<polyline class=\"graph\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"",
            style.graph_color, style.stroke_width
        );
        for (i, (x, y)) in g.xs().iter().zip(g.ys()).enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{:.3},{:.3}", f.sx(*x), f.sy(*y));
        }
        s.push_str("\"/>\n");
    }

    for o in overlays {
        match o {
            Overlay::Points(ps) => {
                let _ = writeln!(s, "<g class=\"points\" fill=\"{}\">", style.overlay_color);
                for p in ps.points() {
                    let _ = writeln!(
                        s,
                        "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{}\"/>",
                        f.sx(p.x),
                        f.sy(p.y),
                        style.point_radius
                    );
                }
                s.push_str("</g>\n");
            }
            Overlay::Cantor(st) => {
                let y = f.top + f.h + 0.5 * CANTOR_BAND;
                let _ = writeln!(s, "<g class=\"cantor\" data-stage=\"{}\">", st.stage);
                for i in &st.intervals {
                    let x = f.sx(i.lo);
                    let _ = writeln!(
                        s,
                        "<rect class=\"cantor-bar\" x=\"{x:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"8\" fill=\"{}\"/>",
                        y - 4.0,
                        (f.sx(i.hi) - x).max(0.5),
                        style.graph_color
                    );
                }
                for gap in &st.gaps {
                    let x = f.sx(gap.interval.midpoint());
                    let _ = writeln!(
                        s,
                        "<line class=\"gap-marker\" x1=\"{x:.3}\" y1=\"{:.3}\" x2=\"{x:.3}\" y2=\"{:.3}\" stroke=\"{}\" stroke-width=\"{}\"/>",
                        y - 9.0,
                        y + 9.0,
                        style.overlay_color,
                        style.stroke_width
                    );
                }
                s.push_str("</g>\n");
            }
            Overlay::Directions(d) => {
                let r = 0.12 * style.width.min(style.height);
                let (cx, cy) = (style.width - style.margin - r - 4.0, style.margin + r + 4.0);
                let _ = writeln!(s, "<g class=\"directions\" data-count=\"{}\">", d.len());
                let _ = writeln!(
                    s,
                    "<circle cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{r:.3}\" fill=\"white\" stroke=\"#999999\" stroke-width=\"0.5\"/>"
                );
                let stride = d.len().div_ceil(style.max_direction_ticks.max(1)).max(1);
                for &a in d.angles().iter().step_by(stride) {
                    let (c, sn) = (a.cos(), a.sin());
                    let _ = writeln!(
                        s,
                        "<line class=\"direction\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"{}\" stroke-width=\"0.75\"/>",
                        cx + 0.85 * r * c,
                        cy - 0.85 * r * sn,
                        cx + r * c,
                        cy - r * sn,
                        style.overlay_color
                    );
                }
                s.push_str("</g>\n");
            }
            Overlay::Rectangles(_) => {}
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{cantor_refine, converse_ifs};
    use crate::geometry::{Interval, Point};
    use crate::graph::{framing_rectangle, sample, FunctionSpec};

    fn polyline_points(svg: &str) -> usize {
        let start = svg.find("points=\"").unwrap() + 8;
        let end = start + svg[start..].find('"').unwrap();
        svg[start..end].split(' ').count()
    }

    #[test]
    fn takagi_polyline_has_every_node() {
        let g = sample(&FunctionSpec::<f64>::takagi(), 1 << 12).unwrap();
        let svg = render_svg(Some(&g), &[], &Style::default());
        assert_eq!(polyline_points(&svg), 4097);
        assert!(svg.contains("version=\"1.1\""));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn graph_only_without_overlays() {
        let g = sample(&FunctionSpec::<f64>::takagi(), 16).unwrap();
        let svg = render_svg(Some(&g), &[], &Style::default());
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(!svg.contains("cantor") && !svg.contains("framing-rect"));
    }

    #[test]
    fn cantor_stage_two_counts() {
        let ifs = converse_ifs(1.0, 0.0).unwrap();
        let g = sample(&FunctionSpec::affine(1.0, 0.0), 256).unwrap();
        let mut st = CantorStage::initial(Interval::unit());
        for _ in 0..2 {
            st = cantor_refine(&ifs, &g, &st).unwrap();
        }
        let svg = render_svg(Some(&g), &[Overlay::Cantor(&st)], &Style::default());
        assert_eq!(svg.matches("class=\"cantor-bar\"").count(), 4);
        assert_eq!(svg.matches("class=\"gap-marker\"").count(), 3);
    }

    #[test]
    fn overlays_and_determinism() {
        let g = sample(&FunctionSpec::<f64>::takagi(), 64).unwrap();
        let rects: Vec<_> = [(0.0, 0.5), (0.5, 1.0)]
            .iter()
            .map(|&(a, b)| framing_rectangle(&g, &Interval::new(a, b)).unwrap())
            .collect();
        let ps = PointSet::new(vec![Point::new(0.25, 0.5), Point::new(0.75, 0.5)]).unwrap();
        let d = DirectionSet::new([0.0, 1.0, 3.0], "test").unwrap();
        let style = Style {
            title: Some("a < b & c".into()),
            ..Style::default()
        };
        let overlays = [Overlay::Rectangles(&rects), Overlay::Points(&ps), Overlay::Directions(&d)];
        let a = render_svg(Some(&g), &overlays, &style);
        let b = render_svg(Some(&g), &overlays, &style);
        assert_eq!(a, b);
        assert_eq!(a.matches("class=\"framing-rect\"").count(), 2);
        assert_eq!(a.matches("class=\"direction\"").count(), 3);
        assert!(a.contains("<title>a &lt; b &amp; c</title>"));
    }

    #[test]
    fn empty_figure_is_valid() {
        let svg = render_svg(None, &[], &Style::default());
        assert!(svg.contains("<svg") && svg.contains("</svg>"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }
}
