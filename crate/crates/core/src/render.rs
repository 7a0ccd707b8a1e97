//! Smoothing diagrams as DOT, TikZ or SVG. All three share one layout:
//! vertex v sits on a circle at angle 90 + 360 v / n degrees, so labels run
//! counterclockwise from the top.

use std::f64::consts::PI;
use std::fmt::Write;
use std::str::FromStr;

use crate::biresidue::SmoothingDiagram;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagramFormat {
    Dot,
    Tikz,
    Svg,
}

impl FromStr for DiagramFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(DiagramFormat::Dot),
            "tikz" => Ok(DiagramFormat::Tikz),
            "svg" => Ok(DiagramFormat::Svg),
            _ => Err(Error::InvalidParameter(format!("unknown diagram format {s:?}"))),
        }
    }
}

const SMOOTH_COLOR: &str = "#1f5fa8";
const PLAIN_COLOR: &str = "#bbbbbb";
const LIGHT_COLOR: &str = "#9ecae1";
const DARK_COLOR: &str = "#08306b";

/// Unit-circle position of vertex v.
pub fn layout(n: usize, v: usize) -> (f64, f64) {
    let a = PI / 2.0 + 2.0 * PI * v as f64 / n as f64;
    (a.cos(), a.sin())
}

fn weight_name(w: u8) -> &'static str {
    if w == 2 {
        "dark"
    } else {
        "light"
    }
}

/// One angle marker: edge (i, j) seen from apex k.
struct Marker {
    i: usize,
    j: usize,
    k: usize,
    w: u8,
}

fn markers(d: &SmoothingDiagram) -> Vec<Marker> {
    d.angles.iter().map(|(&((i, j), k), &w)| Marker { i, j, k, w }).collect()
}

pub fn render_diagram(d: &SmoothingDiagram, fmt: DiagramFormat) -> String {
    match fmt {
        DiagramFormat::Dot => dot(d),
        DiagramFormat::Tikz => tikz(d),
        DiagramFormat::Svg => svg(d),
    }
}

fn dot(d: &SmoothingDiagram) -> String {
    let n = d.n;
    let mut s = String::from("graph smoothing_diagram {\n  layout=neato;\n  node [shape=circle, fontsize=10];\n");
    for v in 0..n {
        let (x, y) = layout(n, v);
        writeln!(s, "  {v} [pos=\"{:.4},{:.4}!\"];", 2.0 * x, 2.0 * y).unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if d.edges.contains(&(i, j)) {
                let angles: Vec<String> =
                    d.angles_of((i, j)).iter().map(|&(k, w)| format!("{}@{k}", weight_name(w))).collect();
                writeln!(
                    s,
                    "  {i} -- {j} [color=\"{SMOOTH_COLOR}\", penwidth=2.5, label=\"{}\"];",
                    angles.join(" ")
                )
                .unwrap();
            } else {
                writeln!(s, "  {i} -- {j} [color=\"{PLAIN_COLOR}\", style=dashed];").unwrap();
            }
        }
    }
    s.push_str("}\n");
    s
}

/// Start and end directions (degrees) of the angle at k between rays to i and j,
/// taken counterclockwise through the smaller side.
fn arc_span(n: usize, m: &Marker) -> (f64, f64) {
    let dir = |t: usize| {
        let (ax, ay) = layout(n, m.k);
        let (bx, by) = layout(n, t);
        (by - ay).atan2(bx - ax).to_degrees()
    };
    let (a, b) = (dir(m.i), dir(m.j));
    let mut delta = (b - a).rem_euclid(360.0);
    if delta > 180.0 {
        delta -= 360.0;
    }
    if delta >= 0.0 {
        (a, a + delta)
    } else {
        (b, b - delta)
    }
}

fn tikz(d: &SmoothingDiagram) -> String {
    let n = d.n;
    let r = 2.5;
    let mut s = String::from("\\begin{tikzpicture}\n");
    for v in 0..n {
        let (x, y) = layout(n, v);
        writeln!(s, "  \\coordinate (v{v}) at ({:.4},{:.4});", r * x, r * y).unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if !d.edges.contains(&(i, j)) {
                writeln!(s, "  \\draw[gray!40, dashed] (v{i}) -- (v{j});").unwrap();
            }
        }
    }
    for &(i, j) in &d.edges {
        writeln!(s, "  \\draw[very thick, blue!70!black] (v{i}) -- (v{j});").unwrap();
    }
    for m in markers(d) {
        let (a, b) = arc_span(n, &m);
        let style = if m.w == 2 { "fill=blue!80!black" } else { "fill=blue!25" };
        writeln!(
            s,
            "  \\fill[{style}] (v{}) -- ++({a:.2}:0.45) arc[start angle={a:.2}, end angle={b:.2}, radius=0.45] -- cycle;",
            m.k
        )
        .unwrap();
    }
    for v in 0..n {
        writeln!(s, "  \\node[circle, fill=white, draw, inner sep=1.5pt] at (v{v}) {{{v}}};").unwrap();
    }
    s.push_str("\\end{tikzpicture}\n");
    s
}

fn svg(d: &SmoothingDiagram) -> String {
    let n = d.n;
    let (c, r, mr) = (200.0, 160.0, 26.0);
    // SVG's y axis points down, so flip to keep labels counterclockwise.
    let pos = |v: usize| {
        let (x, y) = layout(n, v);
        (c + r * x, c - r * y)
    };
    let mut s = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n",
    );
    for i in 0..n {
        for j in i + 1..n {
            if !d.edges.contains(&(i, j)) {
                let ((x1, y1), (x2, y2)) = (pos(i), pos(j));
                writeln!(
                    s,
                    "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{PLAIN_COLOR}\" stroke-dasharray=\"4 3\"/>"
                )
                .unwrap();
            }
        }
    }
    for m in markers(d) {
        let (a, b) = arc_span(n, &m);
        let (kx, ky) = pos(m.k);
        let pt = |deg: f64| (kx + mr * deg.to_radians().cos(), ky - mr * deg.to_radians().sin());
        let ((x1, y1), (x2, y2)) = (pt(a), pt(b));
        let color = if m.w == 2 { DARK_COLOR } else { LIGHT_COLOR };
        writeln!(
            s,
            "<path class=\"angle {}\" data-edge=\"{} {}\" d=\"M {kx:.2} {ky:.2} L {x1:.2} {y1:.2} A {mr} {mr} 0 0 0 {x2:.2} {y2:.2} Z\" fill=\"{color}\"/>",
            weight_name(m.w),
            m.i,
            m.j
        )
        .unwrap();
    }
    for &(i, j) in &d.edges {
        let ((x1, y1), (x2, y2)) = (pos(i), pos(j));
        writeln!(
            s,
            "<line class=\"smoothable\" x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{SMOOTH_COLOR}\" stroke-width=\"3\"/>"
        )
        .unwrap();
    }
    for v in 0..n {
        let (x, y) = pos(v);
        writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"11\" fill=\"white\" stroke=\"black\"/>").unwrap();
        writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{v}</text>",
            y + 4.0
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::make;
    use crate::FamilyTag;

    #[test]
    fn x4_dot() {
        let d = make(&FamilyTag::X4).unwrap().smoothing_diagram();
        let s = render_diagram(&d, DiagramFormat::Dot);
        assert!(s.contains("0 -- 1 [color=\"#1f5fa8\", penwidth=2.5, label=\"dark@2\"]"));
        assert!(s.contains("2 -- 3 [color=\"#1f5fa8\", penwidth=2.5, label=\"dark@1\"]"));
        assert!(s.contains("1 -- 2 [color=\"#1f5fa8\", penwidth=2.5, label=\"light@0 light@3\"]"));
        assert!(s.contains("0 -- 2 [color=\"#bbbbbb\", style=dashed]"));
        assert_eq!(s.matches("penwidth").count(), 4);
    }

    #[test]
    fn empty_diagram_is_complete_graph() {
        let d = SmoothingDiagram { n: 5, edges: Default::default(), angles: Default::default() };
        let s = render_diagram(&d, DiagramFormat::Dot);
        assert_eq!(s.matches("style=dashed").count(), 10);
        let svg = render_diagram(&d, DiagramFormat::Svg);
        assert_eq!(svg.matches("<line").count(), 10);
        assert!(!svg.contains("angle"));
    }

    #[test]
    fn layout_is_counterclockwise() {
        let (x0, y0) = layout(4, 0);
        let (x1, y1) = layout(4, 1);
        assert!(x0.abs() < 1e-12 && (y0 - 1.0).abs() < 1e-12);
        assert!((x1 + 1.0).abs() < 1e-12 && y1.abs() < 1e-12);
    }

    #[test]
    fn z15_svg_markers() {
        let d = make(&FamilyTag::Z(15)).unwrap().smoothing_diagram();
        let s = render_diagram(&d, DiagramFormat::Svg);
        assert_eq!(s.matches("class=\"smoothable\"").count(), 15);
        let light = s.matches("class=\"angle light\"").count();
        let dark = s.matches("class=\"angle dark\"").count();
        assert_eq!(light + 2 * dark, 30);
        assert!(light > 0 && dark > 0);
        let t = render_diagram(&d, DiagramFormat::Tikz);
        assert_eq!(t.matches("\\fill").count(), light + dark);
    }

    #[test]
    fn deterministic() {
        let d = make(&"C:7,3".parse().unwrap()).unwrap().smoothing_diagram();
        for f in [DiagramFormat::Dot, DiagramFormat::Tikz, DiagramFormat::Svg] {
            assert_eq!(render_diagram(&d, f), render_diagram(&d, f));
        }
    }
}
