//! SVG drawings of cell decompositions: both faces side by side, one closed path
//! per tile.

use std::fmt::Write;

use super::{Color, SubdivisionRule};
use super::complex::CellDecomposition;
use crate::geometry::ModelPoint;
use crate::plane::P2;

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Width in pixels of one face.
    pub face_size: f64,
    pub margin: f64,
    /// Tile sets drawn with the given fill.
    pub highlights: Vec<(Vec<usize>, String)>,
    /// Points drawn as small dots.
    pub points: Vec<ModelPoint>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            face_size: 400.0,
            margin: 20.0,
            highlights: Vec::new(),
            points: Vec::new(),
        }
    }
}

pub fn render_svg(rule: &SubdivisionRule, decomp: &CellDecomposition, opts: &SvgOptions) -> String {
    let poly = rule.polygon();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in poly {
        for i in 0..2 {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let s = opts.face_size / span;
    let height = (hi[1] - lo[1]) * s + 2.0 * opts.margin;
    let width = 2.0 * opts.face_size + 3.0 * opts.margin;
    let project = |face: usize, p: P2| -> (f64, f64) {
        let x0 = opts.margin + face as f64 * (opts.face_size + opts.margin);
        (x0 + (p[0] - lo[0]) * s, opts.margin + (hi[1] - p[1]) * s)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.2} {height:.2}">"#
    );
    let _ = writeln!(
        out,
        "<!-- rule {} level {} tiles {} -->",
        decomp.rule,
        decomp.level,
        decomp.tiles.len()
    );
    let stroke = (0.8f64).min(200.0 / (decomp.tiles.len() as f64).sqrt().max(1.0));
    for t in &decomp.tiles {
        let fill = opts
            .highlights
            .iter()
            .find(|(set, _)| set.contains(&t.id))
            .map(|(_, c)| c.as_str())
            .unwrap_or(match t.color {
                Color::White => "#f4f4f4",
                Color::Black => "#4a4a4a",
            });
        let mut d = String::new();
        for (i, p) in t.star.boundary().iter().enumerate() {
            let (x, y) = project(t.face, *p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(
            out,
            r##"<path id="t{}" d="{d}" fill="{fill}" stroke="#888" stroke-width="{stroke:.3}"/>"##,
            t.id
        );
    }
    for p in &opts.points {
        let (x, y) = project(p.face, p.coords);
        let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#d62728"/>"##);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::{flower, load_builtin, refine};

    fn paths(svg: &str) -> usize {
        svg.matches("<path").count()
    }

    #[test]
    fn one_path_per_tile() {
        let rule = load_builtin("pillow_lattes").unwrap();
        assert_eq!(paths(&render_svg(&rule, &refine(&rule, 0).unwrap(), &SvgOptions::default())), 2);
        let d = refine(&rule, 3).unwrap();
        let v = d.vertices.iter().find(|v| v.tiles.len() == 4).unwrap().id;
        let opts = SvgOptions {
            highlights: vec![(flower(&d, v).unwrap(), "#1f77b4".into())],
            ..SvgOptions::default()
        };
        let svg = render_svg(&rule, &d, &opts);
        assert_eq!(paths(&svg), 128);
        assert_eq!(svg.matches("#1f77b4").count(), 4);
        let b = load_builtin("barycentric").unwrap();
        assert_eq!(paths(&render_svg(&b, &refine(&b, 1).unwrap(), &SvgOptions::default())), 12);
    }
}
