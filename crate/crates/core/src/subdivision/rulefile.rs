//! User-defined rules in the sectioned text format.
//!
//! ```text
//! [rule]
//! name = quarters
//! lambda = 2
//! polygon = 0,0 1,0 1,1 0,1      # counterclockwise, starting at 0-vertex 0
//! vertices = A B C D
//!
//! [tile LL]
//! location = white               # face the tile lies in
//! color = white                  # face it is mapped onto
//! corners = 0,0 0.5,0 0.5,0.5 0,0.5   # point sent to 0-vertex 0, 1, ...
//! # optional: mids = ... (one point per side), center = x,y
//!
//! [label E]
//! face = 0
//! point = 0.5,0
//! ```

use std::path::Path;

use super::{OneTileSpec, SubdivisionRule};
use crate::error::{Error, Result};
use crate::geometry::ModelPoint;
use crate::textfmt::{self, parse_points};

pub fn load(path: &Path) -> Result<SubdivisionRule> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<SubdivisionRule> {
    let sections = textfmt::parse(text)?;
    let head = sections
        .iter()
        .find(|s| s.name == "rule")
        .ok_or(Error::Parse {
            line: 1,
            msg: "missing [rule] section".into(),
        })?;
    let name = head
        .get("name")
        .map(|e| e.value.clone())
        .unwrap_or_else(|| "custom".to_string());
    let lambda = match head.get("lambda") {
        Some(e) => e.parse::<f64>()?,
        None => 2.0,
    };
    let polygon = parse_points(head.require("polygon")?)?;
    let vertex_labels: Vec<String> = match head.get("vertices") {
        Some(e) => e.value.split_whitespace().map(String::from).collect(),
        None => (0..polygon.len()).map(|k| format!("P{k}")).collect(),
    };

    let mut specs = Vec::new();
    let mut labels: Vec<(ModelPoint, String)> = Vec::new();
    for s in &sections {
        if let Some(label) = s.name.strip_prefix("tile") {
            let label = label.trim();
            if label.is_empty() {
                return Err(Error::Parse {
                    line: s.line,
                    msg: "tile section needs a label, as in [tile LL]".into(),
                });
            }
            let mids = s.get("mids").map(parse_points).transpose()?;
            let center = match s.get("center") {
                Some(e) => {
                    let pts = parse_points(e)?;
                    if pts.len() != 1 {
                        return Err(e.err("center takes one point"));
                    }
                    Some(pts[0])
                }
                None => None,
            };
            specs.push(OneTileSpec {
                label: label.to_string(),
                location: s.require("location")?.parse()?,
                color: s.require("color")?.parse()?,
                corners: parse_points(s.require("corners")?)?,
                mids,
                center,
            });
        } else if let Some(label) = s.name.strip_prefix("label") {
            let face = match s.get("face") {
                Some(e) => e.parse::<usize>()?,
                None => 0,
            };
            let e = s.require("point")?;
            let pts = parse_points(e)?;
            if pts.len() != 1 || face > 1 {
                return Err(e.err("label takes one point on face 0 or 1"));
            }
            labels.push((ModelPoint::new(face, pts[0]), label.trim().to_string()));
        }
    }
    let label_refs: Vec<(ModelPoint, &str)> = labels.iter().map(|(p, l)| (*p, l.as_str())).collect();
    SubdivisionRule::from_specs(&name, polygon, vertex_labels, specs, lambda, &label_refs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUARTERS: &str = "
[rule]
name = quarters
polygon = 0,0 1,0 1,1 0,1
vertices = A B C D

[tile LL]
location = white
color = white
corners = 0,0 0.5,0 0.5,0.5 0,0.5
[tile LR]
location = white
color = black
corners = 1,0 0.5,0 0.5,0.5 1,0.5
[tile UR]
location = white
color = white
corners = 1,1 0.5,1 0.5,0.5 1,0.5
[tile UL]
location = white
color = black
corners = 0,1 0.5,1 0.5,0.5 0,0.5
[tile bLL]
location = black
color = black
corners = 0,0 0.5,0 0.5,0.5 0,0.5
[tile bLR]
location = black
color = white
corners = 1,0 0.5,0 0.5,0.5 1,0.5
[tile bUR]
location = black
color = black
corners = 1,1 0.5,1 0.5,0.5 1,0.5
[tile bUL]
location = black
color = white
corners = 0,1 0.5,1 0.5,0.5 0,0.5

[label F]
point = 0.5,0.5
";

    #[test]
    fn parses_the_pillow() {
        let rule = parse(QUARTERS).unwrap();
        assert_eq!((rule.degree, rule.post_count), (4, 4));
        assert_eq!(rule.vertex_by_label("F").unwrap().local_degree, 2);
    }

    #[test]
    fn rejects_wrong_orientation() {
        let bad = QUARTERS.replacen("color = black\ncorners = 1,0", "color = white\ncorners = 1,0", 1);
        assert!(matches!(parse(&bad), Err(Error::InvalidRule(_))));
    }

    #[test]
    fn reports_missing_keys() {
        let bad = QUARTERS.replacen("location = white\n", "", 1);
        assert!(matches!(parse(&bad), Err(Error::Parse { .. })));
    }
}
