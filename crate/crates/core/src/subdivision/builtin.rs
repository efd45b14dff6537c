//! The three built-in rules: the Lattès pillow, the barycentric subdivision of a
//! doubled triangle, and the flap map (a pillow with a pocket sewn into a slit).

use super::{Color, OneTileSpec, SubdivisionRule};
use crate::error::Result;
use crate::geometry::ModelPoint;
use crate::plane::P2;

use Color::{Black, White};

fn tile(label: &str, location: Color, color: Color, corners: &[P2]) -> OneTileSpec {
    OneTileSpec {
        label: label.to_string(),
        location,
        color,
        corners: corners.to_vec(),
        mids: None,
        center: None,
    }
}

fn labels(names: &str) -> Vec<String> {
    names.split_whitespace().map(String::from).collect()
}

const A: P2 = [0.0, 0.0];
const B: P2 = [1.0, 0.0];
const C: P2 = [1.0, 1.0];
const D: P2 = [0.0, 1.0];
const E: P2 = [0.5, 0.0];
const F: P2 = [0.5, 0.5];
const G: P2 = [0.0, 0.5];
const H: P2 = [1.0, 0.5];
const I: P2 = [0.5, 1.0];

fn square_labels() -> Vec<(ModelPoint, &'static str)> {
    vec![
        (ModelPoint::new(0, A), "A"),
        (ModelPoint::new(0, B), "B"),
        (ModelPoint::new(0, C), "C"),
        (ModelPoint::new(0, D), "D"),
        (ModelPoint::new(0, E), "E"),
        (ModelPoint::new(0, F), "F"),
        (ModelPoint::new(0, G), "G"),
        (ModelPoint::new(0, H), "H"),
        (ModelPoint::new(0, I), "I"),
        (ModelPoint::new(1, F), "J"),
    ]
}

/// Back-face quarters shared by the pillow and the flap.
fn back_quarters() -> Vec<OneTileSpec> {
    vec![
        tile("bLL", Black, Black, &[A, E, F, G]),
        tile("bLR", Black, White, &[B, E, F, H]),
        tile("bUR", Black, Black, &[C, I, F, H]),
        tile("bUL", Black, White, &[D, I, F, G]),
    ]
}

/// The pillow model of `4z(1-z^2)/(1+z^2)^2`: two unit squares, each cut into four
/// quarters, every quarter blown up by 2 onto a face.
///
/// Corners are listed by image: `AEFG` maps to `ABCD` on the front, `EBHF` to
/// `BADC` on the back, and so on.
pub fn pillow_lattes() -> Result<SubdivisionRule> {
    let mut tiles = vec![
        tile("LL", White, White, &[A, E, F, G]),
        tile("LR", White, Black, &[B, E, F, H]),
        tile("UR", White, White, &[C, I, F, H]),
        tile("UL", White, Black, &[D, I, F, G]),
    ];
    tiles.extend(back_quarters());
    SubdivisionRule::from_specs(
        "pillow_lattes",
        vec![A, B, C, D],
        labels("A B C D"),
        tiles,
        2.0,
        &square_labels(),
    )
}

/// Two equilateral triangles, each cut by its bisectors into six small triangles.
/// Every small triangle maps its big-triangle vertex to 0-vertex `A`, its edge
/// midpoint to `B` and the centroid to `C`.
pub fn barycentric() -> Result<SubdivisionRule> {
    let h = 3f64.sqrt() / 2.0;
    let p = [[0.0, 0.0], [1.0, 0.0], [0.5, h]];
    let mid = |i: usize, j: usize| [(p[i][0] + p[j][0]) / 2.0, (p[i][1] + p[j][1]) / 2.0];
    let o = [0.5, h / 3.0];
    let (m01, m12, m20) = (mid(0, 1), mid(1, 2), mid(2, 0));
    let small = [
        ("T0", p[0], m01, White),
        ("T1", p[1], m01, Black),
        ("T2", p[1], m12, White),
        ("T3", p[2], m12, Black),
        ("T4", p[2], m20, White),
        ("T5", p[0], m20, Black),
    ];
    let mut tiles = Vec::with_capacity(12);
    for (loc, prefix) in [(White, ""), (Black, "b")] {
        for (name, v, m, col) in small {
            let color = if loc == White { col } else { col.other() };
            tiles.push(tile(&format!("{prefix}{name}"), loc, color, &[v, m, o]));
        }
    }
    let point_labels = vec![
        (ModelPoint::new(0, p[0]), "A"),
        (ModelPoint::new(0, p[1]), "B"),
        (ModelPoint::new(0, p[2]), "C"),
        (ModelPoint::new(0, m01), "AB"),
        (ModelPoint::new(0, m12), "BC"),
        (ModelPoint::new(0, m20), "CA"),
        (ModelPoint::new(0, o), "O"),
        (ModelPoint::new(1, o), "O'"),
    ];
    SubdivisionRule::from_specs(
        "barycentric",
        p.to_vec(),
        labels("A B C"),
        tiles,
        2.0,
        &point_labels,
    )
}

/// The flap map: ten squares, six on the front face and four on the back.
///
/// The pocket (the half-scale pillow sewn into the slit `GF`) is drawn inside the
/// front face as the lens between two bent arcs from `G` to `F`; the lens is split
/// along the straight segment `G D' C' F` into the pocket's two squares `SF`
/// (glued to `LL`) and `SB` (glued to `UL`).
pub fn flap() -> Result<SubdivisionRule> {
    let dp: P2 = [0.15, 0.5];
    let cp: P2 = [0.35, 0.5];
    let bend_lower: P2 = [0.25, 0.35];
    let bend_upper: P2 = [0.25, 0.65];
    let mid = |a: P2, b: P2| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let bent = |label: &str, color: Color, corners: [P2; 4], side2: P2, center: P2| OneTileSpec {
        label: label.to_string(),
        location: White,
        color,
        corners: corners.to_vec(),
        mids: Some(vec![
            mid(corners[0], corners[1]),
            mid(corners[1], corners[2]),
            side2,
            mid(corners[3], corners[0]),
        ]),
        center: Some(center),
    };
    let mut tiles = vec![
        bent("LL", White, [A, E, F, G], bend_lower, [0.25, 0.15]),
        tile("LR", White, Black, &[B, E, F, H]),
        tile("UR", White, White, &[C, I, F, H]),
        bent("UL", Black, [D, I, F, G], bend_upper, [0.25, 0.85]),
        bent("SF", Black, [dp, cp, F, G], bend_lower, [0.25, 0.44]),
        bent("SB", White, [dp, cp, F, G], bend_upper, [0.25, 0.56]),
    ];
    tiles.extend(back_quarters());
    let mut point_labels = square_labels();
    point_labels.push((ModelPoint::new(0, cp), "C'"));
    point_labels.push((ModelPoint::new(0, dp), "D'"));
    SubdivisionRule::from_specs(
        "flap",
        vec![A, B, C, D],
        labels("A B C D"),
        tiles,
        2.0,
        &point_labels,
    )
}
