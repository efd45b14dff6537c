//! Star-triangulated piecewise-affine charts.
//!
//! Every tile region (and each 0-tile) carries a *star*: a center, its corners
//! indexed by 0-vertex label, and one distinguished point per side. The star
//! splits the region into `2m` triangles `(center, corner_k, mid_k)` and
//! `(center, mid_k, corner_{k+1})`. A chart sends the star of a 0-tile onto the
//! star of a 1-tile triangle by triangle. When all side points are true midpoints
//! and the center is the affine image of the source center, every piece carries
//! the same affine map and the chart is exactly affine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{self, Affine, P2};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Star {
    pub center: P2,
    pub corners: Vec<P2>,
    pub mids: Vec<P2>,
}

impl Star {
    /// Star of a polygon with straight sides; center at the vertex centroid.
    pub fn of_polygon(corners: &[P2]) -> Self {
        let m = corners.len();
        Star {
            center: plane::centroid(corners),
            corners: corners.to_vec(),
            mids: (0..m)
                .map(|k| plane::midpoint(corners[k], corners[(k + 1) % m]))
                .collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.corners.len()
    }

    pub fn triangles(&self) -> Vec<[P2; 3]> {
        let m = self.m();
        let mut out = Vec::with_capacity(2 * m);
        for k in 0..m {
            out.push([self.center, self.corners[k], self.mids[k]]);
            out.push([self.center, self.mids[k], self.corners[(k + 1) % m]]);
        }
        out
    }

    /// Boundary polyline `corner_0, mid_0, corner_1, mid_1, ...`.
    pub fn boundary(&self) -> Vec<P2> {
        let mut out = Vec::with_capacity(2 * self.m());
        for k in 0..self.m() {
            out.push(self.corners[k]);
            out.push(self.mids[k]);
        }
        out
    }

    pub fn map(&self, f: impl Fn(P2) -> P2) -> Star {
        Star {
            center: f(self.center),
            corners: self.corners.iter().map(|&p| f(p)).collect(),
            mids: self.mids.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn contains(&self, p: P2, tol: f64) -> bool {
        plane::polygon_contains(&self.boundary(), p, tol)
    }

    pub fn diameter(&self) -> f64 {
        let b = self.boundary();
        let mut d: f64 = 0.0;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                d = d.max(plane::dist(b[i], b[j]));
            }
        }
        d
    }

    pub fn area(&self) -> f64 {
        plane::signed_area(&self.boundary()).abs()
    }
}

#[derive(Clone, Debug)]
struct Piece {
    src: [P2; 3],
    dst: [P2; 3],
    fwd: Affine,
    inv: Affine,
}

/// Piecewise-affine homeomorphism from a source star onto a target star.
#[derive(Clone, Debug)]
pub struct StarChart {
    pieces: Vec<Piece>,
    affine: Option<Affine>,
    orientation: i8,
}

impl StarChart {
    pub fn new(src: &Star, dst: &Star) -> Result<Self> {
        if src.m() != dst.m() || dst.mids.len() != dst.m() {
            return Err(Error::InvalidRule(format!(
                "star sizes differ: source has {} corners, target {}",
                src.m(),
                dst.m()
            )));
        }
        let mut pieces = Vec::new();
        let mut orientation = 0i8;
        for (s, d) in src.triangles().into_iter().zip(dst.triangles()) {
            let fwd = Affine::from_triangles(&s, &d).ok_or_else(|| {
                Error::InvalidRule("degenerate source triangle in chart".into())
            })?;
            let det = fwd.det();
            if det.abs() < 1e-14 {
                return Err(Error::InvalidRule(
                    "chart piece collapses a triangle".into(),
                ));
            }
            let sign = if det > 0.0 { 1 } else { -1 };
            if orientation == 0 {
                orientation = sign;
            } else if orientation != sign {
                return Err(Error::InvalidRule(
                    "chart pieces have inconsistent orientation (target star is not star-shaped)".into(),
                ));
            }
            let inv = fwd.inverse().expect("nonzero determinant");
            pieces.push(Piece {
                src: s,
                dst: d,
                fwd,
                inv,
            });
        }
        let first = pieces[0].fwd;
        let affine = pieces
            .iter()
            .all(|p| affine_close(&p.fwd, &first))
            .then_some(first);
        Ok(StarChart {
            pieces,
            affine,
            orientation,
        })
    }

    /// Source to target (the inverse branch of the map on this tile).
    pub fn apply(&self, p: P2) -> P2 {
        if let Some(a) = &self.affine {
            return a.apply(p);
        }
        let piece = best_piece(&self.pieces, p, |pc| &pc.src);
        piece.fwd.apply(p)
    }

    /// Target to source (the map itself restricted to this tile).
    pub fn invert(&self, p: P2) -> P2 {
        if self.affine.is_some() {
            return self.pieces[0].inv.apply(p);
        }
        let piece = best_piece(&self.pieces, p, |pc| &pc.dst);
        piece.inv.apply(p)
    }

    /// Largest operator norm over the pieces; a Lipschitz bound for the chart.
    pub fn contraction_ratio(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.fwd.operator_norm())
            .fold(0.0, f64::max)
    }

    pub fn is_affine(&self) -> bool {
        self.affine.is_some()
    }

    /// +1 if the chart preserves planar orientation, -1 otherwise.
    pub fn orientation(&self) -> i8 {
        self.orientation
    }
}

fn affine_close(a: &Affine, b: &Affine) -> bool {
    let mut d: f64 = 0.0;
    for i in 0..2 {
        d = d.max((a.t[i] - b.t[i]).abs());
        for j in 0..2 {
            d = d.max((a.m[i][j] - b.m[i][j]).abs());
        }
    }
    d < 1e-12
}

fn best_piece<'a>(pieces: &'a [Piece], p: P2, tri: impl Fn(&Piece) -> &[P2; 3]) -> &'a Piece {
    let mut best = &pieces[0];
    let mut best_score = f64::NEG_INFINITY;
    for pc in pieces {
        let b = plane::barycentric(tri(pc), p);
        let score = b[0].min(b[1]).min(b[2]);
        if score >= 0.0 {
            return pc;
        }
        if score > best_score {
            best_score = score;
            best = pc;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Star {
        Star::of_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    }

    #[test]
    fn similarity_chart_is_affine() {
        let src = unit_square();
        let dst = src.map(|p| [0.5 * p[0], 0.5 * p[1]]);
        let c = StarChart::new(&src, &dst).unwrap();
        assert!(c.is_affine());
        assert_eq!(c.orientation(), 1);
        assert!((c.contraction_ratio() - 0.5).abs() < 1e-14);
        let p = [0.3, 0.9];
        assert_eq!(c.apply(p), [0.15, 0.45]);
        assert!(plane::dist(c.invert(c.apply(p)), p) < 1e-15);
    }

    #[test]
    fn bent_chart_roundtrips() {
        let src = unit_square();
        let mut dst = src.map(|p| [0.5 * p[0], 0.5 * p[1]]);
        dst.mids[2] = [0.25, 0.4];
        dst.center = [0.25, 0.2];
        let c = StarChart::new(&src, &dst).unwrap();
        assert!(!c.is_affine());
        for &p in &[[0.1, 0.1], [0.5, 0.99], [0.9, 0.3], [0.5, 0.5]] {
            assert!(plane::dist(c.invert(c.apply(p)), p) < 1e-13);
        }
        // side 2 passes through the bend point
        assert!(plane::dist(c.apply([0.5, 1.0]), [0.25, 0.4]) < 1e-15);
    }

    #[test]
    fn non_star_shaped_target_is_rejected() {
        let src = unit_square();
        let mut dst = src.clone();
        dst.center = [2.0, 2.0];
        assert!(StarChart::new(&src, &dst).is_err());
    }
}
