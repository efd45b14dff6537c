//! Small planar helpers shared by the chart and metric code.

pub type P2 = [f64; 2];

#[inline]
pub fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: P2, s: f64) -> P2 {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn lerp(a: P2, b: P2, t: f64) -> P2 {
    [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t]
}

#[inline]
pub fn midpoint(a: P2, b: P2) -> P2 {
    lerp(a, b, 0.5)
}

#[inline]
pub fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn dist(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn centroid(points: &[P2]) -> P2 {
    let n = points.len() as f64;
    let s = points.iter().fold([0.0, 0.0], |acc, p| add(acc, *p));
    scale(s, 1.0 / n)
}

/// Signed area, positive for counterclockwise vertex order.
pub fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

/// Barycentric coordinates of `p` with respect to triangle `t`.
pub fn barycentric(t: &[P2; 3], p: P2) -> [f64; 3] {
    let d = cross(sub(t[1], t[0]), sub(t[2], t[0]));
    let l1 = cross(sub(p, t[0]), sub(t[2], t[0])) / d;
    let l2 = cross(sub(t[1], t[0]), sub(p, t[0])) / d;
    [1.0 - l1 - l2, l1, l2]
}

/// Euclidean distance from `p` to segment `ab`.
pub fn point_segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    if len2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0);
    dist(p, lerp(a, b, t))
}

/// Distance from `p` to the boundary of a closed polygon.
pub fn boundary_distance(poly: &[P2], p: P2) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Even-odd point-in-polygon test; points within `tol` of the boundary count as inside.
pub fn polygon_contains(poly: &[P2], p: P2, tol: f64) -> bool {
    if boundary_distance(poly, p) <= tol {
        return true;
    }
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to a closed polygon region (zero inside).
pub fn polygon_distance(poly: &[P2], p: P2) -> f64 {
    if polygon_contains(poly, p, 0.0) {
        0.0
    } else {
        boundary_distance(poly, p)
    }
}

/// Nearest point of a closed convex polygon to `p`.
pub fn clamp_to_convex(poly: &[P2], p: P2) -> P2 {
    if polygon_contains(poly, p, 0.0) {
        return p;
    }
    let n = poly.len();
    let mut best = poly[0];
    let mut best_d = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let ab = sub(b, a);
        let len2 = dot(ab, ab);
        let t = if len2 == 0.0 {
            0.0
        } else {
            (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0)
        };
        let q = lerp(a, b, t);
        let d = dist(p, q);
        if d < best_d {
            best_d = d;
            best = q;
        }
    }
    best
}

/// Planar affine map `x -> m x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub m: [[f64; 2]; 2],
    pub t: P2,
}

impl Affine {
    pub fn identity() -> Self {
        Affine {
            m: [[1.0, 0.0], [0.0, 1.0]],
            t: [0.0, 0.0],
        }
    }

    /// The unique affine map sending triangle `src` onto triangle `dst` vertexwise.
    pub fn from_triangles(src: &[P2; 3], dst: &[P2; 3]) -> Option<Self> {
        let s1 = sub(src[1], src[0]);
        let s2 = sub(src[2], src[0]);
        let det = cross(s1, s2);
        if det.abs() < 1e-300 {
            return None;
        }
        let d1 = sub(dst[1], dst[0]);
        let d2 = sub(dst[2], dst[0]);
        // M [s1 s2] = [d1 d2]  =>  M = [d1 d2] [s1 s2]^{-1}
        let inv = [[s2[1] / det, -s2[0] / det], [-s1[1] / det, s1[0] / det]];
        let m = [
            [
                d1[0] * inv[0][0] + d2[0] * inv[1][0],
                d1[0] * inv[0][1] + d2[0] * inv[1][1],
            ],
            [
                d1[1] * inv[0][0] + d2[1] * inv[1][0],
                d1[1] * inv[0][1] + d2[1] * inv[1][1],
            ],
        ];
        let t = sub(dst[0], apply_linear(&m, src[0]));
        Some(Affine { m, t })
    }

    #[inline]
    pub fn apply(&self, p: P2) -> P2 {
        add(apply_linear(&self.m, p), self.t)
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.abs() < 1e-300 {
            return None;
        }
        let m = [
            [self.m[1][1] / d, -self.m[0][1] / d],
            [-self.m[1][0] / d, self.m[0][0] / d],
        ];
        let t = scale(apply_linear(&m, self.t), -1.0);
        Some(Affine { m, t })
    }

    /// Largest singular value of the linear part.
    pub fn operator_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.m;
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
        ((s + disc) / 2.0).sqrt()
    }
}

#[inline]
fn apply_linear(m: &[[f64; 2]; 2], p: P2) -> P2 {
    [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_from_triangles_roundtrip() {
        let src = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let dst = [[0.5, 0.5], [0.5, 0.0], [1.0, 0.5]];
        let a = Affine::from_triangles(&src, &dst).unwrap();
        for i in 0..3 {
            let q = a.apply(src[i]);
            assert!(dist(q, dst[i]) < 1e-15);
        }
        let inv = a.inverse().unwrap();
        let p = [0.3, 0.2];
        assert!(dist(inv.apply(a.apply(p)), p) < 1e-15);
        assert!((a.operator_norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polygon_predicates() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(polygon_contains(&sq, [0.5, 0.5], 0.0));
        assert!(polygon_contains(&sq, [1.0, 0.5], 0.0));
        assert!(!polygon_contains(&sq, [1.5, 0.5], 0.0));
        assert_eq!(polygon_distance(&sq, [0.2, 0.3]), 0.0);
        assert!((polygon_distance(&sq, [2.0, 0.5]) - 1.0).abs() < 1e-15);
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
        assert_eq!(clamp_to_convex(&sq, [1.2, 0.5]), [1.0, 0.5]);
    }
}
