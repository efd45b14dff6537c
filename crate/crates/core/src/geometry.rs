//! Points on the model sphere, the map itself, address/point conversion and the
//! distances used downstream: the model path metric, the combinatorial visual
//! quasi-metric, and the chordal metric for the Lattès formula.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plane::{self, P2};
use crate::subdivision::{Star, SubdivisionRule, MATCH_TOL};
use crate::symbolic::{InfiniteWord, TileWord};

/// Containment slack for point location; tile boundaries computed in floating
/// point are off by a few ulps, amplified by the expansion.
const LOCATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub face: usize,
    pub coords: P2,
}

impl ModelPoint {
    pub fn new(face: usize, coords: P2) -> Self {
        ModelPoint { face, coords }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct VisualMetricConfig {
    pub lambda: f64,
    pub max_level: u32,
}

impl VisualMetricConfig {
    pub fn new(lambda: f64, max_level: u32) -> Result<Self> {
        if !(lambda > 1.0) {
            return Err(Error::Contract(format!("lambda must exceed 1, got {lambda}")));
        }
        Ok(VisualMetricConfig { lambda, max_level })
    }
}

/// Which distance a downstream computation uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Metric {
    /// Path metric on the doubled model polygon.
    Model,
    /// Combinatorial `lambda^-m` quasi-metric.
    Visual { lambda: f64, max_level: u32 },
}

impl Metric {
    pub fn distance(&self, rule: &SubdivisionRule, x: &ModelPoint, y: &ModelPoint) -> f64 {
        match *self {
            Metric::Model => model_distance(rule, x, y),
            Metric::Visual { lambda, max_level } => {
                visual_distance(rule, x, y, &VisualMetricConfig { lambda, max_level })
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Model => "model",
            Metric::Visual { .. } => "visual",
        }
    }
}

/// Length of the shortest path on the two glued copies of the model polygon.
///
/// On one face this is the Euclidean distance (the faces are convex and the
/// folding projection is 1-Lipschitz). Between faces the path crosses the
/// common boundary once at the best point.
pub fn model_distance(rule: &SubdivisionRule, x: &ModelPoint, y: &ModelPoint) -> f64 {
    let x = rule.canonical(*x);
    let y = rule.canonical(*y);
    let on_x = x.face == 0 && rule.on_curve(x.coords);
    let on_y = y.face == 0 && rule.on_curve(y.coords);
    if x.face == y.face || on_x || on_y {
        return plane::dist(x.coords, y.coords);
    }
    let poly = rule.polygon();
    let n = poly.len();
    (0..n)
        .map(|i| crossing_length(x.coords, y.coords, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// min over b on segment [a0,a1] of |p-b| + |b-q|, for p, q on the same side.
fn crossing_length(p: P2, q: P2, a0: P2, a1: P2) -> f64 {
    let dir = plane::sub(a1, a0);
    let len2 = plane::dot(dir, dir);
    // reflect q across the line through a0, a1
    let t = plane::dot(plane::sub(q, a0), dir) / len2;
    let foot = plane::lerp(a0, a1, t);
    let q_ref = plane::sub(plane::scale(foot, 2.0), q);
    let cost = |s: f64| {
        let b = plane::lerp(a0, a1, s);
        plane::dist(p, b) + plane::dist(b, q)
    };
    let pq = plane::sub(q_ref, p);
    let denom = plane::cross(dir, pq);
    let mut best = cost(0.0).min(cost(1.0));
    if denom.abs() > 1e-300 {
        let s = plane::cross(plane::sub(p, a0), pq) / denom;
        if (0.0..=1.0).contains(&s) {
            best = best.min(cost(s));
        }
    }
    best
}

/// 1-tiles (ascending id) containing `x`. Points on the invariant curve belong to
/// tiles on both faces.
pub fn containing_one_tiles(rule: &SubdivisionRule, x: &ModelPoint) -> Vec<usize> {
    let x = rule.canonical(*x);
    let faces: &[usize] = if x.face == 0 && rule.on_curve(x.coords) {
        &[0, 1]
    } else if x.face == 0 {
        &[0]
    } else {
        &[1]
    };
    let mut out: Vec<usize> = faces
        .iter()
        .flat_map(|&f| rule.tiles_in(f).iter().copied())
        .filter(|&t| rule.one_tiles[t].star.contains(x.coords, LOCATE_TOL))
        .collect();
    out.sort_unstable();
    out
}

/// 1-tiles located in `face` that contain `p`; falls back to the nearest tile.
fn tiles_in_face_containing(rule: &SubdivisionRule, face: usize, p: P2) -> Vec<usize> {
    let ids = rule.tiles_in(face);
    let hits: Vec<usize> = ids
        .iter()
        .copied()
        .filter(|&t| rule.one_tiles[t].star.contains(p, LOCATE_TOL))
        .collect();
    if !hits.is_empty() {
        return hits;
    }
    let nearest = ids
        .iter()
        .copied()
        .min_by(|&a, &b| {
            let da = plane::polygon_distance(&rule.one_tiles[a].star.boundary(), p);
            let db = plane::polygon_distance(&rule.one_tiles[b].star.boundary(), p);
            da.total_cmp(&db)
        })
        .expect("every face holds tiles");
    vec![nearest]
}

fn settle(rule: &SubdivisionRule, face: usize, p: P2) -> ModelPoint {
    let q = plane::clamp_to_convex(rule.polygon(), p);
    rule.canonical(ModelPoint::new(face, q))
}

/// Applies the map on 1-tile `tile` to a point of that tile.
pub fn apply_branch(rule: &SubdivisionRule, tile: usize, x: &ModelPoint) -> ModelPoint {
    let t = &rule.one_tiles[tile];
    settle(rule, t.color.face(), t.chart.invert(x.coords))
}

/// The map `f` itself.
pub fn apply_map(rule: &SubdivisionRule, x: &ModelPoint) -> ModelPoint {
    let x = rule.canonical(*x);
    let tile = tiles_in_face_containing(rule, x.face, x.coords)[0];
    apply_branch(rule, tile, &x)
}

/// `f^n(x)`.
pub fn iterate_map(rule: &SubdivisionRule, x: &ModelPoint, n: usize) -> ModelPoint {
    let mut p = *x;
    for _ in 0..n {
        p = apply_map(rule, &p);
    }
    p
}

/// Address of the level-`n` tile containing `x`; on boundaries the
/// lexicographically least address (equivalently the least tile id) wins.
pub fn point_to_address(rule: &SubdivisionRule, x: &ModelPoint, n: usize) -> TileWord {
    let x = rule.canonical(*x);
    let mut word = Vec::with_capacity(n);
    if n == 0 {
        return TileWord::new(word);
    }
    let first = containing_one_tiles(rule, &x);
    let mut tile = match first.first() {
        Some(&t) => t,
        None => tiles_in_face_containing(rule, x.face, x.coords)[0],
    };
    let mut p = x;
    loop {
        word.push(tile as u16);
        if word.len() == n {
            break;
        }
        p = apply_branch(rule, tile, &p);
        let face = rule.one_tiles[tile].color.face();
        tile = tiles_in_face_containing(rule, face, p.coords)[0];
    }
    TileWord::new(word)
}

/// Addresses of every level-`n` tile containing `x`, ascending.
pub fn point_to_addresses_all(rule: &SubdivisionRule, x: &ModelPoint, n: usize) -> Vec<TileWord> {
    let x = rule.canonical(*x);
    if n == 0 {
        let mut out = vec![TileWord::new(vec![])];
        if x.face == 0 && rule.on_curve(x.coords) {
            out.push(TileWord::new(vec![]));
        }
        return out;
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    for t in containing_one_tiles(rule, &x) {
        collect_addresses(rule, t, &x, n, &mut prefix, &mut out);
    }
    out
}

fn collect_addresses(
    rule: &SubdivisionRule,
    tile: usize,
    p: &ModelPoint,
    n: usize,
    prefix: &mut Vec<u16>,
    out: &mut Vec<TileWord>,
) {
    prefix.push(tile as u16);
    if prefix.len() == n {
        out.push(TileWord::new(prefix.clone()));
    } else {
        let q = apply_branch(rule, tile, p);
        let face = rule.one_tiles[tile].color.face();
        for &t in rule.tiles_in(face) {
            if rule.one_tiles[t].star.contains(q.coords, LOCATE_TOL) {
                collect_addresses(rule, t, &q, n, prefix, out);
            }
        }
    }
    prefix.pop();
}

/// Star of the tile addressed by a finite word (the composed inverse branches
/// applied to the star of its image face). The empty word gives face 0.
pub fn tile_star(rule: &SubdivisionRule, word: &TileWord) -> Star {
    let syms = word.symbols();
    let Some(&last) = syms.last() else {
        return rule.faces[0].star.clone();
    };
    let image = rule.one_tiles[last as usize].color.face();
    let mut star = rule.faces[image].star.clone();
    for &s in syms.iter().rev() {
        let chart = &rule.one_tiles[s as usize].chart;
        star = star.map(|p| chart.apply(p));
    }
    star
}

/// Face a nonempty word's tile lies in.
pub fn word_face(rule: &SubdivisionRule, word: &TileWord) -> usize {
    word.symbols()
        .first()
        .map(|&s| rule.one_tiles[s as usize].location.face())
        .unwrap_or(0)
}

/// Realizes an admissible infinite word as the unique point of its nested tiles.
pub fn address_to_point(rule: &SubdivisionRule, word: &InfiniteWord) -> Result<ModelPoint> {
    word.check_admissible(rule)?;
    let cycle = word.cycle();
    let face = rule.one_tiles[cycle[0] as usize].location.face();
    let charts: Vec<_> = cycle
        .iter()
        .map(|&s| &rule.one_tiles[s as usize].chart)
        .collect();
    let contraction: f64 = charts.iter().map(|c| c.contraction_ratio()).product();
    let mut p = rule.faces[face].star.center;
    let mut converged = false;
    for _ in 0..100_000 {
        let mut q = p;
        for c in charts.iter().rev() {
            q = c.apply(q);
        }
        let step = plane::dist(p, q);
        p = q;
        // remaining error is bounded by step * r / (1 - r)
        if step * contraction / (1.0 - contraction) < 4e-16 * (1.0 + p[0].abs().max(p[1].abs())) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: 100_000,
            residual: f64::NAN,
        });
    }
    for &s in word.prefix().iter().rev() {
        p = rule.one_tiles[s as usize].chart.apply(p);
    }
    let face = word
        .first_symbol()
        .map(|s| rule.one_tiles[s as usize].location.face())
        .unwrap_or(face);
    Ok(settle(rule, face, p))
}

/// Largest level `m <= max_level` with `y` in the level-`m` bouquet of `x`.
pub fn bouquet_level(rule: &SubdivisionRule, x: &ModelPoint, y: &ModelPoint, max_level: u32) -> u32 {
    for m in 1..=max_level {
        if !in_bouquet(rule, x, y, m as usize) {
            return m - 1;
        }
    }
    max_level
}

/// Whether some level-`m` tile containing `x` meets some level-`m` tile
/// containing `y`. Tiles of a cell complex meet exactly when they share a vertex.
pub fn in_bouquet(rule: &SubdivisionRule, x: &ModelPoint, y: &ModelPoint, m: usize) -> bool {
    if m == 0 {
        return true;
    }
    let tx = point_to_addresses_all(rule, x, m);
    let ty = point_to_addresses_all(rule, y, m);
    if tx.iter().any(|a| ty.contains(a)) {
        return true;
    }
    let corners = |w: &TileWord| -> Vec<ModelPoint> {
        let face = word_face(rule, w);
        tile_star(rule, w)
            .corners
            .iter()
            .map(|&c| rule.canonical(ModelPoint::new(face, c)))
            .collect()
    };
    let cx: Vec<Vec<ModelPoint>> = tx.iter().map(corners).collect();
    let cy: Vec<Vec<ModelPoint>> = ty.iter().map(corners).collect();
    cx.iter().any(|a| {
        cy.iter().any(|b| {
            a.iter().any(|p| {
                b.iter()
                    .any(|q| p.face == q.face && plane::dist(p.coords, q.coords) <= MATCH_TOL)
            })
        })
    })
}

/// Combinatorial visual quasi-distance `lambda^-m`, where `m` is the deepest level
/// (capped at `max_level`) whose bouquet around `x` still contains `y`.
///
/// Symmetric only up to one level: swapping the arguments can shift `m` by one.
pub fn visual_distance(
    rule: &SubdivisionRule,
    x: &ModelPoint,
    y: &ModelPoint,
    cfg: &VisualMetricConfig,
) -> f64 {
    let m = bouquet_level(rule, x, y, cfg.max_level);
    cfg.lambda.powi(-(m as i32))
}

/// A point of the Riemann sphere as a normalized homogeneous pair `[num : den]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjPoint {
    pub num: Complex64,
    pub den: Complex64,
}

impl ProjPoint {
    pub fn finite(z: Complex64) -> Self {
        ProjPoint::pair(z, Complex64::new(1.0, 0.0))
    }

    pub fn infinity() -> Self {
        ProjPoint {
            num: Complex64::new(1.0, 0.0),
            den: Complex64::new(0.0, 0.0),
        }
    }

    /// Normalizes so that the larger coordinate has modulus one.
    pub fn pair(num: Complex64, den: Complex64) -> Self {
        let s = num.norm().max(den.norm());
        if s == 0.0 || !s.is_finite() {
            return ProjPoint { num, den };
        }
        ProjPoint {
            num: num / s,
            den: den / s,
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.den.norm() <= 1e-300 * self.num.norm()
    }

    /// Affine coordinate, `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_infinity() {
            None
        } else {
            Some(self.num / self.den)
        }
    }
}

/// Chordal distance `2|z-w| / (sqrt(1+|z|^2) sqrt(1+|w|^2))`, in homogeneous form
/// `2|ad - bc| / (|(a,b)| |(c,d)|)`; this covers the point at infinity.
pub fn chordal_distance(z: &ProjPoint, w: &ProjPoint) -> f64 {
    let det = z.num * w.den - z.den * w.num;
    let nz = (z.num.norm_sqr() + z.den.norm_sqr()).sqrt();
    let nw = (w.num.norm_sqr() + w.den.norm_sqr()).sqrt();
    2.0 * det.norm() / (nz * nw)
}

/// The Lattès map `4z(1-z^2)/(1+z^2)^2`, homogenized as
/// `[a:b] -> [4ab(b^2-a^2) : (a^2+b^2)^2]`.
pub fn lattes_eval(z: &ProjPoint) -> ProjPoint {
    let (a, b) = (z.num, z.den);
    let num = 4.0 * a * b * (b * b - a * a);
    let s = a * a + b * b;
    ProjPoint::pair(num, s * s)
}

/// Coefficients (highest degree first) of `4z(1-z^2) - w(1+z^2)^2`, whose roots
/// are the preimages of `w` under the Lattès map.
pub fn lattes_preimage_polynomial(w: Complex64) -> [Complex64; 5] {
    let four = Complex64::new(4.0, 0.0);
    [-w, -four, -2.0 * w, four, -w]
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub samples: usize,
    pub excluded: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    /// Smallest `C >= 1` with every ratio in `[1/C, C]`.
    pub constant: f64,
}

impl RatioReport {
    pub fn from_ratios(mut ratios: Vec<f64>, excluded: usize) -> Self {
        ratios.retain(|r| r.is_finite());
        ratios.sort_by(f64::total_cmp);
        if ratios.is_empty() {
            return RatioReport {
                samples: 0,
                excluded,
                min: f64::NAN,
                median: f64::NAN,
                max: f64::NAN,
                constant: f64::NAN,
            };
        }
        let min = ratios[0];
        let max = *ratios.last().unwrap();
        let median = ratios[ratios.len() / 2];
        RatioReport {
            samples: ratios.len(),
            excluded,
            min,
            median,
            max,
            constant: max.max(1.0 / min).max(1.0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub n: usize,
    pub k: usize,
    pub lambda: f64,
    /// `d(f^n x, f^n y) / d(x, y)` before normalization.
    pub raw: RatioReport,
    /// The same ratios divided by `lambda^n`; `constant` is the empirical `C_0`.
    pub normalized: RatioReport,
}

/// Empirical distortion of `f^n` on pairs lying in common `(n+k)`-tiles.
pub fn metric_distortion_check(
    rule: &SubdivisionRule,
    samples: &[(ModelPoint, ModelPoint)],
    k: usize,
    n: usize,
    lambda: f64,
) -> DistortionReport {
    let mut raw = Vec::with_capacity(samples.len());
    let mut excluded = 0;
    for (x, y) in samples {
        let d0 = model_distance(rule, x, y);
        if d0 == 0.0 {
            excluded += 1;
            continue;
        }
        let dn = model_distance(rule, &iterate_map(rule, x, n), &iterate_map(rule, y, n));
        raw.push(dn / d0);
    }
    let scale = lambda.powi(n as i32);
    let normalized = raw.iter().map(|r| r / scale).collect();
    DistortionReport {
        n,
        k,
        lambda,
        raw: RatioReport::from_ratios(raw, excluded),
        normalized: RatioReport::from_ratios(normalized, excluded),
    }
}

/// Uniform random point of a tile, drawn from a random star triangle weighted by area.
pub fn random_point_in_star<R: Rng + ?Sized>(star: &Star, rng: &mut R) -> P2 {
    let tris = star.triangles();
    let areas: Vec<f64> = tris
        .iter()
        .map(|t| plane::signed_area(&t[..]).abs())
        .collect();
    let total: f64 = areas.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut idx = tris.len() - 1;
    for (i, a) in areas.iter().enumerate() {
        if pick < *a {
            idx = i;
            break;
        }
        pick -= a;
    }
    let (mut u, mut v) = (rng.gen::<f64>(), rng.gen::<f64>());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    let t = tris[idx];
    plane::add(
        t[0],
        plane::add(
            plane::scale(plane::sub(t[1], t[0]), u),
            plane::scale(plane::sub(t[2], t[0]), v),
        ),
    )
}

/// Random pairs of points sharing a level-`level` tile.
pub fn sample_pairs_in_tiles<R: Rng + ?Sized>(
    rule: &SubdivisionRule,
    level: usize,
    count: usize,
    rng: &mut R,
) -> Vec<(ModelPoint, ModelPoint)> {
    let a = crate::symbolic::TransitionMatrix::from_rule(rule);
    (0..count)
        .map(|_| {
            let w = a.random_word(level, rng);
            let face = word_face(rule, &w);
            let star = tile_star(rule, &w);
            (
                ModelPoint::new(face, random_point_in_star(&star, rng)),
                ModelPoint::new(face, random_point_in_star(&star, rng)),
            )
        })
        .collect()
}

/// Uniform random point of the sphere (a random face, then uniform in it).
pub fn random_point<R: Rng + ?Sized>(rule: &SubdivisionRule, rng: &mut R) -> ModelPoint {
    let face = rng.gen_range(0..2);
    ModelPoint::new(face, random_point_in_star(&rule.faces[face].star, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::load_builtin;

    fn c(re: f64, im: f64) -> ProjPoint {
        ProjPoint::finite(Complex64::new(re, im))
    }

    #[test]
    fn chordal_examples() {
        assert!((chordal_distance(&c(0.0, 0.0), &ProjPoint::infinity()) - 2.0).abs() < 1e-15);
        assert_eq!(chordal_distance(&c(0.3, -0.2), &c(0.3, -0.2)), 0.0);
        assert!((chordal_distance(&c(1.0, 0.0), &c(-1.0, 0.0)) - 2.0).abs() < 1e-15);
        let z = Complex64::new(0.7, 0.4);
        let w = Complex64::new(-1.2, 2.0);
        let direct = 2.0 * (z - w).norm()
            / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt());
        assert!((chordal_distance(&ProjPoint::finite(z), &ProjPoint::finite(w)) - direct).abs() < 1e-15);
    }

    #[test]
    fn lattes_examples() {
        assert_eq!(lattes_eval(&c(0.0, 0.0)).to_complex(), Some(Complex64::new(0.0, 0.0)));
        assert_eq!(lattes_eval(&c(1.0, 0.0)).to_complex().unwrap().norm(), 0.0);
        assert!(lattes_eval(&c(0.0, 1.0)).is_infinity());
        assert_eq!(lattes_eval(&ProjPoint::infinity()).to_complex().unwrap().norm(), 0.0);
        let z = Complex64::new(0.3, 0.2);
        let direct = 4.0 * z * (1.0 - z * z) / ((1.0 + z * z) * (1.0 + z * z));
        let got = lattes_eval(&ProjPoint::finite(z)).to_complex().unwrap();
        assert!((got - direct).norm() < 1e-14);
    }

    #[test]
    fn pillow_map_is_the_folded_doubling() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let tri = |t: f64| if t <= 0.5 { 2.0 * t } else { 2.0 - 2.0 * t };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        use rand::SeedableRng;
        for _ in 0..200 {
            let x = random_point(&rule, &mut rng);
            let y = apply_map(&rule, &x);
            let (a, b) = (x.coords[0], x.coords[1]);
            let flips = (a > 0.5) as usize + (b > 0.5) as usize;
            let expect = rule.canonical(ModelPoint::new((x.face + flips) % 2, [tri(a), tri(b)]));
            assert!(model_distance(&rule, &y, &expect) < 1e-12, "{x:?} -> {y:?} vs {expect:?}");
        }
    }

    #[test]
    fn pillow_corner_address_and_fixed_point() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let ll = rule.tile_by_label("LL").unwrap().id as u16;
        let p = address_to_point(&rule, &InfiniteWord::periodic(vec![ll])).unwrap();
        assert_eq!(p.face, 0);
        assert!(plane::dist(p.coords, [0.0, 0.0]) < 1e-14);
        let ur = rule.tile_by_label("UR").unwrap().id as u16;
        let q = address_to_point(&rule, &InfiniteWord::periodic(vec![ur])).unwrap();
        assert!(plane::dist(q.coords, [2.0 / 3.0, 2.0 / 3.0]) < 1e-13);
        assert!(model_distance(&rule, &apply_map(&rule, &q), &q) < 1e-13);
    }

    #[test]
    fn cross_face_distance() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let x = ModelPoint::new(0, [0.5, 0.1]);
        let y = ModelPoint::new(1, [0.5, 0.1]);
        assert!((model_distance(&rule, &x, &y) - 0.2).abs() < 1e-15);
        let x = ModelPoint::new(0, [0.2, 0.1]);
        let y = ModelPoint::new(1, [0.6, 0.3]);
        // best crossing on the bottom edge: reflect y to (0.6, -0.3)
        let expect = plane::dist([0.2, 0.1], [0.6, -0.3]);
        assert!((model_distance(&rule, &x, &y) - expect).abs() < 1e-14);
        assert_eq!(model_distance(&rule, &x, &y), model_distance(&rule, &y, &x));
    }

    #[test]
    fn boundary_points_use_min_id() {
        let rule = load_builtin("pillow_lattes").unwrap();
        // (0.5, 0.25) lies on the edge EF shared by LL (id 0) and LR (id 1)
        let x = ModelPoint::new(0, [0.5, 0.25]);
        assert_eq!(point_to_address(&rule, &x, 1).symbols(), &[0]);
        let all = point_to_addresses_all(&rule, &x, 1);
        assert_eq!(all.len(), 2);
        assert_eq!(point_to_address(&rule, &x, 3), all_min(&point_to_addresses_all(&rule, &x, 3)));
    }

    fn all_min(ws: &[TileWord]) -> TileWord {
        ws.iter().min().unwrap().clone()
    }

    #[test]
    fn visual_distance_examples() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cfg = VisualMetricConfig::new(2.0, 6).unwrap();
        let x = ModelPoint::new(0, [0.1, 0.1]);
        assert_eq!(visual_distance(&rule, &x, &x, &cfg), 2f64.powi(-6));
        // the level-1 tiles of x and y share the vertex F, so y is in U^1(x)
        // but not in U^2(x)
        let y = ModelPoint::new(0, [0.6, 0.6]);
        assert_eq!(visual_distance(&rule, &x, &y, &cfg), 0.5);
        assert!(in_bouquet(&rule, &x, &y, 1));
        assert!(!in_bouquet(&rule, &x, &y, 2));
    }
}
