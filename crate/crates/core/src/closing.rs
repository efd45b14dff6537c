//! Gaps of periodic orbits and the closing procedures: a shortest-cycle search
//! near a forward-invariant set, local closing of almost-periodic segments, and
//! the recursion that trades period for gap.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, ModelPoint, RatioReport};
use crate::plane;
use crate::potential::Cylinders;
use crate::subdivision::{Star, SubdivisionRule};
use crate::symbolic::{InfiniteWord, TileWord, TransitionMatrix};

pub use crate::symbolic::PeriodicOrbit;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapSpec {
    pub r: f64,
    pub theta: f64,
}

impl GapSpec {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && theta > 0.0) {
            return Err(Error::Contract(format!("gap spec needs r, theta > 0, got {r}, {theta}")));
        }
        Ok(GapSpec { r, theta })
    }
}

/// `Δ(O)`, with `+∞` for a fixed point.
pub fn gap(orbit: &PeriodicOrbit) -> f64 {
    orbit.gap_value()
}

/// `min(r, θ Δ(O))`.
pub fn r_theta_gap(orbit: &PeriodicOrbit, spec: &GapSpec) -> f64 {
    spec.r.min(spec.theta * gap(orbit))
}

/// Sample points of a tile: corners, side points and center.
fn tile_samples(face: usize, star: &Star) -> Vec<ModelPoint> {
    star.corners
        .iter()
        .chain(&star.mids)
        .chain(std::iter::once(&star.center))
        .map(|&p| ModelPoint::new(face, p))
        .collect()
}

/// Distance from `x` to the tile: zero inside, else to the nearest boundary
/// sample or segment.
fn distance_to_tile(rule: &SubdivisionRule, x: &ModelPoint, face: usize, star: &Star) -> f64 {
    let x = rule.canonical(*x);
    let on_curve = x.face == 0 && rule.on_curve(x.coords);
    if (x.face == face || on_curve) && star.contains(x.coords, 1e-12) {
        return 0.0;
    }
    let b = star.boundary();
    if x.face == face || on_curve {
        return plane::polygon_distance(&b, x.coords);
    }
    b.iter()
        .map(|&p| geometry::model_distance(rule, &x, &ModelPoint::new(face, p)))
        .fold(f64::INFINITY, f64::min)
}

/// Geometry of the level-`n` tiles, indexed by cylinder node.
struct TileGeometry {
    faces: Vec<usize>,
    stars: Vec<Star>,
}

impl TileGeometry {
    fn new(rule: &SubdivisionRule, cyl: &Cylinders) -> Self {
        TileGeometry {
            faces: cyl.graph.words.iter().map(|w| geometry::word_face(rule, w)).collect(),
            stars: cyl.graph.words.iter().map(|w| geometry::tile_star(rule, w)).collect(),
        }
    }

    fn dist_to_set(&self, rule: &SubdivisionRule, x: &ModelPoint, set: &[usize]) -> f64 {
        set.iter()
            .map(|&k| distance_to_tile(rule, x, self.faces[k], &self.stars[k]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Distance from a point to the union of the tiles of `k_words`.
pub fn distance_to_words(rule: &SubdivisionRule, cyl: &Cylinders, x: &ModelPoint, k_words: &[usize]) -> f64 {
    k_words
        .iter()
        .map(|&k| {
            let w = &cyl.graph.words[k];
            distance_to_tile(rule, x, geometry::word_face(rule, w), &geometry::tile_star(rule, w))
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, Serialize)]
pub struct BqResult {
    pub orbit: PeriodicOrbit,
    /// Node ids of the closed walk.
    pub cycle: Vec<usize>,
    /// `(1/ε)^κ`.
    pub period_bound: f64,
    /// Number of words whose tiles meet the ε-neighborhood.
    pub neighborhood_size: usize,
}

/// Shortest closed walk among the words of `k_words`, or failing that among
/// words whose tiles come within `epsilon` of them; least in node order among
/// the shortest.
pub fn bq_search(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    k_words: &[usize],
    kappa: f64,
    epsilon: f64,
) -> Result<BqResult> {
    if k_words.is_empty() {
        return Err(Error::Contract("empty K".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Contract(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let g = &cyl.graph;
    let n = g.node_count();
    let geo = TileGeometry::new(rule, cyl);
    let k_samples: Vec<Vec<ModelPoint>> = k_words
        .iter()
        .map(|&k| tile_samples(geo.faces[k], &geo.stars[k]))
        .collect();
    let mut inside = vec![false; n];
    for &k in k_words {
        inside[k] = true;
    }
    for v in 0..n {
        if inside[v] {
            continue;
        }
        let samples = tile_samples(geo.faces[v], &geo.stars[v]);
        inside[v] = k_samples.iter().any(|ks| {
            ks.iter().any(|a| {
                samples
                    .iter()
                    .any(|b| geometry::model_distance(rule, a, b) <= epsilon)
            })
        });
    }
    let neighborhood_size = inside.iter().filter(|&&b| b).count();
    let period_bound = (1.0 / epsilon).powf(kappa);
    // a cycle inside K itself needs none of the ε slack
    let mut in_k = vec![false; n];
    for &k in k_words {
        in_k[k] = true;
    }
    let cycle = shortest_cycle(g, &in_k)
        .filter(|c| (primitive_len(g, c) as f64) < period_bound)
        .or_else(|| shortest_cycle(g, &inside))
        .ok_or_else(|| {
        Error::SearchFailed(format!(
            "no closed walk among the {neighborhood_size} words near K"
        ))
    })?;
    let syms: Vec<u16> = cycle.iter().map(|&v| g.words[v].symbols()[0]).collect();
    let orbit = PeriodicOrbit::from_symbols(rule, &syms)?;
    if (orbit.period as f64) >= period_bound {
        return Err(Error::SearchFailed(format!(
            "smallest cycle found has period {} >= (1/ε)^κ = {period_bound}",
            orbit.period
        )));
    }
    Ok(BqResult {
        orbit,
        cycle,
        period_bound,
        neighborhood_size,
    })
}

fn primitive_len(g: &crate::symbolic::CylinderGraph, cycle: &[usize]) -> usize {
    let syms: Vec<u16> = cycle.iter().map(|&v| g.words[v].symbols()[0]).collect();
    crate::symbolic::primitive_period(&syms)
}

/// Shortest cycle in the subgraph induced by `allowed`, ties broken by the
/// cycle's node sequence starting at its least node.
pub(crate) fn shortest_cycle(g: &crate::symbolic::CylinderGraph, allowed: &[bool]) -> Option<Vec<usize>> {
    let n = g.node_count();
    let mut best: Option<Vec<usize>> = None;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut touched = Vec::new();
    for s in (0..n).filter(|&s| allowed[s]) {
        // only cycles whose least node is s
        for &t in &touched {
            dist[t] = usize::MAX;
        }
        touched.clear();
        dist[s] = 0;
        touched.push(s);
        let mut queue = VecDeque::from([s]);
        let limit = best.as_ref().map_or(usize::MAX, Vec::len);
        let mut found: Option<Vec<usize>> = None;
        'bfs: while let Some(v) = queue.pop_front() {
            if dist[v] + 1 > limit {
                break;
            }
            for &w in g.successors(v) {
                if w == s {
                    let mut c = vec![v];
                    let mut cur = v;
                    while cur != s {
                        cur = parent[cur];
                        c.push(cur);
                    }
                    c.reverse();
                    found = Some(c);
                    break 'bfs;
                }
                if w > s && allowed[w] && dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    touched.push(w);
                    queue.push_back(w);
                }
            }
        }
        if let Some(c) = found {
            let better = match &best {
                None => true,
                Some(b) => c.len() < b.len() || (c.len() == b.len() && c < *b),
            };
            if better {
                best = Some(c);
            }
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct ShadowReport {
    pub l: usize,
    pub delta: f64,
    /// `d(x, f^l x)` of the input segment.
    pub closing_defect: f64,
    /// `d(f^i x, f^i y)` for `i = 0..=l`.
    pub distances: Vec<f64>,
    /// Least-squares slope of `log d_i` against `l - i`.
    pub slope: f64,
    /// Smallest `β` with `d_i <= β δ Λ^{-(l-i)}` for all `i`.
    pub beta: f64,
    /// Number of trailing symbols replaced to make the word close.
    pub repaired: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnosovResult {
    pub orbit: PeriodicOrbit,
    pub shadow: ShadowReport,
}

/// Closes the first `l` symbols of `word` into a periodic orbit shadowing the
/// point `x = π(word·…)` for `l` steps.
///
/// `word` must be longer than `l`; the symbols after position `l` describe
/// `f^l(x)`, which should be within `delta` of `x`. Orbit points of the segment
/// must stay `eta` away from the critical points (measured from their
/// `(len - l)`-tiles).
pub fn local_anosov_close(
    rule: &SubdivisionRule,
    a: &TransitionMatrix,
    word: &TileWord,
    l: usize,
    delta: f64,
    eta: f64,
) -> Result<AnosovResult> {
    let syms = word.symbols();
    if l == 0 || syms.len() <= l {
        return Err(Error::Contract(format!(
            "segment length {l} needs a longer word (got {})",
            syms.len()
        )));
    }
    if !a.is_admissible(syms) {
        return Err(Error::Contract("inadmissible word".into()));
    }
    let ext = a.canonical_extension(word);
    let mut orbit_x = Vec::with_capacity(l + 1);
    let mut cur = ext.clone();
    for _ in 0..=l {
        orbit_x.push(geometry::address_to_point(rule, &cur)?);
        cur = cur.shift();
    }
    let defect = geometry::model_distance(rule, &orbit_x[0], &orbit_x[l]);
    if defect > delta {
        return Err(Error::Precondition(format!(
            "segment does not almost close: d(x, f^l x) = {defect:e} > delta = {delta:e}"
        )));
    }
    if eta > 0.0 {
        let depth = syms.len() - l;
        let crit: Vec<ModelPoint> = rule.critical_vertices().iter().map(|v| v.point).collect();
        for i in 0..l {
            let w = TileWord::new(syms[i..i + depth].to_vec());
            let face = geometry::word_face(rule, &w);
            let star = geometry::tile_star(rule, &w);
            for c in &crit {
                if distance_to_tile(rule, c, face, &star) < eta {
                    return Err(Error::Precondition(format!(
                        "orbit point {i} comes within {eta} of a critical point"
                    )));
                }
            }
        }
    }
    let (closed, repaired) = close_word(a, &syms[..l])?;
    let orbit = PeriodicOrbit::from_symbols(rule, &closed)?;
    let mut ycur = InfiniteWord::periodic(closed.clone());
    let mut distances = Vec::with_capacity(l + 1);
    for x in orbit_x.iter() {
        let y = geometry::address_to_point(rule, &ycur)?;
        distances.push(geometry::model_distance(rule, x, &y));
        ycur = ycur.shift();
    }
    let lambda = rule.lambda;
    let slope = fit_slope(&distances);
    let beta = if delta > 0.0 {
        distances
            .iter()
            .enumerate()
            .map(|(i, d)| d * lambda.powi((l - i) as i32) / delta)
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(AnosovResult {
        orbit,
        shadow: ShadowReport {
            l,
            delta,
            closing_defect: defect,
            distances,
            slope,
            beta,
            repaired,
        },
    })
}

/// Least-squares slope of `log d_i` against `l - i` over positive distances.
fn fit_slope(d: &[f64]) -> f64 {
    let l = d.len() - 1;
    let pts: Vec<(f64, f64)> = d
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, &x)| ((l - i) as f64, x.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Makes `seg` close up, replacing as few trailing symbols as possible; among
/// replacements of that length the lexicographically least wins.
fn close_word(a: &TransitionMatrix, seg: &[u16]) -> Result<(Vec<u16>, usize)> {
    let l = seg.len();
    if a.admissible(seg[l - 1], seg[0]) {
        return Ok((seg.to_vec(), 0));
    }
    for j in 1..l {
        let keep = &seg[..l - j];
        if let Some(u) = least_path(a, *keep.last().unwrap(), seg[0], j) {
            let mut out = keep.to_vec();
            out.extend(u);
            return Ok((out, j));
        }
    }
    Err(Error::SearchFailed("segment cannot be closed at this length".into()))
}

/// Lexicographically least `u` of length `j` with `from · u · to` admissible.
fn least_path(a: &TransitionMatrix, from: u16, to: u16, j: usize) -> Option<Vec<u16>> {
    // reach[k][s]: s can be followed by k more symbols ending before `to`
    let n = a.len();
    let mut reach = vec![vec![false; n]; j + 1];
    for s in 0..n {
        reach[0][s] = a.admissible(s as u16, to);
    }
    for k in 1..=j {
        for s in 0..n {
            reach[k][s] = a.successors(s as u16).iter().any(|&t| reach[k - 1][t as usize]);
        }
    }
    let mut out = Vec::with_capacity(j);
    let mut s = from;
    for k in (0..j).rev() {
        let next = *a.successors(s).iter().find(|&&t| reach[k][t as usize])?;
        out.push(next);
        s = next;
    }
    Some(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStep {
    pub period: usize,
    pub gap: Option<f64>,
    /// `Σ d(x, K)^α`.
    pub lhs: f64,
    /// `τ Δ_{r,θ}(O)^α`.
    pub rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GapBoundResult {
    pub orbit: PeriodicOrbit,
    pub trace: Vec<GapStep>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapBoundConfig {
    pub spec: GapSpec,
    pub alpha: f64,
    pub tau: f64,
    pub kappa: f64,
    pub epsilon: f64,
}

/// Starts from the shortest-cycle orbit near `K` and recursively shortens it
/// until `Σ d(x,K)^α <= τ Δ_{r,θ}(O)^α`.
pub fn bound_by_gap(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    k_words: &[usize],
    cfg: &GapBoundConfig,
) -> Result<GapBoundResult> {
    let start = bq_search(rule, cyl, k_words, cfg.kappa, cfg.epsilon)?;
    bound_by_gap_from(rule, cyl, k_words, start.orbit, cfg)
}

/// The same recursion from a given starting orbit.
pub fn bound_by_gap_from(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    k_words: &[usize],
    start: PeriodicOrbit,
    cfg: &GapBoundConfig,
) -> Result<GapBoundResult> {
    if k_words.is_empty() {
        return Err(Error::Contract("empty K".into()));
    }
    let geo = TileGeometry::new(rule, cyl);
    let max_steps = (start.period as f64).log2().floor() as usize + 2;
    let mut orbit = start;
    let mut trace = Vec::new();
    loop {
        let lhs: f64 = orbit
            .points
            .iter()
            .map(|x| geo.dist_to_set(rule, x, k_words).powf(cfg.alpha))
            .sum();
        let rhs = cfg.tau * r_theta_gap(&orbit, &cfg.spec).powf(cfg.alpha);
        trace.push(GapStep {
            period: orbit.period,
            gap: orbit.gap,
            lhs,
            rhs,
        });
        if lhs <= rhs {
            return Ok(GapBoundResult { orbit, trace });
        }
        if trace.len() > max_steps || orbit.period == 1 {
            return Err(Error::SearchFailed(format!(
                "gap recursion did not terminate: {}",
                serde_json::to_string(&trace).unwrap_or_default()
            )));
        }
        orbit = shorten(rule, cyl, &orbit)?;
    }
}

/// Closes the segment between the closest pair `x_i`, `x_{i+n}` with `n <= p/2`.
/// Pairs whose segment admits no closed word of length `n` are skipped in
/// favor of the next closest.
fn shorten(rule: &SubdivisionRule, cyl: &Cylinders, orbit: &PeriodicOrbit) -> Result<PeriodicOrbit> {
    let p = orbit.period;
    let mut pairs = Vec::new();
    for i in 0..p {
        for n in 1..=p / 2 {
            let d = geometry::model_distance(rule, &orbit.points[i], &orbit.points[(i + n) % p]);
            pairs.push((d, i, n));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let w = orbit.word.symbols();
    let depth = cyl.graph.level;
    let mut last_err = None;
    for (d, i, n) in pairs {
        let seg: Vec<u16> = (0..n + depth).map(|k| w[(i + k) % p]).collect();
        match local_anosov_close(rule, &cyl.transition, &TileWord::new(seg), n, d * (1.0 + 1e-9) + 1e-300, 0.0) {
            Ok(closed) => return Ok(closed.orbit),
            Err(e @ Error::SearchFailed(_)) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or_else(|| Error::SearchFailed("orbit has no pair to close".into())))
}

/// Empirical `C_2` in `C_2 Λ^n d(x,y) <= d(f^n x, f^n y) <= C_2^{-1} Λ^n d(x,y)`
/// over pairs whose first `n` iterates stay `eta` away from the critical points.
pub fn uniform_expansion_check(
    rule: &SubdivisionRule,
    samples: &[(ModelPoint, ModelPoint)],
    eta: f64,
    n: usize,
) -> (RatioReport, f64) {
    let crit: Vec<ModelPoint> = rule.critical_vertices().iter().map(|v| v.point).collect();
    let far = |p: &ModelPoint| crit.iter().all(|c| geometry::model_distance(rule, p, c) >= eta);
    let scale = rule.lambda.powi(n as i32);
    let mut ratios = Vec::new();
    let mut excluded = 0;
    for (x, y) in samples {
        let d0 = geometry::model_distance(rule, x, y);
        let (mut a, mut b) = (*x, *y);
        let mut ok = d0 > 0.0;
        for _ in 0..n {
            if !ok || !far(&a) || !far(&b) {
                ok = false;
                break;
            }
            a = geometry::apply_map(rule, &a);
            b = geometry::apply_map(rule, &b);
        }
        if !ok {
            excluded += 1;
            continue;
        }
        ratios.push(geometry::model_distance(rule, &a, &b) / (scale * d0));
    }
    let report = RatioReport::from_ratios(ratios, excluded);
    let c2 = if report.samples == 0 {
        f64::NAN
    } else {
        report.min.min(1.0 / report.max)
    };
    (report, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::load_builtin;

    fn setup(n: usize) -> (SubdivisionRule, Cylinders) {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cyl = Cylinders::new(&rule, n).unwrap();
        (rule, cyl)
    }

    #[test]
    fn gap_formulas() {
        let (rule, _) = setup(1);
        let fixed = PeriodicOrbit::from_symbols(&rule, &[2]).unwrap();
        assert_eq!(gap(&fixed), f64::INFINITY);
        let spec = GapSpec::new(1.0, 0.1).unwrap();
        assert_eq!(r_theta_gap(&fixed, &spec), 1.0);
        let mut two = PeriodicOrbit::from_symbols(&rule, &[1, 5]).unwrap();
        two.gap = Some(0.5);
        assert!((r_theta_gap(&two, &spec) - 0.05).abs() < 1e-15);
        assert_eq!(r_theta_gap(&two, &GapSpec::new(0.01, 0.1).unwrap()), 0.01);
    }

    #[test]
    fn bq_finds_the_fixed_point_in_k() {
        let (rule, cyl) = setup(3);
        let v = cyl.graph.node_of(&TileWord::new(vec![2, 2, 2])).unwrap();
        let r = bq_search(&rule, &cyl, &[v], 2.0, 0.05).unwrap();
        assert_eq!(r.orbit.period, 1);
        assert_eq!(r.cycle, vec![v]);
    }

    #[test]
    fn closable_segment_decays_at_rate_lambda() {
        let (rule, cyl) = setup(2);
        // x agrees with (0 2 3 6)^∞ on 6 more symbols after one period
        let u = [0u16, 1, 5, 2];
        let mut w: Vec<u16> = u.iter().chain(u.iter()).copied().collect();
        w.extend([3, 6, 5, 1]);
        assert!(cyl.transition.is_admissible(&w));
        let r = local_anosov_close(&rule, &cyl.transition, &TileWord::new(w), 4, 1.0, 0.0).unwrap();
        assert_eq!(r.shadow.repaired, 0);
        assert!((r.shadow.slope + 2f64.ln()).abs() < 1e-6, "{:?}", r.shadow);
    }

    #[test]
    fn repair_replaces_the_tail() {
        let (rule, cyl) = setup(1);
        let a = &cyl.transition;
        // 0 -> 1 is admissible but 1 -> 0 is not
        let (closed, j) = close_word(a, &[0, 1]).unwrap();
        assert_eq!(j, 1);
        assert!(a.admissible(closed[1], closed[0]));
        let _ = rule;
    }

    #[test]
    fn pillow_expansion_is_exact_away_from_vertices() {
        let (rule, _) = setup(1);
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let pairs = geometry::sample_pairs_in_tiles(&rule, 6, 300, &mut rng);
        let (rep, c2) = uniform_expansion_check(&rule, &pairs, 0.0, 3);
        assert!(rep.samples > 250);
        assert!((c2 - 1.0).abs() < 1e-9, "{rep:?}");
    }
}
