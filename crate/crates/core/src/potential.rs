//! Potentials: closed forms on the sphere, their level-`n` tables, Birkhoff sums
//! and empirical Hölder data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, Metric, ModelPoint};
use crate::plane;
use crate::subdivision::{refine, SubdivisionRule};
use crate::symbolic::{build_transition, CylinderGraph, PeriodicOrbit, TileWord, TransitionMatrix};

type PointFn = Arc<dyn Fn(&SubdivisionRule, &ModelPoint) -> f64 + Send + Sync>;

/// A potential given by a formula.
#[derive(Clone)]
pub struct ClosedForm {
    pub name: String,
    /// Hölder exponent the formula is meant for.
    pub alpha: f64,
    f: PointFn,
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForm")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .finish()
    }
}

impl ClosedForm {
    pub fn new(
        name: impl Into<String>,
        alpha: f64,
        f: impl Fn(&SubdivisionRule, &ModelPoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        ClosedForm {
            name: name.into(),
            alpha,
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, rule: &SubdivisionRule, x: &ModelPoint) -> f64 {
        (self.f)(rule, x)
    }

    pub fn constant(c: f64) -> Self {
        ClosedForm::new(format!("const:{c}"), 1.0, move |_, _| c)
    }

    /// First model coordinate (the same on both faces).
    pub fn x_coordinate() -> Self {
        ClosedForm::new("x", 1.0, |_, p| p.coords[0])
    }

    pub fn y_coordinate() -> Self {
        ClosedForm::new("y", 1.0, |_, p| p.coords[1])
    }

    pub fn scaled(&self, t: f64) -> Self {
        let f = self.f.clone();
        ClosedForm::new(format!("{t}*({})", self.name), self.alpha, move |r, p| t * f(r, p))
    }

    /// `self + t * other`.
    pub fn plus(&self, t: f64, other: &ClosedForm) -> Self {
        let (f, g) = (self.f.clone(), other.f.clone());
        ClosedForm::new(
            format!("{} + {t}*({})", self.name, other.name),
            self.alpha.min(other.alpha),
            move |r, p| f(r, p) + t * g(r, p),
        )
    }

    /// A random smooth function on the sphere: a low-frequency trigonometric
    /// polynomial shared by both faces, plus a face-dependent bump that vanishes
    /// on the common boundary so the sum stays continuous.
    pub fn random_smooth<R: Rng + ?Sized>(rule: &SubdivisionRule, terms: usize, rng: &mut R) -> Self {
        let poly = rule.polygon();
        let span = poly
            .iter()
            .flat_map(|a| poly.iter().map(move |b| plane::dist(*a, *b)))
            .fold(0.0, f64::max);
        let mut modes = Vec::with_capacity(terms);
        for _ in 0..terms {
            let i = rng.gen_range(0..=3) as f64;
            let j = rng.gen_range(0..=3) as f64;
            let amp = rng.gen_range(-1.0..1.0) / (1.0 + i * i + j * j).sqrt();
            let phase = rng.gen_range(0.0..2.0 * PI);
            modes.push((i, j, amp, phase));
        }
        let bump = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let sx = rng.gen_range(0.0..2.0 * PI);
        let polygon = poly.to_vec();
        ClosedForm::new("smooth", 1.0, move |_, p| {
            let (x, y) = (p.coords[0] / span, p.coords[1] / span);
            let mut v = 0.0;
            for &(i, j, a, ph) in &modes {
                v += a * (2.0 * PI * (i * x + j * y) + ph).cos();
            }
            let d = plane::boundary_distance(&polygon, p.coords) / span;
            v + bump[p.face.min(1)] * 4.0 * d * (1.0 + 0.5 * (2.0 * PI * x + sx).sin())
        })
    }
}

/// Values on level-`n` cylinders, indexed like the nodes of the level-`n`
/// cylinder graph (lexicographic word order).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialTable {
    pub level: usize,
    pub alpha: f64,
    pub values: Vec<f64>,
}

impl PotentialTable {
    pub fn new(level: usize, alpha: f64, values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("table value {i} is not finite")));
        }
        Ok(PotentialTable { level, alpha, values })
    }

    pub fn constant(g: &CylinderGraph, c: f64) -> Self {
        PotentialTable {
            level: g.level,
            alpha: 1.0,
            values: vec![c; g.node_count()],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, t: f64) -> Self {
        PotentialTable {
            values: self.values.iter().map(|v| t * v).collect(),
            ..self.clone()
        }
    }

    /// `self + t * other` at the same level.
    pub fn plus(&self, t: f64, other: &PotentialTable) -> Result<Self> {
        if self.level != other.level || self.len() != other.len() {
            return Err(Error::Contract(format!(
                "tables at levels {} and {} cannot be added",
                self.level, other.level
            )));
        }
        Ok(PotentialTable {
            level: self.level,
            alpha: self.alpha.min(other.alpha),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + t * b)
                .collect(),
        })
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn range(&self) -> f64 {
        self.max() - self.min()
    }

    /// Export keyed by dotted words.
    pub fn to_json(&self, g: &CylinderGraph) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = g
            .words
            .iter()
            .zip(&self.values)
            .map(|(w, v)| (w.to_string(), serde_json::json!(v)))
            .collect();
        serde_json::json!({ "version": 1, "level": self.level, "alpha": self.alpha, "values": map })
    }

    /// Import from the format written by [`PotentialTable::to_json`].
    pub fn from_json(g: &CylinderGraph, value: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::Config(format!("potential table: {m}"));
        let level = value["level"].as_u64().ok_or_else(|| bad("missing level"))? as usize;
        if level != g.level {
            return Err(bad(&format!("level {level} does not match working level {}", g.level)));
        }
        let alpha = value["alpha"].as_f64().unwrap_or(1.0);
        let map = value["values"].as_object().ok_or_else(|| bad("missing values"))?;
        let mut values = vec![f64::NAN; g.node_count()];
        for (k, v) in map {
            let syms: Vec<u16> = k
                .split('.')
                .map(|s| s.parse::<u16>().map_err(|_| bad(&format!("bad word `{k}`"))))
                .collect::<Result<_>>()?;
            let node = g
                .node_of(&TileWord::new(syms))
                .ok_or_else(|| bad(&format!("inadmissible word `{k}`")))?;
            values[node] = v.as_f64().ok_or_else(|| bad(&format!("value for `{k}`")))?;
        }
        PotentialTable::new(level, alpha, values).map_err(|_| bad("some words have no value"))
    }
}

#[derive(Clone, Debug)]
pub enum Potential {
    Closed(ClosedForm),
    Table(PotentialTable),
}

/// Level-`n` cylinders of a rule with their canonical representative points.
#[derive(Clone, Debug)]
pub struct Cylinders {
    pub transition: TransitionMatrix,
    pub graph: CylinderGraph,
    /// `π` of the canonical extension of each word.
    pub reps: Vec<ModelPoint>,
}

impl Cylinders {
    pub fn new(rule: &SubdivisionRule, n: usize) -> Result<Self> {
        let transition = build_transition(rule)?;
        let graph = CylinderGraph::new(&transition, n)?;
        let reps = graph
            .words
            .iter()
            .map(|w| geometry::address_to_point(rule, &transition.canonical_extension(w)))
            .collect::<Result<_>>()?;
        Ok(Cylinders {
            transition,
            graph,
            reps,
        })
    }

    pub fn level(&self) -> usize {
        self.graph.level
    }
}

/// Table of a potential at the level of `cyl`.
///
/// Closed forms are evaluated at the representative points; a table at a lower
/// level is lifted by looking up each word's prefix; a table at this level is
/// returned unchanged.
pub fn discretize(rule: &SubdivisionRule, cyl: &Cylinders, p: &Potential) -> Result<PotentialTable> {
    match p {
        Potential::Closed(c) => PotentialTable::new(
            cyl.level(),
            c.alpha,
            cyl.reps.iter().map(|x| c.eval(rule, x)).collect(),
        ),
        Potential::Table(t) if t.level == cyl.level() => Ok(t.clone()),
        Potential::Table(t) if t.level < cyl.level() && t.level > 0 => {
            let coarse = CylinderGraph::new(&cyl.transition, t.level)?;
            let values = cyl
                .graph
                .words
                .iter()
                .map(|w| {
                    let pre = TileWord::new(w.symbols()[..t.level].to_vec());
                    t.values[coarse.node_of(&pre).expect("prefixes are admissible")]
                })
                .collect();
            PotentialTable::new(cyl.level(), t.alpha, values)
        }
        Potential::Table(t) => Err(Error::Contract(format!(
            "cannot discretize a level-{} table at level {}",
            t.level,
            cyl.level()
        ))),
    }
}

/// `S_n` of a table along a finite word of length at least `n_terms + level - 1`.
pub fn birkhoff_sum_word(g: &CylinderGraph, table: &PotentialTable, word: &[u16], n_terms: usize) -> Result<f64> {
    let l = table.level;
    if n_terms == 0 {
        return Ok(0.0);
    }
    if word.len() < n_terms + l - 1 {
        return Err(Error::Contract(format!(
            "word of length {} is too short for {n_terms} terms at level {l}",
            word.len()
        )));
    }
    let mut s = 0.0;
    for j in 0..n_terms {
        let w = TileWord::new(word[j..j + l].to_vec());
        let node = g
            .node_of(&w)
            .ok_or_else(|| Error::Contract(format!("inadmissible window {w}")))?;
        s += table.values[node];
    }
    Ok(s)
}

/// `S_n` of a table along a periodic orbit, wrapping around its word.
pub fn birkhoff_sum_orbit(
    g: &CylinderGraph,
    table: &PotentialTable,
    orbit: &PeriodicOrbit,
    n_terms: usize,
) -> Result<f64> {
    let w = orbit.word.symbols();
    let unrolled: Vec<u16> = (0..n_terms + table.level).map(|i| w[i % w.len()]).collect();
    birkhoff_sum_word(g, table, &unrolled, n_terms)
}

/// `S_n` of a closed form along `f`-iterates of a point.
pub fn birkhoff_sum_point(rule: &SubdivisionRule, p: &ClosedForm, x: &ModelPoint, n_terms: usize) -> f64 {
    let mut s = 0.0;
    let mut y = *x;
    for j in 0..n_terms {
        s += p.eval(rule, &y);
        if j + 1 < n_terms {
            y = geometry::apply_map(rule, &y);
        }
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    /// A lower bound for the true seminorm.
    pub seminorm_est: f64,
    pub metric: String,
    pub pairs: usize,
}

/// Pairs of level-`n` cylinders whose tiles share a vertex, with the distance
/// between their representative points.
pub fn touching_pairs(rule: &SubdivisionRule, cyl: &Cylinders, metric: &Metric) -> Result<Vec<(usize, usize, f64)>> {
    let decomp = refine(rule, cyl.level())?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for v in &decomp.vertices {
        for (i, &a) in v.tiles.iter().enumerate() {
            for &b in &v.tiles[i + 1..] {
                if !seen.insert((a, b)) {
                    continue;
                }
                let d = metric.distance(rule, &cyl.reps[a], &cyl.reps[b]);
                if d > 0.0 {
                    out.push((a, b, d));
                }
            }
        }
    }
    Ok(out)
}

/// Largest `|Δp| / d^α` over precomputed touching pairs.
pub fn seminorm_over_pairs(table: &PotentialTable, pairs: &[(usize, usize, f64)], alpha: f64) -> f64 {
    pairs
        .iter()
        .map(|&(a, b, d)| (table.values[a] - table.values[b]).abs() / d.powf(alpha))
        .fold(0.0, f64::max)
}

/// Largest `|Δp| / d^α` over pairs of cylinders whose tiles touch, with `d` the
/// distance between their representative points.
pub fn holder_seminorm_estimate(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    table: &PotentialTable,
    alpha: f64,
    metric: &Metric,
) -> Result<HolderEstimate> {
    if table.level != cyl.level() {
        return Err(Error::Contract("table and cylinders differ in level".into()));
    }
    let pairs = touching_pairs(rule, cyl, metric)?;
    Ok(HolderEstimate {
        alpha,
        seminorm_est: seminorm_over_pairs(table, &pairs, alpha),
        metric: metric.name().to_string(),
        pairs: pairs.len(),
    })
}

/// Largest `|p(x) - p(y)| / d(x, y)^α` over sampled pairs; a lower bound.
pub fn sampled_seminorm<R: Rng + ?Sized>(
    rule: &SubdivisionRule,
    p: &ClosedForm,
    alpha: f64,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let mut best: f64 = 0.0;
    for level in 1..=4 {
        for (x, y) in geometry::sample_pairs_in_tiles(rule, level, samples / 4 + 1, rng) {
            let d = geometry::model_distance(rule, &x, &y);
            if d > 0.0 {
                best = best.max((p.eval(rule, &x) - p.eval(rule, &y)).abs() / d.powf(alpha));
            }
        }
    }
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct VariationReport {
    pub n: usize,
    pub m: usize,
    pub samples: usize,
    pub excluded: usize,
    /// Largest `|S_n p(x) - S_n p(y)| / (|p| d(f^n x, f^n y)^α)`.
    pub constant: f64,
}

/// Empirical constant in `|S_n p(x) - S_n p(y)| <= C |p| d(f^n x, f^n y)^α` for
/// pairs in common `m`-tiles, in the model metric.
pub fn variation_bound_check<R: Rng + ?Sized>(
    rule: &SubdivisionRule,
    p: &ClosedForm,
    seminorm: f64,
    n: usize,
    m: usize,
    samples: usize,
    rng: &mut R,
) -> Result<VariationReport> {
    if m < n {
        return Err(Error::Contract(format!("need m >= n, got m = {m}, n = {n}")));
    }
    let mut constant: f64 = 0.0;
    let mut excluded = 0;
    let pairs = geometry::sample_pairs_in_tiles(rule, m, samples, rng);
    for (x, y) in &pairs {
        let fx = geometry::iterate_map(rule, x, n);
        let fy = geometry::iterate_map(rule, y, n);
        let d = geometry::model_distance(rule, &fx, &fy);
        if d <= 0.0 || seminorm <= 0.0 {
            excluded += 1;
            continue;
        }
        let diff = (birkhoff_sum_point(rule, p, x, n) - birkhoff_sum_point(rule, p, y, n)).abs();
        constant = constant.max(diff / (seminorm * d.powf(p.alpha)));
    }
    Ok(VariationReport {
        n,
        m,
        samples: pairs.len(),
        excluded,
        constant,
    })
}

/// `x -> (min over orbit points of d(x, o))^α`.
pub fn distance_potential(orbit: &PeriodicOrbit, alpha: f64, metric: Metric) -> ClosedForm {
    let points = orbit.points.clone();
    ClosedForm::new(
        format!("dist(O_{})^{alpha}", orbit.word),
        alpha,
        move |rule, x| {
            points
                .iter()
                .map(|o| metric.distance(rule, x, o))
                .fold(f64::INFINITY, f64::min)
                .powf(alpha)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::load_builtin;
    use rand::SeedableRng;

    #[test]
    fn constant_and_identity_discretization() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cyl = Cylinders::new(&rule, 2).unwrap();
        let t = discretize(&rule, &cyl, &Potential::Closed(ClosedForm::constant(1.5))).unwrap();
        assert!(t.values.iter().all(|&v| v == 1.5));
        let again = discretize(&rule, &cyl, &Potential::Table(t.clone())).unwrap();
        assert_eq!(again, t);
    }

    #[test]
    fn x_coordinate_level_one() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cyl = Cylinders::new(&rule, 1).unwrap();
        let t = discretize(&rule, &cyl, &Potential::Closed(ClosedForm::x_coordinate())).unwrap();
        assert_eq!(t.len(), 8);
        for (v, x) in t.values.iter().zip(&cyl.reps) {
            assert!((0.0..=1.0).contains(v));
            assert_eq!(*v, x.coords[0]);
        }
        // LL^∞ is the corner A, UR^∞ the fixed point (2/3, 2/3)
        assert!(t.values[0].abs() < 1e-15);
        assert!((t.values[2] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn birkhoff_sums() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cyl = Cylinders::new(&rule, 2).unwrap();
        let t = PotentialTable::constant(&cyl.graph, 0.25);
        let w = cyl.transition.random_word(9, &mut rand_chacha::ChaCha8Rng::seed_from_u64(1));
        assert_eq!(birkhoff_sum_word(&cyl.graph, &t, w.symbols(), 0).unwrap(), 0.0);
        assert_eq!(birkhoff_sum_word(&cyl.graph, &t, w.symbols(), 8).unwrap(), 2.0);
        assert!(birkhoff_sum_word(&cyl.graph, &t, w.symbols(), 9).is_err());
    }

    #[test]
    fn lifting_a_coarse_table() {
        let rule = load_builtin("barycentric").unwrap();
        let c1 = Cylinders::new(&rule, 1).unwrap();
        let c3 = Cylinders::new(&rule, 3).unwrap();
        let t1 = PotentialTable::new(1, 1.0, (0..12).map(|i| i as f64).collect()).unwrap();
        let t3 = discretize(&rule, &c3, &Potential::Table(t1)).unwrap();
        for (w, v) in c3.graph.words.iter().zip(&t3.values) {
            assert_eq!(*v, w.symbols()[0] as f64);
        }
        assert!(discretize(&rule, &c1, &Potential::Table(t3)).is_err());
    }

    #[test]
    fn seminorm_homogeneity() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let cyl = Cylinders::new(&rule, 3).unwrap();
        let t = discretize(&rule, &cyl, &Potential::Closed(ClosedForm::x_coordinate())).unwrap();
        let e = holder_seminorm_estimate(&rule, &cyl, &t, 1.0, &Metric::Model).unwrap();
        assert!(e.seminorm_est > 0.0 && e.pairs > 0);
        let e3 = holder_seminorm_estimate(&rule, &cyl, &t.scaled(-3.0), 1.0, &Metric::Model).unwrap();
        assert!((e3.seminorm_est - 3.0 * e.seminorm_est).abs() < 1e-12);
        let c = PotentialTable::constant(&cyl.graph, 2.0);
        assert_eq!(holder_seminorm_estimate(&rule, &cyl, &c, 1.0, &Metric::Model).unwrap().seminorm_est, 0.0);
    }

    #[test]
    fn json_roundtrip() {
        let rule = load_builtin("flap").unwrap();
        let cyl = Cylinders::new(&rule, 2).unwrap();
        let t = discretize(&rule, &cyl, &Potential::Closed(ClosedForm::y_coordinate())).unwrap();
        let back = PotentialTable::from_json(&cyl.graph, &t.to_json(&cyl.graph)).unwrap();
        assert_eq!(back, t);
    }
}
