//! The tile subshift: transition matrix, admissible words, the cylinder graph of
//! level-`n` words under the shift, and periodic orbits read off closed walks.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ModelPoint};
use crate::subdivision::SubdivisionRule;

/// Default cap on the number of enumerated words.
pub const WORD_BUDGET: u128 = 2_000_000;

/// A finite admissible sequence of 1-tile ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TileWord(Vec<u16>);

impl TileWord {
    pub fn new(symbols: Vec<u16>) -> Self {
        TileWord(symbols)
    }

    pub fn symbols(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn shift(&self) -> TileWord {
        TileWord(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn into_symbols(self) -> Vec<u16> {
        self.0
    }
}

impl fmt::Display for TileWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// An eventually periodic infinite word `prefix · cycle^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteWord {
    prefix: Vec<u16>,
    cycle: Vec<u16>,
}

impl InfiniteWord {
    pub fn new(prefix: Vec<u16>, cycle: Vec<u16>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Contract("infinite word needs a nonempty cycle".into()));
        }
        Ok(InfiniteWord { prefix, cycle })
    }

    /// `cycle^∞`; panics on an empty cycle.
    pub fn periodic(cycle: Vec<u16>) -> Self {
        assert!(!cycle.is_empty(), "periodic word needs a nonempty cycle");
        InfiniteWord {
            prefix: Vec::new(),
            cycle,
        }
    }

    pub fn prefix(&self) -> &[u16] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u16] {
        &self.cycle
    }

    pub fn first_symbol(&self) -> Option<u16> {
        self.prefix.first().or(self.cycle.first()).copied()
    }

    /// Symbol at position `i`.
    pub fn at(&self, i: usize) -> u16 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// First `n` symbols.
    pub fn truncate(&self, n: usize) -> TileWord {
        TileWord((0..n).map(|i| self.at(i)).collect())
    }

    pub fn shift(&self) -> InfiniteWord {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            InfiniteWord {
                prefix: Vec::new(),
                cycle,
            }
        } else {
            InfiniteWord {
                prefix: self.prefix[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }

    pub fn check_admissible(&self, rule: &SubdivisionRule) -> Result<()> {
        let n = rule.one_tiles.len();
        let admissible = |a: u16, b: u16| {
            rule.one_tiles[a as usize].color == rule.one_tiles[b as usize].location
        };
        if let Some(&s) = self.prefix.iter().chain(&self.cycle).find(|&&s| s as usize >= n) {
            return Err(Error::Contract(format!("symbol {s} is not a 1-tile id")));
        }
        let len = self.prefix.len() + self.cycle.len();
        for i in 0..len {
            let (a, b) = (self.at(i), self.at(i + 1));
            if !admissible(a, b) {
                return Err(Error::Contract(format!(
                    "inadmissible transition {a} -> {b} at position {i}"
                )));
            }
        }
        Ok(())
    }
}

/// `A(X, X') = 1` iff the image face of `X` contains `X'`.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionMatrix {
    pub states: Vec<usize>,
    pub entries: Vec<Vec<u8>>,
    #[serde(skip)]
    succ: Vec<Vec<u16>>,
    #[serde(skip)]
    degree: usize,
}

impl TransitionMatrix {
    /// Builds the matrix without validation.
    pub fn from_rule(rule: &SubdivisionRule) -> Self {
        let n = rule.one_tiles.len();
        let entries: Vec<Vec<u8>> = rule
            .one_tiles
            .iter()
            .map(|x| {
                rule.one_tiles
                    .iter()
                    .map(|y| u8::from(y.location == x.color))
                    .collect()
            })
            .collect();
        let succ = entries
            .iter()
            .map(|row| (0..n as u16).filter(|&j| row[j as usize] == 1).collect())
            .collect();
        TransitionMatrix {
            states: (0..n).collect(),
            entries,
            succ,
            degree: rule.degree,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn admissible(&self, a: u16, b: u16) -> bool {
        self.entries[a as usize][b as usize] == 1
    }

    /// Successor states of `a`, ascending.
    pub fn successors(&self, a: u16) -> &[u16] {
        &self.succ[a as usize]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&e| e as usize).sum())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.len())
            .map(|j| self.entries.iter().map(|r| r[j] as usize).sum())
            .collect()
    }

    pub fn is_admissible(&self, word: &[u16]) -> bool {
        word.iter().all(|&s| (s as usize) < self.len())
            && word.windows(2).all(|w| self.admissible(w[0], w[1]))
    }

    /// Number of closed walks of length `n`, `trace(A^n)`.
    pub fn trace_power(&self, n: usize) -> u128 {
        let k = self.len();
        let mut p: Vec<Vec<u128>> = (0..k)
            .map(|i| (0..k).map(|j| u128::from(i == j)).collect())
            .collect();
        for _ in 0..n {
            let mut q = vec![vec![0u128; k]; k];
            for i in 0..k {
                for l in 0..k {
                    if p[i][l] == 0 {
                        continue;
                    }
                    for &j in &self.succ[l] {
                        q[i][j as usize] += p[i][l];
                    }
                }
            }
            p = q;
        }
        (0..k).map(|i| p[i][i]).sum()
    }

    /// Random admissible word of length `n` (uniform first symbol, then uniform
    /// successors).
    pub fn random_word<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> TileWord {
        let mut w = Vec::with_capacity(n);
        if n == 0 {
            return TileWord(w);
        }
        let mut s = rng.gen_range(0..self.len()) as u16;
        w.push(s);
        while w.len() < n {
            let succ = self.successors(s);
            s = succ[rng.gen_range(0..succ.len())];
            w.push(s);
        }
        TileWord(w)
    }

    /// Canonical infinite extension of a nonempty admissible word.
    ///
    /// Prefers the shortest return path closing the word into a loop, least in
    /// lexicographic order among the shortest, giving `(w u)^∞`. When no return
    /// path exists, extends greedily by least successors until a state repeats.
    pub fn canonical_extension(&self, w: &TileWord) -> InfiniteWord {
        let syms = w.symbols();
        assert!(!syms.is_empty(), "extension of the empty word");
        let first = syms[0];
        let last = *syms.last().unwrap();
        if let Some(path) = self.return_path(last, first) {
            let mut cycle = syms.to_vec();
            cycle.extend(path);
            return InfiniteWord::periodic(cycle);
        }
        let mut seen: HashMap<u16, usize> = HashMap::new();
        let mut tail = Vec::new();
        let mut s = last;
        loop {
            let next = self.successors(s)[0];
            if let Some(&at) = seen.get(&next) {
                let mut prefix = syms.to_vec();
                prefix.extend_from_slice(&tail[..at]);
                let cycle = tail[at..].to_vec();
                return InfiniteWord { prefix, cycle };
            }
            seen.insert(next, tail.len());
            tail.push(next);
            s = next;
        }
    }

    /// Lexicographically least among shortest `u` with `last · u · first` admissible.
    fn return_path(&self, last: u16, first: u16) -> Option<Vec<u16>> {
        if self.admissible(last, first) {
            return Some(Vec::new());
        }
        let k = self.len();
        let mut parent: Vec<Option<u16>> = vec![None; k];
        let mut seen = vec![false; k];
        let mut queue = VecDeque::new();
        for &s in self.successors(last) {
            if !seen[s as usize] {
                seen[s as usize] = true;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            if self.admissible(s, first) {
                let mut path = vec![s];
                let mut cur = s;
                while let Some(p) = parent[cur as usize] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &t in self.successors(s) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    parent[t as usize] = Some(s);
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

/// Builds the transition matrix and checks that every state has exactly `deg`
/// admissible predecessors.
///
/// Row sums count the 1-tiles inside a face, which equals `deg` only when both
/// faces hold the same number of 1-tiles (pillow, barycentric, but not the flap).
/// Column sums always equal `deg`, since exactly `deg` 1-tiles map onto each face.
pub fn build_transition(rule: &SubdivisionRule) -> Result<TransitionMatrix> {
    let a = TransitionMatrix::from_rule(rule);
    for (j, &c) in a.column_sums().iter().enumerate() {
        if c != rule.degree {
            return Err(Error::InvalidRule(format!(
                "state {j} has {c} admissible predecessors, expected degree {}",
                rule.degree
            )));
        }
    }
    Ok(a)
}

/// All admissible words of length `n` in lexicographic order.
pub fn enumerate_words(a: &TransitionMatrix, n: usize) -> Result<Vec<TileWord>> {
    enumerate_words_with_budget(a, n, WORD_BUDGET)
}

pub fn enumerate_words_with_budget(
    a: &TransitionMatrix,
    n: usize,
    budget: u128,
) -> Result<Vec<TileWord>> {
    if n == 0 {
        return Err(Error::Contract("words have length at least 1".into()));
    }
    let needed = 2 * (a.degree() as u128).saturating_pow(n as u32);
    if needed > budget {
        return Err(Error::Budget {
            what: "words",
            needed,
            budget,
        });
    }
    let mut words: Vec<Vec<u16>> = (0..a.len() as u16).map(|s| vec![s]).collect();
    for _ in 1..n {
        let mut next = Vec::with_capacity(words.len() * a.degree());
        for x in 0..a.len() as u16 {
            for w in &words {
                if a.admissible(x, w[0]) {
                    let mut v = Vec::with_capacity(w.len() + 1);
                    v.push(x);
                    v.extend_from_slice(w);
                    next.push(v);
                }
            }
        }
        words = next;
    }
    Ok(words.into_iter().map(TileWord).collect())
}

/// Level-`n` words as nodes, with an arc `w -> shift(w)·a` whenever `w·a` is
/// admissible.
#[derive(Clone, Debug)]
pub struct CylinderGraph {
    pub level: usize,
    pub words: Vec<TileWord>,
    index: HashMap<TileWord, usize>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl CylinderGraph {
    pub fn new(a: &TransitionMatrix, n: usize) -> Result<Self> {
        let words = enumerate_words(a, n)?;
        let index: HashMap<TileWord, usize> =
            words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut succ = vec![Vec::new(); words.len()];
        let mut pred = vec![Vec::new(); words.len()];
        let mut buf: Vec<u16> = Vec::with_capacity(n);
        for (i, w) in words.iter().enumerate() {
            let syms = w.symbols();
            let last = *syms.last().unwrap();
            for &s in a.successors(last) {
                buf.clear();
                buf.extend_from_slice(&syms[1..]);
                buf.push(s);
                let j = index[&TileWord(buf.clone())];
                succ[i].push(j);
                pred[j].push(i);
            }
        }
        for p in &mut pred {
            p.sort_unstable();
        }
        Ok(CylinderGraph {
            level: n,
            words,
            index,
            succ,
            pred,
        })
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn arc_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn node_of(&self, w: &TileWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    /// Out-neighbors in ascending word order.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    /// Strongly connected components (each sorted), ordered by least member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(self.node_count(), |v| self.successors(v).to_vec())
    }

    /// Errors with the first component when the graph is not strongly connected.
    pub fn check_strongly_connected(&self) -> Result<()> {
        let comps = self.components();
        if comps.len() > 1 {
            return Err(Error::NotStronglyConnected {
                component: comps[0].clone(),
            });
        }
        Ok(())
    }

    /// Adjacency export by node index.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "level": self.level,
            "words": self.words,
            "successors": self.succ,
        })
    }
}

pub(crate) fn components_of(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, n * 4);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for v in 0..n {
        for w in succ(v) {
            g.add_edge(nodes[v], nodes[w], ());
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|i| i.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Smallest `p` dividing the length with the word equal to its `p`-rotation.
pub fn primitive_period(cycle: &[u16]) -> usize {
    let l = cycle.len();
    (1..=l)
        .find(|&p| l.is_multiple_of(p) && (0..l).all(|i| cycle[i] == cycle[(i + p) % l]))
        .unwrap_or(l)
}

/// Lexicographically least rotation.
pub fn least_rotation(cycle: &[u16]) -> Vec<u16> {
    let l = cycle.len();
    (0..l)
        .map(|r| {
            let mut v = cycle.to_vec();
            v.rotate_left(r);
            v
        })
        .min()
        .unwrap_or_default()
}

/// A periodic orbit of the map, given by its periodic address.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodicOrbit {
    /// One primitive period of the address, starting at the realized `points[0]`.
    pub word: TileWord,
    pub period: usize,
    /// Length of the closed walk that produced the orbit.
    pub cycle_length: usize,
    pub points: Vec<ModelPoint>,
    /// Minimal distance between distinct points; `None` encodes `+∞`.
    pub gap: Option<f64>,
    pub metric: String,
}

impl PeriodicOrbit {
    /// Realizes `cycle^∞` and all its rotations.
    pub fn from_symbols(rule: &SubdivisionRule, cycle: &[u16]) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::Contract("empty cycle".into()));
        }
        let p = primitive_period(cycle);
        let word = cycle[..p].to_vec();
        let mut points = Vec::with_capacity(p);
        for r in 0..p {
            let mut rot = word.clone();
            rot.rotate_left(r);
            points.push(geometry::address_to_point(rule, &InfiniteWord::periodic(rot))?);
        }
        let mut orbit = PeriodicOrbit {
            word: TileWord(word),
            period: p,
            cycle_length: cycle.len(),
            points,
            gap: None,
            metric: String::new(),
        };
        orbit.measure_gap(rule, &geometry::Metric::Model);
        Ok(orbit)
    }

    /// Recomputes the gap under `metric`.
    pub fn measure_gap(&mut self, rule: &SubdivisionRule, metric: &geometry::Metric) {
        let mut gap: Option<f64> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = metric.distance(rule, &self.points[i], &self.points[j]);
                gap = Some(gap.map_or(d, |g| g.min(d)));
            }
        }
        self.gap = gap;
        self.metric = metric.name().to_string();
    }

    pub fn gap_value(&self) -> f64 {
        self.gap.unwrap_or(f64::INFINITY)
    }

    /// Level-`n` words visited by the orbit (one per rotation).
    pub fn window_words(&self, n: usize) -> Vec<TileWord> {
        let w = self.word.symbols();
        (0..w.len())
            .map(|r| TileWord((0..n).map(|i| w[(r + i) % w.len()]).collect()))
            .collect()
    }

    /// Node ids of the orbit's closed walk in `g`, one per rotation.
    pub fn graph_cycle(&self, g: &CylinderGraph) -> Vec<usize> {
        self.window_words(g.level)
            .iter()
            .map(|w| g.node_of(w).expect("orbit windows are admissible"))
            .collect()
    }
}

/// Orbit realized from a closed walk in the cylinder graph.
pub fn periodic_point_from_cycle(
    rule: &SubdivisionRule,
    g: &CylinderGraph,
    cycle: &[usize],
) -> Result<PeriodicOrbit> {
    if cycle.is_empty() {
        return Err(Error::Contract("empty walk".into()));
    }
    for i in 0..cycle.len() {
        let (v, w) = (cycle[i], cycle[(i + 1) % cycle.len()]);
        if v >= g.node_count() || !g.successors(v).contains(&w) {
            return Err(Error::Contract(format!("walk is not closed: no arc {v} -> {w}")));
        }
    }
    let syms: Vec<u16> = cycle.iter().map(|&v| g.words[v].symbols()[0]).collect();
    PeriodicOrbit::from_symbols(rule, &syms)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorReport {
    pub samples: usize,
    pub depth: usize,
    pub max_distance: f64,
    pub worst_word: Option<TileWord>,
}

/// Compares `π(σ w)` with `f(π w)` on random words of length `depth`, each
/// extended canonically.
pub fn factor_commutation_check<R: Rng + ?Sized>(
    rule: &SubdivisionRule,
    samples: usize,
    depth: usize,
    rng: &mut R,
) -> Result<FactorReport> {
    let a = TransitionMatrix::from_rule(rule);
    let mut report = FactorReport {
        samples,
        depth,
        max_distance: 0.0,
        worst_word: None,
    };
    for _ in 0..samples {
        let w = a.random_word(depth.max(1), rng);
        let inf = a.canonical_extension(&w);
        let x = geometry::address_to_point(rule, &inf)?;
        let y = geometry::address_to_point(rule, &inf.shift())?;
        let d = geometry::model_distance(rule, &y, &geometry::apply_map(rule, &x));
        if report.worst_word.is_none() || d > report.max_distance {
            report.max_distance = d;
            report.worst_word = Some(w);
        }
    }
    Ok(report)
}

/// `θ^N` for the first index `N` where the words differ; 0 if they agree on the
/// compared length.
pub fn theta_distance(w1: &[u16], w2: &[u16], theta: f64) -> f64 {
    match w1.iter().zip(w2).position(|(a, b)| a != b) {
        Some(n) => theta.powi(n as i32),
        None => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::load_builtin;

    #[test]
    fn pillow_matrix_rows_and_trace() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let a = build_transition(&rule).unwrap();
        assert_eq!(a.len(), 8);
        assert!(a.row_sums().iter().all(|&r| r == 4));
        assert!(a.trace_power(1) >= 1);
        // every entry of A^n is 2 * 4^(n-2) for n >= 2
        assert_eq!(a.trace_power(3), 8 * 8);
    }

    #[test]
    fn flap_rows_differ_columns_do_not() {
        let rule = load_builtin("flap").unwrap();
        let a = build_transition(&rule).unwrap();
        assert!(a.column_sums().iter().all(|&c| c == 5));
        let mut rows = a.row_sums();
        rows.sort_unstable();
        rows.dedup();
        assert_eq!(rows, [4, 6]);
    }

    #[test]
    fn word_counts() {
        for (name, deg) in [("pillow_lattes", 4u128), ("barycentric", 6), ("flap", 5)] {
            let rule = load_builtin(name).unwrap();
            let a = build_transition(&rule).unwrap();
            for n in 1..=4 {
                let words = enumerate_words(&a, n).unwrap();
                assert_eq!(words.len() as u128, 2 * deg.pow(n as u32), "{name} {n}");
                assert!(words.windows(2).all(|w| w[0] < w[1]));
                assert!(words.iter().all(|w| a.is_admissible(w.symbols())));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let a = build_transition(&rule).unwrap();
        assert!(matches!(
            enumerate_words_with_budget(&a, 6, 1000),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn cylinder_graph_is_strongly_connected_with_deg_in_degree() {
        for name in ["pillow_lattes", "barycentric", "flap"] {
            let rule = load_builtin(name).unwrap();
            let a = build_transition(&rule).unwrap();
            for n in 1..=3 {
                let g = CylinderGraph::new(&a, n).unwrap();
                g.check_strongly_connected().unwrap();
                for v in 0..g.node_count() {
                    assert_eq!(g.predecessors(v).len(), rule.degree);
                    for &w in g.successors(v) {
                        assert_eq!(&g.words[v].symbols()[1..], &g.words[w].symbols()[..n - 1]);
                    }
                }
            }
        }
    }

    #[test]
    fn canonical_extension_prefers_short_return() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let a = build_transition(&rule).unwrap();
        let w = TileWord::new(vec![0, 0]);
        assert_eq!(a.canonical_extension(&w), InfiniteWord::periodic(vec![0, 0]));
        // LR (1) maps onto the back face, so LL cannot follow it directly.
        let w = TileWord::new(vec![0, 1]);
        let ext = a.canonical_extension(&w);
        assert_eq!(ext.cycle(), &[0, 1, 5]);
        ext.check_admissible(&rule).unwrap();
    }

    #[test]
    fn primitive_periods() {
        assert_eq!(primitive_period(&[1, 2, 1, 2]), 2);
        assert_eq!(primitive_period(&[3, 3, 3]), 1);
        assert_eq!(primitive_period(&[1, 2, 3]), 3);
        assert_eq!(least_rotation(&[2, 0, 1]), vec![0, 1, 2]);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta_distance(&[1, 2, 3, 4, 5, 6], &[1, 2, 3, 4, 5, 7], 0.5), 2f64.powi(-5));
        assert_eq!(theta_distance(&[0], &[1], 0.5), 1.0);
        assert_eq!(theta_distance(&[1, 2], &[1, 2], 0.5), 0.0);
    }

    #[test]
    fn self_loop_gives_fixed_point() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let a = build_transition(&rule).unwrap();
        let g = CylinderGraph::new(&a, 2).unwrap();
        let v = g.node_of(&TileWord::new(vec![2, 2])).unwrap();
        let o = periodic_point_from_cycle(&rule, &g, &[v]).unwrap();
        assert_eq!(o.period, 1);
        assert_eq!(o.gap, None);
        let x = o.points[0];
        assert!(geometry::model_distance(&rule, &geometry::apply_map(&rule, &x), &x) < 1e-12);
        assert!(periodic_point_from_cycle(&rule, &g, &[v, 0]).is_err());
    }
}
