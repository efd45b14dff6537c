//! Maximum mean cycle: Karp's dynamic program, Howard's policy iteration and a
//! brute-force enumeration of simple cycles for small graphs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::PotentialTable;
use crate::symbolic::{components_of, CylinderGraph};

/// Largest graph Karp's quadratic table is built for.
pub const KARP_MAX_NODES: usize = 4096;
/// Largest graph the brute-force enumeration accepts.
pub const BRUTE_MAX_NODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Karp,
    Howard,
    Brute,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "karp" => Ok(Method::Karp),
            "howard" => Ok(Method::Howard),
            "brute" => Ok(Method::Brute),
            other => Err(Error::Usage(format!("unknown method `{other}` (karp, howard, brute)"))),
        }
    }
}

/// Directed graph with real arc weights; at most one arc per ordered pair.
#[derive(Clone, Debug)]
pub struct ArcGraph {
    succ: Vec<Vec<(usize, f64)>>,
}

impl ArcGraph {
    /// Parallel arcs collapse to the heaviest.
    pub fn new(n: usize, arcs: &[(usize, usize, f64)]) -> Self {
        let mut succ: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, w) in arcs {
            match succ[a].iter_mut().find(|(t, _)| *t == b) {
                Some(e) => e.1 = e.1.max(w),
                None => succ[a].push((b, w)),
            }
        }
        for s in &mut succ {
            s.sort_by_key(|e| e.0);
        }
        ArcGraph { succ }
    }

    /// Every arc leaving `v` carries `weights[v]`.
    pub fn from_node_weights(g: &CylinderGraph, weights: &[f64]) -> Self {
        ArcGraph {
            succ: (0..g.node_count())
                .map(|v| g.successors(v).iter().map(|&w| (w, weights[v])).collect())
                .collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn arcs(&self, v: usize) -> &[(usize, f64)] {
        &self.succ[v]
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.succ[a].iter().find(|e| e.0 == b).map(|e| e.1)
    }

    pub fn without_arc(&self, a: usize, b: usize) -> ArcGraph {
        let mut g = self.clone();
        g.succ[a].retain(|e| e.0 != b);
        g
    }

    /// Induced subgraph on `keep` (sorted), with node ids renumbered.
    pub fn induced(&self, keep: &[usize]) -> ArcGraph {
        let mut pos = vec![usize::MAX; self.node_count()];
        for (i, &v) in keep.iter().enumerate() {
            pos[v] = i;
        }
        ArcGraph {
            succ: keep
                .iter()
                .map(|&v| {
                    self.succ[v]
                        .iter()
                        .filter(|e| pos[e.0] != usize::MAX)
                        .map(|&(w, x)| (pos[w], x))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        components_of(self.node_count(), |v| self.succ[v].iter().map(|e| e.0).collect())
    }

    pub fn cycle_mean(&self, cycle: &[usize]) -> f64 {
        let l = cycle.len();
        let s: f64 = (0..l)
            .map(|i| self.weight(cycle[i], cycle[(i + 1) % l]).expect("cycle arcs exist"))
            .sum();
        s / l as f64
    }

    fn max_abs_weight(&self) -> f64 {
        self.succ
            .iter()
            .flatten()
            .map(|e| e.1.abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxMeanResult {
    pub q: f64,
    /// Simple cycle attaining `q`, rotated to start at its least node.
    pub cycle: Vec<usize>,
    pub method: Method,
    /// Howard: node biases `h` with `w(v,w) - q + h(w) <= h(v)`. Karp: each
    /// node's min-ratio value, whose maximum is `q`. Brute: empty.
    pub certificate: Vec<f64>,
}

/// Rotates a cycle so it starts at its least node.
pub fn canonical_cycle(cycle: &[usize]) -> Vec<usize> {
    let i = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
    let mut c = cycle.to_vec();
    c.rotate_left(i);
    c
}

/// Maximum mean cycle of a strongly connected graph.
pub fn max_mean_cycle(g: &ArcGraph, method: Method) -> Result<MaxMeanResult> {
    let comps = g.components();
    if comps.len() != 1 {
        return Err(Error::NotStronglyConnected {
            component: comps.into_iter().next().unwrap_or_default(),
        });
    }
    if g.arcs(0).is_empty() {
        return Err(Error::Contract("graph has no cycle".into()));
    }
    match method {
        Method::Karp => karp(g),
        Method::Howard => howard(g),
        Method::Brute => brute(g),
    }
}

/// Best cycle over all strongly connected components, or `None` if acyclic.
pub fn max_mean_cycle_any(g: &ArcGraph) -> Option<MaxMeanResult> {
    let mut best: Option<MaxMeanResult> = None;
    for comp in g.components() {
        let sub = g.induced(&comp);
        if sub.arcs(0).is_empty() {
            continue;
        }
        let mut r = howard(&sub).expect("components are strongly connected");
        r.cycle = canonical_cycle(&r.cycle.iter().map(|&i| comp[i]).collect::<Vec<_>>());
        r.certificate.clear();
        if best.as_ref().is_none_or(|b| r.q > b.q) {
            best = Some(r);
        }
    }
    best
}

/// `Q_n`: the maximum mean cycle of the level-`n` cylinder graph weighted by `psi`.
pub fn q_value(g: &CylinderGraph, psi: &PotentialTable, method: Method) -> Result<MaxMeanResult> {
    if psi.level != g.level || psi.len() != g.node_count() {
        return Err(Error::Contract(format!(
            "potential at level {} on a level-{} graph",
            psi.level, g.level
        )));
    }
    max_mean_cycle(&ArcGraph::from_node_weights(g, &psi.values), method)
}

fn karp(g: &ArcGraph) -> Result<MaxMeanResult> {
    let n = g.node_count();
    if n > KARP_MAX_NODES {
        return Err(Error::Budget {
            what: "karp table rows",
            needed: n as u128,
            budget: KARP_MAX_NODES as u128,
        });
    }
    let neg = f64::NEG_INFINITY;
    let mut d = vec![vec![neg; n]; n + 1];
    let mut parent = vec![vec![usize::MAX; n]; n + 1];
    d[0].iter_mut().for_each(|x| *x = 0.0);
    for k in 1..=n {
        let (prev, cur) = d.split_at_mut(k);
        let (prev, cur) = (&prev[k - 1], &mut cur[0]);
        for u in 0..n {
            if prev[u] == neg {
                continue;
            }
            for &(v, w) in g.arcs(u) {
                let cand = prev[u] + w;
                if cand > cur[v] {
                    cur[v] = cand;
                    parent[k][v] = u;
                }
            }
        }
    }
    let mut values = vec![neg; n];
    for v in 0..n {
        if d[n][v] == neg {
            continue;
        }
        let mut m = f64::INFINITY;
        for k in 0..n {
            if d[k][v] > neg {
                m = m.min((d[n][v] - d[k][v]) / (n - k) as f64);
            }
        }
        values[v] = m;
    }
    let (vstar, &qk) = values
        .iter()
        .enumerate()
        .fold((0, &neg), |acc, (i, x)| if *x > *acc.1 { (i, x) } else { acc });
    let mut walk = vec![0usize; n + 1];
    walk[n] = vstar;
    for k in (1..=n).rev() {
        walk[k - 1] = parent[k][walk[k]];
    }
    let mut last = vec![usize::MAX; n];
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (j, &v) in walk.iter().enumerate() {
        if last[v] != usize::MAX {
            let c = walk[last[v]..j].to_vec();
            let m = g.cycle_mean(&c);
            if best.as_ref().is_none_or(|b| m > b.0) {
                best = Some((m, c));
            }
        }
        last[v] = j;
    }
    let scale = 1.0 + g.max_abs_weight();
    let (q, cycle) = match best {
        Some((m, c)) if m >= qk - 1e-9 * scale => (m, c),
        _ => {
            let h = howard(g)?;
            (h.q, h.cycle)
        }
    };
    Ok(MaxMeanResult {
        q,
        cycle: canonical_cycle(&cycle),
        method: Method::Karp,
        certificate: values,
    })
}

fn howard(g: &ArcGraph) -> Result<MaxMeanResult> {
    let n = g.node_count();
    let scale = 1.0 + g.max_abs_weight();
    let eps = 1e-15 * scale * (n as f64).max(16.0);
    // initial policy: heaviest arc, least target on ties
    let mut pol: Vec<usize> = (0..n)
        .map(|v| {
            let arcs = g.arcs(v);
            let mut best = arcs[0];
            for &a in &arcs[1..] {
                if a.1 > best.1 {
                    best = a;
                }
            }
            best.0
        })
        .collect();
    let max_iters = 100 * n + 1000;
    for _ in 0..max_iters {
        let (eta, x, cycles) = evaluate(g, &pol);
        let mut changed = false;
        for v in 0..n {
            let mut best_eta = eta[pol[v]];
            let mut target = pol[v];
            for &(w, _) in g.arcs(v) {
                if eta[w] > best_eta + eps {
                    best_eta = eta[w];
                    target = w;
                }
            }
            if target != pol[v] && best_eta > eta[v] + eps {
                pol[v] = target;
                changed = true;
            }
        }
        if !changed {
            for v in 0..n {
                let cur = g.weight(v, pol[v]).unwrap() - eta[v] + x[pol[v]];
                let mut best = cur;
                let mut target = pol[v];
                for &(w, wt) in g.arcs(v) {
                    if (eta[w] - eta[v]).abs() > eps {
                        continue;
                    }
                    let val = wt - eta[v] + x[w];
                    if val > best + eps {
                        best = val;
                        target = w;
                    }
                }
                if target != pol[v] {
                    pol[v] = target;
                    changed = true;
                }
            }
        }
        if !changed {
            let (q, cycle) = cycles
                .into_iter()
                .map(|c| (g.cycle_mean(&c), canonical_cycle(&c)))
                .fold(None::<(f64, Vec<usize>)>, |acc, (m, c)| match acc {
                    Some((bm, bc)) if bm > m || (bm == m && bc <= c) => Some((bm, bc)),
                    _ => Some((m, c)),
                })
                .expect("a policy graph has a cycle");
            return Ok(MaxMeanResult {
                q,
                cycle,
                method: Method::Howard,
                certificate: x,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        residual: f64::NAN,
    })
}

/// Gains, biases and cycles of a policy (a function choosing one out-arc per node).
fn evaluate(g: &ArcGraph, pol: &[usize]) -> (Vec<f64>, Vec<f64>, Vec<Vec<usize>>) {
    let n = pol.len();
    let mut eta = vec![0.0; n];
    let mut x = vec![0.0; n];
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        path.clear();
        let mut v = s;
        while state[v] == 0 {
            state[v] = 1;
            path.push(v);
            v = pol[v];
        }
        if state[v] == 1 {
            // new cycle starting at v
            let start = path.iter().position(|&p| p == v).unwrap();
            let cyc: Vec<usize> = path[start..].to_vec();
            let mean = {
                let s: f64 = cyc.iter().map(|&c| g.weight(c, pol[c]).unwrap()).sum();
                s / cyc.len() as f64
            };
            let head = *cyc.iter().min().unwrap();
            let hpos = cyc.iter().position(|&c| c == head).unwrap();
            let l = cyc.len();
            eta[head] = mean;
            x[head] = 0.0;
            state[head] = 2;
            // walk backwards around the cycle from the head
            for k in 1..l {
                let c = cyc[(hpos + l - k) % l];
                eta[c] = mean;
                x[c] = g.weight(c, pol[c]).unwrap() - mean + x[pol[c]];
                state[c] = 2;
            }
            cycles.push(cyc);
            path.truncate(start);
        }
        for &p in path.iter().rev() {
            let t = pol[p];
            eta[p] = eta[t];
            x[p] = g.weight(p, t).unwrap() - eta[t] + x[t];
            state[p] = 2;
        }
    }
    (eta, x, cycles)
}

fn brute(g: &ArcGraph) -> Result<MaxMeanResult> {
    let n = g.node_count();
    if n > BRUTE_MAX_NODES {
        return Err(Error::Budget {
            what: "brute-force nodes",
            needed: n as u128,
            budget: BRUTE_MAX_NODES as u128,
        });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut path = Vec::new();
    let mut on_path = vec![false; n];
    for s in 0..n {
        path.push(s);
        on_path[s] = true;
        dfs_cycles(g, s, s, 0.0, &mut path, &mut on_path, &mut best);
        path.pop();
        on_path[s] = false;
    }
    let (_, cycle) = best.ok_or_else(|| Error::Contract("graph has no cycle".into()))?;
    Ok(MaxMeanResult {
        q: g.cycle_mean(&cycle),
        cycle,
        method: Method::Brute,
        certificate: Vec::new(),
    })
}

fn dfs_cycles(
    g: &ArcGraph,
    start: usize,
    v: usize,
    sum: f64,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    best: &mut Option<(f64, Vec<usize>)>,
) {
    for &(w, wt) in g.arcs(v) {
        if w == start {
            let mean = (sum + wt) / path.len() as f64;
            let better = match best {
                None => true,
                Some((m, c)) => mean > *m || (mean == *m && path[..] < c[..]),
            };
            if better {
                *best = Some((mean, path.clone()));
            }
        } else if w > start && !on_path[w] {
            on_path[w] = true;
            path.push(w);
            dfs_cycles(g, start, w, sum + wt, path, on_path, best);
            path.pop();
            on_path[w] = false;
        }
    }
}
