//! The Bousch operator `L(u)(w) = max { psi(v) + u(v) : v -> w } - q`, calibrated
//! sub-actions, the Mañé normalization and the maximizing set.

use serde::Serialize;

use super::meancycle::ArcGraph;
use crate::error::{Error, Result};
use crate::potential::PotentialTable;
use crate::symbolic::CylinderGraph;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BouschState {
    pub level: usize,
    pub u: Vec<f64>,
    /// Sup norm of the last update (for sub-actions: of `L(u) - u`).
    pub residual: f64,
    pub iterations: usize,
}

impl BouschState {
    pub fn zero(g: &CylinderGraph) -> Self {
        BouschState {
            level: g.level,
            u: vec![0.0; g.node_count()],
            residual: 0.0,
            iterations: 0,
        }
    }
}

fn check_levels(g: &CylinderGraph, u: &[f64], psi: &PotentialTable) -> Result<()> {
    if psi.level != g.level || psi.len() != g.node_count() || u.len() != g.node_count() {
        return Err(Error::Contract(format!(
            "level mismatch: graph {}, potential {}, {} sub-action values for {} nodes",
            g.level,
            psi.level,
            u.len(),
            g.node_count()
        )));
    }
    Ok(())
}

fn apply_raw(g: &CylinderGraph, u: &[f64], psi: &[f64], q: f64, out: &mut [f64]) {
    for (w, o) in out.iter_mut().enumerate() {
        let mut m = f64::NEG_INFINITY;
        for &v in g.predecessors(w) {
            m = m.max(psi[v] + u[v]);
        }
        *o = m - q;
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// One application of the operator, optionally normalized by `subtract_q`.
pub fn bousch_apply(
    g: &CylinderGraph,
    u: &BouschState,
    psi: &PotentialTable,
    subtract_q: Option<f64>,
) -> Result<BouschState> {
    check_levels(g, &u.u, psi)?;
    let mut out = vec![0.0; u.u.len()];
    apply_raw(g, &u.u, &psi.values, subtract_q.unwrap_or(0.0), &mut out);
    Ok(BouschState {
        level: g.level,
        residual: sup_diff(&out, &u.u),
        u: out,
        iterations: u.iterations + 1,
    })
}

/// The sub-action `limsup_k L^k(0)` of `L = L_{psi - q}`.
///
/// At a finite level the iterates are eventually periodic, so the supremum of
/// the iterates over a late enough and long enough window is the limsup. The
/// window `[K, 2K)` starts after a burn-in of `4 * level` steps and doubles until
/// the window supremum is a fixed point to within `tol`.
pub fn calibrated_subaction(
    g: &CylinderGraph,
    psi: &PotentialTable,
    q: f64,
    max_iters: usize,
    tol: f64,
) -> Result<BouschState> {
    let n = g.node_count();
    check_levels(g, &vec![0.0; n], psi)?;
    let mut u = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut k = 0usize;
    let burn = (4 * g.level).max(1);
    while k < burn {
        apply_raw(g, &u, &psi.values, q, &mut next);
        std::mem::swap(&mut u, &mut next);
        k += 1;
    }
    let mut window = burn;
    let mut residual = f64::INFINITY;
    while k < max_iters {
        let mut sup = u.clone();
        let end = (k + window).min(max_iters);
        while k + 1 < end {
            apply_raw(g, &u, &psi.values, q, &mut next);
            std::mem::swap(&mut u, &mut next);
            k += 1;
            for (s, x) in sup.iter_mut().zip(&u) {
                *s = s.max(*x);
            }
        }
        apply_raw(g, &sup, &psi.values, q, &mut next);
        residual = sup_diff(&next, &sup);
        if residual <= tol {
            return Ok(BouschState {
                level: g.level,
                u: sup,
                residual,
                iterations: k,
            });
        }
        apply_raw(g, &u, &psi.values, q, &mut next);
        std::mem::swap(&mut u, &mut next);
        k += 1;
        window *= 2;
    }
    Err(Error::NoConvergence {
        iterations: k,
        residual,
    })
}

/// `psi - q + u - u∘shift`, per arc and projected to nodes by the max over
/// outgoing arcs.
#[derive(Clone, Debug, Serialize)]
pub struct ManeNormalization {
    pub level: usize,
    /// `arcs[v][i]` belongs to the arc from `v` to its `i`-th successor.
    pub arcs: Vec<Vec<f64>>,
    pub nodes: PotentialTable,
}

impl ManeNormalization {
    pub fn max_entry(&self) -> f64 {
        self.nodes.max()
    }

    pub fn arc_graph(&self, g: &CylinderGraph) -> ArcGraph {
        let arcs: Vec<(usize, usize, f64)> = (0..g.node_count())
            .flat_map(|v| {
                g.successors(v)
                    .iter()
                    .zip(&self.arcs[v])
                    .map(move |(&w, &x)| (v, w, x))
            })
            .collect();
        ArcGraph::new(g.node_count(), &arcs)
    }
}

/// Mañé normalization of `psi` by a calibrated sub-action; errors if some arc
/// exceeds `tol`.
pub fn mane_normalize(
    g: &CylinderGraph,
    psi: &PotentialTable,
    u: &BouschState,
    q: f64,
    tol: f64,
) -> Result<ManeNormalization> {
    check_levels(g, &u.u, psi)?;
    let arcs: Vec<Vec<f64>> = (0..g.node_count())
        .map(|v| {
            g.successors(v)
                .iter()
                .map(|&w| psi.values[v] - q + u.u[v] - u.u[w])
                .collect()
        })
        .collect();
    let values: Vec<f64> = arcs
        .iter()
        .map(|a| a.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    if let Some((node, &value)) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > tol)
        .max_by(|a, b| a.1.total_cmp(b.1))
    {
        return Err(Error::Positivity { node, value });
    }
    Ok(ManeNormalization {
        level: g.level,
        arcs,
        nodes: PotentialTable::new(g.level, psi.alpha, values)?,
    })
}

/// Words on which the normalized potential stays within `tol` of zero forever:
/// keep arcs with `phi >= -tol`, then repeatedly drop nodes that lack a kept
/// successor or a kept predecessor.
pub fn maximizing_set(g: &CylinderGraph, phi: &ManeNormalization, tol: f64) -> Result<Vec<usize>> {
    let n = g.node_count();
    let mut alive: Vec<bool> = phi.nodes.values.iter().map(|&x| x >= -tol).collect();
    let kept = |v: usize, i: usize| phi.arcs[v][i] >= -tol;
    loop {
        let mut has_in = vec![false; n];
        let mut has_out = vec![false; n];
        for v in (0..n).filter(|&v| alive[v]) {
            for (i, &w) in g.successors(v).iter().enumerate() {
                if alive[w] && kept(v, i) {
                    has_out[v] = true;
                    has_in[w] = true;
                }
            }
        }
        let mut changed = false;
        for v in 0..n {
            if alive[v] && !(has_in[v] && has_out[v]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let set: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    if set.is_empty() {
        return Err(Error::EmptyMaximizingSet { tol });
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergopt::{q_value, Method};
    use crate::subdivision::load_builtin;
    use crate::symbolic::build_transition;

    fn graph(level: usize) -> CylinderGraph {
        let rule = load_builtin("pillow_lattes").unwrap();
        CylinderGraph::new(&build_transition(&rule).unwrap(), level).unwrap()
    }

    #[test]
    fn constant_potential() {
        let g = graph(2);
        let psi = PotentialTable::constant(&g, 0.3);
        let z = BouschState::zero(&g);
        let out = bousch_apply(&g, &z, &psi, Some(0.3)).unwrap();
        assert!(out.u.iter().all(|&x| x == 0.0));
        let u = calibrated_subaction(&g, &psi, 0.3, 1000, 1e-12).unwrap();
        assert!(u.u.iter().all(|&x| x == 0.0));
        let phi = mane_normalize(&g, &psi, &u, 0.3, 1e-12).unwrap();
        assert!(phi.nodes.values.iter().all(|&x| x == 0.0));
        assert_eq!(maximizing_set(&g, &phi, 1e-12).unwrap().len(), g.node_count());
    }

    #[test]
    fn level_mismatch() {
        let g2 = graph(2);
        let g3 = graph(3);
        let psi = PotentialTable::constant(&g3, 1.0);
        assert!(matches!(
            bousch_apply(&g2, &BouschState::zero(&g2), &psi, None),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn single_loop_maximizing_set() {
        let g = graph(1);
        let mut values = vec![-1.0; 8];
        values[2] = 0.0;
        let psi = PotentialTable::new(1, 1.0, values).unwrap();
        let q = q_value(&g, &psi, Method::Howard).unwrap();
        assert_eq!(q.q, 0.0);
        assert_eq!(q.cycle, vec![2]);
        let u = calibrated_subaction(&g, &psi, q.q, 10_000, 1e-12).unwrap();
        let phi = mane_normalize(&g, &psi, &u, q.q, 1e-12).unwrap();
        assert_eq!(maximizing_set(&g, &phi, 1e-9).unwrap(), vec![2]);
    }
}
