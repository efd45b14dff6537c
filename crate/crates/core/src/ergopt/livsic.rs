//! Coboundary test: a potential is cohomologous to zero at this level when both
//! `Q(psi)` and `Q(-psi)` vanish.

use serde::Serialize;

use super::meancycle::{q_value, Method};
use crate::error::{Error, Result};
use crate::potential::PotentialTable;
use crate::symbolic::{CylinderGraph, TileWord, TransitionMatrix};

#[derive(Clone, Debug, Serialize)]
pub struct LivsicVerdict {
    pub coboundary_like: bool,
    pub q_plus: f64,
    /// `Q(-psi)`.
    pub q_minus: f64,
    /// Largest `|S_p psi|` over closed walks of length `p <= max_period`.
    pub max_cycle_sum: f64,
    pub worst_cycle: Vec<u16>,
    pub cycles_checked: usize,
}

pub fn livsic_test(
    a: &TransitionMatrix,
    g: &CylinderGraph,
    psi: &PotentialTable,
    max_period: usize,
    tol: f64,
) -> Result<LivsicVerdict> {
    if max_period > 10 {
        return Err(Error::Contract(format!("max_period {max_period} exceeds 10")));
    }
    let q_plus = q_value(g, psi, Method::Howard)?.q;
    let q_minus = q_value(g, &psi.scaled(-1.0), Method::Howard)?.q;
    let mut verdict = LivsicVerdict {
        coboundary_like: q_plus.abs() <= tol && q_minus.abs() <= tol,
        q_plus,
        q_minus,
        max_cycle_sum: 0.0,
        worst_cycle: Vec::new(),
        cycles_checked: 0,
    };
    let mut word = Vec::with_capacity(max_period);
    for p in 1..=max_period {
        for s in 0..a.len() as u16 {
            word.clear();
            word.push(s);
            closed_walks(a, g, psi, p, &mut word, &mut verdict);
        }
    }
    Ok(verdict)
}

fn closed_walks(
    a: &TransitionMatrix,
    g: &CylinderGraph,
    psi: &PotentialTable,
    p: usize,
    word: &mut Vec<u16>,
    verdict: &mut LivsicVerdict,
) {
    if word.len() == p {
        if a.admissible(*word.last().unwrap(), word[0]) {
            let s = cycle_sum(g, psi, word);
            verdict.cycles_checked += 1;
            if s.abs() > verdict.max_cycle_sum || verdict.worst_cycle.is_empty() {
                verdict.max_cycle_sum = verdict.max_cycle_sum.max(s.abs());
                verdict.worst_cycle = word.clone();
            }
        }
        return;
    }
    let last = *word.last().unwrap();
    for &t in a.successors(last) {
        word.push(t);
        closed_walks(a, g, psi, p, word, verdict);
        word.pop();
    }
}

/// Sum of the table over the windows of the periodic word `word^∞`.
pub fn cycle_sum(g: &CylinderGraph, psi: &PotentialTable, word: &[u16]) -> f64 {
    let l = g.level;
    let p = word.len();
    let first = TileWord::new((0..l).map(|i| word[i % p]).collect());
    let mut v = g.node_of(&first).expect("periodic windows are admissible");
    let mut s = 0.0;
    for j in 0..p {
        s += psi.values[v];
        let next = word[(j + l) % p];
        v = *g
            .successors(v)
            .iter()
            .find(|&&w| *g.words[w].symbols().last().unwrap() == next)
            .expect("periodic windows are admissible");
    }
    s
}

/// `v - v∘shift` as a table one level above `v`.
pub fn coboundary(coarse: &CylinderGraph, v: &PotentialTable, fine: &CylinderGraph) -> Result<PotentialTable> {
    if fine.level != coarse.level + 1 || v.level != coarse.level {
        return Err(Error::Contract("coboundary needs levels l and l + 1".into()));
    }
    let l = coarse.level;
    let values = fine
        .words
        .iter()
        .map(|w| {
            let s = w.symbols();
            let head = coarse.node_of(&TileWord::new(s[..l].to_vec())).unwrap();
            let tail = coarse.node_of(&TileWord::new(s[1..].to_vec())).unwrap();
            v.values[head] - v.values[tail]
        })
        .collect();
    PotentialTable::new(fine.level, v.alpha, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::load_builtin;
    use crate::symbolic::build_transition;

    #[test]
    fn coboundary_and_constant() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let a = build_transition(&rule).unwrap();
        let g2 = CylinderGraph::new(&a, 2).unwrap();
        let g3 = CylinderGraph::new(&a, 3).unwrap();
        let v = PotentialTable::new(2, 1.0, (0..32).map(|i| ((i * 7) % 11) as f64 / 3.0).collect()).unwrap();
        let psi = coboundary(&g2, &v, &g3).unwrap();
        let r = livsic_test(&a, &g3, &psi, 6, 1e-9).unwrap();
        assert!(r.coboundary_like, "{r:?}");
        assert!(r.max_cycle_sum <= 1e-9);
        assert_eq!(r.cycles_checked as u128, (1..=6).map(|p| a.trace_power(p)).sum::<u128>());

        let one = PotentialTable::constant(&g3, 1.0);
        let r = livsic_test(&a, &g3, &one, 3, 1e-9).unwrap();
        assert!(!r.coboundary_like);
        assert_eq!(r.q_plus, 1.0);
    }

    #[test]
    fn opposite_loops() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let a = build_transition(&rule).unwrap();
        let g = CylinderGraph::new(&a, 1).unwrap();
        let mut values = vec![0.0; 8];
        values[0] = 1.0;
        values[2] = -1.0;
        let psi = PotentialTable::new(1, 1.0, values).unwrap();
        let r = livsic_test(&a, &g, &psi, 2, 1e-9).unwrap();
        assert!(!r.coboundary_like);
        assert_eq!((r.q_plus, r.q_minus), (1.0, 1.0));
    }
}
