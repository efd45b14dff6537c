//! Perturbing a potential toward a periodic orbit, checking that the orbit
//! becomes the locked maximizer, and watching the Gibbs surrogate concentrate
//! on it as the inverse temperature grows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closing::{self, GapBoundConfig, GapStep, PeriodicOrbit};
use crate::ergopt::{self, meancycle::canonical_cycle, ArcGraph, Method};
use crate::error::{Error, Result};
use crate::geometry::{self, Metric, ModelPoint};
use crate::potential::{self, ClosedForm, Cylinders, Potential, PotentialTable};
use crate::subdivision::SubdivisionRule;
use crate::symbolic::CylinderGraph;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TpoConfig {
    /// Perturbation size; `None` means `0.05 * range(φ)`.
    pub epsilon: Option<f64>,
    pub alpha: f64,
    pub gap: GapBoundConfig,
    /// Tolerance for the maximizing set.
    pub tol: f64,
}

impl TpoConfig {
    pub fn new(alpha: f64) -> Self {
        TpoConfig {
            epsilon: None,
            alpha,
            gap: GapBoundConfig {
                spec: closing::GapSpec { r: 1.0, theta: 1.0 },
                alpha,
                tau: 1.0,
                kappa: 2.0,
                epsilon: 0.1,
            },
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LockingResult {
    pub count: usize,
    pub successes: usize,
    pub rho: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TpoReport {
    pub potential: String,
    pub level: usize,
    pub orbit: PeriodicOrbit,
    pub epsilon: f64,
    pub q_before: f64,
    pub q_after: f64,
    /// Argmax cycles as node ids, starting at the least node.
    pub argmax_before: Vec<usize>,
    pub argmax_after: Vec<usize>,
    /// Node cycle of the orbit.
    pub orbit_cycle: Vec<usize>,
    /// `q_after` minus the best mean over cycles avoiding some arc of the argmax.
    pub margin: f64,
    /// Mean of `φ'` along the orbit.
    pub orbit_mean: f64,
    pub k_size: usize,
    pub recursion_trace: Vec<GapStep>,
    pub success: bool,
    pub locking: Option<LockingResult>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub perturbed: PotentialTable,
}

/// Whether a node cycle realizes the same point set as `orbit`. Points on the
/// curve have several addresses, so distinct cycles can be one orbit.
pub fn realizes(rule: &SubdivisionRule, g: &CylinderGraph, cycle: &[usize], orbit: &PeriodicOrbit) -> bool {
    let syms: Vec<u16> = cycle.iter().map(|&v| g.words[v].symbols()[0]).collect();
    let Ok(other) = PeriodicOrbit::from_symbols(rule, &syms) else {
        return false;
    };
    other.period == orbit.period
        && other.points.iter().all(|x| {
            orbit
                .points
                .iter()
                .any(|o| geometry::model_distance(rule, x, o) <= ergopt::POINT_TOL)
        })
}

/// Best cycle mean among cycles that are not `orbit`: arcs of the argmax are
/// forbidden one at a time, and the search recurses into the cycles it finds
/// while they still realize `orbit`.
pub fn second_best(
    rule: &SubdivisionRule,
    g: &CylinderGraph,
    arcs: &ArcGraph,
    cycle: &[usize],
    orbit: &PeriodicOrbit,
) -> f64 {
    const MAX_SOLVES: usize = 256;
    let mut best = f64::NEG_INFINITY;
    let mut stack = vec![(arcs.clone(), cycle.to_vec())];
    let mut solves = 0;
    while let Some((graph, cyc)) = stack.pop() {
        let k = cyc.len();
        for i in 0..k {
            if solves >= MAX_SOLVES {
                return best;
            }
            solves += 1;
            let sub = graph.without_arc(cyc[i], cyc[(i + 1) % k]);
            let Some(r) = ergopt::max_mean_cycle_any(&sub) else {
                continue;
            };
            if r.q <= best {
                continue;
            }
            if realizes(rule, g, &r.cycle, orbit) {
                stack.push((sub, r.cycle));
            } else {
                best = r.q;
            }
        }
    }
    best
}

/// Table of `dist(·, O)^α`: zero on the orbit's own cylinders and evaluated
/// at tile centers elsewhere, so every other cylinder is penalized even when
/// its representative is an orbit point under another address.
pub fn distance_table(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    orbit: &PeriodicOrbit,
    alpha: f64,
) -> Result<PotentialTable> {
    let sigma = potential::distance_potential(orbit, alpha, Metric::Model);
    let mut values: Vec<f64> = cyl
        .graph
        .words
        .iter()
        .zip(&cyl.reps)
        .map(|(w, rep)| {
            let center = ModelPoint::new(geometry::word_face(rule, w), geometry::tile_star(rule, w).center);
            let c = sigma.eval(rule, &center);
            if c > 0.0 {
                c
            } else {
                sigma.eval(rule, rep)
            }
        })
        .collect();
    for v in orbit.graph_cycle(&cyl.graph) {
        values[v] = 0.0;
    }
    PotentialTable::new(cyl.level(), alpha, values)
}

pub fn tpo_pipeline(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    phi: &Potential,
    cfg: &TpoConfig,
) -> Result<TpoReport> {
    let g = &cyl.graph;
    if g.level < 3 {
        return Err(Error::Contract(format!("pipeline needs level >= 3, got {}", g.level)));
    }
    let table = potential::discretize(rule, cyl, phi)?;
    let epsilon = cfg.epsilon.unwrap_or(0.05 * table.range());
    if !(epsilon > 0.0) {
        return Err(Error::Contract(format!(
            "perturbation size must be positive, got {epsilon} (constant potentials need an explicit epsilon)"
        )));
    }
    let before = ergopt::q_value(g, &table, Method::Howard)?;
    let u = ergopt::calibrated_subaction(g, &table, before.q, 10_000_000, ergopt::GRAPH_TOL)?;
    let phi_tilde = ergopt::mane_normalize(g, &table, &u, before.q, ergopt::GRAPH_TOL)?;
    let k = ergopt::maximizing_set(g, &phi_tilde, cfg.tol)?;
    let bound = closing::bound_by_gap(rule, cyl, &k, &cfg.gap)?;
    let orbit = bound.orbit;

    let sigma = distance_table(rule, cyl, &orbit, cfg.alpha)?;
    let perturbed = table.plus(-epsilon, &sigma)?;
    let arcs = ArcGraph::from_node_weights(g, &perturbed.values);
    let after = ergopt::max_mean_cycle(&arcs, Method::Howard)?;
    let orbit_cycle = canonical_cycle(&orbit.graph_cycle(g));
    let orbit_mean = orbit_cycle.iter().map(|&v| perturbed.values[v]).sum::<f64>() / orbit_cycle.len() as f64;
    let on_orbit = realizes(rule, g, &after.cycle, &orbit);
    let margin = after.q - second_best(rule, g, &arcs, &after.cycle, &orbit);
    let success = on_orbit && margin > 0.0;
    let mut notes = Vec::new();
    if !on_orbit {
        notes.push("argmax after perturbation differs from the orbit".to_string());
    } else if after.cycle != orbit_cycle {
        notes.push("argmax is another address of the orbit".to_string());
    }
    if (after.q - orbit_mean).abs() > 1e-9 {
        notes.push(format!("q_after - orbit mean = {:e}", after.q - orbit_mean));
    }
    let name = match phi {
        Potential::Closed(c) => c.name.clone(),
        Potential::Table(t) => format!("table(level {})", t.level),
    };
    Ok(TpoReport {
        potential: name,
        level: g.level,
        orbit,
        epsilon,
        q_before: before.q,
        q_after: after.q,
        argmax_before: before.cycle,
        argmax_after: after.cycle,
        orbit_cycle,
        margin,
        orbit_mean,
        k_size: k.len(),
        recursion_trace: bound.trace,
        success,
        locking: None,
        notes,
        perturbed,
    })
}

/// Per-trial seed derived from the master seed.
fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Adds `trials` random smooth perturbations with sup norm and seminorm
/// estimate at most `rho` and counts how often the argmax cycle stays put.
pub fn locking_test(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    phi_prime: &PotentialTable,
    trials: usize,
    rho: f64,
    seed: u64,
) -> Result<LockingResult> {
    if rho < 0.0 {
        return Err(Error::Contract(format!("rho must be nonnegative, got {rho}")));
    }
    let g = &cyl.graph;
    let target = ergopt::q_value(g, phi_prime, Method::Howard)?.cycle;
    let syms: Vec<u16> = target.iter().map(|&v| g.words[v].symbols()[0]).collect();
    let target_orbit = PeriodicOrbit::from_symbols(rule, &syms)?;
    let pairs = potential::touching_pairs(rule, cyl, &Metric::Model)?;
    let mut successes = 0;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, trial));
        let h = ClosedForm::random_smooth(rule, 6, &mut rng);
        let h = potential::discretize(rule, cyl, &Potential::Closed(h))?;
        let size = h
            .max()
            .abs()
            .max(h.min().abs())
            .max(potential::seminorm_over_pairs(&h, &pairs, phi_prime.alpha));
        let scale = if size > 0.0 { rho / size } else { 0.0 };
        let psi = phi_prime.plus(scale, &h)?;
        let c = ergopt::q_value(g, &psi, Method::Howard)?.cycle;
        if c == target || realizes(rule, g, &c, &target_orbit) {
            successes += 1;
        }
    }
    Ok(LockingResult {
        count: trials,
        successes,
        rho,
        seed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GibbsVector {
    pub level: usize,
    pub t: f64,
    /// Stationary weight of each word.
    pub weights: Vec<f64>,
    /// Log of the Perron eigenvalue of `A(v,w) exp(t ψ(v))`.
    pub log_pressure: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Perron vector in log form. `step(x, v)` is `log (M x)(v)`. The iteration
/// uses `M + λ I`, with `λ` estimated from the total mass, so periodic
/// structure does not stall it.
fn perron_log(
    n: usize,
    step: impl Fn(&[f64], usize) -> f64,
    max_iters: usize,
    tol: f64,
) -> Result<(Vec<f64>, f64, usize, f64)> {
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iters {
        for (v, yv) in y.iter_mut().enumerate() {
            *yv = step(&x, v);
        }
        let ratios = y.iter().zip(&x).map(|(a, b)| a - b);
        let (lo, hi) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
        // Collatz–Wielandt bounds bracket log λ
        residual = hi - lo;
        if residual <= tol * (1.0 + hi.abs()) {
            return Ok((x, 0.5 * (lo + hi), it, residual));
        }
        let shift = log_sum_exp(y.iter().copied()) - log_sum_exp(x.iter().copied());
        for (xv, yv) in x.iter_mut().zip(&y) {
            *xv = log_add_exp(*yv, shift + *xv);
        }
        let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        x.iter_mut().for_each(|v| *v -= m);
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        residual,
    })
}

/// Stationary measure of the Markov chain built from the Perron data of
/// `A(v,w) exp(t ψ(v))`.
pub fn equilibrium_state(g: &CylinderGraph, psi: &PotentialTable, t: f64) -> Result<GibbsVector> {
    if psi.level != g.level || psi.len() != g.node_count() {
        return Err(Error::Contract("potential and graph differ in level".into()));
    }
    if !t.is_finite() {
        return Err(Error::Contract("inverse temperature must be finite".into()));
    }
    g.check_strongly_connected()?;
    let n = g.node_count();
    let top = psi.max();
    let w: Vec<f64> = psi.values.iter().map(|&p| t * (p - top)).collect();
    let tol = 1e-12;
    let max_iters = 2_000_000;
    let (r, log_l, it_r, res_r) = perron_log(
        n,
        |x, v| w[v] + log_sum_exp(g.successors(v).iter().map(|&u| x[u])),
        max_iters,
        tol,
    )?;
    let (l, _, it_l, res_l) = perron_log(
        n,
        |x, v| log_sum_exp(g.predecessors(v).iter().map(|&u| w[u] + x[u])),
        max_iters,
        tol,
    )?;
    let logs: Vec<f64> = (0..n).map(|v| l[v] + r[v]).collect();
    let z = log_sum_exp(logs.iter().copied());
    let weights: Vec<f64> = logs.iter().map(|x| (x - z).exp()).collect();
    Ok(GibbsVector {
        level: g.level,
        t,
        weights,
        log_pressure: log_l + t * top,
        iterations: it_r + it_l,
        residual: res_r.max(res_l),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub t: f64,
    /// Total variation distance to the uniform measure on the orbit, with the
    /// Gibbs weights pushed to the sphere through the representative points.
    pub distance: f64,
    /// The same distance between word measures, without the pushforward.
    pub word_distance: f64,
    pub mass_on_orbit: f64,
}

/// Uniform measure on the orbit's words, with multiplicity.
pub fn orbit_measure(g: &CylinderGraph, orbit: &PeriodicOrbit) -> Vec<f64> {
    let mut nu = vec![0.0; g.node_count()];
    let cyc = orbit.graph_cycle(g);
    for &v in &cyc {
        nu[v] += 1.0 / cyc.len() as f64;
    }
    nu
}

/// Which orbit point each word stands for, if any: the orbit's own windows,
/// and words whose representative is an orbit point.
pub fn orbit_atoms(rule: &SubdivisionRule, cyl: &Cylinders, orbit: &PeriodicOrbit) -> Vec<Option<usize>> {
    let mut atoms: Vec<Option<usize>> = cyl
        .reps
        .iter()
        .map(|x| {
            orbit
                .points
                .iter()
                .position(|o| geometry::model_distance(rule, x, o) <= ergopt::POINT_TOL)
        })
        .collect();
    for (i, v) in orbit.graph_cycle(&cyl.graph).into_iter().enumerate() {
        atoms[v] = Some(i);
    }
    atoms
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Distance between `mu` pushed to the sphere and the uniform measure on the
/// orbit. Words outside the orbit's atoms are distinct points off the orbit.
pub fn orbit_distance(mu: &[f64], atoms: &[Option<usize>], period: usize) -> f64 {
    let mut on = vec![0.0; period];
    let mut off = 0.0;
    for (m, a) in mu.iter().zip(atoms) {
        match a {
            Some(i) => on[*i] += m,
            None => off += m,
        }
    }
    0.5 * (off + on.iter().map(|m| (m - 1.0 / period as f64).abs()).sum::<f64>())
}

pub fn zero_temperature_sweep(
    rule: &SubdivisionRule,
    cyl: &Cylinders,
    psi: &PotentialTable,
    orbit: &PeriodicOrbit,
    t_list: &[f64],
) -> Result<Vec<SweepPoint>> {
    if t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Contract("temperatures must increase".into()));
    }
    let g = &cyl.graph;
    let nu = orbit_measure(g, orbit);
    let atoms = orbit_atoms(rule, cyl, orbit);
    t_list
        .iter()
        .map(|&t| {
            let mu = equilibrium_state(g, psi, t)?;
            Ok(SweepPoint {
                t,
                distance: orbit_distance(&mu.weights, &atoms, orbit.period),
                word_distance: total_variation(&mu.weights, &nu),
                mass_on_orbit: mu
                    .weights
                    .iter()
                    .zip(&atoms)
                    .filter(|(_, a)| a.is_some())
                    .map(|(m, _)| m)
                    .sum(),
            })
        })
        .collect()
}

/// `1, 2, 4, ...` up to `max`.
pub fn doubling_schedule(max: f64) -> Vec<f64> {
    std::iter::successors(Some(1.0), |t| Some(t * 2.0))
        .take_while(|&t| t <= max)
        .collect()
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("t,distance,word_distance,mass_on_orbit\n");
    for p in points {
        s.push_str(&format!("{},{:e},{:e},{}\n", p.t, p.distance, p.word_distance, p.mass_on_orbit));
    }
    s
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
    fn constant_potential_gets_locked_on_the_orbit() {
        let (rule, cyl) = setup(3);
        let mut cfg = TpoConfig::new(1.0);
        cfg.epsilon = Some(0.1);
        let r = tpo_pipeline(&rule, &cyl, &Potential::Closed(ClosedForm::constant(1.0)), &cfg).unwrap();
        assert!(r.success, "{:?} margin {}", r.notes, r.margin);
        assert!(r.margin > 0.0);
        assert!((r.q_after - r.orbit_mean).abs() < 1e-9);
        let lock = locking_test(&rule, &cyl, &r.perturbed, 5, 0.0, 7).unwrap();
        assert_eq!(lock.successes, 5);
    }

    #[test]
    fn uniform_at_zero_temperature() {
        let (_, cyl) = setup(2);
        let g = &cyl.graph;
        let psi = PotentialTable::new(2, 1.0, (0..32).map(|i| (i % 5) as f64).collect()).unwrap();
        let mu = equilibrium_state(g, &psi, 0.0).unwrap();
        assert!(mu.weights.iter().all(|&w| (w - 1.0 / 32.0).abs() < 1e-12));
        assert!((mu.log_pressure - 4f64.ln()).abs() < 1e-12);
        let c = PotentialTable::constant(g, 3.0);
        let mu = equilibrium_state(g, &c, 17.0).unwrap();
        assert!(mu.weights.iter().all(|&w| (w - 1.0 / 32.0).abs() < 1e-12));
    }

    #[test]
    fn strict_fixed_point_attracts_the_sweep() {
        let (rule, cyl) = setup(2);
        let g = &cyl.graph;
        let fixed = PeriodicOrbit::from_symbols(&rule, &[2]).unwrap();
        let v = fixed.graph_cycle(g)[0];
        let mut values = vec![0.0; g.node_count()];
        values[v] = 1.0;
        let psi = PotentialTable::new(2, 1.0, values).unwrap();
        let sweep = zero_temperature_sweep(&rule, &cyl, &psi, &fixed, &doubling_schedule(64.0)).unwrap();
        assert_eq!(sweep.len(), 7);
        assert!(sweep.last().unwrap().distance < 1e-6, "{sweep:?}");
        let single = zero_temperature_sweep(&rule, &cyl, &psi, &fixed, &[0.0]).unwrap();
        assert_eq!(single.len(), 1);
    }
}
