//! The three closing procedures on the pillow map.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thurston_ergopt::closing::{bound_by_gap, bq_search, local_anosov_close, GapBoundConfig, GapSpec};
use thurston_ergopt::ergopt::{calibrated_subaction, mane_normalize, maximizing_set, q_value, Method, GRAPH_TOL};
use thurston_ergopt::potential::{discretize, ClosedForm, Cylinders, Potential};
use thurston_ergopt::subdivision::load_builtin;
use thurston_ergopt::symbolic::{build_transition, TileWord};

fn main() -> thurston_ergopt::Result<()> {
    let rule = load_builtin("pillow_lattes")?;
    let a = build_transition(&rule)?;

    // an admissible word whose ends are close, closed into a periodic orbit
    let w = TileWord::new(vec![0, 1, 5, 2, 0, 1]);
    let r = local_anosov_close(&rule, &a, &w, 4, 1.0, 0.0)?;
    println!("anosov: {} period {} slope {:.6} (-log 2 = {:.6})", r.orbit.word, r.orbit.period, r.shadow.slope, -(2f64.ln()));

    let cyl = Cylinders::new(&rule, 5)?;
    let phi = ClosedForm::random_smooth(&rule, 6, &mut ChaCha8Rng::seed_from_u64(11));
    let t = discretize(&rule, &cyl, &Potential::Closed(phi))?;
    let q = q_value(&cyl.graph, &t, Method::Howard)?.q;
    let u = calibrated_subaction(&cyl.graph, &t, q, 10_000_000, GRAPH_TOL)?;
    let norm = mane_normalize(&cyl.graph, &t, &u, q, GRAPH_TOL)?;
    let k = maximizing_set(&cyl.graph, &norm, 1e-9)?;

    for eps in [0.2, 0.1, 0.05] {
        let b = bq_search(&rule, &cyl, &k, 2.0, eps)?;
        println!("bq eps={eps}: period {} <= bound {}", b.orbit.period, b.period_bound);
    }

    let cfg = GapBoundConfig {
        spec: GapSpec::new(1.0, 1.0)?,
        alpha: 1.0,
        tau: 1.0,
        kappa: 2.0,
        epsilon: 0.1,
    };
    let g = bound_by_gap(&rule, &cyl, &k, &cfg)?;
    println!("gap: {} after {} steps", g.orbit.word, g.trace.len());
    for s in &g.trace {
        println!("  p={} gap={:?} lhs={:.3e} rhs={:.3e}", s.period, s.gap, s.lhs, s.rhs);
    }
    Ok(())
}
