//! Calibrated sub-action, normalized potential and the maximizing set for a
//! random smooth potential.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thurston_ergopt::ergopt::{calibrated_subaction, mane_normalize, maximizing_set, q_value, Method, GRAPH_TOL};
use thurston_ergopt::potential::{discretize, ClosedForm, Cylinders, Potential};
use thurston_ergopt::subdivision::load_builtin;

fn main() -> thurston_ergopt::Result<()> {
    let rule = load_builtin("pillow_lattes")?;
    let cyl = Cylinders::new(&rule, 5)?;
    let phi = ClosedForm::random_smooth(&rule, 6, &mut ChaCha8Rng::seed_from_u64(3));
    let table = discretize(&rule, &cyl, &Potential::Closed(phi))?;

    let r = q_value(&cyl.graph, &table, Method::Howard)?;
    let u = calibrated_subaction(&cyl.graph, &table, r.q, 10_000_000, GRAPH_TOL)?;
    println!("Q = {}  residual {:.1e} after {} iterations", r.q, u.residual, u.iterations);

    let norm = mane_normalize(&cyl.graph, &table, &u, r.q, GRAPH_TOL)?;
    println!("max of normalized potential: {:.1e}", norm.max_entry());
    let k = maximizing_set(&cyl.graph, &norm, 1e-9)?;
    for v in k {
        println!("  {}", cyl.graph.words[v]);
    }
    Ok(())
}
