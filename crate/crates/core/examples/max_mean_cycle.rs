//! Maximum mean cycle with the three solvers, then the maximal potential
//! energy of a coordinate potential across levels.

use thurston_ergopt::ergopt::{max_mean_cycle, q_value, ArcGraph, Method};
use thurston_ergopt::potential::{discretize, ClosedForm, Cylinders, Potential};
use thurston_ergopt::subdivision::load_builtin;

fn main() -> thurston_ergopt::Result<()> {
    let g = ArcGraph::new(
        4,
        &[(0, 1, 1.0), (1, 0, 3.0), (1, 2, 2.5), (2, 3, 2.5), (3, 1, 2.0), (2, 2, 2.2)],
    );
    for m in [Method::Karp, Method::Howard, Method::Brute] {
        let r = max_mean_cycle(&g, m)?;
        println!("{m:?}: q={} cycle={:?}", r.q, r.cycle);
    }

    let rule = load_builtin("pillow_lattes")?;
    let phi = Potential::Closed(ClosedForm::x_coordinate());
    for n in 1..=6 {
        let cyl = Cylinders::new(&rule, n)?;
        let t = discretize(&rule, &cyl, &phi)?;
        println!("level {n}: Q = {:.12}", q_value(&cyl.graph, &t, Method::Howard)?.q);
    }
    Ok(())
}
