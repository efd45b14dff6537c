//! A coboundary has zero sums on every cycle; a generic potential does not.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thurston_ergopt::ergopt::livsic::coboundary;
use thurston_ergopt::ergopt::livsic_test;
use thurston_ergopt::potential::PotentialTable;
use thurston_ergopt::subdivision::load_builtin;
use thurston_ergopt::symbolic::{build_transition, CylinderGraph};

fn main() -> thurston_ergopt::Result<()> {
    let rule = load_builtin("barycentric")?;
    let a = build_transition(&rule)?;
    let coarse = CylinderGraph::new(&a, 2)?;
    let fine = CylinderGraph::new(&a, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let v = PotentialTable::new(2, 1.0, (0..coarse.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let psi = coboundary(&coarse, &v, &fine)?;
    let yes = livsic_test(&a, &fine, &psi, 6, 1e-9)?;
    println!("v o sigma - v: coboundary={} max|S_p|={:.1e}", yes.coboundary_like, yes.max_cycle_sum);

    let noise = PotentialTable::new(3, 1.0, (0..fine.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
    let no = livsic_test(&a, &fine, &noise, 6, 1e-9)?;
    println!("noise: coboundary={} Q+={:.3} Q-={:.3}", no.coboundary_like, no.q_plus, no.q_minus);
    Ok(())
}
