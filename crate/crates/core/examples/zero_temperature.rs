//! Gibbs measures of t·φ' concentrate on the locked orbit as t grows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thurston_ergopt::potential::{ClosedForm, Cylinders, Potential};
use thurston_ergopt::subdivision::load_builtin;
use thurston_ergopt::tpo::{doubling_schedule, sweep_csv, tpo_pipeline, zero_temperature_sweep, TpoConfig};

fn main() -> thurston_ergopt::Result<()> {
    let rule = load_builtin("pillow_lattes")?;
    let cyl = Cylinders::new(&rule, 5)?;
    let phi = Potential::Closed(ClosedForm::random_smooth(&rule, 6, &mut ChaCha8Rng::seed_from_u64(2)));
    let r = tpo_pipeline(&rule, &cyl, &phi, &TpoConfig::new(1.0))?;
    println!("orbit {}", r.orbit.word);
    let sweep = zero_temperature_sweep(&rule, &cyl, &r.perturbed, &r.orbit, &doubling_schedule(256.0))?;
    print!("{}", sweep_csv(&sweep));
    Ok(())
}
