//! Perturbs a smooth potential so a periodic orbit becomes its unique
//! maximizer, then checks the orbit survives small perturbations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thurston_ergopt::potential::{ClosedForm, Cylinders, Potential};
use thurston_ergopt::subdivision::load_builtin;
use thurston_ergopt::tpo::{locking_test, tpo_pipeline, TpoConfig};

fn main() -> thurston_ergopt::Result<()> {
    let rule = load_builtin("pillow_lattes")?;
    let cyl = Cylinders::new(&rule, 5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..3 {
        let phi = Potential::Closed(ClosedForm::random_smooth(&rule, 6, &mut rng));
        let r = tpo_pipeline(&rule, &cyl, &phi, &TpoConfig::new(1.0))?;
        let lock = locking_test(&rule, &cyl, &r.perturbed, 20, r.epsilon / 10.0, i)?;
        println!(
            "#{i} orbit {} (period {}) success={} margin={:.2e} locked {}/{}",
            r.orbit.word, r.orbit.period, r.success, r.margin, lock.successes, lock.count
        );
    }
    Ok(())
}
