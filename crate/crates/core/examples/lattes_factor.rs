//! Checks that decoding commutes with the dynamics, and compares the pillow
//! model against the rational Lattès map on the Riemann sphere.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thurston_ergopt::geometry::{chordal_distance, lattes_eval, lattes_preimage_polynomial, ProjPoint};
use thurston_ergopt::subdivision::load_builtin;
use thurston_ergopt::symbolic::factor_commutation_check;

fn main() -> thurston_ergopt::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["pillow_lattes", "barycentric", "flap"] {
        let rule = load_builtin(name)?;
        let r = factor_commutation_check(&rule, 500, 12, &mut rng)?;
        println!("{name}: max |pi(sigma w) - f(pi w)| = {:.2e}", r.max_distance);
    }

    // the four postcritical points all land on the fixed point 0
    for z in [ProjPoint::finite(Complex64::new(0.0, 0.0)), ProjPoint::finite(Complex64::new(1.0, 0.0)), ProjPoint::finite(Complex64::new(-1.0, 0.0)), ProjPoint::infinity()] {
        println!("{:?} -> {:?}", z.to_complex(), lattes_eval(&z).to_complex());
    }
    let w = Complex64::new(0.3, 0.2);
    let c = lattes_preimage_polynomial(w);
    println!("preimage polynomial of {w}: {c:?}");
    let a = ProjPoint::finite(w);
    println!("chordal distance to infinity: {:.6}", chordal_distance(&a, &ProjPoint::infinity()));
    Ok(())
}
