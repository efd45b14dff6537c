//! The one-sided shift coding each rule: transitions, word counts and
//! periodic point counts.

use thurston_ergopt::subdivision::load_builtin;
use thurston_ergopt::symbolic::{build_transition, enumerate_words};

fn main() -> thurston_ergopt::Result<()> {
    for name in ["pillow_lattes", "barycentric", "flap"] {
        let rule = load_builtin(name)?;
        let a = build_transition(&rule)?;
        println!("{name}: {} symbols, column sums {:?}", a.len(), a.column_sums());
        for n in 1..=4 {
            let words = enumerate_words(&a, n)?.len();
            println!(
                "  n={n} words={words} tiles={} tr(A^n)={}",
                rule.tile_count(n as u32),
                a.trace_power(n)
            );
        }
    }
    Ok(())
}
