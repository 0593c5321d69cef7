//! Iterate the dynamics forward and backward and watch a vertex move while
//! every state stays a valid pattern.

use miquel::dynamics::{evolve, normalize};
use miquel::pattern::{forge_pattern, perturbed_seed, ForgeOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = forge_pattern(
        &perturbed_seed(4, 2, 0, 0.1, 0.1, &mut rng)?,
        ForgeOptions::default(),
    )?;

    let orbit = normalize(&evolve(&p, -6, 6)?);
    println!(
        "{:>3}  {:>10} {:>10}  {:>9}",
        "t", "x(1,1)", "y(1,1)", "residual"
    );
    for (t, s) in orbit.iter() {
        let v = s.vertex(1, 1);
        println!(
            "{t:>3}  {:>10.6} {:>10.6}  {:>9.2e}",
            v.x,
            v.y,
            s.validate().max_residual()
        );
    }
    Ok(())
}
