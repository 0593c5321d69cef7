//! Quantities carried along an orbit: the signed angle sums around the two
//! generating loops flip sign at each step, the monodromy ratio does not
//! move at all.

use miquel::dynamics::evolve;
use miquel::invariants::{gamma_generators, monodromy_ratio};
use miquel::pattern::{forge_pattern, perturbed_seed, ForgeOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let p = forge_pattern(
        &perturbed_seed(2, 4, 0, 0.1, 0.1, &mut rng)?,
        ForgeOptions::default(),
    )?;
    println!(
        "{:>3}  {:>9} {:>9}  {:>12} {:>12}",
        "t", "gamma_h", "gamma_v", "ratio_re", "ratio_im"
    );
    for (t, s) in evolve(&p, 0, 8)?.iter() {
        let g = gamma_generators(s)?;
        let (re, im) = monodromy_ratio(s)?;
        println!(
            "{t:>3}  {:>9.6} {:>9.6}  {re:>12.9} {im:>12.9}",
            g.horizontal, g.vertical
        );
    }
    Ok(())
}
