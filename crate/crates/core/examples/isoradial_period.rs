//! Patterns whose circles all have the same radius come back to their
//! starting shape after a number of steps fixed by the fundamental domain.

use miquel::coords::extract_phi;
use miquel::dynamics::evolve;
use miquel::invariants::isoradial_period;
use miquel::pattern::{forge_pattern, perturbed_seed, ForgeOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let opts = ForgeOptions {
        isoradial: true,
        ..ForgeOptions::default()
    };
    for (m, n, s) in [(2, 2, 0), (4, 2, 0), (4, 2, 2)] {
        let p = forge_pattern(&perturbed_seed(m, n, s, 0.1, 0.1, &mut rng)?, opts)?;
        let period = isoradial_period(m, n, s);
        let phi0 = extract_phi(&p)?;
        let distances: Vec<String> = evolve(&p, 1, period as i64)?
            .states()
            .iter()
            .map(|q| extract_phi(q).map(|f| format!("{:.1e}", f.max_deviation(&phi0))))
            .collect::<miquel::Result<_>>()?;
        println!("({m},{n},{s}) period {period}: {}", distances.join(" "));
    }
    Ok(())
}
