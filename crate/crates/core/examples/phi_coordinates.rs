//! Angle coordinates: extract the field of a pattern, check the conditions
//! that characterize valid fields, and rebuild the pattern from it.

use miquel::coords::{check_conditions, extract_phi, gauge_align, reconstruct};
use miquel::pattern::{forge_pattern, perturbed_seed, ForgeOptions};
use miquel::tol;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, n, s) in [(2, 2, 0), (4, 2, 2), (4, 1, 1)] {
        let p = forge_pattern(
            &perturbed_seed(m, n, s, 0.1, 0.1, &mut rng)?,
            ForgeOptions::default(),
        )?;
        let phi = extract_phi(&p)?;
        let report = check_conditions(&phi, tol::CONDITIONS);
        println!("({m},{n},{s})\n{report}");
        let rebuilt = reconstruct(&phi)?;
        let aligned = gauge_align(&p)?;
        println!(
            "round trip displacement {:.2e}\n",
            rebuilt.max_displacement(&aligned)
        );
    }
    Ok(())
}
