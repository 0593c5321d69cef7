//! The dynamics written on the exponentiated angles agrees with the
//! geometric construction.

use miquel::coords::{extract_phi, recurrence_step, XField};
use miquel::dynamics::mutate;
use miquel::pattern::{forge_pattern, perturbed_seed, Color, ForgeOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = forge_pattern(
        &perturbed_seed(4, 2, 2, 0.1, 0.1, &mut rng)?,
        ForgeOptions::default(),
    )?;
    let x = XField::from_phi(&extract_phi(&p)?);
    for color in [Color::Black, Color::White] {
        let algebraic = recurrence_step(&x, color)?.to_phi();
        let geometric = extract_phi(&mutate(&p, color)?)?;
        println!(
            "{color:?}: max angle difference {:.2e}",
            algebraic.max_deviation(&geometric)
        );
    }
    Ok(())
}
