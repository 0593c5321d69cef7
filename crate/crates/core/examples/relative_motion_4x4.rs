//! Relative motion of two vertices of a 4×4 pattern over a long orbit,
//! written as an SVG plot.
//!
//! ```text
//! cargo run --release --example relative_motion_4x4 -- motion.svg
//! ```

use miquel::cli::svg_document;
use miquel::dynamics::{evolve, relative_motion};
use miquel::pattern::{forge_pattern, perturbed_seed, ForgeOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "relative_motion_4x4.svg".into());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let p = forge_pattern(
        &perturbed_seed(4, 4, 0, 0.08, 0.05, &mut rng)?,
        ForgeOptions::default(),
    )?;
    let orbit = evolve(&p, 0, 400)?;
    // even times only, so the plot shows one of the two interleaved curves
    let motion: Vec<_> = relative_motion(&orbit, (2, 2), (0, 0))
        .into_iter()
        .step_by(2)
        .collect();
    std::fs::write(&path, svg_document(&motion, &[]))?;
    println!("{} points written to {path}", motion.len());
    Ok(())
}
