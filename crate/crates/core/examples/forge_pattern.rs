//! Relax a randomly perturbed grid into a valid circle pattern and print it
//! as JSON.
//!
//! ```text
//! cargo run --example forge_pattern -- 4 2 2 7
//! ```

use miquel::pattern::{forge_pattern, perturbed_seed, ForgeOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> miquel::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let [m, n, s, seed] = match args.as_slice() {
        [m, n, s, seed] => [*m, *n, *s, *seed],
        [] => [4, 2, 2, 7],
        _ => panic!("usage: forge_pattern M N S SEED"),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = perturbed_seed(m as usize, n as usize, s as usize, 0.15, 0.1, &mut rng)?;
    let before = start.validate();
    let p = forge_pattern(&start, ForgeOptions::default())?;
    let after = p.validate();
    eprintln!(
        "worst concyclicity {:.2e} -> {:.2e}",
        before.max_residual(),
        after.max_residual()
    );
    println!("{}", p.to_json());
    Ok(())
}
