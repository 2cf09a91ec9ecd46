//! Writes a small non-negative "embedding-like" CSV: 4 classes of 50
//! samples in 32 dimensions, each class dominated by its own block of 8
//! features over a shared low background.
//!
//! Usage: `cargo run --example embedding_fixture -- out.csv [seed]`

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const CLASSES: usize = 4;
const PER_CLASS: usize = 50;
const DIM: usize = 32;
const BLOCK: usize = DIM / CLASSES;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().ok_or("missing output path")?;
    let seed: u64 = args.get(1).map_or(Ok(7), |s| s.parse())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.08)?;
    let prototypes: Vec<Vec<f64>> = (0..CLASSES)
        .map(|c| {
            (0..DIM)
                .map(|i| {
                    if i / BLOCK == c {
                        rng.random_range(0.6..1.4)
                    } else {
                        rng.random_range(0.0..0.3)
                    }
                })
                .collect()
        })
        .collect();
    let mut out = std::fs::File::create(path)?;
    let header: Vec<String> = (0..DIM)
        .map(|i| format!("f{i}"))
        .chain(["label".into()])
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..CLASSES * PER_CLASS {
        let c = i % CLASSES;
        let scale: f64 = rng.random_range(0.7..1.5);
        let row: Vec<String> = prototypes[c]
            .iter()
            .map(|&p| format!("{:.6}", (scale * p + noise.sample(&mut rng)).max(0.0)))
            .chain([c.to_string()])
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
