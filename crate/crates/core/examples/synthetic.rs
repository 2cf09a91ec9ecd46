//! Trains one model on the synthetic mixture under every ordering.
//!
//! Usage: `cargo run --release --example synthetic -- [ich|iwb|...] [rho_a] [tau] [xi] [seed]`

use std::time::Instant;

use topoartmap::bench::{gen_synthetic, order_stream, train_and_evaluate, Order, SyntheticSpec};
use topoartmap::{Config, TopoArtmap};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, d: &str| args.get(i).cloned().unwrap_or_else(|| d.to_string());
    let config = Config {
        icvi: arg(0, "ich").parse()?,
        rho_a: arg(1, "0.5").parse()?,
        tau: arg(2, "0").parse()?,
        xi: arg(3, "100").parse()?,
        ..Default::default()
    };
    let seed: u64 = arg(4, "1").parse()?;
    let data = gen_synthetic(seed, &SyntheticSpec::default())?;
    for order in Order::ALL {
        let stream = data.permuted(&order_stream(&data.truth, order, seed));
        let mut model = TopoArtmap::new(config.clone())?;
        let start = Instant::now();
        let e = train_and_evaluate(&mut model, &stream, &data)?;
        println!(
            "{order:<18} ari={:.4} k={} p={} rho={:.2} {:.2?}",
            e.ari,
            e.k_hat,
            e.p,
            model.rho_a(),
            start.elapsed()
        );
    }
    Ok(())
}
