//! Runs the comparison methods on the synthetic mixture under every ordering.

use topoartmap::baselines::{Dvfa, DvfaParams, Skm, StreamClusterer, TopoFa, TopoFaParams};
use topoartmap::bench::{gen_synthetic, order_stream, train_and_evaluate, Order, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = 1;
    let data = gen_synthetic(seed, &SyntheticSpec::default())?;
    for order in Order::ALL {
        let stream = data.permuted(&order_stream(&data.truth, order, seed));
        let mut rows: Vec<(String, Box<dyn StreamClusterer>)> =
            vec![("skm".into(), Box::new(Skm::with_default_seeding(7)?))];
        for i in 0..10 {
            let rho = i as f64 / 10.0;
            rows.push((
                format!("dvfa {rho:.1}"),
                Box::new(Dvfa::new(DvfaParams {
                    rho_ub: rho,
                    rho_lb: (rho - 0.09f64).max(0.0),
                    ..Default::default()
                })?),
            ));
            rows.push((
                format!("topofa {rho:.1}"),
                Box::new(TopoFa::new(TopoFaParams {
                    rho,
                    phi: 5,
                    beta_2: 0.6,
                    ..Default::default()
                })?),
            ));
        }
        for (name, mut model) in rows {
            let e = train_and_evaluate(model.as_mut(), &stream, &data)?;
            println!(
                "{order:<18} {name:<12} ari={:.4} k={} p={}",
                e.ari, e.k_hat, e.p
            );
        }
    }
    Ok(())
}
