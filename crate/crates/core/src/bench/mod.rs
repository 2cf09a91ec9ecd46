//! Metrics, synthetic data and the end-of-stream evaluation protocol.

mod data;
mod metrics;

pub use data::{gen_synthetic, order_stream, Dataset, GaussianSpec, Order, SyntheticSpec};
pub use metrics::{accuracy, ari, Accuracy};

use serde::{Deserialize, Serialize};

use crate::baselines::StreamClusterer;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub ari: f64,
    /// Estimated number of clusters.
    pub k_hat: usize,
    /// Number of prototypes.
    pub p: usize,
}

/// Labels the whole data set with the frozen model and scores it.
pub fn evaluate<M: StreamClusterer + ?Sized>(
    model: &M,
    samples: &[Vec<f64>],
    truth: &[usize],
) -> Result<Evaluation> {
    let pred = model.predict(samples)?;
    Ok(Evaluation {
        ari: ari(&pred, truth)?,
        k_hat: model.n_clusters(),
        p: model.n_categories(),
    })
}

/// Presents the stream to `model` and then evaluates it on `full`.
pub fn train_and_evaluate<M: StreamClusterer + ?Sized>(
    model: &mut M,
    stream: &Dataset,
    full: &Dataset,
) -> Result<Evaluation> {
    for x in &stream.samples {
        model.learn(x)?;
    }
    model.finish()?;
    evaluate(model, &full.samples, &full.truth)
}
