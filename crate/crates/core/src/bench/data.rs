use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned Gaussian component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: Vec<f64>,
    pub sd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub clusters: Vec<GaussianSpec>,
    /// Split as evenly as possible; the first clusters take the remainder.
    pub n_samples: usize,
}

impl Default for SyntheticSpec {
    /// Two clusters on top, five along the bottom.
    fn default() -> Self {
        let means = [
            [3.0, 8.0],
            [7.0, 8.0],
            [1.0, 2.0],
            [3.0, 2.0],
            [5.0, 2.0],
            [7.0, 2.0],
            [9.0, 2.0],
        ];
        let sd = 0.35;
        Self {
            clusters: means
                .iter()
                .map(|m| GaussianSpec {
                    mean: m.to_vec(),
                    sd: vec![sd; 2],
                })
                .collect(),
            n_samples: 1600,
        }
    }
}

impl SyntheticSpec {
    pub fn counts(&self) -> Vec<usize> {
        let k = self.clusters.len();
        (0..k)
            .map(|i| self.n_samples / k + usize::from(i < self.n_samples % k))
            .collect()
    }
}

/// Samples with their ground-truth labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Dataset {
    pub samples: Vec<Vec<f64>>,
    pub truth: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.samples.first().map(Vec::len)
    }

    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            samples: order.iter().map(|&i| self.samples[i].clone()).collect(),
            truth: order.iter().map(|&i| self.truth[i]).collect(),
        }
    }
}

/// Draws the Gaussian mixture; samples come out grouped by cluster.
pub fn gen_synthetic(seed: u64, spec: &SyntheticSpec) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Dataset::default();
    for (label, (g, n)) in spec.clusters.iter().zip(spec.counts()).enumerate() {
        if g.mean.len() != g.sd.len() {
            return Err(Error::DimensionMismatch {
                expected: g.mean.len(),
                got: g.sd.len(),
            });
        }
        let dists = g
            .mean
            .iter()
            .zip(&g.sd)
            .map(|(&m, &s)| Normal::new(m, s).map_err(|e| Error::InvalidConfig(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        for _ in 0..n {
            data.samples
                .push(dists.iter().map(|d| d.sample(&mut rng)).collect());
            data.truth.push(label);
        }
    }
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// One cluster after another, in label order.
    ClassIncremental,
    /// Clusters 0 and 1 one after the other, then the rest shuffled.
    Mixed,
    #[default]
    Random,
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "class_incremental" | "cluster_by_cluster" => Ok(Order::ClassIncremental),
            "mixed" => Ok(Order::Mixed),
            "random" => Ok(Order::Random),
            other => Err(Error::InvalidConfig(format!("unknown order '{other}'"))),
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Order::ClassIncremental => "class_incremental",
            Order::Mixed => "mixed",
            Order::Random => "random",
        })
    }
}

impl Order {
    pub const ALL: [Order; 3] = [Order::ClassIncremental, Order::Mixed, Order::Random];
}

/// Presentation order as a permutation of sample indices. Within-cluster
/// order is shuffled too.
pub fn order_stream(truth: &[usize], mode: Order, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..truth.len()).collect();
    idx.shuffle(&mut rng);
    match mode {
        Order::Random => {}
        Order::ClassIncremental => idx.sort_by_key(|&i| truth[i]),
        Order::Mixed => {
            idx.sort_by_key(|&i| truth[i].min(2));
            let head = idx.iter().take_while(|&&i| truth[i] < 2).count();
            idx[head..].shuffle(&mut rng);
        }
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_has_1600_samples_over_7_labels() {
        let d = gen_synthetic(1, &SyntheticSpec::default()).unwrap();
        assert_eq!(d.len(), 1600);
        let mut labels = d.truth.clone();
        labels.dedup();
        assert_eq!(labels, (0..7).collect::<Vec<_>>());
        assert_eq!(SyntheticSpec::default().counts()[..2], [229, 229]);
    }

    #[test]
    fn same_seed_same_data() {
        let spec = SyntheticSpec::default();
        assert_eq!(
            gen_synthetic(9, &spec).unwrap(),
            gen_synthetic(9, &spec).unwrap()
        );
        assert_ne!(
            gen_synthetic(9, &spec).unwrap(),
            gen_synthetic(10, &spec).unwrap()
        );
    }

    #[test]
    fn class_incremental_blocks_are_contiguous() {
        let d = gen_synthetic(2, &SyntheticSpec::default()).unwrap();
        let s = d.permuted(&order_stream(&d.truth, Order::ClassIncremental, 3));
        assert!(s.truth.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn mixed_keeps_top_two_first() {
        let d = gen_synthetic(2, &SyntheticSpec::default()).unwrap();
        let s = d.permuted(&order_stream(&d.truth, Order::Mixed, 3));
        let head = 2 * 229;
        assert!(s.truth[..229].iter().all(|&l| l == 0));
        assert!(s.truth[229..head].iter().all(|&l| l == 1));
        assert!(s.truth[head..].iter().all(|&l| l >= 2));
        assert!(s.truth[head..].windows(2).any(|w| w[0] > w[1]));
    }

    #[test]
    fn order_parsing() {
        assert_eq!(
            "class-incremental".parse::<Order>().unwrap(),
            Order::ClassIncremental
        );
        assert!("sorted".parse::<Order>().is_err());
    }
}
