use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::sq_dist;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => sq_dist(a, b).sqrt(),
            Metric::Cosine => {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
                let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
                if na == 0.0 || nb == 0.0 {
                    1.0
                } else {
                    1.0 - dot / (na * nb)
                }
            }
        }
    }
}

/// Labelled-prototype nearest-neighbour classifier.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NearestNeighbor {
    metric: Metric,
    prototypes: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl NearestNeighbor {
    pub fn new(metric: Metric) -> Self {
        Self {
            metric,
            ..Default::default()
        }
    }

    pub fn add(&mut self, x: &[f64], label: usize) -> Result<()> {
        if let Some(p) = self.prototypes.first() {
            if p.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: p.len(),
                    got: x.len(),
                });
            }
        }
        self.prototypes.push(x.to_vec());
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }

    /// Label of the nearest prototype; ties go to the earliest one.
    pub fn classify(&self, x: &[f64]) -> Result<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, p) in self.prototypes.iter().enumerate() {
            if p.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: p.len(),
                    got: x.len(),
                });
            }
            let d = self.metric.distance(x, p);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| self.labels[i]).ok_or(Error::EmptyModel)
    }

    pub fn classify_all(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        xs.iter().map(|x| self.classify(x)).collect()
    }
}
