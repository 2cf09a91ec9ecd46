//! Frequency / mean / compactness triplets with exact incremental algebra.
//!
//! Compactness is the sum of squared deviations from the mean. All updates
//! are pooled-variance identities, so adding, merging and splitting agree
//! with batch recomputation up to rounding.

use crate::error::{Error, Result};

/// Summary statistics of a set of raw samples.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ClusterStats {
    pub n: usize,
    pub mu: Vec<f64>,
    pub cp: f64,
}

/// Whole-stream statistics; same algebra as a single cluster.
pub type GrandStats = ClusterStats;

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl ClusterStats {
    pub fn init(x: &[f64]) -> Self {
        Self {
            n: 1,
            mu: x.to_vec(),
            cp: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    /// Absorbs one sample. The compactness increment uses the mean before
    /// the update.
    pub fn add_sample(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let n = self.n as f64;
        self.cp += n / (n + 1.0) * sq_dist(x, &self.mu);
        for (m, &xi) in self.mu.iter_mut().zip(x) {
            *m = n / (n + 1.0) * *m + xi / (n + 1.0);
        }
        self.n += 1;
        Ok(())
    }

    /// Copy of `self` with `x` absorbed.
    pub fn with_sample(&self, x: &[f64]) -> Result<Self> {
        let mut s = self.clone();
        s.add_sample(x)?;
        Ok(s)
    }

    /// Pooled statistics of the union of two disjoint sample sets.
    pub fn merge(&self, other: &ClusterStats) -> Self {
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let mu = self
            .mu
            .iter()
            .zip(&other.mu)
            .map(|(a, b)| na / n * a + nb / n * b)
            .collect();
        Self {
            n: self.n + other.n,
            mu,
            cp: self.cp + other.cp + na * nb / n * sq_dist(&other.mu, &self.mu),
        }
    }

    /// Statistics of `self` with the samples summarized by `part` removed.
    /// `part` must have been merged into `self` and be strictly smaller.
    pub fn split(&self, part: &ClusterStats) -> Result<Self> {
        if part.n >= self.n {
            return Err(Error::InvalidSplit {
                whole: self.n,
                part: part.n,
            });
        }
        let (nw, np) = (self.n as f64, part.n as f64);
        let rest = nw - np;
        let mu = self
            .mu
            .iter()
            .zip(&part.mu)
            .map(|(w, p)| nw / rest * w - np / rest * p)
            .collect();
        let mut cp = self.cp - part.cp - nw * np / rest * sq_dist(&part.mu, &self.mu);
        if cp < 0.0 {
            if cp < -(1e-6 * self.cp + 1e-9) {
                return Err(Error::Inconsistent(format!(
                    "split produced compactness {cp} from {}",
                    self.cp
                )));
            }
            cp = 0.0;
        }
        Ok(Self {
            n: self.n - part.n,
            mu,
            cp,
        })
    }

    /// Batch statistics of a non-empty sample set.
    pub fn from_samples<'a, I>(samples: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let samples: Vec<&[f64]> = samples.into_iter().collect();
        let first = samples.first()?;
        let n = samples.len();
        let mut mu = vec![0.0; first.len()];
        for s in &samples {
            for (m, v) in mu.iter_mut().zip(s.iter()) {
                *m += v;
            }
        }
        mu.iter_mut().for_each(|m| *m /= n as f64);
        let cp = samples.iter().map(|s| sq_dist(s, &mu)).sum();
        Some(Self { n, mu, cp })
    }
}
