use serde::{Deserialize, Serialize};

use super::StreamClusterer;
use crate::error::{Error, Result};
use crate::stats::sq_dist;

/// How the `k` centroids are initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seeding {
    /// The first `k` samples.
    FirstK,
    /// Buffer the first `size` samples, pick `k` of them by farthest-point
    /// traversal, then replay the buffer.
    MaximinBuffer { size: usize },
}

/// MacQueen sequential k-means.
#[derive(Debug, Clone, PartialEq)]
pub struct Skm {
    k: usize,
    seeding: Seeding,
    centroids: Vec<Vec<f64>>,
    counts: Vec<u64>,
    buffer: Vec<Vec<f64>>,
}

impl Skm {
    pub fn new(k: usize, seeding: Seeding) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("k must be positive".into()));
        }
        if let Seeding::MaximinBuffer { size } = seeding {
            if size < k {
                return Err(Error::InvalidConfig("seeding buffer smaller than k".into()));
            }
        }
        Ok(Self {
            k,
            seeding,
            centroids: Vec::new(),
            counts: Vec::new(),
            buffer: Vec::new(),
        })
    }

    /// Buffer of ten samples per centroid.
    pub fn with_default_seeding(k: usize) -> Result<Self> {
        Self::new(k, Seeding::MaximinBuffer { size: 10 * k })
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn nearest(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.centroids.iter().enumerate() {
            let d = sq_dist(x, c);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Winner update `c ← c + (x - c)/(n + 1)`.
    pub fn update(&mut self, x: &[f64]) -> usize {
        let i = self.nearest(x);
        let n = self.counts[i] as f64;
        for (c, &v) in self.centroids[i].iter_mut().zip(x) {
            *c += (v - *c) / (n + 1.0);
        }
        self.counts[i] += 1;
        i
    }

    fn seed_from_buffer(&mut self) {
        let buffer = std::mem::take(&mut self.buffer);
        let mut chosen = vec![0usize];
        let mut gap: Vec<f64> = buffer.iter().map(|x| sq_dist(x, &buffer[0])).collect();
        while chosen.len() < self.k.min(buffer.len()) {
            let mut far = 0;
            for (i, &g) in gap.iter().enumerate() {
                if g > gap[far] {
                    far = i;
                }
            }
            chosen.push(far);
            for (g, x) in gap.iter_mut().zip(&buffer) {
                *g = g.min(sq_dist(x, &buffer[far]));
            }
        }
        self.centroids = chosen.iter().map(|&i| buffer[i].clone()).collect();
        self.counts = vec![1; chosen.len()];
        for (i, x) in buffer.iter().enumerate() {
            if !chosen.contains(&i) {
                self.update(x);
            }
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        let d = self.centroids.first().or(self.buffer.first()).map(Vec::len);
        match d {
            Some(d) if d != x.len() => Err(Error::DimensionMismatch {
                expected: d,
                got: x.len(),
            }),
            _ => Ok(()),
        }
    }
}

impl StreamClusterer for Skm {
    fn learn(&mut self, x: &[f64]) -> Result<()> {
        self.check_dim(x)?;
        match self.seeding {
            Seeding::FirstK if self.centroids.len() < self.k => {
                self.centroids.push(x.to_vec());
                self.counts.push(1);
            }
            Seeding::MaximinBuffer { size } if self.centroids.is_empty() => {
                self.buffer.push(x.to_vec());
                if self.buffer.len() >= size {
                    self.seed_from_buffer();
                }
            }
            _ => {
                self.update(x);
            }
        }
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        if self.centroids.is_empty() && !self.buffer.is_empty() {
            self.seed_from_buffer();
        }
        Ok(())
    }

    fn predict_one(&self, x: &[f64]) -> Result<usize> {
        if self.centroids.is_empty() {
            return Err(Error::EmptyModel);
        }
        self.check_dim(x)?;
        Ok(self.nearest(x))
    }

    fn n_clusters(&self) -> usize {
        self.centroids.len()
    }

    fn n_categories(&self) -> usize {
        self.centroids.len()
    }
}
