//! Sum-of-squares validity indices over cached per-cluster statistics.
//!
//! The partition keeps per-cluster `(n, μ, CP)`, whole-stream statistics and
//! the matrix of squared centroid distances. A sample assignment touches one
//! cluster, so only one distance row is recomputed.

use super::IndexKind;
use crate::error::{Error, Result};
use crate::stats::{sq_dist, ClusterStats};

/// Floor applied to vanishing denominators (squared distances, scatter).
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// Read access shared by the cached partition and its one-cluster overlay.
pub(crate) trait PartitionView {
    fn len(&self) -> usize;
    fn stats(&self, i: usize) -> Option<&ClusterStats>;
    fn dist2(&self, i: usize, j: usize) -> f64;
    fn grand(&self) -> Option<&ClusterStats>;
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Partition {
    clusters: Vec<Option<ClusterStats>>,
    grand: Option<ClusterStats>,
    dist2: Vec<Vec<f64>>,
}

impl PartitionView for Partition {
    fn len(&self) -> usize {
        self.clusters.len()
    }
    fn stats(&self, i: usize) -> Option<&ClusterStats> {
        self.clusters[i].as_ref()
    }
    fn dist2(&self, i: usize, j: usize) -> f64 {
        self.dist2[i][j]
    }
    fn grand(&self) -> Option<&ClusterStats> {
        self.grand.as_ref()
    }
}

/// The cached partition with up to two clusters replaced.
struct Overlay<'a> {
    base: &'a Partition,
    patches: Vec<(usize, Option<ClusterStats>, Vec<f64>)>,
    grand: Option<ClusterStats>,
}

impl Overlay<'_> {
    fn patch(&self, i: usize) -> Option<&(usize, Option<ClusterStats>, Vec<f64>)> {
        self.patches.iter().find(|p| p.0 == i)
    }
}

impl PartitionView for Overlay<'_> {
    fn len(&self) -> usize {
        self.base.len()
    }
    fn stats(&self, i: usize) -> Option<&ClusterStats> {
        match self.patch(i) {
            Some(p) => p.1.as_ref(),
            None => self.base.stats(i),
        }
    }
    fn dist2(&self, i: usize, j: usize) -> f64 {
        match (self.patch(i), self.patch(j)) {
            (Some(a), Some(b)) => match (&a.1, &b.1) {
                (Some(x), Some(y)) if i != j => sq_dist(&x.mu, &y.mu),
                _ => 0.0,
            },
            (Some(a), None) => a.2[j],
            (None, Some(b)) => b.2[i],
            (None, None) => self.base.dist2[i][j],
        }
    }
    fn grand(&self) -> Option<&ClusterStats> {
        self.grand.as_ref().or(self.base.grand.as_ref())
    }
}

impl Partition {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of cluster slots, including empty ones.
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn live(&self) -> usize {
        self.clusters.iter().filter(|c| c.is_some()).count()
    }

    pub fn cluster(&self, i: usize) -> Option<&ClusterStats> {
        self.clusters[i].as_ref()
    }

    pub fn clusters(&self) -> &[Option<ClusterStats>] {
        &self.clusters
    }

    pub fn grand(&self) -> Option<&ClusterStats> {
        self.grand.as_ref()
    }

    fn distance_row(&self, mu: Option<&[f64]>) -> Vec<f64> {
        self.clusters
            .iter()
            .map(|c| match (c, mu) {
                (Some(c), Some(mu)) => sq_dist(&c.mu, mu),
                _ => 0.0,
            })
            .collect()
    }

    fn refresh_row(&mut self, i: usize) {
        let mut row = self.distance_row(self.clusters[i].as_ref().map(|c| c.mu.as_slice()));
        row[i] = 0.0;
        for (j, &v) in row.iter().enumerate() {
            self.dist2[j][i] = v;
        }
        self.dist2[i] = row;
    }

    /// Appends a cluster slot and returns its index.
    pub fn push(&mut self, stats: Option<ClusterStats>) -> usize {
        self.clusters.push(stats);
        for row in &mut self.dist2 {
            row.push(0.0);
        }
        let k = self.clusters.len();
        self.dist2.push(vec![0.0; k]);
        self.refresh_row(k - 1);
        k - 1
    }

    /// Removes slot `i`; later slots shift down.
    pub fn remove(&mut self, i: usize) {
        self.clusters.remove(i);
        self.dist2.remove(i);
        for row in &mut self.dist2 {
            row.remove(i);
        }
    }

    pub fn set(&mut self, i: usize, stats: Option<ClusterStats>) {
        self.clusters[i] = stats;
        self.refresh_row(i);
    }

    fn grand_with(&self, x: &[f64]) -> Result<ClusterStats> {
        match &self.grand {
            Some(g) => g.with_sample(x),
            None => Ok(ClusterStats::init(x)),
        }
    }

    /// Records `x` in cluster `i` and in the grand statistics.
    pub fn add_sample(&mut self, i: usize, x: &[f64]) -> Result<()> {
        self.grand = Some(self.grand_with(x)?);
        let updated = match &self.clusters[i] {
            Some(c) => c.with_sample(x)?,
            None => ClusterStats::init(x),
        };
        self.set(i, Some(updated));
        Ok(())
    }

    /// Merges slot `absorb` into `keep`, leaving `absorb` empty.
    pub fn merge(&mut self, keep: usize, absorb: usize) {
        let merged = match (&self.clusters[keep], &self.clusters[absorb]) {
            (Some(a), Some(b)) => Some(a.merge(b)),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        self.set(keep, merged);
        self.set(absorb, None);
    }

    /// Moves the samples summarized by `part` from slot `from` to slot `to`.
    pub fn move_part(&mut self, from: usize, to: usize, part: &ClusterStats) -> Result<()> {
        let (remaining, target) = self.moved(from, to, part)?;
        self.set(from, remaining);
        self.set(to, Some(target));
        Ok(())
    }

    pub fn value(&self, kind: IndexKind) -> Option<f64> {
        evaluate(kind, self)
    }

    fn overlay(
        &self,
        patches: Vec<(usize, Option<ClusterStats>)>,
        grand: Option<ClusterStats>,
    ) -> Overlay<'_> {
        let patches = patches
            .into_iter()
            .map(|(i, stats)| {
                let row = self.distance_row(stats.as_ref().map(|c| c.mu.as_slice()));
                (i, stats, row)
            })
            .collect();
        Overlay {
            base: self,
            patches,
            grand,
        }
    }

    /// Index value if `x` were added to slot `i`; `self` is untouched.
    pub fn value_with_sample(&self, kind: IndexKind, i: usize, x: &[f64]) -> Result<Option<f64>> {
        let stats = match &self.clusters[i] {
            Some(c) => c.with_sample(x)?,
            None => ClusterStats::init(x),
        };
        let view = self.overlay(vec![(i, Some(stats))], Some(self.grand_with(x)?));
        Ok(evaluate(kind, &view))
    }

    /// Index value if slot `absorb` were merged into `keep`.
    pub fn value_with_merge(&self, kind: IndexKind, keep: usize, absorb: usize) -> Option<f64> {
        let merged = match (&self.clusters[keep], &self.clusters[absorb]) {
            (Some(a), Some(b)) => Some(a.merge(b)),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        evaluate(
            kind,
            &self.overlay(vec![(keep, merged), (absorb, None)], None),
        )
    }

    /// Index value if `part` moved from slot `from` to slot `to`.
    pub fn value_with_move(
        &self,
        kind: IndexKind,
        from: usize,
        to: usize,
        part: &ClusterStats,
    ) -> Result<Option<f64>> {
        let (remaining, target) = self.moved(from, to, part)?;
        Ok(evaluate(
            kind,
            &self.overlay(vec![(from, remaining), (to, Some(target))], None),
        ))
    }

    fn moved(
        &self,
        from: usize,
        to: usize,
        part: &ClusterStats,
    ) -> Result<(Option<ClusterStats>, ClusterStats)> {
        let source = self.clusters[from]
            .as_ref()
            .ok_or_else(|| Error::Inconsistent(format!("moving out of empty cluster {from}")))?;
        let remaining = if source.n == part.n {
            None
        } else {
            Some(source.split(part)?)
        };
        let target = match &self.clusters[to] {
            Some(t) => t.merge(part),
            None => part.clone(),
        };
        Ok((remaining, target))
    }
}

pub(crate) fn evaluate<V: PartitionView>(kind: IndexKind, view: &V) -> Option<f64> {
    let live: Vec<usize> = (0..view.len())
        .filter(|&i| view.stats(i).is_some())
        .collect();
    if live.len() < 2 {
        return None;
    }
    let grand = view.grand()?;
    let k = live.len() as f64;
    let n = grand.n as f64;
    let stats = |i: usize| view.stats(i).expect("live cluster");
    let ss_w: f64 = live.iter().map(|&i| stats(i).cp).sum();

    let value = match kind {
        IndexKind::Ch | IndexKind::Wb => {
            let ss_b: f64 = live
                .iter()
                .map(|&i| stats(i).n as f64 * sq_dist(&stats(i).mu, &grand.mu))
                .sum();
            if kind == IndexKind::Ch {
                let within = if n > k { ss_w / (n - k) } else { 0.0 };
                (ss_b / (k - 1.0)) / within.max(SINGULAR_FLOOR)
            } else {
                k * ss_w / ss_b.max(SINGULAR_FLOOR)
            }
        }
        IndexKind::Xb => {
            let min_d2 = pairs(&live)
                .map(|(i, j)| view.dist2(i, j))
                .fold(f64::INFINITY, f64::min);
            ss_w / (n * min_d2.max(SINGULAR_FLOOR))
        }
        IndexKind::Db => {
            let spread: Vec<f64> = live
                .iter()
                .map(|&i| (stats(i).cp / stats(i).n as f64).sqrt())
                .collect();
            let total: f64 = live
                .iter()
                .enumerate()
                .map(|(a, &i)| {
                    live.iter()
                        .enumerate()
                        .filter(|&(b, _)| b != a)
                        .map(|(b, &j)| {
                            (spread[a] + spread[b]) / view.dist2(i, j).sqrt().max(SINGULAR_FLOOR)
                        })
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .sum();
            total / k
        }
        IndexKind::Pbm => {
            let max_d2 = pairs(&live)
                .map(|(i, j)| view.dist2(i, j))
                .fold(0.0, f64::max);
            let ratio = grand.cp / ss_w.max(SINGULAR_FLOOR);
            (ratio * max_d2.sqrt() / k).powi(2)
        }
        IndexKind::Conn => return None,
    };
    Some(value)
}

fn pairs(live: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    live.iter()
        .enumerate()
        .flat_map(move |(a, &i)| live[a + 1..].iter().map(move |&j| (i, j)))
}
