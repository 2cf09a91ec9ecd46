//! Connectivity-based validity index over the prototype graph.
//!
//! The cache keeps, per prototype, its total connection mass and its mass
//! into every cluster, so relabelling one prototype or adding one link
//! touches O(k) entries and the value is an O(P·k) reduction.

use crate::art::ConnMatrix;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConnIndex {
    labels: Vec<usize>,
    k: usize,
    row_sum: Vec<u64>,
    mass_to: Vec<Vec<u64>>,
    /// Samples encoded per prototype, tracked apart from the graph.
    freq: Vec<u64>,
}

impl ConnIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the cache from a connectivity matrix and a prototype→cluster
    /// labelling with `k` cluster slots.
    pub fn rebuild(conn: &ConnMatrix, labels: &[usize], k: usize, freq: &[u64]) -> Self {
        let p = labels.len();
        let mut mass_to = vec![vec![0u64; k]; p];
        let mut row_sum = vec![0u64; p];
        for i in 0..p {
            for (j, &c) in conn.row(i).iter().enumerate() {
                mass_to[i][labels[j]] += c;
                row_sum[i] += c;
            }
        }
        Self {
            labels: labels.to_vec(),
            k,
            row_sum,
            mass_to,
            freq: freq.to_vec(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn freq(&self) -> &[u64] {
        &self.freq
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn add_cluster(&mut self) -> usize {
        for m in &mut self.mass_to {
            m.push(0);
        }
        self.k += 1;
        self.k - 1
    }

    /// Drops cluster slot `c`, which must own no prototype.
    pub fn remove_cluster(&mut self, c: usize) {
        debug_assert!(self.labels.iter().all(|&l| l != c));
        for m in &mut self.mass_to {
            m.remove(c);
        }
        for l in &mut self.labels {
            if *l > c {
                *l -= 1;
            }
        }
        self.k -= 1;
    }

    /// Registers a new unconnected prototype owned by `cluster`.
    pub fn add_prototype(&mut self, cluster: usize) -> usize {
        self.labels.push(cluster);
        self.row_sum.push(0);
        self.mass_to.push(vec![0; self.k]);
        self.freq.push(1);
        self.labels.len() - 1
    }

    pub fn count_sample(&mut self, p: usize) {
        self.freq[p] += 1;
    }

    /// Records one co-resonance between prototypes `i` and `j`.
    pub fn link(&mut self, i: usize, j: usize) {
        let (ci, cj) = (self.labels[i], self.labels[j]);
        self.mass_to[i][cj] += 1;
        self.mass_to[j][ci] += 1;
        self.row_sum[i] += 1;
        self.row_sum[j] += 1;
    }

    /// Moves prototype `p` to `cluster`; `conn` supplies its neighbours.
    pub fn relabel(&mut self, p: usize, cluster: usize, conn: &ConnMatrix) {
        let old = self.labels[p];
        if old == cluster {
            return;
        }
        for (q, &c) in conn.row(p).iter().enumerate() {
            if c > 0 {
                self.mass_to[q][old] -= c;
                self.mass_to[q][cluster] += c;
            }
        }
        self.labels[p] = cluster;
    }

    pub fn value(&self) -> Option<f64> {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); self.k];
        for (p, &c) in self.labels.iter().enumerate() {
            members[c].push(p);
        }
        let live: Vec<usize> = (0..self.k).filter(|&c| !members[c].is_empty()).collect();
        if live.len() < 2 {
            return None;
        }
        let mut intra = 0.0;
        let mut inter = 0.0;
        for &c in &live {
            let total: u64 = members[c].iter().map(|&p| self.row_sum[p]).sum();
            if total > 0 {
                let within: u64 = members[c].iter().map(|&p| self.mass_to[p][c]).sum();
                intra += within as f64 / total as f64;
            }
            let mut best = 0.0f64;
            for &l in live.iter().filter(|&&l| l != c) {
                let (mut into, mut boundary) = (0u64, 0u64);
                for &p in &members[c] {
                    if self.mass_to[p][l] > 0 {
                        into += self.mass_to[p][l];
                        boundary += self.row_sum[p];
                    }
                }
                if boundary > 0 {
                    best = best.max(into as f64 / boundary as f64);
                }
            }
            inter += best;
        }
        let k = live.len() as f64;
        Some((intra / k) * (1.0 - inter / k))
    }
}
