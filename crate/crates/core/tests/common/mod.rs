//! Batch oracles and a random-edit driver shared by the property suites.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoartmap::art::ConnMatrix;
use topoartmap::icvi::{Edit, IcviState, Resonance};
use topoartmap::stats::ClusterStats;
use topoartmap::{IndexKind, TopoArtmap};

const FLOOR: f64 = 1e-12;

/// Upper bound on cluster slots opened by [`Driver`].
pub const MAX_SLOTS: usize = 6;

fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn mean(xs: &[&[f64]]) -> Vec<f64> {
    let mut m = vec![0.0; xs[0].len()];
    for x in xs {
        for (a, b) in m.iter_mut().zip(x.iter()) {
            *a += b;
        }
    }
    m.iter().map(|v| v / xs.len() as f64).collect()
}

/// Index value recomputed from the raw samples of every cluster.
pub fn batch_index(kind: IndexKind, clusters: &[Vec<&[f64]>]) -> Option<f64> {
    let live: Vec<&Vec<&[f64]>> = clusters.iter().filter(|c| !c.is_empty()).collect();
    if live.len() < 2 {
        return None;
    }
    let all: Vec<&[f64]> = live.iter().flat_map(|c| c.iter().copied()).collect();
    let n = all.len() as f64;
    let k = live.len() as f64;
    let grand = mean(&all);
    let means: Vec<Vec<f64>> = live.iter().map(|c| mean(c)).collect();
    let scatter: Vec<f64> = live
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|x| d2(x, m)).sum())
        .collect();
    let ss_w: f64 = scatter.iter().sum();
    let ss_b: f64 = live
        .iter()
        .zip(&means)
        .map(|(c, m)| c.len() as f64 * d2(m, &grand))
        .sum();
    let mut centroid_d2 = Vec::new();
    for i in 0..means.len() {
        for j in i + 1..means.len() {
            centroid_d2.push(d2(&means[i], &means[j]));
        }
    }
    Some(match kind {
        IndexKind::Ch => {
            let within = if n > k { ss_w / (n - k) } else { 0.0 };
            (ss_b / (k - 1.0)) / within.max(FLOOR)
        }
        IndexKind::Wb => k * ss_w / ss_b.max(FLOOR),
        IndexKind::Xb => {
            let min = centroid_d2.iter().copied().fold(f64::INFINITY, f64::min);
            ss_w / (n * min.max(FLOOR))
        }
        IndexKind::Db => {
            let s: Vec<f64> = scatter
                .iter()
                .zip(&live)
                .map(|(cp, c)| (cp / c.len() as f64).sqrt())
                .collect();
            let mut total = 0.0;
            for i in 0..means.len() {
                let mut worst = f64::NEG_INFINITY;
                for j in 0..means.len() {
                    if i != j {
                        let r = (s[i] + s[j]) / d2(&means[i], &means[j]).sqrt().max(FLOOR);
                        worst = worst.max(r);
                    }
                }
                total += worst;
            }
            total / k
        }
        IndexKind::Pbm => {
            let e1: f64 = all.iter().map(|x| d2(x, &grand)).sum();
            let dk = centroid_d2.iter().copied().fold(0.0, f64::max).sqrt();
            ((e1 / ss_w.max(FLOOR)) * dk / k).powi(2)
        }
        IndexKind::Conn => unreachable!("graph index has its own oracle"),
    })
}

/// Connectivity index from a dense CONN matrix and a prototype→cluster
/// labelling, straight from its definition.
pub fn batch_conn(conn: &[Vec<u64>], labels: &[usize]) -> Option<f64> {
    let mut clusters: Vec<usize> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    if clusters.len() < 2 {
        return None;
    }
    let p = labels.len();
    let mass = |a: usize, pred: &dyn Fn(usize) -> bool| -> u64 {
        (0..p).filter(|&q| pred(q)).map(|q| conn[a][q]).sum()
    };
    let (mut intra, mut inter) = (0.0, 0.0);
    for &c in &clusters {
        let members: Vec<usize> = (0..p).filter(|&a| labels[a] == c).collect();
        let total: u64 = members.iter().map(|&a| mass(a, &|_| true)).sum();
        let within: u64 = members.iter().map(|&a| mass(a, &|q| labels[q] == c)).sum();
        if total > 0 {
            intra += within as f64 / total as f64;
        }
        let mut best = 0.0f64;
        for &l in clusters.iter().filter(|&&l| l != c) {
            let boundary: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&a| mass(a, &|q| labels[q] == l) > 0)
                .collect();
            let into: u64 = boundary.iter().map(|&a| mass(a, &|q| labels[q] == l)).sum();
            let all: u64 = boundary.iter().map(|&a| mass(a, &|_| true)).sum();
            if all > 0 {
                best = best.max(into as f64 / all as f64);
            }
        }
        inter += best;
    }
    let k = clusters.len() as f64;
    Some(intra / k * (1.0 - inter / k))
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + 1e-12
}

pub fn same_value(a: Option<f64>, b: Option<f64>, rel: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(a), Some(b)) => close(a, b, rel),
        _ => false,
    }
}

/// Drives an [`IcviState`] through random commits and structural edits
/// while keeping the raw history needed by the batch oracles.
pub struct Driver {
    pub state: IcviState,
    pub conn: ConnMatrix,
    /// Cluster slot and raw samples of every prototype.
    pub protos: Vec<(usize, Vec<Vec<f64>>)>,
    pub slots: usize,
    pub dim: usize,
    rng: ChaCha8Rng,
}

impl Driver {
    pub fn new(kind: IndexKind, dim: usize, seed: u64) -> Self {
        Self {
            state: IcviState::new(kind),
            conn: ConnMatrix::new(0),
            protos: Vec::new(),
            slots: 0,
            dim,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn sample(&mut self) -> Vec<f64> {
        let centre = self.rng.random_range(0..4) as f64 * 3.0;
        (0..self.dim)
            .map(|_| centre + self.rng.random_range(-2.0..2.0))
            .collect()
    }

    fn add_slot(&mut self) {
        self.state
            .restructure(Edit::AddCluster, &self.conn)
            .unwrap();
        self.slots += 1;
    }

    fn live_slots(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.protos.iter().map(|p| p.0).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn commit(&mut self) {
        if self.slots == 0 || (self.slots < MAX_SLOTS && self.rng.random_bool(0.05)) {
            self.add_slot();
        }
        let x = self.sample();
        let p = self.protos.len();
        let create = p == 0 || self.rng.random_bool(0.2);
        let (category, cluster) = if create {
            let c = self.rng.random_range(0..self.slots);
            self.protos.push((c, Vec::new()));
            self.conn.grow();
            (p, c)
        } else {
            let j = self.rng.random_range(0..p);
            (j, self.protos[j].0)
        };
        self.protos[category].1.push(x.clone());
        let n = self.protos.len();
        let second = (n > 1 && self.rng.random_bool(0.6)).then(|| {
            let mut j = self.rng.random_range(0..n - 1);
            if j >= category {
                j += 1;
            }
            j
        });
        if let Some(j2) = second {
            self.conn.link(category, j2);
        }
        let res = Resonance {
            category,
            created: create,
            second,
        };
        self.state.commit(&x, cluster, res).unwrap();
    }

    /// Applies a random structural edit, if one is possible.
    pub fn edit(&mut self) {
        let live = self.live_slots();
        match self.rng.random_range(0..4) {
            0 if !self.protos.is_empty() => {
                let j = self.rng.random_range(0..self.protos.len());
                let from = self.protos[j].0;
                let to = self.rng.random_range(0..self.slots);
                if to == from {
                    return;
                }
                let rows: Vec<&[f64]> = self.protos[j].1.iter().map(Vec::as_slice).collect();
                let stats = ClusterStats::from_samples(rows).unwrap();
                let edit = Edit::Move {
                    category: j,
                    stats: &stats,
                    from,
                    to,
                };
                self.state.restructure(edit, &self.conn).unwrap();
                self.protos[j].0 = to;
            }
            1 if live.len() >= 2 => {
                let pair: Vec<usize> = live.choose_multiple(&mut self.rng, 2).copied().collect();
                let (keep, absorb) = (pair[0], pair[1]);
                self.state
                    .restructure(Edit::Merge { keep, absorb }, &self.conn)
                    .unwrap();
                for p in &mut self.protos {
                    if p.0 == absorb {
                        p.0 = keep;
                    }
                }
            }
            2 => {
                if let Some(c) = (0..self.slots).find(|c| !live.contains(c)) {
                    self.state
                        .restructure(Edit::RemoveCluster(c), &self.conn)
                        .unwrap();
                    self.slots -= 1;
                    for p in &mut self.protos {
                        if p.0 > c {
                            p.0 -= 1;
                        }
                    }
                }
            }
            _ if self.slots < MAX_SLOTS => self.add_slot(),
            _ => {}
        }
    }

    pub fn labels(&self) -> Vec<usize> {
        self.protos.iter().map(|p| p.0).collect()
    }

    pub fn dense_conn(&self) -> Vec<Vec<u64>> {
        (0..self.conn.len())
            .map(|i| self.conn.row(i).to_vec())
            .collect()
    }

    /// Oracle value of the current partition.
    pub fn oracle(&self) -> Option<f64> {
        let kind = self.state.kind();
        if kind == IndexKind::Conn {
            return batch_conn(&self.dense_conn(), &self.labels());
        }
        let mut clusters: Vec<Vec<&[f64]>> = vec![Vec::new(); self.slots];
        for (c, xs) in &self.protos {
            clusters[*c].extend(xs.iter().map(Vec::as_slice));
        }
        batch_index(kind, &clusters)
    }
}

/// Structural invariants that must hold between steps.
pub fn check_invariants(model: &TopoArtmap, seen: u64) {
    let cats = model.categories();
    let p = cats.len();
    let total: u64 = cats.iter().map(|c| c.stats.n as u64).sum();
    assert_eq!(
        total, seen,
        "category frequencies must add up to the samples seen"
    );
    assert_eq!(model.icvi().graph().freq().iter().sum::<u64>(), seen);

    let conn = model.module_a().conn();
    assert_eq!(conn.len(), p);
    assert!(conn.is_symmetric_zero_diagonal());

    let map = model.map_field();
    assert_eq!(map.len(), p);
    if model.config().beta_ab == 1.0 {
        for row in map.rows() {
            assert_eq!(row.iter().filter(|&&w| w == 1.0).count(), 1, "{row:?}");
            assert!(row.iter().all(|&w| w == 0.0 || w == 1.0));
        }
    }

    let d = cats[0].w.len() / 2;
    for c in cats {
        assert!(c.w.iter().all(|v| (-1e-12..=1.0 + 1e-12).contains(v)));
        assert!((0..d).all(|i| c.w[i] <= 1.0 - c.w[d + i] + 1e-12));
    }

    // Cluster statistics are the pooled statistics of their categories.
    let labels = model.assignments();
    assert_eq!(model.icvi().len(), map.k());
    for k in 0..map.k() {
        let members: Vec<&ClusterStats> = (0..p)
            .filter(|&j| labels[j] == k)
            .map(|j| &cats[j].stats)
            .collect();
        match (model.icvi().cluster(k), members.split_first()) {
            (None, None) => {}
            (Some(s), Some((first, rest))) => {
                let pooled = rest.iter().fold((*first).clone(), |acc, m| acc.merge(m));
                assert_eq!(s.n, pooled.n);
                assert!((s.cp - pooled.cp).abs() <= 1e-6 * s.cp.max(1.0));
            }
            (s, m) => panic!(
                "cluster {k}: stats {s:?} vs members {}",
                m.map_or(0, |m| m.1.len() + 1)
            ),
        }
    }
    assert_eq!(model.icvi().graph().labels(), labels.as_slice());
}
