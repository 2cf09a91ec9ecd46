//! Online cluster-validity framework: temporary-assignment scoring, label
//! matrices, index-driven vigilance control and the worsening tracker.

mod conn;
mod ss;

pub use conn::ConnIndex;
pub use ss::{Partition, SINGULAR_FLOOR};

use serde::{Deserialize, Serialize};

use crate::art::{ConnMatrix, MatchKind};
use crate::error::{Error, Result};
use crate::stats::ClusterStats;

/// Relative tolerance below which two index values count as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexKind {
    #[serde(alias = "ich")]
    Ch,
    #[serde(alias = "iwb")]
    Wb,
    #[serde(alias = "ipbm")]
    Pbm,
    #[serde(alias = "ixb")]
    Xb,
    #[serde(alias = "idb")]
    Db,
    #[serde(alias = "iconn", alias = "conn_index", alias = "iconn_index")]
    Conn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl IndexKind {
    pub const ALL: [IndexKind; 6] = [
        IndexKind::Ch,
        IndexKind::Wb,
        IndexKind::Pbm,
        IndexKind::Xb,
        IndexKind::Db,
        IndexKind::Conn,
    ];

    pub fn direction(self) -> Direction {
        match self {
            IndexKind::Ch | IndexKind::Pbm | IndexKind::Conn => Direction::Maximize,
            IndexKind::Wb | IndexKind::Xb | IndexKind::Db => Direction::Minimize,
        }
    }

    pub fn is_sum_of_squares(self) -> bool {
        self != IndexKind::Conn
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexKind::Ch => "ich",
            IndexKind::Wb => "iwb",
            IndexKind::Pbm => "ipbm",
            IndexKind::Xb => "ixb",
            IndexKind::Db => "idb",
            IndexKind::Conn => "iconn",
        }
    }

    /// Score with argmax semantics: min-optimal values are negated.
    pub fn score(self, value: f64) -> f64 {
        match self.direction() {
            Direction::Maximize => value,
            Direction::Minimize => -value,
        }
    }

    /// Strictly better, beyond a relative tie tolerance.
    pub fn better(self, a: f64, b: f64) -> bool {
        let tol = TIE_TOLERANCE * a.abs().max(b.abs());
        match self.direction() {
            Direction::Maximize => a > b + tol,
            Direction::Minimize => a < b - tol,
        }
    }
}

impl std::str::FromStr for IndexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let key = key
            .strip_prefix('i')
            .filter(|k| !k.is_empty())
            .unwrap_or(&key);
        Ok(match key {
            "ch" => IndexKind::Ch,
            "wb" => IndexKind::Wb,
            "pbm" => IndexKind::Pbm,
            "xb" => IndexKind::Xb,
            "db" => IndexKind::Db,
            "conn" | "conn_index" => IndexKind::Conn,
            _ => return Err(Error::InvalidConfig(format!("unknown index `{s}`"))),
        })
    }
}

impl std::fmt::Display for IndexKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One-hot rows for every cluster whose score ties the maximum.
pub fn label_matrix(tb: &[f64]) -> Vec<Vec<f64>> {
    let best = tb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = if best.is_finite() {
        TIE_TOLERANCE * best.abs()
    } else {
        0.0
    };
    tb.iter()
        .enumerate()
        .filter(|&(_, &t)| t == best || (best - t) <= tol)
        .map(|(i, _)| crate::mapfield::one_hot(tb.len(), i))
        .collect()
}

/// Index-driven vigilance control settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcviTracking {
    pub enabled: bool,
    pub epsilon: f64,
    pub rho_mt: f64,
    pub tau: u64,
}

/// Vigilance after checking the tracker: pushed towards `rho_mt` while
/// `v >= τ`, otherwise back at `baseline`.
pub fn icvi_match_tracking(
    rho: f64,
    baseline: f64,
    v: u64,
    t: &IcviTracking,
    kind: MatchKind,
) -> f64 {
    if v < t.tau {
        return baseline;
    }
    match kind {
        MatchKind::Fuzzy => (rho + t.epsilon).min(t.rho_mt).max(0.0),
        MatchKind::Cosine => (rho - t.epsilon).max(t.rho_mt).min(2.0),
    }
}

/// What module A did with the committed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resonance {
    pub category: usize,
    pub created: bool,
    pub second: Option<usize>,
}

/// Hypothetical module-A outcome when the sample is labelled with one
/// cluster: an existing first winner or a fresh prototype, plus the
/// optional second winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnHypothesis {
    pub first: Option<usize>,
    pub second: Option<usize>,
}

/// Structural edits applied by post-processing.
#[derive(Debug, Clone, PartialEq)]
pub enum Edit<'a> {
    /// Category `category` (whose samples are `stats`) changes cluster.
    Move {
        category: usize,
        stats: &'a ClusterStats,
        from: usize,
        to: usize,
    },
    /// Every category of `absorb` joins `keep`; `absorb` is left empty.
    Merge { keep: usize, absorb: usize },
    /// Appends an empty cluster slot.
    AddCluster,
    /// Drops an empty cluster slot; later slots shift down.
    RemoveCluster(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcviState {
    kind: IndexKind,
    partition: Partition,
    graph: ConnIndex,
    value: Option<f64>,
    tracker: u64,
}

impl IcviState {
    pub fn new(kind: IndexKind) -> Self {
        Self {
            kind,
            partition: Partition::new(),
            graph: ConnIndex::new(),
            value: None,
            tracker: 0,
        }
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn value(&self) -> Option<f64> {
        self.value
    }

    pub fn tracker(&self) -> u64 {
        self.tracker
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn graph(&self) -> &ConnIndex {
        &self.graph
    }

    /// Number of cluster slots.
    pub fn len(&self) -> usize {
        self.partition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partition.is_empty()
    }

    pub fn cluster(&self, c: usize) -> Option<&ClusterStats> {
        self.partition.cluster(c)
    }

    fn refresh(&mut self) {
        self.value = if self.kind.is_sum_of_squares() {
            self.partition.value(self.kind)
        } else {
            self.graph.value()
        };
    }

    /// Temporary scores for assigning `x` to each cluster under a
    /// sum-of-squares index; undefined outcomes score `-inf`.
    pub fn score_assignments(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.len() < 2 {
            return Err(Error::Undefined);
        }
        (0..self.len())
            .map(|c| {
                Ok(self
                    .partition
                    .value_with_sample(self.kind, c, x)?
                    .map_or(f64::NEG_INFINITY, |v| self.kind.score(v)))
            })
            .collect()
    }

    /// Temporary scores under the connectivity index; `hypotheses[c]` is
    /// what module A would do if the sample were labelled `c`.
    pub fn score_conn(&self, hypotheses: &[ConnHypothesis]) -> Result<Vec<f64>> {
        if self.len() < 2 {
            return Err(Error::Undefined);
        }
        Ok(hypotheses
            .iter()
            .enumerate()
            .map(|(c, h)| {
                let mut g = self.graph.clone();
                let first = match h.first {
                    Some(j) => j,
                    None => g.add_prototype(c),
                };
                if let Some(j2) = h.second {
                    g.link(first, j2);
                }
                g.value().map_or(f64::NEG_INFINITY, |v| self.kind.score(v))
            })
            .collect())
    }

    /// Applies the sample to cluster `cluster` and refreshes the value.
    pub fn commit(&mut self, x: &[f64], cluster: usize, res: Resonance) -> Result<()> {
        if cluster >= self.len() {
            return Err(Error::Inconsistent(format!(
                "commit to cluster {cluster} of {}",
                self.len()
            )));
        }
        self.partition.add_sample(cluster, x)?;
        if res.created {
            self.graph.add_prototype(cluster);
        } else {
            self.graph.count_sample(res.category);
        }
        if let Some(j2) = res.second {
            self.graph.link(res.category, j2);
        }
        self.refresh();
        Ok(())
    }

    /// Applies a structural edit. `conn` is module A's connectivity matrix.
    pub fn restructure(&mut self, edit: Edit<'_>, conn: &ConnMatrix) -> Result<()> {
        match edit {
            Edit::Move {
                category,
                stats,
                from,
                to,
            } => {
                self.partition.move_part(from, to, stats)?;
                self.graph.relabel(category, to, conn);
            }
            Edit::Merge { keep, absorb } => {
                self.partition.merge(keep, absorb);
                let members: Vec<usize> = (0..self.graph.labels().len())
                    .filter(|&p| self.graph.labels()[p] == absorb)
                    .collect();
                for p in members {
                    self.graph.relabel(p, keep, conn);
                }
            }
            Edit::AddCluster => {
                self.partition.push(None);
                self.graph.add_cluster();
            }
            Edit::RemoveCluster(c) => {
                if self.partition.cluster(c).is_some() {
                    return Err(Error::Inconsistent(format!(
                        "removing non-empty cluster {c}"
                    )));
                }
                self.partition.remove(c);
                self.graph.remove_cluster(c);
            }
        }
        self.refresh();
        Ok(())
    }

    /// Value that `edit` would produce; `self` is untouched.
    pub fn emulate(&self, edit: Edit<'_>, conn: &ConnMatrix) -> Result<Option<f64>> {
        if self.kind.is_sum_of_squares() {
            match edit {
                Edit::Merge { keep, absorb } => {
                    return Ok(self.partition.value_with_merge(self.kind, keep, absorb));
                }
                Edit::Move {
                    stats, from, to, ..
                } => {
                    return self.partition.value_with_move(self.kind, from, to, stats);
                }
                _ => {}
            }
        }
        let mut trial = self.clone();
        trial.restructure(edit, conn)?;
        Ok(trial.value)
    }

    /// Recomputes the graph cache from scratch (after module A's categories
    /// were replaced).
    pub fn rebuild_graph(&mut self, conn: &ConnMatrix, labels: &[usize], freq: &[u64]) {
        self.graph = ConnIndex::rebuild(conn, labels, self.len(), freq);
        self.refresh();
    }

    /// Worsening tracker; frozen while either value is undefined.
    pub fn update_tracker(&mut self, start: Option<f64>, end: Option<f64>) {
        if let (Some(s), Some(e)) = (start, end) {
            if self.kind.better(s, e) {
                self.tracker += 1;
            } else {
                self.tracker = self.tracker.saturating_sub(1);
            }
        }
    }
}
