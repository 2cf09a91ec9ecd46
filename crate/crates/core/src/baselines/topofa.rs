use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::StreamClusterer;
use crate::art::{ArtParams, ConnMatrix, MatchKind, ModuleA, SearchOutcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopoFaParams {
    pub rho: f64,
    pub alpha: f64,
    pub beta_1: f64,
    pub beta_2: f64,
    /// Pruning period in samples; 0 disables pruning.
    pub tau: u64,
    /// Categories encoding fewer samples are pruned.
    pub phi: usize,
}

impl Default for TopoFaParams {
    fn default() -> Self {
        Self {
            rho: 0.7,
            alpha: 0.001,
            beta_1: 1.0,
            beta_2: 0.5,
            tau: 100,
            phi: 0,
        }
    }
}

/// Topological fuzzy ART with online re-scaling; clusters are the
/// connected components of the connectivity graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TopoFa {
    params: TopoFaParams,
    art: ModuleA,
    t: u64,
}

/// Component label of every node of the graph `conn > 0`, numbered by
/// first appearance.
pub(crate) fn components(conn: &ConnMatrix) -> Vec<usize> {
    let p = conn.len();
    let mut uf = UnionFind::<usize>::new(p);
    for i in 0..p {
        for (j, &c) in conn.row(i).iter().enumerate().skip(i + 1) {
            if c > 0 {
                uf.union(i, j);
            }
        }
    }
    let roots = uf.into_labeling();
    let mut seen: Vec<usize> = Vec::new();
    roots
        .iter()
        .map(|r| match seen.iter().position(|s| s == r) {
            Some(i) => i,
            None => {
                seen.push(*r);
                seen.len() - 1
            }
        })
        .collect()
}

impl TopoFa {
    pub fn new(params: TopoFaParams) -> Result<Self> {
        let TopoFaParams {
            rho,
            alpha,
            beta_1,
            beta_2,
            ..
        } = params;
        if !(0.0..=1.0).contains(&rho) || alpha <= 0.0 {
            return Err(Error::InvalidConfig(
                "need rho in [0, 1] and alpha > 0".into(),
            ));
        }
        if !(beta_1 > 0.0 && beta_1 <= 1.0) || !(0.0..=beta_1).contains(&beta_2) {
            return Err(Error::InvalidConfig(
                "need 0 <= beta_2 <= beta_1 <= 1".into(),
            ));
        }
        let art = ModuleA::new(ArtParams {
            alpha,
            beta_1,
            beta_2,
            match_kind: MatchKind::Fuzzy,
            uncommitted_gate: false,
        });
        Ok(Self { params, art, t: 0 })
    }

    pub fn module_a(&self) -> &ModuleA {
        &self.art
    }

    /// Cluster of every category.
    pub fn assignments(&self) -> Vec<usize> {
        components(self.art.conn())
    }

    fn prune(&mut self) {
        let keep: Vec<usize> = (0..self.art.len())
            .filter(|&j| self.art.categories()[j].stats.n >= self.params.phi)
            .collect();
        if !keep.is_empty() && keep.len() < self.art.len() {
            self.art.retain(&keep);
        }
    }
}

impl StreamClusterer for TopoFa {
    fn learn(&mut self, x: &[f64]) -> Result<()> {
        if let Some(d) = self.art.dim() {
            if d != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        let xa = self.art.prepare(x)?;
        let ranking = self.art.ranking(&xa);
        let mut rho = self.params.rho;
        let (j1, after) = match self.art.search(&ranking, &xa, x, &mut rho, |_, _, _| true) {
            SearchOutcome::Resonant { category, rank } => {
                self.art.learn_first(category, &xa, x)?;
                (category, Some(rank))
            }
            SearchOutcome::NewCategory => (self.art.create_category(&xa, x), None),
        };
        if let Some(j2) = self
            .art
            .second_resonant(&ranking, after, j1, &xa, x, self.params.rho)
        {
            self.art.learn_second(j1, j2, &xa);
        }
        self.t += 1;
        if self.params.tau > 0 && self.t.is_multiple_of(self.params.tau) {
            self.prune();
        }
        Ok(())
    }

    fn predict_one(&self, x: &[f64]) -> Result<usize> {
        let j = self.art.best_category(x, self.params.rho)?;
        Ok(self.assignments()[j])
    }

    fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        let labels = self.assignments();
        xs.iter()
            .map(|x| {
                self.art
                    .best_category(x, self.params.rho)
                    .map(|j| labels[j])
            })
            .collect()
    }

    fn n_clusters(&self) -> usize {
        self.assignments().iter().max().map_or(0, |m| m + 1)
    }

    fn n_categories(&self) -> usize {
        self.art.len()
    }
}
