use serde::{Deserialize, Serialize};

use super::StreamClusterer;
use crate::art::{ArtParams, MatchKind, ModuleA};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DvfaParams {
    /// Upper vigilance: resonance and learning.
    pub rho_ub: f64,
    /// Lower vigilance: cluster membership.
    pub rho_lb: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for DvfaParams {
    fn default() -> Self {
        Self {
            rho_ub: 0.85,
            rho_lb: 0.7,
            alpha: 0.001,
            beta: 1.0,
        }
    }
}

/// Dual-vigilance fuzzy ART with online weight re-scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct Dvfa {
    params: DvfaParams,
    art: ModuleA,
    cluster: Vec<usize>,
    k: usize,
}

impl Dvfa {
    pub fn new(params: DvfaParams) -> Result<Self> {
        let DvfaParams {
            rho_ub,
            rho_lb,
            alpha,
            beta,
        } = params;
        if !(0.0..=1.0).contains(&rho_lb) || !(rho_lb..=1.0).contains(&rho_ub) {
            return Err(Error::InvalidConfig(
                "need 0 <= rho_lb <= rho_ub <= 1".into(),
            ));
        }
        if alpha <= 0.0 || !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidConfig(
                "need alpha > 0 and beta in (0, 1]".into(),
            ));
        }
        let art = ModuleA::new(ArtParams {
            alpha,
            beta_1: beta,
            beta_2: 0.0,
            match_kind: MatchKind::Fuzzy,
            uncommitted_gate: false,
        });
        Ok(Self {
            params,
            art,
            cluster: Vec::new(),
            k: 0,
        })
    }

    pub fn module_a(&self) -> &ModuleA {
        &self.art
    }

    /// Cluster of every category.
    pub fn assignments(&self) -> &[usize] {
        &self.cluster
    }
}

impl StreamClusterer for Dvfa {
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
        for &(j, _) in ranking.iter() {
            let m = self.art.match_value(j, &xa, x);
            if m >= self.params.rho_ub {
                return self.art.learn_first(j, &xa, x);
            }
            if m >= self.params.rho_lb {
                self.art.create_category(&xa, x);
                self.cluster.push(self.cluster[j]);
                return Ok(());
            }
        }
        self.art.create_category(&xa, x);
        self.cluster.push(self.k);
        self.k += 1;
        Ok(())
    }

    fn predict_one(&self, x: &[f64]) -> Result<usize> {
        let j = self.art.best_category(x, self.params.rho_lb)?;
        Ok(self.cluster[j])
    }

    fn n_clusters(&self) -> usize {
        self.k
    }

    fn n_categories(&self) -> usize {
        self.art.len()
    }
}
