//! Model hyperparameters, keyed by their conventional symbols.

use serde::{Deserialize, Serialize};

use crate::art::{ArtParams, MatchKind};
use crate::error::{Error, Result};
use crate::icvi::{IcviTracking, IndexKind};
use crate::mapfield::{LearningMode, MapFieldParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    /// Detach the most recently active category into its own cluster.
    #[default]
    ActivityBased,
    /// Atomize a cluster and greedily re-merge its categories.
    FullDecomposition,
    /// Seed a new cluster with the best detachable category, then swap.
    PartialDecomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub rho_a: f64,
    pub beta_1: f64,
    pub beta_2: f64,
    pub alpha: f64,
    pub m_type: MatchKind,
    pub en_tu: bool,
    pub epsilon: f64,
    pub rho_ab: f64,
    pub beta_ab: f64,
    pub l_type: LearningMode,
    pub icvi: IndexKind,
    pub en_mt_icvi: bool,
    /// `None` means an instantaneous jump to `rho_mt_icvi`.
    pub epsilon_icvi: Option<f64>,
    pub rho_mt_icvi: f64,
    pub en_swap: bool,
    pub en_merge: bool,
    pub en_split: bool,
    pub s_type: SplitKind,
    pub en_compress: bool,
    pub rho_c: f64,
    pub en_prune_reassign: bool,
    pub tau: u64,
    pub phi: usize,
    pub xi: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            rho_a: 0.0,
            beta_1: 1.0,
            beta_2: 0.0,
            alpha: 0.001,
            m_type: MatchKind::Fuzzy,
            en_tu: true,
            epsilon: 0.01,
            rho_ab: 1.0,
            beta_ab: 1.0,
            l_type: LearningMode::Variable,
            icvi: IndexKind::Ch,
            en_mt_icvi: true,
            epsilon_icvi: None,
            rho_mt_icvi: 0.9,
            en_swap: true,
            en_merge: true,
            en_split: true,
            s_type: SplitKind::ActivityBased,
            en_compress: true,
            rho_c: 0.0,
            en_prune_reassign: true,
            tau: 0,
            phi: 5,
            xi: 100,
        }
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(msg()))
    }
}

impl Config {
    /// Upper bound of the module-A vigilance for the selected match function.
    pub fn rho_max(&self) -> f64 {
        match self.m_type {
            MatchKind::Fuzzy => 1.0,
            MatchKind::Cosine => 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.rho_a,
            self.beta_1,
            self.beta_2,
            self.alpha,
            self.epsilon,
            self.rho_ab,
            self.beta_ab,
            self.rho_mt_icvi,
            self.rho_c,
            self.epsilon_icvi.unwrap_or(0.0),
        ];
        check(finite.iter().all(|v| v.is_finite()), || {
            "parameters must be finite".into()
        })?;
        let rmax = self.rho_max();
        check((0.0..=rmax).contains(&self.rho_a), || {
            format!("rho_a must lie in [0, {rmax}]")
        })?;
        check((0.0..=rmax).contains(&self.rho_mt_icvi), || {
            format!("rho_mt_icvi must lie in [0, {rmax}]")
        })?;
        check(self.beta_1 > 0.0 && self.beta_1 <= 1.0, || {
            "beta_1 must lie in (0, 1]".into()
        })?;
        check(self.beta_2 >= 0.0 && self.beta_2 <= self.beta_1, || {
            "beta_2 must lie in [0, beta_1]".into()
        })?;
        check(self.alpha > 0.0, || "alpha must be positive".into())?;
        check((0.0..=1.0).contains(&self.rho_ab), || {
            "rho_ab must lie in [0, 1]".into()
        })?;
        check(self.beta_ab > 0.0 && self.beta_ab <= 1.0, || {
            "beta_ab must lie in (0, 1]".into()
        })?;
        check((0.0..=1.0).contains(&self.rho_c), || {
            "rho_c must lie in [0, 1]".into()
        })?;
        Ok(())
    }

    /// Step of index-driven match tracking; by default the whole distance
    /// between the baseline and `rho_mt_icvi`.
    pub fn epsilon_icvi(&self) -> f64 {
        self.epsilon_icvi.unwrap_or(match self.m_type {
            MatchKind::Fuzzy => self.rho_mt_icvi - self.rho_a,
            MatchKind::Cosine => self.rho_a - self.rho_mt_icvi,
        })
    }

    pub fn art_params(&self) -> ArtParams {
        ArtParams {
            alpha: self.alpha,
            beta_1: self.beta_1,
            beta_2: self.beta_2,
            match_kind: self.m_type,
            uncommitted_gate: self.en_tu,
        }
    }

    pub fn map_params(&self) -> MapFieldParams {
        MapFieldParams {
            rho_ab: self.rho_ab,
            beta_ab: self.beta_ab,
            epsilon: self.epsilon,
            mode: self.l_type,
        }
    }

    pub fn tracking(&self) -> IcviTracking {
        IcviTracking {
            enabled: self.en_mt_icvi,
            epsilon: self.epsilon_icvi(),
            rho_mt: self.rho_mt_icvi,
            tau: self.tau,
        }
    }
}
