//! The full model and its per-sample training step.

use serde::{Deserialize, Serialize};

use crate::art::{Category, ModuleA, Ranking, SearchOutcome};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::icvi::{icvi_match_tracking, label_matrix, ConnHypothesis, Edit, IcviState, Resonance};
use crate::mapfield::{one_hot, row_match, LearningMode, MapField};

/// Per-sample summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub t: u64,
    /// Cluster the sample was committed to, before post-processing.
    pub cluster: usize,
    pub category: usize,
    pub created: bool,
    /// Clusters owning at least one category.
    pub k: usize,
    pub p: usize,
    pub rho_a: f64,
    pub v: u64,
    pub value: Option<f64>,
}

/// What the map field is asked to agree with.
#[derive(Debug, Clone)]
pub(crate) enum Target {
    Disabled,
    Supervised(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoArtmap {
    pub(crate) config: Config,
    pub(crate) art: ModuleA,
    pub(crate) map: MapField,
    pub(crate) icvi: IcviState,
    pub(crate) rho_a: f64,
    pub(crate) t: u64,
}

impl TopoArtmap {
    pub fn new(config: Config) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            art: ModuleA::new(config.art_params()),
            map: MapField::new(config.map_params()),
            icvi: IcviState::new(config.icvi),
            rho_a: config.rho_a,
            t: 0,
            config,
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn module_a(&self) -> &ModuleA {
        &self.art
    }

    pub fn map_field(&self) -> &MapField {
        &self.map
    }

    pub fn icvi(&self) -> &IcviState {
        &self.icvi
    }

    pub fn categories(&self) -> &[Category] {
        self.art.categories()
    }

    /// Current module-A vigilance (after index-driven match tracking).
    pub fn rho_a(&self) -> f64 {
        self.rho_a
    }

    pub fn samples_seen(&self) -> u64 {
        self.t
    }

    pub fn n_categories(&self) -> usize {
        self.art.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.map.live_clusters().iter().filter(|&&l| l).count()
    }

    /// Cluster of every category.
    pub fn assignments(&self) -> Vec<usize> {
        self.map.assignments()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if let Some(d) = self.art.dim() {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
        }
        if let Some(feature) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { feature });
        }
        Ok(())
    }

    /// Presents one sample, optionally with a supervised cluster label.
    pub fn step(&mut self, x: &[f64], label: Option<usize>) -> Result<StepReport> {
        self.check_input(x)?;
        if x.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let xa = self.art.prepare(x)?;
        self.t += 1;
        if self.art.is_empty() {
            return self.initialize(x, &xa, label);
        }

        let start = self.icvi.value();
        let target = self.target(x, &xa, label)?;
        let ranking = self.art.ranking(&xa);
        let outcome = self.resonate(&ranking, &xa, x, &target, self.rho_a);
        let (category, created, after) = match outcome {
            SearchOutcome::Resonant { category, rank } => {
                self.learn_existing(category, &xa, x, &target)?;
                (category, false, Some(rank))
            }
            SearchOutcome::NewCategory => (self.create(&xa, x, &target), true, None),
        };
        let second = self
            .art
            .second_resonant(&ranking, after, category, &xa, x, self.rho_a);
        if let Some(j2) = second {
            self.art.learn_second(category, j2, &xa);
        }
        self.art.tick_inactivity(category);

        let cluster = self.map.cluster_of(category);
        self.sync_clusters()?;
        self.icvi.commit(
            x,
            cluster,
            Resonance {
                category,
                created,
                second,
            },
        )?;
        self.post_process()?;
        let end = self.icvi.value();
        self.icvi.update_tracker(start, end);
        Ok(self.report(cluster, category, created))
    }

    fn report(&self, cluster: usize, category: usize, created: bool) -> StepReport {
        StepReport {
            t: self.t,
            cluster,
            category,
            created,
            k: self.n_clusters(),
            p: self.art.len(),
            rho_a: self.rho_a,
            v: self.icvi.tracker(),
            value: self.icvi.value(),
        }
    }

    fn initialize(&mut self, x: &[f64], xa: &[f64], label: Option<usize>) -> Result<StepReport> {
        let j = self.art.create_category(xa, x);
        match label {
            Some(l) => self.map.add_category_with_label(&one_hot(l + 1, l)),
            None => {
                self.map.add_category_new_cluster();
            }
        }
        self.art.tick_inactivity(j);
        let cluster = self.map.cluster_of(j);
        self.sync_clusters()?;
        let res = Resonance {
            category: j,
            created: true,
            second: None,
        };
        self.icvi.commit(x, cluster, res)?;
        Ok(self.report(cluster, j, true))
    }

    /// Gives the index state one slot per map-field column.
    pub(crate) fn sync_clusters(&mut self) -> Result<()> {
        while self.icvi.len() < self.map.k() {
            self.icvi.restructure(Edit::AddCluster, self.art.conn())?;
        }
        Ok(())
    }

    fn target(&mut self, x: &[f64], xa: &[f64], label: Option<usize>) -> Result<Target> {
        if let Some(l) = label {
            let k = self.map.k().max(l + 1);
            self.map.ensure_clusters(k);
            self.sync_clusters()?;
            return Ok(Target::Supervised(one_hot(k, l)));
        }
        let k = self.map.k();
        if k <= 1 {
            return Ok(Target::Disabled);
        }
        let tb = if self.icvi.kind().is_sum_of_squares() {
            self.icvi.score_assignments(x)?
        } else {
            let hypotheses = self.conn_hypotheses(xa, x, k);
            self.icvi.score_conn(&hypotheses)?
        };
        let labels = label_matrix(&tb);
        if self.config.en_mt_icvi {
            self.rho_a = icvi_match_tracking(
                self.rho_a,
                self.config.rho_a,
                self.icvi.tracker(),
                &self.config.tracking(),
                self.config.m_type,
            );
        }
        Ok(Target::Matrix(labels))
    }

    /// Module-A outcome of presenting `x` with each one-hot cluster label.
    fn conn_hypotheses(&self, xa: &[f64], x: &[f64], k: usize) -> Vec<ConnHypothesis> {
        let ranking = self.art.ranking(xa);
        (0..k)
            .map(|c| {
                let target = Target::Supervised(one_hot(k, c));
                match self.resonate(&ranking, xa, x, &target, self.rho_a) {
                    SearchOutcome::Resonant { category, rank } => ConnHypothesis {
                        first: Some(category),
                        second: self.art.second_resonant(
                            &ranking,
                            Some(rank),
                            category,
                            xa,
                            x,
                            self.rho_a,
                        ),
                    },
                    SearchOutcome::NewCategory => ConnHypothesis {
                        first: None,
                        second: self.art.second_resonant(
                            &ranking,
                            None,
                            usize::MAX,
                            xa,
                            x,
                            self.rho_a,
                        ),
                    },
                }
            })
            .collect()
    }

    /// Resonance search with the map-field test and standard match
    /// tracking; the raised vigilance lives only for this search.
    fn resonate(
        &self,
        ranking: &Ranking,
        xa: &[f64],
        x: &[f64],
        target: &Target,
        rho: f64,
    ) -> SearchOutcome {
        let mut rho = rho;
        let kind = self.config.m_type;
        self.art.search(ranking, xa, x, &mut rho, |j, m_a, rho| {
            let m_ab = match target {
                Target::Disabled => return true,
                Target::Supervised(y) => row_match(y, self.map.row(j)),
                Target::Matrix(ys) => self.map.match_labels(j, ys).0,
            };
            if self.map.passes(m_ab) {
                true
            } else {
                *rho = self.map.track(m_a, kind);
                false
            }
        })
    }

    fn learn_existing(&mut self, j: usize, xa: &[f64], x: &[f64], target: &Target) -> Result<()> {
        let previous = self.art.categories()[j].stats.clone();
        self.art.learn_first(j, xa, x)?;
        let before = self.map.cluster_of(j);
        let label = match target {
            Target::Disabled => return Ok(()),
            Target::Supervised(y) => y.clone(),
            Target::Matrix(ys) => ys[self.map.match_labels(j, ys).1].clone(),
        };
        self.map.learn(j, &label);
        if self.map.row(j).iter().all(|&w| w <= 0.0) {
            self.map.relabel(j, crate::mapfield::argmax(&label));
        }
        let after = self.map.cluster_of(j);
        if after != before {
            self.sync_clusters()?;
            let edit = Edit::Move {
                category: j,
                stats: &previous,
                from: before,
                to: after,
            };
            self.icvi.restructure(edit, self.art.conn())?;
        }
        Ok(())
    }

    fn create(&mut self, xa: &[f64], x: &[f64], target: &Target) -> usize {
        let j = self.art.create_category(xa, x);
        match (target, self.config.l_type) {
            (Target::Supervised(y), _) => self.map.add_category_with_label(y),
            (Target::Matrix(ys), LearningMode::Fixed) => self.map.add_category_with_label(&ys[0]),
            (Target::Disabled, LearningMode::Fixed) => {
                let k = self.map.k().max(1);
                self.map.add_category_with_label(&one_hot(k, 0));
            }
            (_, LearningMode::Variable) => {
                self.map.add_category_new_cluster();
            }
        }
        j
    }

    /// Cluster of `x` under the frozen model: no learning, no map-field veto.
    pub fn predict_one(&self, x: &[f64]) -> Result<usize> {
        self.check_input(x)?;
        let j = self.art.best_category(x, self.rho_a)?;
        Ok(self.map.cluster_of(j))
    }

    pub fn predict(&self, xs: &[Vec<f64>]) -> Result<Vec<usize>> {
        xs.iter().map(|x| self.predict_one(x)).collect()
    }

    /// Presents a stream in order; `labels[i]` is an optional supervised
    /// cluster for sample `i`.
    pub fn run_stream(
        &mut self,
        xs: &[Vec<f64>],
        labels: Option<&[Option<usize>]>,
    ) -> Result<Vec<StepReport>> {
        if let Some(l) = labels {
            if l.len() != xs.len() {
                return Err(Error::LabelLengthMismatch {
                    left: xs.len(),
                    right: l.len(),
                });
            }
        }
        xs.iter()
            .enumerate()
            .map(|(i, x)| self.step(x, labels.and_then(|l| l[i])))
            .collect()
    }
}
