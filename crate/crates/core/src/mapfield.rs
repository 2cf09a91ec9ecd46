//! ARTMAP map field: the category→cluster association matrix, its
//! multi-row vigilance test, standard match tracking and learning.

use serde::{Deserialize, Serialize};

use crate::art::MatchKind;

/// How new categories are mapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LearningMode {
    /// Each new category opens a new cluster.
    #[default]
    Variable,
    /// New categories copy the current label; the cluster count is fixed
    /// by the labels seen.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapFieldParams {
    pub rho_ab: f64,
    pub beta_ab: f64,
    /// Signed match-tracking step: positive for MT+, negative for MT-.
    pub epsilon: f64,
    pub mode: LearningMode,
}

impl Default for MapFieldParams {
    fn default() -> Self {
        Self {
            rho_ab: 1.0,
            beta_ab: 1.0,
            epsilon: 0.01,
            mode: LearningMode::Variable,
        }
    }
}

pub fn one_hot(k: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[i] = 1.0;
    v
}

/// `|y ∧ w|₁ / |y|₁`.
pub fn row_match(y: &[f64], w: &[f64]) -> f64 {
    let norm: f64 = y.iter().sum();
    if norm <= 0.0 {
        return 0.0;
    }
    y.iter().zip(w).map(|(a, b)| a.min(*b)).sum::<f64>() / norm
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapField {
    pub params: MapFieldParams,
    rows: Vec<Vec<f64>>,
    k: usize,
}

impl MapField {
    pub fn new(params: MapFieldParams) -> Self {
        Self {
            params,
            rows: Vec::new(),
            k: 0,
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.rows[j]
    }

    /// Number of columns (clusters).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn cluster_of(&self, j: usize) -> usize {
        argmax(&self.rows[j])
    }

    pub fn assignments(&self) -> Vec<usize> {
        (0..self.rows.len()).map(|j| self.cluster_of(j)).collect()
    }

    /// Effective match of row `j` against every row of the label matrix:
    /// the maximum and the label row that achieves it (lowest on ties).
    pub fn match_labels(&self, j: usize, labels: &[Vec<f64>]) -> (f64, usize) {
        let mut best = (f64::NEG_INFINITY, 0);
        for (r, y) in labels.iter().enumerate() {
            let m = row_match(y, &self.rows[j]);
            if m > best.0 {
                best = (m, r);
            }
        }
        best
    }

    pub fn passes(&self, m_ab: f64) -> bool {
        m_ab >= self.params.rho_ab
    }

    /// Vigilance after a map-field mismatch on a category whose module-A
    /// match value was `m_a`.
    pub fn track(&self, m_a: f64, kind: MatchKind) -> f64 {
        let eps = self.params.epsilon;
        match kind {
            MatchKind::Fuzzy => (m_a + eps).clamp(0.0, 1.0),
            MatchKind::Cosine => (m_a - eps).clamp(0.0, 2.0),
        }
    }

    /// `w_j ← (1-β) w_j + β (target ∧ w_j)`.
    pub fn learn(&mut self, j: usize, target: &[f64]) {
        let beta = self.params.beta_ab;
        for (w, &t) in self.rows[j].iter_mut().zip(target) {
            *w = (1.0 - beta) * *w + beta * t.min(*w);
        }
    }

    /// Adds a row for a new category that opens a new cluster. Returns the
    /// cluster index.
    pub fn add_category_new_cluster(&mut self) -> usize {
        let c = self.add_cluster();
        self.rows.push(one_hot(self.k, c));
        c
    }

    /// Adds a row copied from `label`, widening the matrix when the label
    /// is longer than the current cluster count.
    pub fn add_category_with_label(&mut self, label: &[f64]) {
        self.ensure_clusters(label.len());
        let mut row = label.to_vec();
        row.resize(self.k, 0.0);
        self.rows.push(row);
    }

    pub fn ensure_clusters(&mut self, k: usize) {
        while self.k < k {
            self.add_cluster();
        }
    }

    /// Appends an empty column.
    pub fn add_cluster(&mut self) -> usize {
        for r in &mut self.rows {
            r.push(0.0);
        }
        self.k += 1;
        self.k - 1
    }

    /// Rewrites category `j` to map to `cluster` only.
    pub fn relabel(&mut self, j: usize, cluster: usize) {
        self.rows[j] = one_hot(self.k, cluster);
    }

    /// Moves every category of `absorb` into `keep`. Column `absorb` is
    /// left empty.
    pub fn merge_clusters(&mut self, keep: usize, absorb: usize) {
        for j in 0..self.rows.len() {
            if self.cluster_of(j) == absorb {
                self.relabel(j, keep);
            }
        }
    }

    /// Deletes column `c`; later columns shift down by one.
    pub fn remove_cluster(&mut self, c: usize) {
        debug_assert!((0..self.rows.len()).all(|j| self.cluster_of(j) != c));
        for r in &mut self.rows {
            r.remove(c);
        }
        self.k -= 1;
    }

    pub fn replace_rows(&mut self, rows: Vec<Vec<f64>>) {
        debug_assert!(rows.iter().all(|r| r.len() == self.k));
        self.rows = rows;
    }

    /// Clusters that currently own at least one category.
    pub fn live_clusters(&self) -> Vec<bool> {
        let mut live = vec![false; self.k];
        for j in 0..self.rows.len() {
            live[self.cluster_of(j)] = true;
        }
        live
    }
}
