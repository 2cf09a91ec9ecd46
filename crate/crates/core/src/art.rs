//! Module A: topological fuzzy ART with online re-scaling, per-category
//! summary statistics, inactivity counters and a connectivity matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{rescale_weights, RangeState};
use crate::stats::ClusterStats;

/// Match function used by the vigilance test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    /// `|x ∧ w|₁ / |x|₁ >= ρ` on complement-coded inputs.
    #[default]
    Fuzzy,
    /// `1 - cos(x, μ) <= ρ` on raw inputs against the category mean.
    Cosine,
}

impl MatchKind {
    pub fn passes(self, value: f64, rho: f64) -> bool {
        match self {
            MatchKind::Fuzzy => value >= rho,
            MatchKind::Cosine => value <= rho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArtParams {
    pub alpha: f64,
    pub beta_1: f64,
    pub beta_2: f64,
    pub match_kind: MatchKind,
    pub uncommitted_gate: bool,
}

impl Default for ArtParams {
    fn default() -> Self {
        Self {
            alpha: 0.001,
            beta_1: 1.0,
            beta_2: 0.0,
            match_kind: MatchKind::Fuzzy,
            uncommitted_gate: true,
        }
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().sum()
}

fn fuzzy_and_l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// Choice function `|x ∧ w|₁ / (α + |w|₁)`.
pub fn activation(xa: &[f64], w: &[f64], alpha: f64) -> f64 {
    fuzzy_and_l1(xa, w) / (alpha + l1(w))
}

/// Fuzzy match `|x ∧ w|₁ / |x|₁`.
pub fn match_fuzzy(xa: &[f64], w: &[f64]) -> f64 {
    let norm = l1(xa);
    if norm <= 0.0 {
        return 0.0;
    }
    fuzzy_and_l1(xa, w) / norm
}

/// Cosine distance in `[0, 2]`; a zero vector on either side is a maximal
/// mismatch.
pub fn match_cosine(x: &[f64], mu: &[f64]) -> f64 {
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nm = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || nm == 0.0 {
        return 2.0;
    }
    let dot: f64 = x.iter().zip(mu).map(|(a, b)| a * b).sum();
    (1.0 - dot / (nx * nm)).clamp(0.0, 2.0)
}

/// Activation of an uncommitted (all-ones) category for a complement-coded
/// input of `d` raw features; `-1` disables the gate.
pub fn uncommitted_threshold(d: usize, alpha: f64, enabled: bool) -> f64 {
    if enabled {
        d as f64 / (alpha + 2.0 * d as f64)
    } else {
        -1.0
    }
}

/// Fuzzy-min learning `w ← (1-β) w + β (x ∧ w)`.
pub fn fuzzy_learn(w: &mut [f64], xa: &[f64], beta: f64) {
    for (wi, &xi) in w.iter_mut().zip(xa) {
        *wi = (1.0 - beta) * *wi + beta * xi.min(*wi);
    }
}

/// One module-A prototype.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub w: Vec<f64>,
    pub stats: ClusterStats,
    pub inactivity: u64,
}

impl Category {
    /// Lower and upper corners of the hyperbox in normalized coordinates.
    pub fn hyperbox(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.w.len() / 2;
        let lower = self.w[..d].to_vec();
        let upper = self.w[d..].iter().map(|v| 1.0 - v).collect();
        (lower, upper)
    }
}

/// Symmetric co-resonance counts between categories.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConnMatrix {
    size: usize,
    data: Vec<u64>,
}

impl ConnMatrix {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            data: vec![0; size * size],
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    /// Adds one co-resonance between two distinct categories.
    pub fn link(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "self-links are not recorded");
        self.data[i * self.size + j] += 1;
        self.data[j * self.size + i] += 1;
    }

    /// Appends a zero row and column.
    pub fn grow(&mut self) {
        let n = self.size + 1;
        let mut data = vec![0; n * n];
        for i in 0..self.size {
            data[i * n..i * n + self.size].copy_from_slice(self.row(i));
        }
        self.size = n;
        self.data = data;
    }

    /// Keeps only the listed categories, in the given order.
    pub fn select(&self, keep: &[usize]) -> Self {
        let mut out = Self::new(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                out.data[a * out.size + b] = self.get(i, j);
            }
        }
        out
    }

    /// Sums blocks of categories into groups; intra-group mass is dropped so
    /// the diagonal stays zero.
    pub fn block_sum(&self, groups: &[Vec<usize>]) -> Self {
        let mut out = Self::new(groups.len());
        for (a, ga) in groups.iter().enumerate() {
            for (b, gb) in groups.iter().enumerate() {
                if a == b {
                    continue;
                }
                let mass: u64 = ga
                    .iter()
                    .flat_map(|&k| gb.iter().map(move |&l| (k, l)))
                    .map(|(k, l)| self.get(k, l))
                    .sum();
                out.data[a * out.size + b] = mass;
            }
        }
        out
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }

    pub fn is_symmetric_zero_diagonal(&self) -> bool {
        (0..self.size)
            .all(|i| self.get(i, i) == 0 && (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Outcome of the first-resonance search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    /// Category index and its position in the activation ranking.
    Resonant {
        category: usize,
        rank: usize,
    },
    NewCategory,
}

/// Category activations sorted in descending order; ties go to the lower index.
#[derive(Debug, Clone)]
pub struct Ranking(pub Vec<(usize, f64)>);

impl Ranking {
    pub fn iter(&self) -> impl Iterator<Item = &(usize, f64)> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleA {
    pub params: ArtParams,
    range: Option<RangeState>,
    categories: Vec<Category>,
    conn: ConnMatrix,
}

impl ModuleA {
    pub fn new(params: ArtParams) -> Self {
        Self {
            params,
            range: None,
            categories: Vec::new(),
            conn: ConnMatrix::new(0),
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.range.as_ref().map(RangeState::dim)
    }

    pub fn range(&self) -> Option<&RangeState> {
        self.range.as_ref()
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn categories_mut(&mut self) -> &mut [Category] {
        &mut self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn conn(&self) -> &ConnMatrix {
        &self.conn
    }

    pub fn threshold(&self) -> f64 {
        let d = self.dim().unwrap_or(0);
        uncommitted_threshold(d, self.params.alpha, self.params.uncommitted_gate)
    }

    /// Absorbs `x` into the running range, re-scales every weight when the
    /// range moved, and returns the complement-coded input.
    pub fn prepare(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        match self.range.as_mut() {
            None => {
                self.range = Some(RangeState::new(x));
            }
            Some(range) => {
                let old = range.clone();
                if range.observe(x)? {
                    let mut weights: Vec<Vec<f64>> =
                        self.categories.iter().map(|c| c.w.clone()).collect();
                    rescale_weights(&old, range, &mut weights)?;
                    for (c, w) in self.categories.iter_mut().zip(weights) {
                        c.w = w;
                    }
                }
            }
        }
        self.range
            .as_ref()
            .expect("range set above")
            .normalize_cc(x)
    }

    /// Complement-coded input against the current range, without learning it.
    pub fn encode(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.range
            .as_ref()
            .ok_or(Error::EmptyModel)?
            .normalize_cc(x)
    }

    pub fn ranking(&self, xa: &[f64]) -> Ranking {
        let mut r: Vec<(usize, f64)> = self
            .categories
            .iter()
            .enumerate()
            .map(|(j, c)| (j, activation(xa, &c.w, self.params.alpha)))
            .collect();
        r.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Ranking(r)
    }

    pub fn match_value(&self, j: usize, xa: &[f64], x: &[f64]) -> f64 {
        let c = &self.categories[j];
        match self.params.match_kind {
            MatchKind::Fuzzy => match_fuzzy(xa, &c.w),
            MatchKind::Cosine => match_cosine(x, &c.stats.mu),
        }
    }

    /// Walks the ranking and returns the first category that clears the
    /// uncommitted gate, the vigilance test at the current `rho` and the
    /// external `accept` test. `accept` may raise or lower `rho` (match
    /// tracking) before returning false.
    pub fn search<F>(
        &self,
        ranking: &Ranking,
        xa: &[f64],
        x: &[f64],
        rho: &mut f64,
        mut accept: F,
    ) -> SearchOutcome
    where
        F: FnMut(usize, f64, &mut f64) -> bool,
    {
        let gate = self.threshold();
        for (rank, &(j, t)) in ranking.iter().enumerate() {
            if t <= gate {
                break;
            }
            let m = self.match_value(j, xa, x);
            if !self.params.match_kind.passes(m, *rho) {
                continue;
            }
            if accept(j, m, rho) {
                return SearchOutcome::Resonant { category: j, rank };
            }
        }
        SearchOutcome::NewCategory
    }

    /// Second resonant category: the next candidate after position `after`
    /// in the ranking (or any category when `after` is `None`) that passes
    /// the gate and the baseline vigilance.
    pub fn second_resonant(
        &self,
        ranking: &Ranking,
        after: Option<usize>,
        exclude: usize,
        xa: &[f64],
        x: &[f64],
        rho: f64,
    ) -> Option<usize> {
        let gate = self.threshold();
        let start = after.map_or(0, |r| r + 1);
        ranking
            .0
            .iter()
            .skip(start)
            .take_while(|(_, t)| *t > gate)
            .map(|&(j, _)| j)
            .filter(|&j| j != exclude && j < self.categories.len())
            .find(|&j| {
                self.params
                    .match_kind
                    .passes(self.match_value(j, xa, x), rho)
            })
    }

    pub fn learn_first(&mut self, j: usize, xa: &[f64], x: &[f64]) -> Result<()> {
        let beta = self.params.beta_1;
        let c = &mut self.categories[j];
        fuzzy_learn(&mut c.w, xa, beta);
        c.stats.add_sample(x)
    }

    pub fn learn_second(&mut self, first: usize, second: usize, xa: &[f64]) {
        let beta = self.params.beta_2;
        fuzzy_learn(&mut self.categories[second].w, xa, beta);
        self.conn.link(first, second);
    }

    pub fn create_category(&mut self, xa: &[f64], x: &[f64]) -> usize {
        self.categories.push(Category {
            w: xa.to_vec(),
            stats: ClusterStats::init(x),
            inactivity: 0,
        });
        self.conn.grow();
        self.categories.len() - 1
    }

    /// Every counter ages by one; the resonant category resets to zero.
    pub fn tick_inactivity(&mut self, resonant: usize) {
        for c in &mut self.categories {
            c.inactivity += 1;
        }
        self.categories[resonant].inactivity = 0;
    }

    /// Replaces categories and connectivity wholesale (compression).
    pub fn replace(&mut self, categories: Vec<Category>, conn: ConnMatrix) {
        assert_eq!(categories.len(), conn.len());
        self.categories = categories;
        self.conn = conn;
    }

    /// Keeps the listed categories (in order), dropping the rest.
    pub fn retain(&mut self, keep: &[usize]) {
        self.conn = self.conn.select(keep);
        self.categories = keep.iter().map(|&j| self.categories[j].clone()).collect();
    }

    /// Category chosen for a frozen-model query: the best-ranked one passing
    /// the gate and vigilance `rho`, else the top-ranked one.
    pub fn best_category(&self, x: &[f64], rho: f64) -> Result<usize> {
        if self.categories.is_empty() {
            return Err(Error::EmptyModel);
        }
        let xa = self.encode(x)?;
        let ranking = self.ranking(&xa);
        let gate = self.threshold();
        let chosen = ranking
            .iter()
            .take_while(|(_, t)| *t > gate)
            .map(|&(j, _)| j)
            .find(|&j| {
                self.params
                    .match_kind
                    .passes(self.match_value(j, &xa, x), rho)
            });
        Ok(chosen.unwrap_or(ranking.0[0].0))
    }
}
