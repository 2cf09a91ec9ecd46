//! End-of-step restructuring: merge, split, swap, compress and
//! prune-and-reassign. Every edit keeps module A, the map field and the
//! index state consistent.

use log::warn;

use crate::art::{activation, fuzzy_learn, Category, ModuleA};
use crate::config::SplitKind;
use crate::error::Result;
use crate::icvi::{Edit, IcviState, IndexKind};
use crate::mapfield::{argmax, row_match, LearningMode, MapField};
use crate::stats::ClusterStats;
use crate::trainer::TopoArtmap;

/// Epoch cap for the inner compression network.
pub const MAX_COMPRESS_EPOCHS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    AddCluster,
    Move { category: usize, to: usize },
    Merge { keep: usize, absorb: usize },
}

fn apply(map: &mut MapField, icvi: &mut IcviState, art: &ModuleA, op: Op) -> Result<()> {
    match op {
        Op::AddCluster => {
            map.add_cluster();
            icvi.restructure(Edit::AddCluster, art.conn())
        }
        Op::Move { category, to } => {
            let from = map.cluster_of(category);
            if from == to {
                return Ok(());
            }
            map.relabel(category, to);
            let edit = Edit::Move {
                category,
                stats: &art.categories()[category].stats,
                from,
                to,
            };
            icvi.restructure(edit, art.conn())
        }
        Op::Merge { keep, absorb } => {
            map.merge_clusters(keep, absorb);
            icvi.restructure(Edit::Merge { keep, absorb }, art.conn())
        }
    }
}

/// `new` beats `old`; a defined value beats an undefined one.
fn improves(kind: IndexKind, new: Option<f64>, old: Option<f64>) -> bool {
    match (new, old) {
        (Some(n), Some(o)) => kind.better(n, o),
        (Some(_), None) => true,
        _ => false,
    }
}

fn members(map: &MapField, cluster: usize) -> Vec<usize> {
    (0..map.len())
        .filter(|&j| map.cluster_of(j) == cluster)
        .collect()
}

/// Working copy of the mutable structure used during emulation.
#[derive(Clone)]
struct Sim {
    map: MapField,
    icvi: IcviState,
}

impl Sim {
    fn apply(&mut self, art: &ModuleA, op: Op) -> Result<()> {
        apply(&mut self.map, &mut self.icvi, art, op)
    }

    fn move_value(&self, art: &ModuleA, category: usize, to: usize) -> Result<Option<f64>> {
        let edit = Edit::Move {
            category,
            stats: &art.categories()[category].stats,
            from: self.map.cluster_of(category),
            to,
        };
        self.icvi.emulate(edit, art.conn())
    }

    /// Greedy merging restricted to `pool` while the index improves.
    fn remerge(&mut self, art: &ModuleA, pool: &mut Vec<usize>, ops: &mut Vec<Op>) -> Result<()> {
        let kind = self.icvi.kind();
        while pool.len() > 1 {
            let mut best: Option<(Option<f64>, usize, usize)> = None;
            for a in 0..pool.len() {
                for b in a + 1..pool.len() {
                    let (keep, absorb) = (pool[a], pool[b]);
                    let v = self
                        .icvi
                        .emulate(Edit::Merge { keep, absorb }, art.conn())?;
                    if best.as_ref().is_none_or(|(s, _, _)| improves(kind, v, *s)) {
                        best = Some((v, keep, absorb));
                    }
                }
            }
            let Some((v, keep, absorb)) = best else { break };
            if !improves(kind, v, self.icvi.value()) {
                break;
            }
            let op = Op::Merge { keep, absorb };
            self.apply(art, op)?;
            ops.push(op);
            pool.retain(|&c| c != absorb);
        }
        Ok(())
    }
}

impl TopoArtmap {
    /// Enabled strategies in their fixed order.
    pub(crate) fn post_process(&mut self) -> Result<()> {
        if self.config.en_merge {
            self.merge_clusters()?;
        }
        if self.config.en_split {
            self.split_clusters()?;
        }
        if self.config.en_swap {
            self.swap_categories()?;
        }
        if self.config.en_compress {
            self.compress()?;
        }
        if self.config.en_prune_reassign {
            self.prune_and_reassign()?;
        }
        Ok(())
    }

    fn run(&mut self, op: Op) -> Result<()> {
        apply(&mut self.map, &mut self.icvi, &self.art, op)
    }

    fn sim(&self) -> Sim {
        Sim {
            map: self.map.clone(),
            icvi: self.icvi.clone(),
        }
    }

    fn live_clusters(&self) -> Vec<usize> {
        let live = self.map.live_clusters();
        (0..live.len()).filter(|&c| live[c]).collect()
    }

    /// Deletes clusters left without categories (variable mode only; in
    /// fixed mode column indices are labels and stay put).
    fn drop_empty_clusters(&mut self) -> Result<()> {
        if self.config.l_type != LearningMode::Variable {
            return Ok(());
        }
        let live = self.map.live_clusters();
        for c in (0..live.len()).rev() {
            if !live[c] {
                self.map.remove_cluster(c);
                self.icvi
                    .restructure(Edit::RemoveCluster(c), self.art.conn())?;
            }
        }
        Ok(())
    }

    /// Emulates greedy pairwise merging down to two clusters and keeps the
    /// best stage if it beats the current partition. Requires `v = 0`.
    pub fn merge_clusters(&mut self) -> Result<bool> {
        let mut alive = self.live_clusters();
        if alive.len() <= 2 || self.icvi.tracker() != 0 {
            return Ok(false);
        }
        let kind = self.icvi.kind();
        let mut best = self.icvi.value();
        let mut state = self.icvi.clone();
        let conn = self.art.conn();
        let mut plan = Vec::new();
        let mut best_plan = None;
        while alive.len() > 2 {
            let mut stage: Option<(f64, usize, usize)> = None;
            for a in 0..alive.len() {
                for b in a + 1..alive.len() {
                    let (keep, absorb) = (alive[a], alive[b]);
                    if let Some(v) = state.emulate(Edit::Merge { keep, absorb }, conn)? {
                        if stage.is_none_or(|(s, _, _)| kind.better(v, s)) {
                            stage = Some((v, keep, absorb));
                        }
                    }
                }
            }
            let Some((v, keep, absorb)) = stage else {
                break;
            };
            state.restructure(Edit::Merge { keep, absorb }, conn)?;
            alive.retain(|&c| c != absorb);
            plan.push(Op::Merge { keep, absorb });
            if improves(kind, Some(v), best) {
                best = Some(v);
                best_plan = Some(plan.clone());
            }
        }
        let Some(plan) = best_plan else {
            return Ok(false);
        };
        for op in plan {
            self.run(op)?;
        }
        self.drop_empty_clusters()?;
        Ok(true)
    }

    /// Split strategy selected by `s_type`; runs only while `v > τ`.
    pub fn split_clusters(&mut self) -> Result<bool> {
        if self.icvi.tracker() <= self.config.tau {
            return Ok(false);
        }
        match self.config.s_type {
            SplitKind::ActivityBased => self.split_activity(),
            SplitKind::FullDecomposition => self.split_full(),
            SplitKind::PartialDecomposition => self.split_partial(),
        }
    }

    fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.map.k()];
        for c in self.map.assignments() {
            sizes[c] += 1;
        }
        sizes
    }

    /// The most recently active category that shares its cluster becomes
    /// a singleton cluster.
    fn split_activity(&mut self) -> Result<bool> {
        let sizes = self.cluster_sizes();
        let mut order: Vec<usize> = (0..self.art.len()).collect();
        order.sort_by_key(|&j| (self.art.categories()[j].inactivity, j));
        let Some(j) = order
            .into_iter()
            .find(|&j| sizes[self.map.cluster_of(j)] >= 2)
        else {
            return Ok(false);
        };
        let to = self.map.k();
        self.run(Op::AddCluster)?;
        self.run(Op::Move { category: j, to })?;
        Ok(true)
    }

    /// Atomizes each multi-category cluster, re-merges greedily, and adopts
    /// the best result while it improves the index.
    fn split_full(&mut self) -> Result<bool> {
        let kind = self.icvi.kind();
        let mut changed = false;
        for _ in 0..self.art.len() {
            let mut best: Option<(Option<f64>, Vec<Op>)> = None;
            for cluster in self.live_clusters() {
                let cats = members(&self.map, cluster);
                if cats.len() < 2 {
                    continue;
                }
                let mut sim = self.sim();
                let mut ops = Vec::new();
                let mut pool = vec![cluster];
                for &j in &cats[1..] {
                    let to = sim.map.k();
                    for op in [Op::AddCluster, Op::Move { category: j, to }] {
                        sim.apply(&self.art, op)?;
                        ops.push(op);
                    }
                    pool.push(to);
                }
                sim.remerge(&self.art, &mut pool, &mut ops)?;
                let v = sim.icvi.value();
                if best.as_ref().is_none_or(|(b, _)| improves(kind, v, *b)) {
                    best = Some((v, ops));
                }
            }
            match best {
                Some((v, ops)) if improves(kind, v, self.icvi.value()) => {
                    for op in ops {
                        self.run(op)?;
                    }
                    self.drop_empty_clusters()?;
                    changed = true;
                }
                _ => break,
            }
        }
        Ok(changed)
    }

    /// Seeds a new cluster with the best detachable category, swaps members
    /// between the two halves while that improves, and applies the best
    /// such split across clusters.
    fn split_partial(&mut self) -> Result<bool> {
        let kind = self.icvi.kind();
        let mut best: Option<(Option<f64>, Vec<Op>)> = None;
        for cluster in self.live_clusters() {
            let cats = members(&self.map, cluster);
            if cats.len() < 2 {
                continue;
            }
            let mut sim = self.sim();
            let fresh = sim.map.k();
            sim.apply(&self.art, Op::AddCluster)?;
            let mut seed: Option<(Option<f64>, usize)> = None;
            for &j in &cats {
                let v = sim.move_value(&self.art, j, fresh)?;
                if seed.is_none_or(|(s, _)| improves(kind, v, s)) {
                    seed = Some((v, j));
                }
            }
            let Some((_, s)) = seed else { continue };
            let mut ops = vec![
                Op::AddCluster,
                Op::Move {
                    category: s,
                    to: fresh,
                },
            ];
            sim.apply(&self.art, ops[1])?;
            for _ in 0..cats.len() * cats.len() {
                let sizes = [
                    members(&sim.map, cluster).len(),
                    members(&sim.map, fresh).len(),
                ];
                let mut step: Option<(Option<f64>, Op)> = None;
                for &j in cats.iter().filter(|&&j| j != s) {
                    let from = sim.map.cluster_of(j);
                    let (to, side) = if from == cluster {
                        (fresh, 0)
                    } else {
                        (cluster, 1)
                    };
                    if sizes[side] < 2 {
                        continue;
                    }
                    let v = sim.move_value(&self.art, j, to)?;
                    if step.as_ref().is_none_or(|(b, _)| improves(kind, v, *b)) {
                        step = Some((v, Op::Move { category: j, to }));
                    }
                }
                match step {
                    Some((v, op)) if improves(kind, v, sim.icvi.value()) => {
                        sim.apply(&self.art, op)?;
                        ops.push(op);
                    }
                    _ => break,
                }
            }
            let v = sim.icvi.value();
            if best.as_ref().is_none_or(|(b, _)| improves(kind, v, *b)) {
                best = Some((v, ops));
            }
        }
        let Some((_, ops)) = best else {
            return Ok(false);
        };
        for op in ops {
            self.run(op)?;
        }
        Ok(true)
    }

    /// Greedily moves single categories to clusters they are connected to
    /// while the index strictly improves. A move may empty its cluster but
    /// never leaves a single cluster.
    pub fn swap_categories(&mut self) -> Result<bool> {
        let kind = self.icvi.kind();
        let p = self.art.len();
        if p <= 2 {
            return Ok(false);
        }
        let mut changed = false;
        for _ in 0..4 * p {
            let assign = self.map.assignments();
            let sizes = self.cluster_sizes();
            let live = sizes.iter().filter(|&&s| s > 0).count();
            let conn = self.art.conn();
            let mut best: Option<(f64, Op)> = None;
            for j in 0..p {
                let from = assign[j];
                if sizes[from] == 1 && live <= 2 {
                    continue;
                }
                let mut targets: Vec<usize> = conn
                    .row(j)
                    .iter()
                    .enumerate()
                    .filter(|&(g, &c)| c > 0 && assign[g] != from)
                    .map(|(g, _)| assign[g])
                    .collect();
                targets.sort_unstable();
                targets.dedup();
                for to in targets {
                    let edit = Edit::Move {
                        category: j,
                        stats: &self.art.categories()[j].stats,
                        from,
                        to,
                    };
                    if let Some(v) = self.icvi.emulate(edit, conn)? {
                        if best.is_none_or(|(b, _)| kind.better(v, b)) {
                            best = Some((v, Op::Move { category: j, to }));
                        }
                    }
                }
            }
            match best {
                Some((v, op)) if improves(kind, Some(v), self.icvi.value()) => {
                    self.run(op)?;
                    self.drop_empty_clusters()?;
                    changed = true;
                }
                _ => break,
            }
        }
        Ok(changed)
    }

    /// Compresses inactive categories with a frozen-prefix fuzzy ARTMAP
    /// trained on the categories' own weights and map-field rows.
    pub fn compress(&mut self) -> Result<bool> {
        let xi = self.config.xi;
        let cats = self.art.categories();
        let p_old = cats.len();
        let (hot, cold): (Vec<usize>, Vec<usize>) =
            (0..p_old).partition(|&i| cats[i].inactivity >= xi);
        if hot.is_empty() {
            return Ok(false);
        }
        let Some(groups) = self.compress_groups(&hot, &cold) else {
            return Ok(false);
        };
        if groups.len() >= p_old {
            return Ok(false);
        }

        let mut categories = Vec::with_capacity(groups.len());
        let mut rows = Vec::with_capacity(groups.len());
        for (w, members) in &groups {
            let first = &cats[members[0]];
            let stats = members[1..]
                .iter()
                .fold(first.stats.clone(), |acc, &m| acc.merge(&cats[m].stats));
            let inactivity = members
                .iter()
                .map(|&m| cats[m].inactivity)
                .min()
                .unwrap_or(0);
            categories.push(Category {
                w: w.clone(),
                stats,
                inactivity,
            });
            rows.push(self.map.row(members[0]).to_vec());
        }
        let blocks: Vec<Vec<usize>> = groups.iter().map(|(_, m)| m.clone()).collect();
        let freq: Vec<u64> = blocks
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&i| self.icvi.graph().freq().get(i).copied().unwrap_or(0))
                    .sum()
            })
            .collect();
        let conn = self.art.conn().block_sum(&blocks);
        self.art.replace(categories, conn);
        self.map.replace_rows(rows);
        let labels = self.map.assignments();
        self.icvi.rebuild_graph(self.art.conn(), &labels, &freq);
        Ok(true)
    }

    /// Trains the inner network to convergence. Returns, per surviving
    /// inner category, its weight and the outer categories it absorbs.
    #[allow(clippy::type_complexity)]
    fn compress_groups(
        &self,
        hot: &[usize],
        cold: &[usize],
    ) -> Option<Vec<(Vec<f64>, Vec<usize>)>> {
        struct Inner {
            h: Vec<f64>,
            hab: Vec<f64>,
            frozen: bool,
        }
        let cats = self.art.categories();
        let d = self.art.dim().unwrap_or(1) as f64;
        let alpha = self.config.alpha;
        let mut inner: Vec<Inner> = cold
            .iter()
            .map(|&i| Inner {
                h: cats[i].w.clone(),
                hab: self.map.row(i).to_vec(),
                frozen: true,
            })
            .collect();
        let mut owner = vec![0usize; hot.len()];
        let mut converged = false;
        for _ in 0..MAX_COMPRESS_EPOCHS {
            let before: Vec<Vec<f64>> = inner.iter().map(|c| c.h.clone()).collect();
            for (a, &i) in hot.iter().enumerate() {
                let w = &cats[i].w;
                let wab = self.map.row(i);
                let mut ranked: Vec<(usize, f64)> = inner
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.frozen)
                    .map(|(j, c)| (j, activation(w, &c.h, alpha)))
                    .collect();
                ranked.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
                let mut rho = self.config.rho_c;
                let mut chosen = None;
                for (j, _) in ranked {
                    let m = w
                        .iter()
                        .zip(&inner[j].h)
                        .map(|(x, y)| x.min(*y))
                        .sum::<f64>()
                        / d;
                    if m < rho {
                        continue;
                    }
                    let same = argmax(wab) == argmax(&inner[j].hab);
                    if same && row_match(wab, &inner[j].hab) >= self.config.rho_ab {
                        chosen = Some(j);
                        break;
                    }
                    rho = (m + self.config.epsilon).clamp(0.0, 1.0);
                }
                owner[a] = match chosen {
                    Some(j) => {
                        fuzzy_learn(&mut inner[j].h, w, self.config.beta_1);
                        j
                    }
                    None => {
                        inner.push(Inner {
                            h: w.clone(),
                            hab: wab.to_vec(),
                            frozen: false,
                        });
                        inner.len() - 1
                    }
                };
            }
            if inner.len() == before.len() && inner.iter().zip(&before).all(|(c, b)| c.h == *b) {
                converged = true;
                break;
            }
        }
        if !converged {
            warn!("compression did not converge within {MAX_COMPRESS_EPOCHS} epochs; skipped");
            return None;
        }
        let mut groups: Vec<Vec<usize>> = cold.iter().map(|&i| vec![i]).collect();
        groups.resize(inner.len(), Vec::new());
        for (a, &i) in hot.iter().enumerate() {
            groups[owner[a]].push(i);
        }
        Some(
            inner
                .into_iter()
                .zip(groups)
                .filter(|(_, g)| !g.is_empty())
                .map(|(c, g)| (c.h, g))
                .collect(),
        )
    }

    /// Inactive categories of small clusters join the cluster of their most
    /// activated surviving neighbour.
    pub fn prune_and_reassign(&mut self) -> Result<bool> {
        let cats = self.art.categories();
        let p = cats.len();
        let size = |c: usize| self.icvi.cluster(c).map_or(0, |s: &ClusterStats| s.n);
        let pruned: Vec<bool> = (0..p)
            .map(|i| {
                cats[i].inactivity >= self.config.xi
                    && size(self.map.cluster_of(i)) < self.config.phi
            })
            .collect();
        let count = pruned.iter().filter(|&&b| b).count();
        if count == 0 || count == p {
            return Ok(false);
        }
        let alpha = self.config.alpha;
        let mut moves = Vec::new();
        for i in (0..p).filter(|&i| pruned[i]) {
            let mut best: Option<(usize, f64)> = None;
            for j in (0..p).filter(|&j| !pruned[j]) {
                let t = activation(&cats[i].w, &cats[j].w, alpha);
                if best.is_none_or(|(_, b)| t > b) {
                    best = Some((j, t));
                }
            }
            let (j, _) = best.expect("at least one category survives");
            moves.push(Op::Move {
                category: i,
                to: self.map.cluster_of(j),
            });
        }
        let mut changed = false;
        for op in moves {
            if let Op::Move { category, to } = op {
                if self.map.cluster_of(category) != to {
                    self.run(op)?;
                    changed = true;
                }
            }
        }
        self.drop_empty_clusters()?;
        Ok(changed)
    }
}
