mod common;

use common::{batch_conn, close, same_value, Driver};
use proptest::prelude::*;
use topoartmap::art::{ArtParams, ModuleA};
use topoartmap::baselines::{
    Dvfa, DvfaParams, Seeding, Skm, StreamClusterer, TopoFa, TopoFaParams,
};
use topoartmap::bench::{ari, order_stream, Order};
use topoartmap::geometry::{rescale_weights, RangeState};
use topoartmap::icvi::{label_matrix, ConnIndex};
use topoartmap::stats::ClusterStats;
use topoartmap::IndexKind;

fn rows(d: usize, n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-50.0..50.0f64, d), n)
}

fn stats_close(a: &ClusterStats, b: &ClusterStats, rel: f64) -> bool {
    stats_within(a, b, rel, 0.0, 0.0)
}

/// Relative comparison where `cp_scale` and `mu_scale` bound the magnitude
/// of the operands the result was computed from.
fn stats_within(
    a: &ClusterStats,
    b: &ClusterStats,
    rel: f64,
    cp_scale: f64,
    mu_scale: f64,
) -> bool {
    let near = |x: f64, y: f64, s: f64| (x - y).abs() <= rel * x.abs().max(y.abs()).max(s) + 1e-12;
    a.n == b.n
        && near(a.cp, b.cp, cp_scale)
        && a.mu.iter().zip(&b.mu).all(|(x, y)| near(*x, *y, mu_scale))
}

fn batch(xs: &[Vec<f64>]) -> ClusterStats {
    ClusterStats::from_samples(xs.iter().map(Vec::as_slice)).unwrap()
}

proptest! {
    #[test]
    fn incremental_stats_match_batch(xs in (1usize..16).prop_flat_map(|d| rows(d, 1..200))) {
        let mut s = ClusterStats::init(&xs[0]);
        for x in &xs[1..] {
            s.add_sample(x).unwrap();
        }
        prop_assert!(stats_within(&s, &batch(&xs), 1e-6, 0.0, 50.0));
    }

    #[test]
    fn merge_pools_and_split_inverts(
        (a, b, c) in (1usize..8).prop_flat_map(|d| (rows(d, 1..40), rows(d, 1..40), rows(d, 1..40)))
    ) {
        let (sa, sb, sc) = (batch(&a), batch(&b), batch(&c));
        let ab = sa.merge(&sb);
        let union: Vec<Vec<f64>> = a.iter().chain(&b).cloned().collect();
        prop_assert!(stats_within(&ab, &batch(&union), 1e-6, 0.0, 50.0));
        prop_assert!(stats_close(&ab, &sb.merge(&sa), 1e-9));
        prop_assert!(stats_within(&ab.split(&sb).unwrap(), &sa, 1e-6, ab.cp, 50.0));
        prop_assert!(stats_within(&ab.merge(&sc), &sa.merge(&sb.merge(&sc)), 1e-6, 0.0, 50.0));
    }

    #[test]
    fn complement_coding_has_norm_d(
        (lo, hi, x) in (1usize..10).prop_flat_map(|d| (
            prop::collection::vec(-10.0..0.0f64, d),
            prop::collection::vec(0.0..10.0f64, d),
            prop::collection::vec(-20.0..20.0f64, d),
        ))
    ) {
        let r = RangeState::from_bounds(lo, hi).unwrap();
        let xa = r.normalize_cc(&x).unwrap();
        prop_assert!(xa.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!((xa.iter().sum::<f64>() - x.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn range_is_monotone(xs in (1usize..6).prop_flat_map(|d| rows(d, 1..50))) {
        let mut r = RangeState::new(&xs[0]);
        for x in &xs[1..] {
            let before = r.clone();
            r.observe(x).unwrap();
            prop_assert!(before.is_within(&r));
        }
    }

    #[test]
    fn rescaling_keeps_raw_boxes_and_composes(
        (a, b, grow1, grow2) in (1usize..6).prop_flat_map(|d| (
            prop::collection::vec(0.0..1.0f64, d),
            prop::collection::vec(0.0..1.0f64, d),
            prop::collection::vec((0.0..5.0f64, 0.0..5.0f64), d),
            prop::collection::vec((0.0..5.0f64, 0.0..5.0f64), d),
        ))
    ) {
        let d = a.len();
        let r0 = RangeState::from_bounds(vec![0.0; d], vec![1.0; d]).unwrap();
        let widen = |r: &RangeState, g: &[(f64, f64)]| {
            RangeState::from_bounds(
                r.min().iter().zip(g).map(|(m, g)| m - g.0).collect(),
                r.max().iter().zip(g).map(|(m, g)| m + g.1).collect(),
            ).unwrap()
        };
        let r1 = widen(&r0, &grow1);
        let r2 = widen(&r1, &grow2);
        // Raw box [lo, up] inside r0, encoded as [u, 1 - v].
        let lo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
        let up: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
        let w0: Vec<f64> = lo.iter().copied().chain(up.iter().map(|u| 1.0 - u)).collect();

        let mut stepwise = vec![w0.clone()];
        rescale_weights(&r0, &r1, &mut stepwise).unwrap();
        rescale_weights(&r1, &r2, &mut stepwise).unwrap();
        let mut direct = vec![w0];
        rescale_weights(&r0, &r2, &mut direct).unwrap();
        for (s, t) in stepwise[0].iter().zip(&direct[0]) {
            prop_assert!((s - t).abs() < 1e-12);
        }
        for i in 0..d {
            let span = r2.max()[i] - r2.min()[i];
            let raw_lo = r2.min()[i] + direct[0][i] * span;
            let raw_up = r2.min()[i] + (1.0 - direct[0][d + i]) * span;
            prop_assert!((raw_lo - lo[i]).abs() < 1e-12 * span.max(1.0));
            prop_assert!((raw_up - up[i]).abs() < 1e-12 * span.max(1.0));
        }
    }

    #[test]
    fn conn_stays_symmetric(xs in rows(2, 2..120), beta_2 in 0.0..1.0f64, rho in 0.3..0.95f64) {
        let mut art = ModuleA::new(ArtParams { beta_2, ..Default::default() });
        for x in &xs {
            let xa = art.prepare(x).unwrap();
            let ranking = art.ranking(&xa);
            let mut r = rho;
            let (j, after) = match art.search(&ranking, &xa, x, &mut r, |_, _, _| true) {
                topoartmap::art::SearchOutcome::Resonant { category, rank } => {
                    art.learn_first(category, &xa, x).unwrap();
                    (category, Some(rank))
                }
                topoartmap::art::SearchOutcome::NewCategory => (art.create_category(&xa, x), None),
            };
            if let Some(j2) = art.second_resonant(&ranking, after, j, &xa, x, rho) {
                art.learn_second(j, j2, &xa);
            }
            prop_assert!(art.conn().is_symmetric_zero_diagonal());
            for c in art.categories() {
                let d = c.w.len() / 2;
                prop_assert!((0..d).all(|i| c.w[i] <= 1.0 - c.w[d + i] + 1e-12));
            }
        }
        let total: usize = art.categories().iter().map(|c| c.stats.n).sum();
        prop_assert_eq!(total, xs.len());
    }

    #[test]
    fn label_matrix_rows_are_argmax_one_hots(tb in prop::collection::vec(prop_oneof![Just(1.0), Just(2.0), -5.0..5.0f64], 1..8)) {
        let y = label_matrix(&tb);
        let max = tb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let argmax: Vec<usize> = (0..tb.len()).filter(|&i| tb[i] == max).collect();
        prop_assert_eq!(y.len(), argmax.len());
        for (row, &c) in y.iter().zip(&argmax) {
            prop_assert_eq!(row.iter().sum::<f64>(), 1.0);
            prop_assert_eq!(row[c], 1.0);
        }
    }

    #[test]
    fn incremental_indices_match_batch(seed in any::<u64>(), dim in 1usize..8, steps in 20usize..200) {
        for kind in IndexKind::ALL {
            let mut drv = Driver::new(kind, dim, seed);
            for step in 0..steps {
                if step % 4 == 3 { drv.edit() } else { drv.commit() }
                prop_assert!(
                    same_value(drv.state.value(), drv.oracle(), 1e-6),
                    "{:?} step {}: {:?} vs {:?}", kind, step, drv.state.value(), drv.oracle()
                );
            }
        }
    }

    #[test]
    fn graph_cache_matches_rebuild(seed in any::<u64>(), steps in 10usize..150) {
        let mut drv = Driver::new(IndexKind::Conn, 2, seed);
        for step in 0..steps {
            if step % 3 == 2 { drv.edit() } else { drv.commit() }
            let freq: Vec<u64> = drv.protos.iter().map(|p| p.1.len() as u64).collect();
            let rebuilt = ConnIndex::rebuild(&drv.conn, &drv.labels(), drv.slots, &freq);
            prop_assert_eq!(drv.state.graph(), &rebuilt);
            let v = drv.state.value();
            let b = batch_conn(&drv.dense_conn(), &drv.labels());
            prop_assert!(same_value(v, b, 1e-9));
        }
    }

    #[test]
    fn ari_is_symmetric_and_relabel_invariant(
        (a, b) in (2usize..60).prop_flat_map(|n| (prop::collection::vec(0usize..5, n), prop::collection::vec(0usize..5, n))),
        shift in 1usize..10,
    ) {
        let ab = ari(&a, &b).unwrap();
        prop_assert!(close(ab, ari(&b, &a).unwrap(), 1e-12));
        let relabeled: Vec<usize> = b.iter().map(|l| (l + shift) * 7 % 53).collect();
        prop_assert!(close(ab, ari(&a, &relabeled).unwrap(), 1e-12));
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn orders_are_permutations(truth in prop::collection::vec(0usize..7, 0..300), seed in any::<u64>()) {
        for mode in Order::ALL {
            let mut idx = order_stream(&truth, mode, seed);
            idx.sort_unstable();
            prop_assert_eq!(idx, (0..truth.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn skm_centroids_are_means_of_won_samples(xs in rows(2, 3..150), k in 1usize..4) {
        let mut skm = Skm::new(k, Seeding::FirstK).unwrap();
        let mut won: Vec<Vec<Vec<f64>>> = vec![Vec::new(); k];
        for (i, x) in xs.iter().enumerate() {
            if i < k {
                skm.learn(x).unwrap();
                won[i].push(x.clone());
            } else {
                let w = skm.update(x);
                won[w].push(x.clone());
            }
        }
        for (c, samples) in skm.centroids().iter().zip(&won) {
            if samples.is_empty() { continue; }
            let m = batch(samples).mu;
            prop_assert!(c.iter().zip(&m).all(|(a, b)| close(*a, *b, 1e-9)));
        }
    }

    #[test]
    fn topofa_clusters_are_graph_components(xs in rows(2, 5..150), rho in 0.5..0.95f64) {
        let mut m = TopoFa::new(TopoFaParams { rho, tau: 0, beta_2: 0.3, ..Default::default() }).unwrap();
        for x in &xs {
            m.learn(x).unwrap();
        }
        let conn = m.module_a().conn();
        let p = conn.len();
        // Flood fill over conn > 0.
        let mut comp = vec![usize::MAX; p];
        let mut count = 0;
        for s in 0..p {
            if comp[s] != usize::MAX { continue; }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(i) = stack.pop() {
                let next: Vec<usize> = (0..p).filter(|&j| conn.get(i, j) > 0 && comp[j] == usize::MAX).collect();
                for j in next {
                    comp[j] = count;
                    stack.push(j);
                }
            }
            count += 1;
        }
        prop_assert_eq!(m.n_clusters(), count);
        prop_assert_eq!(m.assignments(), comp);
    }

    #[test]
    fn dvfa_with_equal_vigilances_has_one_cluster_per_category(xs in rows(3, 1..100), rho in 0.0..1.0f64) {
        let mut m = Dvfa::new(DvfaParams { rho_ub: rho, rho_lb: rho, ..Default::default() }).unwrap();
        for x in &xs {
            m.learn(x).unwrap();
        }
        prop_assert_eq!(m.n_clusters(), m.n_categories());
    }
}
