mod common;

use std::collections::HashSet;

use common::*;
use egorank::graph::{AttributedGraph, FeatureSpec, GraphBuilder, GraphSchema, NodeId, RawValue};
use egorank::histogram::{build_binnings, Binning, MdlBinner};
use egorank::profile::SessionProfile;
use egorank::ranking::{
    candidates, cold_start_rank, interest_scores, precompute_surprise, rank_neighbors, top_interesting,
    top_surprising, IndexFile, LocalCacheMode, PrecomputeOptions, RankMode, RankOptions, Ranking, SurpriseIndex,
};
use egorank::weights::{BlendWeights, FeatureWeights};
use egorank::Error;
use rand::Rng;

fn build(g: &AttributedGraph, options: PrecomputeOptions) -> (Vec<Binning>, SurpriseIndex) {
    let binnings = build_binnings(g, &MdlBinner::default()).unwrap();
    let lambda = FeatureWeights::uniform(g.schema().len());
    let index = precompute_surprise(g, &binnings, &lambda, options).unwrap();
    (binnings, index)
}

fn order(r: &Ranking) -> Vec<NodeId> {
    r.neighbors.iter().map(|n| n.node).collect()
}

fn busiest(g: &AttributedGraph) -> NodeId {
    g.nodes().max_by_key(|&n| (g.degree(n), std::cmp::Reverse(n))).unwrap()
}

fn warm_profile(g: &AttributedGraph, index: &SurpriseIndex, seed: u64, visits: usize) -> SessionProfile {
    let mut r = rng(seed);
    let mut p = SessionProfile::new("t", index);
    for _ in 0..visits {
        p.record_visit(index, NodeId(r.random_range(0..g.node_count() as u32))).unwrap();
    }
    p
}

#[test]
fn surprise_matches_no_cache_recomputation() {
    let g = random_graph(100, 100, 3, 1, 5.0);
    let (binnings, index) = build(&g, PrecomputeOptions::default());
    let globals: Vec<Vec<f64>> = binnings.iter().map(|b| recount_global(&g, b)).collect();
    for n in g.nodes() {
        let mut total = 0.0;
        for (j, b) in binnings.iter().enumerate() {
            let s = oracle_js(&recount_local(&g, n, b), &globals[j]);
            assert!((index.feature_surprise(n)[j] - s).abs() < 1e-12);
            total += s;
        }
        assert!((index.surprise(n) - total).abs() < 1e-12);
    }
}

#[test]
fn neighborhood_equal_to_global_scores_zero() {
    let g = bipartite_double(&[(1.0, "x"), (2.0, "x"), (2.0, "y"), (7.5, "z"), (3.0, "y")]);
    let (_, index) = build(&g, PrecomputeOptions::default());
    for n in g.nodes() {
        assert_eq!(index.surprise(n), 0.0);
    }
}

/// Focus `f` with neighbors `y` (degree 3) and `x` (degree 10); every
/// node besides the focus has value 1, so both neighbors see a point mass.
fn tie_fixture() -> AttributedGraph {
    let schema = GraphSchema::new(vec![FeatureSpec::numerical("v")]).unwrap();
    let mut b = GraphBuilder::new(schema);
    b.add_node("f", "focus", [1.0]).unwrap();
    b.add_node("y", "y", [0.0]).unwrap();
    b.add_node("x", "x", [0.0]).unwrap();
    for i in 0..9 {
        b.add_node(&format!("x{i}"), "", [1.0]).unwrap();
        b.add_edge("x", &format!("x{i}")).unwrap();
    }
    for i in 0..2 {
        b.add_node(&format!("y{i}"), "", [1.0]).unwrap();
        b.add_edge("y", &format!("y{i}")).unwrap();
    }
    b.add_edge("f", "x").unwrap();
    b.add_edge("f", "y").unwrap();
    b.build().0
}

#[test]
fn cold_start_breaks_ties_by_degree() {
    let g = tie_fixture();
    let (_, index) = build(&g, PrecomputeOptions::default());
    let (f, x, y) = (g.resolve("f").unwrap(), g.resolve("x").unwrap(), g.resolve("y").unwrap());
    assert_eq!(index.surprise(x), index.surprise(y));
    let lambda = FeatureWeights::uniform(1);
    let opts = RankOptions::default();
    assert_eq!(order(&top_surprising(&g, &index, &lambda, f, 2, &opts).unwrap()), vec![y, x]);
    assert_eq!(order(&cold_start_rank(&g, &index, &lambda, f, 2, &opts).unwrap()), vec![x, y]);
    let p = SessionProfile::new("t", &index);
    let cold = rank_neighbors(&g, &index, &p, f, 2, &opts).unwrap();
    assert!(cold.cold_start);
    assert_eq!(order(&cold), vec![x, y]);
    assert!(cold.neighbors.iter().all(|n| n.interest.is_none()));
}

#[test]
fn equal_interest_falls_back_to_id() {
    let g = tie_fixture();
    let (_, index) = build(&g, PrecomputeOptions::default());
    let (f, x, y) = (g.resolve("f").unwrap(), g.resolve("x").unwrap(), g.resolve("y").unwrap());
    let mut p = SessionProfile::new("t", &index);
    p.record_visit(&index, g.resolve("x0").unwrap()).unwrap();
    let r = top_interesting(&g, &index, &p, f, 5, &RankOptions::default()).unwrap();
    assert_eq!(order(&r), vec![y, x]);
    assert_eq!(r.neighbors[0].interest, Some(0.0));
}

#[test]
fn candidate_matching_profile_has_zero_interest() {
    let g = random_graph(7, 80, 2, 1, 4.0);
    let (_, index) = build(&g, PrecomputeOptions::default());
    let c = busiest(&g);
    let mut p = SessionProfile::new("t", &index);
    for &n in g.neighbors(c) {
        p.record_visit(&index, n).unwrap();
    }
    let scores = interest_scores(&g, &index, &p, &[c]).unwrap();
    assert_eq!(scores.aggregate, vec![0.0]);
    assert_eq!(scores.js_evaluations, 3);
}

#[test]
fn interest_needs_a_visit() {
    let g = random_graph(8, 40, 1, 1, 4.0);
    let (_, index) = build(&g, PrecomputeOptions::default());
    let p = SessionProfile::new("t", &index);
    let err = interest_scores(&g, &index, &p, &[NodeId(0)]).unwrap_err();
    assert!(matches!(err, Error::ColdProfile { .. }));
}

#[test]
fn blend_arithmetic() {
    let w = BlendWeights::default();
    let t: Vec<f64> = [(0.8, 0.9), (0.2, 0.0), (0.5, 0.5)].iter().map(|&(s, r)| w.blend(s, r)).collect();
    assert!((t[0] - 0.45).abs() < 1e-15 && (t[1] - 0.60).abs() < 1e-15 && (t[2] - 0.50).abs() < 1e-15);
}

/// A focus with 1500 neighbors of varied degree.
fn wide_star() -> AttributedGraph {
    let schema = GraphSchema::new(vec![FeatureSpec::numerical("a"), FeatureSpec::categorical("b")]).unwrap();
    let mut b = GraphBuilder::new(schema);
    let mut r = rng(15);
    b.add_node("hub", "hub", [RawValue::Num(0.0), RawValue::Cat("k".into())]).unwrap();
    for i in 0..1500 {
        let cat = ["k", "m", "n"][r.random_range(0..3)];
        b.add_node(&format!("l{i}"), "", [RawValue::Num(r.random_range(0.0..10.0)), RawValue::Cat(cat.into())]).unwrap();
        b.add_edge("hub", &format!("l{i}")).unwrap();
    }
    for i in 0..600 {
        b.add_node(&format!("o{i}"), "", [RawValue::Num(r.random_range(0.0..10.0)), RawValue::Cat("m".into())]).unwrap();
        for _ in 0..r.random_range(1..6) {
            b.add_edge(&format!("o{i}"), &format!("l{}", r.random_range(0..1500))).unwrap();
        }
    }
    b.build().0
}

#[test]
fn degree_cap_limits_candidates() {
    let g = wide_star();
    let hub = g.resolve("hub").unwrap();
    assert_eq!(g.degree(hub), 1500);
    let (_, index) = build(&g, PrecomputeOptions::default());
    let p = warm_profile(&g, &index, 3, 4);
    let ranking = rank_neighbors(&g, &index, &p, hub, 20, &RankOptions::default()).unwrap();
    assert_eq!(ranking.candidates, 1000);
    assert_eq!(ranking.js_evaluations, 2000);

    let cands = candidates(&g, hub, 1000).unwrap();
    let mut oracle: Vec<NodeId> = g.neighbors(hub).to_vec();
    oracle.sort_by(|a, b| g.degree(*b).cmp(&g.degree(*a)).then(a.cmp(b)));
    oracle.truncate(1000);
    oracle.sort();
    assert_eq!(cands, oracle);
    let set: HashSet<_> = cands.into_iter().collect();
    assert!(ranking.neighbors.iter().all(|n| set.contains(&n.node)));

    // below the cap every neighbor is scored
    let uncapped = rank_neighbors(&g, &index, &p, hub, 20, &RankOptions::with_cap(1501)).unwrap();
    assert_eq!(uncapped.candidates, 1500);
    assert_eq!(uncapped.js_evaluations, 3000);
}

#[test]
fn blend_extremes_reduce_to_single_modes() {
    for seed in 0..10 {
        let g = random_graph(seed, 150, 3, 1, 6.0);
        let (_, index) = build(&g, PrecomputeOptions::default());
        let focus = busiest(&g);
        let k = g.degree(focus);
        let opts = RankOptions::default();
        let mut p = warm_profile(&g, &index, seed, 5);

        p.set_blend(BlendWeights::new(1.0, 0.0).unwrap());
        let combined = rank_neighbors(&g, &index, &p, focus, k, &opts).unwrap();
        let surprise = top_surprising(&g, &index, p.lambda(), focus, k, &opts).unwrap();
        assert_eq!(order(&combined), order(&surprise));

        p.set_blend(BlendWeights::new(0.0, 1.0).unwrap());
        let combined = rank_neighbors(&g, &index, &p, focus, k, &opts).unwrap();
        let interest = top_interesting(&g, &index, &p, focus, k, &opts).unwrap();
        assert_eq!(order(&combined), order(&interest));
    }
}

#[test]
fn scaling_lambda_keeps_orderings() {
    for seed in 20..26 {
        let g = random_graph(seed, 150, 2, 2, 6.0);
        let (_, index) = build(&g, PrecomputeOptions::default());
        let focus = busiest(&g);
        let k = g.degree(focus);
        let opts = RankOptions::default();
        let mut p = warm_profile(&g, &index, seed, 6);
        p.set_lambda(FeatureWeights::new(vec![1.0, 0.5, 2.0, 0.25]).unwrap()).unwrap();
        let base = [
            order(&rank_neighbors(&g, &index, &p, focus, k, &opts).unwrap()),
            order(&top_interesting(&g, &index, &p, focus, k, &opts).unwrap()),
            order(&top_surprising(&g, &index, p.lambda(), focus, k, &opts).unwrap()),
        ];
        for factor in [2.0, 0.25, 8.0] {
            let scaled: Vec<f64> = p.lambda().as_slice().iter().map(|l| l * factor).collect();
            let mut q = p.clone();
            q.set_lambda(FeatureWeights::new(scaled).unwrap()).unwrap();
            let got = [
                order(&rank_neighbors(&g, &index, &q, focus, k, &opts).unwrap()),
                order(&top_interesting(&g, &index, &q, focus, k, &opts).unwrap()),
                order(&top_surprising(&g, &index, q.lambda(), focus, k, &opts).unwrap()),
            ];
            assert_eq!(got, base, "factor {factor}");
        }
    }
}

#[test]
fn zero_weight_removes_a_feature() {
    let g = random_graph(31, 120, 2, 1, 5.0);
    let (_, index) = build(&g, PrecomputeOptions::default());
    let focus = busiest(&g);
    let mut p = warm_profile(&g, &index, 4, 5);
    p.set_feature_weight(0, 0.0).unwrap();
    let r = rank_neighbors(&g, &index, &p, focus, 50, &RankOptions::default()).unwrap();
    for n in &r.neighbors {
        let f = &n.features;
        let s: f64 = f[1].surprise + f[2].surprise;
        let i: f64 = f[1].interest.unwrap() + f[2].interest.unwrap();
        let t: f64 = f[1].blended.unwrap() + f[2].blended.unwrap();
        assert!((n.surprise - s).abs() < 1e-15);
        assert!((n.interest.unwrap() - i).abs() < 1e-15);
        assert!((n.blended.unwrap() - t).abs() < 1e-15);
    }
}

#[test]
fn lru_and_parallel_match_materialized() {
    for seed in 40..44 {
        let g = random_graph(seed, 200, 3, 1, 6.0);
        let (_, base) = build(&g, PrecomputeOptions::default());
        let (_, par) = build(
            &g,
            PrecomputeOptions {
                parallel: true,
                ..Default::default()
            },
        );
        let (_, lru) = build(
            &g,
            PrecomputeOptions {
                parallel: true,
                cache: LocalCacheMode::Lru { capacity: 16 },
            },
        );
        let p = warm_profile(&g, &base, seed, 4);
        let opts = RankOptions::default();
        for n in g.nodes() {
            assert_eq!(base.feature_surprise(n), par.feature_surprise(n));
            assert_eq!(base.feature_surprise(n), lru.feature_surprise(n));
        }
        for focus in g.nodes().step_by(7) {
            let k = 10;
            assert_eq!(
                rank_neighbors(&g, &base, &p, focus, k, &opts).unwrap(),
                rank_neighbors(&g, &lru, &p, focus, k, &opts).unwrap()
            );
            assert_eq!(
                top_interesting(&g, &base, &p, focus, k, &opts).unwrap(),
                top_interesting(&g, &lru, &p, focus, k, &opts).unwrap()
            );
        }
    }
}

#[test]
fn exclude_and_k_bounds() {
    let g = random_graph(50, 120, 2, 1, 6.0);
    let (_, index) = build(&g, PrecomputeOptions::default());
    let focus = busiest(&g);
    let p = warm_profile(&g, &index, 1, 3);
    let all = rank_neighbors(&g, &index, &p, focus, usize::MAX, &RankOptions::default()).unwrap();
    assert_eq!(all.neighbors.len(), g.degree(focus));
    let exclude: HashSet<NodeId> = all.neighbors.iter().take(3).map(|n| n.node).collect();
    let opts = RankOptions {
        exclude: exclude.clone(),
        ..RankOptions::default()
    };
    let rest = rank_neighbors(&g, &index, &p, focus, 3, &opts).unwrap();
    assert_eq!(rest.neighbors.len(), 3);
    assert!(rest.neighbors.iter().all(|n| !exclude.contains(&n.node)));
    assert_eq!(order(&rest), order(&all)[3..6].to_vec());
    assert_eq!(rest.js_evaluations, ((g.degree(focus) - 3) * 3) as u64);

    assert!(matches!(
        rank_neighbors(&g, &index, &p, focus, 0, &RankOptions::default()),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        rank_neighbors(&g, &index, &p, NodeId(10_000), 3, &RankOptions::default()),
        Err(Error::UnknownNode(_))
    ));
}

#[test]
fn rankings_are_deterministic() {
    let g = random_graph(60, 150, 2, 2, 5.0);
    let (_, a) = build(&g, PrecomputeOptions::default());
    let (_, b) = build(&g, PrecomputeOptions::default());
    let p = warm_profile(&g, &a, 2, 4);
    for focus in g.nodes().take(30) {
        assert_eq!(
            rank_neighbors(&g, &a, &p, focus, 5, &RankOptions::default()).unwrap(),
            rank_neighbors(&g, &b, &p, focus, 5, &RankOptions::default()).unwrap()
        );
    }
}

#[test]
fn rank_mode_parses() {
    for m in [RankMode::Surprise, RankMode::Interest, RankMode::Combined] {
        assert_eq!(m.to_string().parse::<RankMode>().unwrap(), m);
    }
    assert!("best".parse::<RankMode>().is_err());
}

#[test]
fn index_file_round_trip_and_validation() {
    let g = random_graph(70, 90, 2, 1, 4.0);
    let (_, index) = build(&g, PrecomputeOptions::default());
    let file = IndexFile::from_index(&index, &g, None).unwrap();
    let text = file.to_json().unwrap();
    let loaded = IndexFile::from_json(&text).unwrap().into_index(&g, PrecomputeOptions::default()).unwrap();
    for n in g.nodes() {
        assert_eq!(loaded.feature_surprise(n), index.feature_surprise(n));
    }
    assert_eq!(IndexFile::from_index(&loaded, &g, None).unwrap().to_json().unwrap(), text);

    let mut tampered = IndexFile::from_json(&text).unwrap();
    tampered.nodes[4].features[1] += 1e-9;
    assert!(matches!(
        tampered.into_index(&g, PrecomputeOptions::default()),
        Err(Error::IndexMismatch(_))
    ));

    let other = random_graph(71, 90, 2, 1, 4.0);
    assert!(matches!(
        IndexFile::from_json(&text).unwrap().into_index(&other, PrecomputeOptions::default()),
        Err(Error::IndexMismatch(_))
    ));

    let mut future = IndexFile::from_json(&text).unwrap();
    future.version = 99;
    assert!(IndexFile::from_json(&future.to_json().unwrap()).is_err());
}
