mod common;

use common::*;
use egorank::graph::NodeId;
use egorank::histogram::{build_binnings, Binning, MdlBinner};
use egorank::profile::{SessionProfile, SessionSnapshot};
use egorank::ranking::{precompute_surprise, PrecomputeOptions, SurpriseIndex};
use egorank::weights::{BlendWeights, FeatureWeights};
use egorank::Error;
use rand::Rng;

fn setup(seed: u64) -> (egorank::graph::AttributedGraph, Vec<Binning>, SurpriseIndex) {
    let g = random_graph(seed, 60, 2, 1, 4.0);
    let binnings = build_binnings(&g, &MdlBinner::default()).unwrap();
    let index = precompute_surprise(&g, &binnings, &FeatureWeights::uniform(3), PrecomputeOptions::default()).unwrap();
    (g, binnings, index)
}

fn masses(p: &SessionProfile) -> Vec<Vec<f64>> {
    p.distributions().unwrap().iter().map(|h| h.mass().to_vec()).collect()
}

#[test]
fn first_visit_is_a_point_mass() {
    let (g, binnings, index) = setup(1);
    let mut p = SessionProfile::new("s", &index);
    assert!(p.distributions().is_none());
    assert!(p.summary(&index).empty);
    let a = g.nodes().next().unwrap();
    p.record_visit(&index, a).unwrap();
    assert_eq!(p.visits().len(), 1);
    for (u, b) in p.distributions().unwrap().iter().zip(&binnings) {
        assert_eq!(u.support(), b.id());
        let hot = oracle_bin(b, g.value(a, b.feature()));
        for (bin, &m) in u.mass().iter().enumerate() {
            assert_eq!(m, if bin == hot { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn duplicate_visits_normalize_away() {
    let (_, _, index) = setup(2);
    let a = NodeId(3);
    let mut once = SessionProfile::new("s", &index);
    once.record_visit(&index, a).unwrap();
    let mut twice = SessionProfile::new("s", &index);
    twice.record_visit(&index, a).unwrap();
    twice.record_visit(&index, a).unwrap();
    assert_eq!(masses(&once), masses(&twice));
    assert_eq!(twice.visits().len(), 2);
}

#[test]
fn window_keeps_only_recent_visits() {
    let (g, binnings, index) = setup(3);
    let [a, b, c] = [NodeId(0), NodeId(5), NodeId(9)];
    let mut p = SessionProfile::new("s", &index).with_window(Some(2), &index).unwrap();
    for n in [a, b, c] {
        p.record_visit(&index, n).unwrap();
    }
    let oracle: Vec<Vec<f64>> = binnings.iter().map(|bin| recount(&g, [b, c], bin)).collect();
    assert_eq!(masses(&p), oracle);
    assert!(SessionProfile::new("s", &index).with_window(Some(0), &index).is_err());
}

#[test]
fn scripted_visits_match_recount() {
    let (g, binnings, index) = setup(4);
    let mut r = rng(8);
    for window in [None, Some(3), Some(10)] {
        let mut p = SessionProfile::new("s", &index).with_window(window, &index).unwrap();
        let mut visits = Vec::new();
        for _ in 0..25 {
            let n = NodeId(r.random_range(0..g.node_count() as u32));
            visits.push(n);
            p.record_visit(&index, n).unwrap();
            let start = window.map_or(0, |w| visits.len().saturating_sub(w));
            let oracle: Vec<Vec<f64>> = binnings
                .iter()
                .map(|b| recount(&g, visits[start..].iter().copied(), b))
                .collect();
            let got = masses(&p);
            for (u, o) in got.iter().zip(&oracle) {
                for (x, y) in u.iter().zip(o) {
                    assert!((x - y).abs() < 1e-15, "window {window:?}");
                }
            }
        }
    }
}

#[test]
fn unlimited_window_ignores_visit_order() {
    let (_, _, index) = setup(5);
    let visits = [NodeId(1), NodeId(7), NodeId(7), NodeId(20), NodeId(2)];
    let mut fwd = SessionProfile::new("s", &index);
    let mut rev = SessionProfile::new("s", &index);
    for (&a, &b) in visits.iter().zip(visits.iter().rev()) {
        fwd.record_visit(&index, a).unwrap();
        rev.record_visit(&index, b).unwrap();
    }
    assert_eq!(masses(&fwd), masses(&rev));
}

#[test]
fn unknown_node_rejected() {
    let (g, _, index) = setup(6);
    let mut p = SessionProfile::new("s", &index);
    let err = p.record_visit(&index, NodeId(g.node_count() as u32)).unwrap_err();
    assert!(matches!(err, Error::UnknownNode(_)));
    assert!(p.visits().is_empty());
}

#[test]
fn weights_validation() {
    let (_, _, index) = setup(7);
    let mut p = SessionProfile::new("s", &index);
    assert!(p.set_feature_weight(0, -1.0).is_err());
    p.set_feature_weight(0, 0.0).unwrap();
    p.set_feature_weight(1, 0.0).unwrap();
    assert!(matches!(p.set_feature_weight(2, 0.0), Err(Error::InvalidWeights(_))));
    assert_eq!(p.lambda().as_slice(), &[0.0, 0.0, 1.0]);
    assert!(p.set_lambda(FeatureWeights::uniform(2)).is_err());
}

#[test]
fn snapshot_round_trip_replays_state() {
    let (_, _, index) = setup(8);
    let mut p = SessionProfile::new("abc", &index).with_window(Some(4), &index).unwrap();
    for n in [3, 1, 4, 1, 5, 9, 2, 6] {
        p.record_visit(&index, NodeId(n)).unwrap();
    }
    p.set_feature_weight(1, 2.5).unwrap();
    p.set_blend(BlendWeights::new(0.25, 0.75).unwrap());
    let snap = p.snapshot(&index);
    let text = snap.to_json().unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["session_id"], "abc");
    assert_eq!(v["visits"].as_array().unwrap().len(), 8);
    assert_eq!(v["window"], 4);
    assert_eq!(v["lambda"]["num1"], 2.5);
    assert_eq!(v["blend"]["w_s"], 0.25);
    let back = SessionProfile::restore(&SessionSnapshot::from_json(&text).unwrap(), &index).unwrap();
    assert_eq!(masses(&back), masses(&p));
    assert_eq!(back.lambda(), p.lambda());
    assert_eq!(back.blend(), p.blend());
    assert_eq!(back.visits(), p.visits());
}

#[test]
fn summary_reports_warmth_and_distributions() {
    let (_, binnings, index) = setup(9);
    let mut p = SessionProfile::new("s", &index);
    for (i, n) in [0u32, 1, 2].into_iter().enumerate() {
        assert_eq!(p.is_warm(), i >= 3);
        p.record_visit(&index, NodeId(n)).unwrap();
    }
    let s = p.summary(&index);
    assert!(s.warm && !s.empty);
    assert_eq!(s.visit_count, 3);
    let d = s.distributions.unwrap();
    assert_eq!(d.len(), 3);
    for (dist, b) in d.iter().zip(&binnings) {
        assert_eq!(dist.mass.len(), b.bin_count());
    }
}
