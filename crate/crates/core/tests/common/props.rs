//! Invariant checks shared by the property tests and the acceptance suite.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{features, in_spec, vertex_degrees, arc_degrees, all_letters};
use hypershuffle::combinatorics::binomial;
use hypershuffle::rng::chain_rng;
use hypershuffle::shuffle::{enumerate_proposals, for_each_split, step_in_place, StepOutcome};
use hypershuffle::validation::{check_sm_equivalence, map_to_bipartite};
use hypershuffle::{apply, parse_dhg, serialize_dhg, AcceptanceRule, DirectedHypergraph, Hyperarc, ShuffleProposal, SpaceSpec};

pub type Outcome = Result<(), TestCaseError>;

/// Random steps keep the degree sequence and stay in the space.
pub fn degrees_and_space_preserved(h: &DirectedHypergraph, spec: &SpaceSpec, seed: u64, steps: usize) -> Outcome {
    let vd = vertex_degrees(h);
    let ad = arc_degrees(h);
    let mut state = h.clone();
    let mut rng = chain_rng(seed, 0);
    for _ in 0..steps {
        let before = state.clone();
        let outcome = step_in_place(&mut state, spec, AcceptanceRule::default(), &mut rng);
        prop_assert_eq!(vertex_degrees(&state), vd.clone());
        prop_assert_eq!(arc_degrees(&state), ad.clone());
        prop_assert!(in_spec(&state, spec), "left the space: {:?}", state);
        if outcome != StepOutcome::Accepted {
            prop_assert_eq!(&state, &before);
        }
    }
    Ok(())
}

/// Every applicable proposal can be undone by one of equal probability.
pub fn proposals_reversible(h: &DirectedHypergraph, spec: &SpaceSpec) -> Outcome {
    let proposals = enumerate_proposals(h);
    let total: f64 = proposals.iter().map(|p| p.probability()).sum();
    if h.n_arcs() >= 2 {
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
    for p in proposals.iter().filter(|p| !p.is_identity_on(h)) {
        let (next, ok) = apply(h, p, spec);
        prop_assert_eq!(ok, in_spec(&next, spec) && next != *h);
        if !ok {
            continue;
        }
        let (a, b) = (&next.arcs()[p.arc_i], &next.arcs()[p.arc_j]);
        let mut reachable = false;
        for_each_split(a, b, |na, nb| {
            reachable |= na == h.arcs()[p.arc_i] && nb == h.arcs()[p.arc_j];
        });
        prop_assert!(reachable, "no reverse split");
        let reverse = ShuffleProposal {
            new_tail_i: h.arcs()[p.arc_i].tail.clone(),
            new_head_i: h.arcs()[p.arc_i].head.clone(),
            new_tail_j: h.arcs()[p.arc_j].tail.clone(),
            new_head_j: h.arcs()[p.arc_j].head.clone(),
            tail_splits: binomial((a.tail.len() + b.tail.len()) as u64, a.tail.len() as u64).unwrap(),
            head_splits: binomial((a.head.len() + b.head.len()) as u64, a.head.len() as u64).unwrap(),
            ..p.clone()
        };
        prop_assert_eq!(reverse.probability_exact(), p.probability_exact());
        let (back, ok) = apply(&next, &reverse, spec);
        prop_assert!(ok);
        prop_assert_eq!(&back, h);
    }
    Ok(())
}

/// The incidence digraphs have a multi-arc exactly when `h` has a degenerate
/// arc, and their degrees are the stub counts.
pub fn bipartite_equivalence(h: &DirectedHypergraph) -> Outcome {
    let (_, degenerate, _) = features(h);
    prop_assert_eq!(check_sm_equivalence(h), !degenerate);
    let (gt, gh) = map_to_bipartite(h);
    prop_assert_eq!(gt.arcs.len() + gh.arcs.len(), h.degree_sequence().total_stubs());
    for (v, &(din, dout)) in vertex_degrees(h).iter().enumerate() {
        prop_assert_eq!(gt.arcs.iter().filter(|a| a.0 == v).count(), dout as usize);
        prop_assert_eq!(gh.arcs.iter().filter(|a| a.0 == v).count(), din as usize);
    }
    for (k, arc) in h.arcs().iter().enumerate() {
        prop_assert_eq!(gt.arcs.iter().filter(|a| a.1 == k).count(), arc.tail.len());
        prop_assert_eq!(gh.arcs.iter().filter(|a| a.1 == k).count(), arc.head.len());
    }
    Ok(())
}

pub fn dhg_round_trip(h: &DirectedHypergraph) -> Outcome {
    let text = serialize_dhg(h);
    let back = parse_dhg(&text).unwrap();
    prop_assert_eq!(&back, &h.canonicalize());
    prop_assert_eq!(serialize_dhg(&back), text);
    Ok(())
}

pub fn classifier_agrees(h: &DirectedHypergraph) -> Outcome {
    let f = h.classify_features();
    prop_assert_eq!((f.has_self_loop(), f.has_degenerate(), f.has_multi()), features(h));
    for letters in all_letters() {
        let spec = SpaceSpec::parse(letters, hypershuffle::Labeling::Stub).unwrap();
        prop_assert_eq!(spec.permits_hypergraph(h), in_spec(h, &spec));
    }
    Ok(())
}

pub fn canonical_form_order_free(h: &DirectedHypergraph, rot: usize) -> Outcome {
    let mut arcs: Vec<Hyperarc> = h.arcs().to_vec();
    let r = rot % arcs.len();
    arcs.rotate_left(r);
    arcs.reverse();
    let shuffled = DirectedHypergraph::new(h.labels().to_vec(), arcs).unwrap();
    prop_assert_eq!(shuffled.canonical_form(), h.canonical_form());
    prop_assert!(shuffled.same_arcs(h));
    Ok(())
}
