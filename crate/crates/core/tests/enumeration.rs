mod common;

use std::time::Instant;

use common::{all_letters, arc_ids, brute_stub_counts, brute_vertex_space};
use hypershuffle::enumerate::{enumerate_stub_space_with_limit, enumerate_vertex_space_with_limit};
use hypershuffle::validation::{feature_battery, example_degrees, example_instance, random_battery};
use hypershuffle::{count_stub_realizations, enumerate_stub_space, enumerate_vertex_space, Labeling, SpaceSpec};
use num_bigint::BigUint;

#[test]
fn example_space_sizes() {
    let start = Instant::now();
    let d = example_degrees();
    let sizes: Vec<usize> = ["sdm", "sm", "d", ""]
        .iter()
        .map(|x| enumerate_vertex_space(&d, &SpaceSpec::parse(x, Labeling::Vertex).unwrap()).unwrap().len())
        .collect();
    assert_eq!(sizes, vec![11, 8, 5, 4]);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn example_space_matches_brute_force() {
    let h = example_instance();
    for x in all_letters() {
        let spec = SpaceSpec::parse(x, Labeling::Vertex).unwrap();
        let got: Vec<_> = enumerate_vertex_space(&h.degree_sequence(), &spec).unwrap().iter().map(arc_ids).collect();
        let want: Vec<_> = brute_vertex_space(&h, &spec).into_iter().collect();
        assert_eq!(got, want, "x={{{x}}}");
    }
}

#[test]
fn vertex_spaces_match_brute_force() {
    let mut instances: Vec<_> = feature_battery().into_iter().map(|(_, h)| h).collect();
    instances.extend(random_battery(40, 12, 3));
    for h in &instances {
        for x in all_letters() {
            let spec = SpaceSpec::parse(x, Labeling::Vertex).unwrap();
            let got: Vec<_> = enumerate_vertex_space(&h.degree_sequence(), &spec).unwrap().iter().map(arc_ids).collect();
            let want: Vec<_> = brute_vertex_space(h, &spec).into_iter().collect();
            assert_eq!(got, want, "{h:?} x={{{x}}}");
        }
    }
}

#[test]
fn stub_realization_counts_match_brute_force() {
    let mut instances: Vec<_> = feature_battery().into_iter().map(|(_, h)| h).collect();
    instances.extend(random_battery(30, 10, 5));
    for h in &instances {
        if h.degree_sequence().total_stubs() > 12 {
            continue;
        }
        let brute = brute_stub_counts(h);
        let d = h.degree_sequence();
        let spec = SpaceSpec::parse("sdm", Labeling::Stub).unwrap();
        let (layout, states) = enumerate_stub_space(&d, &spec).unwrap();
        assert_eq!(states.len() as u64, brute.values().sum::<u64>(), "{h:?}");
        let classes = enumerate_vertex_space(&d, &spec.with_labeling(Labeling::Vertex)).unwrap();
        assert_eq!(classes.len(), brute.len());
        for g in &classes {
            let want = brute[&arc_ids(g)];
            assert_eq!(count_stub_realizations(g), BigUint::from(want), "{g:?}");
            let projected = states.iter().filter(|s| layout.project(s).same_arcs(g)).count() as u64;
            assert_eq!(projected, want);
        }
    }
}

#[test]
fn stub_spaces_partition_into_vertex_classes() {
    for h in random_battery(20, 10, 9) {
        let d = h.degree_sequence();
        for x in all_letters() {
            let vspec = SpaceSpec::parse(x, Labeling::Vertex).unwrap();
            let classes = enumerate_vertex_space(&d, &vspec).unwrap();
            let (_, states) = enumerate_stub_space(&d, &vspec.with_labeling(Labeling::Stub)).unwrap();
            let total: BigUint = classes.iter().map(count_stub_realizations).sum();
            assert_eq!(total, BigUint::from(states.len()), "{h:?} x={{{x}}}");
        }
    }
}

#[test]
fn smaller_spaces_are_subsets() {
    for h in random_battery(15, 10, 21) {
        let d = h.degree_sequence();
        let space = |x: &str| {
            enumerate_vertex_space(&d, &SpaceSpec::parse(x, Labeling::Vertex).unwrap())
                .unwrap()
                .iter()
                .map(arc_ids)
                .collect::<std::collections::BTreeSet<_>>()
        };
        let full = space("sdm");
        for x in all_letters() {
            let sub = space(x);
            assert!(sub.is_subset(&full));
            for y in all_letters() {
                if y.chars().all(|c| x.contains(c)) {
                    assert!(space(y).is_subset(&sub), "{{{y}}} not inside {{{x}}}");
                }
            }
        }
    }
}

#[test]
fn size_guards_reject_large_sequences() {
    let d = hypershuffle::DegreeSequence::new(vec![(4, 4); 4], vec![(2, 2); 8]).unwrap();
    let spec = SpaceSpec::unrestricted(Labeling::Vertex);
    assert!(enumerate_vertex_space_with_limit(&d, &spec, 16).is_err());
    assert!(enumerate_stub_space_with_limit(&d, &spec.with_labeling(Labeling::Stub), 12).is_err());
}
