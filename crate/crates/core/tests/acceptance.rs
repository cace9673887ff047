//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use common::{arb_hypergraph, arb_member, props};
use hypershuffle::analysis::{
    check_regular, check_strongly_connected, stationary_distribution, sup_error_from_uniform, strongly_connected_components,
};
use hypershuffle::reproduce::{class_d_instances, vertex_chain_check, UNIFORM_TOLERANCE};
use hypershuffle::validation::{
    counterexample_h0, counterexample_suite, feature_battery, example_degrees, example_instance, kernel_row_test, random_battery,
    sampling_report, CONTROL_THRESHOLD, PASS_THRESHOLD,
};
use hypershuffle::{
    build_chain_graph, count_stub_realizations, enumerate_stub_space, enumerate_vertex_space, AcceptanceRule, ChainConfig,
    ChainOptions, DirectedHypergraph, Hyperarc, Labeling, SpaceSpec,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn stub(x: &str) -> SpaceSpec {
    SpaceSpec::parse(x, Labeling::Stub).unwrap()
}

fn vertex(x: &str) -> SpaceSpec {
    SpaceSpec::parse(x, Labeling::Vertex).unwrap()
}

fn g(n: usize, arcs: &[(&[u32], &[u32])]) -> DirectedHypergraph {
    DirectedHypergraph::with_vertex_count(n, arcs.iter().map(|(t, h)| Hyperarc::from_ids(t, h)).collect()).unwrap()
}

fn example_enumeration() -> Verdict {
    let start = Instant::now();
    let d = example_degrees();
    let counts: Vec<usize> = ["sdm", "sm", "d", ""]
        .iter()
        .map(|x| enumerate_vertex_space(&d, &vertex(x)).unwrap().len())
        .collect();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        counts == [11, 8, 5, 4] && secs < 1.0,
        format!("{{s,d,m}}/{{s,m}}/{{d}}/{{}} = {counts:?} in {secs:.3}s"),
    )
}

fn stub_chain_uniformity() -> Verdict {
    let start = Instant::now();
    let instances = [
        ("example", example_instance()),
        ("self-loops", g(2, &[(&[0], &[0]), (&[1], &[1]), (&[0], &[1])])),
        ("degenerate", g(3, &[(&[0, 0], &[1, 2]), (&[1], &[1]), (&[2], &[0, 0])])),
        ("multi", g(3, &[(&[0, 1], &[2]), (&[0, 1], &[2]), (&[2], &[0])])),
        ("shared-heads", g(4, &[(&[0], &[2, 3]), (&[1], &[2, 3]), (&[0], &[2])])),
        ("four-arcs", g(3, &[(&[0], &[1]), (&[1], &[2]), (&[2], &[0]), (&[0, 1], &[2])])),
    ];
    let mut chains = 0;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (name, h) in &instances {
        for x in ["sdm", "sm"] {
            let graph = match build_chain_graph(&h.degree_sequence(), &stub(x)) {
                Ok(graph) => graph,
                Err(e) => {
                    failures.push(format!("{name} {x}: {e}"));
                    continue;
                }
            };
            chains += 1;
            let symmetric = check_regular(&graph).0;
            let diagonal = (0..graph.n_states()).all(|i| graph.entry(i, i) > BigRational::zero());
            let connected = check_strongly_connected(&graph).0;
            let err = stationary_distribution(&graph)
                .unwrap()
                .unique()
                .map(sup_error_from_uniform)
                .unwrap_or(f64::INFINITY);
            worst = worst.max(err);
            if !(symmetric && diagonal && connected && err < UNIFORM_TOLERANCE) {
                failures.push(format!("{name} {x}: symmetric={symmetric} diagonal={diagonal} connected={connected} err={err:.1e}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        failures.is_empty() && chains >= 10 && secs < 60.0,
        format!(
            "{chains} chains on {} sequences, max sup|pi-u|={worst:.1e}, {secs:.2}s{}",
            instances.len(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn sampled_uniformity() -> Verdict {
    let start = Instant::now();
    let cfg = ChainConfig::new(1_000, 20_240_601, stub("sdm"));
    let report = sampling_report("example", &example_instance(), &cfg, 100_000).unwrap();
    let secs = start.elapsed().as_secs_f64();
    verdict(
        report.p > PASS_THRESHOLD && secs < 300.0,
        format!(
            "10^5 chains x 10^3 steps: chi2={:.2} dof={} p={:.4} in {secs:.1}s",
            report.chi2, report.dof, report.p
        ),
    )
}

fn class_d() -> Verdict {
    let mut checked = 0;
    let mut connected = 0;
    for d in class_d_instances() {
        if let Ok(graph) = build_chain_graph(&d, &stub("s")) {
            checked += 1;
            connected += usize::from(check_strongly_connected(&graph).0);
        }
    }
    verdict(
        checked >= 3 && connected == checked,
        format!("{connected}/{checked} {{s}} stub chains strongly connected"),
    )
}

fn isolation_and_search() -> Verdict {
    let h0 = counterexample_h0();
    let d = h0.degree_sequence();
    let mut notes = Vec::new();
    let mut pass = true;
    for x in ["sd", "d"] {
        let graph = build_chain_graph(&d, &vertex(x)).unwrap();
        let i = graph.class_index(&h0).unwrap();
        let isolated = graph.row(i) == [(i, BigRational::one())];
        pass &= isolated && graph.n_states() >= 2;
        notes.push(format!("{{{x}}}: H0 isolated={isolated} of {}", graph.n_states()));
    }
    let stub_graph = build_chain_graph(&d, &stub("sd")).unwrap();
    let h0_class = stub_graph.class_index(&h0).unwrap();
    let comps = strongly_connected_components(&stub_graph);
    let closed = comps.iter().any(|c| {
        c.iter().all(|&s| stub_graph.class_of[s] == h0_class)
            && c.len() as u64 == 6
            && c.iter().all(|&s| stub_graph.row(s).iter().all(|(t, p)| p.is_zero() || c.contains(t)))
    });
    pass &= closed;
    notes.push(format!("stub {{s,d}}: H0 realizations closed={closed}"));
    let suite = counterexample_suite().unwrap();
    for x in ["", "d", "m", "dm"] {
        let found = suite
            .entries
            .iter()
            .any(|e| e.space == x && e.expect_disconnected && e.components >= 2 && e.pass);
        pass &= found;
        notes.push(format!("{{{x}}} disconnected={found}"));
    }
    let status = Command::new(env!("CARGO_BIN_EXE_hypershuffle")).args(["reproduce", "thm3"]).output().unwrap().status;
    pass &= status.code() == Some(0);
    notes.push(format!("reproduce thm3 exit={}", status.code().unwrap_or(-1)));
    verdict(pass && suite.pass, notes.join(", "))
}

fn vertex_chains() -> Verdict {
    let keep = ["example", "identical-pair", "shared-heads", "mixed"];
    let mut checked = 0;
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, h) in feature_battery().into_iter().filter(|(n, _)| keep.contains(n)) {
        for x in ["sdm", "sm"] {
            let c = vertex_chain_check(&h.degree_sequence(), x, &ChainOptions::default()).unwrap();
            checked += 1;
            pass &= c.pass();
            notes.push(format!(
                "{name} {x}: {:.0e}/{:.0e}/{}",
                c.vertex_sup_error, c.pushforward_error, c.routes_agree
            ));
        }
    }
    verdict(pass && checked >= 3, format!("{checked} chains (sup error/pushforward error/routes agree): {}", notes.join(", ")))
}

fn stub_counts() -> Verdict {
    let mut instances: Vec<DirectedHypergraph> = feature_battery().into_iter().map(|(_, h)| h).collect();
    instances.extend(random_battery(60, 12, 7));
    instances.retain(|h| h.degree_sequence().total_stubs() <= 12);
    let mut classes = 0;
    let mut mismatches = Vec::new();
    for h in &instances {
        let d = h.degree_sequence();
        let (layout, states) = enumerate_stub_space(&d, &stub("sdm")).unwrap();
        for c in enumerate_vertex_space(&d, &vertex("sdm")).unwrap() {
            classes += 1;
            let enumerated = states.iter().filter(|s| layout.project(s).same_arcs(&c)).count();
            if count_stub_realizations(&c) != BigUint::from(enumerated) {
                mismatches.push(format!("{c:?}"));
            }
        }
    }
    verdict(
        mismatches.is_empty() && instances.len() >= 50,
        format!("{} instances, {classes} classes, {} mismatches", instances.len(), mismatches.len()),
    )
}

fn kernel_rows() -> Verdict {
    const N: u64 = 1_000_000;
    let h = example_instance();
    let spec = vertex("sdm");
    let graph = build_chain_graph(&h.degree_sequence(), &spec).unwrap();
    let from = graph.class_index(&h).unwrap();
    let good = kernel_row_test(&graph, from, &spec, AcceptanceRule::default(), N, 1).unwrap();
    let biased = kernel_row_test(&graph, from, &spec, AcceptanceRule::AcceptAll, N, 2).unwrap();
    let mut corrupted = graph.clone();
    let row: Vec<(usize, BigRational)> = graph.row(from).iter().filter(|(_, p)| !p.is_zero()).cloned().collect();
    let (a, pa) = row[0].clone();
    let (b, pb) = row[1].clone();
    let shift = pa.clone().min(pb.clone()) / BigRational::from_integer(10.into());
    corrupted.set_entry(from, a, pa - &shift);
    corrupted.set_entry(from, b, pb + &shift);
    let broken = kernel_row_test(&corrupted, from, &spec, AcceptanceRule::default(), N, 3).unwrap();
    verdict(
        good.p_value > PASS_THRESHOLD && biased.p_value < CONTROL_THRESHOLD && broken.p_value < CONTROL_THRESHOLD,
        format!(
            "exact row p={:.4}; biased acceptance p={:.1e}; corrupted row p={:.1e}",
            good.p_value, biased.p_value, broken.p_value
        ),
    )
}

fn invariants() -> Verdict {
    const CASES: u32 = 10_000;
    let config = Config {
        cases: CASES,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        failure_persistence: None,
        ..Config::default()
    };
    let mut results = Vec::new();
    let mut run = |name: &str, outcome: Result<(), String>| results.push((name.to_string(), outcome));
    let runner = || TestRunner::new_with_rng(config.clone(), proptest::test_runner::TestRng::deterministic_rng(config.rng_algorithm));
    run(
        "degree invariance and closure",
        runner()
            .run(&(arb_member(), any::<u64>(), 1usize..40), |((h, spec), seed, steps)| {
                props::degrees_and_space_preserved(&h, &spec, seed, steps)
            })
            .map_err(|e| e.to_string()),
    );
    run(
        "proposal reversibility",
        runner().run(&arb_member(), |(h, spec)| props::proposals_reversible(&h, &spec)).map_err(|e| e.to_string()),
    );
    run(
        "bipartite map",
        runner().run(&arb_hypergraph(), |h| props::bipartite_equivalence(&h)).map_err(|e| e.to_string()),
    );
    run(
        ".dhg round trip",
        runner().run(&arb_hypergraph(), |h| props::dhg_round_trip(&h)).map_err(|e| e.to_string()),
    );
    let failed: Vec<String> = results.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    let names: Vec<&str> = results.iter().map(|(n, _)| n.as_str()).collect();
    verdict(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{CASES} cases each: {}", names.join(", "))
        } else {
            failed.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("example enumeration", example_enumeration),
        ("stub chain uniformity", stub_chain_uniformity),
        ("sampled uniformity", sampled_uniformity),
        ("class D connectivity", class_d),
        ("isolation and (1,1) search", isolation_and_search),
        ("vertex chains with acceptance", vertex_chains),
        ("stub realization counts", stub_counts),
        ("kernel row concordance", kernel_rows),
        ("invariants", invariants),
    ];
    let mut all = true;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        all &= v.pass;
        println!("{} {}. {name}: {}", if v.pass { "PASS" } else { "FAIL" }, k + 1, v.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
