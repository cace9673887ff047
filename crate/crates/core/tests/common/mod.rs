#![allow(dead_code)]

pub mod props;

use hypershuffle::{DirectedHypergraph, Hyperarc, Labeling, SpaceSpec};
use proptest::prelude::*;

pub fn arb_arc(n_vertices: u32, max_side: usize) -> impl Strategy<Value = Hyperarc> {
    (
        prop::collection::vec(0..n_vertices, 1..=max_side),
        prop::collection::vec(0..n_vertices, 1..=max_side),
    )
        .prop_map(|(t, h)| Hyperarc::from_ids(&t, &h))
}

/// Small hypergraphs with every feature reachable.
pub fn arb_hypergraph() -> impl Strategy<Value = DirectedHypergraph> {
    (1u32..=4)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(arb_arc(n, 3), 1..=5)))
        .prop_map(|(n, arcs)| DirectedHypergraph::with_vertex_count(n as usize, arcs).unwrap())
}

pub fn arb_labeling() -> impl Strategy<Value = Labeling> {
    prop_oneof![Just(Labeling::Stub), Just(Labeling::Vertex)]
}

/// A hypergraph together with a space that contains it.
pub fn arb_member() -> impl Strategy<Value = (DirectedHypergraph, SpaceSpec)> {
    (arb_hypergraph(), any::<[bool; 3]>(), arb_labeling()).prop_map(|(h, extra, labeling)| {
        let f = features(&h);
        let spec = SpaceSpec::new(f.0 || extra[0], f.1 || extra[1], f.2 || extra[2], labeling);
        (h, spec)
    })
}

fn sorted_ids(side: &hypershuffle::Multiset) -> Vec<u32> {
    let mut v: Vec<u32> = side.iter().map(|x| x.0).collect();
    v.sort_unstable();
    v
}

/// `(in, out)` per vertex, counted from scratch.
pub fn vertex_degrees(h: &DirectedHypergraph) -> Vec<(u32, u32)> {
    let mut d = vec![(0, 0); h.n_vertices()];
    for a in h.arcs() {
        for v in a.head.iter() {
            d[v.0 as usize].0 += 1;
        }
        for v in a.tail.iter() {
            d[v.0 as usize].1 += 1;
        }
    }
    d
}

/// `(|head|, |tail|)` per arc, sorted.
pub fn arc_degrees(h: &DirectedHypergraph) -> Vec<(usize, usize)> {
    let mut d: Vec<(usize, usize)> = h.arcs().iter().map(|a| (a.head.len(), a.tail.len())).collect();
    d.sort_unstable();
    d
}

/// `(self-loop, degenerate, multi)` computed without the library's classifier.
pub fn features(h: &DirectedHypergraph) -> (bool, bool, bool) {
    let sides: Vec<(Vec<u32>, Vec<u32>)> = h.arcs().iter().map(|a| (sorted_ids(&a.tail), sorted_ids(&a.head))).collect();
    let self_loop = sides.iter().any(|(t, hd)| t == hd);
    let degenerate = sides.iter().any(|(t, hd)| t.windows(2).any(|w| w[0] == w[1]) || hd.windows(2).any(|w| w[0] == w[1]));
    let multi = (0..sides.len()).any(|i| (i + 1..sides.len()).any(|j| sides[i] == sides[j]));
    (self_loop, degenerate, multi)
}

pub fn in_spec(h: &DirectedHypergraph, spec: &SpaceSpec) -> bool {
    let (s, d, m) = features(h);
    (spec.allow_self_loops || !s) && (spec.allow_degenerate || !d) && (spec.allow_multi || !m)
}

pub fn all_letters() -> [&'static str; 8] {
    ["sdm", "sd", "sm", "dm", "s", "d", "m", ""]
}

pub type ArcIds = (Vec<u32>, Vec<u32>);

/// Sorted multisets over `0..n` of size `k` whose multiplicities fit in `cap`.
fn bounded_multisets(cap: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn rec(cap: &mut [u32], from: usize, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for v in from..cap.len() {
            if cap[v] > 0 {
                cap[v] -= 1;
                cur.push(v as u32);
                rec(cap, v, k - 1, cur, out);
                cur.pop();
                cap[v] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut cap.to_vec(), 0, k, &mut Vec::new(), &mut out);
    out
}

/// Every hypergraph with the degrees of `h` in `spec`, as sorted arc lists.
/// Brute force over arcs in a fixed order, deduplicated afterwards.
pub fn brute_vertex_space(h: &DirectedHypergraph, spec: &SpaceSpec) -> std::collections::BTreeSet<Vec<ArcIds>> {
    fn rec(
        sizes: &[(usize, usize)],
        ins: &mut [u32],
        outs: &mut [u32],
        cur: &mut Vec<ArcIds>,
        out: &mut std::collections::BTreeSet<Vec<ArcIds>>,
    ) {
        let Some(&(t, hd)) = sizes.first() else {
            if ins.iter().chain(outs.iter()).all(|&c| c == 0) {
                let mut arcs = cur.clone();
                arcs.sort();
                out.insert(arcs);
            }
            return;
        };
        for tail in bounded_multisets(outs, t) {
            for v in &tail {
                outs[*v as usize] -= 1;
            }
            for head in bounded_multisets(ins, hd) {
                for v in &head {
                    ins[*v as usize] -= 1;
                }
                cur.push((tail.clone(), head.clone()));
                rec(&sizes[1..], ins, outs, cur, out);
                cur.pop();
                for v in &head {
                    ins[*v as usize] += 1;
                }
            }
            for v in &tail {
                outs[*v as usize] += 1;
            }
        }
    }
    let d = vertex_degrees(h);
    let mut ins: Vec<u32> = d.iter().map(|x| x.0).collect();
    let mut outs: Vec<u32> = d.iter().map(|x| x.1).collect();
    let sizes: Vec<(usize, usize)> = h.arcs().iter().map(|a| (a.tail.len(), a.head.len())).collect();
    let mut all = std::collections::BTreeSet::new();
    rec(&sizes, &mut ins, &mut outs, &mut Vec::new(), &mut all);
    all.into_iter()
        .filter(|arcs| {
            let g = to_hypergraph(h.n_vertices(), arcs);
            in_spec(&g, spec)
        })
        .collect()
}

pub fn to_hypergraph(n: usize, arcs: &[ArcIds]) -> DirectedHypergraph {
    DirectedHypergraph::with_vertex_count(n, arcs.iter().map(|(t, h)| Hyperarc::from_ids(t, h)).collect()).unwrap()
}

pub fn arc_ids(h: &DirectedHypergraph) -> Vec<ArcIds> {
    let mut arcs: Vec<ArcIds> = h
        .arcs()
        .iter()
        .map(|a| (a.tail.iter().map(|v| v.0).collect(), a.head.iter().map(|v| v.0).collect()))
        .collect();
    arcs.sort();
    arcs
}

pub type StubArc = (Vec<usize>, Vec<usize>);

/// Every stub-labeled configuration with `h`'s degrees, as sorted lists of
/// `(tail stubs, head stubs)`, with the owners of the out- and in-stubs.
pub fn brute_stub_states(h: &DirectedHypergraph) -> (Vec<Vec<StubArc>>, Vec<u32>, Vec<u32>) {
    use itertools::Itertools;
    use std::collections::BTreeSet;
    let d = vertex_degrees(h);
    let owners = |pick: fn(&(u32, u32)) -> u32| -> Vec<u32> {
        d.iter().enumerate().flat_map(|(v, x)| std::iter::repeat_n(v as u32, pick(x) as usize)).collect()
    };
    let out_owner = owners(|x| x.1);
    let in_owner = owners(|x| x.0);
    let sizes: Vec<(usize, usize)> = h.arcs().iter().map(|a| (a.tail.len(), a.head.len())).collect();
    let cut = |perm: &[usize], pick: fn(&(usize, usize)) -> usize| -> Vec<Vec<usize>> {
        let mut at = 0;
        sizes
            .iter()
            .map(|s| {
                let mut part = perm[at..at + pick(s)].to_vec();
                at += pick(s);
                part.sort_unstable();
                part
            })
            .collect()
    };
    let outs: BTreeSet<Vec<Vec<usize>>> = (0..out_owner.len()).permutations(out_owner.len()).map(|p| cut(&p, |s| s.0)).collect();
    let ins: BTreeSet<Vec<Vec<usize>>> = (0..in_owner.len()).permutations(in_owner.len()).map(|p| cut(&p, |s| s.1)).collect();
    let mut states: BTreeSet<Vec<StubArc>> = BTreeSet::new();
    for t in &outs {
        for hd in &ins {
            let mut state: Vec<StubArc> = t.iter().cloned().zip(hd.iter().cloned()).collect();
            state.sort();
            states.insert(state);
        }
    }
    (states.into_iter().collect(), out_owner, in_owner)
}

pub fn project_stubs(state: &[StubArc], out_owner: &[u32], in_owner: &[u32]) -> Vec<ArcIds> {
    let mut arcs: Vec<ArcIds> = state
        .iter()
        .map(|(t, hd)| {
            let mut t: Vec<u32> = t.iter().map(|&i| out_owner[i]).collect();
            let mut hd: Vec<u32> = hd.iter().map(|&i| in_owner[i]).collect();
            t.sort_unstable();
            hd.sort_unstable();
            (t, hd)
        })
        .collect();
    arcs.sort();
    arcs
}

/// Number of stub-labeled configurations of every class in the `sdm` space
/// of `h`'s degrees.
pub fn brute_stub_counts(h: &DirectedHypergraph) -> std::collections::BTreeMap<Vec<ArcIds>, u64> {
    let (states, out_owner, in_owner) = brute_stub_states(h);
    let mut counts = std::collections::BTreeMap::new();
    for s in states {
        *counts.entry(project_stubs(&s, &out_owner, &in_owner)).or_insert(0) += 1;
    }
    counts
}

pub type Flow = std::collections::BTreeMap<(Vec<ArcIds>, Vec<ArcIds>), num_rational::BigRational>;

/// Class-to-class probability flow `sum_{s in H, s' in H'} P(s, s')` of the
/// stub-labeled chain, built directly from the definition of the move.
pub fn oracle_stub_flow(h: &DirectedHypergraph, spec: &SpaceSpec) -> Flow {
    use itertools::Itertools;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let (states, out_owner, in_owner) = brute_stub_states(h);
    let n = h.n_vertices();
    let allowed = |s: &[StubArc]| in_spec(&to_hypergraph(n, &project_stubs(s, &out_owner, &in_owner)), spec);
    let mut flow = Flow::new();
    let m = h.n_arcs();
    let pairs = (m * (m - 1) / 2) as i64;
    for s in states.iter().filter(|s| allowed(s)) {
        let from = project_stubs(s, &out_owner, &in_owner);
        for i in 0..m {
            for j in i + 1..m {
                let pooled_t: Vec<usize> = s[i].0.iter().chain(&s[j].0).copied().collect();
                let pooled_h: Vec<usize> = s[i].1.iter().chain(&s[j].1).copied().collect();
                let tails: Vec<Vec<usize>> = pooled_t.iter().copied().combinations(s[i].0.len()).collect();
                let heads: Vec<Vec<usize>> = pooled_h.iter().copied().combinations(s[i].1.len()).collect();
                let w = BigRational::new(BigInt::from(1), BigInt::from(pairs * (tails.len() * heads.len()) as i64));
                for ti in &tails {
                    for hi in &heads {
                        let tj: Vec<usize> = pooled_t.iter().copied().filter(|x| !ti.contains(x)).collect();
                        let hj: Vec<usize> = pooled_h.iter().copied().filter(|x| !hi.contains(x)).collect();
                        let mut next = s.clone();
                        next[i] = (ti.clone(), hi.clone());
                        next[j] = (tj, hj);
                        let to = if allowed(&next) { project_stubs(&next, &out_owner, &in_owner) } else { from.clone() };
                        *flow.entry((from.clone(), to)).or_insert_with(|| BigRational::from_integer(0.into())) += &w;
                    }
                }
            }
        }
    }
    flow
}
