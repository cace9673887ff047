//! Exhaustive enumeration of small spaces.
//!
//! Vertex-labeled spaces are enumerated as canonical hypergraphs. Stub-labeled
//! spaces are enumerated as sets of arcs over numbered stubs: vertex `v` owns
//! a contiguous block of `d_v^out` out-stubs and `d_v^in` in-stubs, and an arc
//! is a set of out-stubs (its tail) and a set of in-stubs (its head).

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;

use crate::combinatorics::factorial_big;
use crate::error::{Error, Result};
use crate::hypergraph::{DegreeSequence, DirectedHypergraph, Hyperarc};
use crate::multiset::{Multiset, VertexId};
use crate::space::SpaceSpec;

pub const DEFAULT_VERTEX_STUB_LIMIT: usize = 16;
pub const DEFAULT_STUB_STUB_LIMIT: usize = 12;

fn check_limit(d: &DegreeSequence, limit: usize) -> Result<()> {
    let found = d.total_stubs();
    if found > limit {
        return Err(Error::SizeLimit {
            what: "degree sequence",
            found,
            limit,
        });
    }
    Ok(())
}

/// All vertex-labeled hypergraphs with degree sequence `d` in `spec`, in
/// canonical form, sorted by arc list. Vertices are named `v0, v1, ...`.
pub fn enumerate_vertex_space(d: &DegreeSequence, spec: &SpaceSpec) -> Result<Vec<DirectedHypergraph>> {
    enumerate_vertex_space_with_limit(d, spec, DEFAULT_VERTEX_STUB_LIMIT)
}

pub fn enumerate_vertex_space_with_limit(d: &DegreeSequence, spec: &SpaceSpec, limit: usize) -> Result<Vec<DirectedHypergraph>> {
    check_limit(d, limit)?;
    let slots = d.sorted_arc_degrees();
    let mut out_left: Vec<usize> = d.vertex.iter().map(|&(_, o)| o as usize).collect();
    let mut in_left: Vec<usize> = d.vertex.iter().map(|&(i, _)| i as usize).collect();
    let mut found = BTreeSet::new();
    let mut current = Vec::with_capacity(slots.len());
    fill_vertex_slots(&slots, spec, &mut out_left, &mut in_left, &mut current, &mut found);
    let n = d.n_vertices();
    found
        .into_iter()
        .map(|arcs: Vec<Hyperarc>| DirectedHypergraph::with_vertex_count(n, arcs))
        .collect()
}

fn fill_vertex_slots(
    slots: &[(u32, u32)],
    spec: &SpaceSpec,
    out_left: &mut [usize],
    in_left: &mut [usize],
    current: &mut Vec<Hyperarc>,
    found: &mut BTreeSet<Vec<Hyperarc>>,
) {
    let k = current.len();
    if k == slots.len() {
        let mut arcs = current.clone();
        arcs.sort();
        if spec.allow_multi || arcs.windows(2).all(|w| w[0] != w[1]) {
            found.insert(arcs);
        }
        return;
    }
    let (t, h) = slots[k];
    // Slots of equal size are interchangeable: keep their arcs nondecreasing.
    let floor = (k > 0 && slots[k - 1] == slots[k]).then(|| current[k - 1].clone());
    for tail in bounded_multisets(out_left, t as usize) {
        if let Some(f) = &floor {
            if tail < f.tail {
                continue;
            }
        }
        take(out_left, &tail, true);
        for head in bounded_multisets(in_left, h as usize) {
            let arc = Hyperarc::new(tail.clone(), head);
            if let Some(f) = &floor {
                if arc < *f || (!spec.allow_multi && arc == *f) {
                    continue;
                }
            }
            if !spec.permits_arc(&arc) {
                continue;
            }
            take(in_left, &arc.head, true);
            current.push(arc);
            fill_vertex_slots(slots, spec, out_left, in_left, current, found);
            let arc = current.pop().unwrap();
            take(in_left, &arc.head, false);
        }
        take(out_left, &tail, false);
    }
}

fn take(budget: &mut [usize], m: &Multiset, remove: bool) {
    for v in m.iter() {
        if remove {
            budget[v.index()] -= 1;
        } else {
            budget[v.index()] += 1;
        }
    }
}

/// All multisets of size `size` with at most `caps[v]` copies of vertex `v`,
/// in increasing order.
fn bounded_multisets(caps: &[usize], size: usize) -> Vec<Multiset> {
    fn go(caps: &[usize], v: usize, left: usize, acc: &mut Vec<VertexId>, out: &mut Vec<Multiset>) {
        if left == 0 {
            out.push(Multiset::from_vec(acc.clone()));
            return;
        }
        if v == caps.len() {
            return;
        }
        let room: usize = caps[v..].iter().sum();
        if room < left {
            return;
        }
        for c in (0..=caps[v].min(left)).rev() {
            acc.extend(std::iter::repeat_n(VertexId(v as u32), c));
            go(caps, v + 1, left - c, acc, out);
            acc.truncate(acc.len() - c);
        }
    }
    let mut out = Vec::new();
    go(caps, 0, size, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Numbering of stubs for a degree sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StubLayout {
    n_vertices: usize,
    /// Owner vertex of each out-stub.
    out_owner: Vec<VertexId>,
    /// Owner vertex of each in-stub.
    in_owner: Vec<VertexId>,
    arc_degrees: Vec<(u32, u32)>,
}

impl StubLayout {
    pub fn new(d: &DegreeSequence) -> Self {
        let mut out_owner = Vec::new();
        let mut in_owner = Vec::new();
        for (v, &(din, dout)) in d.vertex.iter().enumerate() {
            out_owner.extend(std::iter::repeat_n(VertexId(v as u32), dout as usize));
            in_owner.extend(std::iter::repeat_n(VertexId(v as u32), din as usize));
        }
        StubLayout {
            n_vertices: d.n_vertices(),
            out_owner,
            in_owner,
            arc_degrees: d.sorted_arc_degrees(),
        }
    }

    pub fn n_out_stubs(&self) -> usize {
        self.out_owner.len()
    }

    pub fn n_in_stubs(&self) -> usize {
        self.in_owner.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Replaces every stub by its owner vertex.
    pub fn project_arc(&self, arc: &Hyperarc<u32>) -> Hyperarc {
        Hyperarc::new(
            arc.tail.map(|s| self.out_owner[s as usize]),
            arc.head.map(|s| self.in_owner[s as usize]),
        )
    }

    /// The vertex-labeled hypergraph of a stub state, in canonical form.
    pub fn project(&self, state: &StubState) -> DirectedHypergraph {
        let mut arcs: Vec<Hyperarc> = state.arcs.iter().map(|a| self.project_arc(a)).collect();
        arcs.sort();
        DirectedHypergraph::with_vertex_count(self.n_vertices, arcs).expect("stub owners are in range")
    }

    /// True when the projection of `state` has no feature forbidden by `spec`.
    pub fn permits(&self, state: &StubState, spec: &SpaceSpec) -> bool {
        spec.permits_hypergraph(&self.project(state))
    }
}

/// A stub-labeled hypergraph: a set of arcs over stub ids, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StubState {
    pub arcs: Vec<Hyperarc<u32>>,
}

impl StubState {
    pub fn new(mut arcs: Vec<Hyperarc<u32>>) -> Self {
        arcs.sort();
        StubState { arcs }
    }
}

/// All stub-labeled states with degree sequence `d` whose projections lie in
/// `spec`, sorted.
pub fn enumerate_stub_space(d: &DegreeSequence, spec: &SpaceSpec) -> Result<(StubLayout, Vec<StubState>)> {
    enumerate_stub_space_with_limit(d, spec, DEFAULT_STUB_STUB_LIMIT)
}

pub fn enumerate_stub_space_with_limit(d: &DegreeSequence, spec: &SpaceSpec, limit: usize) -> Result<(StubLayout, Vec<StubState>)> {
    check_limit(d, limit)?;
    let layout = StubLayout::new(d);
    let mut degrees = layout.arc_degrees.clone();
    degrees.dedup();
    let mut remaining: Vec<usize> = degrees
        .iter()
        .map(|deg| layout.arc_degrees.iter().filter(|x| *x == deg).count())
        .collect();
    let mut out_free = vec![true; layout.n_out_stubs()];
    let mut in_free = vec![true; layout.n_in_stubs()];
    let mut current = Vec::new();
    let mut states = Vec::new();
    build_stub_states(
        &layout,
        spec,
        &degrees,
        &mut remaining,
        &mut out_free,
        &mut in_free,
        &mut current,
        &mut states,
    );
    states.sort();
    Ok((layout, states))
}

#[allow(clippy::too_many_arguments)]
fn build_stub_states(
    layout: &StubLayout,
    spec: &SpaceSpec,
    degrees: &[(u32, u32)],
    remaining: &mut [usize],
    out_free: &mut [bool],
    in_free: &mut [bool],
    current: &mut Vec<Hyperarc<u32>>,
    states: &mut Vec<StubState>,
) {
    // Each arc has a nonempty tail, so the smallest free out-stub belongs to
    // the next arc; this generates every arc set exactly once.
    let Some(first) = out_free.iter().position(|&f| f) else {
        if remaining.iter().all(|&r| r == 0) {
            let state = StubState::new(current.clone());
            if layout.permits(&state, spec) {
                states.push(state);
            }
        }
        return;
    };
    for (k, &(t, h)) in degrees.iter().enumerate() {
        if remaining[k] == 0 {
            continue;
        }
        let others: Vec<u32> = (first + 1..out_free.len()).filter(|&s| out_free[s]).map(|s| s as u32).collect();
        let ins: Vec<u32> = (0..in_free.len()).filter(|&s| in_free[s]).map(|s| s as u32).collect();
        if others.len() + 1 < t as usize || ins.len() < h as usize {
            continue;
        }
        remaining[k] -= 1;
        for rest in itertools::Itertools::combinations(others.iter().copied(), t as usize - 1) {
            let mut tail = rest;
            tail.push(first as u32);
            for &s in &tail {
                out_free[s as usize] = false;
            }
            for head in itertools::Itertools::combinations(ins.iter().copied(), h as usize) {
                let arc = Hyperarc::new(Multiset::from_vec(tail.clone()), Multiset::from_vec(head.clone()));
                if !spec.permits_arc(&layout.project_arc(&arc)) {
                    continue;
                }
                for &s in &head {
                    in_free[s as usize] = false;
                }
                current.push(arc);
                build_stub_states(layout, spec, degrees, remaining, out_free, in_free, current, states);
                current.pop();
                for &s in &head {
                    in_free[s as usize] = true;
                }
            }
            for &s in &tail {
                out_free[s as usize] = true;
            }
        }
        remaining[k] += 1;
    }
}

/// Number of stub-labeled states that project onto `h`:
/// `prod_v d_in(v)! d_out(v)! / (prod_a prod_v m_at(v)! m_ah(v)! * prod_classes mult!)`.
pub fn count_stub_realizations(h: &DirectedHypergraph) -> BigUint {
    let d = h.degree_sequence();
    let mut num = BigUint::one();
    for &(din, dout) in &d.vertex {
        num *= factorial_big(din as u64) * factorial_big(dout as u64);
    }
    let mut den = BigUint::one();
    for arc in h.arcs() {
        for (_, m) in arc.tail.counts().into_iter().chain(arc.head.counts()) {
            den *= factorial_big(m as u64);
        }
    }
    let mut sorted: Vec<&Hyperarc> = h.arcs().iter().collect();
    sorted.sort();
    for group in sorted.chunk_by(|a, b| a == b) {
        den *= factorial_big(group.len() as u64);
    }
    num / den
}
