//! Directed hypergraphs, their degree sequences, and feature detection.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::{Multiset, VertexId};

/// A hyperarc: a tail multiset pointing at a head multiset.
///
/// Generic over the element type so that stub-labeled states can reuse it
/// with stub identifiers instead of vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hyperarc<T: Ord = VertexId> {
    pub tail: Multiset<T>,
    pub head: Multiset<T>,
}

impl<T: Ord + Copy> Hyperarc<T> {
    pub fn new(tail: Multiset<T>, head: Multiset<T>) -> Self {
        Hyperarc { tail, head }
    }

    /// `(tail size, head size)`.
    pub fn sizes(&self) -> (u32, u32) {
        (self.tail.len() as u32, self.head.len() as u32)
    }

    pub fn is_self_loop(&self, rule: SelfLoopRule) -> bool {
        match rule {
            SelfLoopRule::Equal => self.tail == self.head,
            SelfLoopRule::Overlap => self.tail.intersects(&self.head),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.tail.has_repeat() || self.head.has_repeat()
    }
}

impl Hyperarc<VertexId> {
    pub fn from_ids(tail: &[u32], head: &[u32]) -> Self {
        Hyperarc {
            tail: tail.iter().map(|&v| VertexId(v)).collect(),
            head: head.iter().map(|&v| VertexId(v)).collect(),
        }
    }
}

/// What counts as a self-loop.
///
/// `Equal` is the default: tail and head are the same multiset. `Overlap`
/// flags any hyperarc whose tail and head share a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfLoopRule {
    #[default]
    Equal,
    Overlap,
}

/// A directed hypergraph on vertices `0..n_vertices`.
///
/// The arc list is ordered, but the order only gives each arc a position so a
/// shuffle can address it. Use [`DirectedHypergraph::canonical_form`] to compare
/// hypergraphs as arc multisets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DirectedHypergraph {
    labels: Vec<String>,
    arcs: Vec<Hyperarc>,
}

impl DirectedHypergraph {
    /// Builds a hypergraph with named vertices.
    pub fn new(labels: Vec<String>, arcs: Vec<Hyperarc>) -> Result<Self> {
        let n = labels.len();
        for (i, arc) in arcs.iter().enumerate() {
            if arc.tail.is_empty() {
                return Err(Error::EmptySide { arc: i, side: "tail" });
            }
            if arc.head.is_empty() {
                return Err(Error::EmptySide { arc: i, side: "head" });
            }
            if let Some(v) = arc.tail.iter().chain(arc.head.iter()).find(|v| v.index() >= n) {
                return Err(Error::VertexOutOfRange {
                    arc: i,
                    vertex: v.0,
                    n_vertices: n,
                });
            }
        }
        Ok(DirectedHypergraph { labels, arcs })
    }

    /// Builds a hypergraph whose vertices are named `v0, v1, ...`.
    pub fn with_vertex_count(n_vertices: usize, arcs: Vec<Hyperarc>) -> Result<Self> {
        Self::new(default_labels(n_vertices), arcs)
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Hyperarc] {
        &self.arcs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    /// Replaces the arc list without re-validating. Callers must keep arc
    /// sizes non-zero and vertex ids in range.
    pub(crate) fn with_arcs_unchecked(&self, arcs: Vec<Hyperarc>) -> Self {
        DirectedHypergraph {
            labels: self.labels.clone(),
            arcs,
        }
    }

    pub(crate) fn arcs_mut(&mut self) -> &mut Vec<Hyperarc> {
        &mut self.arcs
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        let mut vertex = vec![(0u32, 0u32); self.n_vertices()];
        for arc in &self.arcs {
            for v in arc.head.iter() {
                vertex[v.index()].0 += 1;
            }
            for v in arc.tail.iter() {
                vertex[v.index()].1 += 1;
            }
        }
        let arcs = self.arcs.iter().map(Hyperarc::sizes).collect();
        DegreeSequence { vertex, arcs }
    }

    pub fn classify_features(&self) -> FeatureReport {
        self.classify_features_with(SelfLoopRule::Equal)
    }

    pub fn classify_features_with(&self, rule: SelfLoopRule) -> FeatureReport {
        let self_loops = self.arcs.iter().map(|a| a.is_self_loop(rule)).collect();
        let degenerate = self.arcs.iter().map(Hyperarc::is_degenerate).collect();
        let mut order: Vec<usize> = (0..self.arcs.len()).collect();
        order.sort_by(|&i, &j| self.arcs[i].cmp(&self.arcs[j]).then(i.cmp(&j)));
        let mut multi_groups = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && self.arcs[order[end]] == self.arcs[order[start]] {
                end += 1;
            }
            if end - start >= 2 {
                let mut group = order[start..end].to_vec();
                group.sort_unstable();
                multi_groups.push(group);
            }
            start = end;
        }
        multi_groups.sort();
        FeatureReport {
            self_loops,
            degenerate,
            multi_groups,
        }
    }

    /// Number of arcs equal to `arc` (as multisets on both sides).
    pub fn multiplicity_of(&self, arc: &Hyperarc) -> usize {
        self.arcs.iter().filter(|a| *a == arc).count()
    }

    /// Copy with the arc list sorted.
    pub fn canonicalize(&self) -> DirectedHypergraph {
        let mut arcs = self.arcs.clone();
        arcs.sort();
        self.with_arcs_unchecked(arcs)
    }

    /// Byte encoding that is equal for two hypergraphs iff they have the same
    /// vertex count and the same arc multiset under fixed vertex labels.
    ///
    /// Layout (all integers little-endian `u32`): vertex count, arc count,
    /// then per arc in sorted order: tail size, tail ids, head size, head ids.
    pub fn canonical_form(&self) -> CanonicalForm {
        let mut arcs: Vec<&Hyperarc> = self.arcs.iter().collect();
        arcs.sort();
        let mut bytes = Vec::with_capacity(8 + arcs.len() * 24);
        let mut put = |x: u32| bytes.extend_from_slice(&x.to_le_bytes());
        put(self.n_vertices() as u32);
        put(arcs.len() as u32);
        for arc in arcs {
            put(arc.tail.len() as u32);
            for v in arc.tail.iter() {
                put(v.0);
            }
            put(arc.head.len() as u32);
            for v in arc.head.iter() {
                put(v.0);
            }
        }
        CanonicalForm(bytes)
    }

    /// Same arc multiset as `other`, ignoring arc order.
    pub fn same_arcs(&self, other: &DirectedHypergraph) -> bool {
        self.canonical_form() == other.canonical_form()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// Canonical byte string of a hypergraph; see [`DirectedHypergraph::canonical_form`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalForm(pub Vec<u8>);

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// Per-arc self-loop and degeneracy flags plus groups of identical arcs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub self_loops: Vec<bool>,
    pub degenerate: Vec<bool>,
    /// Index groups (each sorted, size >= 2) of arcs with equal tail and head.
    pub multi_groups: Vec<Vec<usize>>,
}

impl FeatureReport {
    pub fn has_self_loop(&self) -> bool {
        self.self_loops.iter().any(|&b| b)
    }

    pub fn has_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&b| b)
    }

    pub fn has_multi(&self) -> bool {
        !self.multi_groups.is_empty()
    }
}

/// Vertex `(in, out)` degrees and arc `(tail size, head size)` degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeSequence {
    /// `(in-degree, out-degree)` per vertex.
    pub vertex: Vec<(u32, u32)>,
    /// `(tail size, head size)` per arc.
    pub arcs: Vec<(u32, u32)>,
}

impl DegreeSequence {
    /// Validates stub conservation and non-empty tails and heads.
    pub fn new(vertex: Vec<(u32, u32)>, arcs: Vec<(u32, u32)>) -> Result<Self> {
        if let Some(i) = arcs.iter().position(|&(t, h)| t == 0 || h == 0) {
            return Err(Error::DegreeSequence(format!("arc {i} has an empty tail or head")));
        }
        let d = DegreeSequence { vertex, arcs };
        let (in_sum, out_sum) = d.vertex_stub_totals();
        let (tail_sum, head_sum) = d.arc_stub_totals();
        if out_sum != tail_sum {
            return Err(Error::DegreeSequence(format!(
                "out-degrees sum to {out_sum} but tail sizes sum to {tail_sum}"
            )));
        }
        if in_sum != head_sum {
            return Err(Error::DegreeSequence(format!(
                "in-degrees sum to {in_sum} but head sizes sum to {head_sum}"
            )));
        }
        Ok(d)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex.len()
    }

    pub fn n_arcs(&self) -> usize {
        self.arcs.len()
    }

    /// `(sum of in-degrees, sum of out-degrees)`.
    pub fn vertex_stub_totals(&self) -> (u64, u64) {
        self.vertex
            .iter()
            .fold((0, 0), |(i, o), &(di, dout)| (i + di as u64, o + dout as u64))
    }

    /// `(sum of tail sizes, sum of head sizes)`.
    pub fn arc_stub_totals(&self) -> (u64, u64) {
        self.arcs
            .iter()
            .fold((0, 0), |(t, h), &(dt, dh)| (t + dt as u64, h + dh as u64))
    }

    pub fn total_stubs(&self) -> usize {
        let (i, o) = self.vertex_stub_totals();
        (i + o) as usize
    }

    pub fn sorted_arc_degrees(&self) -> Vec<(u32, u32)> {
        let mut a = self.arcs.clone();
        a.sort_unstable();
        a
    }

    /// Vertex degrees compared position by position, arc degrees as a multiset.
    pub fn matches(&self, other: &DegreeSequence) -> bool {
        self.vertex == other.vertex && self.sorted_arc_degrees() == other.sorted_arc_degrees()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Vertices a..f = 0..5.
    pub(crate) fn small_example() -> DirectedHypergraph {
        let labels = ["a", "b", "c", "d", "e", "f"].iter().map(|s| s.to_string()).collect();
        DirectedHypergraph::new(
            labels,
            vec![
                Hyperarc::from_ids(&[0, 3], &[0, 1]),
                Hyperarc::from_ids(&[3, 3], &[4]),
                Hyperarc::from_ids(&[1], &[2]),
                Hyperarc::from_ids(&[1], &[2]),
                Hyperarc::from_ids(&[2, 5], &[2, 5]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn degree_sequence_of_the_worked_example() {
        let d = small_example().degree_sequence();
        assert_eq!(d.vertex, vec![(1, 1), (1, 2), (3, 1), (0, 3), (1, 0), (1, 1)]);
        assert_eq!(d.arcs, vec![(2, 2), (2, 1), (1, 1), (1, 1), (2, 2)]);
    }

    #[test]
    fn features_of_the_worked_example() {
        let f = small_example().classify_features();
        assert_eq!(f.self_loops, vec![false, false, false, false, true]);
        assert_eq!(f.degenerate, vec![false, true, false, false, false]);
        assert_eq!(f.multi_groups, vec![vec![2, 3]]);
    }

    #[test]
    fn empty_arc_list() {
        let h = DirectedHypergraph::with_vertex_count(3, vec![]).unwrap();
        let d = h.degree_sequence();
        assert_eq!(d.vertex, vec![(0, 0); 3]);
        assert!(d.arcs.is_empty());
    }

    #[test]
    fn singleton_self_loop_is_not_degenerate() {
        let a = Hyperarc::from_ids(&[0], &[0]);
        assert!(a.is_self_loop(SelfLoopRule::Equal));
        assert!(!a.is_degenerate());
    }

    #[test]
    fn self_loop_ignores_order() {
        let a = Hyperarc::from_ids(&[0, 1], &[1, 0]);
        assert!(a.is_self_loop(SelfLoopRule::Equal));
    }

    #[test]
    fn overlap_rule_is_weaker() {
        let a = Hyperarc::from_ids(&[0, 1], &[1, 2]);
        assert!(!a.is_self_loop(SelfLoopRule::Equal));
        assert!(a.is_self_loop(SelfLoopRule::Overlap));
    }

    #[test]
    fn canonical_form_ignores_arc_order() {
        let h1 = DirectedHypergraph::with_vertex_count(
            3,
            vec![Hyperarc::from_ids(&[1], &[2]), Hyperarc::from_ids(&[0], &[2])],
        )
        .unwrap();
        let h2 = DirectedHypergraph::with_vertex_count(
            3,
            vec![Hyperarc::from_ids(&[0], &[2]), Hyperarc::from_ids(&[1], &[2])],
        )
        .unwrap();
        assert_eq!(h1.canonical_form(), h2.canonical_form());
        assert_ne!(h1, h2);
    }

    #[test]
    fn rejects_empty_sides_and_bad_ids() {
        let e = DirectedHypergraph::with_vertex_count(2, vec![Hyperarc::from_ids(&[], &[1])]);
        assert!(matches!(e, Err(Error::EmptySide { side: "tail", .. })));
        let e = DirectedHypergraph::with_vertex_count(2, vec![Hyperarc::from_ids(&[0], &[2])]);
        assert!(matches!(e, Err(Error::VertexOutOfRange { vertex: 2, .. })));
    }

    #[test]
    fn degree_sequence_validation() {
        assert!(DegreeSequence::new(vec![(1, 1)], vec![(1, 1)]).is_ok());
        assert!(DegreeSequence::new(vec![(1, 2)], vec![(1, 1)]).is_err());
        assert!(DegreeSequence::new(vec![(0, 0)], vec![(0, 0)]).is_err());
    }

    #[test]
    fn degree_matching_treats_arcs_as_multiset() {
        let a = DegreeSequence::new(vec![(2, 2)], vec![(1, 1), (1, 1)]).unwrap();
        let b = DegreeSequence::new(vec![(3, 2)], vec![(1, 2), (1, 1)]).unwrap();
        let c = DegreeSequence::new(vec![(3, 2)], vec![(1, 1), (1, 2)]).unwrap();
        assert!(b.matches(&c));
        assert!(!a.matches(&b));
    }
}
