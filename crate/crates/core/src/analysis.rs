//! Exact transition matrices on enumerated spaces and the chain properties
//! that imply a uniform stationary distribution.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::combinatorics::binomial_big;
use crate::enumerate::{
    enumerate_stub_space_with_limit, enumerate_vertex_space_with_limit, StubLayout, StubState, DEFAULT_STUB_STUB_LIMIT,
    DEFAULT_VERTEX_STUB_LIMIT,
};
use crate::error::{Error, Result};
use crate::hypergraph::{DegreeSequence, DirectedHypergraph, Hyperarc};
use crate::shuffle::{
    acceptance_probability_with, enumerate_proposals, for_each_split, rearrangements, rewrite_permitted_arcs,
    selected_pair_multiplicity, AcceptanceRule,
};
use crate::space::{Labeling, SpaceSpec};

pub const DEFAULT_STATE_LIMIT: usize = 5000;

/// Settings for [`build_chain_graph_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainOptions {
    pub state_limit: usize,
    /// Stub cap for vertex-labeled enumeration.
    pub vertex_stub_limit: usize,
    /// Stub cap for stub-labeled enumeration.
    pub stub_stub_limit: usize,
    /// Acceptance rule for vertex-labeled chains.
    pub acceptance: AcceptanceRule,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            state_limit: DEFAULT_STATE_LIMIT,
            vertex_stub_limit: DEFAULT_VERTEX_STUB_LIMIT,
            stub_stub_limit: DEFAULT_STUB_STUB_LIMIT,
            acceptance: AcceptanceRule::default(),
        }
    }
}

/// Sparse row: `(column, probability)` sorted by column.
pub type Row = Vec<(usize, BigRational)>;

/// An enumerated state space with its exact transition matrix.
#[derive(Debug, Clone)]
pub struct ChainGraph {
    pub labeling: Labeling,
    /// Vertex-labeled classes, canonical and sorted.
    pub classes: Vec<DirectedHypergraph>,
    /// Class index of each state. The identity for vertex-labeled chains.
    pub class_of: Vec<usize>,
    /// Stub states, for stub-labeled chains.
    pub stub_states: Option<(StubLayout, Vec<StubState>)>,
    rows: Vec<Row>,
}

impl ChainGraph {
    /// A vertex-labeled chain from explicit rows; used for hand-built and
    /// perturbed matrices.
    pub fn from_rows(classes: Vec<DirectedHypergraph>, rows: Vec<Row>) -> Result<Self> {
        if classes.len() != rows.len() {
            return Err(Error::Analysis(format!("{} states but {} rows", classes.len(), rows.len())));
        }
        let n = rows.len();
        let rows = rows.into_iter().map(|r| normalize_row(r, n)).collect::<Result<Vec<_>>>()?;
        Ok(ChainGraph {
            labeling: Labeling::Vertex,
            class_of: (0..classes.len()).collect(),
            classes,
            stub_states: None,
            rows,
        })
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, BigRational)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.rows[i][k].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    /// Overwrites one entry, leaving the rest of the row alone.
    pub fn set_entry(&mut self, i: usize, j: usize, value: BigRational) {
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) if value.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = value,
            Err(k) if !value.is_zero() => row.insert(k, (j, value)),
            Err(_) => {}
        }
    }

    /// Index of the state whose class is `h`, for vertex-labeled chains.
    pub fn class_index(&self, h: &DirectedHypergraph) -> Option<usize> {
        let canon = h.canonicalize();
        self.classes.iter().position(|c| c.arcs() == canon.arcs())
    }

    /// Rows as `f64`.
    pub fn to_f64_rows(&self) -> Vec<Vec<(usize, f64)>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|(j, p)| (*j, p.to_f64().unwrap_or(f64::NAN))).collect())
            .collect()
    }

    /// Sums a distribution over states into one over classes.
    pub fn pushforward(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.classes.len()];
        for (i, p) in dist.iter().enumerate() {
            out[self.class_of[i]] += p;
        }
        out
    }
}

fn normalize_row(mut row: Row, n: usize) -> Result<Row> {
    row.sort_by_key(|(j, _)| *j);
    let mut out: Row = Vec::with_capacity(row.len());
    for (j, p) in row {
        if j >= n {
            return Err(Error::Analysis(format!("column {j} out of range")));
        }
        match out.last_mut() {
            Some((c, q)) if *c == j => *q += p,
            _ => out.push((j, p)),
        }
    }
    out.retain(|(_, p)| !p.is_zero());
    Ok(out)
}

fn to_big(r: Ratio<u128>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Builds the chain for `spec` with default options.
pub fn build_chain_graph(d: &DegreeSequence, spec: &SpaceSpec) -> Result<ChainGraph> {
    build_chain_graph_with(d, spec, &ChainOptions::default())
}

/// Stub-labeled spaces get the stub kernel on stub states. Vertex-labeled
/// spaces get the kernel with acceptance on canonical classes, built
/// directly from each class's positional proposals.
pub fn build_chain_graph_with(d: &DegreeSequence, spec: &SpaceSpec, opts: &ChainOptions) -> Result<ChainGraph> {
    match spec.labeling {
        Labeling::Stub => build_stub_chain(d, spec, opts, None),
        Labeling::Vertex => build_vertex_chain(d, spec, opts),
    }
}

fn check_states(n: usize, limit: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Analysis("the space is empty".into()));
    }
    if n > limit {
        return Err(Error::SizeLimit {
            what: "state space",
            found: n,
            limit,
        });
    }
    Ok(())
}

fn build_vertex_chain(d: &DegreeSequence, spec: &SpaceSpec, opts: &ChainOptions) -> Result<ChainGraph> {
    let classes = enumerate_vertex_space_with_limit(d, spec, opts.vertex_stub_limit)?;
    check_states(classes.len(), opts.state_limit)?;
    let index: HashMap<Vec<Hyperarc>, usize> = classes.iter().enumerate().map(|(i, h)| (h.arcs().to_vec(), i)).collect();
    let rows = classes
        .par_iter()
        .enumerate()
        .map(|(i, h)| {
            let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
            let mut stay = BigRational::zero();
            let proposals = enumerate_proposals(h);
            if proposals.is_empty() {
                stay = BigRational::one();
            }
            for p in proposals {
                let prob = p.probability_exact();
                let alpha = to_big(acceptance_probability_with(h, &p, opts.acceptance));
                let (na, nb) = (p.new_arc_i(), p.new_arc_j());
                if !rewrite_permitted_arcs(h.arcs(), p.arc_i, p.arc_j, &na, &nb, spec) {
                    stay += prob;
                    continue;
                }
                let mut arcs = h.arcs().to_vec();
                arcs[p.arc_i] = na;
                arcs[p.arc_j] = nb;
                arcs.sort();
                let j = *index.get(&arcs).ok_or(Error::ClosureViolation(i))?;
                let moved = &prob * &alpha;
                stay += &prob - &moved;
                *acc.entry(j).or_insert_with(BigRational::zero) += moved;
            }
            *acc.entry(i).or_insert_with(BigRational::zero) += stay;
            Ok(acc.into_iter().filter(|(_, p)| !p.is_zero()).collect())
        })
        .collect::<Result<Vec<Row>>>()?;
    let n = classes.len();
    Ok(ChainGraph {
        labeling: Labeling::Vertex,
        class_of: (0..n).collect(),
        classes,
        stub_states: None,
        rows,
    })
}

/// The stub kernel on stub states. With `acceptance`, each proposal is also
/// accepted with the vertex-labeled probability of its projection, which is
/// the stub-level picture of the vertex-labeled chain.
fn build_stub_chain(d: &DegreeSequence, spec: &SpaceSpec, opts: &ChainOptions, acceptance: Option<AcceptanceRule>) -> Result<ChainGraph> {
    let (layout, states) = enumerate_stub_space_with_limit(d, spec, opts.stub_stub_limit)?;
    check_states(states.len(), opts.state_limit)?;
    let index: HashMap<&StubState, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();

    let mut class_index: BTreeMap<Vec<Hyperarc>, usize> = BTreeMap::new();
    for s in &states {
        class_index.insert(layout.project(s).arcs().to_vec(), 0);
    }
    for (k, v) in class_index.values_mut().enumerate() {
        *v = k;
    }
    let class_of: Vec<usize> = states.iter().map(|s| class_index[layout.project(s).arcs()]).collect();
    let classes: Vec<DirectedHypergraph> = class_index
        .keys()
        .map(|arcs| DirectedHypergraph::with_vertex_count(layout.n_vertices(), arcs.clone()))
        .collect::<Result<_>>()?;

    let rows = states
        .par_iter()
        .enumerate()
        .map(|(i, s)| stub_row(i, s, &layout, spec, acceptance, &index))
        .collect::<Result<Vec<Row>>>()?;
    Ok(ChainGraph {
        labeling: Labeling::Stub,
        classes,
        class_of,
        stub_states: Some((layout, states)),
        rows,
    })
}

fn stub_row(
    i: usize,
    s: &StubState,
    layout: &StubLayout,
    spec: &SpaceSpec,
    acceptance: Option<AcceptanceRule>,
    index: &HashMap<&StubState, usize>,
) -> Result<Row> {
    let n = s.arcs.len();
    if n < 2 {
        return Ok(vec![(i, BigRational::one())]);
    }
    let projected: Vec<Hyperarc> = s.arcs.iter().map(|a| layout.project_arc(a)).collect();
    let pairs = BigInt::from(n * (n - 1) / 2);
    let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut stay = BigRational::zero();
    let mut failure = None;
    for a in 0..n {
        for b in a + 1..n {
            let (x, y) = (&s.arcs[a], &s.arcs[b]);
            let splits = binomial_big((x.tail.len() + y.tail.len()) as u64, x.tail.len() as u64)
                * binomial_big((x.head.len() + y.head.len()) as u64, x.head.len() as u64);
            let prob = BigRational::new(BigInt::one(), &pairs * BigInt::from(splits));
            for_each_split(x, y, |nx, ny| {
                if failure.is_some() {
                    return;
                }
                let (px, py) = (layout.project_arc(&nx), layout.project_arc(&ny));
                if !rewrite_permitted_arcs(&projected, a, b, &px, &py, spec) {
                    stay += &prob;
                    return;
                }
                let alpha = match acceptance {
                    Some(AcceptanceRule::AcceptAll) | None => BigRational::one(),
                    Some(rule) => {
                        let pair = selected_pair_multiplicity(&projected, &projected[a], &projected[b], rule);
                        let den = pair * rearrangements(&px.tail, &py.tail) * rearrangements(&px.head, &py.head);
                        BigRational::new(BigInt::one(), BigInt::from(den))
                    }
                };
                let mut arcs = s.arcs.clone();
                arcs[a] = nx;
                arcs[b] = ny;
                let next = StubState::new(arcs);
                let Some(&j) = index.get(&next) else {
                    failure = Some(Error::ClosureViolation(i));
                    return;
                };
                let moved = &prob * &alpha;
                stay += &prob - &moved;
                *acc.entry(j).or_insert_with(BigRational::zero) += moved;
            });
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    *acc.entry(i).or_insert_with(BigRational::zero) += stay;
    Ok(acc.into_iter().filter(|(_, p)| !p.is_zero()).collect())
}

/// The vertex-labeled chain obtained by running the stub kernel with the
/// given acceptance rule on stub states and summing each row over
/// the classes of its targets.
///
/// Fails when two stub states of one class disagree on their class row,
/// i.e. when the stub chain is not lumpable.
pub fn lumped_vertex_chain(d: &DegreeSequence, spec: &SpaceSpec, opts: &ChainOptions) -> Result<ChainGraph> {
    let stub = build_stub_chain(d, &spec.with_labeling(Labeling::Stub), opts, Some(opts.acceptance))?;
    let n_classes = stub.classes.len();
    let mut lumped: Vec<Option<Row>> = vec![None; n_classes];
    for (i, row) in stub.rows.iter().enumerate() {
        let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (j, p) in row {
            *acc.entry(stub.class_of[*j]).or_insert_with(BigRational::zero) += p;
        }
        let class_row: Row = acc.into_iter().collect();
        let c = stub.class_of[i];
        match &lumped[c] {
            None => lumped[c] = Some(class_row),
            Some(existing) if *existing == class_row => {}
            Some(_) => {
                return Err(Error::Analysis(format!("stub chain is not lumpable at class {c}")));
            }
        }
    }
    Ok(ChainGraph {
        labeling: Labeling::Vertex,
        class_of: (0..n_classes).collect(),
        classes: stub.classes,
        stub_states: None,
        rows: lumped.into_iter().map(|r| r.expect("every class has a stub state")).collect(),
    })
}

/// First `(i, j)` with `P[i][j] != P[j][i]`, if any.
pub fn find_asymmetry(g: &ChainGraph) -> Option<(usize, usize)> {
    for (i, row) in g.rows.iter().enumerate() {
        for (j, p) in row {
            if g.entry(*j, i) != *p {
                return Some((i, *j));
            }
        }
    }
    None
}

/// True when `P` is symmetric, so every state has equal in- and out-weight.
/// On failure the witness is the first asymmetric pair.
pub fn check_regular(g: &ChainGraph) -> (bool, Option<(usize, usize)>) {
    let w = find_asymmetry(g);
    (w.is_none(), w)
}

/// Rows whose sum differs from one.
pub fn check_stochastic(g: &ChainGraph) -> (bool, Vec<usize>) {
    let bad: Vec<usize> = g
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().map(|(_, p)| p.clone()).sum::<BigRational>() != BigRational::one())
        .map(|(i, _)| i)
        .collect();
    (bad.is_empty(), bad)
}

/// Rows and columns all sum to one. On failure the witness is the first bad
/// column.
pub fn check_doubly_stochastic(g: &ChainGraph) -> (bool, Option<usize>) {
    if !check_stochastic(g).0 {
        return (false, None);
    }
    let mut cols = vec![BigRational::zero(); g.n_states()];
    for row in &g.rows {
        for (j, p) in row {
            cols[*j] += p;
        }
    }
    let bad = cols.iter().position(|c| !c.is_one());
    (bad.is_none(), bad)
}

/// Every state has positive holding probability.
pub fn check_aperiodic(g: &ChainGraph) -> bool {
    (0..g.n_states()).all(|i| g.entry(i, i) > BigRational::zero())
}

/// Strong connectivity over positive entries, with the components sorted by
/// their smallest state.
pub fn check_strongly_connected(g: &ChainGraph) -> (bool, Vec<Vec<usize>>) {
    let components = strongly_connected_components(g);
    (components.len() == 1, components)
}

pub fn strongly_connected_components(g: &ChainGraph) -> Vec<Vec<usize>> {
    let mut graph = DiGraph::<(), ()>::with_capacity(g.n_states(), 0);
    let nodes: Vec<_> = (0..g.n_states()).map(|_| graph.add_node(())).collect();
    for (i, row) in g.rows.iter().enumerate() {
        for (j, _) in row {
            if i != *j {
                graph.add_edge(nodes[i], nodes[*j], ());
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.sort();
    comps
}

/// Stationary distribution of a chain, or of each closed component when the
/// chain is reducible.
#[derive(Debug, Clone, PartialEq)]
pub enum Stationary {
    Unique(Vec<f64>),
    /// `(states, distribution over those states)` per closed component.
    PerComponent(Vec<(Vec<usize>, Vec<f64>)>),
}

impl Stationary {
    pub fn unique(&self) -> Option<&[f64]> {
        match self {
            Stationary::Unique(pi) => Some(pi),
            Stationary::PerComponent(_) => None,
        }
    }
}

pub fn stationary_distribution(g: &ChainGraph) -> Result<Stationary> {
    let comps = strongly_connected_components(g);
    if comps.len() == 1 {
        return Ok(Stationary::Unique(solve_stationary(g, &comps[0])?));
    }
    let mut member = vec![usize::MAX; g.n_states()];
    for (k, c) in comps.iter().enumerate() {
        for &s in c {
            member[s] = k;
        }
    }
    let mut out = Vec::new();
    for (k, c) in comps.iter().enumerate() {
        let closed = c.iter().all(|&i| g.rows[i].iter().all(|(j, _)| member[*j] == k));
        if closed {
            out.push((c.clone(), solve_stationary(g, c)?));
        }
    }
    Ok(Stationary::PerComponent(out))
}

/// Solves `pi P = pi`, `sum pi = 1` on a closed set of states.
fn solve_stationary(g: &ChainGraph, states: &[usize]) -> Result<Vec<f64>> {
    let n = states.len();
    let pos: HashMap<usize, usize> = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    // Rows of (P^T - I), last row replaced by the normalization.
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (k, &s) in states.iter().enumerate() {
        for (j, p) in &g.rows[s] {
            if let Some(&l) = pos.get(j) {
                a[(l, k)] += p.to_f64().unwrap_or(f64::NAN);
            }
        }
        a[(k, k)] -= 1.0;
    }
    for k in 0..n {
        a[(n - 1, k)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Analysis("singular stationary system".into()))?;
    Ok(pi.iter().copied().collect())
}

/// Largest `|pi_i - 1/n|`.
pub fn sup_error_from_uniform(pi: &[f64]) -> f64 {
    let u = 1.0 / pi.len() as f64;
    pi.iter().map(|p| (p - u).abs()).fold(0.0, f64::max)
}

/// Total variation between two distributions.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// `TV(delta_start P^t, uniform)` for `t = 0..=steps`.
pub fn tv_curve(g: &ChainGraph, start: usize, steps: usize) -> Vec<f64> {
    let n = g.n_states();
    let rows = g.to_f64_rows();
    let uniform = vec![1.0 / n as f64; n];
    let mut dist = vec![0.0; n];
    dist[start] = 1.0;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(total_variation(&dist, &uniform));
    for _ in 0..steps {
        let mut next = vec![0.0; n];
        for (i, row) in rows.iter().enumerate() {
            if dist[i] == 0.0 {
                continue;
            }
            for (j, p) in row {
                next[*j] += dist[i] * p;
            }
        }
        dist = next;
        out.push(total_variation(&dist, &uniform));
    }
    out
}

/// One `i j num/den` line per nonzero entry.
pub fn edge_list(g: &ChainGraph) -> String {
    let mut out = String::new();
    for (i, row) in g.rows.iter().enumerate() {
        for (j, p) in row {
            let _ = writeln!(out, "{i} {j} {}/{}", p.numer(), p.denom());
        }
    }
    out
}

/// `t,tv` CSV with a header line.
pub fn tv_csv(curve: &[f64]) -> String {
    let mut out = String::from("t,tv\n");
    for (t, v) in curve.iter().enumerate() {
        let _ = writeln!(out, "{t},{v:.12e}");
    }
    out
}
