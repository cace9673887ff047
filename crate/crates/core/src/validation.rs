//! Statistical checks on sampler output, the bipartite incidence map, and
//! the instance batteries used to probe connectivity.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analysis::{build_chain_graph, check_strongly_connected, ChainGraph};
use crate::enumerate::{count_stub_realizations, enumerate_vertex_space};
use crate::error::{Error, Result};
use crate::hypergraph::{DegreeSequence, DirectedHypergraph, Hyperarc};
use crate::rng::chain_rng;
use crate::shuffle::{run_replicas, step_in_place, AcceptanceRule, ChainConfig};
use crate::space::{Labeling, SpaceSpec};

/// p-value above which a uniformity or concordance test passes.
pub const PASS_THRESHOLD: f64 = 0.01;
/// p-value below which a negative control counts as detected.
pub const CONTROL_THRESHOLD: f64 = 1e-4;
/// Smallest expected count per cell before pooling kicks in.
pub const MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of cells left after pooling.
    pub cells: usize,
}

/// Pearson goodness of fit of `observed` counts against cell probabilities
/// `probs`. Cells with expected count below [`MIN_EXPECTED`] are pooled,
/// smallest first, until every cell reaches it.
///
/// An observation in a zero-probability cell gives an infinite statistic.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    let mass: f64 = probs.iter().sum();
    let n = total as f64;
    if observed.iter().zip(probs).any(|(&o, &p)| p <= 0.0 && o > 0) {
        return ChiSquare {
            statistic: f64::INFINITY,
            dof: probs.len().saturating_sub(1),
            p_value: 0.0,
            cells: probs.len(),
        };
    }
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| (n * p / mass, o as f64))
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for (e, o) in cells {
        pending = (pending.0 + e, pending.1 + o);
        if pending.0 >= MIN_EXPECTED {
            pooled.push(pending);
            pending = (0.0, 0.0);
        }
    }
    if pending.0 > 0.0 {
        match pooled.last_mut() {
            Some(last) => *last = (last.0 + pending.0, last.1 + pending.1),
            None => pooled.push(pending),
        }
    }
    let statistic: f64 = pooled.iter().map(|(e, o)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map(|c| c.sf(statistic)).unwrap_or(f64::NAN)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
        cells: pooled.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_p(p: f64) -> Self {
        if p > PASS_THRESHOLD {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramCell {
    pub class: usize,
    /// Arc lines of the class, `;`-separated.
    pub hypergraph: String,
    pub observed: u64,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityTest {
    pub histogram: Vec<HistogramCell>,
    pub chi: ChiSquare,
}

/// Arc lines of `h` with its own labels, e.g. `u u -> x; v -> w`.
pub fn describe(h: &DirectedHypergraph) -> String {
    let canon = h.canonicalize();
    canon
        .arcs()
        .iter()
        .map(|a| {
            let side = |m: &crate::multiset::Multiset| m.iter().map(|v| h.label(v).to_string()).collect::<Vec<_>>().join(" ");
            format!("{} -> {}", side(&a.tail), side(&a.head))
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Tests `samples` against the target distribution on `space`.
///
/// Stub-labeled samplers are uniform over stub states, so their classes are
/// expected in proportion to [`count_stub_realizations`]. Vertex-labeled
/// samplers are expected to be uniform over classes.
pub fn uniformity_test(samples: &[DirectedHypergraph], space: &[DirectedHypergraph], labeling: Labeling) -> Result<UniformityTest> {
    let index: HashMap<Vec<Hyperarc>, usize> = space.iter().enumerate().map(|(i, h)| (h.canonicalize().arcs().to_vec(), i)).collect();
    let mut observed = vec![0u64; space.len()];
    for (k, s) in samples.iter().enumerate() {
        let i = index
            .get(s.canonicalize().arcs())
            .ok_or(Error::SampleOutsideSpace { index: k })?;
        observed[*i] += 1;
    }
    let weights: Vec<f64> = match labeling {
        Labeling::Stub => space
            .iter()
            .map(|h| count_stub_realizations(h).to_f64().unwrap_or(f64::NAN))
            .collect(),
        Labeling::Vertex => vec![1.0; space.len()],
    };
    let chi = chi_square(&observed, &weights);
    let mass: f64 = weights.iter().sum();
    let n = samples.len() as f64;
    let histogram = space
        .iter()
        .enumerate()
        .map(|(i, h)| HistogramCell {
            class: i,
            hypergraph: describe(h),
            observed: observed[i],
            expected: n * weights[i] / mass,
        })
        .collect();
    Ok(UniformityTest { histogram, chi })
}

/// JSON report of a sampling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub instance: String,
    pub spec: String,
    pub labeling: Labeling,
    pub k: u64,
    pub replicas: u64,
    pub seed: u64,
    pub acceptance: AcceptanceRule,
    pub histogram: Vec<HistogramCell>,
    pub chi2: f64,
    pub dof: usize,
    pub p: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// Runs `replicas` chains of `k` steps from `h0` and tests the final states
/// against the space of `h0`'s degree sequence.
pub fn sampling_report(instance: &str, h0: &DirectedHypergraph, config: &ChainConfig, replicas: u64) -> Result<UniformityReport> {
    let samples = run_replicas(h0, config, replicas)?;
    report_from_samples(instance, h0, config, &samples)
}

/// Builds the report for samples already drawn with `config` from `h0`.
pub fn report_from_samples(instance: &str, h0: &DirectedHypergraph, config: &ChainConfig, samples: &[DirectedHypergraph]) -> Result<UniformityReport> {
    let space = relabel_all(enumerate_vertex_space(&h0.degree_sequence(), &config.spec)?, h0)?;
    let test = uniformity_test(samples, &space, config.spec.labeling)?;
    Ok(UniformityReport {
        instance: instance.to_string(),
        spec: config.spec.letters(),
        labeling: config.spec.labeling,
        k: config.steps,
        replicas: samples.len() as u64,
        seed: config.seed,
        acceptance: config.acceptance,
        histogram: test.histogram,
        chi2: test.chi.statistic,
        dof: test.chi.dof,
        p: test.chi.p_value,
        threshold: PASS_THRESHOLD,
        verdict: Verdict::from_p(test.chi.p_value),
    })
}

/// Gives enumerated hypergraphs the vertex names of `like`.
pub fn relabel_all(space: Vec<DirectedHypergraph>, like: &DirectedHypergraph) -> Result<Vec<DirectedHypergraph>> {
    space
        .into_iter()
        .map(|h| DirectedHypergraph::new(like.labels().to_vec(), h.arcs().to_vec()))
        .collect()
}

/// Class counts after one step from `h`, over `n` independent steps.
///
/// Steps are split into fixed chunks, each on its own RNG stream, so the
/// result depends only on `(seed, n)`.
pub fn one_step_counts(h: &DirectedHypergraph, spec: &SpaceSpec, rule: AcceptanceRule, n: u64, seed: u64) -> HashMap<Vec<Hyperarc>, u64> {
    const CHUNK: u64 = 1 << 14;
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chain_rng(seed, c);
            let mut counts: HashMap<Vec<Hyperarc>, u64> = HashMap::new();
            let todo = CHUNK.min(n - c * CHUNK);
            for _ in 0..todo {
                let mut next = h.clone();
                step_in_place(&mut next, spec, rule, &mut rng);
                *counts.entry(next.canonicalize().arcs().to_vec()).or_default() += 1;
            }
            counts
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        })
}

/// Compares `n` sampled steps from class `from` with row `from` of `g`.
///
/// `g` must have vertex-labeled classes as its states. The sampler runs with
/// `spec` and `rule`; for a stub-labeled `spec` the matching exact chain is
/// the vertex-level one built with [`AcceptanceRule::AcceptAll`].
pub fn kernel_row_test(g: &ChainGraph, from: usize, spec: &SpaceSpec, rule: AcceptanceRule, n: u64, seed: u64) -> Result<ChiSquare> {
    if g.n_states() != g.classes.len() {
        return Err(Error::Analysis("kernel row test needs a chain on vertex-labeled classes".into()));
    }
    let counts = one_step_counts(&g.classes[from], spec, rule, n, seed);
    let index: HashMap<&[Hyperarc], usize> = g.classes.iter().enumerate().map(|(i, h)| (h.arcs(), i)).collect();
    let mut observed = vec![0u64; g.n_states()];
    for (arcs, c) in counts {
        let i = index.get(arcs.as_slice()).ok_or(Error::SampleOutsideSpace { index: 0 })?;
        observed[*i] += c;
    }
    let mut probs = vec![0.0; g.n_states()];
    for (j, p) in g.row(from) {
        probs[*j] = p.to_f64().unwrap_or(f64::NAN);
    }
    Ok(chi_square(&observed, &probs))
}

/// A bipartite digraph with arcs from `sources` to `targets`, repeated by
/// multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDigraph {
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    pub arcs: Vec<(usize, usize)>,
}

impl BipartiteDigraph {
    pub fn has_multi_arc(&self) -> bool {
        let mut arcs = self.arcs.clone();
        arcs.sort_unstable();
        arcs.windows(2).any(|w| w[0] == w[1])
    }
}

/// The incidence digraphs `(G^t, G^h)`: `G^t` has an arc `u^out_v -> u^t_a`
/// for every occurrence of `v` in the tail of arc `a`; `G^h` has an arc
/// `u^in_v -> u^h_a` for every occurrence of `v` in the head of `a`.
pub fn map_to_bipartite(h: &DirectedHypergraph) -> (BipartiteDigraph, BipartiteDigraph) {
    let arc_names: Vec<String> = (1..=h.n_arcs()).map(|i| format!("a{i}")).collect();
    let build = |vertex_kind: &str, arc_kind: &str, head: bool| {
        let mut arcs = Vec::new();
        for (k, a) in h.arcs().iter().enumerate() {
            let side = if head { &a.head } else { &a.tail };
            arcs.extend(side.iter().map(|v| (v.index(), k)));
        }
        arcs.sort_unstable();
        BipartiteDigraph {
            sources: h.labels().iter().map(|l| format!("u^{vertex_kind}_{l}")).collect(),
            targets: arc_names.iter().map(|a| format!("u^{arc_kind}_{a}")).collect(),
            arcs,
        }
    };
    (build("out", "t", false), build("in", "h", true))
}

/// True when neither incidence digraph has a multi-arc. This holds exactly
/// when `h` has no degenerate hyperarc.
pub fn check_sm_equivalence(h: &DirectedHypergraph) -> bool {
    let (t, hd) = map_to_bipartite(h);
    !t.has_multi_arc() && !hd.has_multi_arc()
}

/// A random hypergraph with at most `max_stubs` stubs, for batteries.
pub fn random_hypergraph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_arcs: usize, max_side: usize, max_stubs: usize) -> DirectedHypergraph {
    loop {
        let n = rng.random_range(1..=max_vertices);
        let m = rng.random_range(1..=max_arcs);
        let arcs: Vec<Hyperarc> = (0..m)
            .map(|_| {
                let t = rng.random_range(1..=max_side);
                let hs = rng.random_range(1..=max_side);
                let tail: Vec<u32> = (0..t).map(|_| rng.random_range(0..n as u32)).collect();
                let head: Vec<u32> = (0..hs).map(|_| rng.random_range(0..n as u32)).collect();
                Hyperarc::from_ids(&tail, &head)
            })
            .collect();
        let h = DirectedHypergraph::with_vertex_count(n, arcs).expect("ids in range");
        if h.degree_sequence().total_stubs() <= max_stubs {
            return h;
        }
    }
}

/// Distinct degree sequences of seeded random hypergraphs, in generation order.
pub fn random_battery(count: usize, max_stubs: usize, seed: u64) -> Vec<DirectedHypergraph> {
    let mut rng = chain_rng(seed, 0);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    while out.len() < count {
        let h = random_hypergraph(&mut rng, 4, 4, 3, max_stubs);
        let d = h.degree_sequence();
        if seen.insert((d.vertex.clone(), d.sorted_arc_degrees())) {
            out.push(h);
        }
    }
    out
}

/// Hand-picked instances with self-loops, degenerate arcs and multi-arcs.
pub fn feature_battery() -> Vec<(&'static str, DirectedHypergraph)> {
    let g = |n: usize, arcs: &[(&[u32], &[u32])]| {
        DirectedHypergraph::with_vertex_count(n, arcs.iter().map(|(t, h)| Hyperarc::from_ids(t, h)).collect()).expect("valid")
    };
    vec![
        ("example", example_instance()),
        ("isolated-triple", counterexample_h0()),
        ("identical-pair", g(3, &[(&[0, 1], &[2]), (&[0, 1], &[2])])),
        ("self-loops", g(2, &[(&[0], &[0]), (&[1], &[1]), (&[0], &[1])])),
        ("mixed", g(3, &[(&[0, 0], &[1, 2]), (&[1], &[1]), (&[2], &[0, 0])])),
        ("shared-heads", g(4, &[(&[0], &[2, 3]), (&[1], &[2, 3]), (&[0], &[2])])),
    ]
}

/// An instance with the degrees of the small enumeration example:
/// vertex degrees `(2,1), (0,2), (1,1)`, arc degrees `(2,1), (1,1), (1,1)`.
pub fn example_instance() -> DirectedHypergraph {
    let labels = vec!["v1".to_string(), "v2".to_string(), "v3".to_string()];
    DirectedHypergraph::new(
        labels,
        vec![
            Hyperarc::from_ids(&[1, 1], &[0]),
            Hyperarc::from_ids(&[0], &[0]),
            Hyperarc::from_ids(&[2], &[2]),
        ],
    )
    .expect("valid")
}

pub fn example_degrees() -> DegreeSequence {
    example_instance().degree_sequence()
}

/// `{uu -> x, vv -> x, ww -> x}`.
pub fn counterexample_h0() -> DirectedHypergraph {
    let labels = ["u", "v", "w", "x"].map(String::from).to_vec();
    DirectedHypergraph::new(
        labels,
        vec![
            Hyperarc::from_ids(&[0, 0], &[3]),
            Hyperarc::from_ids(&[1, 1], &[3]),
            Hyperarc::from_ids(&[2, 2], &[3]),
        ],
    )
    .expect("valid")
}

/// `{uv -> x, uw -> x, vw -> x}`.
pub fn counterexample_hstar() -> DirectedHypergraph {
    DirectedHypergraph::new(
        counterexample_h0().labels().to_vec(),
        vec![
            Hyperarc::from_ids(&[0, 1], &[3]),
            Hyperarc::from_ids(&[0, 2], &[3]),
            Hyperarc::from_ids(&[1, 2], &[3]),
        ],
    )
    .expect("valid")
}

/// All `(in, out)` vectors over `n` vertices with both coordinates summing to `m`.
fn vertex_degree_vectors(n: usize, m: u32) -> Vec<Vec<(u32, u32)>> {
    fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
        if n == 1 {
            return vec![vec![total]];
        }
        (0..=total)
            .flat_map(|first| {
                compositions(n - 1, total - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    let ins = compositions(n, m);
    let outs = compositions(n, m);
    let mut out = Vec::new();
    for i in &ins {
        for o in &outs {
            out.push(i.iter().copied().zip(o.iter().copied()).collect());
        }
    }
    out
}

/// Degree sequences where every arc is `(1, 2)` and exactly two vertices
/// have positive out-degree, with up to `max_vertices` vertices and
/// `max_arcs` arcs.
pub fn class_d_battery(max_vertices: usize, max_arcs: u32) -> Vec<DegreeSequence> {
    let mut out = Vec::new();
    for m in 2..=max_arcs {
        for n in 2..=max_vertices {
            for ins in vertex_degree_vectors(n, 2 * m) {
                for a in 0..n {
                    for b in a + 1..n {
                        for k in 1..m {
                            let vertex: Vec<(u32, u32)> = ins
                                .iter()
                                .enumerate()
                                .map(|(v, &(din, _))| {
                                    let dout = if v == a {
                                        k
                                    } else if v == b {
                                        m - k
                                    } else {
                                        0
                                    };
                                    (din, dout)
                                })
                                .collect();
                            if vertex.iter().any(|&(i, o)| i == 0 && o == 0) {
                                continue;
                            }
                            if let Ok(d) = DegreeSequence::new(vertex, vec![(1, 2); m as usize]) {
                                out.push(d);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|x, y| (x.total_stubs(), &x.vertex).cmp(&(y.total_stubs(), &y.vertex)));
    out.dedup();
    out
}

/// Digraph-like degree sequences: every arc `(1, 1)`, no isolated vertex.
pub fn digraph_battery(max_vertices: usize, max_arcs: u32) -> Vec<DegreeSequence> {
    let mut out = Vec::new();
    for n in 2..=max_vertices {
        for m in 2..=max_arcs {
            for vertex in vertex_degree_vectors(n, m) {
                if vertex.iter().any(|&(i, o)| i == 0 && o == 0) {
                    continue;
                }
                if let Ok(d) = DegreeSequence::new(vertex, vec![(1, 1); m as usize]) {
                    out.push(d);
                }
            }
        }
    }
    out
}

/// One line of the counterexample suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleEntry {
    pub space: String,
    pub labeling: Labeling,
    pub instance: String,
    pub states: usize,
    pub components: usize,
    /// Whether the suite expects a disconnected chain here.
    pub expect_disconnected: bool,
    pub detail: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub entries: Vec<CounterexampleEntry>,
    pub pass: bool,
}

fn describe_degrees(d: &DegreeSequence) -> String {
    format!("d_V={:?} arcs={:?}", d.vertex, d.sorted_arc_degrees())
}

/// The isolated-triple instance in `x = {s, d}` plus the `{s, d, m}`
/// control, and an exhaustive search over `(1, 1)`-arc degree sequences for a
/// disconnected chain in each of `{}, {d}, {m}, {d, m}`. Each case is run for
/// both labelings.
pub fn counterexample_suite() -> Result<CounterexampleReport> {
    let mut entries = Vec::new();
    let h0 = counterexample_h0();
    let hstar = counterexample_hstar();
    let d1 = h0.degree_sequence();
    for labeling in [Labeling::Stub, Labeling::Vertex] {
        let spec = SpaceSpec::parse("sd", labeling)?;
        entries.push(isolation_entry(&d1, &spec, &h0, &hstar)?);
        let control = SpaceSpec::parse("sdm", labeling)?;
        let g = build_chain_graph(&d1, &control)?;
        let (connected, comps) = check_strongly_connected(&g);
        entries.push(CounterexampleEntry {
            space: control.letters(),
            labeling,
            instance: "isolated-triple".into(),
            states: g.n_states(),
            components: comps.len(),
            expect_disconnected: false,
            detail: "multi-arcs allowed".into(),
            pass: connected,
        });
    }
    let battery = digraph_battery(4, 4);
    for x in ["", "d", "m", "dm"] {
        for labeling in [Labeling::Stub, Labeling::Vertex] {
            let spec = SpaceSpec::parse(x, labeling)?;
            let mut found = None;
            for d in &battery {
                let g = match build_chain_graph(d, &spec) {
                    Ok(g) => g,
                    Err(Error::Analysis(_)) | Err(Error::SizeLimit { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let (connected, comps) = check_strongly_connected(&g);
                if !connected {
                    found = Some((d.clone(), g.n_states(), comps.len()));
                    break;
                }
            }
            entries.push(match found {
                Some((d, states, components)) => CounterexampleEntry {
                    space: x.to_string(),
                    labeling,
                    instance: describe_degrees(&d),
                    states,
                    components,
                    expect_disconnected: true,
                    detail: "first disconnected (1,1)-arc degree sequence".into(),
                    pass: true,
                },
                None => CounterexampleEntry {
                    space: x.to_string(),
                    labeling,
                    instance: "none found".into(),
                    states: 0,
                    components: 0,
                    expect_disconnected: true,
                    detail: format!("searched {} degree sequences", battery.len()),
                    pass: false,
                },
            });
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(CounterexampleReport { entries, pass })
}

/// Checks that `h0` cannot reach `hstar`. In the vertex-labeled chain `h0`
/// must be a singleton component; in the stub-labeled chain its component
/// must consist of exactly its own stub realizations.
fn isolation_entry(d: &DegreeSequence, spec: &SpaceSpec, h0: &DirectedHypergraph, hstar: &DirectedHypergraph) -> Result<CounterexampleEntry> {
    let g = build_chain_graph(d, spec)?;
    let (_, comps) = check_strongly_connected(&g);
    let c0 = g.class_index(h0).ok_or_else(|| Error::Analysis("H0 missing from the space".into()))?;
    let cs = g.class_index(hstar).ok_or_else(|| Error::Analysis("H* missing from the space".into()))?;
    let comp0 = comps
        .iter()
        .find(|c| c.iter().any(|&s| g.class_of[s] == c0))
        .expect("every state has a component");
    let own: Vec<usize> = (0..g.n_states()).filter(|&s| g.class_of[s] == c0).collect();
    let only_h0 = comp0.iter().all(|&s| g.class_of[s] == c0);
    let closed = comp0.iter().all(|&s| g.row(s).iter().all(|(j, _)| comp0.contains(j)));
    let whole_class = comp0 == &own;
    let reaches_hstar = comp0.iter().any(|&s| g.class_of[s] == cs);
    let pass = only_h0 && closed && whole_class && !reaches_hstar && g.classes.len() >= 2;
    Ok(CounterexampleEntry {
        space: spec.letters(),
        labeling: spec.labeling,
        instance: "isolated-triple".into(),
        states: g.n_states(),
        components: comps.len(),
        expect_disconnected: true,
        detail: format!(
            "component of H0 has {} state(s), all realizations of H0, closed={closed}, reaches H*={reaches_hstar}, classes={}",
            comp0.len(),
            g.classes.len()
        ),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dhg::parse_dhg;

    #[test]
    fn chi_square_of_a_perfect_fit() {
        let c = chi_square(&[25, 25, 50], &[1.0, 1.0, 2.0]);
        assert_eq!(c.statistic, 0.0);
        assert_eq!(c.dof, 2);
        assert!((c.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_pools_small_cells() {
        // Expected counts 1, 1, 1, 47, 50: the small cells merge into the 47.
        let c = chi_square(&[1, 1, 1, 47, 50], &[0.01, 0.01, 0.01, 0.47, 0.5]);
        assert_eq!(c.cells, 2);
        assert_eq!(c.dof, 1);
    }

    #[test]
    fn chi_square_matches_reference_value() {
        // Statistic 4 on one degree of freedom.
        let c = chi_square(&[60, 40], &[0.5, 0.5]);
        assert!((c.statistic - 4.0).abs() < 1e-12);
        assert!((c.p_value - 0.04550026389635842).abs() < 1e-12);
    }

    #[test]
    fn impossible_observation_fails() {
        let c = chi_square(&[3, 1], &[1.0, 0.0]);
        assert_eq!(c.p_value, 0.0);
    }

    #[test]
    fn sample_outside_space_is_an_error() {
        let space = enumerate_vertex_space(&example_degrees(), &SpaceSpec::parse("", Labeling::Vertex).unwrap()).unwrap();
        let bad = example_instance();
        assert!(matches!(
            uniformity_test(&[bad], &space, Labeling::Vertex),
            Err(Error::SampleOutsideSpace { index: 0 })
        ));
    }

    #[test]
    fn degenerate_arc_gives_double_incidence() {
        let h = parse_dhg("vertices a b c d e\narc a d -> a b\narc d d -> e\n").unwrap();
        let (t, _) = map_to_bipartite(&h);
        assert_eq!(t.sources[3], "u^out_d");
        assert_eq!(t.targets[1], "u^t_a2");
        assert_eq!(t.arcs.iter().filter(|&&a| a == (3, 1)).count(), 2);
        assert!(t.has_multi_arc());
        assert!(!check_sm_equivalence(&h));
    }

    #[test]
    fn incidence_vertex_classes() {
        let h = parse_dhg("vertices u v w\narc u v -> w\narc w -> u v\n").unwrap();
        let (t, hd) = map_to_bipartite(&h);
        assert_eq!(t.sources, vec!["u^out_u", "u^out_v", "u^out_w"]);
        assert_eq!(t.targets, vec!["u^t_a1", "u^t_a2"]);
        assert_eq!(hd.sources, vec!["u^in_u", "u^in_v", "u^in_w"]);
        assert_eq!(hd.targets, vec!["u^h_a1", "u^h_a2"]);
        assert_eq!(t.arcs.len() + hd.arcs.len(), 6);
        assert!(check_sm_equivalence(&h));
    }

    #[test]
    fn batteries_are_in_class() {
        let d = class_d_battery(4, 3);
        assert!(d.len() >= 3);
        for x in &d {
            assert!(x.arcs.iter().all(|&a| a == (1, 2)));
            assert_eq!(x.vertex.iter().filter(|v| v.1 > 0).count(), 2);
        }
        assert!(digraph_battery(3, 3).iter().all(|x| x.arcs.iter().all(|&a| a == (1, 1))));
        let r = random_battery(20, 12, 1);
        assert_eq!(r.len(), 20);
        assert!(r.iter().all(|h| h.degree_sequence().total_stubs() <= 12));
    }

    #[test]
    fn example_instance_has_the_example_degrees() {
        let d = example_degrees();
        assert_eq!(d.vertex, vec![(2, 1), (0, 2), (1, 1)]);
        assert_eq!(d.sorted_arc_degrees(), vec![(1, 1), (1, 1), (2, 1)]);
    }
}
