//! The double hyperarc shuffle.
//!
//! A step picks two arc positions uniformly among the `C(|A|, 2)` unordered
//! pairs, pools their tail stubs and their head stubs, and hands each arc a
//! uniformly random subset of the pooled stubs of its original size. Pooled
//! stubs are distinguishable, so one particular split has probability
//! `C(t_i + t_j, t_i)^-1 * C(h_i + h_j, h_i)^-1`.
//!
//! In stub-labeled spaces the result is accepted unless it has a forbidden
//! feature. In vertex-labeled spaces the proposal is first accepted with
//! probability [`acceptance_probability`], then checked for features. Any
//! rejection leaves the state unchanged and still counts as a step.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::hypergraph::{CanonicalForm, DirectedHypergraph, Hyperarc};
use crate::multiset::Multiset;
use crate::rng::chain_rng;
use crate::space::{Labeling, SpaceSpec};

/// A proposed shuffle of the arcs at positions `arc_i < arc_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleProposal {
    pub arc_i: usize,
    pub arc_j: usize,
    pub new_tail_i: Multiset,
    pub new_tail_j: Multiset,
    pub new_head_i: Multiset,
    pub new_head_j: Multiset,
    /// `C(|A|, 2)`.
    pub pair_count: u64,
    /// `C(t_i + t_j, t_i)`; saturates at `u128::MAX` for huge arcs.
    pub tail_splits: u128,
    /// `C(h_i + h_j, h_i)`; saturates at `u128::MAX` for huge arcs.
    pub head_splits: u128,
}

impl ShuffleProposal {
    pub fn new_arc_i(&self) -> Hyperarc {
        Hyperarc::new(self.new_tail_i.clone(), self.new_head_i.clone())
    }

    pub fn new_arc_j(&self) -> Hyperarc {
        Hyperarc::new(self.new_tail_j.clone(), self.new_head_j.clone())
    }

    /// Probability of proposing exactly this stub-level split.
    pub fn probability(&self) -> f64 {
        1.0 / (self.pair_count as f64 * self.tail_splits as f64 * self.head_splits as f64)
    }

    pub fn probability_exact(&self) -> BigRational {
        let den = BigInt::from(self.pair_count) * BigInt::from(self.tail_splits) * BigInt::from(self.head_splits);
        BigRational::new(BigInt::from(1), den)
    }

    /// True when both arcs come back unchanged.
    pub fn is_identity_on(&self, h: &DirectedHypergraph) -> bool {
        let (a, b) = (&h.arcs()[self.arc_i], &h.arcs()[self.arc_j]);
        a.tail == self.new_tail_i && a.head == self.new_head_i && b.tail == self.new_tail_j && b.head == self.new_head_j
    }
}

/// How the selected-pair multiplicity enters the acceptance probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcceptanceRule {
    /// `m_a * m_b'`, where `m_b'` counts copies of `b` among the arcs other
    /// than the selected `a`. This is the number of ordered position pairs
    /// holding `(a, b)`, and equals `m_a * m_b` unless `a` and `b` are copies
    /// of the same hyperarc.
    #[default]
    OrderedPairCount,
    /// `m_a * m_b` with both multiplicities counted over the full arc multiset.
    /// Over-rejects shuffles of two identical arcs; kept for comparison.
    MultiplicityProduct,
    /// Accepts every proposal. The vertex-labeled chain then follows the
    /// stub kernel and is biased towards classes with many stub realizations.
    AcceptAll,
}

fn pair_count(n_arcs: usize) -> u64 {
    (n_arcs as u64) * (n_arcs as u64 - 1) / 2
}

fn sat_binomial(n: usize, k: usize) -> u128 {
    binomial(n as u64, k as u64).unwrap_or(u128::MAX)
}

/// Draws a shuffle proposal.
pub fn propose<R: Rng + ?Sized>(h: &DirectedHypergraph, rng: &mut R) -> Result<ShuffleProposal> {
    let n = h.n_arcs();
    if n < 2 {
        return Err(Error::TooFewArcs(n));
    }
    let pair = index::sample(rng, n, 2);
    let (i, j) = {
        let (x, y) = (pair.index(0), pair.index(1));
        (x.min(y), x.max(y))
    };
    let (a, b) = (&h.arcs()[i], &h.arcs()[j]);
    let (new_tail_i, new_tail_j) = random_split(rng, &a.tail, &b.tail);
    let (new_head_i, new_head_j) = random_split(rng, &a.head, &b.head);
    Ok(ShuffleProposal {
        arc_i: i,
        arc_j: j,
        new_tail_i,
        new_tail_j,
        new_head_i,
        new_head_j,
        pair_count: pair_count(n),
        tail_splits: sat_binomial(a.tail.len() + b.tail.len(), a.tail.len()),
        head_splits: sat_binomial(a.head.len() + b.head.len(), a.head.len()),
    })
}

/// Pools `x` and `y` and gives a uniformly random subset of `|x|` pooled
/// positions to the first side.
fn random_split<R: Rng + ?Sized>(rng: &mut R, x: &Multiset, y: &Multiset) -> (Multiset, Multiset) {
    let pool: Vec<_> = x.iter().chain(y.iter()).collect();
    let chosen = index::sample(rng, pool.len(), x.len());
    let mut take = vec![false; pool.len()];
    for p in chosen.iter() {
        take[p] = true;
    }
    let mut first = Vec::with_capacity(x.len());
    let mut second = Vec::with_capacity(y.len());
    for (v, t) in pool.into_iter().zip(take) {
        if t {
            first.push(v);
        } else {
            second.push(v);
        }
    }
    (Multiset::from_vec(first), Multiset::from_vec(second))
}

/// Calls `f` once for every split of the pooled stubs of `a` and `b`, in a
/// fixed order. There are `C(t_a + t_b, t_a) * C(h_a + h_b, h_a)` calls.
pub fn for_each_split<T, F>(a: &Hyperarc<T>, b: &Hyperarc<T>, mut f: F)
where
    T: Ord + Copy,
    F: FnMut(Hyperarc<T>, Hyperarc<T>),
{
    let tails = all_splits(&a.tail, &b.tail);
    let heads = all_splits(&a.head, &b.head);
    for (ta, tb) in &tails {
        for (ha, hb) in &heads {
            f(Hyperarc::new(ta.clone(), ha.clone()), Hyperarc::new(tb.clone(), hb.clone()));
        }
    }
}

fn all_splits<T: Ord + Copy>(x: &Multiset<T>, y: &Multiset<T>) -> Vec<(Multiset<T>, Multiset<T>)> {
    let pool: Vec<T> = x.iter().chain(y.iter()).collect();
    (0..pool.len())
        .combinations(x.len())
        .map(|chosen| {
            let mut take = vec![false; pool.len()];
            for p in chosen {
                take[p] = true;
            }
            let (mut first, mut second) = (Vec::new(), Vec::new());
            for (&v, t) in pool.iter().zip(take) {
                if t {
                    first.push(v);
                } else {
                    second.push(v);
                }
            }
            (Multiset::from_vec(first), Multiset::from_vec(second))
        })
        .collect()
}

/// Every stub-level proposal from `h`, each with its proposal probability.
/// The probabilities sum to one.
pub fn enumerate_proposals(h: &DirectedHypergraph) -> Vec<ShuffleProposal> {
    let n = h.n_arcs();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&h.arcs()[i], &h.arcs()[j]);
            let tail_splits = sat_binomial(a.tail.len() + b.tail.len(), a.tail.len());
            let head_splits = sat_binomial(a.head.len() + b.head.len(), a.head.len());
            for_each_split(a, b, |na, nb| {
                out.push(ShuffleProposal {
                    arc_i: i,
                    arc_j: j,
                    new_tail_i: na.tail,
                    new_head_i: na.head,
                    new_tail_j: nb.tail,
                    new_head_j: nb.head,
                    pair_count: pair_count(n),
                    tail_splits,
                    head_splits,
                });
            });
        }
    }
    out
}

/// True when replacing arcs `i` and `j` of `h` by `new_i` and `new_j`
/// introduces no feature forbidden by `spec`. Only the rewritten arcs are
/// inspected, so this agrees with a full check whenever `h` is in the space.
pub fn rewrite_permitted(h: &DirectedHypergraph, i: usize, j: usize, new_i: &Hyperarc, new_j: &Hyperarc, spec: &SpaceSpec) -> bool {
    rewrite_permitted_arcs(h.arcs(), i, j, new_i, new_j, spec)
}

pub(crate) fn rewrite_permitted_arcs(arcs: &[Hyperarc], i: usize, j: usize, new_i: &Hyperarc, new_j: &Hyperarc, spec: &SpaceSpec) -> bool {
    if !spec.permits_arc(new_i) || !spec.permits_arc(new_j) {
        return false;
    }
    if !spec.allow_multi {
        if new_i == new_j {
            return false;
        }
        for (k, arc) in arcs.iter().enumerate() {
            if k != i && k != j && (arc == new_i || arc == new_j) {
                return false;
            }
        }
    }
    true
}

/// Applies `p` to `h`. Returns `(h, false)` unchanged when the result would
/// contain a forbidden feature.
///
/// `h` is expected to be in the space already; only the two rewritten arcs
/// are checked.
pub fn apply(h: &DirectedHypergraph, p: &ShuffleProposal, spec: &SpaceSpec) -> (DirectedHypergraph, bool) {
    let (na, nb) = (p.new_arc_i(), p.new_arc_j());
    if !rewrite_permitted(h, p.arc_i, p.arc_j, &na, &nb, spec) {
        return (h.clone(), false);
    }
    let mut arcs = h.arcs().to_vec();
    arcs[p.arc_i] = na;
    arcs[p.arc_j] = nb;
    (h.with_arcs_unchecked(arcs), true)
}

/// Vertex-labeled acceptance probability of proposal `p` from `h`, using the
/// default [`AcceptanceRule`].
pub fn acceptance_probability(h: &DirectedHypergraph, p: &ShuffleProposal) -> Ratio<u128> {
    acceptance_probability_with(h, p, AcceptanceRule::default())
}

/// `1 / (pair multiplicity * prod_v C(m_ah(v) + m_bh(v), m_ah(v)) * C(m_at(v) + m_bt(v), m_at(v)))`
/// where the pair multiplicity counts the selected arcs in `h` and `a`, `b`
/// are the proposal's resulting arcs.
pub fn acceptance_probability_with(h: &DirectedHypergraph, p: &ShuffleProposal, rule: AcceptanceRule) -> Ratio<u128> {
    if rule == AcceptanceRule::AcceptAll {
        return Ratio::new(1, 1);
    }
    let a = &h.arcs()[p.arc_i];
    let b = &h.arcs()[p.arc_j];
    let pair = selected_pair_multiplicity(h.arcs(), a, b, rule);
    let den = pair * rearrangements(&p.new_tail_i, &p.new_tail_j) * rearrangements(&p.new_head_i, &p.new_head_j);
    Ratio::new(1, den)
}

pub(crate) fn selected_pair_multiplicity<T: Ord + Copy>(
    arcs: &[Hyperarc<T>],
    a: &Hyperarc<T>,
    b: &Hyperarc<T>,
    rule: AcceptanceRule,
) -> u128 {
    let m_a = arcs.iter().filter(|x| *x == a).count() as u128;
    let m_b = arcs.iter().filter(|x| *x == b).count() as u128;
    match rule {
        AcceptanceRule::MultiplicityProduct | AcceptanceRule::AcceptAll => m_a * m_b,
        AcceptanceRule::OrderedPairCount if a == b => m_a * (m_a - 1),
        AcceptanceRule::OrderedPairCount => m_a * m_b,
    }
}

/// `prod_v C(m_x(v) + m_y(v), m_x(v))`: the number of ways to redistribute
/// the pooled stubs of each vertex so that `x` and `y` come out as given.
pub(crate) fn rearrangements<T: Ord + Copy>(x: &Multiset<T>, y: &Multiset<T>) -> u128 {
    let pooled = x.union_sum(y);
    pooled
        .counts()
        .into_iter()
        .map(|(v, total)| sat_binomial(total, x.multiplicity(v)))
        .fold(1u128, |acc, c| acc.saturating_mul(c))
}

/// Result of one step, by what happened to the proposal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    RejectedByAcceptance,
    RejectedByFeature,
    /// Fewer than two arcs: nothing to shuffle.
    Idle,
}

/// One chain step, modifying `h` in place.
pub fn step_in_place<R: Rng + ?Sized>(h: &mut DirectedHypergraph, spec: &SpaceSpec, rule: AcceptanceRule, rng: &mut R) -> StepOutcome {
    let p = match propose(h, rng) {
        Ok(p) => p,
        Err(_) => return StepOutcome::Idle,
    };
    if spec.labeling == Labeling::Vertex {
        let alpha = acceptance_probability_with(h, &p, rule);
        if !bernoulli_exact(rng, &alpha) {
            return StepOutcome::RejectedByAcceptance;
        }
    }
    let (na, nb) = (p.new_arc_i(), p.new_arc_j());
    if !rewrite_permitted(h, p.arc_i, p.arc_j, &na, &nb, spec) {
        return StepOutcome::RejectedByFeature;
    }
    let arcs = h.arcs_mut();
    arcs[p.arc_i] = na;
    arcs[p.arc_j] = nb;
    StepOutcome::Accepted
}

/// One chain step: propose, then accept or stay.
pub fn step<R: Rng + ?Sized>(h: &DirectedHypergraph, spec: &SpaceSpec, rng: &mut R) -> DirectedHypergraph {
    let mut next = h.clone();
    step_in_place(&mut next, spec, AcceptanceRule::default(), rng);
    next
}

/// Exact Bernoulli draw with a rational success probability.
fn bernoulli_exact<R: Rng + ?Sized>(rng: &mut R, p: &Ratio<u128>) -> bool {
    if p.numer() >= p.denom() {
        return true;
    }
    rng.random_range(0..*p.denom()) < *p.numer()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub steps: u64,
    pub seed: u64,
    pub spec: SpaceSpec,
    pub record_trace: bool,
    #[serde(default)]
    pub acceptance: AcceptanceRule,
}

impl ChainConfig {
    pub fn new(steps: u64, seed: u64, spec: SpaceSpec) -> Self {
        ChainConfig {
            steps,
            seed,
            spec,
            record_trace: false,
            acceptance: AcceptanceRule::default(),
        }
    }

    pub fn with_trace(self) -> Self {
        ChainConfig {
            record_trace: true,
            ..self
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub accepted: u64,
    pub rejected_by_acceptance: u64,
    pub rejected_by_feature: u64,
}

#[derive(Debug, Clone)]
pub struct ChainRun {
    pub state: DirectedHypergraph,
    /// Canonical forms of the initial state and every state after it, when requested.
    pub trace: Option<Vec<CanonicalForm>>,
    pub counts: StepCounts,
}

/// Runs `config.steps` steps from `h0` on RNG stream 0 of `config.seed`.
pub fn run_chain(h0: &DirectedHypergraph, config: &ChainConfig) -> Result<ChainRun> {
    run_chain_stream(h0, config, 0)
}

/// Like [`run_chain`], drawing from the given RNG stream. Replicas of a batch
/// use their index as the stream.
pub fn run_chain_stream(h0: &DirectedHypergraph, config: &ChainConfig, stream: u64) -> Result<ChainRun> {
    if !config.spec.permits_hypergraph(h0) {
        return Err(Error::NotInSpace(config.spec.to_string()));
    }
    let mut rng = chain_rng(config.seed, stream);
    let mut state = h0.clone();
    let mut counts = StepCounts::default();
    let mut trace = config.record_trace.then(|| {
        let mut t = Vec::with_capacity(config.steps as usize + 1);
        t.push(state.canonical_form());
        t
    });
    if h0.n_arcs() >= 2 {
        for _ in 0..config.steps {
            match step_in_place(&mut state, &config.spec, config.acceptance, &mut rng) {
                StepOutcome::Accepted => counts.accepted += 1,
                StepOutcome::RejectedByAcceptance => counts.rejected_by_acceptance += 1,
                StepOutcome::RejectedByFeature => counts.rejected_by_feature += 1,
                StepOutcome::Idle => {}
            }
            if let Some(t) = trace.as_mut() {
                t.push(state.canonical_form());
            }
        }
    } else if let Some(t) = trace.as_mut() {
        t.extend(std::iter::repeat_n(state.canonical_form(), config.steps as usize));
    }
    Ok(ChainRun { state, trace, counts })
}

/// Runs `replicas` independent chains from `h0` in parallel. Replica `r`
/// uses stream `r`; the output order is the replica order.
pub fn run_replicas(h0: &DirectedHypergraph, config: &ChainConfig, replicas: u64) -> Result<Vec<DirectedHypergraph>> {
    use rayon::prelude::*;
    if !config.spec.permits_hypergraph(h0) {
        return Err(Error::NotInSpace(config.spec.to_string()));
    }
    let cfg = ChainConfig {
        record_trace: false,
        ..*config
    };
    (0..replicas)
        .into_par_iter()
        .map(|r| run_chain_stream(h0, &cfg, r).map(|run| run.state))
        .collect()
}
