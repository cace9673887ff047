//! Uniform sampling of directed hypergraphs with fixed degrees.
//!
//! The sampler is a Markov chain whose step, the double hyperarc shuffle,
//! picks two hyperarcs and redistributes their tail stubs and head stubs while
//! keeping every vertex and hyperarc degree. States can be restricted to forbid
//! self-loops, degenerate hyperarcs and multi-hyperarcs, and can be
//! stub-labeled or vertex-labeled, which gives sixteen spaces.
//!
//! Besides the sampler the crate enumerates small spaces exhaustively and
//! builds exact transition matrices on them, so uniformity can be checked
//! without sampling.
//!
//! ```
//! use hypershuffle::{parse_dhg, run_chain, ChainConfig, Labeling, SpaceSpec};
//!
//! let h = parse_dhg("vertices u v x y\narc u -> x\narc v -> y\n").unwrap();
//! let spec = SpaceSpec::parse("sdm", Labeling::Stub).unwrap();
//! let run = run_chain(&h, &ChainConfig::new(100, 7, spec)).unwrap();
//! assert_eq!(run.state.degree_sequence(), h.degree_sequence());
//! ```

pub mod analysis;
pub mod combinatorics;
pub mod dhg;
pub mod enumerate;
pub mod error;
pub mod hypergraph;
pub mod multiset;
pub mod reproduce;
pub mod rng;
pub mod shuffle;
pub mod space;
pub mod validation;

pub use analysis::{build_chain_graph, build_chain_graph_with, ChainGraph, ChainOptions, Stationary};
pub use dhg::{parse_dhg, parse_dhg_documents, serialize_dhg};
pub use enumerate::{count_stub_realizations, enumerate_stub_space, enumerate_vertex_space, StubLayout, StubState};
pub use error::{Error, Result};
pub use hypergraph::{CanonicalForm, DegreeSequence, DirectedHypergraph, FeatureReport, Hyperarc, SelfLoopRule};
pub use multiset::{Multiset, VertexId};
pub use shuffle::{
    acceptance_probability, apply, propose, run_chain, step, AcceptanceRule, ChainConfig, ChainRun, ShuffleProposal,
};
pub use space::{in_space, Labeling, SpaceSpec};
