//! End-to-end checks behind the `reproduce` command.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    build_chain_graph, build_chain_graph_with, check_aperiodic, check_doubly_stochastic, check_regular, check_strongly_connected,
    lumped_vertex_chain, stationary_distribution, sup_error_from_uniform, ChainOptions,
};
use crate::enumerate::{count_stub_realizations, enumerate_vertex_space};
use crate::error::{Error, Result};
use crate::hypergraph::DegreeSequence;
use crate::space::{Labeling, SpaceSpec};
use crate::validation::{class_d_battery, counterexample_suite, feature_battery, example_degrees, random_battery};

/// Tolerance for "uniform" stationary distributions.
pub const UNIFORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    FigFixedDegrees,
    Thm1,
    Thm2,
    Thm3,
    Thm4,
}

impl Target {
    pub const ALL: [Target; 5] = [Target::FigFixedDegrees, Target::Thm1, Target::Thm2, Target::Thm3, Target::Thm4];
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::FigFixedDegrees => "fig-fixed-degrees",
            Target::Thm1 => "thm1",
            Target::Thm2 => "thm2",
            Target::Thm3 => "thm3",
            Target::Thm4 => "thm4",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.to_string() == s)
            .ok_or_else(|| Error::Analysis(format!("unknown target `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub target: String,
    pub lines: Vec<String>,
    pub pass: bool,
}

impl Report {
    fn new(target: Target) -> Self {
        Report {
            target: target.to_string(),
            lines: Vec::new(),
            pass: true,
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

pub fn run(target: Target) -> Result<Report> {
    match target {
        Target::FigFixedDegrees => example_counts(),
        Target::Thm1 => uniform_stub_chains(),
        Target::Thm2 => class_d_chains(),
        Target::Thm3 => disconnected_spaces(),
        Target::Thm4 => vertex_chains(),
    }
}

/// Expected sizes of the four spaces of the small enumeration example.
pub const EXAMPLE_COUNTS: [(&str, usize); 4] = [("sdm", 11), ("sm", 8), ("d", 5), ("", 4)];

fn example_counts() -> Result<Report> {
    let mut r = Report::new(Target::FigFixedDegrees);
    let d = example_degrees();
    for (x, expected) in EXAMPLE_COUNTS {
        let n = enumerate_vertex_space(&d, &SpaceSpec::parse(x, Labeling::Vertex)?)?.len();
        r.check(n == expected, format!("x={{{x}}}: {n} hypergraphs (expected {expected})"));
    }
    Ok(r)
}

/// Exact properties of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub states: usize,
    pub classes: usize,
    pub regular: bool,
    pub doubly_stochastic: bool,
    pub aperiodic: bool,
    pub connected: bool,
    pub components: usize,
    /// Sup distance of the stationary distribution from uniform, when unique.
    pub sup_error: Option<f64>,
}

impl ChainSummary {
    pub fn uniform(&self) -> bool {
        self.regular
            && self.doubly_stochastic
            && self.aperiodic
            && self.connected
            && self.sup_error.is_some_and(|e| e < UNIFORM_TOLERANCE)
    }
}

pub fn summarize(d: &DegreeSequence, spec: &SpaceSpec, opts: &ChainOptions) -> Result<ChainSummary> {
    let g = build_chain_graph_with(d, spec, opts)?;
    let (connected, comps) = check_strongly_connected(&g);
    let sup_error = stationary_distribution(&g)?.unique().map(sup_error_from_uniform);
    Ok(ChainSummary {
        states: g.n_states(),
        classes: g.classes.len(),
        regular: check_regular(&g).0,
        doubly_stochastic: check_doubly_stochastic(&g).0,
        aperiodic: check_aperiodic(&g),
        connected,
        components: comps.len(),
        sup_error,
    })
}

/// Instances for the always-uniform spaces: the hand-picked feature battery
/// followed by seeded random ones.
pub fn uniform_stub_instances() -> Vec<(String, DegreeSequence)> {
    let mut out: Vec<(String, DegreeSequence)> = feature_battery()
        .into_iter()
        .map(|(name, h)| (name.to_string(), h.degree_sequence()))
        .collect();
    out.extend(
        random_battery(24, 10, 11)
            .into_iter()
            .enumerate()
            .map(|(i, h)| (format!("random-{i}"), h.degree_sequence())),
    );
    out
}

fn uniform_stub_chains() -> Result<Report> {
    let mut r = Report::new(Target::Thm1);
    for (name, d) in uniform_stub_instances() {
        for x in ["sdm", "sm"] {
            let spec = SpaceSpec::parse(x, Labeling::Stub)?;
            match summarize(&d, &spec, &ChainOptions::default()) {
                Ok(s) => r.check(
                    s.uniform(),
                    format!(
                        "{name} x={{{x}}} stub: {} states, symmetric={} aperiodic={} connected={} sup|pi-u|={:.1e}",
                        s.states,
                        s.regular,
                        s.aperiodic,
                        s.connected,
                        s.sup_error.unwrap_or(f64::NAN)
                    ),
                ),
                Err(Error::SizeLimit { found, .. }) => r.lines.push(format!("skip {name} x={{{x}}}: {found} exceeds the size guard")),
                Err(Error::Analysis(msg)) => r.lines.push(format!("skip {name} x={{{x}}}: {msg}")),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(r)
}

/// The class-D instances checked by `thm2`.
pub fn class_d_instances() -> Vec<DegreeSequence> {
    class_d_battery(4, 3)
}

fn class_d_chains() -> Result<Report> {
    let mut r = Report::new(Target::Thm2);
    let mut connected = 0;
    let mut checked = 0;
    for d in class_d_instances() {
        for labeling in [Labeling::Stub, Labeling::Vertex] {
            let spec = SpaceSpec::parse("s", labeling)?;
            let g = match build_chain_graph(&d, &spec) {
                Ok(g) => g,
                Err(Error::Analysis(_)) | Err(Error::SizeLimit { .. }) => continue,
                Err(e) => return Err(e),
            };
            checked += 1;
            let (ok, comps) = check_strongly_connected(&g);
            if ok {
                connected += 1;
            } else {
                r.check(
                    false,
                    format!("d_V={:?} {labeling}: {} components", d.vertex, comps.len()),
                );
            }
        }
    }
    r.check(
        checked >= 3 && connected == checked,
        format!("x={{s}}: {connected}/{checked} class-D chains strongly connected"),
    );
    Ok(r)
}

fn disconnected_spaces() -> Result<Report> {
    let mut r = Report::new(Target::Thm3);
    let suite = counterexample_suite()?;
    for e in suite.entries {
        let kind = if e.expect_disconnected { "disconnected" } else { "connected" };
        r.check(
            e.pass,
            format!(
                "x={{{}}} {}: {} expected {kind}; {} states, {} components; {}",
                e.space, e.labeling, e.instance, e.states, e.components, e.detail
            ),
        );
    }
    Ok(r)
}

/// Result of comparing the vertex-labeled chain with the stub chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexChainCheck {
    pub classes: usize,
    pub stub_states: usize,
    /// Sup distance of the vertex chain's stationary distribution from uniform.
    pub vertex_sup_error: f64,
    /// Sup distance between the stub chain's stationary distribution pushed
    /// onto classes and realization-count proportions.
    pub pushforward_error: f64,
    /// Direct and lumped constructions agree entrywise.
    pub routes_agree: bool,
}

impl VertexChainCheck {
    pub fn pass(&self) -> bool {
        self.vertex_sup_error < UNIFORM_TOLERANCE && self.pushforward_error < UNIFORM_TOLERANCE && self.routes_agree
    }
}

pub fn vertex_chain_check(d: &DegreeSequence, x: &str, opts: &ChainOptions) -> Result<VertexChainCheck> {
    let vspec = SpaceSpec::parse(x, Labeling::Vertex)?;
    let direct = build_chain_graph_with(d, &vspec, opts)?;
    let lumped = lumped_vertex_chain(d, &vspec, opts)?;
    let routes_agree = direct.classes == lumped.classes && direct.rows() == lumped.rows();
    let pi = stationary_distribution(&direct)?;
    let vertex_sup_error = pi.unique().map(sup_error_from_uniform).unwrap_or(f64::INFINITY);

    let stub = build_chain_graph(d, &vspec.with_labeling(Labeling::Stub))?;
    let pushforward_error = match stationary_distribution(&stub)?.unique() {
        Some(pi) => {
            let pushed = stub.pushforward(pi);
            let counts: Vec<f64> = stub
                .classes
                .iter()
                .map(|h| count_stub_realizations(h).to_f64().unwrap_or(f64::NAN))
                .collect();
            let total: f64 = counts.iter().sum();
            pushed
                .iter()
                .zip(&counts)
                .map(|(p, c)| (p - c / total).abs())
                .fold(0.0, f64::max)
        }
        None => f64::INFINITY,
    };
    Ok(VertexChainCheck {
        classes: direct.n_states(),
        stub_states: stub.n_states(),
        vertex_sup_error,
        pushforward_error,
        routes_agree,
    })
}

/// Instances with nontrivial acceptance probabilities.
pub fn acceptance_instances() -> Vec<(String, DegreeSequence)> {
    let keep = ["example", "identical-pair", "shared-heads", "mixed"];
    feature_battery()
        .into_iter()
        .filter(|(name, _)| keep.contains(name))
        .map(|(name, h)| (name.to_string(), h.degree_sequence()))
        .collect()
}

fn vertex_chains() -> Result<Report> {
    let mut r = Report::new(Target::Thm4);
    for (name, d) in acceptance_instances() {
        for x in ["sdm", "sm"] {
            let c = match vertex_chain_check(&d, x, &ChainOptions::default()) {
                Ok(c) => c,
                Err(Error::Analysis(_)) => continue,
                Err(e) => return Err(e),
            };
            r.check(
                c.pass(),
                format!(
                    "{name} x={{{x}}}: {} classes, {} stub states, vertex sup|pi-u|={:.1e}, pushforward error={:.1e}, routes agree={}",
                    c.classes, c.stub_states, c.vertex_sup_error, c.pushforward_error, c.routes_agree
                ),
            );
        }
    }
    Ok(r)
}
