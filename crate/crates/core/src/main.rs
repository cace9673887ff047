use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hypershuffle::analysis::{
    check_aperiodic, check_doubly_stochastic, check_regular, check_strongly_connected, edge_list, stationary_distribution,
    sup_error_from_uniform, tv_csv, tv_curve,
};
use hypershuffle::enumerate::{enumerate_stub_space_with_limit, enumerate_vertex_space_with_limit};
use hypershuffle::reproduce::{self, Target, UNIFORM_TOLERANCE};
use hypershuffle::rng::{DEFAULT_SEED, SEED_ENV};
use hypershuffle::shuffle::run_replicas;
use hypershuffle::validation::{relabel_all, report_from_samples, Verdict};
use hypershuffle::{
    build_chain_graph_with, parse_dhg, parse_dhg_documents, serialize_dhg, AcceptanceRule, ChainConfig, ChainOptions,
    DirectedHypergraph, Labeling, SpaceSpec,
};

#[derive(Parser)]
#[command(name = "hypershuffle", version, about = "Sample and verify directed hypergraphs with fixed degrees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run independent chains and write their final states.
    Sample(SampleArgs),
    /// Count or list every hypergraph in a space.
    Enumerate(EnumerateArgs),
    /// Build the exact chain and check regularity, aperiodicity, connectivity
    /// and the stationary distribution.
    ChainVerify(ChainVerifyArgs),
    /// Run one of the built-in reproduction targets.
    Reproduce {
        #[arg(value_parser = parse_target)]
        target: Target,
    },
    /// Check that every hypergraph in a file belongs to a space.
    Check(SpaceArgs),
}

#[derive(Args)]
struct SpaceArgs {
    /// A `.dhg` file.
    #[arg(long)]
    input: PathBuf,
    /// Allowed features as a subset of `sdm`, e.g. "sm" or "".
    #[arg(long, default_value = "sdm")]
    space: String,
    #[arg(long, value_enum, default_value_t = LabelingArg::Stub)]
    labeling: LabelingArg,
}

impl SpaceArgs {
    fn spec(&self) -> Result<SpaceSpec, String> {
        SpaceSpec::parse(&self.space, self.labeling.into()).map_err(|e| e.to_string())
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Steps per chain.
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    /// Number of independent chains.
    #[arg(long, default_value_t = 1)]
    samples: u64,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = AcceptanceArg::OrderedPairCount)]
    acceptance: AcceptanceArg,
    /// Where to write the sampled hypergraphs; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also test the samples for uniformity and write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// A `.dhg` file whose degree sequence defines the space.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "sdm")]
    space: String,
    /// `vertex` counts hypergraphs, `stub` counts stub-labeled states.
    #[arg(long, value_enum, default_value_t = LabelingArg::Vertex)]
    labeling: LabelingArg,
    /// Print every member as a `.dhg` document instead of just the count.
    #[arg(long)]
    list: bool,
    /// Maximum number of stubs.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChainVerifyArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Maximum number of states.
    #[arg(long, default_value_t = hypershuffle::analysis::DEFAULT_STATE_LIMIT)]
    limit: usize,
    #[arg(long, value_enum, default_value_t = AcceptanceArg::OrderedPairCount)]
    acceptance: AcceptanceArg,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the transition matrix as `i j num/den` lines.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Write the total-variation curve from the input state as CSV.
    #[arg(long)]
    tv: Option<PathBuf>,
    /// Length of the total-variation curve.
    #[arg(long, default_value_t = 50)]
    tv_steps: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelingArg {
    Stub,
    Vertex,
}

impl From<LabelingArg> for Labeling {
    fn from(l: LabelingArg) -> Self {
        match l {
            LabelingArg::Stub => Labeling::Stub,
            LabelingArg::Vertex => Labeling::Vertex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AcceptanceArg {
    OrderedPairCount,
    MultiplicityProduct,
    AcceptAll,
}

impl From<AcceptanceArg> for AcceptanceRule {
    fn from(a: AcceptanceArg) -> Self {
        match a {
            AcceptanceArg::OrderedPairCount => AcceptanceRule::OrderedPairCount,
            AcceptanceArg::MultiplicityProduct => AcceptanceRule::MultiplicityProduct,
            AcceptanceArg::AcceptAll => AcceptanceRule::AcceptAll,
        }
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|_| {
        let names: Vec<String> = Target::ALL.iter().map(Target::to_string).collect();
        format!("expected one of {}", names.join(", "))
    })
}

/// How a command ended.
enum Outcome {
    Pass,
    Fail,
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Enumerate(a) => enumerate(a),
        Command::ChainVerify(a) => chain_verify(a),
        Command::Reproduce { target } => run_target(target),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(EXIT_FAIL),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read_input(path: &Path) -> Result<DirectedHypergraph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_dhg(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| e.to_string())
}

fn sample(a: SampleArgs) -> Result<Outcome, String> {
    let h0 = read_input(&a.space.input)?;
    let mut config = ChainConfig::new(a.steps, a.seed, a.space.spec()?);
    config.acceptance = a.acceptance.into();
    let samples = run_replicas(&h0, &config, a.samples).map_err(|e| e.to_string())?;
    let text: Vec<String> = samples.iter().map(serialize_dhg).collect();
    emit(a.out.as_deref(), &text.join("\n"))?;
    let Some(path) = a.report else {
        return Ok(Outcome::Pass);
    };
    let instance = a.space.input.display().to_string();
    let report = report_from_samples(&instance, &h0, &config, &samples).map_err(|e| e.to_string())?;
    emit(Some(&path), &to_json(&report)?)?;
    Ok(match report.verdict {
        Verdict::Pass => Outcome::Pass,
        Verdict::Fail => Outcome::Fail,
    })
}

fn enumerate(a: EnumerateArgs) -> Result<Outcome, String> {
    let h = read_input(&a.input)?;
    let spec = SpaceSpec::parse(&a.space, a.labeling.into()).map_err(|e| e.to_string())?;
    let d = h.degree_sequence();
    let text = match spec.labeling {
        Labeling::Vertex if a.list => {
            let limit = a.limit.unwrap_or(hypershuffle::enumerate::DEFAULT_VERTEX_STUB_LIMIT);
            let space = enumerate_vertex_space_with_limit(&d, &spec, limit).map_err(|e| e.to_string())?;
            let space = relabel_all(space, &h).map_err(|e| e.to_string())?;
            space.iter().map(serialize_dhg).collect::<Vec<_>>().join("\n")
        }
        Labeling::Vertex => {
            let limit = a.limit.unwrap_or(hypershuffle::enumerate::DEFAULT_VERTEX_STUB_LIMIT);
            let n = enumerate_vertex_space_with_limit(&d, &spec, limit).map_err(|e| e.to_string())?.len();
            format!("{n}\n")
        }
        Labeling::Stub => {
            let limit = a.limit.unwrap_or(hypershuffle::enumerate::DEFAULT_STUB_STUB_LIMIT);
            let (layout, states) = enumerate_stub_space_with_limit(&d, &spec, limit).map_err(|e| e.to_string())?;
            if a.list {
                states
                    .iter()
                    .map(|s| {
                        let arcs: Vec<String> = s
                            .arcs
                            .iter()
                            .map(|arc| {
                                let v = layout.project_arc(arc);
                                let side = |stubs: &hypershuffle::Multiset<u32>, owners: &hypershuffle::Multiset| {
                                    stubs
                                        .iter()
                                        .zip(owners.iter())
                                        .map(|(s, o)| format!("{}#{s}", h.label(o)))
                                        .collect::<Vec<_>>()
                                        .join(" ")
                                };
                                format!("arc {} -> {}", side(&arc.tail, &v.tail), side(&arc.head, &v.head))
                            })
                            .collect();
                        arcs.join("\n") + "\n"
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            } else {
                format!("{}\n", states.len())
            }
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct ChainVerifyReport {
    spec: String,
    labeling: Labeling,
    acceptance: AcceptanceRule,
    states: usize,
    classes: usize,
    regular: bool,
    doubly_stochastic: bool,
    aperiodic: bool,
    strongly_connected: bool,
    components: usize,
    stationary_sup_error: Option<f64>,
    tolerance: f64,
    verdict: &'static str,
}

fn chain_verify(a: ChainVerifyArgs) -> Result<Outcome, String> {
    let h = read_input(&a.space.input)?;
    let spec = a.space.spec()?;
    let opts = ChainOptions {
        state_limit: a.limit,
        acceptance: a.acceptance.into(),
        ..ChainOptions::default()
    };
    let g = build_chain_graph_with(&h.degree_sequence(), &spec, &opts).map_err(|e| e.to_string())?;
    let (connected, comps) = check_strongly_connected(&g);
    let sup = stationary_distribution(&g)
        .map_err(|e| e.to_string())?
        .unique()
        .map(sup_error_from_uniform);
    let regular = check_regular(&g).0;
    let doubly = check_doubly_stochastic(&g).0;
    let aperiodic = check_aperiodic(&g);
    let pass = regular && doubly && aperiodic && connected && sup.is_some_and(|e| e < UNIFORM_TOLERANCE);
    let report = ChainVerifyReport {
        spec: spec.letters(),
        labeling: spec.labeling,
        acceptance: opts.acceptance,
        states: g.n_states(),
        classes: g.classes.len(),
        regular,
        doubly_stochastic: doubly,
        aperiodic,
        strongly_connected: connected,
        components: comps.len(),
        stationary_sup_error: sup,
        tolerance: UNIFORM_TOLERANCE,
        verdict: if pass { "pass" } else { "fail" },
    };
    emit(a.out.as_deref(), &to_json(&report)?)?;
    if let Some(p) = &a.edges {
        emit(Some(p), &edge_list(&g))?;
    }
    if let Some(p) = &a.tv {
        let start = match spec.labeling {
            Labeling::Vertex => g.class_index(&h),
            Labeling::Stub => g.class_index(&h).and_then(|c| g.class_of.iter().position(|&k| k == c)),
        };
        let start = start.ok_or("the input is not in the space")?;
        emit(Some(p), &tv_csv(&tv_curve(&g, start, a.tv_steps)))?;
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn run_target(target: Target) -> Result<Outcome, String> {
    let report = reproduce::run(target).map_err(|e| e.to_string())?;
    let mut out = String::new();
    for line in &report.lines {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(&format!("{target}: {}\n", if report.pass { "pass" } else { "fail" }));
    emit(None, &out)?;
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

fn check(a: SpaceArgs) -> Result<Outcome, String> {
    let text = fs::read_to_string(&a.input).map_err(|e| format!("{}: {e}", a.input.display()))?;
    let docs = parse_dhg_documents(&text).map_err(|e| format!("{}: {e}", a.input.display()))?;
    if docs.is_empty() {
        return Err(format!("{}: no hypergraphs", a.input.display()));
    }
    let spec = a.spec()?;
    let reference = docs[0].degree_sequence();
    let mut out = String::new();
    let mut pass = true;
    for (i, h) in docs.iter().enumerate() {
        let features = h.classify_features_with(spec.self_loop_rule);
        let mut problems = Vec::new();
        if !h.degree_sequence().matches(&reference) {
            problems.push("degree sequence differs from the first hypergraph".to_string());
        }
        if !spec.allow_self_loops && features.has_self_loop() {
            problems.push(format!("self-loops at arcs {:?}", flagged(&features.self_loops)));
        }
        if !spec.allow_degenerate && features.has_degenerate() {
            problems.push(format!("degenerate arcs {:?}", flagged(&features.degenerate)));
        }
        if !spec.allow_multi && features.has_multi() {
            problems.push(format!("multi-arc groups {:?}", features.multi_groups));
        }
        if problems.is_empty() {
            out.push_str(&format!("{i}: ok\n"));
        } else {
            pass = false;
            out.push_str(&format!("{i}: {}\n", problems.join("; ")));
        }
    }
    emit(None, &out)?;
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

fn flagged(flags: &[bool]) -> Vec<usize> {
    flags.iter().enumerate().filter(|(_, &f)| f).map(|(i, _)| i).collect()
}
