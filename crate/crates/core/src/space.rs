//! Hypergraph spaces: which features are allowed and how states are labeled.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{DegreeSequence, DirectedHypergraph, FeatureReport, Hyperarc, SelfLoopRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Labeling {
    #[default]
    Stub,
    Vertex,
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Labeling::Stub => "stub",
            Labeling::Vertex => "vertex",
        })
    }
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stub" => Ok(Labeling::Stub),
            "vertex" | "vert" => Ok(Labeling::Vertex),
            other => Err(Error::InvalidSpace(format!("unknown labeling `{other}`"))),
        }
    }
}

/// One of the sixteen spaces: a subset of {self-loops, degenerate arcs,
/// multi-arcs} that are allowed, plus a labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub allow_self_loops: bool,
    pub allow_degenerate: bool,
    pub allow_multi: bool,
    pub labeling: Labeling,
    #[serde(default)]
    pub self_loop_rule: SelfLoopRule,
}

impl SpaceSpec {
    pub fn new(allow_self_loops: bool, allow_degenerate: bool, allow_multi: bool, labeling: Labeling) -> Self {
        SpaceSpec {
            allow_self_loops,
            allow_degenerate,
            allow_multi,
            labeling,
            self_loop_rule: SelfLoopRule::Equal,
        }
    }

    /// Parses a feature subset written as letters, e.g. `"sdm"`, `"sm"`, `""`.
    /// Braces and commas are tolerated, so `"{s,m}"` also works.
    pub fn parse(features: &str, labeling: Labeling) -> Result<Self> {
        let (mut s, mut d, mut m) = (false, false, false);
        for c in features.chars() {
            match c {
                's' if !s => s = true,
                'd' if !d => d = true,
                'm' if !m => m = true,
                '{' | '}' | ',' | ' ' => {}
                _ => return Err(Error::InvalidSpace(features.to_string())),
            }
        }
        Ok(SpaceSpec::new(s, d, m, labeling))
    }

    pub fn unrestricted(labeling: Labeling) -> Self {
        SpaceSpec::new(true, true, true, labeling)
    }

    pub fn with_labeling(self, labeling: Labeling) -> Self {
        SpaceSpec { labeling, ..self }
    }

    pub fn with_self_loop_rule(self, rule: SelfLoopRule) -> Self {
        SpaceSpec {
            self_loop_rule: rule,
            ..self
        }
    }

    /// All eight feature subsets for one labeling, in the order
    /// `{}, d, m, dm, s, sd, sm, sdm`.
    pub fn all(labeling: Labeling) -> Vec<SpaceSpec> {
        (0..8u8)
            .map(|bits| SpaceSpec::new(bits & 4 != 0, bits & 1 != 0, bits & 2 != 0, labeling))
            .collect()
    }

    /// The allowed features as letters, e.g. `"sm"`.
    pub fn letters(&self) -> String {
        let mut out = String::new();
        if self.allow_self_loops {
            out.push('s');
        }
        if self.allow_degenerate {
            out.push('d');
        }
        if self.allow_multi {
            out.push('m');
        }
        out
    }

    /// True when every feature allowed here is also allowed by `other`.
    pub fn is_subset_of(&self, other: &SpaceSpec) -> bool {
        (!self.allow_self_loops || other.allow_self_loops)
            && (!self.allow_degenerate || other.allow_degenerate)
            && (!self.allow_multi || other.allow_multi)
    }

    pub fn permits(&self, report: &FeatureReport) -> bool {
        (self.allow_self_loops || !report.has_self_loop())
            && (self.allow_degenerate || !report.has_degenerate())
            && (self.allow_multi || !report.has_multi())
    }

    /// Checks a single arc for self-loop and degeneracy (multi-arcs need context).
    pub fn permits_arc(&self, arc: &Hyperarc) -> bool {
        (self.allow_self_loops || !arc.is_self_loop(self.self_loop_rule))
            && (self.allow_degenerate || !arc.is_degenerate())
    }

    /// True when `h` has no forbidden feature.
    pub fn permits_hypergraph(&self, h: &DirectedHypergraph) -> bool {
        if !self.allow_self_loops && h.arcs().iter().any(|a| a.is_self_loop(self.self_loop_rule)) {
            return false;
        }
        if !self.allow_degenerate && h.arcs().iter().any(Hyperarc::is_degenerate) {
            return false;
        }
        if !self.allow_multi {
            let mut arcs: Vec<&Hyperarc> = h.arcs().iter().collect();
            arcs.sort();
            if arcs.windows(2).any(|w| w[0] == w[1]) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: Vec<String> = self.letters().chars().map(String::from).collect();
        write!(f, "H^{}_{{{}}}", self.labeling, letters.join(","))
    }
}

/// Membership test: `h` has degree sequence `d` and none of the forbidden features.
pub fn in_space(h: &DirectedHypergraph, spec: &SpaceSpec, d: &DegreeSequence) -> bool {
    h.degree_sequence().matches(d) && spec.permits_hypergraph(h)
}
