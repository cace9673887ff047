//! The `.dhg` text format.
//!
//! ```text
//! # comment
//! vertices u v x
//! arc u u -> x
//! arc v -> u x
//! ```
//!
//! One `vertices` line declares the labels; each `arc` line declares one
//! hyperarc, with repeated tokens giving multiplicity. Serialization writes the
//! canonical arc order, so `serialize(parse(s))` is stable.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hypergraph::{DirectedHypergraph, Hyperarc};
use crate::multiset::{Multiset, VertexId};

/// Whitespace-separated tokens with 1-based columns, comment stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &body[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (body[..byte].chars().count() + 1, tok))
        .collect()
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses a single `.dhg` document.
pub fn parse_dhg(text: &str) -> Result<DirectedHypergraph> {
    let mut docs = parse_documents(text)?;
    match docs.len() {
        1 => Ok(docs.pop().unwrap()),
        0 => Err(syntax(1, 1, "missing `vertices` declaration")),
        _ => Err(syntax(1, 1, "expected one document, found several `vertices` declarations")),
    }
}

/// Parses a stream of documents, each starting at its own `vertices` line.
pub fn parse_dhg_documents(text: &str) -> Result<Vec<DirectedHypergraph>> {
    parse_documents(text)
}

struct Pending {
    labels: Vec<String>,
    index: HashMap<String, u32>,
    arcs: Vec<Hyperarc>,
}

impl Pending {
    fn finish(self) -> Result<DirectedHypergraph> {
        DirectedHypergraph::new(self.labels, self.arcs)
    }
}

fn parse_documents(text: &str) -> Result<Vec<DirectedHypergraph>> {
    let mut docs = Vec::new();
    let mut current: Option<Pending> = None;
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = tokens(line);
        let Some(&(col, keyword)) = toks.first() else {
            continue;
        };
        match keyword {
            "vertices" => {
                if let Some(p) = current.take() {
                    docs.push(p.finish()?);
                }
                let mut labels = Vec::new();
                let mut index = HashMap::new();
                for &(c, name) in &toks[1..] {
                    if name == "->" {
                        return Err(syntax(lineno, c, "`->` is not a valid vertex name"));
                    }
                    if index.insert(name.to_string(), labels.len() as u32).is_some() {
                        return Err(syntax(lineno, c, format!("duplicate vertex `{name}`")));
                    }
                    labels.push(name.to_string());
                }
                current = Some(Pending {
                    labels,
                    index,
                    arcs: Vec::new(),
                });
            }
            "arc" => {
                let Some(p) = current.as_mut() else {
                    return Err(syntax(lineno, col, "`arc` before `vertices` declaration"));
                };
                let arrows: Vec<usize> = toks
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, t))| *t == "->")
                    .map(|(i, _)| i)
                    .collect();
                let split = match arrows.as_slice() {
                    [i] => *i,
                    [] => return Err(syntax(lineno, col, "expected `->` between tail and head")),
                    [_, second, ..] => {
                        return Err(syntax(lineno, toks[*second].0, "more than one `->`"));
                    }
                };
                let resolve = |part: &[(usize, &str)]| -> Result<Multiset> {
                    part.iter()
                        .map(|&(c, name)| {
                            p.index.get(name).map(|&v| VertexId(v)).ok_or_else(|| Error::UnknownVertex {
                                line: lineno,
                                column: c,
                                name: name.to_string(),
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(Multiset::from_vec)
                };
                let tail = resolve(&toks[1..split])?;
                let head = resolve(&toks[split + 1..])?;
                let arc_index = p.arcs.len();
                if tail.is_empty() {
                    return Err(Error::EmptySide { arc: arc_index, side: "tail" });
                }
                if head.is_empty() {
                    return Err(Error::EmptySide { arc: arc_index, side: "head" });
                }
                p.arcs.push(Hyperarc { tail, head });
            }
            other => {
                return Err(syntax(lineno, col, format!("unknown keyword `{other}`")));
            }
        }
    }
    if let Some(p) = current.take() {
        docs.push(p.finish()?);
    }
    Ok(docs)
}

/// Writes `h` with arcs in canonical order and each side's tokens sorted by
/// vertex id.
pub fn serialize_dhg(h: &DirectedHypergraph) -> String {
    let mut out = String::from("vertices");
    for l in h.labels() {
        out.push(' ');
        out.push_str(l);
    }
    out.push('\n');
    let canon = h.canonicalize();
    for arc in canon.arcs() {
        out.push_str("arc");
        for v in arc.tail.iter() {
            out.push(' ');
            out.push_str(h.label(v));
        }
        out.push_str(" ->");
        for v in arc.head.iter() {
            out.push(' ');
            out.push_str(h.label(v));
        }
        out.push('\n');
    }
    out
}
