//! Plain-text weighted edge lists.
//!
//! ```text
//! # comment
//! n 4
//! seed 2024
//! 0 2 0.0982
//! 1 0 0.0908
//! ```
//!
//! `n` is required and comes before any arc. `seed` is informational. Each
//! arc line is `from to weight`: `to` is influenced by `from`, i.e. the entry
//! `w[to][from]`. Weights are written in shortest round-trip form.

use std::fmt::Write as _;
use std::path::Path;

use migrasim_core::SocialGraph;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: SocialGraph,
    pub seed: Option<u64>,
}

pub fn format_edge_list(graph: &SocialGraph, seed: Option<u64>) -> String {
    let mut out = String::from("# from to weight\n");
    let _ = writeln!(out, "n {}", graph.order());
    if let Some(seed) = seed {
        let _ = writeln!(out, "seed {seed}");
    }
    let mut arcs: Vec<(usize, usize, f64)> = graph.arcs().collect();
    arcs.sort_by_key(|&(from, to, _)| (from, to));
    for (from, to, w) in arcs {
        let _ = writeln!(out, "{from} {to} {w}");
    }
    out
}

pub fn parse_edge_list(text: &str, origin: &Path) -> Result<EdgeList> {
    let err = |line: usize, message: String| Error::EdgeList {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut n: Option<usize> = None;
    let mut seed = None;
    let mut arcs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["n", value] => {
                if n.is_some() {
                    return Err(err(line_no, "duplicate `n` header".into()));
                }
                n = Some(value.parse().map_err(|_| err(line_no, format!("bad vertex count `{value}`")))?);
            }
            ["seed", value] => {
                seed = Some(value.parse().map_err(|_| err(line_no, format!("bad seed `{value}`")))?);
            }
            [from, to, weight] => {
                let Some(order) = n else {
                    return Err(err(line_no, "arc before the `n` header".into()));
                };
                let from: usize = from.parse().map_err(|_| err(line_no, format!("bad vertex `{from}`")))?;
                let to: usize = to.parse().map_err(|_| err(line_no, format!("bad vertex `{to}`")))?;
                let weight: f64 = weight.parse().map_err(|_| err(line_no, format!("bad weight `{weight}`")))?;
                if from >= order || to >= order {
                    return Err(err(line_no, format!("vertex out of range 0..{order}")));
                }
                if !seen.insert((from, to)) {
                    return Err(err(line_no, format!("duplicate arc {from} -> {to}")));
                }
                arcs.push((from, to, weight));
            }
            _ => return Err(err(line_no, format!("expected `from to weight`, got `{line}`"))),
        }
    }
    let n = n.ok_or_else(|| err(0, "missing `n` header".into()))?;
    let graph = SocialGraph::from_arcs(n, arcs).map_err(|e| err(0, e.to_string()))?;
    Ok(EdgeList { graph, seed })
}

pub fn load_edge_list(path: &Path) -> Result<EdgeList> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

pub fn write_edge_list(path: &Path, graph: &SocialGraph, seed: Option<u64>) -> Result<()> {
    std::fs::write(path, format_edge_list(graph, seed)).map_err(|e| Error::io(path, e))
}
