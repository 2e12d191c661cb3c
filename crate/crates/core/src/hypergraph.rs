//! d-uniform hypergraphs and their text format:
//!
//! ```text
//! c optional comment
//! p hyper <n> <m> <d>
//! h <v1> ... <vd>
//! ```
//!
//! Every hyperedge has exactly `d` distinct vertices and is stored sorted;
//! repeated hyperedges are permitted (the incidence reduction relies on
//! duplicated copies). Hyperedge order is preserved.

use thiserror::Error;

use crate::graph::{expect_end, parse_usize, ParseError};
use crate::graph::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("uniformity must be at least 2, got {d}")]
    UniformityTooSmall { d: usize },
    #[error("hyperedge {index} has {found} vertices, expected {d}")]
    WrongArity { index: usize, found: usize, d: usize },
    #[error("hyperedge {index} repeats vertex {v}")]
    RepeatedVertex { index: usize, v: usize },
    #[error("hyperedge {index}: vertex {v} out of range (n = {n})")]
    VertexOutOfRange { index: usize, v: usize, n: usize },
}

/// A d-uniform hypergraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    d: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph, sorting each hyperedge. Hyperedge order is kept
    /// as given; duplicates are allowed.
    pub fn new(n: usize, d: usize, hyperedges: &[Vec<usize>]) -> Result<Self, HypergraphError> {
        if d < 2 {
            return Err(HypergraphError::UniformityTooSmall { d });
        }
        let mut stored = Vec::with_capacity(hyperedges.len());
        for (index, he) in hyperedges.iter().enumerate() {
            if he.len() != d {
                return Err(HypergraphError::WrongArity { index, found: he.len(), d });
            }
            let mut sorted = he.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(HypergraphError::RepeatedVertex { index, v: w[0] });
                }
            }
            if let Some(&v) = sorted.last() {
                if v >= n {
                    return Err(HypergraphError::VertexOutOfRange { index, v, n });
                }
            }
            stored.push(sorted);
        }
        Ok(Hypergraph { n, d, hyperedges: stored })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.hyperedges.len()
    }

    /// Hyperedges in stored order; each is sorted ascending. The sorted
    /// order is what downstream code uses as the canonical position of a
    /// vertex inside a hyperedge.
    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, index: usize) -> &[usize] {
        &self.hyperedges[index]
    }

    /// True iff every hyperedge contains a vertex of `cover`.
    pub fn is_covered_by(&self, cover: &VertexSet) -> bool {
        self.uncovered_hyperedge(cover).is_none()
    }

    /// Index of the first hyperedge missed by `cover`, if any.
    pub fn uncovered_hyperedge(&self, cover: &VertexSet) -> Option<usize> {
        self.hyperedges
            .iter()
            .position(|he| !he.iter().any(|&v| cover.contains(v)))
    }

    /// Parses the `p hyper` text format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut hyperedges: Vec<Vec<usize>> = Vec::new();
        let mut lines: Vec<usize> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("p") => {
                    if header.is_some() {
                        return Err(ParseError::at(lineno, "repeated problem line"));
                    }
                    if tok.next() != Some("hyper") {
                        return Err(ParseError::at(lineno, "expected `p hyper <n> <m> <d>`"));
                    }
                    let n = parse_usize(&mut tok, lineno, "n")?;
                    let m = parse_usize(&mut tok, lineno, "m")?;
                    let d = parse_usize(&mut tok, lineno, "d")?;
                    expect_end(&mut tok, lineno)?;
                    header = Some((n, m, d));
                }
                Some("h") => {
                    if header.is_none() {
                        return Err(ParseError::at(lineno, "hyperedge before problem line"));
                    }
                    let mut he = Vec::new();
                    for s in tok {
                        let v: usize = s.parse().map_err(|_| {
                            ParseError::at(lineno, format!("bad integer `{s}`"))
                        })?;
                        he.push(v);
                    }
                    hyperedges.push(he);
                    lines.push(lineno);
                }
                Some(other) => {
                    return Err(ParseError::at(lineno, format!("unknown line kind `{other}`")));
                }
                None => unreachable!(),
            }
        }
        let (n, m, d) = header.ok_or(ParseError::MissingHeader)?;
        if hyperedges.len() != m {
            return Err(ParseError::CountMismatch { declared: m, found: hyperedges.len() });
        }
        Hypergraph::new(n, d, &hyperedges).map_err(|e| {
            let line = match e {
                HypergraphError::WrongArity { index, .. }
                | HypergraphError::RepeatedVertex { index, .. }
                | HypergraphError::VertexOutOfRange { index, .. } => lines[index] + 1,
                HypergraphError::UniformityTooSmall { .. } => 0,
            };
            ParseError::Line { line, msg: e.to_string() }
        })
    }

    /// Renders in the same text format. `parse(render(h)) == h`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p hyper {} {} {}\n", self.n, self.m(), self.d));
        for he in &self.hyperedges {
            out.push('h');
            for v in he {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }
}
