//! Simple undirected graphs with 0-based contiguous vertex ids, plus the
//! plain-text exchange format and bipartition helpers used throughout the
//! crate.
//!
//! The text format is line oriented and ASCII:
//!
//! ```text
//! c optional comment
//! p graph <n> <m>
//! e <u> <v>
//! ```
//!
//! Parsing is strict: self-loops and duplicate edges are errors, every
//! endpoint must be in `0..n`, and the declared edge count must match.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A sorted, duplicate-free set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet {
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new() -> Self {
        VertexSet { members: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn insert(&mut self, v: usize) {
        if let Err(pos) = self.members.binary_search(&v) {
            self.members.insert(pos, v);
        }
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }
}

/// Collects arbitrary ids, sorting and deduplicating.
impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut members: Vec<usize> = iter.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.members {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("self-loop at vertex {v}")]
    SelfLoop { v: usize },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
}

/// Errors from the line-oriented text formats (graphs and hypergraphs).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("missing problem line")]
    MissingHeader,
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
    #[error("declared {declared} entries but found {found}")]
    CountMismatch { declared: usize, found: usize },
}

impl ParseError {
    pub(crate) fn at(line: usize, msg: impl Into<String>) -> Self {
        ParseError::Line { line: line + 1, msg: msg.into() }
    }
}

/// An undirected graph on vertices `0..n` without self-loops or parallel
/// edges. Adjacency lives in one flat array indexed by per-vertex
/// offsets, each vertex's slice sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj_off: Vec<usize>,
    adj_dat: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list. Each edge is normalized to
    /// `(min, max)`; the edge list ends up sorted lexicographically.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n {
                return Err(GraphError::VertexOutOfRange { v: a, n });
            }
            if b >= n {
                return Err(GraphError::VertexOutOfRange { v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop { v: a });
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(pair) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge { u: pair[0].0, v: pair[0].1 });
        }
        let mut adj_off = vec![0usize; n + 1];
        for &(u, v) in &norm {
            adj_off[u + 1] += 1;
            adj_off[v + 1] += 1;
        }
        for i in 0..n {
            adj_off[i + 1] += adj_off[i];
        }
        let mut cursor = adj_off.clone();
        let mut adj_dat = vec![0usize; 2 * norm.len()];
        // Scanning the sorted edge list fills every vertex's slice in
        // ascending order: first the smaller endpoints of its edges,
        // then the larger ones.
        for &(u, v) in &norm {
            adj_dat[cursor[u]] = v;
            cursor[u] += 1;
            adj_dat[cursor[v]] = u;
            cursor[v] += 1;
        }
        Ok(Graph { n, edges: norm, adj_off, adj_dat })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj_dat[self.adj_off[v]..self.adj_off[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj_off[v + 1] - self.adj_off[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Parses the `p graph` text format.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut seen = BTreeSet::new();
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
                    if tok.next() != Some("graph") {
                        return Err(ParseError::at(lineno, "expected `p graph <n> <m>`"));
                    }
                    let n = parse_usize(&mut tok, lineno, "n")?;
                    let m = parse_usize(&mut tok, lineno, "m")?;
                    expect_end(&mut tok, lineno)?;
                    header = Some((n, m));
                }
                Some("e") => {
                    let (n, _) = header
                        .ok_or_else(|| ParseError::at(lineno, "edge before problem line"))?;
                    let u = parse_usize(&mut tok, lineno, "u")?;
                    let v = parse_usize(&mut tok, lineno, "v")?;
                    expect_end(&mut tok, lineno)?;
                    let check = |x: usize| {
                        if x >= n {
                            Err(ParseError::Graph {
                                line: lineno + 1,
                                source: GraphError::VertexOutOfRange { v: x, n },
                            })
                        } else {
                            Ok(())
                        }
                    };
                    check(u)?;
                    check(v)?;
                    if u == v {
                        return Err(ParseError::Graph {
                            line: lineno + 1,
                            source: GraphError::SelfLoop { v },
                        });
                    }
                    let e = (u.min(v), u.max(v));
                    if !seen.insert(e) {
                        return Err(ParseError::Graph {
                            line: lineno + 1,
                            source: GraphError::DuplicateEdge { u: e.0, v: e.1 },
                        });
                    }
                    edges.push(e);
                }
                Some(other) => {
                    return Err(ParseError::at(lineno, format!("unknown line kind `{other}`")));
                }
                None => unreachable!(),
            }
        }
        let (n, m) = header.ok_or(ParseError::MissingHeader)?;
        if edges.len() != m {
            return Err(ParseError::CountMismatch { declared: m, found: edges.len() });
        }
        Graph::new(n, &edges).map_err(|source| ParseError::Graph { line: 0, source })
    }

    /// Renders the graph in the same text format. `parse(render(g)) == g`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("p graph {} {}\n", self.n, self.edges.len()));
        for &(u, v) in &self.edges {
            out.push_str(&format!("e {u} {v}\n"));
        }
        out
    }

    /// Induced subgraph after deleting `remove`, with vertices renumbered
    /// contiguously. Returns the subgraph and the map from new ids back to
    /// original ids.
    pub fn delete_vertices(&self, remove: &VertexSet) -> (Graph, Vec<usize>) {
        let mut old_ids = Vec::with_capacity(self.n.saturating_sub(remove.len()));
        let mut new_id = vec![usize::MAX; self.n];
        for (v, slot) in new_id.iter_mut().enumerate() {
            if !remove.contains(v) {
                *slot = old_ids.len();
                old_ids.push(v);
            }
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if new_id[u] != usize::MAX && new_id[v] != usize::MAX {
                edges.push((new_id[u], new_id[v]));
            }
        }
        let g = Graph::new(old_ids.len(), &edges).expect("induced subgraph is valid");
        (g, old_ids)
    }
}

/// A two-sided partition of a graph's vertices; `side[v]` is 0 or 1 and
/// every edge crosses sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    side: Vec<u8>,
}

impl Bipartition {
    /// Wraps an explicit side assignment after checking that every edge
    /// crosses sides.
    pub fn from_sides(g: &Graph, side: Vec<u8>) -> Result<Self, NotBipartite> {
        assert_eq!(side.len(), g.n(), "side vector length must equal n");
        for &(u, v) in g.edges() {
            if side[u] == side[v] {
                return Err(NotBipartite { odd_cycle: vec![u, v] });
            }
        }
        Ok(Bipartition { side })
    }

    pub fn side(&self, v: usize) -> u8 {
        self.side[v]
    }

    pub fn sides(&self) -> &[u8] {
        &self.side
    }

    pub fn side_vertices(&self, side: u8) -> VertexSet {
        VertexSet::from_iter(
            self.side
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s == side)
                .map(|(v, _)| v),
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph is not bipartite; odd cycle: {odd_cycle:?}")]
pub struct NotBipartite {
    /// A closed walk of odd length witnessing non-bipartiteness, listed as a
    /// vertex sequence with the smallest vertex first.
    pub odd_cycle: Vec<usize>,
}

/// Two-colors `g` by breadth-first search, or returns an odd cycle.
///
/// The assignment is canonical: components are scanned in order of their
/// smallest vertex id, and that vertex gets side 0.
pub fn bipartition(g: &Graph) -> Result<Bipartition, NotBipartite> {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for root in 0..n {
        if side[root] != u8::MAX {
            continue;
        }
        side[root] = 0;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if side[v] == u8::MAX {
                    side[v] = 1 - side[u];
                    parent[v] = u;
                    queue.push_back(v);
                } else if side[v] == side[u] {
                    return Err(NotBipartite { odd_cycle: odd_cycle_through(&parent, u, v) });
                }
            }
        }
    }
    Ok(Bipartition { side })
}

/// Extracts an odd cycle from the BFS forest given a same-side edge `(u, v)`.
fn odd_cycle_through(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let path_to_root = |mut x: usize| {
        let mut path = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            path.push(x);
        }
        path
    };
    let pu = path_to_root(u);
    let pv = path_to_root(v);
    // Find the lowest common ancestor by trimming the shared suffix.
    let mut i = pu.len();
    let mut j = pv.len();
    while i > 0 && j > 0 && pu[i - 1] == pv[j - 1] {
        i -= 1;
        j -= 1;
    }
    // pu[..=i] is u..lca, pv[..j] is v..(below lca).
    let mut cycle: Vec<usize> = pu[..=i].to_vec();
    cycle.extend(pv[..j].iter().rev());
    debug_assert!(cycle.len() % 2 == 1, "cycle must be odd");
    canonicalize_cycle(cycle)
}

/// Rotates the cycle so the smallest vertex comes first and the smaller of
/// its two neighbors comes second.
fn canonicalize_cycle(cycle: Vec<usize>) -> Vec<usize> {
    let len = cycle.len();
    let start = (0..len).min_by_key(|&i| cycle[i]).unwrap();
    let next = cycle[(start + 1) % len];
    let prev = cycle[(start + len - 1) % len];
    let mut out = Vec::with_capacity(len);
    if next <= prev {
        for i in 0..len {
            out.push(cycle[(start + i) % len]);
        }
    } else {
        for i in 0..len {
            out.push(cycle[(start + len - i) % len]);
        }
    }
    out
}

/// Maximum degree over the vertices of one side of a bipartition. Returns 0
/// for an empty side.
pub fn side_max_degree(g: &Graph, b: &Bipartition, side: u8) -> usize {
    (0..g.n())
        .filter(|&v| b.side(v) == side)
        .map(|v| g.degree(v))
        .max()
        .unwrap_or(0)
}

pub(crate) fn parse_usize<'a, I: Iterator<Item = &'a str>>(
    tok: &mut I,
    lineno: usize,
    what: &str,
) -> Result<usize, ParseError> {
    let s = tok
        .next()
        .ok_or_else(|| ParseError::at(lineno, format!("missing field `{what}`")))?;
    s.parse()
        .map_err(|_| ParseError::at(lineno, format!("bad integer `{s}` for `{what}`")))
}

pub(crate) fn expect_end<'a, I: Iterator<Item = &'a str>>(
    tok: &mut I,
    lineno: usize,
) -> Result<(), ParseError> {
    match tok.next() {
        None => Ok(()),
        Some(extra) => Err(ParseError::at(lineno, format!("trailing token `{extra}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges).unwrap()
    }

    #[test]
    fn parse_simple() {
        let g = Graph::parse("c comment\np graph 3 2\ne 0 1\ne 1 2\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn parse_rejects_duplicate_edge() {
        let err = Graph::parse("p graph 3 2\ne 0 1\ne 1 0\n").unwrap_err();
        match err {
            ParseError::Graph { line, source } => {
                assert_eq!(line, 3);
                assert_eq!(source, GraphError::DuplicateEdge { u: 0, v: 1 });
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_self_loop_and_range() {
        assert!(matches!(
            Graph::parse("p graph 2 1\ne 1 1\n"),
            Err(ParseError::Graph { source: GraphError::SelfLoop { v: 1 }, .. })
        ));
        assert!(matches!(
            Graph::parse("p graph 2 1\ne 0 2\n"),
            Err(ParseError::Graph { source: GraphError::VertexOutOfRange { v: 2, n: 2 }, .. })
        ));
    }

    #[test]
    fn parse_rejects_count_mismatch() {
        assert_eq!(
            Graph::parse("p graph 3 1\ne 0 1\ne 1 2\n"),
            Err(ParseError::CountMismatch { declared: 1, found: 2 })
        );
    }

    #[test]
    fn render_round_trip() {
        let g = Graph::new(5, &[(4, 0), (1, 0), (2, 3)]).unwrap();
        let again = Graph::parse(&g.render()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn bipartition_canonical_sides() {
        // Two components; each smallest vertex lands on side 0.
        let g = Graph::new(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let b = bipartition(&g).unwrap();
        assert_eq!(b.sides(), &[0, 1, 0, 0, 1]);
    }

    #[test]
    fn bipartition_triangle_cycle() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let err = bipartition(&g).unwrap_err();
        assert_eq!(err.odd_cycle, vec![0, 1, 2]);
    }

    #[test]
    fn bipartition_odd_cycle_is_a_cycle() {
        // C5 plus a chord making it non-bipartite in a less trivial way.
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (2, 5)]).unwrap();
        let err = bipartition(&g).unwrap_err();
        let cyc = &err.odd_cycle;
        assert_eq!(cyc.len() % 2, 1);
        for i in 0..cyc.len() {
            assert!(g.has_edge(cyc[i], cyc[(i + 1) % cyc.len()]));
        }
    }

    #[test]
    fn side_max_degree_star() {
        // Star K_{1,4}: center 0 on side 0.
        let g = Graph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let b = bipartition(&g).unwrap();
        assert_eq!(side_max_degree(&g, &b, 0), 4);
        assert_eq!(side_max_degree(&g, &b, 1), 1);
    }

    #[test]
    fn side_max_degree_empty_side() {
        let g = Graph::new(2, &[]).unwrap();
        let b = bipartition(&g).unwrap();
        assert_eq!(side_max_degree(&g, &b, 1), 0);
    }

    #[test]
    fn bipartition_matches_exhaustive_two_coloring() {
        // Oracle: a graph is bipartite iff some of the 2^n two-colorings is
        // proper. Exhaustive over all graphs on up to 5 vertices.
        for n in 1..=5usize {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            for mask in 0u32..(1 << pairs.len()) {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = Graph::new(n, &edges).unwrap();
                let oracle = (0u32..1 << n).any(|colors| {
                    edges.iter().all(|&(u, v)| (colors >> u & 1) != (colors >> v & 1))
                });
                match bipartition(&g) {
                    Ok(b) => {
                        assert!(oracle);
                        for &(u, v) in g.edges() {
                            assert_ne!(b.side(u), b.side(v));
                        }
                    }
                    Err(e) => {
                        assert!(!oracle);
                        assert_eq!(e.odd_cycle.len() % 2, 1);
                        for i in 0..e.odd_cycle.len() {
                            let a = e.odd_cycle[i];
                            let b = e.odd_cycle[(i + 1) % e.odd_cycle.len()];
                            assert!(g.has_edge(a, b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn delete_vertices_keeps_structure() {
        let g = path(5);
        let (h, old) = g.delete_vertices(&VertexSet::from_iter([2]));
        assert_eq!(h.n(), 4);
        assert_eq!(old, vec![0, 1, 3, 4]);
        assert_eq!(h.edges(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn vertex_set_basics() {
        let s = VertexSet::from_iter([3, 1, 3, 0]);
        assert_eq!(s.as_slice(), &[0, 1, 3]);
        assert!(s.contains(3));
        assert!(!s.contains(2));
        assert_eq!(s.to_string(), "0 1 3");
    }
}
