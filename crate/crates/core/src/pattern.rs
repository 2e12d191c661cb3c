//! Tree patterns and their two-coloring degree parameter.
//!
//! A tree has exactly one proper 2-coloring up to swapping colors. For each
//! color class take the maximum degree over its vertices; the pattern's
//! `delta` is the smaller of those two maxima, and `heavy_color` is a class
//! attaining it. Swapping colors leaves `delta` unchanged, so the parameter
//! is well defined.
//!
//! Examples: a star `K_{1,s}` has delta 1 (the leaf class), a path on four
//! or more vertices has delta 2, and the double star with two adjacent
//! degree-s centers has delta s.

use std::collections::BinaryHeap;
use std::cmp::Reverse;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern is not a tree: {reason}")]
    NotATree { reason: String },
    #[error("pattern must have at least 2 vertices")]
    TooSmall,
    #[error("{kind:?} requires size at least {min}, got {size}")]
    SizeTooSmall { kind: PatternKind, size: usize, min: usize },
}

/// A tree pattern together with its proper 2-coloring rooted at vertex 0
/// (vertex 0 gets color 0) and the derived degree parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePattern {
    tree: Graph,
    k: usize,
    coloring: Vec<u8>,
    delta: usize,
    heavy_color: u8,
}

impl TreePattern {
    pub fn tree(&self) -> &Graph {
        &self.tree
    }

    /// Number of vertices.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coloring(&self) -> &[u8] {
        &self.coloring
    }

    pub fn color(&self, v: usize) -> u8 {
        self.coloring[v]
    }

    /// The two-coloring degree parameter.
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// The color class whose maximum degree equals `delta`; ties break
    /// toward the color of vertex 0.
    pub fn heavy_color(&self) -> u8 {
        self.heavy_color
    }

    pub fn color_class(&self, color: u8) -> VertexSet {
        VertexSet::from_iter(
            self.coloring
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c == color)
                .map(|(v, _)| v),
        )
    }

    /// Maximum degree within one color class.
    pub fn class_max_degree(&self, color: u8) -> usize {
        (0..self.k)
            .filter(|&v| self.coloring[v] == color)
            .map(|v| self.tree.degree(v))
            .max()
            .unwrap_or(0)
    }
}

/// Checks that `g` is a tree and computes the coloring and parameter.
///
/// The coloring is breadth-first from vertex 0. Single-vertex input is
/// rejected: the parameter needs both color classes inhabited.
pub fn make_pattern(g: Graph) -> Result<TreePattern, PatternError> {
    let k = g.n();
    if k < 2 {
        return Err(PatternError::TooSmall);
    }
    if g.m() != k - 1 {
        return Err(PatternError::NotATree {
            reason: format!("{} edges, a tree on {} vertices has {}", g.m(), k, k - 1),
        });
    }
    // k−1 edges and connected means acyclic.
    let mut coloring = vec![u8::MAX; k];
    let mut stack = vec![0usize];
    coloring[0] = 0;
    let mut visited = 1usize;
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if coloring[v] == u8::MAX {
                coloring[v] = 1 - coloring[u];
                visited += 1;
                stack.push(v);
            }
        }
    }
    if visited != k {
        return Err(PatternError::NotATree { reason: "disconnected".into() });
    }
    let max_deg = |color: u8| {
        (0..k)
            .filter(|&v| coloring[v] == color)
            .map(|v| g.degree(v))
            .max()
            .unwrap_or(0)
    };
    let m0 = max_deg(0);
    let m1 = max_deg(1);
    let (delta, heavy_color) = if m0 <= m1 { (m0, 0) } else { (m1, 1) };
    debug_assert!(delta >= 1 && delta < k);
    Ok(TreePattern { tree: g, k, coloring, delta, heavy_color })
}

/// The two-coloring degree parameter of a pattern.
pub fn delta_parameter(t: &TreePattern) -> usize {
    t.delta()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// `K_{1,s}`: one center with `s` leaves, `s + 1` vertices.
    Star,
    /// Path on `s` vertices.
    Path,
    /// Two adjacent centers, each with `s − 1` leaves; `2s` vertices and
    /// delta exactly `s`.
    DoubleStar,
    /// A path spine with the remaining vertices attached as seeded random
    /// legs; `s` vertices total.
    Caterpillar,
    /// Uniform random labeled tree on `s` vertices via a seeded random
    /// Prüfer sequence.
    Random,
}

impl PatternKind {
    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Star => "star",
            PatternKind::Path => "path",
            PatternKind::DoubleStar => "double_star",
            PatternKind::Caterpillar => "caterpillar",
            PatternKind::Random => "random",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "star" => Some(PatternKind::Star),
            "path" => Some(PatternKind::Path),
            "double_star" => Some(PatternKind::DoubleStar),
            "caterpillar" => Some(PatternKind::Caterpillar),
            "random" => Some(PatternKind::Random),
            _ => None,
        }
    }
}

/// Generates a pattern from a named family. Output depends only on
/// `(kind, size, seed)`; the seed matters only for `Caterpillar` and
/// `Random`.
pub fn generate_pattern(
    kind: PatternKind,
    size: usize,
    seed: u64,
) -> Result<TreePattern, PatternError> {
    let too_small = |min: usize| PatternError::SizeTooSmall { kind, size, min };
    let graph = match kind {
        PatternKind::Star => {
            if size < 1 {
                return Err(too_small(1));
            }
            let edges: Vec<_> = (1..=size).map(|i| (0, i)).collect();
            Graph::new(size + 1, &edges).unwrap()
        }
        PatternKind::Path => {
            if size < 2 {
                return Err(too_small(2));
            }
            let edges: Vec<_> = (0..size - 1).map(|i| (i, i + 1)).collect();
            Graph::new(size, &edges).unwrap()
        }
        PatternKind::DoubleStar => {
            if size < 2 {
                return Err(too_small(2));
            }
            // Centers 0 and 1; leaves 2..=size on center 0, the rest on 1.
            let mut edges = vec![(0usize, 1usize)];
            for i in 2..=size {
                edges.push((0, i));
            }
            for i in size + 1..2 * size {
                edges.push((1, i));
            }
            Graph::new(2 * size, &edges).unwrap()
        }
        PatternKind::Caterpillar => {
            if size < 2 {
                return Err(too_small(2));
            }
            let spine = size.div_ceil(2);
            let mut edges: Vec<_> = (0..spine - 1).map(|i| (i, i + 1)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for leaf in spine..size {
                let attach = rng.random_range(0..spine);
                edges.push((attach, leaf));
            }
            Graph::new(size, &edges).unwrap()
        }
        PatternKind::Random => {
            if size < 2 {
                return Err(too_small(2));
            }
            random_tree(size, seed)
        }
    };
    make_pattern(graph)
}

/// Uniform random labeled tree: draw a Prüfer sequence and decode it.
fn random_tree(n: usize, seed: u64) -> Graph {
    if n == 2 {
        return Graph::new(2, &[(0, 1)]).unwrap();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    prufer_decode(n, &seq)
}

/// Decodes a Prüfer sequence into its labeled tree.
pub fn prufer_decode(n: usize, seq: &[usize]) -> Graph {
    assert!(n >= 2 && seq.len() == n - 2);
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let Reverse(leaf) = leaves.pop().expect("a leaf always remains");
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    Graph::new(n, &edges).expect("Prüfer decoding yields a tree")
}
