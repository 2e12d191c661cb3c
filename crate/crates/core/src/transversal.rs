//! Solvers for minimum T-transversal (delete the fewest host vertices so no
//! copy of the tree pattern remains) and minimum vertex cover of a
//! d-uniform hypergraph.
//!
//! All four solvers are deterministic: copies and hyperedges are always
//! selected in a fixed order and branching follows ascending vertex ids, so
//! identical inputs yield identical solutions. Every solution is re-checked
//! against its instance before being returned.

use crate::detect::detect_bruteforce_in;
use crate::graph::{Graph, VertexSet};
use crate::hypergraph::Hypergraph;
use crate::pattern::TreePattern;

/// Default search-node budget for the exact solvers.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Result of a solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub solution: VertexSet,
    /// Whether the solution is provably minimum. The exact solvers report
    /// `false` only when the node budget ran out; the approximate solvers
    /// report `true` only for the empty solution.
    pub optimal: bool,
    /// Number of pattern copies (or uncovered hyperedges) branched on.
    pub copies_examined: u64,
    /// Proven lower bound on the optimum: the solution size itself when
    /// `optimal`, otherwise a disjoint-copy packing bound.
    pub bound_used: usize,
}

/// True iff deleting `sol` from `g` leaves no copy of `t`.
pub fn is_transversal(g: &Graph, t: &TreePattern, sol: &VertexSet) -> bool {
    let alive: Vec<bool> = (0..g.n()).map(|v| !sol.contains(v)).collect();
    detect_bruteforce_in(g, t, &alive).is_none()
}

struct ExactState<'a> {
    g: &'a Graph,
    t: &'a TreePattern,
    alive: Vec<bool>,
    deleted: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    copies: u64,
    exhausted: bool,
}

impl ExactState<'_> {
    fn search(&mut self) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if self.deleted.len() >= self.best.len() {
            return;
        }
        match detect_bruteforce_in(self.g, self.t, &self.alive) {
            None => {
                self.best = self.deleted.clone();
            }
            Some(copy) => {
                self.copies += 1;
                for v in copy.host_vertices().iter() {
                    self.alive[v] = false;
                    self.deleted.push(v);
                    self.search();
                    self.deleted.pop();
                    self.alive[v] = true;
                    if self.exhausted {
                        return;
                    }
                }
            }
        }
    }
}

/// Exact minimum T-transversal by a bounded search tree: find a copy,
/// branch on deleting each of its `k` vertices (ascending), prune against
/// the incumbent. Runs within `node_budget` search nodes; if the budget is
/// exhausted the best solution found so far is returned with
/// `optimal = false`.
pub fn solve_exact(g: &Graph, t: &TreePattern, node_budget: u64) -> SolveResult {
    let warm = approx_local_ratio(g, t);
    let packing = warm.bound_used;
    let mut state = ExactState {
        g,
        t,
        alive: vec![true; g.n()],
        deleted: Vec::new(),
        best: warm.solution.iter().collect(),
        nodes: 0,
        budget: node_budget.max(1),
        copies: 0,
        exhausted: false,
    };
    state.search();
    let solution = VertexSet::from_iter(state.best.iter().copied());
    assert!(is_transversal(g, t, &solution), "solver returned a non-transversal");
    let optimal = !state.exhausted;
    let bound_used = if optimal { solution.len() } else { packing };
    SolveResult { solution, optimal, copies_examined: state.copies, bound_used }
}

/// Local-ratio approximation: repeatedly find a copy and delete all of its
/// `k` vertices. Each deleted copy is vertex-disjoint from the others, so
/// the result is at most `k` times the optimum and the number of copies is
/// a lower bound on it.
pub fn approx_local_ratio(g: &Graph, t: &TreePattern) -> SolveResult {
    let mut alive = vec![true; g.n()];
    let mut deleted: Vec<usize> = Vec::new();
    let mut copies = 0u64;
    while let Some(copy) = detect_bruteforce_in(g, t, &alive) {
        copies += 1;
        for v in copy.host_vertices().iter() {
            alive[v] = false;
            deleted.push(v);
        }
    }
    let solution = VertexSet::from_iter(deleted);
    assert!(is_transversal(g, t, &solution), "local ratio left a copy behind");
    SolveResult {
        solution,
        optimal: copies == 0,
        copies_examined: copies,
        bound_used: copies as usize,
    }
}

struct HvcState<'a> {
    h: &'a Hypergraph,
    in_cover: Vec<bool>,
    cover: Vec<usize>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    branched: u64,
    exhausted: bool,
}

impl HvcState<'_> {
    fn first_uncovered(&self) -> Option<usize> {
        self.h
            .hyperedges()
            .iter()
            .position(|he| !he.iter().any(|&v| self.in_cover[v]))
    }

    fn search(&mut self) {
        if self.nodes >= self.budget {
            self.exhausted = true;
            return;
        }
        self.nodes += 1;
        if self.cover.len() >= self.best.len() {
            return;
        }
        match self.first_uncovered() {
            None => {
                self.best = self.cover.clone();
            }
            Some(ei) => {
                self.branched += 1;
                let he: Vec<usize> = self.h.hyperedge(ei).to_vec();
                for v in he {
                    self.in_cover[v] = true;
                    self.cover.push(v);
                    self.search();
                    self.cover.pop();
                    self.in_cover[v] = false;
                    if self.exhausted {
                        return;
                    }
                }
            }
        }
    }
}

/// Exact minimum vertex cover of a d-uniform hypergraph: branch on the `d`
/// vertices of the first uncovered hyperedge.
pub fn hvc_exact(h: &Hypergraph, node_budget: u64) -> SolveResult {
    let warm = hvc_greedy(h);
    let packing = warm.bound_used;
    let mut state = HvcState {
        h,
        in_cover: vec![false; h.n()],
        cover: Vec::new(),
        best: warm.solution.iter().collect(),
        nodes: 0,
        budget: node_budget.max(1),
        branched: 0,
        exhausted: false,
    };
    state.search();
    let solution = VertexSet::from_iter(state.best.iter().copied());
    assert!(h.is_covered_by(&solution), "solver returned a non-cover");
    let optimal = !state.exhausted;
    let bound_used = if optimal { solution.len() } else { packing };
    SolveResult { solution, optimal, copies_examined: state.branched, bound_used }
}

/// Greedy d-approximation: scan hyperedges in order and, whenever one is
/// uncovered, add all of its vertices. The chosen hyperedges are pairwise
/// disjoint, giving the `d * OPT` guarantee and a packing lower bound.
pub fn hvc_greedy(h: &Hypergraph) -> SolveResult {
    let mut in_cover = vec![false; h.n()];
    let mut picked = 0u64;
    for he in h.hyperedges() {
        if !he.iter().any(|&v| in_cover[v]) {
            picked += 1;
            for &v in he {
                in_cover[v] = true;
            }
        }
    }
    let solution = VertexSet::from_iter(
        in_cover
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c)
            .map(|(v, _)| v),
    );
    assert!(h.is_covered_by(&solution), "greedy left a hyperedge uncovered");
    SolveResult {
        solution,
        optimal: picked == 0,
        copies_examined: picked,
        bound_used: picked as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{generate_pattern, PatternKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_host(n: usize, density_percent: u32, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random_range(0..100) < density_percent {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, &edges).unwrap()
    }

    /// Exhaustive-subset oracle for the transversal optimum.
    fn opt_oracle(g: &Graph, t: &TreePattern) -> usize {
        let n = g.n();
        for size in 0..=n {
            let found = (0u32..1 << n)
                .filter(|m| m.count_ones() as usize == size)
                .any(|m| {
                    let sol = VertexSet::from_iter((0..n).filter(|&v| m >> v & 1 == 1));
                    is_transversal(g, t, &sol)
                });
            if found {
                return size;
            }
        }
        unreachable!("deleting everything is always a transversal");
    }

    /// Exhaustive-subset oracle for the hypergraph cover optimum.
    fn hvc_oracle(h: &Hypergraph) -> usize {
        let n = h.n();
        for size in 0..=n {
            let found = (0u32..1 << n)
                .filter(|m| m.count_ones() as usize == size)
                .any(|m| {
                    let sol = VertexSet::from_iter((0..n).filter(|&v| m >> v & 1 == 1));
                    h.is_covered_by(&sol)
                });
            if found {
                return size;
            }
        }
        unreachable!()
    }

    #[test]
    fn pattern_free_host_solves_empty() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let t = generate_pattern(PatternKind::Path, 3, 0).unwrap();
        let r = solve_exact(&g, &t, DEFAULT_NODE_BUDGET);
        assert!(r.solution.is_empty() && r.optimal);
        let a = approx_local_ratio(&g, &t);
        assert!(a.solution.is_empty() && a.optimal);
    }

    #[test]
    fn single_copy_host() {
        // Host is exactly one copy of the pattern: OPT = 1, local ratio
        // deletes all k vertices.
        let t = generate_pattern(PatternKind::Random, 6, 3).unwrap();
        let g = t.tree().clone();
        let exact = solve_exact(&g, &t, DEFAULT_NODE_BUDGET);
        assert_eq!(exact.solution.len(), 1);
        assert!(exact.optimal);
        let approx = approx_local_ratio(&g, &t);
        assert_eq!(approx.solution.len(), t.k());
        assert_eq!(approx.bound_used, 1);
        assert!(!approx.optimal);
    }

    #[test]
    fn exact_matches_subset_oracle() {
        for seed in 0..25u64 {
            let n = 7 + (seed % 3) as usize;
            let g = random_host(n, 35 + (seed % 35) as u32, seed);
            let t = generate_pattern(PatternKind::Random, 4, seed + 100).unwrap();
            let r = solve_exact(&g, &t, DEFAULT_NODE_BUDGET);
            assert!(r.optimal);
            assert_eq!(r.solution.len(), opt_oracle(&g, &t), "seed {seed}");
            assert_eq!(r.bound_used, r.solution.len());
        }
    }

    #[test]
    fn approx_within_factor_k() {
        for seed in 0..25u64 {
            let g = random_host(9, 45, seed * 13 + 5);
            let t = generate_pattern(PatternKind::Random, 4, seed).unwrap();
            let exact = solve_exact(&g, &t, DEFAULT_NODE_BUDGET);
            assert!(exact.optimal);
            let approx = approx_local_ratio(&g, &t);
            assert!(approx.solution.len() <= t.k() * exact.solution.len());
            assert!(approx.bound_used <= exact.solution.len());
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let g = random_host(12, 70, 1);
        let t = generate_pattern(PatternKind::Path, 4, 0).unwrap();
        let r = solve_exact(&g, &t, 2);
        assert!(!r.optimal);
        // Still a valid transversal even when cut short.
        assert!(is_transversal(&g, &t, &r.solution));
        let full = solve_exact(&g, &t, DEFAULT_NODE_BUDGET);
        assert!(full.optimal);
        assert!(r.bound_used <= full.solution.len());
    }

    #[test]
    fn deterministic_solutions() {
        let g = random_host(10, 50, 77);
        let t = generate_pattern(PatternKind::Random, 5, 8).unwrap();
        assert_eq!(solve_exact(&g, &t, 10_000), solve_exact(&g, &t, 10_000));
        assert_eq!(approx_local_ratio(&g, &t), approx_local_ratio(&g, &t));
    }

    #[test]
    fn monotone_under_edge_addition() {
        // Adding edges never decreases the optimum.
        for seed in 0..10u64 {
            let g = random_host(8, 30, seed);
            let t = generate_pattern(PatternKind::Random, 4, seed + 50).unwrap();
            let base = solve_exact(&g, &t, DEFAULT_NODE_BUDGET);
            let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
            let mut added = 0;
            'outer: for u in 0..8 {
                for v in u + 1..8 {
                    if !g.has_edge(u, v) {
                        edges.push((u, v));
                        added += 1;
                        if added == 3 {
                            break 'outer;
                        }
                    }
                }
            }
            let g2 = Graph::new(8, &edges).unwrap();
            let denser = solve_exact(&g2, &t, DEFAULT_NODE_BUDGET);
            assert!(base.optimal && denser.optimal);
            assert!(denser.solution.len() >= base.solution.len());
        }
    }

    fn random_hypergraph(n: usize, m: usize, d: usize, seed: u64) -> Hypergraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hes = Vec::new();
        while hes.len() < m {
            let mut he: Vec<usize> = Vec::new();
            while he.len() < d {
                let v = rng.random_range(0..n);
                if !he.contains(&v) {
                    he.push(v);
                }
            }
            he.sort_unstable();
            hes.push(he);
        }
        Hypergraph::new(n, d, &hes).unwrap()
    }

    #[test]
    fn hvc_exact_matches_oracle() {
        for seed in 0..30u64 {
            let h = random_hypergraph(8, 6, 3, seed);
            let r = hvc_exact(&h, DEFAULT_NODE_BUDGET);
            assert!(r.optimal);
            assert_eq!(r.solution.len(), hvc_oracle(&h), "seed {seed}");
        }
    }

    #[test]
    fn hvc_greedy_within_factor_d() {
        for seed in 0..30u64 {
            let d = 2 + (seed % 3) as usize;
            let h = random_hypergraph(9, 7, d, seed);
            let exact = hvc_exact(&h, DEFAULT_NODE_BUDGET);
            let greedy = hvc_greedy(&h);
            assert!(h.is_covered_by(&greedy.solution));
            assert!(greedy.solution.len() <= d * exact.solution.len());
            assert!(greedy.bound_used <= exact.solution.len());
        }
    }

    #[test]
    fn hvc_empty_instance() {
        let h = Hypergraph::new(4, 2, &[]).unwrap();
        let r = hvc_exact(&h, DEFAULT_NODE_BUDGET);
        assert!(r.solution.is_empty() && r.optimal);
        let gr = hvc_greedy(&h);
        assert!(gr.solution.is_empty() && gr.optimal);
    }

    #[test]
    fn hvc_single_hyperedge() {
        let h = Hypergraph::new(5, 3, &[vec![1, 2, 4]]).unwrap();
        let exact = hvc_exact(&h, DEFAULT_NODE_BUDGET);
        assert_eq!(exact.solution.len(), 1);
        // Lexicographic branching lands on the smallest vertex.
        assert_eq!(exact.solution.as_slice(), &[1]);
        let greedy = hvc_greedy(&h);
        assert_eq!(greedy.solution.as_slice(), &[1, 2, 4]);
    }
}
