//! Detection of tree pattern copies inside a host graph.
//!
//! Containment here is plain subgraph containment: an injective map from
//! pattern vertices to host vertices sending pattern edges to host edges.
//! Extra host edges between image vertices are fine.
//!
//! Three entry points:
//!
//! * [`detect_bruteforce`]: exhaustive backtracking, deterministic, exact.
//! * [`detect_color_coding`]: seeded random colorings plus a dynamic
//!   program over (pattern subtree, host vertex, color subset) states.
//!   One-sided: a returned embedding is always verified, absence is only
//!   probable (failure probability at most the requested `delta`).
//! * [`degree_prune_check`]: a cheap certificate of absence for bipartite
//!   hosts where one side's maximum degree is below the pattern parameter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{bipartition, side_max_degree, Graph, VertexSet};
use crate::pattern::TreePattern;

/// Hard ceiling on color-coding trials; requests beyond it are refused.
pub const DEFAULT_TRIAL_CAP: u64 = 1_000_000;

/// An injective map from pattern vertices to host vertices; `map[p]` is the
/// host image of pattern vertex `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    map: Vec<usize>,
}

impl Embedding {
    pub fn new(map: Vec<usize>) -> Self {
        Embedding { map }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, pattern_vertex: usize) -> usize {
        self.map[pattern_vertex]
    }

    pub fn host_vertices(&self) -> VertexSet {
        VertexSet::from_iter(self.map.iter().copied())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectError {
    #[error("color coding needs {required} trials, over the cap of {cap}")]
    TrialBudget { required: u64, cap: u64 },
    #[error("failure probability must lie in (0, 1), got {delta}")]
    BadDelta { delta: f64 },
}

/// Checks that `e` is a valid embedding of `t` into `g`: total, injective,
/// and edge-preserving.
pub fn verify_embedding(g: &Graph, t: &TreePattern, e: &Embedding) -> bool {
    if e.map.len() != t.k() {
        return false;
    }
    if e.map.iter().any(|&v| v >= g.n()) {
        return false;
    }
    let mut sorted = e.map.clone();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    t.tree()
        .edges()
        .iter()
        .all(|&(a, b)| g.has_edge(e.map[a], e.map[b]))
}

/// Pattern vertices in breadth-first order from a maximum-degree vertex of
/// the heavy color (lowest id on ties), with each vertex's predecessor.
pub(crate) fn pattern_order(t: &TreePattern) -> (Vec<usize>, Vec<usize>) {
    let tree = t.tree();
    let root = (0..t.k())
        .filter(|&v| t.color(v) == t.heavy_color())
        .max_by(|&a, &b| {
            tree.degree(a)
                .cmp(&tree.degree(b))
                .then(b.cmp(&a))
        })
        .expect("both color classes are inhabited");
    let mut order = vec![root];
    let mut parent_pos = vec![usize::MAX; t.k()];
    let mut seen = vec![false; t.k()];
    seen[root] = true;
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        for &v in tree.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                parent_pos[order.len()] = head;
                order.push(v);
            }
        }
        head += 1;
    }
    (order, parent_pos)
}

/// Exhaustive search for a pattern copy. Deterministic: pattern vertices
/// are matched in breadth-first order and host candidates are tried in
/// ascending id order, so the first copy in that order is returned.
pub fn detect_bruteforce(g: &Graph, t: &TreePattern) -> Option<Embedding> {
    let alive = vec![true; g.n()];
    detect_bruteforce_in(g, t, &alive)
}

/// Brute-force detection restricted to host vertices with `alive[v]`.
pub(crate) fn detect_bruteforce_in(g: &Graph, t: &TreePattern, alive: &[bool]) -> Option<Embedding> {
    let k = t.k();
    if k > alive.iter().filter(|&&a| a).count() {
        return None;
    }
    let (order, parent_pos) = pattern_order(t);
    let pat_deg: Vec<usize> = order.iter().map(|&p| t.tree().degree(p)).collect();
    let alive_deg: Vec<usize> = (0..g.n())
        .map(|v| g.neighbors(v).iter().filter(|&&w| alive[w]).count())
        .collect();
    let mut image = vec![usize::MAX; k];
    let mut used = vec![false; g.n()];

    #[allow(clippy::too_many_arguments)]
    fn extend(
        g: &Graph,
        alive: &[bool],
        alive_deg: &[usize],
        order: &[usize],
        parent_pos: &[usize],
        pat_deg: &[usize],
        image: &mut [usize],
        used: &mut [bool],
        depth: usize,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let feasible = |w: usize, used: &[bool]| {
            alive[w] && !used[w] && alive_deg[w] >= pat_deg[depth]
        };
        let try_vertex = |w: usize, image: &mut [usize], used: &mut [bool]| -> bool {
            image[depth] = w;
            used[w] = true;
            let ok = extend(g, alive, alive_deg, order, parent_pos, pat_deg, image, used, depth + 1);
            if !ok {
                image[depth] = usize::MAX;
                used[w] = false;
            }
            ok
        };
        if depth == 0 {
            for w in 0..g.n() {
                if feasible(w, used) && try_vertex(w, image, used) {
                    return true;
                }
            }
        } else {
            let anchor = image[parent_pos[depth]];
            for &w in g.neighbors(anchor) {
                if feasible(w, used) && try_vertex(w, image, used) {
                    return true;
                }
            }
        }
        false
    }

    if extend(g, alive, &alive_deg, &order, &parent_pos, &pat_deg, &mut image, &mut used, 0) {
        let mut map = vec![usize::MAX; k];
        for (pos, &p) in order.iter().enumerate() {
            map[p] = image[pos];
        }
        let e = Embedding::new(map);
        debug_assert!(verify_embedding(g, t, &e));
        Some(e)
    } else {
        None
    }
}

/// Number of colorings needed so a present copy is missed with probability
/// at most `delta`: `ceil(e^k * ln(1/delta))`.
pub fn color_coding_trials(k: usize, delta: f64) -> u64 {
    (std::f64::consts::E.powi(k as i32) * (1.0 / delta).ln()).ceil() as u64
}

/// A fixed-size bitset over color subsets, one bit per subset of `[k]`.
#[derive(Clone)]
struct MaskSet {
    words: Vec<u64>,
}

impl MaskSet {
    fn new(k: usize) -> Self {
        MaskSet { words: vec![0; (1usize << k).div_ceil(64)] }
    }

    fn insert(&mut self, mask: u32) {
        self.words[(mask >> 6) as usize] |= 1u64 << (mask & 63);
    }

    fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    fn contains(&self, mask: u32) -> bool {
        self.words[(mask >> 6) as usize] >> (mask & 63) & 1 == 1
    }

    fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros();
                bits &= bits - 1;
                Some((i as u32) << 6 | b)
            })
        })
    }
}

/// Color-coding detection with failure probability at most `delta` for
/// hosts that do contain the pattern. Deterministic for a fixed seed; trial
/// `i` uses a sub-seed derived from `(seed, i)`. Any returned embedding is
/// verified before being handed back, so there are no false positives.
pub fn detect_color_coding(
    g: &Graph,
    t: &TreePattern,
    delta: f64,
    seed: u64,
) -> Result<Option<Embedding>, DetectError> {
    detect_color_coding_capped(g, t, delta, seed, DEFAULT_TRIAL_CAP)
}

/// Same as [`detect_color_coding`] with an explicit trial cap.
pub fn detect_color_coding_capped(
    g: &Graph,
    t: &TreePattern,
    delta: f64,
    seed: u64,
    cap: u64,
) -> Result<Option<Embedding>, DetectError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(DetectError::BadDelta { delta });
    }
    let k = t.k();
    let trials = color_coding_trials(k, delta);
    if trials > cap {
        return Err(DetectError::TrialBudget { required: trials, cap });
    }
    if k > g.n() {
        return Ok(None);
    }
    for trial in 0..trials {
        let sub_seed = seed ^ (trial + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
        let colors: Vec<u32> = (0..g.n()).map(|_| rng.random_range(0..k as u32)).collect();
        if let Some(e) = colorful_search(g, t, &colors) {
            debug_assert!(verify_embedding(g, t, &e));
            return Ok(Some(e));
        }
    }
    Ok(None)
}

/// One color-coding trial: find an embedding whose image uses all `k`
/// colors exactly once, if the coloring admits one.
fn colorful_search(g: &Graph, t: &TreePattern, colors: &[u32]) -> Option<Embedding> {
    let k = t.k();
    let n = g.n();
    let (order, parent_pos) = pattern_order(t);
    // children[pos] lists child positions of order[pos] in the rooted tree.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    for pos in 1..k {
        children[parent_pos[pos]].push(pos);
    }
    // Bottom-up over positions (children have larger positions than their
    // parent in BFS order).
    let mut table: Vec<Vec<MaskSet>> = vec![vec![MaskSet::new(k); n]; k];
    let mut scratch = MaskSet::new(k);
    for pos in (0..k).rev() {
        for v in 0..n {
            let own = 1u32 << colors[v];
            table[pos][v].insert(own);
        }
        for &c in &children[pos] {
            for v in 0..n {
                scratch.clear();
                for m in table[pos][v].iter() {
                    for &w in g.neighbors(v) {
                        // Split borrows: c != pos, so index directly.
                        let child_set = &table[c][w];
                        for m2 in child_set.iter() {
                            if m & m2 == 0 {
                                scratch.insert(m | m2);
                            }
                        }
                    }
                }
                std::mem::swap(&mut table[pos][v], &mut scratch);
            }
        }
    }
    let full = (1u32 << k) - 1;
    let root_host = (0..n).find(|&v| table[0][v].contains(full))?;
    let mut map = vec![usize::MAX; k];
    let ok = reconstruct(
        g, colors, &order, &children, &table, 0, root_host, full, &mut map,
    );
    debug_assert!(ok, "a DP-positive state must reconstruct");
    if ok {
        Some(Embedding::new(map))
    } else {
        None
    }
}

/// Walks the DP back down, assigning host vertices to pattern positions.
#[allow(clippy::too_many_arguments)]
fn reconstruct(
    g: &Graph,
    colors: &[u32],
    order: &[usize],
    children: &[Vec<usize>],
    table: &[Vec<MaskSet>],
    pos: usize,
    v: usize,
    mask: u32,
    map: &mut [usize],
) -> bool {
    map[order[pos]] = v;
    let remaining = mask & !(1u32 << colors[v]);
    assign_children(g, colors, order, children, table, pos, v, 0, remaining, map)
}

#[allow(clippy::too_many_arguments)]
fn assign_children(
    g: &Graph,
    colors: &[u32],
    order: &[usize],
    children: &[Vec<usize>],
    table: &[Vec<MaskSet>],
    pos: usize,
    v: usize,
    child_idx: usize,
    remaining: u32,
    map: &mut [usize],
) -> bool {
    if child_idx == children[pos].len() {
        return remaining == 0;
    }
    let c = children[pos][child_idx];
    for &w in g.neighbors(v) {
        for m2 in table[c][w].iter() {
            if m2 & !remaining != 0 {
                continue;
            }
            if assign_children(
                g, colors, order, children, table, pos, v, child_idx + 1,
                remaining & !m2, map,
            ) && reconstruct(g, colors, order, children, table, c, w, m2, map)
            {
                return true;
            }
        }
    }
    false
}

/// Outcome of the bipartite degree certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PruneOutcome {
    /// No copy of the pattern can exist: the host is bipartite and the named
    /// side has maximum degree below the pattern's `delta`.
    CertifiedAbsent { side: u8, side_max_degree: usize },
    /// The certificate does not apply.
    Unknown { reason: String },
}

impl PruneOutcome {
    pub fn is_certified(&self) -> bool {
        matches!(self, PruneOutcome::CertifiedAbsent { .. })
    }
}

/// Degree certificate: in any copy of the pattern inside a bipartite host,
/// each pattern color class lands entirely on one host side, and both
/// classes contain a vertex of degree at least `delta`. If some host side
/// has maximum degree at most `delta - 1`, no copy exists.
pub fn degree_prune_check(g: &Graph, t: &TreePattern) -> PruneOutcome {
    let b = match bipartition(g) {
        Ok(b) => b,
        Err(e) => {
            return PruneOutcome::Unknown {
                reason: format!("host is not bipartite (odd cycle {:?})", e.odd_cycle),
            }
        }
    };
    let threshold = t.delta() - 1;
    for side in [0u8, 1] {
        let d = side_max_degree(g, &b, side);
        if d <= threshold {
            return PruneOutcome::CertifiedAbsent { side, side_max_degree: d };
        }
    }
    PruneOutcome::Unknown {
        reason: format!("both sides have max degree at least {}", t.delta()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{generate_pattern, PatternKind};

    fn complete_graph(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::new(n, &edges).unwrap()
    }

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

    /// Full enumeration oracle: try every injection of pattern vertices
    /// into host vertices.
    fn exists_oracle(g: &Graph, t: &TreePattern) -> bool {
        let k = t.k();
        let n = g.n();
        if k > n {
            return false;
        }
        let mut map = vec![usize::MAX; k];
        let mut used = vec![false; n];
        fn rec(g: &Graph, t: &TreePattern, map: &mut [usize], used: &mut [bool], p: usize) -> bool {
            if p == map.len() {
                return true;
            }
            for w in 0..g.n() {
                if used[w] {
                    continue;
                }
                let ok = t.tree().neighbors(p).iter().all(|&q| {
                    q >= p || g.has_edge(map[q], w)
                });
                if !ok {
                    continue;
                }
                map[p] = w;
                used[w] = true;
                if rec(g, t, map, used, p + 1) {
                    return true;
                }
                map[p] = usize::MAX;
                used[w] = false;
            }
            false
        }
        rec(g, t, &mut map, &mut used, 0)
    }

    #[test]
    fn path_in_complete_graph() {
        let g = complete_graph(4);
        let t = generate_pattern(PatternKind::Path, 4, 0).unwrap();
        let e = detect_bruteforce(&g, &t).unwrap();
        assert!(verify_embedding(&g, &t, &e));
    }

    #[test]
    fn star_needs_degree() {
        // K_{1,3} cannot embed into a path on 5 vertices.
        let path = generate_pattern(PatternKind::Path, 5, 0).unwrap();
        let star = generate_pattern(PatternKind::Star, 3, 0).unwrap();
        assert!(detect_bruteforce(path.tree(), &star).is_none());
    }

    #[test]
    fn pattern_into_itself() {
        for seed in 0..10 {
            let t = generate_pattern(PatternKind::Random, 8, seed).unwrap();
            let e = detect_bruteforce(t.tree(), &t).unwrap();
            assert!(verify_embedding(t.tree(), &t, &e));
        }
    }

    #[test]
    fn bruteforce_matches_enumeration_oracle() {
        let mut checked = 0;
        for seed in 0..40u64 {
            let n = 6 + (seed % 5) as usize; // hosts up to 10 vertices
            let g = random_host(n, 30 + (seed % 40) as u32, seed);
            let t = generate_pattern(PatternKind::Random, 4 + (seed % 3) as usize, seed * 7 + 1)
                .unwrap();
            assert_eq!(detect_bruteforce(&g, &t).is_some(), exists_oracle(&g, &t));
            checked += 1;
        }
        assert_eq!(checked, 40);
    }

    #[test]
    fn bruteforce_deterministic() {
        let g = random_host(10, 50, 5);
        let t = generate_pattern(PatternKind::Random, 5, 9).unwrap();
        assert_eq!(detect_bruteforce(&g, &t), detect_bruteforce(&g, &t));
    }

    #[test]
    fn verify_embedding_rejects_bad_maps() {
        let g = complete_graph(4);
        let t = generate_pattern(PatternKind::Path, 3, 0).unwrap();
        assert!(!verify_embedding(&g, &t, &Embedding::new(vec![0, 1])));
        assert!(!verify_embedding(&g, &t, &Embedding::new(vec![0, 1, 1])));
        assert!(!verify_embedding(&g, &t, &Embedding::new(vec![0, 1, 9])));
        assert!(verify_embedding(&g, &t, &Embedding::new(vec![0, 1, 2])));
        // Non-edge under a sparse host.
        let sparse = Graph::new(3, &[(0, 1)]).unwrap();
        let p2 = generate_pattern(PatternKind::Path, 2, 0).unwrap();
        assert!(!verify_embedding(&sparse, &p2, &Embedding::new(vec![0, 2])));
    }

    #[test]
    fn trial_formula() {
        assert_eq!(color_coding_trials(1, 0.5), 2);
        // e^6 * ln(100) = 403.42 * 4.605 = 1857.7...
        assert_eq!(color_coding_trials(6, 0.01), 1858);
    }

    #[test]
    fn color_coding_budget_error() {
        let g = complete_graph(20);
        let t = generate_pattern(PatternKind::Path, 16, 0).unwrap();
        let err = detect_color_coding(&g, &t, 0.01, 0).unwrap_err();
        assert!(matches!(err, DetectError::TrialBudget { .. }));
    }

    #[test]
    fn color_coding_rejects_bad_delta() {
        let g = complete_graph(4);
        let t = generate_pattern(PatternKind::Path, 3, 0).unwrap();
        assert!(matches!(
            detect_color_coding(&g, &t, 0.0, 0),
            Err(DetectError::BadDelta { .. })
        ));
        assert!(matches!(
            detect_color_coding(&g, &t, 1.0, 0),
            Err(DetectError::BadDelta { .. })
        ));
    }

    #[test]
    fn color_coding_deterministic_for_seed() {
        let g = random_host(12, 40, 3);
        let t = generate_pattern(PatternKind::Random, 5, 4).unwrap();
        let a = detect_color_coding(&g, &t, 0.05, 99).unwrap();
        let b = detect_color_coding(&g, &t, 0.05, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn color_coding_agrees_with_bruteforce() {
        let mut positives = 0;
        let mut found = 0;
        for seed in 0..60u64 {
            let n = 8 + (seed % 6) as usize;
            let g = random_host(n, 25 + (seed % 50) as u32, seed * 3 + 2);
            let t = generate_pattern(PatternKind::Random, 4 + (seed % 3) as usize, seed).unwrap();
            let truth = detect_bruteforce(&g, &t).is_some();
            let cc = detect_color_coding(&g, &t, 0.01, seed).unwrap();
            if let Some(e) = &cc {
                // No false positives, ever.
                assert!(truth);
                assert!(verify_embedding(&g, &t, e));
            }
            if truth {
                positives += 1;
                if cc.is_some() {
                    found += 1;
                }
            }
        }
        assert!(positives > 10, "corpus should contain positives");
        assert_eq!(found, positives, "delta=0.01 misses are vanishingly rare here");
    }

    #[test]
    fn degree_prune_certifies_low_degree_side() {
        let t = generate_pattern(PatternKind::DoubleStar, 3, 0).unwrap();
        // K_{2,7}: side sizes 2 and 7; the size-2 side has degree 7, the
        // size-7 side degree 2 <= delta - 1 = 2.
        let mut edges = Vec::new();
        for u in 0..2 {
            for v in 2..9 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(9, &edges).unwrap();
        let out = degree_prune_check(&g, &t);
        assert!(out.is_certified(), "{out:?}");
        // And the certificate is truthful.
        assert!(detect_bruteforce(&g, &t).is_none());
    }

    #[test]
    fn degree_prune_unknown_cases() {
        let t = generate_pattern(PatternKind::DoubleStar, 3, 0).unwrap();
        let triangle = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(!degree_prune_check(&triangle, &t).is_certified());
        // K_{3,3}: both sides have degree 3 = delta, no certificate.
        let mut edges = Vec::new();
        for u in 0..3 {
            for v in 3..6 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(6, &edges).unwrap();
        assert!(!degree_prune_check(&g, &t).is_certified());
    }

    #[test]
    fn degree_prune_never_contradicts_bruteforce() {
        for seed in 0..40u64 {
            // Random bipartite hosts.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let left = 3 + (seed % 4) as usize;
            let right = 3 + (seed % 5) as usize;
            let mut edges = Vec::new();
            for u in 0..left {
                for v in left..left + right {
                    if rng.random_range(0..100) < 55 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(left + right, &edges).unwrap();
            let t = generate_pattern(PatternKind::DoubleStar, 3, 0).unwrap();
            if degree_prune_check(&g, &t).is_certified() {
                assert!(detect_bruteforce(&g, &t).is_none());
            }
        }
    }

    #[test]
    fn color_coding_respects_certificate() {
        // A certified-absent host yields none across all trials.
        let t = generate_pattern(PatternKind::DoubleStar, 3, 0).unwrap();
        let mut edges = Vec::new();
        for u in 0..2 {
            for v in 2..9 {
                edges.push((u, v));
            }
        }
        let g = Graph::new(9, &edges).unwrap();
        assert!(degree_prune_check(&g, &t).is_certified());
        assert_eq!(detect_color_coding(&g, &t, 0.2, 11).unwrap(), None);
    }
}
