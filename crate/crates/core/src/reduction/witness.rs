//! Witness trees: explicit pattern copies that survive a deficient
//! transversal of the incidence graph.
//!
//! Given a transversal candidate `R` that leaves some base hyperedge `e`
//! with at least `w` untouched indices in each of its clouds, the
//! construction grows a tree inside `G` rooted at a copy of `e`:
//!
//! * even levels are hyperedge copies over `e` — the root uses one fresh
//!   index per cloud, every later one reuses its parent's index and takes
//!   `delta - 1` fresh indices;
//! * odd levels are the cloud vertices those indices name; each internal
//!   one branches into `k - 1` fresh hyperedge copies.
//!
//! Fresh indices are drawn in ascending order from each cloud's pool of
//! `R`-avoiding indices and never reused, which makes all tree nodes
//! distinct vertices of `G` and the whole tree `R`-avoiding. After `2k`
//! levels every vertex of the tree has seen the full branching of the
//! pattern, so any tree on `k` vertices with the matching `delta` embeds
//! into it; [`build_witness`] returns such an embedding alongside the
//! tree.
//!
//! The per-cloud consumption is exactly [`witness_requirement`], which
//! grows like `((k-1)(delta-1))^k` — far past anything materializable.
//! The construction therefore works through the id formulas of
//! [`ExtendedHypergraph`] alone and only materializes a prefix of the
//! levels: enough for the embedding and for spot verification, with the
//! deeper levels accounted for arithmetically.

use std::collections::HashSet;
use std::ops::Range;

use crate::detect::pattern_order;
use crate::graph::VertexSet;
use crate::pattern::TreePattern;

use super::{check_compatible, CloudShortfall, ExtendedHypergraph, ReductionError};

/// Materialize witness levels only while the node total stays below this.
pub const DEFAULT_WITNESS_STORE_LIMIT: usize = 2_000_000;

/// Exact number of indices the witness construction consumes from each
/// cloud of the root hyperedge, computed by running the level recurrence
/// on node counts. `None` if it overflows 128 bits.
pub fn witness_requirement(t: &TreePattern) -> Option<u128> {
    requirement_counts(t.k(), t.delta())
}

fn requirement_counts(k: usize, delta: usize) -> Option<u128> {
    // Allocations into one cloud, level by level: the root takes 1; at
    // each later even level, every hyperedge node whose parent lies in a
    // different cloud takes 1. Clouds are interchangeable, so track one.
    let kk = (k as u128).checked_sub(1)?;
    let dd = delta as u128 - 1;
    let mut here = 1u128; // cloud nodes of the tracked cloud at this odd level
    let mut total = 1u128;
    for _ in 1..k {
        // Hyperedge nodes with parents in the other delta-1 clouds each
        // contribute one fresh index here.
        here = here.checked_mul(kk)?.checked_mul(dd)?;
        total = total.checked_add(here)?;
    }
    Some(total)
}

/// One materialized witness node: its `G`-vertex and its parent's index
/// in the node list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WitnessNode {
    pub g: u128,
    pub parent: Option<u32>,
}

/// The witness tree itself. Level counts and cloud consumption are exact
/// at any scale; node identities are materialized for a prefix of the
/// levels (always at least the `k` the embedding needs).
#[derive(Debug, Clone)]
pub struct WitnessTree {
    base_edge: usize,
    k: usize,
    delta: usize,
    level_counts: Vec<u128>,
    total_nodes: u128,
    consumed_per_cloud: Vec<u128>,
    requirement: u128,
    stored_levels: usize,
    nodes: Vec<WitnessNode>,
    level_offsets: Vec<usize>,
    pool_first: Vec<usize>,
}

impl WitnessTree {
    pub fn base_edge(&self) -> usize {
        self.base_edge
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    /// Number of levels, `2k`.
    pub fn levels(&self) -> usize {
        2 * self.k
    }

    /// Longest root-to-leaf path, `2k - 1` edges.
    pub fn height(&self) -> usize {
        2 * self.k - 1
    }

    pub fn level_counts(&self) -> &[u128] {
        &self.level_counts
    }

    pub fn total_nodes(&self) -> u128 {
        self.total_nodes
    }

    /// Indices consumed from each cloud of the root hyperedge; always
    /// exactly the requirement, one entry per cloud position.
    pub fn consumed_per_cloud(&self) -> &[u128] {
        &self.consumed_per_cloud
    }

    pub fn requirement(&self) -> u128 {
        self.requirement
    }

    /// Levels `0..stored_levels()` have explicit nodes.
    pub fn stored_levels(&self) -> usize {
        self.stored_levels
    }

    pub fn is_fully_stored(&self) -> bool {
        self.stored_levels == self.levels()
    }

    pub fn nodes(&self) -> &[WitnessNode] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &WitnessNode {
        &self.nodes[idx]
    }

    pub fn root_g(&self) -> u128 {
        self.nodes[0].g
    }

    /// First index drawn from each cloud; the root's tuple.
    pub fn pool_first(&self) -> &[usize] {
        &self.pool_first
    }

    /// Slice of the node list holding a stored level.
    pub fn level_nodes(&self, level: usize) -> &[WitnessNode] {
        &self.nodes[self.level_offsets[level]..self.level_offsets[level + 1]]
    }

    /// Children per node at a level: the root fans out to all `delta`
    /// members, later hyperedge copies to `delta - 1`, internal cloud
    /// vertices to `k - 1`.
    pub fn child_count(&self, level: usize) -> usize {
        if level == 0 {
            self.delta
        } else if level % 2 == 1 {
            self.k - 1
        } else {
            self.delta - 1
        }
    }

    pub fn level_of(&self, idx: usize) -> usize {
        self.level_offsets.partition_point(|&o| o <= idx) - 1
    }

    /// Node-list range of a stored node's children, if their level is
    /// stored too.
    pub fn children_range(&self, idx: usize) -> Option<Range<usize>> {
        let level = self.level_of(idx);
        if level + 1 >= self.stored_levels {
            return None;
        }
        let local = idx - self.level_offsets[level];
        let fan = self.child_count(level);
        let start = self.level_offsets[level + 1] + local * fan;
        Some(start..start + fan)
    }

    /// Re-derives every arithmetic invariant and checks the stored prefix
    /// node by node: parent adjacency in `G`, side parity per level,
    /// distinct identities, pool membership outside `r`.
    pub fn audit(&self, hp: &ExtendedHypergraph, r: &VertexSet) -> Result<(), String> {
        let k = self.k;
        let d = self.delta;
        if self.level_counts.len() != 2 * k {
            return Err("level count list has wrong length".into());
        }
        let mut expect = 1u128;
        for (level, &c) in self.level_counts.iter().enumerate() {
            if level > 0 {
                let fan = self.child_count(level - 1) as u128;
                expect = expect.checked_mul(fan).ok_or("level count overflow")?;
            }
            if c != expect {
                return Err(format!("level {level} holds {c} nodes, expected {expect}"));
            }
        }
        if self.total_nodes != self.level_counts.iter().sum::<u128>() {
            return Err("total disagrees with level counts".into());
        }
        let req = requirement_counts(k, d).ok_or("requirement overflow")?;
        if self.requirement != req {
            return Err(format!("requirement {} recomputes to {req}", self.requirement));
        }
        if self.consumed_per_cloud.len() != d
            || self.consumed_per_cloud.iter().any(|&c| c != req)
        {
            return Err(format!(
                "per-cloud consumption {:?} should be uniformly {req}",
                self.consumed_per_cloud
            ));
        }
        if self.stored_levels < k.min(2 * k) || self.stored_levels > 2 * k {
            return Err(format!("{} stored levels is out of range", self.stored_levels));
        }
        if self.level_offsets.len() != self.stored_levels + 1 {
            return Err("level offsets out of step with stored levels".into());
        }
        for level in 0..self.stored_levels {
            let len = self.level_offsets[level + 1] - self.level_offsets[level];
            if len as u128 != self.level_counts[level] {
                return Err(format!("stored level {level} holds {len} nodes"));
            }
        }
        if self.nodes.len() != *self.level_offsets.last().unwrap() {
            return Err("node list length disagrees with offsets".into());
        }
        let nv = hp.vertex_count() as u128;
        let base_verts = hp.base().hyperedge(self.base_edge);
        let mut seen = HashSet::with_capacity(self.nodes.len());
        for level in 0..self.stored_levels {
            for (local, node) in self.level_nodes(level).iter().enumerate() {
                let idx = self.level_offsets[level] + local;
                if !seen.insert(node.g) {
                    return Err(format!("node {idx} repeats G-vertex {}", node.g));
                }
                let cloud_side = node.g < nv;
                if cloud_side != (level % 2 == 1) {
                    return Err(format!("node {idx} sits on the wrong side for level {level}"));
                }
                if cloud_side {
                    let (v, i) = hp.cloud_of(node.g as usize);
                    if !base_verts.contains(&v) {
                        return Err(format!("node {idx} lies in cloud {v}, off the root edge"));
                    }
                    if r.contains(node.g as usize) {
                        return Err(format!("node {idx} collides with R at index {i}"));
                    }
                }
                match node.parent {
                    None => {
                        if idx != 0 {
                            return Err(format!("non-root node {idx} lacks a parent"));
                        }
                    }
                    Some(p) => {
                        let p = p as usize;
                        if self.level_of(p) + 1 != level {
                            return Err(format!("node {idx} parents into a non-adjacent level"));
                        }
                        if !hp.g_adjacent(self.nodes[p].g, node.g) {
                            return Err(format!("nodes {p} and {idx} are not adjacent in G"));
                        }
                    }
                }
            }
        }
        let (e, tuple, j) = hp.hyperedge_unpack(self.root_g() - nv);
        if e != self.base_edge || j != 0 || tuple != self.pool_first {
            return Err("root does not unpack to the recorded base edge and pool heads".into());
        }
        Ok(())
    }

    /// Line-oriented rendering used by the command-line tools.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("base_edge {}\n", self.base_edge));
        out.push_str(&format!("k {} delta {}\n", self.k, self.delta));
        out.push_str(&format!("height {}\n", self.height()));
        out.push_str(&format!(
            "levels {} stored {}\n",
            self.levels(),
            self.stored_levels
        ));
        out.push_str(&format!("total_nodes {}\n", self.total_nodes));
        out.push_str(&format!("consumed_per_cloud {}\n", self.requirement));
        out.push_str(&format!("root {}\n", self.root_g()));
        let counts: Vec<String> = self.level_counts.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("level_counts {}\n", counts.join(" ")));
        out
    }
}

/// A pattern embedding into `G` by raw id, usable past `usize` range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WideEmbedding {
    map: Vec<u128>,
}

impl WideEmbedding {
    pub fn map(&self) -> &[u128] {
        &self.map
    }

    pub fn image(&self, pattern_vertex: usize) -> u128 {
        self.map[pattern_vertex]
    }
}

/// Checks a wide embedding against the virtual adjacency oracle:
/// injective on ids, every tree edge realized in `G`.
pub fn verify_wide_embedding(hp: &ExtendedHypergraph, t: &TreePattern, emb: &WideEmbedding) -> bool {
    if emb.map.len() != t.k() {
        return false;
    }
    let mut ids = emb.map.clone();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != t.k() {
        return false;
    }
    t.tree()
        .edges()
        .iter()
        .all(|&(u, v)| hp.g_adjacent(emb.map[u], emb.map[v]))
}

/// A witness tree together with one embedded pattern copy.
#[derive(Debug, Clone)]
pub struct Witness {
    pub tree: WitnessTree,
    pub embedding: WideEmbedding,
}

/// Ascending allocator over one cloud's `R`-avoiding indices.
struct CloudAlloc {
    blocked: Vec<usize>,
    bp: usize,
    next: usize,
    used: u128,
}

impl CloudAlloc {
    fn new(blocked: Vec<usize>) -> Self {
        CloudAlloc { blocked, bp: 0, next: 0, used: 0 }
    }

    fn take(&mut self) -> usize {
        while self.bp < self.blocked.len() && self.blocked[self.bp] == self.next {
            self.bp += 1;
            self.next += 1;
        }
        let i = self.next;
        self.next += 1;
        self.used += 1;
        i
    }

    /// Advances as if `take` were called `count` times, in time
    /// logarithmic in the blocked list rather than linear in `count`.
    fn skip(&mut self, count: usize) {
        let mut target = self.next + count;
        loop {
            let hi = self.blocked.partition_point(|&b| b < target);
            let fresh = hi - self.bp;
            if fresh == 0 {
                break;
            }
            self.bp = hi;
            target += fresh;
        }
        self.next = target;
        self.used += count as u128;
    }
}

/// [`build_witness`] with the default storage budget.
pub fn build_witness(
    hp: &ExtendedHypergraph,
    t: &TreePattern,
    base_edge: usize,
    r: &VertexSet,
    w: u128,
) -> Result<Witness, ReductionError> {
    build_witness_with_limit(hp, t, base_edge, r, w, DEFAULT_WITNESS_STORE_LIMIT)
}

/// Grows the witness tree for `t` rooted over `base_edge`, avoiding `r`,
/// with per-cloud slack `w`. Fails up front if `w` undercuts the exact
/// requirement or any cloud of the base edge lacks `w` free indices.
pub fn build_witness_with_limit(
    hp: &ExtendedHypergraph,
    t: &TreePattern,
    base_edge: usize,
    r: &VertexSet,
    w: u128,
    store_limit: usize,
) -> Result<Witness, ReductionError> {
    check_compatible(hp.base(), t)?;
    let d = hp.delta();
    let k = t.k();
    let b = hp.cloud_size();
    let m = hp.base().m();
    if base_edge >= m {
        return Err(ReductionError::BadBaseEdge { index: base_edge, m });
    }
    let requirement = requirement_counts(k, d).ok_or(ReductionError::Overflow)?;
    if w < requirement {
        return Err(ReductionError::SlackTooSmall { w, required: requirement });
    }
    let nv = hp.vertex_count();
    if let Some(gid) = r.iter().find(|&gid| gid >= nv) {
        return Err(ReductionError::UnprojectedSolution { vertex: gid });
    }
    let base_verts: Vec<usize> = hp.base().hyperedge(base_edge).to_vec();

    // Per-cloud pools of R-avoiding indices, checked for depth w.
    let mut allocs = Vec::with_capacity(d);
    let mut deficits = Vec::new();
    for &v in &base_verts {
        let blocked: Vec<usize> = if r.len() < b {
            // Cheaper to scan R than the cloud when R is small.
            r.iter().filter(|&gid| gid / b == v).map(|gid| gid % b).collect()
        } else {
            (0..b).filter(|&i| r.contains(hp.cloud_vertex(v, i))).collect()
        };
        let free = b - blocked.len();
        if (free as u128) < w {
            deficits.push(CloudShortfall { base_vertex: v, free, needed: w });
        }
        allocs.push(CloudAlloc::new(blocked));
    }
    if !deficits.is_empty() {
        return Err(ReductionError::CloudDeficit { deficits });
    }

    // Exact node counts and per-cloud allocation schedule, level by level.
    let two_k = 2 * k;
    let mut counts = vec![0u128; two_k];
    counts[0] = 1;
    let mut alloc_at = vec![vec![0u128; d]; two_k];
    alloc_at[0] = vec![1; d];
    let mut cloud_per = vec![1u128; d];
    for level in 1..two_k {
        let fan = if level % 2 == 1 {
            if level == 1 { d } else { d - 1 }
        } else {
            k - 1
        } as u128;
        counts[level] = counts[level - 1]
            .checked_mul(fan)
            .ok_or(ReductionError::Overflow)?;
        if level % 2 == 0 {
            let total: u128 = cloud_per.iter().sum();
            for l in 0..d {
                // Every new hyperedge copy under a cloud vertex outside
                // cloud l takes one fresh index from cloud l.
                alloc_at[level][l] = (total - cloud_per[l])
                    .checked_mul(k as u128 - 1)
                    .ok_or(ReductionError::Overflow)?;
            }
            cloud_per = alloc_at[level].clone();
        }
    }
    debug_assert!((0..d).all(|l| {
        (0..two_k).map(|lev| alloc_at[lev][l]).sum::<u128>() == requirement
    }));

    // Materialize whole levels from the top while they fit, never fewer
    // than the k levels the embedding walks.
    let mut stored_levels = 0;
    let mut cum = 0u128;
    for &c in &counts {
        if cum + c <= store_limit as u128 {
            cum += c;
            stored_levels += 1;
        } else {
            break;
        }
    }
    stored_levels = stored_levels.max(k).min(two_k);
    let stored_total: usize = counts[..stored_levels]
        .iter()
        .map(|&c| usize::try_from(c).expect("stored level counts fit in memory"))
        .sum();
    assert!(stored_total as u128 <= u32::MAX as u128, "stored prefix fits u32 parent links");

    let mut nodes: Vec<WitnessNode> = Vec::with_capacity(stored_total);
    let mut level_offsets = vec![0usize];

    // Root: one fresh index per cloud, copy 0.
    let tuple0: Vec<usize> = (0..d).map(|l| allocs[l].take()).collect();
    let root_id = hp.hyperedge_id(base_edge, &tuple0, 0);
    nodes.push(WitnessNode { g: hp.g_hyperedge(root_id), parent: None });
    level_offsets.push(1);

    // Per-node construction state for the previous level.
    let mut he_tuples: Vec<usize> = tuple0.clone();
    let mut he_ppos: Vec<u8> = vec![u8::MAX];
    let mut cloud_meta: Vec<(u8, usize)> = Vec::new();

    for level in 1..two_k {
        if level >= stored_levels {
            if level % 2 == 0 {
                for l in 0..d {
                    let c = usize::try_from(alloc_at[level][l])
                        .expect("allocations bounded by the cloud size");
                    allocs[l].skip(c);
                }
            }
            continue;
        }
        let parent_base = level_offsets[level - 1];
        if level % 2 == 1 {
            // Cloud vertices: the non-parent members of each hyperedge
            // copy, already named by its tuple.
            let mut next_cloud =
                Vec::with_capacity(usize::try_from(counts[level]).expect("stored level"));
            for (local, chunk) in he_tuples.chunks(d).enumerate() {
                let ppos = he_ppos[local];
                for (l, &i) in chunk.iter().enumerate() {
                    if l as u8 == ppos {
                        continue;
                    }
                    let gid = hp.g_cloud(hp.cloud_vertex(base_verts[l], i));
                    nodes.push(WitnessNode {
                        g: gid,
                        parent: Some((parent_base + local) as u32),
                    });
                    next_cloud.push((l as u8, i));
                }
            }
            cloud_meta = next_cloud;
        } else {
            // Hyperedge copies: k - 1 per cloud vertex, each reusing the
            // parent index and drawing fresh ones elsewhere.
            let cnt = usize::try_from(counts[level]).expect("stored level");
            let mut next_tuples = Vec::with_capacity(cnt * d);
            let mut next_ppos = Vec::with_capacity(cnt);
            let before: Vec<u128> = allocs.iter().map(|a| a.used).collect();
            for (local, &(pl, pi)) in cloud_meta.iter().enumerate() {
                for _ in 0..k - 1 {
                    let start = next_tuples.len();
                    for (l, alloc) in allocs.iter_mut().enumerate() {
                        let i = if l == pl as usize { pi } else { alloc.take() };
                        next_tuples.push(i);
                    }
                    let he = hp.hyperedge_id(base_edge, &next_tuples[start..], 0);
                    nodes.push(WitnessNode {
                        g: hp.g_hyperedge(he),
                        parent: Some((parent_base + local) as u32),
                    });
                    next_ppos.push(pl);
                }
            }
            for l in 0..d {
                assert_eq!(allocs[l].used - before[l], alloc_at[level][l]);
            }
            he_tuples = next_tuples;
            he_ppos = next_ppos;
        }
        level_offsets.push(nodes.len());
    }
    drop(he_tuples);
    drop(cloud_meta);

    let consumed_per_cloud: Vec<u128> = allocs.iter().map(|a| a.used).collect();
    for (l, a) in allocs.iter().enumerate() {
        assert!(a.next <= b, "cloud {l} ran past its size");
        assert_eq!(a.used, requirement, "cloud {l} consumption off schedule");
    }

    let tree = WitnessTree {
        base_edge,
        k,
        delta: d,
        total_nodes: counts.iter().sum(),
        level_counts: counts,
        consumed_per_cloud,
        requirement,
        stored_levels,
        nodes,
        level_offsets,
        pool_first: tuple0,
    };
    let embedding = embed_pattern(&tree, t);
    assert!(verify_wide_embedding(hp, t, &embedding));
    assert!(embedding
        .map()
        .iter()
        .all(|&gid| gid >= nv as u128 || !r.contains(gid as usize)));
    Ok(Witness { tree, embedding })
}

/// Walks the pattern breadth-first from its heaviest vertex and maps each
/// vertex onto the next unused child one level down. Degrees always fit:
/// the root has the full `delta` fan, later even levels need at most
/// `delta - 1` and odd levels at most `k - 2`.
fn embed_pattern(tree: &WitnessTree, t: &TreePattern) -> WideEmbedding {
    let (order, parent_pos) = pattern_order(t);
    let mut node_of = vec![usize::MAX; t.k()];
    let mut next_child = vec![usize::MAX; t.k()];
    node_of[order[0]] = 0;
    next_child[order[0]] = tree.children_range(0).expect("level 1 is stored").start;
    for pos in 1..order.len() {
        let u = order[pos];
        let p = order[parent_pos[pos]];
        let idx = next_child[p];
        next_child[p] += 1;
        debug_assert!(tree
            .children_range(node_of[p])
            .is_some_and(|range| range.contains(&idx)));
        node_of[u] = idx;
        if let Some(range) = tree.children_range(idx) {
            next_child[u] = range.start;
        }
    }
    WideEmbedding {
        map: node_of.iter().map(|&idx| tree.node(idx).g).collect(),
    }
}
