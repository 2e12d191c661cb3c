//! The incidence reduction from d-uniform hypergraph vertex cover to
//! minimum T-transversal, for tree patterns with `delta(T) = d >= 3`.
//!
//! Construction, in two steps:
//!
//! 1. **Extension.** Every base vertex `v` becomes a cloud `{v} x [B]` of
//!    `B` look-alike vertices. Every base hyperedge `(v_1, ..., v_d)`
//!    spawns one hyperedge per index tuple `(i_1, ..., i_d)` in `[B]^d`,
//!    each duplicated `C` times, giving `m * B^d * C` hyperedges on
//!    `n * B` vertices.
//! 2. **Incidence graph.** The extension's bipartite incidence graph `G`:
//!    one vertex per cloud member, one per extended hyperedge, an edge for
//!    each membership. Hyperedge-side vertices have degree exactly `d`.
//!
//! Extended hyperedges are indexed by closed formulas, so an
//! [`ExtendedHypergraph`] is cheap no matter how large `B` and `C` are;
//! only [`incidence_graph`] materializes anything, and it is guarded by a
//! size cap. The witness construction (see [`witness`]) deliberately runs
//! on instances far beyond the cap and works purely through the formulas.
//!
//! Identifier layout: extended vertex `(v, i)` has id `v * B + i`; these
//! double as the low ids of `G`. Extended hyperedge `(e, tuple, j)` has id
//! `(e * B^d + rank(tuple)) * C + j` (tuple digits are big-endian in the
//! sorted base hyperedge positions), and its `G`-vertex id follows the
//! cloud block. `G` ids are `u128`: beyond the cap they exceed `usize`.

pub mod witness;

use thiserror::Error;

use crate::detect::{degree_prune_check, detect_bruteforce, PruneOutcome};
use crate::graph::{Graph, VertexSet};
use crate::hypergraph::Hypergraph;
use crate::pattern::TreePattern;

pub use witness::{
    build_witness, build_witness_with_limit, witness_requirement, verify_wide_embedding,
    WideEmbedding, Witness, WitnessNode, WitnessTree, DEFAULT_WITNESS_STORE_LIMIT,
};

/// Default ceiling on `|V(G)|` for materialized reductions.
pub const DEFAULT_SIZE_CAP: u128 = 10_000_000;

/// Exact rational gap parameter in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eps {
    num: u64,
    den: u64,
}

impl Eps {
    pub fn new(num: u64, den: u64) -> Option<Self> {
        if num == 0 || den == 0 || num >= den {
            return None;
        }
        Some(Eps { num, den })
    }

    pub fn one_half() -> Self {
        Eps { num: 1, den: 2 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Exact test of `size <= limit / (delta - 1 - eps)`.
    pub fn cover_bound_holds(&self, size: u128, limit: u128, delta: usize) -> bool {
        // size * ((delta - 1) * den - num) <= limit * den, all in u128.
        let scaled = (delta as u128 - 1) * self.den as u128 - self.num as u128;
        size.checked_mul(scaled)
            .zip(limit.checked_mul(self.den as u128))
            .map(|(lhs, rhs)| lhs <= rhs)
            .unwrap_or(false)
    }
}

impl std::fmt::Display for Eps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Parameters of one reduction run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionParams {
    /// Cloud size `B >= 1`.
    pub cloud_size: usize,
    /// Copies per extended hyperedge, `C >= 1`.
    pub copies: usize,
    /// Occupancy slack `w`; soundness analysis needs `w < B`.
    pub slack: u128,
    /// Gap parameter for the cover-size accounting.
    pub eps: Eps,
}

impl ReductionParams {
    pub fn new(cloud_size: usize, copies: usize, slack: u128, eps: Eps) -> Option<Self> {
        if cloud_size == 0 || copies == 0 {
            return None;
        }
        Some(ReductionParams { cloud_size, copies, slack, eps })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("pattern delta {pattern_delta} does not match hypergraph uniformity {uniformity}")]
    DeltaMismatch { pattern_delta: usize, uniformity: usize },
    #[error("reduction needs delta >= 3, got {delta}")]
    DeltaTooSmall { delta: usize },
    #[error("instance would have {g_vertices} incidence-graph vertices, over the cap of {cap}")]
    SizeCapExceeded { g_vertices: u128, cap: u128 },
    #[error("size computation overflowed 128 bits")]
    Overflow,
    #[error("solution does not cover the hypergraph; hyperedge {hyperedge} is uncovered")]
    NotACover { hyperedge: usize },
    #[error("slack w = {w} must be smaller than the cloud size B = {b}")]
    DegenerateThreshold { w: u128, b: usize },
    #[error("slack w = {w} is below the construction's requirement {required}")]
    SlackTooSmall { w: u128, required: u128 },
    #[error("clouds lack R-avoiding indices: {}", render_deficits(.deficits))]
    CloudDeficit { deficits: Vec<CloudShortfall> },
    #[error("soundness mode needs B > {minimum_minus_one}, got B = {b}")]
    SoundnessNeedsLargerB { b: usize, minimum_minus_one: u128 },
    #[error("solution contains hyperedge-side vertex {vertex}; project it first (classify_occupied does)")]
    UnprojectedSolution { vertex: usize },
    #[error("parameters (B={params_b}, C={params_c}) disagree with the extension (B={ext_b}, C={ext_c})")]
    ParamsMismatch { params_b: usize, params_c: usize, ext_b: usize, ext_c: usize },
    #[error("base hyperedge index {index} out of range (m = {m})")]
    BadBaseEdge { index: usize, m: usize },
    #[error("invalid parameters: {msg}")]
    BadParams { msg: String },
}

/// Per-cloud shortfall of R-avoiding indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CloudShortfall {
    pub base_vertex: usize,
    pub free: usize,
    pub needed: u128,
}

fn render_deficits(d: &[CloudShortfall]) -> String {
    d.iter()
        .map(|s| format!("cloud {} has {} free, needs {}", s.base_vertex, s.free, s.needed))
        .collect::<Vec<_>>()
        .join("; ")
}

/// The extension of a base hypergraph by clouds and copies. Stores only the
/// base and the index geometry; hyperedges are enumerated through formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedHypergraph {
    base: Hypergraph,
    cloud_size: usize,
    copies: usize,
    /// `cloud_size^(d-1-l)` for each tuple position `l`.
    pow: Vec<u128>,
    hyperedge_count: u128,
}

impl ExtendedHypergraph {
    pub fn base(&self) -> &Hypergraph {
        &self.base
    }

    pub fn cloud_size(&self) -> usize {
        self.cloud_size
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn delta(&self) -> usize {
        self.base.d()
    }

    /// `|V(H')| = n * B`.
    pub fn vertex_count(&self) -> usize {
        self.base.n() * self.cloud_size
    }

    /// `|E(H')| = m * B^d * C`.
    pub fn hyperedge_count(&self) -> u128 {
        self.hyperedge_count
    }

    /// `|V(G)| = |V(H')| + |E(H')|`.
    pub fn g_vertex_count(&self) -> u128 {
        self.vertex_count() as u128 + self.hyperedge_count
    }

    /// `|E(G)| = d * |E(H')|`.
    pub fn g_edge_count(&self) -> u128 {
        self.base.d() as u128 * self.hyperedge_count
    }

    /// Id of cloud member `(v, i)`.
    pub fn cloud_vertex(&self, v: usize, i: usize) -> usize {
        debug_assert!(v < self.base.n() && i < self.cloud_size);
        v * self.cloud_size + i
    }

    /// Inverse of [`Self::cloud_vertex`].
    pub fn cloud_of(&self, id: usize) -> (usize, usize) {
        debug_assert!(id < self.vertex_count());
        (id / self.cloud_size, id % self.cloud_size)
    }

    /// Id of the extended hyperedge over base hyperedge `e`, index tuple
    /// `tuple` (one index per sorted position), copy `j`.
    pub fn hyperedge_id(&self, e: usize, tuple: &[usize], j: usize) -> u128 {
        debug_assert!(e < self.base.m());
        debug_assert_eq!(tuple.len(), self.base.d());
        debug_assert!(j < self.copies);
        let mut rank = 0u128;
        for (l, &i) in tuple.iter().enumerate() {
            debug_assert!(i < self.cloud_size);
            rank += i as u128 * self.pow[l];
        }
        (e as u128 * self.pow_d() + rank) * self.copies as u128 + j as u128
    }

    fn pow_d(&self) -> u128 {
        self.pow[0] * self.cloud_size as u128
    }

    /// Inverse of [`Self::hyperedge_id`].
    pub fn hyperedge_unpack(&self, id: u128) -> (usize, Vec<usize>, usize) {
        debug_assert!(id < self.hyperedge_count);
        let j = (id % self.copies as u128) as usize;
        let t = id / self.copies as u128;
        let e = (t / self.pow_d()) as usize;
        let mut rank = t % self.pow_d();
        let mut tuple = Vec::with_capacity(self.base.d());
        for l in 0..self.base.d() {
            tuple.push((rank / self.pow[l]) as usize);
            rank %= self.pow[l];
        }
        (e, tuple, j)
    }

    /// Cloud-member ids of an extended hyperedge given its base edge and
    /// tuple. Ascending, because base hyperedges are sorted.
    pub fn members_of(&self, e: usize, tuple: &[usize]) -> Vec<usize> {
        self.base
            .hyperedge(e)
            .iter()
            .zip(tuple)
            .map(|(&v, &i)| self.cloud_vertex(v, i))
            .collect()
    }

    pub fn hyperedge_members(&self, id: u128) -> Vec<usize> {
        let (e, tuple, _) = self.hyperedge_unpack(id);
        self.members_of(e, &tuple)
    }

    /// `G`-vertex id of a cloud member.
    pub fn g_cloud(&self, id: usize) -> u128 {
        id as u128
    }

    /// `G`-vertex id of an extended hyperedge.
    pub fn g_hyperedge(&self, id: u128) -> u128 {
        self.vertex_count() as u128 + id
    }

    /// Adjacency oracle for `G`, valid at any scale.
    pub fn g_adjacent(&self, a: u128, b: u128) -> bool {
        let nv = self.vertex_count() as u128;
        let (cloud, he) = if a < nv && b >= nv {
            (a as usize, b - nv)
        } else if b < nv && a >= nv {
            (b as usize, a - nv)
        } else {
            return false;
        };
        if he >= self.hyperedge_count {
            return false;
        }
        let (v, i) = self.cloud_of(cloud);
        let (e, tuple, _) = self.hyperedge_unpack(he);
        self.base
            .hyperedge(e)
            .iter()
            .position(|&u| u == v)
            .is_some_and(|l| tuple[l] == i)
    }
}

/// Builds the extension, refusing instances whose incidence graph would
/// have more than `cap` vertices.
pub fn extend_hypergraph(
    h: &Hypergraph,
    cloud_size: usize,
    copies: usize,
    cap: u128,
) -> Result<ExtendedHypergraph, ReductionError> {
    if cloud_size == 0 || copies == 0 {
        return Err(ReductionError::BadParams { msg: "B and C must be at least 1".into() });
    }
    let d = h.d();
    let mut pow = vec![1u128; d];
    for l in (0..d - 1).rev() {
        pow[l] = pow[l + 1]
            .checked_mul(cloud_size as u128)
            .ok_or(ReductionError::Overflow)?;
    }
    let pow_d = pow[0]
        .checked_mul(cloud_size as u128)
        .ok_or(ReductionError::Overflow)?;
    let hyperedge_count = (h.m() as u128)
        .checked_mul(pow_d)
        .and_then(|x| x.checked_mul(copies as u128))
        .ok_or(ReductionError::Overflow)?;
    let n_cloud = (h.n() as u128)
        .checked_mul(cloud_size as u128)
        .ok_or(ReductionError::Overflow)?;
    if usize::try_from(n_cloud).is_err() {
        return Err(ReductionError::Overflow);
    }
    let g_vertices = n_cloud
        .checked_add(hyperedge_count)
        .ok_or(ReductionError::Overflow)?;
    if g_vertices > cap {
        return Err(ReductionError::SizeCapExceeded { g_vertices, cap });
    }
    Ok(ExtendedHypergraph {
        base: h.clone(),
        cloud_size,
        copies,
        pow,
        hyperedge_count,
    })
}

/// A materialized reduction: the extension, its incidence graph, and the
/// id maps into `G`.
#[derive(Debug, Clone)]
pub struct ReductionArtifacts {
    pub hprime: ExtendedHypergraph,
    pub g: Graph,
    /// `vmap[v']` is the `G`-vertex of extended vertex `v'` (the identity).
    pub vmap: Vec<usize>,
    /// `emap[e']` is the `G`-vertex of extended hyperedge `e'`.
    pub emap: Vec<usize>,
    pub params: ReductionParams,
}

impl ReductionArtifacts {
    /// Number of cloud-side vertices; `G` ids below this are cloud members.
    pub fn cloud_vertices(&self) -> usize {
        self.hprime.vertex_count()
    }
}

/// Materializes the incidence graph of an extension. `params` must agree
/// with the extension's `B` and `C`.
pub fn incidence_graph(
    hp: &ExtendedHypergraph,
    params: ReductionParams,
) -> Result<ReductionArtifacts, ReductionError> {
    if params.cloud_size != hp.cloud_size() || params.copies != hp.copies() {
        return Err(ReductionError::ParamsMismatch {
            params_b: params.cloud_size,
            params_c: params.copies,
            ext_b: hp.cloud_size(),
            ext_c: hp.copies(),
        });
    }
    let nv = hp.vertex_count();
    let ne = usize::try_from(hp.hyperedge_count()).map_err(|_| ReductionError::Overflow)?;
    let n_g = nv.checked_add(ne).ok_or(ReductionError::Overflow)?;
    let d = hp.delta();
    let mut edges = Vec::with_capacity(ne.checked_mul(d).ok_or(ReductionError::Overflow)?);
    for he in 0..ne {
        let gv = nv + he;
        for member in hp.hyperedge_members(he as u128) {
            edges.push((member, gv));
        }
    }
    let g = Graph::new(n_g, &edges).expect("incidence construction yields a simple graph");
    debug_assert_eq!(g.m() as u128, hp.g_edge_count());
    Ok(ReductionArtifacts {
        hprime: hp.clone(),
        g,
        vmap: (0..nv).collect(),
        emap: (nv..nv + ne).collect(),
        params,
    })
}

/// Lifts a base cover to the extension: `S' = S x [B]`.
pub fn lift_cover(s: &VertexSet, cloud_size: usize) -> VertexSet {
    VertexSet::from_iter(
        s.iter()
            .flat_map(|v| (0..cloud_size).map(move |i| v * cloud_size + i)),
    )
}

/// Lift with a cover check: `S'` covers the extension exactly when `S`
/// covers the base, so the base is checked directly.
pub fn lift_cover_checked(
    hp: &ExtendedHypergraph,
    s: &VertexSet,
) -> Result<VertexSet, ReductionError> {
    if let Some(hyperedge) = hp.base().uncovered_hyperedge(s) {
        return Err(ReductionError::NotACover { hyperedge });
    }
    Ok(lift_cover(s, hp.cloud_size()))
}

/// Outcome of one completeness check; see [`verify_completeness`].
#[derive(Debug, Clone)]
pub struct CompletenessReport {
    pub pass: bool,
    /// Whether the given solution covers the base hypergraph.
    pub covers: bool,
    pub uncovered_hyperedge: Option<usize>,
    pub s_prime_size: usize,
    /// Max degree on the hyperedge side of `G` after deleting `S'`.
    pub hyperedge_side_max_degree: usize,
    pub residual_vertices: usize,
    pub prune: PruneOutcome,
    /// Whether the residual was small enough to brute-force.
    pub detector_ran: bool,
    /// A pattern copy in the residual (original `G` ids); fatal for the
    /// completeness direction.
    pub copy_found: Option<Vec<usize>>,
    /// Whether `|S'| <= B * n / (delta - 1 - eps)` held.
    pub gap_bound_holds: bool,
}

impl CompletenessReport {
    /// Line-oriented rendering used by the command-line tools.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "covers {}\n",
            if self.covers { "yes".into() } else {
                format!("no (hyperedge {})", self.uncovered_hyperedge.unwrap())
            }
        ));
        out.push_str(&format!("s_prime_size {}\n", self.s_prime_size));
        out.push_str(&format!(
            "hyperedge_side_max_degree {}\n",
            self.hyperedge_side_max_degree
        ));
        out.push_str(&format!("residual_vertices {}\n", self.residual_vertices));
        match &self.prune {
            PruneOutcome::CertifiedAbsent { side, side_max_degree } => out.push_str(&format!(
                "degree_prune certified_absent side {side} max_degree {side_max_degree}\n"
            )),
            PruneOutcome::Unknown { reason } => {
                out.push_str(&format!("degree_prune unknown ({reason})\n"))
            }
        }
        match (self.detector_ran, &self.copy_found) {
            (false, _) => out.push_str("detector skipped (residual too large)\n"),
            (true, None) => out.push_str("detector none\n"),
            (true, Some(copy)) => {
                let ids: Vec<String> = copy.iter().map(|v| v.to_string()).collect();
                out.push_str(&format!("detector copy {}\n", ids.join(" ")));
            }
        }
        out.push_str(&format!(
            "gap_bound {}\n",
            if self.gap_bound_holds { "holds" } else { "violated" }
        ));
        out.push_str(&format!("result {}\n", if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

/// Executable completeness check: lift the cover, delete it from `G`, and
/// confirm the residual cannot contain the pattern.
///
/// A covering `S` leaves every hyperedge-side vertex with degree at most
/// `delta - 1`, which certifies absence via [`degree_prune_check`]; when
/// the residual has at most `detect_limit` vertices, brute force confirms
/// it independently.
pub fn verify_completeness(
    h: &Hypergraph,
    t: &TreePattern,
    s: &VertexSet,
    params: ReductionParams,
    cap: u128,
    detect_limit: usize,
) -> Result<CompletenessReport, ReductionError> {
    check_compatible(h, t)?;
    let hp = extend_hypergraph(h, params.cloud_size, params.copies, cap)?;
    let artifacts = incidence_graph(&hp, params)?;
    Ok(completeness_report(&artifacts, t, s, detect_limit))
}

/// The completeness check on already-materialized artifacts.
pub fn completeness_report(
    artifacts: &ReductionArtifacts,
    t: &TreePattern,
    s: &VertexSet,
    detect_limit: usize,
) -> CompletenessReport {
    let hp = &artifacts.hprime;
    let uncovered_hyperedge = hp.base().uncovered_hyperedge(s);
    let covers = uncovered_hyperedge.is_none();
    let s_prime = lift_cover(s, hp.cloud_size());
    let (residual, old_ids) = artifacts.g.delete_vertices(&s_prime);
    let nv = artifacts.cloud_vertices();
    let hyperedge_side_max_degree = (0..residual.n())
        .filter(|&v| old_ids[v] >= nv)
        .map(|v| residual.degree(v))
        .max()
        .unwrap_or(0);
    let prune = degree_prune_check(&residual, t);
    let detector_ran = residual.n() <= detect_limit;
    let copy_found = if detector_ran {
        detect_bruteforce(&residual, t)
            .map(|e| e.map().iter().map(|&v| old_ids[v]).collect::<Vec<usize>>())
    } else {
        None
    };
    let gap_bound_holds = artifacts.params.eps.cover_bound_holds(
        s_prime.len() as u128,
        hp.cloud_size() as u128 * hp.base().n() as u128,
        t.delta(),
    );
    let pass = covers
        && hyperedge_side_max_degree < t.delta()
        && prune.is_certified()
        && copy_found.is_none();
    CompletenessReport {
        pass,
        covers,
        uncovered_hyperedge,
        s_prime_size: s_prime.len(),
        hyperedge_side_max_degree,
        residual_vertices: residual.n(),
        prune,
        detector_ran,
        copy_found,
        gap_bound_holds,
    }
}

fn check_compatible(h: &Hypergraph, t: &TreePattern) -> Result<(), ReductionError> {
    if t.delta() != h.d() {
        return Err(ReductionError::DeltaMismatch {
            pattern_delta: t.delta(),
            uniformity: h.d(),
        });
    }
    if t.delta() < 3 {
        return Err(ReductionError::DeltaTooSmall { delta: t.delta() });
    }
    Ok(())
}

/// Occupancy analysis of a claimed transversal `R` over `G`'s cloud side.
#[derive(Debug, Clone)]
pub struct OccupancyReport {
    /// `B - w`: a cloud with at least this many `R`-members is occupied.
    pub threshold: usize,
    /// `|R ∩ cloud(v)|` per base vertex.
    pub counts: Vec<usize>,
    /// Base vertices whose clouds are occupied; this is the derived cover
    /// candidate.
    pub occupied: VertexSet,
    /// Base hyperedges all of whose endpoints are unoccupied.
    pub free_hyperedges: Vec<usize>,
    /// Hyperedge-side vertices of `R`, dropped before analysis.
    pub projected_out: VertexSet,
    /// `|R|` after projection.
    pub r_cloud_size: usize,
    /// With no free hyperedge: whether `|R| >= occupied * (B - w)` held
    /// (it must).
    pub counting_bound_ok: bool,
}

impl OccupancyReport {
    pub fn derived_cover(&self) -> &VertexSet {
        &self.occupied
    }

    pub fn has_free_hyperedge(&self) -> bool {
        !self.free_hyperedges.is_empty()
    }
}

/// Classifies clouds as occupied or free under slack `w`: a base vertex is
/// occupied when `R` hits its cloud in at least `B - w` members. Vertices
/// of `R` on the hyperedge side are projected out (reported, not an
/// error). Requires `w < B`.
pub fn classify_occupied(
    hp: &ExtendedHypergraph,
    r: &VertexSet,
    w: u128,
) -> Result<OccupancyReport, ReductionError> {
    let b = hp.cloud_size();
    if w >= b as u128 {
        return Err(ReductionError::DegenerateThreshold { w, b });
    }
    let threshold = b - w as usize;
    let nv = hp.vertex_count();
    let mut counts = vec![0usize; hp.base().n()];
    let mut projected_out = Vec::new();
    let mut r_cloud_size = 0usize;
    for gid in r.iter() {
        if gid < nv {
            counts[hp.cloud_of(gid).0] += 1;
            r_cloud_size += 1;
        } else {
            projected_out.push(gid);
        }
    }
    let occupied = VertexSet::from_iter(
        counts
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c >= threshold)
            .map(|(v, _)| v),
    );
    let free_hyperedges: Vec<usize> = (0..hp.base().m())
        .filter(|&e| hp.base().hyperedge(e).iter().all(|&v| !occupied.contains(v)))
        .collect();
    let counting_bound_ok = if free_hyperedges.is_empty() {
        // Occupied clouds are disjoint and each holds >= threshold members
        // of R, so this cannot fail.
        let ok = r_cloud_size >= occupied.len() * threshold;
        debug_assert!(ok);
        debug_assert!(hp.base().is_covered_by(&occupied));
        ok
    } else {
        true
    };
    Ok(OccupancyReport {
        threshold,
        counts,
        occupied,
        free_hyperedges,
        projected_out: VertexSet::from_iter(projected_out),
        r_cloud_size,
        counting_bound_ok,
    })
}

/// Planning mode for [`plan_parameters`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    /// Smallest instance exercising the construction: user-chosen `B`
    /// (default 2), `C = 1`.
    Structural,
    /// `C = 2 n B + 1`, the smallest count making copy-exchange arguments
    /// go through.
    Claim1,
    /// Additionally `B > w`, so occupancy analysis has genuine slack. At
    /// desk scale this almost always overflows the size cap and is
    /// refused, with the numbers reported in the error.
    Soundness,
}

impl PlanMode {
    pub fn name(self) -> &'static str {
        match self {
            PlanMode::Structural => "structural",
            PlanMode::Claim1 => "claim1",
            PlanMode::Soundness => "soundness",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "structural" => Some(PlanMode::Structural),
            "claim1" => Some(PlanMode::Claim1),
            "soundness" => Some(PlanMode::Soundness),
            _ => None,
        }
    }
}

/// Exact instance sizes implied by a parameter choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedSizes {
    pub hprime_vertices: u128,
    pub hprime_hyperedges: u128,
    pub g_vertices: u128,
    pub g_edges: u128,
}

/// A planned parameter set plus the bookkeeping around it.
#[derive(Debug, Clone)]
pub struct Plan {
    pub mode: PlanMode,
    pub params: ReductionParams,
    /// Exact slack the witness construction would consume per cloud.
    pub witness_requirement: u128,
    /// The crude closed-form ceiling `k^(3k)` on the same quantity, if it
    /// fits in 128 bits.
    pub crude_slack_bound: Option<u128>,
    pub sizes: PlannedSizes,
}

fn planned_sizes(h: &Hypergraph, b: usize, c: usize) -> Result<PlannedSizes, ReductionError> {
    let bd = (0..h.d()).try_fold(1u128, |acc, _| {
        acc.checked_mul(b as u128).ok_or(ReductionError::Overflow)
    })?;
    let hprime_vertices = (h.n() as u128)
        .checked_mul(b as u128)
        .ok_or(ReductionError::Overflow)?;
    let hprime_hyperedges = (h.m() as u128)
        .checked_mul(bd)
        .and_then(|x| x.checked_mul(c as u128))
        .ok_or(ReductionError::Overflow)?;
    let g_vertices = hprime_vertices
        .checked_add(hprime_hyperedges)
        .ok_or(ReductionError::Overflow)?;
    let g_edges = hprime_hyperedges
        .checked_mul(h.d() as u128)
        .ok_or(ReductionError::Overflow)?;
    Ok(PlannedSizes { hprime_vertices, hprime_hyperedges, g_vertices, g_edges })
}

/// Chooses reduction parameters for a mode, refusing anything whose
/// incidence graph would blow past `cap` vertices.
pub fn plan_parameters(
    h: &Hypergraph,
    t: &TreePattern,
    mode: PlanMode,
    b_override: Option<usize>,
    cap: u128,
) -> Result<Plan, ReductionError> {
    check_compatible(h, t)?;
    let requirement = witness_requirement(t).ok_or(ReductionError::Overflow)?;
    let crude_slack_bound = checked_pow(t.k() as u128, 3 * t.k() as u32);
    let b = match mode {
        PlanMode::Structural | PlanMode::Claim1 => b_override.unwrap_or(2),
        PlanMode::Soundness => {
            let minimum = requirement
                .checked_add(1)
                .ok_or(ReductionError::Overflow)?;
            match b_override {
                Some(b) => {
                    if (b as u128) < minimum {
                        return Err(ReductionError::SoundnessNeedsLargerB {
                            b,
                            minimum_minus_one: requirement,
                        });
                    }
                    b
                }
                None => usize::try_from(minimum).map_err(|_| ReductionError::Overflow)?,
            }
        }
    };
    if b == 0 {
        return Err(ReductionError::BadParams { msg: "B must be at least 1".into() });
    }
    let c = match mode {
        PlanMode::Structural => 1usize,
        PlanMode::Claim1 | PlanMode::Soundness => {
            // Smallest C with C > 2 |V(H')|.
            (h.n())
                .checked_mul(b)
                .and_then(|nb| nb.checked_mul(2))
                .and_then(|x| x.checked_add(1))
                .ok_or(ReductionError::Overflow)?
        }
    };
    let sizes = planned_sizes(h, b, c)?;
    if sizes.g_vertices > cap {
        return Err(ReductionError::SizeCapExceeded { g_vertices: sizes.g_vertices, cap });
    }
    let params = ReductionParams::new(b, c, requirement, Eps::one_half())
        .expect("planned parameters are positive");
    Ok(Plan { mode, params, witness_requirement: requirement, crude_slack_bound, sizes })
}

fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::bipartition;
    use crate::pattern::{generate_pattern, PatternKind};

    fn tiny_instance() -> (Hypergraph, TreePattern) {
        let h = Hypergraph::new(4, 3, &[vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        let t = generate_pattern(PatternKind::DoubleStar, 3, 0).unwrap();
        (h, t)
    }

    #[test]
    fn extension_sizes_are_exact() {
        let (h, _) = tiny_instance();
        for (b, c) in [(1, 1), (2, 1), (2, 3), (3, 2)] {
            let hp = extend_hypergraph(&h, b, c, DEFAULT_SIZE_CAP).unwrap();
            assert_eq!(hp.vertex_count(), 4 * b);
            assert_eq!(
                hp.hyperedge_count(),
                2 * (b as u128).pow(3) * c as u128
            );
            assert_eq!(
                hp.g_vertex_count(),
                hp.vertex_count() as u128 + hp.hyperedge_count()
            );
        }
    }

    #[test]
    fn hyperedge_ids_round_trip() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 3, 2, DEFAULT_SIZE_CAP).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for id in 0..hp.hyperedge_count() {
            let (e, tuple, j) = hp.hyperedge_unpack(id);
            assert_eq!(hp.hyperedge_id(e, &tuple, j), id);
            assert!(seen.insert((e, tuple, j)));
        }
        assert_eq!(seen.len() as u128, hp.hyperedge_count());
    }

    #[test]
    fn cloud_ids_round_trip() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 5, 1, DEFAULT_SIZE_CAP).unwrap();
        for id in 0..hp.vertex_count() {
            let (v, i) = hp.cloud_of(id);
            assert_eq!(hp.cloud_vertex(v, i), id);
        }
    }

    #[test]
    fn copies_share_members() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 2, 3, DEFAULT_SIZE_CAP).unwrap();
        for id in 0..hp.hyperedge_count() {
            let (e, tuple, j) = hp.hyperedge_unpack(id);
            if j > 0 {
                let sibling = hp.hyperedge_id(e, &tuple, 0);
                assert_eq!(hp.hyperedge_members(id), hp.hyperedge_members(sibling));
            }
        }
    }

    #[test]
    fn cap_refusal_reports_size() {
        let (h, _) = tiny_instance();
        let err = extend_hypergraph(&h, 100, 1, 1000).unwrap_err();
        match err {
            ReductionError::SizeCapExceeded { g_vertices, cap } => {
                assert_eq!(g_vertices, 400 + 2 * 100u128.pow(3));
                assert_eq!(cap, 1000);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn incidence_graph_shape() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 2, 2, DEFAULT_SIZE_CAP).unwrap();
        let params = ReductionParams::new(2, 2, 0, Eps::one_half()).unwrap();
        let art = incidence_graph(&hp, params).unwrap();
        let nv = art.cloud_vertices();
        assert_eq!(art.g.n() as u128, hp.g_vertex_count());
        assert_eq!(art.g.m() as u128, hp.g_edge_count());
        // Hyperedge side degrees are exactly d.
        for &gv in &art.emap {
            assert_eq!(art.g.degree(gv), h.d());
        }
        // Bipartite with the cloud side on side 0.
        let b = bipartition(&art.g).unwrap();
        for v in 0..nv {
            assert_eq!(b.side(v), 0);
        }
        for &gv in &art.emap {
            assert_eq!(b.side(gv), 1);
        }
    }

    #[test]
    fn adjacency_oracle_matches_materialized_graph() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 2, 2, DEFAULT_SIZE_CAP).unwrap();
        let params = ReductionParams::new(2, 2, 0, Eps::one_half()).unwrap();
        let art = incidence_graph(&hp, params).unwrap();
        let n = art.g.n();
        for a in 0..n {
            for b in 0..n {
                assert_eq!(
                    hp.g_adjacent(a as u128, b as u128),
                    art.g.has_edge(a, b),
                    "pair ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn lift_cover_scales_and_covers() {
        let (h, _) = tiny_instance();
        let s = VertexSet::from_iter([1, 2]);
        let lifted = lift_cover(&s, 3);
        assert_eq!(lifted.len(), 6);
        assert_eq!(lifted.as_slice(), &[3, 4, 5, 6, 7, 8]);
        let hp = extend_hypergraph(&h, 3, 1, DEFAULT_SIZE_CAP).unwrap();
        let checked = lift_cover_checked(&hp, &s).unwrap();
        assert_eq!(checked, lifted);
        // Confirm independently on the materialized extension: every
        // extended hyperedge meets the lift.
        for id in 0..hp.hyperedge_count() {
            assert!(hp.hyperedge_members(id).iter().any(|&m| checked.contains(m)));
        }
        // And a non-cover is named.
        let bad = VertexSet::from_iter([0]);
        assert_eq!(
            lift_cover_checked(&hp, &bad),
            Err(ReductionError::NotACover { hyperedge: 1 })
        );
    }

    #[test]
    fn completeness_passes_for_covers() {
        let (h, t) = tiny_instance();
        let s = VertexSet::from_iter([1]);
        assert!(h.is_covered_by(&s));
        let params = ReductionParams::new(2, 2, 0, Eps::one_half()).unwrap();
        let rep = verify_completeness(&h, &t, &s, params, DEFAULT_SIZE_CAP, 60).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.covers);
        assert!(rep.hyperedge_side_max_degree <= 2);
        assert!(rep.prune.is_certified());
        assert!(rep.detector_ran);
        assert!(rep.copy_found.is_none());
        assert!(rep.gap_bound_holds);
    }

    #[test]
    fn completeness_fails_for_non_covers() {
        let (h, t) = tiny_instance();
        let s = VertexSet::new();
        let params = ReductionParams::new(2, 2, 0, Eps::one_half()).unwrap();
        let rep = verify_completeness(&h, &t, &s, params, DEFAULT_SIZE_CAP, 200).unwrap();
        assert!(!rep.pass);
        assert!(!rep.covers);
        assert_eq!(rep.uncovered_hyperedge, Some(0));
        // With nothing deleted the hyperedge side keeps full degree.
        assert_eq!(rep.hyperedge_side_max_degree, 3);
        assert!(rep.detector_ran);
        assert!(rep.copy_found.is_some(), "the residual contains the pattern");
        let copy = rep.copy_found.unwrap();
        assert_eq!(copy.len(), t.k());
    }

    #[test]
    fn completeness_rejects_mismatched_delta() {
        let (h, _) = tiny_instance();
        let star = generate_pattern(PatternKind::Star, 4, 0).unwrap();
        let params = ReductionParams::new(2, 1, 0, Eps::one_half()).unwrap();
        assert!(matches!(
            verify_completeness(&h, &star, &VertexSet::new(), params, DEFAULT_SIZE_CAP, 60),
            Err(ReductionError::DeltaMismatch { .. })
        ));
        let h2 = Hypergraph::new(3, 2, &[vec![0, 1]]).unwrap();
        let p4 = generate_pattern(PatternKind::Path, 4, 0).unwrap();
        assert!(matches!(
            verify_completeness(&h2, &p4, &VertexSet::new(), params, DEFAULT_SIZE_CAP, 60),
            Err(ReductionError::DeltaTooSmall { delta: 2 })
        ));
    }

    #[test]
    fn classify_counts_and_threshold() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 5, 1, DEFAULT_SIZE_CAP).unwrap();
        // Cloud of vertex 0 is ids 0..5; hit 4 of them, with w = 2 the
        // threshold is 3, so vertex 0 is occupied.
        let r = VertexSet::from_iter([0, 1, 2, 3]);
        let rep = classify_occupied(&hp, &r, 2).unwrap();
        assert_eq!(rep.threshold, 3);
        assert_eq!(rep.counts, vec![4, 0, 0, 0]);
        assert_eq!(rep.occupied.as_slice(), &[0]);
        // Hyperedge {1,2,3} has no occupied endpoint.
        assert_eq!(rep.free_hyperedges, vec![1]);
    }

    #[test]
    fn classify_rejects_degenerate_slack() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 3, 1, DEFAULT_SIZE_CAP).unwrap();
        assert!(matches!(
            classify_occupied(&hp, &VertexSet::new(), 3),
            Err(ReductionError::DegenerateThreshold { .. })
        ));
    }

    #[test]
    fn classify_projects_hyperedge_side() {
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 2, 1, DEFAULT_SIZE_CAP).unwrap();
        let nv = hp.vertex_count();
        let r = VertexSet::from_iter([0, nv, nv + 3]);
        let rep = classify_occupied(&hp, &r, 1).unwrap();
        assert_eq!(rep.projected_out.as_slice(), &[nv, nv + 3]);
        assert_eq!(rep.r_cloud_size, 1);
    }

    #[test]
    fn classify_lifted_cover_with_zero_slack() {
        // The derived cover of a lifted cover is the cover itself.
        let (h, _) = tiny_instance();
        let hp = extend_hypergraph(&h, 3, 2, DEFAULT_SIZE_CAP).unwrap();
        let s = VertexSet::from_iter([1, 3]);
        let lifted = lift_cover_checked(&hp, &s).unwrap();
        let rep = classify_occupied(&hp, &lifted, 0).unwrap();
        assert_eq!(rep.occupied, s);
        assert!(!rep.has_free_hyperedge());
        assert!(rep.counting_bound_ok);
        assert_eq!(rep.r_cloud_size, 6);
    }

    #[test]
    fn plan_structural_and_claim1() {
        let (h, t) = tiny_instance();
        let plan = plan_parameters(&h, &t, PlanMode::Structural, None, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(plan.params.cloud_size, 2);
        assert_eq!(plan.params.copies, 1);
        assert_eq!(plan.params.slack, plan.witness_requirement);
        let c1 = plan_parameters(&h, &t, PlanMode::Claim1, Some(1), DEFAULT_SIZE_CAP).unwrap();
        // C = 2 * n * B + 1 = 2 * 4 * 1 + 1.
        assert_eq!(c1.params.copies, 9);
        assert_eq!(c1.sizes.hprime_hyperedges, 2 * 9);
    }

    #[test]
    fn plan_soundness_refused_at_desk_scale() {
        let (h, t) = tiny_instance();
        let err = plan_parameters(&h, &t, PlanMode::Soundness, None, DEFAULT_SIZE_CAP).unwrap_err();
        assert!(matches!(err, ReductionError::SizeCapExceeded { .. }));
        // An undersized explicit B is rejected before any size math.
        let err = plan_parameters(&h, &t, PlanMode::Soundness, Some(10), DEFAULT_SIZE_CAP)
            .unwrap_err();
        assert!(matches!(err, ReductionError::SoundnessNeedsLargerB { .. }));
    }

    #[test]
    fn eps_accounting_is_exact() {
        let eps = Eps::new(1, 2).unwrap();
        // size <= limit / (delta - 1 - 1/2) with delta = 3: size * 3 <= limit * 2.
        assert!(eps.cover_bound_holds(3, 5, 3));
        assert!(!eps.cover_bound_holds(4, 5, 3));
        assert!(Eps::new(0, 2).is_none());
        assert!(Eps::new(2, 2).is_none());
        assert!(Eps::new(3, 2).is_none());
    }
}
