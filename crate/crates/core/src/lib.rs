//! Tree transversal toolkit.
//!
//! The crate revolves around one graph parameter and one reduction. For a
//! tree `T`, look at its unique proper 2-coloring and take, for each color
//! class, the maximum degree inside the class; `delta(T)` is the smaller of
//! the two maxima. The toolkit provides:
//!
//! * parsing and generation of graphs, d-uniform hypergraphs and tree
//!   patterns ([`graph`], [`hypergraph`], [`pattern`]);
//! * subgraph containment detection for tree patterns, by exhaustive
//!   backtracking or randomized color coding, plus a degree-based
//!   certificate of absence for bipartite hosts ([`detect`]);
//! * exact and local-ratio solvers for the minimum `T`-transversal problem
//!   (delete the fewest vertices so no `T`-copy remains) and for minimum
//!   hypergraph vertex cover ([`transversal`]);
//! * the cloud-and-copies incidence reduction from `delta(T)`-uniform
//!   vertex cover to `T`-transversal, with executable completeness and
//!   soundness checks, occupancy analysis and witness-tree construction
//!   ([`reduction`]);
//! * a deterministic experiment harness producing re-runnable reports
//!   ([`experiment`]).

pub mod detect;
pub mod experiment;
pub mod files;
pub mod graph;
pub mod hypergraph;
pub mod pattern;
pub mod reduction;
pub mod transversal;

pub use detect::{
    degree_prune_check, detect_bruteforce, detect_color_coding, verify_embedding, DetectError,
    Embedding, PruneOutcome,
};
pub use graph::{bipartition, side_max_degree, Bipartition, Graph, NotBipartite, VertexSet};
pub use hypergraph::Hypergraph;
pub use pattern::{delta_parameter, generate_pattern, make_pattern, PatternKind, TreePattern};
pub use reduction::{
    build_witness, build_witness_with_limit, classify_occupied, completeness_report,
    extend_hypergraph, incidence_graph, lift_cover, lift_cover_checked, plan_parameters,
    verify_completeness, verify_wide_embedding, witness_requirement, CompletenessReport, Eps,
    ExtendedHypergraph, OccupancyReport, Plan, PlanMode, ReductionArtifacts, ReductionError,
    ReductionParams, WideEmbedding, Witness, WitnessTree, DEFAULT_SIZE_CAP,
};
pub use transversal::{approx_local_ratio, hvc_exact, hvc_greedy, solve_exact, SolveResult};
