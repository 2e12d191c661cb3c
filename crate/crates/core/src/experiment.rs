//! Batch experiment driver.
//!
//! One run takes a plain-text config, generates seeded hypergraph
//! vertex-cover instances, pushes each through the reduction, solves both
//! sides, checks the completeness direction, and writes a reproducible
//! report tree:
//!
//! ```text
//! out/
//!   config.txt        normalized config (what the hash covers)
//!   pattern.graph     the pattern in graph format
//!   instances/        instance_<i>.hyper
//!   artifacts/        instance_<i>.{graph,map,params}
//!   solutions/        instance_<i>.{hvc,transversal}
//!   report.txt        human-readable table
//!   report.json       machine-readable rows and aggregates
//! ```
//!
//! Every row embeds ready-to-run `ttrans verify` commands (relative to
//! the output directory). Runs are deterministic: row seeds derive from
//! the config seed and row id alone, and workers only change scheduling,
//! never output bytes. Worker count comes from the `workers` key, else
//! the `TTRANS_WORKERS` environment variable, else 1.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::files::{self, FileError};
use crate::hypergraph::Hypergraph;
use crate::pattern::{generate_pattern, PatternKind, TreePattern};
use crate::reduction::{
    completeness_report, extend_hypergraph, incidence_graph, lift_cover, plan_parameters,
    PlanMode, ReductionError, DEFAULT_SIZE_CAP,
};
use crate::transversal::{approx_local_ratio, hvc_exact, hvc_greedy, solve_exact};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Setup(String),
    #[error(transparent)]
    File(#[from] FileError),
    #[error("cannot create {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Parsed experiment configuration. Every key has a default; unknown or
/// repeated keys are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub instances: usize,
    pub hvc_n: usize,
    pub hvc_m: usize,
    pub hvc_d: usize,
    pub pattern: PatternKind,
    pub pattern_size: usize,
    pub pattern_seed: u64,
    pub mode: PlanMode,
    pub b: Option<usize>,
    pub budget: u64,
    pub workers: Option<usize>,
    pub detect_limit: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            instances: 3,
            hvc_n: 6,
            hvc_m: 8,
            hvc_d: 3,
            pattern: PatternKind::DoubleStar,
            pattern_size: 3,
            pattern_seed: 0,
            mode: PlanMode::Structural,
            b: None,
            budget: crate::transversal::DEFAULT_NODE_BUDGET,
            workers: None,
            detect_limit: 60,
        }
    }
}

impl ExperimentConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let bad = |msg: String| ExperimentError::Config { line: lineno, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, got {line:?}")))?;
            let key = key.trim();
            let value = value.trim();
            if seen.contains(&key) {
                return Err(bad(format!("key {key:?} given twice")));
            }
            match key {
                "seed" => cfg.seed = parse_num(value).map_err(bad)?,
                "instances" => cfg.instances = parse_num(value).map_err(bad)?,
                "hvc_n" => cfg.hvc_n = parse_num(value).map_err(bad)?,
                "hvc_m" => cfg.hvc_m = parse_num(value).map_err(bad)?,
                "hvc_d" => cfg.hvc_d = parse_num(value).map_err(bad)?,
                "pattern" => {
                    cfg.pattern = PatternKind::from_name(value)
                        .ok_or_else(|| bad(format!("unknown pattern kind {value:?}")))?
                }
                "pattern_size" => cfg.pattern_size = parse_num(value).map_err(bad)?,
                "pattern_seed" => cfg.pattern_seed = parse_num(value).map_err(bad)?,
                "mode" => {
                    cfg.mode = PlanMode::from_name(value)
                        .ok_or_else(|| bad(format!("unknown mode {value:?}")))?
                }
                "b" => cfg.b = Some(parse_num(value).map_err(bad)?),
                "budget" => cfg.budget = parse_num(value).map_err(bad)?,
                "workers" => cfg.workers = Some(parse_num(value).map_err(bad)?),
                "detect_limit" => cfg.detect_limit = parse_num(value).map_err(bad)?,
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
            seen.push(key);
        }
        if cfg.instances == 0 {
            return Err(ExperimentError::Config {
                line: 0,
                msg: "instances must be at least 1".into(),
            });
        }
        Ok(cfg)
    }

    /// Canonical rendering: fixed key order, every key explicit. The
    /// config hash is taken over these bytes, so reformatting a config
    /// file never changes the hash.
    pub fn normalized(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("instances = {}\n", self.instances));
        out.push_str(&format!("hvc_n = {}\n", self.hvc_n));
        out.push_str(&format!("hvc_m = {}\n", self.hvc_m));
        out.push_str(&format!("hvc_d = {}\n", self.hvc_d));
        out.push_str(&format!("pattern = {}\n", self.pattern.name()));
        out.push_str(&format!("pattern_size = {}\n", self.pattern_size));
        out.push_str(&format!("pattern_seed = {}\n", self.pattern_seed));
        out.push_str(&format!("mode = {}\n", self.mode.name()));
        match self.b {
            Some(b) => out.push_str(&format!("b = {b}\n")),
            None => out.push_str("b = default\n"),
        }
        out.push_str(&format!("budget = {}\n", self.budget));
        out.push_str(&format!("detect_limit = {}\n", self.detect_limit));
        out
    }

    /// SHA-256 of the normalized config, in hex. Worker count is
    /// excluded: it cannot affect results.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.normalized().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn effective_workers(&self) -> usize {
        self.workers
            .or_else(|| {
                std::env::var("TTRANS_WORKERS")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(1)
            .max(1)
    }
}

fn parse_num<T: std::str::FromStr>(value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("bad numeric value {value:?}"))
}

fn binomial(n: usize, d: usize) -> u128 {
    if d > n {
        return 0;
    }
    let mut acc = 1u128;
    for i in 0..d {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// Generates a d-uniform hypergraph with `m` distinct hyperedges drawn
/// uniformly from the d-subsets of `[n]`, deterministically from `seed`.
pub fn gen_hvc_instance(
    n: usize,
    m: usize,
    d: usize,
    seed: u64,
) -> Result<Hypergraph, ExperimentError> {
    if d == 0 || n < d {
        return Err(ExperimentError::Setup(format!(
            "need n >= d >= 1, got n = {n}, d = {d}"
        )));
    }
    let space = binomial(n, d);
    if (m as u128) > space {
        return Err(ExperimentError::Setup(format!(
            "cannot pick {m} distinct hyperedges from {space} possible d-subsets"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hyperedges: Vec<Vec<usize>> = if space <= 100_000 {
        // Dense request: enumerate the whole space and shuffle.
        let mut all = Vec::with_capacity(space as usize);
        let mut comb: Vec<usize> = (0..d).collect();
        loop {
            all.push(comb.clone());
            // Lexicographically next d-subset of [n].
            let mut i = d;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if comb[i] != i + n - d {
                    comb[i] += 1;
                    for j in i + 1..d {
                        comb[j] = comb[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    comb.clear();
                }
            }
            if comb.is_empty() {
                break;
            }
        }
        all.shuffle(&mut rng);
        all.truncate(m);
        all
    } else {
        // Sparse request: rejection sampling terminates quickly.
        let mut seen = std::collections::BTreeSet::new();
        while seen.len() < m {
            let mut pick: Vec<usize> =
                rand::seq::index::sample(&mut rng, n, d).into_iter().collect();
            pick.sort_unstable();
            seen.insert(pick);
        }
        seen.into_iter().collect()
    };
    Ok(Hypergraph::new(n, d, &hyperedges).expect("sampled hyperedges are valid"))
}

/// One experiment row. Paths and commands are relative to the output
/// directory; `error` marks a row that could not complete.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub id: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub hvc_exact: Option<usize>,
    pub hvc_exact_optimal: Option<bool>,
    pub hvc_greedy: Option<usize>,
    pub b: Option<usize>,
    pub c: Option<usize>,
    pub w: Option<u128>,
    pub g_vertices: Option<usize>,
    pub lifted_size: Option<usize>,
    pub transversal_size: Option<usize>,
    pub transversal_optimal: Option<bool>,
    pub transversal_bound: Option<usize>,
    pub approx_size: Option<usize>,
    /// `approx / max(bound, 1)`, fixed 4 decimals.
    pub approx_ratio: Option<String>,
    /// True when the denominator was only a lower bound (budget ran out).
    pub ratio_over_bound_only: Option<bool>,
    pub completeness_pass: Option<bool>,
    pub instance_file: String,
    pub artifact_prefix: String,
    pub hvc_solution_file: String,
    pub transversal_solution_file: String,
    pub verify_completeness_cmd: Option<String>,
    pub verify_soundness_cmd: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregates {
    pub rows_total: usize,
    pub rows_failed: usize,
    pub completeness_passes: usize,
    pub transversal_optimal_count: usize,
    pub mean_ratio: Option<String>,
    pub max_ratio: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub config_hash: String,
    pub config: String,
    pub pattern_k: usize,
    pub pattern_delta: usize,
    pub rows: Vec<Row>,
    pub aggregates: Aggregates,
}

fn row_seed(base: u64, id: usize) -> u64 {
    base ^ (id as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn mkdir(path: &Path) -> Result<(), ExperimentError> {
    fs::create_dir_all(path).map_err(|source| ExperimentError::Io { path: path.into(), source })
}

/// Runs a configured batch into `out_dir` and returns the report that
/// was also written there.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ExperimentReport, ExperimentError> {
    let t = generate_pattern(cfg.pattern, cfg.pattern_size, cfg.pattern_seed)
        .map_err(|e| ExperimentError::Setup(format!("pattern: {e}")))?;
    if t.delta() != cfg.hvc_d {
        return Err(ExperimentError::Setup(format!(
            "pattern delta {} does not match hvc_d {}; the reduction needs them equal",
            t.delta(),
            cfg.hvc_d
        )));
    }
    // Fail fast on infeasible instance geometry.
    gen_hvc_instance(cfg.hvc_n, cfg.hvc_m, cfg.hvc_d, 0)?;

    mkdir(out_dir)?;
    mkdir(&out_dir.join("instances"))?;
    mkdir(&out_dir.join("artifacts"))?;
    mkdir(&out_dir.join("solutions"))?;
    fs::write(out_dir.join("config.txt"), cfg.normalized())
        .map_err(|source| ExperimentError::Io { path: out_dir.join("config.txt"), source })?;
    files::write_graph(&out_dir.join("pattern.graph"), t.tree())?;

    let workers = cfg.effective_workers().min(cfg.instances);
    let mut rows: Vec<Option<Row>> = vec![None; cfg.instances];
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let t = &t;
            let handle = scope.spawn(move || {
                let mut done = Vec::new();
                let mut id = w;
                while id < cfg.instances {
                    done.push((id, compute_row(cfg, t, id, out_dir)));
                    id += workers;
                }
                done
            });
            handles.push(handle);
        }
        for handle in handles {
            for (id, row) in handle.join().expect("worker panicked") {
                rows[id] = Some(row);
            }
        }
    });
    let rows: Vec<Row> = rows.into_iter().map(|r| r.expect("row computed")).collect();

    let ratios: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.approx_ratio.as_ref())
        .map(|s| s.parse::<f64>().unwrap())
        .collect();
    let aggregates = Aggregates {
        rows_total: rows.len(),
        rows_failed: rows.iter().filter(|r| r.error.is_some()).count(),
        completeness_passes: rows
            .iter()
            .filter(|r| r.completeness_pass == Some(true))
            .count(),
        transversal_optimal_count: rows
            .iter()
            .filter(|r| r.transversal_optimal == Some(true))
            .count(),
        mean_ratio: if ratios.is_empty() {
            None
        } else {
            Some(format!("{:.4}", ratios.iter().sum::<f64>() / ratios.len() as f64))
        },
        max_ratio: ratios
            .iter()
            .cloned()
            .reduce(f64::max)
            .map(|r| format!("{r:.4}")),
    };
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        config_hash: cfg.hash(),
        config: cfg.normalized(),
        pattern_k: t.k(),
        pattern_delta: t.delta(),
        rows,
        aggregates,
    };

    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    fs::write(out_dir.join("report.json"), json)
        .map_err(|source| ExperimentError::Io { path: out_dir.join("report.json"), source })?;
    fs::write(out_dir.join("report.txt"), render_text_report(&report))
        .map_err(|source| ExperimentError::Io { path: out_dir.join("report.txt"), source })?;
    Ok(report)
}

fn compute_row(cfg: &ExperimentConfig, t: &TreePattern, id: usize, out_dir: &Path) -> Row {
    let seed = row_seed(cfg.seed, id);
    let instance_file = format!("instances/instance_{id}.hyper");
    let artifact_prefix = format!("artifacts/instance_{id}");
    let hvc_solution_file = format!("solutions/instance_{id}.hvc");
    let transversal_solution_file = format!("solutions/instance_{id}.transversal");
    let mut row = Row {
        id,
        seed,
        error: None,
        hvc_exact: None,
        hvc_exact_optimal: None,
        hvc_greedy: None,
        b: None,
        c: None,
        w: None,
        g_vertices: None,
        lifted_size: None,
        transversal_size: None,
        transversal_optimal: None,
        transversal_bound: None,
        approx_size: None,
        approx_ratio: None,
        ratio_over_bound_only: None,
        completeness_pass: None,
        instance_file: instance_file.clone(),
        artifact_prefix: artifact_prefix.clone(),
        hvc_solution_file: hvc_solution_file.clone(),
        transversal_solution_file: transversal_solution_file.clone(),
        verify_completeness_cmd: None,
        verify_soundness_cmd: None,
    };
    if let Err(e) = fill_row(cfg, t, seed, out_dir, &mut row) {
        row.error = Some(e);
    }
    row
}

fn fill_row(
    cfg: &ExperimentConfig,
    t: &TreePattern,
    seed: u64,
    out_dir: &Path,
    row: &mut Row,
) -> Result<(), String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let h = gen_hvc_instance(cfg.hvc_n, cfg.hvc_m, cfg.hvc_d, seed).map_err(|e| err(&e))?;
    files::write_hypergraph(&out_dir.join(&row.instance_file), &h).map_err(|e| err(&e))?;

    let cover = hvc_exact(&h, cfg.budget);
    row.hvc_exact = Some(cover.solution.len());
    row.hvc_exact_optimal = Some(cover.optimal);
    row.hvc_greedy = Some(hvc_greedy(&h).solution.len());
    files::write_solution(&out_dir.join(&row.hvc_solution_file), &cover.solution)
        .map_err(|e| err(&e))?;

    let plan = plan_parameters(&h, t, cfg.mode, cfg.b, DEFAULT_SIZE_CAP).map_err(|e| match e {
        ReductionError::SizeCapExceeded { g_vertices, cap } => format!(
            "size cap: {g_vertices} incidence-graph vertices exceed {cap}; \
             this mode is analysis-only at desk scale"
        ),
        other => err(&other),
    })?;
    row.b = Some(plan.params.cloud_size);
    row.c = Some(plan.params.copies);
    row.w = Some(plan.params.slack);
    let hp = extend_hypergraph(&h, plan.params.cloud_size, plan.params.copies, DEFAULT_SIZE_CAP)
        .map_err(|e| err(&e))?;
    let artifacts = incidence_graph(&hp, plan.params).map_err(|e| err(&e))?;
    row.g_vertices = Some(artifacts.g.n());
    files::write_artifacts(&out_dir.join(&row.artifact_prefix), &artifacts)
        .map_err(|e| err(&e))?;

    let lifted = lift_cover(&cover.solution, plan.params.cloud_size);
    row.lifted_size = Some(lifted.len());

    let completeness = completeness_report(&artifacts, t, &cover.solution, cfg.detect_limit);
    row.completeness_pass = Some(completeness.pass);

    let exact = solve_exact(&artifacts.g, t, cfg.budget);
    row.transversal_size = Some(exact.solution.len());
    row.transversal_optimal = Some(exact.optimal);
    row.transversal_bound = Some(exact.bound_used);
    files::write_solution(
        &out_dir.join(&row.transversal_solution_file),
        &exact.solution,
    )
    .map_err(|e| err(&e))?;

    let approx = approx_local_ratio(&artifacts.g, t);
    row.approx_size = Some(approx.solution.len());
    let denom = if exact.optimal {
        exact.solution.len()
    } else {
        exact.bound_used
    };
    row.ratio_over_bound_only = Some(!exact.optimal);
    row.approx_ratio = Some(if approx.solution.is_empty() {
        "1.0000".to_string()
    } else {
        format!("{:.4}", approx.solution.len() as f64 / denom.max(1) as f64)
    });

    row.verify_completeness_cmd = Some(format!(
        "ttrans verify --direction completeness --instance {} --pattern pattern.graph \
         --artifacts {} --solution {}",
        row.instance_file, row.artifact_prefix, row.hvc_solution_file
    ));
    row.verify_soundness_cmd = Some(format!(
        "ttrans verify --direction soundness --instance {} --pattern pattern.graph \
         --artifacts {} --solution {} --slack 0",
        row.instance_file, row.artifact_prefix, row.transversal_solution_file
    ));
    Ok(())
}

fn render_text_report(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str("tree transversal reduction experiment\n");
    out.push_str(&format!("config_hash {}\n", report.config_hash));
    out.push_str(&format!(
        "pattern k {} delta {}\n\n",
        report.pattern_k, report.pattern_delta
    ));
    out.push_str("id  hvc  greedy  b  c  w  |G|  lift  exact  opt  approx  ratio   complete\n");
    for row in &report.rows {
        if let Some(e) = &row.error {
            out.push_str(&format!("{:<3} error: {e}\n", row.id));
            continue;
        }
        let yn = |b: Option<bool>| match b {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        let num = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        out.push_str(&format!(
            "{:<3} {:<4} {:<7} {:<2} {:<2} {:<6} {:<4} {:<5} {:<6} {:<4} {:<7} {:<7} {}\n",
            row.id,
            num(row.hvc_exact),
            num(row.hvc_greedy),
            num(row.b),
            num(row.c),
            row.w.map_or("-".to_string(), |w| w.to_string()),
            num(row.g_vertices),
            num(row.lifted_size),
            num(row.transversal_size),
            yn(row.transversal_optimal),
            num(row.approx_size),
            row.approx_ratio.clone().unwrap_or_else(|| "-".to_string()),
            if row.completeness_pass == Some(true) { "PASS" } else { "FAIL" },
        ));
    }
    let a = &report.aggregates;
    out.push_str(&format!(
        "\nrows {} failed {} completeness {}/{} optimal {} mean_ratio {} max_ratio {}\n",
        a.rows_total,
        a.rows_failed,
        a.completeness_passes,
        a.rows_total - a.rows_failed,
        a.transversal_optimal_count,
        a.mean_ratio.clone().unwrap_or_else(|| "-".into()),
        a.max_ratio.clone().unwrap_or_else(|| "-".into()),
    ));
    out.push_str(
        "note: desk-scale parameters keep B <= w, so only the completeness \
         direction is certified here; the soundness direction needs B > w.\n",
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_parse() {
        let cfg = ExperimentConfig::parse("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        let cfg = ExperimentConfig::parse(
            "seed = 9\ninstances = 2\n# comment\npattern = path  # trailing\npattern_size = 5\nhvc_d = 2\nworkers = 4\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.instances, 2);
        assert_eq!(cfg.pattern, PatternKind::Path);
        assert_eq!(cfg.pattern_size, 5);
        assert_eq!(cfg.hvc_d, 2);
        assert_eq!(cfg.workers, Some(4));
    }

    #[test]
    fn config_rejects_unknown_duplicate_and_bad() {
        assert!(matches!(
            ExperimentConfig::parse("bogus = 1\n"),
            Err(ExperimentError::Config { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("seed = 1\nseed = 2\n"),
            Err(ExperimentError::Config { line: 2, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("seed = banana\n"),
            Err(ExperimentError::Config { line: 1, .. })
        ));
        assert!(matches!(
            ExperimentConfig::parse("instances = 0\n"),
            Err(ExperimentError::Config { .. })
        ));
    }

    #[test]
    fn config_hash_ignores_formatting_but_not_values() {
        let a = ExperimentConfig::parse("seed = 5\ninstances = 2\n").unwrap();
        let b = ExperimentConfig::parse("instances=2\n\nseed =   5\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = ExperimentConfig::parse("seed = 6\ninstances = 2\n").unwrap();
        assert_ne!(a.hash(), c.hash());
        // Workers never enter the hash.
        let d = ExperimentConfig::parse("seed = 5\ninstances = 2\nworkers = 8\n").unwrap();
        assert_eq!(a.hash(), d.hash());
    }

    #[test]
    fn binomial_small_table() {
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn gen_hvc_is_deterministic_and_distinct() {
        let a = gen_hvc_instance(7, 12, 3, 42).unwrap();
        let b = gen_hvc_instance(7, 12, 3, 42).unwrap();
        assert_eq!(a, b);
        let c = gen_hvc_instance(7, 12, 3, 43).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.m(), 12);
        let mut seen = std::collections::BTreeSet::new();
        for e in 0..a.m() {
            assert!(seen.insert(a.hyperedge(e).to_vec()), "duplicate hyperedge");
        }
    }

    #[test]
    fn gen_hvc_rejects_infeasible() {
        assert!(gen_hvc_instance(4, 5, 3, 0).is_err());
        assert!(gen_hvc_instance(2, 1, 3, 0).is_err());
        // Exactly the whole space is fine.
        let h = gen_hvc_instance(4, 4, 3, 0).unwrap();
        assert_eq!(h.m(), 4);
    }

    #[test]
    fn experiment_end_to_end_and_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::parse(
            "seed = 3\ninstances = 2\nhvc_n = 5\nhvc_m = 4\nhvc_d = 3\n\
             pattern = double_star\npattern_size = 3\nmode = structural\nb = 2\n",
        )
        .unwrap();
        let out_a = dir.path().join("a");
        let report = run_experiment(&cfg, &out_a).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.aggregates.rows_failed, 0);
        assert_eq!(report.aggregates.completeness_passes, 2);
        for row in &report.rows {
            assert_eq!(row.error, None);
            assert_eq!(row.b, Some(2));
            assert_eq!(row.c, Some(1));
            assert_eq!(row.w, Some(111_111));
            // The lifted cover is a transversal, so the optimum is at
            // most B times the cover optimum.
            assert!(row.transversal_size.unwrap() <= row.lifted_size.unwrap());
            assert!(row.completeness_pass.unwrap());
            for f in [
                &row.instance_file,
                &row.hvc_solution_file,
                &row.transversal_solution_file,
            ] {
                assert!(out_a.join(f).exists(), "{f} missing");
            }
            assert!(out_a.join(format!("{}.graph", row.artifact_prefix)).exists());
            assert!(out_a.join(format!("{}.map", row.artifact_prefix)).exists());
            assert!(out_a.join(format!("{}.params", row.artifact_prefix)).exists());
        }
        // Reruns and worker counts never change output bytes.
        let out_b = dir.path().join("b");
        let mut cfg2 = cfg.clone();
        cfg2.workers = Some(2);
        run_experiment(&cfg2, &out_b).unwrap();
        for f in ["report.json", "report.txt", "config.txt"] {
            let a = fs::read(out_a.join(f)).unwrap();
            let b = fs::read(out_b.join(f)).unwrap();
            assert_eq!(a, b, "{f} differs between runs");
        }
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out_a.join("report.json")).unwrap())
                .unwrap();
        assert_eq!(json["schema_version"], 1);
        assert_eq!(json["config_hash"], serde_json::json!(cfg.hash()));
        assert_eq!(json["rows"][0]["w"], serde_json::json!(111_111));
    }

    #[test]
    fn experiment_records_per_row_refusals() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::parse(
            "instances = 2\nhvc_n = 5\nhvc_m = 4\nhvc_d = 3\nmode = soundness\n",
        )
        .unwrap();
        let report = run_experiment(&cfg, dir.path()).unwrap();
        assert_eq!(report.aggregates.rows_failed, 2);
        for row in &report.rows {
            let msg = row.error.as_ref().unwrap();
            assert!(msg.contains("size cap"), "{msg}");
            // The cover side still ran before the refusal.
            assert!(row.hvc_exact.is_some());
        }
    }

    #[test]
    fn mismatched_delta_is_a_setup_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg =
            ExperimentConfig::parse("pattern = star\npattern_size = 4\nhvc_d = 3\n").unwrap();
        let err = run_experiment(&cfg, dir.path()).unwrap_err();
        assert!(matches!(err, ExperimentError::Setup(_)));
    }
}
