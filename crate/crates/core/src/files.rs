//! File-backed input and output.
//!
//! Graphs and hypergraphs use the text formats of [`Graph::parse`] and
//! [`Hypergraph::parse`]. This module adds the remaining artifacts:
//!
//! * solution files — one vertex id per line, `c` comment lines allowed;
//! * parameter files — `key value` lines carrying `b`, `c`, `w`, `eps`;
//! * map files — the correspondence between a materialized reduction and
//!   its source, one `v` line per cloud vertex and one `e` line per
//!   extended hyperedge.
//!
//! Map and parameter files are deterministic functions of their inputs,
//! so integrity checking is recompute-and-compare; there is no map
//! reader.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::graph::{Graph, ParseError, VertexSet};
use crate::hypergraph::Hypergraph;
use crate::reduction::{Eps, ReductionArtifacts, ReductionParams};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Bad {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

fn read_to_string(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Io { path: path.into(), source })
}

fn write_string(path: &Path, contents: &str) -> Result<(), FileError> {
    fs::write(path, contents).map_err(|source| FileError::Io { path: path.into(), source })
}

pub fn read_graph(path: &Path) -> Result<Graph, FileError> {
    Graph::parse(&read_to_string(path)?)
        .map_err(|source| FileError::Parse { path: path.into(), source })
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<(), FileError> {
    write_string(path, &g.render())
}

pub fn read_hypergraph(path: &Path) -> Result<Hypergraph, FileError> {
    Hypergraph::parse(&read_to_string(path)?)
        .map_err(|source| FileError::Parse { path: path.into(), source })
}

pub fn write_hypergraph(path: &Path, h: &Hypergraph) -> Result<(), FileError> {
    write_string(path, &h.render())
}

/// Reads a vertex set: one id per line, blank and `c` lines skipped.
/// Duplicates collapse and order is immaterial.
pub fn read_solution(path: &Path) -> Result<VertexSet, FileError> {
    let text = read_to_string(path)?;
    let mut ids = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let id: usize = line.parse().map_err(|_| FileError::Bad {
            path: path.into(),
            line: lineno + 1,
            msg: format!("expected a vertex id, got {line:?}"),
        })?;
        ids.push(id);
    }
    Ok(VertexSet::from_iter(ids))
}

pub fn write_solution(path: &Path, s: &VertexSet) -> Result<(), FileError> {
    write_string(path, &render_solution(s))
}

pub fn render_solution(s: &VertexSet) -> String {
    let mut out = String::new();
    for v in s.iter() {
        out.push_str(&format!("{v}\n"));
    }
    out
}

pub fn render_params(params: &ReductionParams) -> String {
    format!(
        "b {}\nc {}\nw {}\neps {}\n",
        params.cloud_size, params.copies, params.slack, params.eps
    )
}

pub fn write_params(path: &Path, params: &ReductionParams) -> Result<(), FileError> {
    write_string(path, &render_params(params))
}

pub fn read_params(path: &Path) -> Result<ReductionParams, FileError> {
    let text = read_to_string(path)?;
    let bad = |line: usize, msg: String| FileError::Bad { path: path.into(), line, msg };
    let mut b = None;
    let mut c = None;
    let mut w = None;
    let mut eps = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = lineno + 1;
        let (key, value) = line
            .split_once(' ')
            .ok_or_else(|| bad(lineno, format!("expected `key value`, got {line:?}")))?;
        let value = value.trim();
        match key {
            "b" => {
                b = Some(value.parse::<usize>().map_err(|_| {
                    bad(lineno, format!("bad cloud size {value:?}"))
                })?)
            }
            "c" => {
                c = Some(value.parse::<usize>().map_err(|_| {
                    bad(lineno, format!("bad copy count {value:?}"))
                })?)
            }
            "w" => {
                w = Some(value.parse::<u128>().map_err(|_| {
                    bad(lineno, format!("bad slack {value:?}"))
                })?)
            }
            "eps" => {
                let parsed = value.split_once('/').and_then(|(num, den)| {
                    let num = num.parse::<u64>().ok()?;
                    let den = den.parse::<u64>().ok()?;
                    Eps::new(num, den)
                });
                eps = Some(parsed.ok_or_else(|| {
                    bad(lineno, format!("bad eps {value:?}, want num/den in (0, 1)"))
                })?)
            }
            other => return Err(bad(lineno, format!("unknown key {other:?}"))),
        }
    }
    let b = b.ok_or_else(|| bad(0, "missing key b".into()))?;
    let c = c.ok_or_else(|| bad(0, "missing key c".into()))?;
    let w = w.ok_or_else(|| bad(0, "missing key w".into()))?;
    let eps = eps.ok_or_else(|| bad(0, "missing key eps".into()))?;
    ReductionParams::new(b, c, w, eps)
        .ok_or_else(|| bad(0, "b and c must be positive".into()))
}

/// Renders the id map of a materialized reduction:
/// `v <base-vertex> <index> <g-id>` per cloud vertex and
/// `e <base-edge> <i1,...,id> <copy> <g-id>` per extended hyperedge.
pub fn render_map(artifacts: &ReductionArtifacts) -> String {
    let hp = &artifacts.hprime;
    let mut out = String::new();
    for (vp, &gid) in artifacts.vmap.iter().enumerate() {
        let (v, i) = hp.cloud_of(vp);
        out.push_str(&format!("v {v} {i} {gid}\n"));
    }
    for (ep, &gid) in artifacts.emap.iter().enumerate() {
        let (e, tuple, j) = hp.hyperedge_unpack(ep as u128);
        let tuple: Vec<String> = tuple.iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("e {e} {} {j} {gid}\n", tuple.join(",")));
    }
    out
}

pub fn write_map(path: &Path, artifacts: &ReductionArtifacts) -> Result<(), FileError> {
    write_string(path, &render_map(artifacts))
}

/// Writes the three artifact files of a reduction under a shared prefix:
/// `<prefix>.graph`, `<prefix>.map`, `<prefix>.params`.
pub fn write_artifacts(prefix: &Path, artifacts: &ReductionArtifacts) -> Result<(), FileError> {
    write_graph(&artifact_path(prefix, "graph"), &artifacts.g)?;
    write_map(&artifact_path(prefix, "map"), artifacts)?;
    write_params(&artifact_path(prefix, "params"), &artifacts.params)
}

pub fn artifact_path(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(ext);
    prefix.with_file_name(name)
}

/// Confirms artifact files are byte-identical to a recomputation.
/// Returns the offending file name on mismatch.
pub fn check_artifacts(
    prefix: &Path,
    artifacts: &ReductionArtifacts,
) -> Result<Option<String>, FileError> {
    let expected = [
        ("graph", artifacts.g.render()),
        ("map", render_map(artifacts)),
        ("params", render_params(&artifacts.params)),
    ];
    for (ext, want) in expected {
        let path = artifact_path(prefix, ext);
        if read_to_string(&path)? != want {
            return Ok(Some(path.display().to_string()));
        }
    }
    Ok(None)
}
