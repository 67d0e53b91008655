//! Plain-text formats: edge lists, label files, samples, embeddings and
//! spectra.
//!
//! Edge lists hold one `u v` pair per line, whitespace- or comma-separated.
//! Lines starting with `#` are comments, except the directive
//! `# nodes N`, which declares dense ids `0..N` (isolated nodes included).
//! Without the directive the distinct ids are relabeled in ascending order.
//!
//! Label files hold `node_id label` per line with labels starting at 1.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::ArrayView2;

use crate::error::{Result, SscError};
use crate::graph::SparseGraph;
use crate::sbm::LabelVector;

/// A graph read from an edge list together with the external id of each
/// internal node.
#[derive(Debug, Clone)]
pub struct EdgeListGraph {
    pub graph: SparseGraph,
    /// `node_ids[i]` is the id of internal node `i` in the file.
    pub node_ids: Vec<u64>,
    /// True when the ids were taken as-is from a `# nodes` directive.
    pub dense_ids: bool,
}

impl EdgeListGraph {
    /// Internal index of an external id.
    pub fn index_of(&self, id: u64) -> Option<usize> {
        if self.dense_ids {
            (id < self.node_ids.len() as u64).then_some(id as usize)
        } else {
            self.node_ids.binary_search(&id).ok()
        }
    }
}

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(SscError::Parse { line, msg: msg.into() })
}

fn fields(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
}

fn parse_id(tok: &str, line: usize) -> Result<u64> {
    tok.parse::<u64>()
        .or_else(|_| parse_err(line, format!("expected a nonnegative node id, found {tok:?}")))
}

/// Parses an edge list from any reader.
pub fn read_edge_list_from(reader: impl BufRead) -> Result<EdgeListGraph> {
    let mut declared: Option<usize> = None;
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if parts.next() == Some("nodes") {
                match parts.next().map(str::parse::<usize>) {
                    Some(Ok(n)) => declared = Some(n),
                    _ => return parse_err(line_no, "malformed '# nodes N' directive"),
                }
            }
            continue;
        }
        let mut toks = fields(text);
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return parse_err(line_no, "expected two node ids");
        };
        raw.push((parse_id(a, line_no)?, parse_id(b, line_no)?));
    }

    if let Some(n) = declared {
        if raw.iter().all(|&(a, b)| a < n as u64 && b < n as u64) {
            let pairs: Vec<(usize, usize)> = raw.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
            return Ok(EdgeListGraph {
                graph: SparseGraph::from_edge_list(&pairs, n)?,
                node_ids: (0..n as u64).collect(),
                dense_ids: true,
            });
        }
        log::warn!("edge list has ids outside the declared '# nodes {n}'; relabeling");
    }
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let pairs: Vec<(usize, usize)> = raw
        .iter()
        .map(|&(a, b)| {
            (
                ids.binary_search(&a).expect("collected id"),
                ids.binary_search(&b).expect("collected id"),
            )
        })
        .collect();
    Ok(EdgeListGraph {
        graph: SparseGraph::from_edge_list(&pairs, ids.len())?,
        node_ids: ids,
        dense_ids: false,
    })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EdgeListGraph> {
    read_edge_list_from(BufReader::new(File::open(path)?))
}

/// Writes `# nodes N` followed by each undirected edge once, `u < v`.
pub fn write_edge_list_to(g: &SparseGraph, mut w: impl Write) -> Result<()> {
    writeln!(w, "# nodes {}", g.n_nodes())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edge_list(g: &SparseGraph, path: impl AsRef<Path>) -> Result<()> {
    write_edge_list_to(g, BufWriter::new(File::create(path)?))
}

/// Writes `node_id label` lines with 1-based labels. `node_ids` maps
/// internal indices to external ids; `None` writes the indices.
pub fn write_labels_to(labels: &LabelVector, node_ids: Option<&[u64]>, mut w: impl Write) -> Result<()> {
    for (i, &l) in labels.as_slice().iter().enumerate() {
        match node_ids {
            Some(ids) => writeln!(w, "{} {}", ids[i], l + 1)?,
            None => writeln!(w, "{} {}", i, l + 1)?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_labels(labels: &LabelVector, node_ids: Option<&[u64]>, path: impl AsRef<Path>) -> Result<()> {
    write_labels_to(labels, node_ids, BufWriter::new(File::create(path)?))
}

/// Reads a label file. Node ids must be `0..N` in any order, each exactly
/// once; K is the largest label.
pub fn read_labels_from(reader: impl BufRead) -> Result<LabelVector> {
    let mut entries: Vec<(usize, usize)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut toks = fields(text);
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return parse_err(line_no, "expected 'node_id label'");
        };
        let node = parse_id(a, line_no)? as usize;
        let label = parse_id(b, line_no)? as usize;
        if label == 0 {
            return parse_err(line_no, "labels start at 1");
        }
        entries.push((node, label - 1));
    }
    let n = entries.len();
    let mut labels = vec![usize::MAX; n];
    for &(node, label) in &entries {
        if node >= n || labels[node] != usize::MAX {
            return Err(SscError::InvalidInput(format!(
                "label file node ids must be 0..{n}, each once; offending id {node}"
            )));
        }
        labels[node] = label;
    }
    let k = labels.iter().max().map_or(1, |&m| m + 1);
    LabelVector::new(labels, k)
}

pub fn read_labels(path: impl AsRef<Path>) -> Result<LabelVector> {
    read_labels_from(BufReader::new(File::open(path)?))
}

/// Reads a label file whose node ids are external ids of `g`.
pub fn read_labels_for(g: &EdgeListGraph, path: impl AsRef<Path>) -> Result<LabelVector> {
    let reader = BufReader::new(File::open(path)?);
    let n = g.graph.n_nodes();
    let mut labels = vec![usize::MAX; n];
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut toks = fields(text);
        let (Some(a), Some(b)) = (toks.next(), toks.next()) else {
            return parse_err(line_no, "expected 'node_id label'");
        };
        let id = parse_id(a, line_no)?;
        let label = parse_id(b, line_no)? as usize;
        let Some(i) = g.index_of(id) else {
            return parse_err(line_no, format!("node {id} is not in the graph"));
        };
        if label == 0 {
            return parse_err(line_no, "labels start at 1");
        }
        labels[i] = label - 1;
    }
    if let Some(i) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(SscError::InvalidInput(format!("no label for node {}", g.node_ids[i])));
    }
    let k = labels.iter().max().map_or(1, |&m| m + 1);
    LabelVector::new(labels, k)
}

/// One node id per line.
pub fn write_sample(ids: &[usize], node_ids: Option<&[u64]>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for &i in ids {
        match node_ids {
            Some(map) => writeln!(w, "{}", map[i])?,
            None => writeln!(w, "{i}")?,
        }
    }
    w.flush()?;
    Ok(())
}

/// `external_id internal_id` per line, internal ids ascending.
pub fn write_id_map(node_ids: &[u64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (i, id) in node_ids.iter().enumerate() {
        writeln!(w, "{id} {i}")?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with header `node,u1,..,uK` and one row per node.
pub fn write_embedding(coords: ArrayView2<'_, f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "node")?;
    for c in 1..=coords.ncols() {
        write!(w, ",u{c}")?;
    }
    writeln!(w)?;
    for (i, row) in coords.rows().into_iter().enumerate() {
        write!(w, "{i}")?;
        for x in row {
            write!(w, ",{x:e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// One eigenvalue per line, descending.
pub fn write_spectrum(values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in values {
        writeln!(w, "{v:e}")?;
    }
    w.flush()?;
    Ok(())
}
