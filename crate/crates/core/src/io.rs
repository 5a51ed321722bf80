//! Graph specifications: builtin tokens (`k4`, `ps3`, `pic:1,2,1`), inline
//! strings (`n=2;edges=1-2,1-2,2-3,2-3`) and file documents (JSON
//! `{"n": 2, "edges": [[1,2],...]}` or text with `n` on the first line and one
//! `i j` pair per following line).

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, MultiDigraph};

#[derive(Deserialize)]
struct GraphDocument {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Parses a builtin token or an inline `n=...;edges=...` string.
pub fn parse_graph_token(token: &str) -> Result<MultiDigraph> {
    let token = token.trim();
    if token.starts_with("n=") {
        return parse_inline(token);
    }
    if let Some(rest) = token.strip_prefix("pic:") {
        return MultiDigraph::pi_c(&parse_u64_list(rest)?);
    }
    if let Some(rest) = token.strip_prefix("ps") {
        return MultiDigraph::pitman_stanley(parse_usize(rest)?);
    }
    if let Some(rest) = token.strip_prefix('k') {
        return MultiDigraph::complete(parse_usize(rest)?);
    }
    Err(Error::Parse(format!("unrecognised graph spec `{token}`")))
}

/// Parses the contents of a graph file, JSON or plain text.
pub fn parse_graph_document(content: &str) -> Result<MultiDigraph> {
    let trimmed = content.trim_start();
    if trimmed.starts_with('{') {
        let doc: GraphDocument = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        return MultiDigraph::new(doc.n, doc.edges.into_iter().map(|[i, j]| (i, j)).collect());
    }
    let mut lines = content
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let n = parse_usize(lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?)?;
    let mut edges = Vec::new();
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [i, j] => edges.push((parse_usize(i)?, parse_usize(j)?)),
            _ => return Err(Error::Parse(format!("expected `i j`, found `{line}`"))),
        }
    }
    MultiDigraph::new(n, edges)
}

/// JSON form of a graph, matching the file format.
pub fn graph_to_json(g: &MultiDigraph) -> serde_json::Value {
    serde_json::json!({
        "n": g.n(),
        "edges": g.edges().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
    })
}

fn parse_inline(token: &str) -> Result<MultiDigraph> {
    let mut n = None;
    let mut edges: Vec<Edge> = Vec::new();
    for field in token.split(';').map(str::trim).filter(|f| !f.is_empty()) {
        if let Some(v) = field.strip_prefix("n=") {
            n = Some(parse_usize(v)?);
        } else if let Some(v) = field.strip_prefix("edges=") {
            for pair in v.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (i, j) = pair
                    .split_once('-')
                    .ok_or_else(|| Error::Parse(format!("edge `{pair}` is not of the form i-j")))?;
                edges.push((parse_usize(i)?, parse_usize(j)?));
            }
        } else {
            return Err(Error::Parse(format!("unknown field `{field}`")));
        }
    }
    let n = n.ok_or_else(|| Error::Parse("inline graph is missing `n=`".into()))?;
    MultiDigraph::new(n, edges)
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::Parse(format!("`{s}` is not a nonnegative integer")))
}

pub fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::Parse(format!("`{p}` is not a nonnegative integer"))))
        .collect()
}

pub fn parse_i64_list(s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| Error::Parse(format!("`{p}` is not an integer"))))
        .collect()
}
