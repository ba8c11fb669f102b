//! Digraphs given by per-node in-neighbor sets, plus the on-disk formats.
//!
//! Arcs have set semantics and `(u, v)` means `u -> v`, i.e. `u` is an
//! in-neighbor of `v`. In-neighbor sets are stored as bit masks so the
//! dynamics layer can evaluate a whole neighborhood with one AND and one
//! popcount.

use serde::{Deserialize, Serialize};

use crate::config::{check_size, MAX_NODES};
use crate::error::{MbanError, Result};

/// A digraph on `n` nodes; self-loops allowed, arcs deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    in_masks: Vec<u128>,
}

/// Structural measurements of a digraph, defined in terms of in-degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkMetrics {
    pub edge_count: usize,
    pub distinct_in_degrees: usize,
    pub max_in_degree: usize,
    pub non_omniscient: bool,
}

impl Digraph {
    /// Empty digraph (no arcs) on `n` nodes, `1 <= n <= 128`.
    pub fn new(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self {
            n,
            in_masks: vec![0; n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n {
            return Err(MbanError::Parameter(format!(
                "node id {v} out of range for a graph on {} nodes",
                self.n
            )));
        }
        Ok(())
    }

    /// Inserts the arc `u -> v`; inserting an existing arc is a no-op.
    pub fn add_arc(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        self.in_masks[v] |= 1 << u;
        Ok(())
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        self.in_masks[v] &= !(1 << u);
        Ok(())
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.in_masks[v] >> u) & 1 == 1
    }

    /// In-neighbor set of `v` as a bit mask (bit `u` set iff `u -> v`).
    pub fn in_mask(&self, v: usize) -> u128 {
        self.in_masks[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_masks[v].count_ones() as usize
    }

    pub fn in_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.in_masks[v];
        (0..self.n).filter(move |u| (m >> u) & 1 == 1)
    }

    pub fn arc_count(&self) -> usize {
        self.in_masks.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// All arcs in ascending `(u, v)` order.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.arc_count());
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Relabels nodes through the permutation `perm` (node `v` becomes
    /// `perm[v]`), mapping each arc `(u, v)` to `(perm[u], perm[v])`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(MbanError::Parameter(format!(
                "permutation has {} entries for a graph on {} nodes",
                perm.len(),
                self.n
            )));
        }
        let mut out = Self::new(self.n)?;
        for (u, v) in self.arcs() {
            out.add_arc(perm[u], perm[v])?;
        }
        Ok(out)
    }

    pub fn metrics(&self) -> NetworkMetrics {
        network_metrics(self)
    }
}

/// Edge count, in-degree spread, and the omniscience predicate.
pub fn network_metrics(g: &Digraph) -> NetworkMetrics {
    let mut degrees: Vec<usize> = (0..g.n()).map(|v| g.in_degree(v)).collect();
    let max_in_degree = degrees.iter().copied().max().unwrap_or(0);
    let edge_count = degrees.iter().sum();
    degrees.sort_unstable();
    degrees.dedup();
    NetworkMetrics {
        edge_count,
        distinct_in_degrees: degrees.len(),
        max_in_degree,
        non_omniscient: max_in_degree < g.n(),
    }
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

/// Supported graph file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Json,
    Dot,
    Edges,
}

const GRAPH_FORMAT_TAG: &str = "mban-graph-v1";

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    format: String,
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Digraph {
    /// Canonical JSON form: `{"format":"mban-graph-v1","n":..,"arcs":[[u,v],..]}`
    /// with arcs sorted ascending by `(u, v)`.
    pub fn to_json(&self) -> String {
        let doc = GraphDoc {
            format: GRAPH_FORMAT_TAG.to_string(),
            n: self.n,
            arcs: self.arcs(),
        };
        serde_json::to_string(&doc).expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDoc = serde_json::from_str(text).map_err(|e| MbanError::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if doc.format != GRAPH_FORMAT_TAG {
            return Err(MbanError::Parse {
                location: "format field".into(),
                message: format!("expected {GRAPH_FORMAT_TAG:?}, found {:?}", doc.format),
            });
        }
        let mut g = Digraph::new(doc.n)?;
        for (u, v) in doc.arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// DOT form with integer node names and arcs in sorted `(u, v)` order.
    /// Nodes without any incident arc are emitted as bare statements so the
    /// node count survives a round trip.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        let mut incident = vec![false; self.n];
        for (u, v) in self.arcs() {
            incident[u] = true;
            incident[v] = true;
        }
        for (v, covered) in incident.iter().enumerate() {
            if !covered {
                out.push_str(&format!("  {v};\n"));
            }
        }
        for (u, v) in self.arcs() {
            out.push_str(&format!("  {u} -> {v};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Parses the integer-named subset of DOT emitted by [`Digraph::to_dot`].
    pub fn from_dot(text: &str) -> Result<Self> {
        let body = dot_body(text)?;
        let mut max_node = 0usize;
        let mut arcs: Vec<(usize, usize)> = Vec::new();
        let mut bare: Vec<usize> = Vec::new();
        for (idx, stmt) in body.split(';').enumerate() {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let loc = || format!("statement {}", idx + 1);
            if let Some((lhs, rhs)) = stmt.split_once("->") {
                let u = parse_node(lhs.trim(), &loc())?;
                let v = parse_node(rhs.trim(), &loc())?;
                max_node = max_node.max(u).max(v);
                arcs.push((u, v));
            } else {
                let v = parse_node(stmt, &loc())?;
                max_node = max_node.max(v);
                bare.push(v);
            }
        }
        if arcs.is_empty() && bare.is_empty() {
            return Err(MbanError::Parse {
                location: "dot body".into(),
                message: "graph has no statements; node count unknown".into(),
            });
        }
        let mut g = Digraph::new(max_node + 1)?;
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    /// Whitespace edge list: one `u v` pair per line, sorted `(u, v)` order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.arcs() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses a whitespace edge list; the node count is the largest id + 1.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut arcs: Vec<(usize, usize)> = Vec::new();
        let mut max_node = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let loc = format!("line {}", lineno + 1);
            let mut parts = line.split_whitespace();
            let u = parse_node(parts.next().unwrap_or(""), &loc)?;
            let v = parse_node(
                parts.next().ok_or_else(|| MbanError::Parse {
                    location: loc.clone(),
                    message: "expected two node ids".into(),
                })?,
                &loc,
            )?;
            if parts.next().is_some() {
                return Err(MbanError::Parse {
                    location: loc,
                    message: "expected exactly two node ids".into(),
                });
            }
            max_node = max_node.max(u).max(v);
            arcs.push((u, v));
        }
        if arcs.is_empty() {
            return Err(MbanError::Parse {
                location: "edge list".into(),
                message: "no arcs found; node count unknown".into(),
            });
        }
        let mut g = Digraph::new(max_node + 1)?;
        for (u, v) in arcs {
            g.add_arc(u, v)?;
        }
        Ok(g)
    }

    pub fn to_format(&self, format: GraphFormat) -> String {
        match format {
            GraphFormat::Json => self.to_json(),
            GraphFormat::Dot => self.to_dot(),
            GraphFormat::Edges => self.to_edge_list(),
        }
    }

    /// Parses any supported format, sniffing it from the content.
    pub fn parse(text: &str) -> Result<Self> {
        let head = text.trim_start();
        if head.starts_with('{') {
            Self::from_json(text)
        } else if head.starts_with("digraph") {
            Self::from_dot(text)
        } else {
            Self::from_edge_list(text)
        }
    }
}

fn dot_body(text: &str) -> Result<&str> {
    let trimmed = text.trim_start();
    let rest = trimmed
        .strip_prefix("digraph")
        .ok_or_else(|| MbanError::Parse {
            location: "start of file".into(),
            message: "expected `digraph`".into(),
        })?;
    let open = rest.find('{').ok_or_else(|| MbanError::Parse {
        location: "dot header".into(),
        message: "missing `{`".into(),
    })?;
    let close = rest.rfind('}').ok_or_else(|| MbanError::Parse {
        location: "dot body".into(),
        message: "missing `}`".into(),
    })?;
    if close < open {
        return Err(MbanError::Parse {
            location: "dot body".into(),
            message: "`}` precedes `{`".into(),
        });
    }
    Ok(&rest[open + 1..close])
}

fn parse_node(token: &str, location: &str) -> Result<usize> {
    let id: usize = token.parse().map_err(|_| MbanError::Parse {
        location: location.to_string(),
        message: format!("expected a node id, found {token:?}"),
    })?;
    if id >= MAX_NODES {
        return Err(MbanError::Parse {
            location: location.to_string(),
            message: format!("node id {id} exceeds the supported maximum {}", MAX_NODES - 1),
        });
    }
    Ok(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: usize) -> Digraph {
        let mut g = Digraph::new(n).unwrap();
        for u in 0..n {
            for v in 0..n {
                g.add_arc(u, v).unwrap();
            }
        }
        g
    }

    #[test]
    fn arcs_are_sorted_and_deduplicated() {
        let mut g = Digraph::new(3).unwrap();
        g.add_arc(2, 0).unwrap();
        g.add_arc(0, 1).unwrap();
        g.add_arc(0, 1).unwrap();
        assert_eq!(g.arcs(), vec![(0, 1), (2, 0)]);
        assert_eq!(g.arc_count(), 2);
    }

    #[test]
    fn metrics_complete_graph() {
        let m = network_metrics(&k(7));
        assert_eq!(m.edge_count, 49);
        assert_eq!(m.distinct_in_degrees, 1);
        assert_eq!(m.max_in_degree, 7);
        assert!(!m.non_omniscient);
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let mut g = Digraph::new(3).unwrap();
        g.add_arc(1, 2).unwrap();
        g.add_arc(0, 0).unwrap();
        let text = g.to_json();
        assert_eq!(
            text,
            r#"{"format":"mban-graph-v1","n":3,"arcs":[[0,0],[1,2]]}"#
        );
        let parsed = Digraph::from_json(&text).unwrap();
        assert_eq!(parsed, g);
        assert_eq!(parsed.to_json(), text);
    }

    #[test]
    fn json_rejects_wrong_format_tag() {
        let err = Digraph::from_json(r#"{"format":"other","n":2,"arcs":[]}"#).unwrap_err();
        assert!(matches!(err, MbanError::Parse { .. }));
    }

    #[test]
    fn json_parse_error_reports_location() {
        let err = Digraph::from_json("{\"format\":").unwrap_err();
        match err {
            MbanError::Parse { location, .. } => assert!(location.contains("line 1")),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn dot_round_trip() {
        let mut g = Digraph::new(4).unwrap();
        g.add_arc(0, 1).unwrap();
        g.add_arc(2, 0).unwrap();
        let dot = g.to_dot();
        assert_eq!(dot, "digraph {\n  3;\n  0 -> 1;\n  2 -> 0;\n}\n");
        let parsed = Digraph::from_dot(&dot).unwrap();
        assert_eq!(parsed, g);
        assert_eq!(parsed.to_dot(), dot);
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = Digraph::new(3).unwrap();
        g.add_arc(0, 1).unwrap();
        g.add_arc(2, 2).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text, "0 1\n2 2\n");
        assert_eq!(Digraph::from_edge_list(&text).unwrap(), g);
    }

    #[test]
    fn edge_list_error_carries_line_number() {
        let err = Digraph::from_edge_list("0 1\n2\n").unwrap_err();
        match err {
            MbanError::Parse { location, .. } => assert_eq!(location, "line 2"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_sniffs_format() {
        let g = k(3);
        assert_eq!(Digraph::parse(&g.to_json()).unwrap(), g);
        assert_eq!(Digraph::parse(&g.to_dot()).unwrap(), g);
        assert_eq!(Digraph::parse(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn relabel_moves_arcs() {
        let mut g = Digraph::new(3).unwrap();
        g.add_arc(0, 1).unwrap();
        let h = g.relabel(&[2, 0, 1]).unwrap();
        assert_eq!(h.arcs(), vec![(2, 0)]);
    }

    #[test]
    fn arc_bounds_are_checked() {
        let mut g = Digraph::new(2).unwrap();
        assert!(g.add_arc(0, 2).is_err());
        assert!(g.add_arc(2, 0).is_err());
    }
}
