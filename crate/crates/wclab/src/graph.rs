//! Undirected multigraphs with optional per-edge generator labels:
//! Cayley balls, Schreier graphs, and inputs for the LOCAL-model simulator.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Result, WcError};

/// One undirected edge. Loops (`u == v`) and parallel edges are permitted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    /// Generator index for Cayley/Schreier graphs, `None` for plain graphs.
    pub label: Option<usize>,
}

/// An undirected multigraph on vertices `0..n`, each carrying a distinct
/// non-negative integer ID (defaults to the vertex index). IDs matter to the
/// LOCAL-model algorithms; everything else ignores them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalGraph {
    ids: Vec<u64>,
    edges: Vec<Edge>,
}

impl LocalGraph {
    pub fn new(n: usize) -> LocalGraph {
        LocalGraph { ids: (0..n as u64).collect(), edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn id_of(&self, v: usize) -> u64 {
        self.ids[v]
    }

    pub fn set_id(&mut self, v: usize, id: u64) -> Result<()> {
        if v >= self.ids.len() {
            return Err(WcError::Graph(format!("vertex {v} out of range")));
        }
        self.ids[v] = id;
        self.check_ids_distinct()
    }

    fn check_ids_distinct(&self) -> Result<()> {
        let mut sorted = self.ids.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(WcError::Graph("vertex IDs must be pairwise distinct".into()));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: usize, v: usize, label: Option<usize>) {
        assert!(u < self.ids.len() && v < self.ids.len(), "edge endpoint out of range");
        self.edges.push(Edge { u, v, label });
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == v) as usize + (e.v == v) as usize)
            .sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Adjacency lists as `(neighbor, edge index)` pairs; a loop at v appears
    /// twice in v's list.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for (ei, e) in self.edges.iter().enumerate() {
            adj[e.u].push((e.v, ei));
            adj[e.v].push((e.u, ei));
        }
        adj
    }

    /// BFS distances from `start`; unreachable vertices get `None`.
    pub fn bfs_distances(&self, start: usize) -> Vec<Option<usize>> {
        let adj = self.adjacency();
        let mut dist = vec![None; self.vertex_count()];
        dist[start] = Some(0);
        let mut q = VecDeque::from([start]);
        while let Some(u) = q.pop_front() {
            let du = dist[u].unwrap();
            for &(w, _) in &adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        self.bfs_distances(0).iter().all(|d| d.is_some())
    }

    /// Length of a shortest cycle, or `None` if the graph is acyclic.
    /// A loop is a 1-cycle and a parallel pair a 2-cycle.
    pub fn girth(&self) -> Option<usize> {
        if self.edges.iter().any(|e| e.u == e.v) {
            return Some(1);
        }
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (e.u.min(e.v), e.u.max(e.v)))
            .collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return Some(2);
        }
        // Simple graph now: BFS from every vertex; a non-tree edge seen at
        // depth d closes a cycle of length dist[u] + dist[v] + 1. The minimum
        // over all roots is exact.
        let adj = self.adjacency();
        let mut best: Option<usize> = None;
        for s in 0..self.vertex_count() {
            let mut dist = vec![usize::MAX; self.vertex_count()];
            let mut via = vec![usize::MAX; self.vertex_count()];
            dist[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &(w, ei) in &adj[u] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        via[w] = ei;
                        q.push_back(w);
                    } else if via[u] != ei && via[w] != ei {
                        let c = dist[u] + dist[w] + 1;
                        if best.map_or(true, |b| c < b) {
                            best = Some(c);
                        }
                    }
                }
            }
        }
        best
    }

    /// Edge-list text form: first line vertex count, then `u v` per edge
    /// (vertex indices), then optional `id v value` lines.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.vertex_count());
        for e in &self.edges {
            let _ = writeln!(out, "{} {}", e.u, e.v);
        }
        for (v, &id) in self.ids.iter().enumerate() {
            if id != v as u64 {
                let _ = writeln!(out, "id {v} {id}");
            }
        }
        out
    }

    pub fn from_edge_list_text(text: &str) -> Result<LocalGraph> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let n: usize = lines
            .next()
            .ok_or_else(|| WcError::Parse("empty graph file".into()))?
            .parse()
            .map_err(|_| WcError::Parse("first line must be the vertex count".into()))?;
        let mut g = LocalGraph::new(n);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["id", v, value] => {
                    let v: usize = v
                        .parse()
                        .map_err(|_| WcError::Parse(format!("bad id line: {line}")))?;
                    let value: u64 = value
                        .parse()
                        .map_err(|_| WcError::Parse(format!("bad id line: {line}")))?;
                    g.set_id(v, value)?;
                }
                [u, v] => {
                    let u: usize = u
                        .parse()
                        .map_err(|_| WcError::Parse(format!("bad edge line: {line}")))?;
                    let v: usize = v
                        .parse()
                        .map_err(|_| WcError::Parse(format!("bad edge line: {line}")))?;
                    if u >= n || v >= n {
                        return Err(WcError::Parse(format!(
                            "edge {u} {v} out of range (n = {n})"
                        )));
                    }
                    g.add_edge(u, v, None);
                }
                _ => return Err(WcError::Parse(format!("unrecognized graph line: {line}"))),
            }
        }
        g.check_ids_distinct()?;
        Ok(g)
    }

    /// DOT export; `label_names[i]` names generator label `i` on edges.
    pub fn to_dot(&self, label_names: &[String]) -> String {
        let mut out = String::from("graph {\n");
        for (v, &id) in self.ids.iter().enumerate() {
            let _ = writeln!(out, "  {v} [label=\"{id}\"];");
        }
        for e in &self.edges {
            match e.label.and_then(|l| label_names.get(l)) {
                Some(name) => {
                    let _ = writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, name);
                }
                None => {
                    let _ = writeln!(out, "  {} -- {};", e.u, e.v);
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Parse a small DOT subset: `graph name? { ... }` with `u -- v` edge
    /// statements (attributes ignored). Vertices are numbered consecutively
    /// in order of first appearance; `u`/`v` tokens must be non-negative
    /// integers and become the vertex IDs.
    pub fn from_dot(text: &str) -> Result<LocalGraph> {
        let open = text
            .find('{')
            .ok_or_else(|| WcError::Parse("DOT input has no '{'".into()))?;
        let close = text
            .rfind('}')
            .ok_or_else(|| WcError::Parse("DOT input has no '}'".into()))?;
        let body = &text[open + 1..close];
        let mut raw_edges: Vec<(u64, u64)> = Vec::new();
        let mut order: Vec<u64> = Vec::new();
        let note = |x: u64, order: &mut Vec<u64>| {
            if !order.contains(&x) {
                order.push(x);
            }
        };
        for stmt in body.split(';') {
            let stmt = match stmt.find('[') {
                Some(i) => &stmt[..i],
                None => stmt,
            };
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let parse_id = |t: &str| -> Result<u64> {
                t.trim()
                    .parse()
                    .map_err(|_| WcError::Parse(format!("bad DOT vertex token: {t:?}")))
            };
            if let Some((u, v)) = stmt.split_once("--") {
                let u = parse_id(u)?;
                let v = parse_id(v)?;
                note(u, &mut order);
                note(v, &mut order);
                raw_edges.push((u, v));
            } else {
                note(parse_id(stmt)?, &mut order);
            }
        }
        let mut g = LocalGraph::new(order.len());
        for (i, &id) in order.iter().enumerate() {
            g.ids[i] = id;
        }
        g.check_ids_distinct()?;
        let index = |id: u64| order.iter().position(|&x| x == id).unwrap();
        for (u, v) in raw_edges {
            g.add_edge(index(u), index(v), None);
        }
        Ok(g)
    }
}

/// The n-cycle with vertex IDs 0..n (a handy test fixture and CLI builtin).
pub fn cycle_graph(n: usize) -> LocalGraph {
    let mut g = LocalGraph::new(n);
    if n == 1 {
        g.add_edge(0, 0, None);
    } else if n == 2 {
        g.add_edge(0, 1, None);
        g.add_edge(1, 0, None);
    } else {
        for v in 0..n {
            g.add_edge(v, (v + 1) % n, None);
        }
    }
    g
}
