//! Undirected simple graphs with dense integer vertex ids, plus the path,
//! path-factor, matching, and subgraph values used throughout the crate.
//!
//! `Graph` is immutable after construction and cheap to share. `Subgraph` is
//! the single-writer mutable companion used by the embedding engine: it tracks
//! a vertex set, an edge set, and per-vertex degrees inside the subgraph.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Errors from graph construction and the path/subgraph operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge ({0},{0}) is not allowed")]
    LoopEdge(usize),
    #[error("edge ({u},{v}) out of range for {n} vertices")]
    OutOfRange { u: usize, v: usize, n: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("path vertex {0} repeated")]
    RepeatedPathVertex(usize),
    #[error("consecutive path vertices ({0},{1}) are not an edge of the graph")]
    MissingEdge(usize, usize),
    #[error("path must contain at least one vertex")]
    EmptyPath,
    #[error("path vertex {0} collides with an existing subgraph vertex")]
    VertexCollision(usize),
    #[error("edge ({0},{1}) already present in subgraph")]
    DuplicateSubgraphEdge(usize, usize),
    #[error("vertex {0} not present in subgraph")]
    AbsentVertex(usize),
    #[error("vertex {0} has subgraph degree {1}, not a removable leaf")]
    NotALeaf(usize, u32),
    #[error("invalid JSON graph: {0}")]
    BadJson(String),
}

/// An immutable undirected simple graph on vertices `0..n`.
///
/// Adjacency lists are kept sorted so every traversal in the crate is
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    edge_count: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    #[serde(default = "default_schema", skip_serializing_if = "String::is_empty")]
    schema: String,
    n: usize,
    edges: Vec<(usize, usize)>,
}

fn default_schema() -> String {
    String::new()
}

impl Graph {
    /// Builds a graph from an edge list, deduplicating repeated edges.
    ///
    /// Rejects loops and out-of-range endpoints, naming the offending pair.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::LoopEdge(u));
            }
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph {
            n,
            adj,
            edge_count: set.len(),
        })
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Degree of `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Whether `{u,v}` is an edge.
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges as `(u,v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Maximum degree (0 for the empty graph).
    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Average degree `2|E|/n`.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.n as f64
        }
    }

    /// `Some(d)` when every vertex has degree exactly `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0.min(self.n.saturating_sub(1)));
        if self.n > 0 && self.adj.iter().all(|l| l.len() == d) {
            Some(d)
        } else {
            None
        }
    }

    /// Whether the graph is connected (vacuously true when empty).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// The external neighborhood of `u_set`: all vertices outside `u_set`
    /// adjacent to at least one of its members.
    pub fn external_neighborhood(&self, u_set: &[usize]) -> Result<Vec<usize>, GraphError> {
        let mut in_set = vec![false; self.n];
        for &u in u_set {
            if u >= self.n {
                return Err(GraphError::VertexOutOfRange(u));
            }
            in_set[u] = true;
        }
        let mut hit = vec![false; self.n];
        for &u in u_set {
            for &w in &self.adj[u] {
                if !in_set[w] {
                    hit[w] = true;
                }
            }
        }
        Ok((0..self.n).filter(|&v| hit[v]).collect())
    }

    /// Serializes as `{"schema":"v1","n":...,"edges":[[u,v],...]}` with the
    /// edge list sorted, so equal graphs serialize to identical bytes.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "v1",
            "n": self.n,
            "edges": self.edges(),
        })
    }

    /// Parses the JSON graph schema `{"n":...,"edges":[[u,v],...]}`.
    /// A `schema` field is accepted and ignored if present.
    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let parsed: GraphJson =
            serde_json::from_str(s).map_err(|e| GraphError::BadJson(e.to_string()))?;
        Graph::from_edges(parsed.n, &parsed.edges)
    }

    /// DOT export: undirected, one edge per line; isolated vertices listed.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for v in 0..self.n {
            if self.adj[v].is_empty() {
                out.push_str(&format!("  {v};\n"));
            }
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// A sequence of distinct vertices; consecutive pairs are edges when the path
/// is validated against a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    /// Builds a path from a vertex sequence, rejecting repeats.
    pub fn new(vertices: Vec<usize>) -> Result<Self, GraphError> {
        if vertices.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            if !seen.insert(v) {
                return Err(GraphError::RepeatedPathVertex(v));
            }
        }
        Ok(Path { vertices })
    }

    /// The vertex sequence.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of edges (vertices minus one).
    pub fn length(&self) -> usize {
        self.vertices.len() - 1
    }

    /// First and last vertex.
    pub fn endpoints(&self) -> (usize, usize) {
        (self.vertices[0], *self.vertices.last().unwrap())
    }

    /// The same path traversed in the opposite direction.
    pub fn reversed(&self) -> Path {
        let mut v = self.vertices.clone();
        v.reverse();
        Path { vertices: v }
    }

    /// Interior vertices (all but the two endpoints).
    pub fn interior(&self) -> &[usize] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    /// Checks every consecutive pair is an edge of `g`.
    pub fn validate_in(&self, g: &Graph) -> Result<(), GraphError> {
        for w in self.vertices.windows(2) {
            if !g.has_edge(w[0], w[1]) {
                return Err(GraphError::MissingEdge(w[0], w[1]));
            }
        }
        Ok(())
    }
}

/// A family of vertex-disjoint paths meant to cover `target_set` exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathFactor {
    pub paths: Vec<Path>,
    /// Sorted list of the vertices the factor must cover.
    pub target_set: Vec<usize>,
}

/// Outcome of [`is_valid_path_factor`]: either valid, or the first violated
/// clause with detail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorDiagnostic {
    Valid,
    /// Two paths share the named vertex.
    Disjointness(usize),
    /// The named target vertex is not covered / the named vertex is covered
    /// but absent from the target set.
    Coverage(usize),
    /// A path uses a missing edge.
    PathValidity(usize, usize),
    /// Path `index` has endpoints that do not match the requested pair.
    EndpointMismatch { index: usize },
}

/// Validates a path factor: pairwise disjointness, exact coverage of the
/// target set, per-path validity in `g`, and (when given) that path `i`'s
/// endpoint pair equals `endpoint_constraint[i]` up to order.
///
/// Returns `true` plus [`FactorDiagnostic::Valid`], or `false` plus the first
/// violation found (disjointness, then coverage, then validity, then
/// endpoints).
pub fn is_valid_path_factor(
    g: &Graph,
    f: &PathFactor,
    endpoint_constraint: Option<&[(usize, usize)]>,
) -> (bool, FactorDiagnostic) {
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for p in &f.paths {
        for &v in p.vertices() {
            if !seen.insert(v) {
                return (false, FactorDiagnostic::Disjointness(v));
            }
        }
    }
    let target: BTreeSet<usize> = f.target_set.iter().copied().collect();
    for &v in &target {
        if !seen.contains(&v) {
            return (false, FactorDiagnostic::Coverage(v));
        }
    }
    for &v in &seen {
        if !target.contains(&v) {
            return (false, FactorDiagnostic::Coverage(v));
        }
    }
    for p in &f.paths {
        if let Err(GraphError::MissingEdge(u, v)) = p.validate_in(g) {
            return (false, FactorDiagnostic::PathValidity(u, v));
        }
    }
    if let Some(cons) = endpoint_constraint {
        for (i, p) in f.paths.iter().enumerate() {
            let (a, b) = p.endpoints();
            match cons.get(i) {
                Some(&(x, y)) if (a, b) == (x, y) || (a, b) == (y, x) => {}
                _ => return (false, FactorDiagnostic::EndpointMismatch { index: i }),
            }
        }
        if cons.len() != f.paths.len() {
            return (
                false,
                FactorDiagnostic::EndpointMismatch {
                    index: f.paths.len().min(cons.len()),
                },
            );
        }
    }
    (true, FactorDiagnostic::Valid)
}

/// A set of vertex-disjoint edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// Checks all endpoints distinct and every pair an edge of `g`.
    pub fn validate_in(&self, g: &Graph) -> Result<(), GraphError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in &self.pairs {
            if !g.has_edge(u, v) {
                return Err(GraphError::MissingEdge(u, v));
            }
            if !seen.insert(u) {
                return Err(GraphError::RepeatedPathVertex(u));
            }
            if !seen.insert(v) {
                return Err(GraphError::RepeatedPathVertex(v));
            }
        }
        Ok(())
    }
}

/// A mutable subgraph of an ambient graph on `0..n`: a vertex set, an edge
/// set, and per-vertex degrees within the subgraph.
///
/// Single-writer: no concurrent mutation contract.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    n: usize,
    present: Vec<bool>,
    s_adj: Vec<Vec<usize>>,
    vertex_count: usize,
    edge_count: usize,
}

impl Subgraph {
    /// The empty subgraph of an ambient graph with `n` vertices.
    pub fn empty(n: usize) -> Self {
        Subgraph {
            n,
            present: vec![false; n],
            s_adj: vec![Vec::new(); n],
            vertex_count: 0,
            edge_count: 0,
        }
    }

    /// The edgeless subgraph on the given vertices.
    pub fn edgeless(n: usize, vertices: &[usize]) -> Result<Self, GraphError> {
        let mut s = Subgraph::empty(n);
        for &v in vertices {
            s.add_vertex(v)?;
        }
        Ok(s)
    }

    /// Ambient vertex count.
    pub fn ambient_n(&self) -> usize {
        self.n
    }

    /// Number of vertices currently in the subgraph.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Number of edges currently in the subgraph.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Whether `v` is in the subgraph.
    pub fn has_vertex(&self, v: usize) -> bool {
        v < self.n && self.present[v]
    }

    /// Degree of `v` within the subgraph (0 when absent).
    pub fn degree(&self, v: usize) -> u32 {
        self.s_adj[v].len() as u32
    }

    /// Sorted neighbors of `v` within the subgraph.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.s_adj[v]
    }

    /// All current vertices in ascending order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.present[v]).collect()
    }

    /// Maximum degree within the subgraph.
    pub fn max_degree(&self) -> u32 {
        self.s_adj.iter().map(|l| l.len() as u32).max().unwrap_or(0)
    }

    /// Adds an isolated vertex. Errors if already present or out of range.
    pub fn add_vertex(&mut self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v));
        }
        if self.present[v] {
            return Err(GraphError::VertexCollision(v));
        }
        self.present[v] = true;
        self.vertex_count += 1;
        Ok(())
    }

    /// Adds an edge between two present vertices.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::LoopEdge(u));
        }
        for w in [u, v] {
            if !self.has_vertex(w) {
                return Err(GraphError::AbsentVertex(w));
            }
        }
        if self.s_adj[u].binary_search(&v).is_ok() {
            return Err(GraphError::DuplicateSubgraphEdge(u, v));
        }
        let pu = self.s_adj[u].binary_search(&v).unwrap_err();
        self.s_adj[u].insert(pu, v);
        let pv = self.s_adj[v].binary_search(&u).unwrap_err();
        self.s_adj[v].insert(pv, u);
        self.edge_count += 1;
        Ok(())
    }

    /// Removes an existing edge.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let pu = self.s_adj[u]
            .binary_search(&v)
            .map_err(|_| GraphError::MissingEdge(u, v))?;
        self.s_adj[u].remove(pu);
        let pv = self.s_adj[v]
            .binary_search(&u)
            .map_err(|_| GraphError::MissingEdge(u, v))?;
        self.s_adj[v].remove(pv);
        self.edge_count -= 1;
        Ok(())
    }

    /// Removes a vertex of subgraph degree at most 1 together with its edge.
    pub fn remove_leaf(&mut self, v: usize) -> Result<(), GraphError> {
        if !self.has_vertex(v) {
            return Err(GraphError::AbsentVertex(v));
        }
        match self.s_adj[v].len() {
            0 => {}
            1 => {
                let w = self.s_adj[v][0];
                self.remove_edge(v, w)?;
            }
            d => return Err(GraphError::NotALeaf(v, d as u32)),
        }
        self.present[v] = false;
        self.vertex_count -= 1;
        Ok(())
    }

    /// Adds a path to the subgraph: interior vertices must be new; endpoint
    /// vertices may be present already (or are added). Every path edge must be
    /// an edge of `host`. Errors name the first colliding interior vertex.
    pub fn add_path(&mut self, host: &Graph, p: &Path) -> Result<(), GraphError> {
        p.validate_in(host)?;
        for &v in p.interior() {
            if self.has_vertex(v) {
                return Err(GraphError::VertexCollision(v));
            }
        }
        for &v in p.vertices() {
            if !self.has_vertex(v) {
                self.add_vertex(v)?;
            }
        }
        for w in p.vertices().windows(2) {
            self.add_edge(w[0], w[1])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn petersen() -> Graph {
        let mut e = Vec::new();
        for i in 0..5 {
            e.push((i, (i + 1) % 5));
            e.push((i, i + 5));
            e.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edges(10, &e).unwrap()
    }

    #[test]
    fn from_edges_p3_degrees() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            (0..3).map(|v| g.degree(v)).collect::<Vec<_>>(),
            vec![1, 2, 1]
        );
    }

    #[test]
    fn from_edges_c4_regular() {
        let g = c4();
        assert_eq!(g.regular_degree(), Some(2));
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn from_edges_dedup() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn from_edges_rejects_loop_and_range() {
        assert_eq!(
            Graph::from_edges(3, &[(1, 1)]),
            Err(GraphError::LoopEdge(1))
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(GraphError::OutOfRange { u: 0, v: 3, n: 3 })
        );
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let g = petersen();
        let sum: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        assert_eq!(sum, 2 * g.edge_count());
    }

    #[test]
    fn external_neighborhood_c4() {
        let g = c4();
        assert_eq!(g.external_neighborhood(&[0]).unwrap(), vec![1, 3]);
        assert_eq!(
            g.external_neighborhood(&[0, 1, 2, 3]).unwrap(),
            Vec::<usize>::new()
        );
    }

    #[test]
    fn external_neighborhood_petersen_singleton() {
        let g = petersen();
        assert_eq!(g.external_neighborhood(&[0]).unwrap().len(), 3);
    }

    #[test]
    fn external_neighborhood_disjoint_from_input() {
        let g = petersen();
        for u in 0..10 {
            let ext = g.external_neighborhood(&[u, (u + 1) % 10]).unwrap();
            assert!(!ext.contains(&u));
            assert!(!ext.contains(&((u + 1) % 10)));
        }
    }

    #[test]
    fn path_rejects_repeat() {
        assert_eq!(
            Path::new(vec![0, 1, 0]),
            Err(GraphError::RepeatedPathVertex(0))
        );
    }

    #[test]
    fn path_validates_edges() {
        let g = c4();
        let p = Path::new(vec![0, 1, 2]).unwrap();
        assert!(p.validate_in(&g).is_ok());
        let q = Path::new(vec![0, 2]).unwrap();
        assert_eq!(q.validate_in(&g), Err(GraphError::MissingEdge(0, 2)));
    }

    #[test]
    fn subgraph_add_path_and_roundtrip() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let mut s = Subgraph::edgeless(6, &[0, 3]).unwrap();
        let before = s.clone();
        let p = Path::new(vec![0, 1, 2, 3]).unwrap();
        s.add_path(&g, &p).unwrap();
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.degree(0), 1);
        assert_eq!(s.degree(3), 1);
        // Remove the path again from one end: interior vertices become leaves.
        s.remove_edge(0, 1).unwrap();
        s.remove_leaf(1).unwrap();
        s.remove_edge(3, 2).unwrap();
        s.remove_leaf(2).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn subgraph_add_path_collision() {
        let g = c4();
        let mut s = Subgraph::edgeless(4, &[0, 2, 1]).unwrap();
        let p = Path::new(vec![0, 1, 2]).unwrap();
        assert_eq!(s.add_path(&g, &p), Err(GraphError::VertexCollision(1)));
    }

    #[test]
    fn subgraph_single_edge_path() {
        let g = c4();
        let mut s = Subgraph::empty(4);
        s.add_path(&g, &Path::new(vec![0, 1]).unwrap()).unwrap();
        assert_eq!((s.vertex_count(), s.edge_count()), (2, 1));
    }

    #[test]
    fn factor_valid_on_c4_split() {
        let g = c4();
        let f = PathFactor {
            paths: vec![
                Path::new(vec![0, 1]).unwrap(),
                Path::new(vec![2, 3]).unwrap(),
            ],
            target_set: vec![0, 1, 2, 3],
        };
        let (ok, d) = is_valid_path_factor(&g, &f, None);
        assert!(ok);
        assert_eq!(d, FactorDiagnostic::Valid);
    }

    #[test]
    fn factor_detects_sharing() {
        let g = c4();
        let f = PathFactor {
            paths: vec![
                Path::new(vec![0, 1]).unwrap(),
                Path::new(vec![1, 2]).unwrap(),
            ],
            target_set: vec![0, 1, 2],
        };
        let (ok, d) = is_valid_path_factor(&g, &f, None);
        assert!(!ok);
        assert_eq!(d, FactorDiagnostic::Disjointness(1));
    }

    #[test]
    fn factor_detects_missing_coverage() {
        let g = c4();
        let f = PathFactor {
            paths: vec![Path::new(vec![0, 1]).unwrap()],
            target_set: vec![0, 1, 2],
        };
        let (ok, d) = is_valid_path_factor(&g, &f, None);
        assert!(!ok);
        assert_eq!(d, FactorDiagnostic::Coverage(2));
    }

    #[test]
    fn factor_endpoint_constraints() {
        let g = c4();
        let f = PathFactor {
            paths: vec![
                Path::new(vec![0, 1]).unwrap(),
                Path::new(vec![2, 3]).unwrap(),
            ],
            target_set: vec![0, 1, 2, 3],
        };
        let (ok, _) = is_valid_path_factor(&g, &f, Some(&[(1, 0), (2, 3)]));
        assert!(ok);
        let (ok2, d2) = is_valid_path_factor(&g, &f, Some(&[(0, 2), (2, 3)]));
        assert!(!ok2);
        assert_eq!(d2, FactorDiagnostic::EndpointMismatch { index: 0 });
    }

    #[test]
    fn json_roundtrip() {
        let g = petersen();
        let s = g.to_json_value().to_string();
        let g2 = Graph::from_json_str(&s).unwrap();
        assert_eq!(g, g2);
        // Without the schema field parsing still works.
        let bare = serde_json::json!({"n": 3, "edges": [[0,1],[1,2]]}).to_string();
        assert_eq!(Graph::from_json_str(&bare).unwrap().edge_count(), 2);
    }

    #[test]
    fn dot_export_shape() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let dot = g.to_dot("g");
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.contains("  2;"));
        assert!(dot.starts_with("graph g {"));
    }

    #[test]
    fn matching_validation() {
        let g = c4();
        assert!(Matching {
            pairs: vec![(0, 1), (2, 3)]
        }
        .validate_in(&g)
        .is_ok());
        assert!(Matching {
            pairs: vec![(0, 1), (1, 2)]
        }
        .validate_in(&g)
        .is_err());
        assert!(Matching {
            pairs: vec![(0, 2)]
        }
        .validate_in(&g)
        .is_err());
    }
}
