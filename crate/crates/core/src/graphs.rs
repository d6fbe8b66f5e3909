//! Simple undirected host graphs and the edge-list text format.
//!
//! Edge-list format: one edge per line as `u v`; lines starting with `#` are
//! comments. A comment of the form `# bipartition <left> <right>` records a
//! bipartition with left vertices `0..left` and right vertices
//! `left..left+right`.

use std::collections::{BTreeSet, VecDeque};
use std::io::{BufRead, Write};

use thiserror::Error;

/// Cap on the number of edges read from a file.
pub const MAX_EDGES: usize = 10_000_000;

pub type Vertex = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: expected two non-negative integers, got {text:?}")]
    Malformed { line: usize, text: String },
    #[error("self-loop at vertex {vertex} (line {line})")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("more than {MAX_EDGES} edges")]
    TooManyEdges,
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("edge {0}-{1} does not cross the bipartition")]
    NotBipartite(Vertex, Vertex),
    #[error("path power needs 1 <= k < n (got n={n}, k={k})")]
    BadPower { n: usize, k: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostGraph {
    n: usize,
    /// Sorted, each stored as `(min, max)`.
    edges: Vec<(Vertex, Vertex)>,
    /// Sorted neighbor lists.
    adjacency: Vec<Vec<Vertex>>,
    bipartition: Option<(usize, usize)>,
}

impl HostGraph {
    /// Builds a simple graph on `n` vertices, merging duplicate edges.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line: 0, vertex: u });
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(HostGraph {
            n,
            edges,
            adjacency,
            bipartition: None,
        })
    }

    pub fn empty(n: usize) -> Self {
        HostGraph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
            bipartition: None,
        }
    }

    /// Attaches a bipartition; every edge must join `0..left` to `left..left+right`.
    pub fn with_bipartition(mut self, left: usize, right: usize) -> Result<Self, GraphError> {
        if left + right != self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: left + right,
                n: self.n,
            });
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| (u < left) == (v < left)) {
            return Err(GraphError::NotBipartite(u, v));
        }
        self.bipartition = Some((left, right));
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn bipartition(&self) -> Option<(usize, usize)> {
        self.bipartition
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: Vertex) -> Result<usize, GraphError> {
        self.adjacency
            .get(v)
            .map(Vec::len)
            .ok_or(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Connected components by breadth-first search, each sorted, in order of smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    /// True iff no edge has both endpoints in `set`.
    pub fn is_independent(&self, set: &[Vertex]) -> Result<bool, GraphError> {
        let mut member = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: v,
                    n: self.n,
                });
            }
            member[v] = true;
        }
        Ok(!self.edges.iter().any(|&(u, v)| member[u] && member[v]))
    }

    /// Subgraph on the same vertex set keeping only the selected edges.
    pub fn edge_subgraph(&self, keep: impl Fn(usize) -> bool) -> HostGraph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| keep(i))
            .map(|(_, &e)| e);
        HostGraph::from_edges(self.n, edges).expect("subgraph of a simple graph is simple")
    }

    pub fn read_edge_list<R: BufRead>(source: R) -> Result<Self, GraphError> {
        let mut edges = Vec::new();
        let mut max_label: Option<usize> = None;
        let mut bipartition = None;
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            if let Some(comment) = text.strip_prefix('#') {
                let mut words = comment.split_whitespace();
                if words.next() == Some("bipartition") {
                    let parts: Vec<usize> = words.filter_map(|w| w.parse().ok()).collect();
                    if let [l, r] = parts[..] {
                        bipartition = Some((l, r));
                    }
                }
                continue;
            }
            let malformed = || GraphError::Malformed {
                line: lineno,
                text: text.to_string(),
            };
            let mut words = text.split_whitespace();
            let u: usize = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(malformed)?;
            let v: usize = words
                .next()
                .and_then(|w| w.parse().ok())
                .ok_or_else(malformed)?;
            if words.next().is_some() {
                return Err(malformed());
            }
            if u == v {
                return Err(GraphError::SelfLoop {
                    line: lineno,
                    vertex: u,
                });
            }
            if edges.len() >= MAX_EDGES {
                return Err(GraphError::TooManyEdges);
            }
            max_label = Some(max_label.unwrap_or(0).max(u).max(v));
            edges.push((u, v));
        }
        let mut n = max_label.map_or(0, |m| m + 1);
        if let Some((l, r)) = bipartition {
            n = n.max(l + r);
        }
        let g = HostGraph::from_edges(n, edges)?;
        match bipartition {
            Some((l, r)) => g.with_bipartition(l, r),
            None => Ok(g),
        }
    }

    /// Writes sorted edges, preceded by optional header comment lines.
    pub fn write_edge_list<W: Write>(&self, mut out: W, header: &[String]) -> std::io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        if let Some((l, r)) = self.bipartition {
            writeln!(out, "# bipartition {l} {r}")?;
        }
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}

/// The k-th power of the path on n vertices: i ~ j iff 0 < |i - j| <= k.
pub fn power_of_path(n: usize, k: usize) -> Result<HostGraph, GraphError> {
    if k < 1 || k >= n {
        return Err(GraphError::BadPower { n, k });
    }
    let edges = (0..n).flat_map(|i| (i + 1..n.min(i + k + 1)).map(move |j| (i, j)));
    HostGraph::from_edges(n, edges)
}

/// Average degree `2·e/n`.
pub fn average_degree(g: &HostGraph) -> f64 {
    if g.n_vertices() == 0 {
        0.0
    } else {
        2.0 * g.n_edges() as f64 / g.n_vertices() as f64
    }
}
