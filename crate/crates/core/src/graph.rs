//! Simple undirected graphs and their all-pairs graph distances.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    IndexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("graph has no vertices")]
    Empty,
}

/// A simple undirected graph on `0..n`. Parallel edges are collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.adj.len();
        for w in [u, v] {
            if w >= n {
                return Err(GraphError::IndexOutOfRange { vertex: w, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.adj[u].contains(&v) {
            self.adj[u].push(v);
            self.adj[v].push(u);
            self.adj[u].sort_unstable();
            self.adj[v].sort_unstable();
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Sorted neighbour list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn bfs(&self, src: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs shortest path lengths by repeated BFS.
    pub fn distances(&self) -> Result<GraphDistances, GraphError> {
        let n = self.n();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut d = vec![0u32; n * n];
        for s in 0..n {
            for (t, dt) in self.bfs(s).into_iter().enumerate() {
                match dt {
                    Some(x) => d[s * n + t] = x,
                    None => return Err(GraphError::Disconnected(t)),
                }
            }
        }
        Ok(GraphDistances { n, d })
    }

    /// Cartesian product; vertex `(i, j)` is numbered `i * other.n() + j`.
    pub fn product(&self, other: &Graph) -> Graph {
        let m = other.n();
        let mut g = Graph::new(self.n() * m);
        for i in 0..self.n() {
            for j in 0..m {
                for &j2 in other.neighbors(j) {
                    if j < j2 {
                        g.add_edge(i * m + j, i * m + j2).unwrap();
                    }
                }
                for &i2 in self.neighbors(i) {
                    if i < i2 {
                        g.add_edge(i * m + j, i2 * m + j).unwrap();
                    }
                }
            }
        }
        g
    }

    /// Subgraph induced on `keep` (in the given order).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in self.neighbors(v) {
                let j = index[w];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j).unwrap();
                }
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i).unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Graph {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0).unwrap();
        }
        g
    }

    /// Star with centre 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Graph {
        let mut g = Graph::new(leaves + 1);
        for i in 1..=leaves {
            g.add_edge(0, i).unwrap();
        }
        g
    }

    /// `dim`-cube; vertex labels are the bit vectors.
    pub fn hypercube(dim: usize) -> Graph {
        let n = 1usize << dim;
        let mut g = Graph::new(n);
        for v in 0..n {
            for b in 0..dim {
                let w = v ^ (1 << b);
                if v < w {
                    g.add_edge(v, w).unwrap();
                }
            }
        }
        g
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        Graph::path(rows).product(&Graph::path(cols))
    }
}

/// Integer all-pairs distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphDistances {
    n: usize,
    d: Vec<u32>,
}

impl GraphDistances {
    pub fn from_raw(n: usize, d: Vec<u32>) -> Self {
        assert_eq!(d.len(), n * n);
        GraphDistances { n, d }
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> u32 {
        self.d[u * self.n + v]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }

    pub fn row(&self, u: usize) -> &[u32] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    /// `{ z : d(x,z) + d(z,y) = d(x,y) }`.
    pub fn interval(&self, x: usize, y: usize) -> Vec<usize> {
        let dxy = self.get(x, y);
        (0..self.n)
            .filter(|&z| self.get(x, z) + self.get(z, y) == dxy)
            .collect()
    }

    #[inline]
    pub fn between(&self, x: usize, z: usize, y: usize) -> bool {
        self.get(x, z) + self.get(z, y) == self.get(x, y)
    }

    /// Distance from `v` to a nonempty set.
    pub fn to_set(&self, v: usize, set: &[usize]) -> u32 {
        set.iter().map(|&s| self.get(v, s)).min().expect("nonempty set")
    }

    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> u32 {
        a.iter().map(|&x| self.to_set(x, b)).min().expect("nonempty set")
    }

    pub fn ball(&self, c: usize, r: u32) -> Vec<usize> {
        (0..self.n).filter(|&v| self.get(c, v) <= r).collect()
    }
}
