//! Median graphs: the vertex sets of finite CAT(0) cube complexes.
//!
//! A [`MedianGraph`] is built by [`MedianGraph::recognize`], which checks
//! that every triple has a unique median and then splits the edges into
//! Θ-classes (hyperplanes). Each hyperplane cuts the vertex set into two
//! convex halfspaces, and the combinatorial distance `d1` counts separating
//! hyperplanes. The ℓ∞ vertex distance `σ_Q` is the length of the longest
//! chain of pairwise disjoint separating hyperplanes.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{Graph, GraphDistances, GraphError};
use crate::metric::FiniteMetric;
use crate::rational::q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MedianError {
    #[error("not a median graph: triple ({0}, {1}, {2}) has no unique median")]
    NotMedian(usize, usize, usize),
    #[error("empty input set")]
    EmptyInput,
    #[error("vertex {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid chain at hyperplane {0}")]
    InvalidChain(usize),
    #[error("r = {r} outside [0, {max}]")]
    ROutOfRange { r: u32, max: u32 },
    #[error("empty contraction family")]
    EmptyFamily,
    #[error("construction invariant failed: {0}")]
    InvariantViolated(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }
}

/// A Θ-class of edges together with the two halfspaces it bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub id: usize,
    /// Edges `(u, v)`, `u < v`, crossing this hyperplane.
    pub edges: Vec<(usize, usize)>,
    /// The halfspace containing vertex 0.
    pub minus: Vec<usize>,
    pub plus: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MedianGraph {
    graph: Graph,
    d1: GraphDistances,
    hyperplanes: Vec<Hyperplane>,
    /// `in_plus[h][v]`
    in_plus: Vec<Vec<bool>>,
    crossing: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
    edge_class: Vec<usize>,
    nu: usize,
    median: Vec<u32>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl MedianGraph {
    /// Recognizes a median graph, reporting the lexicographically first
    /// triple without a unique median otherwise.
    pub fn recognize(graph: &Graph) -> Result<Self, MedianError> {
        let d1 = graph.distances()?;
        let n = graph.n();
        let mut median = vec![0u32; n * n * n];
        for x in 0..n {
            for y in x..n {
                for z in y..n {
                    let m = if x == y || y == z {
                        y
                    } else {
                        let mut found = None;
                        for w in 0..n {
                            if d1.between(x, w, y) && d1.between(y, w, z) && d1.between(x, w, z) {
                                if found.is_some() {
                                    return Err(MedianError::NotMedian(x, y, z));
                                }
                                found = Some(w);
                            }
                        }
                        found.ok_or(MedianError::NotMedian(x, y, z))?
                    };
                    for (a, b, c) in [(x, y, z), (x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)] {
                        median[(a * n + b) * n + c] = m as u32;
                    }
                }
            }
        }

        // Θ-classes: opposite edges of 4-cycles, closed transitively.
        let edges = graph.edges();
        let edge_index = |u: usize, v: usize| -> usize {
            let key = if u < v { (u, v) } else { (v, u) };
            edges.binary_search(&key).expect("edge present")
        };
        let mut uf = UnionFind((0..edges.len()).collect());
        for (e, &(u, v)) in edges.iter().enumerate() {
            for &x in graph.neighbors(u) {
                if x == v {
                    continue;
                }
                for &y in graph.neighbors(v) {
                    if y == u || y == x {
                        continue;
                    }
                    if graph.has_edge(x, y) {
                        uf.union(e, edge_index(x, y));
                    }
                }
            }
        }
        let mut root_to_class = vec![usize::MAX; edges.len()];
        let mut edge_class = vec![0; edges.len()];
        let mut hyperplanes: Vec<Hyperplane> = Vec::new();
        for e in 0..edges.len() {
            let r = uf.find(e);
            if root_to_class[r] == usize::MAX {
                root_to_class[r] = hyperplanes.len();
                hyperplanes.push(Hyperplane {
                    id: hyperplanes.len(),
                    edges: Vec::new(),
                    minus: Vec::new(),
                    plus: Vec::new(),
                });
            }
            edge_class[e] = root_to_class[r];
            hyperplanes[root_to_class[r]].edges.push(edges[e]);
        }
        let mut in_plus = Vec::with_capacity(hyperplanes.len());
        for h in hyperplanes.iter_mut() {
            let (u, v) = h.edges[0];
            // Side of u is the set of vertices closer to u than to v.
            let zero_near_u = d1.get(0, u) < d1.get(0, v);
            let (mu, mv) = if zero_near_u { (u, v) } else { (v, u) };
            let mut side = vec![false; n];
            for w in 0..n {
                if d1.get(w, mu) < d1.get(w, mv) {
                    h.minus.push(w);
                } else {
                    side[w] = true;
                    h.plus.push(w);
                }
            }
            in_plus.push(side);
        }
        // Each edge must cross exactly its own hyperplane.
        for (e, &(u, v)) in edges.iter().enumerate() {
            for (hid, side) in in_plus.iter().enumerate() {
                if (side[u] != side[v]) != (hid == edge_class[e]) {
                    return Err(MedianError::InvariantViolated("Θ-class is not a cut"));
                }
            }
        }
        let h = hyperplanes.len();
        let mut crossing = vec![vec![false; h]; h];
        for a in 0..h {
            for b in a + 1..h {
                let mut quad = [false; 4];
                for w in 0..n {
                    quad[(in_plus[a][w] as usize) * 2 + in_plus[b][w] as usize] = true;
                }
                let c = quad.iter().all(|&x| x);
                crossing[a][b] = c;
                crossing[b][a] = c;
            }
        }
        let nu = if h == 0 { 0 } else { max_clique(&crossing) };
        let g = MedianGraph {
            graph: graph.clone(),
            d1,
            hyperplanes,
            in_plus,
            crossing,
            edges,
            edge_class,
            nu,
            median,
        };
        for x in 0..n {
            for y in 0..n {
                let hamming = (0..h).filter(|&k| g.in_plus[k][x] != g.in_plus[k][y]).count();
                if hamming as u32 != g.d1.get(x, y) {
                    return Err(MedianError::InvariantViolated("distance differs from hyperplane count"));
                }
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn d1(&self) -> &GraphDistances {
        &self.d1
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn hyperplane_count(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), MedianError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(MedianError::IndexOutOfRange { index: v, n: self.n() })
        }
    }

    #[inline]
    pub fn median(&self, x: usize, y: usize, z: usize) -> usize {
        let n = self.n();
        self.median[(x * n + y) * n + z] as usize
    }

    #[inline]
    pub fn side(&self, h: usize, v: usize) -> Side {
        if self.in_plus[h][v] {
            Side::Plus
        } else {
            Side::Minus
        }
    }

    /// Sign vector over hyperplanes; `true` means the plus halfspace.
    pub fn coords(&self, v: usize) -> Vec<bool> {
        self.in_plus.iter().map(|s| s[v]).collect()
    }

    #[inline]
    pub fn separates(&self, h: usize, x: usize, y: usize) -> bool {
        self.in_plus[h][x] != self.in_plus[h][y]
    }

    pub fn crosses(&self, a: usize, b: usize) -> bool {
        self.crossing[a][b]
    }

    /// Distinct and non-crossing.
    pub fn disjoint(&self, a: usize, b: usize) -> bool {
        a != b && !self.crossing[a][b]
    }

    /// The halfspace of `h` containing the (disjoint) hyperplane `other`.
    pub fn side_containing(&self, h: usize, other: usize) -> Option<Side> {
        if !self.disjoint(h, other) {
            return None;
        }
        let (u, _) = self.hyperplanes[other].edges[0];
        Some(self.side(h, u))
    }

    /// Hyperplane dual to the edge `{u, v}`.
    pub fn edge_hyperplane(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.binary_search(&key).ok().map(|e| self.edge_class[e])
    }

    /// Hyperplanes separating `x` from `y`.
    pub fn separators(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.hyperplane_count()).filter(|&h| self.separates(h, x, y)).collect()
    }

    /// Coordinatewise majority vote, for cross-checking [`Self::median`].
    pub fn majority(&self, x: usize, y: usize, z: usize) -> Vec<bool> {
        self.in_plus
            .iter()
            .map(|s| (s[x] as u8 + s[y] as u8 + s[z] as u8) >= 2)
            .collect()
    }

    /// `d1` as a [`FiniteMetric`].
    pub fn l1_metric(&self) -> FiniteMetric {
        FiniteMetric::from_distances(&self.d1)
    }

    /// The ℓ∞ vertex distance `σ_Q` as a [`FiniteMetric`].
    pub fn linf_metric(&self) -> FiniteMetric {
        let n = self.n();
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in x + 1..n {
                let v = linf_distance(self, x, y);
                table[x * n + y] = v;
                table[y * n + x] = v;
            }
        }
        FiniteMetric::from_fn_unchecked(n, |x, y| q(table[x * n + y] as i64))
    }

    fn check_set(&self, a: &[usize]) -> Result<(), MedianError> {
        if a.is_empty() {
            return Err(MedianError::EmptyInput);
        }
        a.iter().try_for_each(|&v| self.check_vertex(v))
    }
}

fn max_clique(adj: &[Vec<bool>]) -> usize {
    fn extend(adj: &[Vec<bool>], size: usize, cand: Vec<usize>, best: &mut usize) {
        if size + cand.len() <= *best {
            return;
        }
        if cand.is_empty() {
            *best = size;
            return;
        }
        for (i, &v) in cand.iter().enumerate() {
            if size + cand.len() - i <= *best {
                return;
            }
            let next: Vec<usize> = cand[i + 1..].iter().copied().filter(|&w| adj[v][w]).collect();
            extend(adj, size + 1, next, best);
        }
    }
    let mut best = 0;
    extend(adj, 0, (0..adj.len()).collect(), &mut best);
    best
}

fn to_mask(n: usize, a: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in a {
        m[v] = true;
    }
    m
}

fn from_mask(m: &[bool]) -> Vec<usize> {
    m.iter().enumerate().filter_map(|(i, &b)| b.then_some(i)).collect()
}

/// Least median-closed set containing `a`: closes under `μ(q, a, b)` for
/// members `a, b` and arbitrary `q` until nothing changes.
pub fn convex_hull_bruteforce(g: &MedianGraph, a: &[usize]) -> Result<Vec<usize>, MedianError> {
    g.check_set(a)?;
    let n = g.n();
    let mut inside = to_mask(n, a);
    loop {
        let members = from_mask(&inside);
        let mut changed = false;
        for &x in &members {
            for &y in &members {
                for w in 0..n {
                    let m = g.median(w, x, y);
                    if !inside[m] {
                        inside[m] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return Ok(from_mask(&inside));
        }
    }
}

/// Intersection of every halfspace containing `a`.
pub fn halfspace_hull(g: &MedianGraph, a: &[usize]) -> Result<Vec<usize>, MedianError> {
    g.check_set(a)?;
    let mut inside = vec![true; g.n()];
    for h in 0..g.hyperplane_count() {
        let s = g.side(h, a[0]);
        if a.iter().all(|&v| g.side(h, v) == s) {
            for (v, slot) in inside.iter_mut().enumerate() {
                if g.side(h, v) != s {
                    *slot = false;
                }
            }
        }
    }
    Ok(from_mask(&inside))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedHull {
    /// `A_0 ⊆ A_1 ⊆ … ⊆ A_step`, each sorted.
    pub levels: Vec<Vec<usize>>,
    /// Least `i` with `A_{i+1} = A_i`.
    pub step: usize,
    pub matches_bruteforce: bool,
    /// `step <= max(1, ν - 1)`.
    pub within_bound: bool,
}

impl IteratedHull {
    pub fn hull(&self) -> &[usize] {
        self.levels.last().expect("at least A_0")
    }
}

/// Iterates `A_{i+1} = { μ(x, a, b) : a, b ∈ A_i, x any vertex }` to its
/// fixed point.
pub fn iterated_median_hull(g: &MedianGraph, a: &[usize]) -> Result<IteratedHull, MedianError> {
    g.check_set(a)?;
    let n = g.n();
    let mut current = to_mask(n, a);
    let mut levels = vec![from_mask(&current)];
    loop {
        let members = levels.last().unwrap().clone();
        let mut next = current.clone();
        for &x in &members {
            for &y in &members {
                for w in 0..n {
                    next[g.median(w, x, y)] = true;
                }
            }
        }
        if next == current {
            break;
        }
        current = next;
        levels.push(from_mask(&current));
    }
    let step = levels.len() - 1;
    let brute = convex_hull_bruteforce(g, a)?;
    Ok(IteratedHull {
        matches_bruteforce: *levels.last().unwrap() == brute,
        within_bound: step <= core::cmp::max(1, g.nu().saturating_sub(1)),
        step,
        levels,
    })
}

/// Longest chain of pairwise disjoint hyperplanes separating `x` from `y`,
/// ordered from `x` to `y`.
pub fn linf_chain(g: &MedianGraph, x: usize, y: usize) -> Vec<usize> {
    let mut seps = g.separators(x, y);
    // Nested x-halfspaces grow along any chain from x to y.
    let xside_size = |h: usize| -> usize {
        let s = g.side(h, x);
        (0..g.n()).filter(|&v| g.side(h, v) == s).count()
    };
    seps.sort_by_key(|&h| (xside_size(h), h));
    let k = seps.len();
    let mut best = vec![1usize; k];
    let mut parent = vec![usize::MAX; k];
    for j in 0..k {
        for i in 0..j {
            let (a, b) = (seps[i], seps[j]);
            let before = g.side_containing(a, b) == Some(g.side(a, y));
            if before && best[i] + 1 > best[j] {
                best[j] = best[i] + 1;
                parent[j] = i;
            }
        }
    }
    let Some(mut end) = (0..k).max_by_key(|&j| (best[j], core::cmp::Reverse(j))) else {
        return Vec::new();
    };
    let mut chain = vec![seps[end]];
    while parent[end] != usize::MAX {
        end = parent[end];
        chain.push(seps[end]);
    }
    chain.reverse();
    chain
}

/// The ℓ∞ vertex distance `σ_Q(x, y)`.
pub fn linf_distance(g: &MedianGraph, x: usize, y: usize) -> u32 {
    linf_chain(g, x, y).len() as u32
}

/// Whether `seq` is a chain: pairwise disjoint, and `H_j` separates `H_i`
/// from `H_k` whenever `i < j < k`.
pub fn is_chain(g: &MedianGraph, seq: &[usize]) -> bool {
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if !g.disjoint(seq[i], seq[j]) {
                return false;
            }
        }
    }
    for j in 0..seq.len() {
        for i in 0..j {
            for k in j + 1..seq.len() {
                if g.side_containing(seq[j], seq[i]) == g.side_containing(seq[j], seq[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// An integer-valued 0-contraction given by a chain of hyperplanes: the
/// value at a vertex counts the hyperplanes whose `passed` side contains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainContraction {
    pub chain: Vec<usize>,
    pub passed: Vec<Side>,
}

impl ChainContraction {
    pub fn new(g: &MedianGraph, chain: Vec<usize>, passed: Vec<Side>) -> Result<Self, MedianError> {
        let c = ChainContraction { chain, passed };
        c.validate(g)?;
        Ok(c)
    }

    /// Orients every hyperplane towards its successor (the last one away
    /// from its predecessor; a lone hyperplane towards its plus side).
    pub fn oriented(g: &MedianGraph, chain: Vec<usize>) -> Result<Self, MedianError> {
        let h = g.hyperplane_count();
        if let Some(&bad) = chain.iter().find(|&&id| id >= h) {
            return Err(MedianError::InvalidChain(bad));
        }
        let k = chain.len();
        let mut passed = Vec::with_capacity(k);
        for i in 0..k {
            let s = if k == 1 {
                Some(Side::Plus)
            } else if i + 1 < k {
                g.side_containing(chain[i], chain[i + 1])
            } else {
                g.side_containing(chain[i], chain[i - 1]).map(Side::flip)
            };
            passed.push(s.ok_or(MedianError::InvalidChain(chain[i]))?);
        }
        ChainContraction::new(g, chain, passed)
    }

    pub fn validate(&self, g: &MedianGraph) -> Result<(), MedianError> {
        let h = g.hyperplane_count();
        if self.passed.len() != self.chain.len() {
            return Err(MedianError::InvalidChain(self.chain.first().copied().unwrap_or(0)));
        }
        if let Some(&bad) = self.chain.iter().find(|&&id| id >= h) {
            return Err(MedianError::InvalidChain(bad));
        }
        for (i, &a) in self.chain.iter().enumerate() {
            for (j, &b) in self.chain.iter().enumerate().skip(i + 1) {
                // Later hyperplanes sit on the passed side of earlier ones,
                // earlier ones on the unpassed side of later ones.
                if g.side_containing(a, b) != Some(self.passed[i])
                    || g.side_containing(b, a) != Some(self.passed[j].flip())
                {
                    return Err(MedianError::InvalidChain(b));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, g: &MedianGraph, v: usize) -> i64 {
        self.chain
            .iter()
            .zip(&self.passed)
            .filter(|(&h, &s)| g.side(h, v) == s)
            .count() as i64
    }

    pub fn values(&self, g: &MedianGraph) -> Vec<i64> {
        (0..g.n()).map(|v| self.value(g, v)).collect()
    }

    /// Chain hyperplanes separating `x` from `y`, ordered from `x` to `y`.
    pub fn subchain(&self, g: &MedianGraph, x: usize, y: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.chain.iter().copied().filter(|&h| g.separates(h, x, y)).collect();
        if self.value(g, x) > self.value(g, y) {
            out.reverse();
        }
        out
    }
}

/// `max_{Ψ ∈ C} |Ψ(α) − Ψ(β)|`, zero for an empty family.
pub fn sigma_family(
    g: &MedianGraph,
    family: &[ChainContraction],
    alpha: usize,
    beta: usize,
) -> Result<u32, MedianError> {
    g.check_vertex(alpha)?;
    g.check_vertex(beta)?;
    for c in family {
        c.validate(g)?;
    }
    Ok(family_gap(g, family, alpha, beta))
}

fn family_gap(g: &MedianGraph, family: &[ChainContraction], a: usize, b: usize) -> u32 {
    family
        .iter()
        .map(|c| (c.value(g, a) - c.value(g, b)).unsigned_abs() as u32)
        .max()
        .unwrap_or(0)
}

fn family_argmax(g: &MedianGraph, family: &[ChainContraction], a: usize, b: usize) -> usize {
    let best = family_gap(g, family, a, b);
    family
        .iter()
        .position(|c| (c.value(g, a) - c.value(g, b)).unsigned_abs() as u32 == best)
        .expect("nonempty family")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Midpoint {
    pub gamma: usize,
    /// Index into the family realizing `σ_C(α, γ)`.
    pub psi1: usize,
    /// Index into the family realizing `σ_C(γ, β)`.
    pub psi2: usize,
    /// Hyperplanes of `Ψ1` separating `α` from `γ`, from `α` outwards.
    pub subchain1: Vec<usize>,
    /// Hyperplanes of `Ψ2` separating `γ` from `β`, from `γ` outwards.
    pub subchain2: Vec<usize>,
}

/// Finds `γ ∈ [α, β]` at `σ_C`-distance `r` from `α`, pushed as far
/// towards `β` as possible, together with contractions `Ψ1`, `Ψ2` whose
/// separating subchains concatenate to a chain.
///
/// Among several maximal candidates the least vertex index wins. For
/// `r = σ_C(α, β)` the answer is `γ = β` with an empty second subchain.
pub fn midpoint_vertex(
    g: &MedianGraph,
    family: &[ChainContraction],
    alpha: usize,
    beta: usize,
    r: u32,
) -> Result<Midpoint, MedianError> {
    if family.is_empty() {
        return Err(MedianError::EmptyFamily);
    }
    let total = sigma_family(g, family, alpha, beta)?;
    if r > total {
        return Err(MedianError::ROutOfRange { r, max: total });
    }
    let d = g.d1();
    if r == total {
        let psi1 = family_argmax(g, family, alpha, beta);
        let subchain1 = family[psi1].subchain(g, alpha, beta);
        return Ok(Midpoint { gamma: beta, psi1, psi2: 0, subchain1, subchain2: Vec::new() });
    }
    let interval = d.interval(alpha, beta);
    let at_r: Vec<usize> = interval
        .iter()
        .copied()
        .filter(|&v| family_gap(g, family, alpha, v) == r)
        .collect();
    let gamma = at_r
        .iter()
        .copied()
        .find(|&c| !at_r.iter().any(|&c2| c2 != c && d.between(alpha, c, c2)))
        .ok_or(MedianError::InvariantViolated("no maximal γ"))?;

    let psi2 = family_argmax(g, family, gamma, beta);
    let subchain2 = family[psi2].subchain(g, gamma, beta);
    let first2 = *subchain2.first().ok_or(MedianError::InvariantViolated("σ_C(γ,β) = 0"))?;

    // A hyperplane at γ, towards β, equal to or before H_{2,1}.
    let step = g
        .graph()
        .neighbors(gamma)
        .iter()
        .copied()
        .filter(|&w| d.between(alpha, w, beta) && d.between(alpha, gamma, w))
        .find_map(|w| {
            let h = g.edge_hyperplane(gamma, w)?;
            let ok = h == first2 || g.side_containing(h, first2) == Some(g.side(h, beta));
            ok.then_some(w)
        })
        .ok_or(MedianError::InvariantViolated("no hyperplane adjacent to γ before H_{2,1}"))?;
    if family_gap(g, family, alpha, step) != r + 1 {
        return Err(MedianError::InvariantViolated("σ_C(α,γ') ≠ r + 1"));
    }
    let psi1 = family_argmax(g, family, alpha, step);
    let subchain1 = family[psi1].subchain(g, alpha, gamma);

    let realized1 = (family[psi1].value(g, alpha) - family[psi1].value(g, gamma)).unsigned_abs() as u32;
    if realized1 != r {
        return Err(MedianError::InvariantViolated("Ψ1 does not realize σ_C(α,γ)"));
    }
    let mut joined = subchain1.clone();
    joined.extend_from_slice(&subchain2);
    if !is_chain(g, &joined) {
        return Err(MedianError::InvariantViolated("concatenated subchains are not a chain"));
    }
    Ok(Midpoint { gamma, psi1, psi2, subchain1, subchain2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree() -> Graph {
        Graph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)]).unwrap()
    }

    #[test]
    fn square_is_median() {
        let g = MedianGraph::recognize(&Graph::cycle(4)).unwrap();
        assert_eq!(g.hyperplane_count(), 2);
        assert_eq!(g.nu(), 2);
    }

    #[test]
    fn hexagon_is_not_median() {
        assert_eq!(
            MedianGraph::recognize(&Graph::cycle(6)).unwrap_err(),
            MedianError::NotMedian(0, 2, 4)
        );
    }

    #[test]
    fn tree_hyperplanes() {
        let t = tree();
        let g = MedianGraph::recognize(&t).unwrap();
        assert_eq!(g.hyperplane_count(), t.edges().len());
        assert_eq!(g.nu(), 1);
        for x in 0..7 {
            for y in 0..7 {
                assert_eq!(linf_distance(&g, x, y), g.d1().get(x, y));
            }
        }
    }

    #[test]
    fn median_examples() {
        let sq = MedianGraph::recognize(&Graph::hypercube(2)).unwrap();
        assert_eq!(sq.median(0b00, 0b01, 0b11), 0b01);
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(sq.median(x, x, y), x);
            }
        }
        let cube = MedianGraph::recognize(&Graph::hypercube(3)).unwrap();
        assert_eq!(cube.median(0b000, 0b110, 0b101), 0b100);
        assert_eq!(cube.coords(0b100), cube.majority(0b000, 0b110, 0b101));
    }

    #[test]
    fn hull_examples() {
        let sq = MedianGraph::recognize(&Graph::hypercube(2)).unwrap();
        assert_eq!(convex_hull_bruteforce(&sq, &[0, 3]).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(convex_hull_bruteforce(&sq, &[0, 1]).unwrap(), vec![0, 1]);
        let cube = MedianGraph::recognize(&Graph::hypercube(3)).unwrap();
        assert_eq!(convex_hull_bruteforce(&cube, &[0, 1, 2, 4]).unwrap().len(), 8);
        assert_eq!(halfspace_hull(&cube, &[0, 1, 2, 4]).unwrap().len(), 8);
        assert_eq!(convex_hull_bruteforce(&cube, &[]), Err(MedianError::EmptyInput));
    }

    #[test]
    fn iterated_hull_examples() {
        let sq = MedianGraph::recognize(&Graph::hypercube(2)).unwrap();
        let it = iterated_median_hull(&sq, &[0, 3]).unwrap();
        assert_eq!(it.step, 1);
        assert_eq!(it.hull(), &[0, 1, 2, 3]);

        let cube = MedianGraph::recognize(&Graph::hypercube(3)).unwrap();
        let it = iterated_median_hull(&cube, &[0b000, 0b001, 0b010, 0b100]).unwrap();
        assert_eq!(it.step, 2);
        assert_eq!(it.levels[1], vec![0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(it.levels[2].len(), 8);
        assert!(it.matches_bruteforce && it.within_bound);

        let it = iterated_median_hull(&cube, &[0, 1]).unwrap();
        assert_eq!(it.step, 0);
        assert_eq!(it.levels.len(), 1);
    }

    #[test]
    fn linf_examples() {
        let sq = MedianGraph::recognize(&Graph::hypercube(2)).unwrap();
        assert_eq!(linf_distance(&sq, 0, 3), 1);
        assert_eq!(sq.d1().get(0, 3), 2);
        let grid = MedianGraph::recognize(&Graph::grid(3, 2)).unwrap();
        assert_eq!(linf_distance(&grid, 0, 5), 2);
        assert_eq!(grid.d1().get(0, 5), 3);
    }

    fn grid_family(g: &MedianGraph) -> Vec<ChainContraction> {
        // In grid(3, 2) vertex (i, j) is 2i + j.
        let v1 = g.edge_hyperplane(0, 2).unwrap();
        let v2 = g.edge_hyperplane(2, 4).unwrap();
        let hz = g.edge_hyperplane(0, 1).unwrap();
        vec![
            ChainContraction::oriented(g, vec![v1, v2]).unwrap(),
            ChainContraction::oriented(g, vec![hz]).unwrap(),
        ]
    }

    #[test]
    fn sigma_family_examples() {
        let p = MedianGraph::recognize(&Graph::path(5)).unwrap();
        assert_eq!(sigma_family(&p, &[], 0, 4).unwrap(), 0);
        let full = ChainContraction::oriented(&p, linf_chain(&p, 0, 4)).unwrap();
        assert_eq!(sigma_family(&p, &[full], 0, 4).unwrap(), 4);

        let grid = MedianGraph::recognize(&Graph::grid(3, 2)).unwrap();
        assert_eq!(sigma_family(&grid, &grid_family(&grid), 0, 5).unwrap(), 2);
    }

    #[test]
    fn invalid_chains_are_rejected() {
        let grid = MedianGraph::recognize(&Graph::grid(3, 2)).unwrap();
        let v1 = grid.edge_hyperplane(0, 2).unwrap();
        let hz = grid.edge_hyperplane(0, 1).unwrap();
        assert!(matches!(
            ChainContraction::oriented(&grid, vec![v1, hz]),
            Err(MedianError::InvalidChain(_))
        ));
        let bad = ChainContraction { chain: vec![v1, 99], passed: vec![Side::Plus, Side::Plus] };
        assert_eq!(sigma_family(&grid, &[bad], 0, 1), Err(MedianError::InvalidChain(99)));
    }

    #[test]
    fn midpoint_on_path() {
        let p = MedianGraph::recognize(&Graph::path(5)).unwrap();
        let full = vec![ChainContraction::oriented(&p, linf_chain(&p, 0, 4)).unwrap()];
        let m = midpoint_vertex(&p, &full, 0, 4, 2).unwrap();
        assert_eq!(m.gamma, 2);
        assert_eq!((m.psi1, m.psi2), (0, 0));
        assert_eq!(m.subchain1.len() + m.subchain2.len(), 4);
        let m0 = midpoint_vertex(&p, &full, 0, 4, 0).unwrap();
        assert_eq!(m0.gamma, 0);
        let end = midpoint_vertex(&p, &full, 0, 4, 4).unwrap();
        assert_eq!(end.gamma, 4);
        assert!(end.subchain2.is_empty());
        assert_eq!(
            midpoint_vertex(&p, &full, 0, 4, 5),
            Err(MedianError::ROutOfRange { r: 5, max: 4 })
        );
        assert_eq!(midpoint_vertex(&p, &[], 0, 4, 0), Err(MedianError::EmptyFamily));
    }

    #[test]
    fn midpoint_on_grid() {
        let grid = MedianGraph::recognize(&Graph::grid(3, 2)).unwrap();
        let fam = grid_family(&grid);
        let m = midpoint_vertex(&grid, &fam, 0, 5, 1).unwrap();
        assert_eq!(sigma_family(&grid, &fam, 0, m.gamma).unwrap(), 1);
        assert!(grid.d1().between(0, m.gamma, 5));
        // Pushed towards β: (1, 1) rather than (1, 0).
        assert_eq!(m.gamma, 3);
        let mut joined = m.subchain1.clone();
        joined.extend(&m.subchain2);
        assert!(is_chain(&grid, &joined));
    }
}
