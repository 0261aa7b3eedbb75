//! Seeded random instances for property tests and experiments.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::contraction::GlueParams;
use crate::graph::Graph;
use crate::hyperbolic::HyperbolicGraph;
use crate::median::{linf_chain, ChainContraction, MedianGraph};
use crate::metric::FiniteMetric;
use crate::rational::{frac, max_q, min_q, q, Q};

/// Random recursive tree: vertex `i` hangs off a uniform earlier vertex.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        let p = rng.gen_range(0..v);
        g.add_edge(p, v).expect("fresh edge");
    }
    g
}

/// Product of two random trees with at most `max_n` vertices in total.
pub fn random_grid<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Graph {
    let a = rng.gen_range(2..=(max_n / 2).max(2));
    let b = rng.gen_range(1..=(max_n / a).max(1));
    let left = if rng.gen_bool(0.5) { Graph::path(a) } else { random_tree(a, rng) };
    let right = if rng.gen_bool(0.5) { Graph::path(b) } else { random_tree(b, rng) };
    left.product(&right)
}

/// Product of three paths of up to 4 vertices each, with at most `max_n`
/// vertices in total.
pub fn random_box<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Graph {
    loop {
        let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=4)).collect();
        if dims.iter().product::<usize>() <= max_n {
            return Graph::path(dims[0]).product(&Graph::path(dims[1])).product(&Graph::path(dims[2]));
        }
    }
}

/// Connected majority-closed vertex set of the `dim`-cube, grown by random
/// neighbour steps. Returns `None` when the closure exceeds `max_n` or is
/// not a median graph.
pub fn random_cube_retract<R: Rng + ?Sized>(dim: usize, steps: usize, max_n: usize, rng: &mut R) -> Option<Graph> {
    let mut set: BTreeSet<u32> = BTreeSet::new();
    set.insert(0);
    for _ in 0..steps {
        let pts: Vec<u32> = set.iter().copied().collect();
        let v = *pts.choose(rng).unwrap();
        set.insert(v ^ (1 << rng.gen_range(0..dim)));
        loop {
            let pts: Vec<u32> = set.iter().copied().collect();
            let before = set.len();
            for (i, &x) in pts.iter().enumerate() {
                for (j, &y) in pts.iter().enumerate().skip(i + 1) {
                    for &z in &pts[j + 1..] {
                        set.insert((x & y) | (y & z) | (x & z));
                    }
                }
            }
            if set.len() == before {
                break;
            }
            if set.len() > max_n {
                return None;
            }
        }
    }
    let pts: Vec<u32> = set.into_iter().collect();
    let mut g = Graph::new(pts.len());
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate().skip(i + 1) {
            if (x ^ y).count_ones() == 1 {
                g.add_edge(i, j).expect("fresh edge");
            }
        }
    }
    MedianGraph::recognize(&g).ok().map(|_| g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MedianKind {
    Tree,
    Grid,
    Box,
    CubeRetract,
}

/// A random median graph of the given kind with at most `max_n` vertices.
pub fn random_median_graph<R: Rng + ?Sized>(kind: MedianKind, max_n: usize, rng: &mut R) -> MedianGraph {
    loop {
        let g = match kind {
            MedianKind::Tree => Some(random_tree(rng.gen_range(1..=max_n), rng)),
            MedianKind::Grid => Some(random_grid(max_n, rng)),
            MedianKind::Box => Some(random_box(max_n, rng)),
            MedianKind::CubeRetract => {
                let dim = rng.gen_range(2..=5);
                random_cube_retract(dim, rng.gen_range(dim..=4 * dim), max_n, rng)
            }
        };
        if let Some(m) = g.and_then(|g| MedianGraph::recognize(&g).ok()) {
            return m;
        }
    }
}

/// Tree with random cycles of length 3 to 6 hung on it.
pub fn random_cactus<R: Rng + ?Sized>(tree_n: usize, cycles: usize, rng: &mut R) -> Graph {
    let mut edges = random_tree(tree_n, rng).edges();
    let mut n = tree_n;
    for _ in 0..cycles {
        let root = rng.gen_range(0..n);
        let len = rng.gen_range(3..=6);
        let mut prev = root;
        for _ in 1..len {
            edges.push((prev, n));
            prev = n;
            n += 1;
        }
        edges.push((prev, root));
    }
    Graph::from_edges(n, &edges).expect("valid cactus")
}

/// A `rows × cols` grid with both diagonals added in every square, whose
/// balls grow like a hyperbolic patch at small scale.
pub fn king_grid(rows: usize, cols: usize) -> Graph {
    let mut g = Graph::grid(rows, cols);
    for i in 0..rows.saturating_sub(1) {
        for j in 0..cols.saturating_sub(1) {
            let v = i * cols + j;
            g.add_edge(v, v + cols + 1).expect("fresh edge");
            g.add_edge(v + 1, v + cols).expect("fresh edge");
        }
    }
    g
}

/// Up to `size` sets pairwise within `2Er` of each other: balls and
/// intervals anchored near a common hub. Fewer sets come back when random
/// candidates keep failing the closeness check.
pub fn random_close_family<R: Rng + ?Sized>(g: &HyperbolicGraph, size: usize, r: Q, rng: &mut R) -> Vec<Vec<usize>> {
    let d = g.distances();
    let n = g.n();
    let reach = crate::rational::floor_i64(&(g.e() * r)).max(0) as u32;
    let hub = rng.gen_range(0..n);
    let near: Vec<usize> = d.ball(hub, reach);
    let close = q(2) * g.e() * r;
    let mut family: Vec<Vec<usize>> = Vec::new();
    for _ in 0..size * 20 {
        if family.len() == size {
            break;
        }
        let anchor = *near.choose(rng).unwrap();
        let set = if rng.gen_bool(0.5) {
            d.ball(anchor, rng.gen_range(0..=2))
        } else {
            let far = rng.gen_range(0..n);
            d.interval(anchor, far)
        };
        if family.iter().all(|s| q(d.set_distance(s, &set) as i64) <= close) {
            family.push(set);
        }
    }
    family
}

/// Two pieces cut from one chain contraction at a random level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueInstance {
    pub phi1: Vec<Q>,
    pub phi2: Vec<Q>,
    pub params: GlueParams,
}

/// A gluing instance on exact median data: `Ψ` counts the ℓ∞ chain from
/// `a` to an ℓ∞-farthest `b`, `Φ1 = min(Ψ, r)` and `Φ2 = max(Ψ, r)`. `K`
/// and `E` are multiples of `1/8`; `r` leaves room for `t ≥ 0` given the
/// constant `D = d(K)`, and `t` is drawn from `[0, t_max]`.
pub fn random_glue_instance<R: Rng + ?Sized>(g: &MedianGraph, d: impl Fn(Q) -> Q, rng: &mut R) -> Option<GlueInstance> {
    let n = g.n();
    let a = rng.gen_range(0..n);
    let far = (0..n).map(|b| crate::median::linf_distance(g, a, b)).max()?;
    let ends: Vec<usize> = (0..n).filter(|&b| crate::median::linf_distance(g, a, b) == far).collect();
    let b = *ends.choose(rng)?;
    let chain = linf_chain(g, a, b);
    let len = chain.len() as i64;
    let k = frac(rng.gen_range(1..=4), 8);
    let e = frac(rng.gen_range(0..=2), 8);
    let need = crate::rational::ceil_i64(&(d(k) - k + e)).max(1);
    if len < 2 * need {
        return None;
    }
    let psi = ChainContraction::oriented(g, chain).ok()?;
    let values = psi.values(g);
    let sign = if values[b] >= values[a] { 1 } else { -1 };
    let psi: Vec<Q> = values.iter().map(|&v| q(sign * (v - values[a]))).collect();
    let r = q(rng.gen_range(need..=len - need));
    let s = q(len) - r;
    let t_max = min_q(r, s) - d(k) + k - e;
    let steps = crate::rational::floor_i64(&(t_max * q(8)));
    let t = frac(rng.gen_range(0..=steps), 8);
    let phi1 = psi.iter().map(|&v| min_q(v, r)).collect();
    let phi2 = psi.iter().map(|&v| max_q(v, r)).collect();
    Some(GlueInstance { phi1, phi2, params: GlueParams { a, b, r, s, t, e, k } })
}

/// `Φ = s·Ψ + ε` with `Ψ` a chain contraction, `0 < s ≤ K′` and
/// `0 ≤ ε ≤ K′/2`, which is `K′`-quasi-median and `(K′, K′)`-coarsely
/// Lipschitz.
pub fn random_quasi_median_map<R: Rng + ?Sized>(g: &MedianGraph, kp: Q, rng: &mut R) -> Vec<Q> {
    let n = g.n();
    let chain = linf_chain(g, rng.gen_range(0..n), rng.gen_range(0..n));
    let psi = match ChainContraction::oriented(g, chain) {
        Ok(c) => c.values(g),
        Err(_) => alloc::vec![0; n],
    };
    let s = kp * frac(rng.gen_range(1..=4), 4);
    let offset = q(rng.gen_range(0..=3));
    (0..n)
        .map(|x| s * q(psi[x]) + offset + kp * frac(rng.gen_range(0..=4), 8))
        .collect()
}

/// Shortest-path closure of random weights in `1..=max_w` on a random
/// connected graph, halved with probability one half.
pub fn random_metric<R: Rng + ?Sized>(n: usize, max_w: i64, rng: &mut R) -> FiniteMetric {
    let mut w = alloc::vec![alloc::vec![None::<Q>; n]; n];
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let x = q(rng.gen_range(1..=max_w));
        w[u][v] = Some(x);
        w[v][u] = Some(x);
    }
    for _ in 0..n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            let x = q(rng.gen_range(1..=max_w));
            w[u][v] = Some(x);
            w[v][u] = Some(x);
        }
    }
    for (i, row) in w.iter_mut().enumerate() {
        row[i] = Some(q(0));
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (w[i][k], w[k][j]) {
                    if w[i][j].is_none_or(|c| a + b < c) {
                        w[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    let halve = rng.gen_bool(0.5);
    let rows: Vec<Vec<Q>> = w
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.unwrap() / if halve { q(2) } else { q(1) }).collect())
        .collect();
    FiniteMetric::validate(&rows).expect("shortest-path closure is a metric")
}

/// A radius function: either `d(x0, ·)` or half the eccentricity, plus a
/// random nonnegative bump in steps of `1/2`.
pub fn random_radius_function<R: Rng + ?Sized>(m: &FiniteMetric, rng: &mut R) -> Vec<Q> {
    let n = m.n();
    let x0 = rng.gen_range(0..n);
    let from_point = rng.gen_bool(0.5);
    (0..n)
        .map(|x| {
            let base = if from_point {
                m.d(x0, x)
            } else {
                (0..n).map(|y| m.d(x, y)).fold(q(0), max_q) / q(2)
            };
            base + frac(rng.gen_range(0..=4), 2)
        })
        .collect()
}
