//! Brute-force oracles shared by the integration tests. None of them call
//! into the algorithms they check.
#![allow(dead_code)]

use std::collections::VecDeque;

use helly_core::{FiniteMetric, Graph, Q};
use num_rational::Ratio;

pub fn q(v: i64) -> Q {
    Ratio::from_integer(v)
}

pub fn bfs_all(g: &Graph) -> Vec<Vec<u32>> {
    let n = g.n();
    (0..n)
        .map(|s| {
            let mut dist = vec![u32::MAX; n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in g.neighbors(u) {
                    if dist[w] == u32::MAX {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

/// The unique vertex on all three pairwise geodesics, if there is one.
pub fn median_oracle(d: &[Vec<u32>], x: usize, y: usize, z: usize) -> Option<usize> {
    let on = |a: usize, v: usize, b: usize| d[a][v] + d[v][b] == d[a][b];
    let hits: Vec<usize> = (0..d.len()).filter(|&v| on(x, v, y) && on(y, v, z) && on(x, v, z)).collect();
    (hits.len() == 1).then(|| hits[0])
}

/// Closure of `set` under geodesic intervals.
pub fn convex_hull_oracle(d: &[Vec<u32>], set: &[usize]) -> Vec<usize> {
    let n = d.len();
    let mut inside = vec![false; n];
    for &a in set {
        inside[a] = true;
    }
    loop {
        let members: Vec<usize> = (0..n).filter(|&v| inside[v]).collect();
        let mut grew = false;
        for &a in &members {
            for &b in &members {
                for v in 0..n {
                    if !inside[v] && d[a][v] + d[v][b] == d[a][b] {
                        inside[v] = true;
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return (0..n).filter(|&v| inside[v]).collect();
        }
    }
}

/// Halfspace pairs `W(x, y) = {w : d(w, x) < d(w, y)}` over all edges, as
/// bitmasks, one entry per hyperplane.
pub fn halfspaces_oracle(g: &Graph, d: &[Vec<u32>]) -> Vec<(u128, u128)> {
    let n = g.n();
    assert!(n <= 128);
    let mut out: Vec<(u128, u128)> = Vec::new();
    for (x, y) in g.edges() {
        let mut wx = 0u128;
        for w in 0..n {
            if d[w][x] < d[w][y] {
                wx |= 1 << w;
            }
        }
        let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        let wy = all & !wx;
        let pair = if wx & 1 == 1 { (wx, wy) } else { (wy, wx) };
        if !out.contains(&pair) {
            out.push(pair);
        }
    }
    out
}

/// Longest strictly nested sequence of halfspaces that all contain `x`
/// and miss `y`.
pub fn linf_oracle(halves: &[(u128, u128)], x: usize, y: usize) -> u32 {
    let sides: Vec<u128> = halves
        .iter()
        .map(|&(a, b)| if a >> x & 1 == 1 { a } else { b })
        .filter(|&h| h >> y & 1 == 0)
        .collect();
    let mut memo = vec![None; sides.len()];
    fn longest(i: usize, sides: &[u128], memo: &mut Vec<Option<u32>>) -> u32 {
        if let Some(v) = memo[i] {
            return v;
        }
        let mut best = 1;
        for j in 0..sides.len() {
            if j != i && sides[j] & sides[i] == sides[i] && sides[j] != sides[i] {
                best = best.max(1 + longest(j, sides, memo));
            }
        }
        memo[i] = Some(best);
        best
    }
    (0..sides.len()).map(|i| longest(i, &sides, &mut memo)).max().unwrap_or(0)
}

pub fn median_of(a: Q, b: Q, c: Q) -> Q {
    let mut v = [a, b, c];
    v.sort();
    v[1]
}

/// `|Φx − Φy| ≤ d(x, y) + K` and `|Φ(μ(x, y, z)) − med Φ| ≤ K` everywhere.
pub fn is_k_contraction(d: impl Fn(usize, usize) -> Q, mu: impl Fn(usize, usize, usize) -> usize, phi: &[Q], k: Q) -> bool {
    let n = phi.len();
    for x in 0..n {
        for y in 0..n {
            if (phi[x] - phi[y]).abs() > d(x, y) + k {
                return false;
            }
            for z in 0..n {
                if (phi[mu(x, y, z)] - median_of(phi[x], phi[y], phi[z])).abs() > k {
                    return false;
                }
            }
        }
    }
    true
}

pub fn sup_dist(f: &[Q], g: &[Q]) -> Q {
    f.iter().zip(g).map(|(a, b)| (*a - *b).abs()).max().unwrap_or(q(0))
}

pub fn is_radius_oracle(m: &FiniteMetric, f: &[Q]) -> bool {
    let n = m.n();
    (0..n).all(|x| f[x] >= q(0) && (0..n).all(|y| m.d(x, y) <= f[x] + f[y]))
}

/// Minimal radius functions satisfy `f(x) = max_y (d(x, y) − f(y))`.
pub fn is_minimal_oracle(m: &FiniteMetric, f: &[Q]) -> bool {
    let n = m.n();
    is_radius_oracle(m, f) && (0..n).all(|x| (0..n).map(|y| m.d(x, y) - f[y]).max().unwrap() == f[x])
}

pub fn metric_axioms(m: &FiniteMetric) -> bool {
    let n = m.n();
    (0..n).all(|x| {
        m.d(x, x) == q(0)
            && (0..n).all(|y| {
                m.d(x, y) == m.d(y, x)
                    && (x == y || m.d(x, y) > q(0))
                    && (0..n).all(|z| m.d(x, z) <= m.d(x, y) + m.d(y, z))
            })
    })
}

trait Abs {
    fn abs(self) -> Self;
}

impl Abs for Q {
    fn abs(self) -> Q {
        if self < q(0) { -self } else { self }
    }
}
