//! Finite metric spaces with exact rational distances.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{Graph, GraphDistances, GraphError};
use crate::rational::{floor_i64, is_integral, max_q, q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("asymmetric entry at ({0}, {1})")]
    AsymmetricEntry(usize, usize),
    #[error("negative entry at ({0}, {1})")]
    NegativeEntry(usize, usize),
    #[error("nonzero diagonal entry at {0}")]
    NonzeroDiagonal(usize),
    #[error("distinct points {0} and {1} at distance zero")]
    ZeroDistance(usize, usize),
    #[error("triangle inequality fails: d({0},{1}) > d({0},{2}) + d({2},{1})")]
    TriangleViolation(usize, usize, usize),
    #[error("point {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("empty metric space")]
    Empty,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `(K, C)` constants of a quasi-isometric embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QiParams {
    pub k: Q,
    pub c: Q,
}

impl QiParams {
    /// `None` unless `k >= 1` and `c >= 0`.
    pub fn new(k: Q, c: Q) -> Option<Self> {
        (k >= Q::one() && c >= Q::zero()).then_some(QiParams { k, c })
    }
}

/// A validated finite metric space on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<Q>,
    c_rough: Option<Q>,
    c_weak: Option<Q>,
}

impl FiniteMetric {
    /// Checks shape, diagonal, positivity, symmetry and the triangle
    /// inequality, reporting the first witness found.
    pub fn validate(rows: &[Vec<Q>]) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare { row: i, len: row.len(), n });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = rows[i][j];
                if v.is_negative() {
                    return Err(MetricError::NegativeEntry(i, j));
                }
                if i == j {
                    if !v.is_zero() {
                        return Err(MetricError::NonzeroDiagonal(i));
                    }
                    continue;
                }
                if v != rows[j][i] {
                    return Err(MetricError::AsymmetricEntry(i.min(j), i.max(j)));
                }
                if v.is_zero() {
                    return Err(MetricError::ZeroDistance(i.min(j), i.max(j)));
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                for z in 0..n {
                    if rows[x][y] > rows[x][z] + rows[z][y] {
                        return Err(MetricError::TriangleViolation(x, y, z));
                    }
                }
            }
        }
        Ok(FiniteMetric {
            n,
            dist: rows.iter().flatten().copied().collect(),
            c_rough: None,
            c_weak: None,
        })
    }

    /// Graph metric of a connected graph.
    pub fn from_graph(g: &Graph) -> Result<Self, MetricError> {
        Ok(Self::from_distances(&g.distances()?))
    }

    pub fn from_distances(d: &GraphDistances) -> Self {
        let n = d.n();
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            dist.extend(d.row(i).iter().map(|&x| q(x as i64)));
        }
        FiniteMetric { n, dist, c_rough: None, c_weak: None }
    }

    /// Builds from a closure without validation; callers guarantee the axioms.
    pub(crate) fn from_fn_unchecked(n: usize, f: impl Fn(usize, usize) -> Q) -> Self {
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(f(i, j));
            }
        }
        FiniteMetric { n, dist, c_rough: None, c_weak: None }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> Q {
        self.dist[x * self.n + y]
    }

    pub fn rows(&self) -> Vec<Vec<Q>> {
        self.dist.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn c_rough(&self) -> Option<Q> {
        self.c_rough
    }

    pub fn c_weak(&self) -> Option<Q> {
        self.c_weak
    }

    pub fn set_c_rough(&mut self, c: Q) {
        self.c_rough = Some(c);
    }

    /// Measures and stores the weak rough-geodesicity constant.
    pub fn with_weak_constant(mut self) -> Self {
        self.c_weak = Some(weak_rough_constant(&self));
        self
    }

    pub fn check_index(&self, index: usize) -> Result<(), MetricError> {
        if index < self.n {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange { index, n: self.n })
        }
    }

    pub fn diameter(&self) -> Q {
        self.dist.iter().copied().max().unwrap_or_else(Q::zero)
    }

    /// Integer distances, when every entry is integral.
    pub fn as_integer(&self) -> Option<GraphDistances> {
        if !self.dist.iter().all(is_integral) {
            return None;
        }
        Some(GraphDistances::from_raw(
            self.n,
            self.dist.iter().map(|x| *x.numer() as u32).collect(),
        ))
    }

    /// The subspace on `points`, in the given order.
    pub fn restrict(&self, points: &[usize]) -> FiniteMetric {
        FiniteMetric::from_fn_unchecked(points.len(), |i, j| self.d(points[i], points[j]))
    }

    /// Uniformly rescaled copy.
    pub fn scaled(&self, factor: Q) -> FiniteMetric {
        assert!(factor > Q::zero());
        FiniteMetric::from_fn_unchecked(self.n, |i, j| self.d(i, j) * factor)
    }

    /// Distance from `x` to a nonempty set.
    pub fn to_set(&self, x: usize, set: &[usize]) -> Q {
        set.iter().map(|&s| self.d(x, s)).min().expect("nonempty set")
    }
}

/// `{ z : d(x,z) + d(z,y) = d(x,y) }`, in increasing order.
pub fn interval(m: &FiniteMetric, x: usize, y: usize) -> Result<Vec<usize>, MetricError> {
    m.check_index(x)?;
    m.check_index(y)?;
    let dxy = m.d(x, y);
    Ok((0..m.n()).filter(|&z| m.d(x, z) + m.d(z, y) == dxy).collect())
}

/// Least δ for which the Gromov four-point condition holds: for every
/// quadruple the largest of the three pair sums exceeds the middle one by
/// at most 2δ.
pub fn four_point_delta(m: &FiniteMetric) -> Q {
    let n = m.n();
    let mut worst = Q::zero();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let mut s = [
                        m.d(a, b) + m.d(c, d),
                        m.d(a, c) + m.d(b, d),
                        m.d(a, d) + m.d(b, c),
                    ];
                    s.sort();
                    worst = max_q(worst, s[2] - s[1]);
                }
            }
        }
    }
    worst / q(2)
}

/// `min_c max(|d(a,c) - r|, d(a,c) + d(c,b) - d(a,b))`.
fn wrg_gap(m: &FiniteMetric, a: usize, b: usize, r: Q) -> Q {
    let dab = m.d(a, b);
    (0..m.n())
        .map(|c| {
            let dac = m.d(a, c);
            max_q((dac - r).abs(), dac + m.d(c, b) - dab)
        })
        .min()
        .expect("nonempty space")
}

/// Least C′ such that every pair `a, b` and every `r` in the critical set
/// admits a point `c` with `|d(a,c) - r| <= C′` and
/// `d(a,c) + d(c,b) <= d(a,b) + C′`.
///
/// The critical set for a pair is 0, every distance, every difference of
/// two distances and every integer, clipped to `[0, d(a,b)]`.
pub fn weak_rough_constant(m: &FiniteMetric) -> Q {
    let n = m.n();
    let values: BTreeSet<Q> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m.d(i, j)).collect();
    let mut critical: BTreeSet<Q> = values.clone();
    for a in &values {
        for b in &values {
            if a >= b {
                critical.insert(*a - *b);
            }
        }
    }
    let top = floor_i64(&m.diameter());
    for k in 0..=top {
        critical.insert(q(k));
    }
    let mut worst = Q::zero();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let dab = m.d(a, b);
            for r in critical.range(..=dab) {
                worst = max_q(worst, wrg_gap(m, a, b, *r));
            }
        }
    }
    worst
}

/// Least C′ of the weak rough-geodesicity condition with `r` ranging over
/// all reals in `[0, d(a,b)]`.
///
/// The gap function is the lower envelope of finitely many piecewise-linear
/// functions of `r`, so its maximum sits at an endpoint or a breakpoint.
pub fn weak_rough_constant_real(m: &FiniteMetric) -> Q {
    let n = m.n();
    let mut worst = Q::zero();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let dab = m.d(a, b);
            let t: Vec<Q> = (0..n).map(|c| m.d(a, c)).collect();
            let e: Vec<Q> = (0..n).map(|c| m.d(a, c) + m.d(c, b) - dab).collect();
            let mut cands: BTreeSet<Q> = BTreeSet::new();
            cands.insert(Q::zero());
            cands.insert(dab);
            for i in 0..n {
                cands.insert(t[i] + e[i]);
                cands.insert(t[i] - e[i]);
                for j in 0..n {
                    cands.insert((t[i] + t[j]) / q(2));
                    cands.insert(t[i] + e[j]);
                    cands.insert(t[i] - e[j]);
                }
            }
            for r in cands.range(Q::zero()..=dab) {
                worst = max_q(worst, wrg_gap(m, a, b, *r));
            }
        }
    }
    worst
}

/// Outcome of a quasi-isometric embedding check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiCheck {
    pub holds: bool,
    /// Pair with the largest violation, when there is one.
    pub worst: Option<(usize, usize, Q)>,
}

/// Checks `(1/K) d_src(a,b) - C <= d_dst(f a, f b) <= K d_src(a,b) + C`
/// over all pairs.
pub fn is_qi_embedding(
    src: &FiniteMetric,
    dst: &FiniteMetric,
    f: &[usize],
    p: QiParams,
) -> Result<QiCheck, MetricError> {
    assert_eq!(f.len(), src.n(), "map must be total on the source");
    for &v in f {
        dst.check_index(v)?;
    }
    let mut worst: Option<(usize, usize, Q)> = None;
    for a in 0..src.n() {
        for b in a + 1..src.n() {
            let ds = src.d(a, b);
            let dd = dst.d(f[a], f[b]);
            let excess = max_q(ds / p.k - p.c - dd, dd - p.k * ds - p.c);
            if excess > Q::zero() && worst.is_none_or(|w| excess > w.2) {
                worst = Some((a, b, excess));
            }
        }
    }
    Ok(QiCheck { holds: worst.is_none(), worst })
}
