//! Coarse Helly points for quasiconvex families in hyperbolic graphs.
//!
//! Given pairwise `2Er`-close `k0`-quasiconvex sets and a base vertex `y`,
//! the center `c` sits on a geodesic from `y` towards the farthest set, at
//! distance `min{Er, d(y, z)}` from its nearest point `z`. Every set then
//! lies within `r′ = max{2k0 + 5E, Er + k0 + 3E}` of `c`, however many
//! sets there are.

use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::graph::{Graph, GraphDistances, GraphError};
use crate::metric::{four_point_delta, FiniteMetric};
use crate::rational::{floor_i64, is_integral, max_q, min_q, q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperError {
    #[error("empty set")]
    EmptySet,
    #[error("empty family")]
    EmptyFamily,
    #[error("sets {0} and {1} are not 2Er-close")]
    NotPairwiseClose(usize, usize),
    #[error("vertex {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("E = {e} is below the measured four-point constant {measured}")]
    EBelowMeasured { e: Q, measured: Q },
    #[error("negative constant")]
    NegativeConstant,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A connected graph with its distances and the hyperbolicity constant `E`
/// used by the construction.
#[derive(Debug, Clone)]
pub struct HyperbolicGraph {
    graph: Graph,
    d: GraphDistances,
    measured: Q,
    e: Q,
}

impl HyperbolicGraph {
    /// Uses the measured four-point constant plus `margin` as `E`.
    pub fn measured(graph: &Graph, margin: Q) -> Result<Self, HyperError> {
        if margin < Q::zero() {
            return Err(HyperError::NegativeConstant);
        }
        let d = graph.distances()?;
        let measured = four_point_delta(&FiniteMetric::from_distances(&d));
        Ok(HyperbolicGraph { graph: graph.clone(), d, measured, e: measured + margin })
    }

    /// Uses a supplied `E`, which must not undercut the four-point constant.
    pub fn with_constant(graph: &Graph, e: Q) -> Result<Self, HyperError> {
        let mut g = Self::measured(graph, Q::zero())?;
        if e < g.measured {
            return Err(HyperError::EBelowMeasured { e, measured: g.measured });
        }
        g.e = e;
        Ok(g)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distances(&self) -> &GraphDistances {
        &self.d
    }

    pub fn e(&self) -> Q {
        self.e
    }

    pub fn measured_delta(&self) -> Q {
        self.measured
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    fn check_set(&self, set: &[usize]) -> Result<(), HyperError> {
        if set.is_empty() {
            return Err(HyperError::EmptySet);
        }
        let n = self.n();
        match set.iter().find(|&&v| v >= n) {
            Some(&index) => Err(HyperError::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }

    /// Lexicographically least geodesic from `from` to `to`.
    pub fn lex_geodesic(&self, from: usize, to: usize) -> Vec<usize> {
        let mut path = alloc::vec![from];
        let mut cur = from;
        while cur != to {
            let goal = self.d.get(cur, to) - 1;
            cur = *self
                .graph
                .neighbors(cur)
                .iter()
                .find(|&&w| self.d.get(w, to) == goal)
                .expect("connected graph");
            path.push(cur);
        }
        path
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiconvexSet {
    pub vertices: Vec<usize>,
    pub k0: u32,
}

impl QuasiconvexSet {
    pub fn new(g: &HyperbolicGraph, vertices: Vec<usize>) -> Result<Self, HyperError> {
        let k0 = quasiconvexity_constant(g, &vertices)?;
        Ok(QuasiconvexSet { vertices, k0 })
    }
}

/// Least `k0` such that every vertex on every geodesic between members of
/// `set` is within `k0` of `set`. The vertices on geodesics from `a` to `b`
/// are exactly the interval `I(a, b)`.
pub fn quasiconvexity_constant(g: &HyperbolicGraph, set: &[usize]) -> Result<u32, HyperError> {
    g.check_set(set)?;
    let d = &g.d;
    let mut on_geodesic = alloc::vec![false; g.n()];
    for (i, &a) in set.iter().enumerate() {
        for &b in &set[i + 1..] {
            for v in 0..g.n() {
                if d.between(a, v, b) {
                    on_geodesic[v] = true;
                }
            }
        }
    }
    Ok((0..g.n())
        .filter(|&v| on_geodesic[v])
        .map(|v| d.to_set(v, set))
        .max()
        .unwrap_or(0))
}

/// `r′ = max{2k0 + 5E, Er + k0 + 3E}`.
pub fn cdv_radius(e: Q, r: Q, k0: Q) -> Q {
    max_q(q(2) * k0 + q(5) * e, e * r + k0 + q(3) * e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CdvResult {
    pub c: usize,
    /// Index of the farthest set and its nearest point to `y`.
    pub far_set: usize,
    pub z: usize,
    pub k0: u32,
    pub e: Q,
    pub rprime: Q,
    /// `min{Er, d(y, z)}` was not an integer and `c` was rounded.
    pub rounded: bool,
    /// `r′`, plus one when rounded.
    pub bound: Q,
    pub distances: Vec<u32>,
    pub holds: bool,
}

/// The coarse Helly center for `family` seen from `y`.
pub fn cdv_point(g: &HyperbolicGraph, family: &[Vec<usize>], y: usize, r: Q) -> Result<CdvResult, HyperError> {
    if family.is_empty() {
        return Err(HyperError::EmptyFamily);
    }
    if r < Q::zero() {
        return Err(HyperError::NegativeConstant);
    }
    g.check_set(&[y])?;
    for set in family {
        g.check_set(set)?;
    }
    let d = &g.d;
    let e = g.e;
    let closeness = q(2) * e * r;
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            if q(d.set_distance(&family[i], &family[j]) as i64) > closeness {
                return Err(HyperError::NotPairwiseClose(i, j));
            }
        }
    }
    let k0 = family
        .iter()
        .map(|s| quasiconvexity_constant(g, s))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let to_y: Vec<u32> = family.iter().map(|s| d.to_set(y, s)).collect();
    let far = to_y.iter().copied().max().unwrap();
    let far_set = to_y.iter().position(|&v| v == far).unwrap();
    let z = *family[far_set].iter().filter(|&&v| d.get(y, v) == far).min().unwrap();
    let target = min_q(e * r, q(far as i64));
    let rounded = !is_integral(&target);
    let from_z = floor_i64(&target) as usize;
    let path = g.lex_geodesic(y, z);
    let c = path[path.len() - 1 - from_z];
    let rprime = cdv_radius(e, r, q(k0 as i64));
    let bound = if rounded { rprime + 1 } else { rprime };
    let distances: Vec<u32> = family.iter().map(|s| d.to_set(c, s)).collect();
    let holds = distances.iter().all(|&v| q(v as i64) <= bound);
    Ok(CdvResult { c, far_set, z, k0, e, rprime, rounded, bound, distances, holds })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingReport {
    pub cdv: CdvResult,
    /// Largest distance from the center to a member.
    pub radius: u32,
    pub ball_size: usize,
    pub family_size: usize,
    pub disjoint: bool,
    /// Disjoint sets each meet `B(c, R)` in distinct points.
    pub holds: bool,
}

/// Bounds the size of a pairwise-close family of disjoint sets by the size
/// of a ball around its coarse Helly center.
pub fn packing_experiment(g: &HyperbolicGraph, family: &[Vec<usize>], r: Q) -> Result<PackingReport, HyperError> {
    let cdv = cdv_point(g, family, family[0][0], r)?;
    let radius = cdv.distances.iter().copied().max().unwrap_or(0);
    let ball_size = g.d.ball(cdv.c, radius).len();
    let disjoint = family
        .iter()
        .enumerate()
        .all(|(i, a)| family[i + 1..].iter().all(|b| a.iter().all(|v| !b.contains(v))));
    let family_size = family.len();
    Ok(PackingReport {
        holds: disjoint && family_size <= ball_size,
        cdv,
        radius,
        ball_size,
        family_size,
        disjoint,
    })
}
