//! Isbell injective hulls of finite metric spaces.
//!
//! Points of the hull `E(X)` are minimal radius functions, with the sup
//! norm as distance; `x ↦ d(x, ·)` embeds `X` isometrically.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::metric::FiniteMetric;
use crate::rational::{floor_i64, max_q, q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error("negative value at point {0}")]
    NegativeValue(usize),
    #[error("not a radius function: pair ({0}, {1}) too far apart")]
    NotRadiusFunction(usize, usize),
    #[error("functions live on spaces of different sizes")]
    MismatchedSpaces,
    #[error("not minimal at point {0}")]
    NotMinimal(usize),
    #[error("δ must be positive")]
    NonpositiveDelta,
    #[error("point {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("metric is not integer valued")]
    NonIntegerMetric,
    #[error("instance too large for exhaustive enumeration (n ≤ 8, diameter ≤ 12)")]
    TooLarge,
    #[error("descent chain property {property} fails at step {step}")]
    PropertyFailed { property: &'static str, step: usize },
}

/// A nonnegative `f` with `d(x, y) ≤ f(x) + f(y)` for all pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusFunction {
    pub values: Vec<Q>,
}

/// A minimal radius function, i.e. a point of the injective hull.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullPoint {
    pub values: Vec<Q>,
}

impl HullPoint {
    /// `e(x) = d(x, ·)`.
    pub fn embed(m: &FiniteMetric, x: usize) -> HullPoint {
        HullPoint { values: (0..m.n()).map(|y| m.d(x, y)).collect() }
    }

    pub fn as_radius(&self) -> RadiusFunction {
        RadiusFunction { values: self.values.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusCheck {
    pub holds: bool,
    /// First pair `x < y` with `f(x) + f(y) < d(x, y)`.
    pub witness: Option<(usize, usize)>,
}

fn check_len(m: &FiniteMetric, f: &[Q]) -> Result<(), HullError> {
    if f.len() == m.n() {
        Ok(())
    } else {
        Err(HullError::MismatchedSpaces)
    }
}

pub fn is_radius_function(m: &FiniteMetric, f: &[Q]) -> Result<RadiusCheck, HullError> {
    check_len(m, f)?;
    if let Some(x) = f.iter().position(|v| v.is_negative()) {
        return Err(HullError::NegativeValue(x));
    }
    let n = m.n();
    let witness = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .find(|&(x, y)| f[x] + f[y] < m.d(x, y));
    Ok(RadiusCheck { holds: witness.is_none(), witness })
}

/// `max(0, max_{y ≠ x} d(x, y) − f(y))`: the least admissible value at `x`.
fn lowest(m: &FiniteMetric, f: &[Q], x: usize) -> Q {
    (0..m.n())
        .filter(|&y| y != x)
        .map(|y| m.d(x, y) - f[y])
        .fold(Q::zero(), max_q)
}

pub fn is_minimal(m: &FiniteMetric, f: &[Q]) -> bool {
    f.len() == m.n() && (0..m.n()).all(|x| f[x] == lowest(m, f, x))
}

/// Lowers coordinates in ascending index order, sweep after sweep, until
/// nothing changes. Values stay on the lattice generated by the inputs, so
/// the nonincreasing iteration terminates.
pub fn minimize_radius(m: &FiniteMetric, f: &[Q]) -> Result<HullPoint, HullError> {
    let check = is_radius_function(m, f)?;
    if let Some((x, y)) = check.witness {
        return Err(HullError::NotRadiusFunction(x, y));
    }
    let mut g = f.to_vec();
    loop {
        let mut changed = false;
        for x in 0..m.n() {
            let low = lowest(m, &g, x);
            if low != g[x] {
                debug_assert!(low < g[x]);
                g[x] = low;
                changed = true;
            }
        }
        if !changed {
            return Ok(HullPoint { values: g });
        }
    }
}

/// `|f − g|_∞`.
pub fn hull_distance(f: &[Q], g: &[Q]) -> Result<Q, HullError> {
    if f.len() != g.len() {
        return Err(HullError::MismatchedSpaces);
    }
    Ok(f.iter().zip(g).map(|(a, b)| (*a - *b).abs()).fold(Q::zero(), max_q))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomCheck {
    /// `|g − f|_∞` with `f` the minimization of `f̄`.
    pub left: Q,
    /// `|g − f̄|_∞`.
    pub right: Q,
    pub holds: bool,
}

/// Minimizes `fbar` and compares its distance to `g` before and after.
pub fn check_dom_distance(m: &FiniteMetric, g: &HullPoint, fbar: &[Q]) -> Result<DomCheck, HullError> {
    let f = minimize_radius(m, fbar)?;
    let left = hull_distance(&g.values, &f.values)?;
    let right = hull_distance(&g.values, fbar)?;
    Ok(DomCheck { left, right, holds: left <= right })
}

/// `ℓ_{x,y} = f(x) + f(y) − d(x, y)`.
pub fn ell(m: &FiniteMetric, f: &[Q], x: usize, y: usize) -> Q {
    f[x] + f[y] - m.d(x, y)
}

/// Minimal radius functions `f_x^0 = f, …, f_x^{M}` moving from `f`
/// towards `e(x)` in steps of exactly `δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentChain {
    pub x: usize,
    pub delta: Q,
    /// `⌊f(x)/δ⌋`.
    pub m_x: usize,
    pub steps: Vec<HullPoint>,
}

impl DescentChain {
    pub fn end(&self) -> &HullPoint {
        self.steps.last().expect("chain starts at f")
    }
}

/// Builds the chain one step at a time: lower `x` by `δ`, raise every
/// tight coordinate `y` to `d(x, y) − f(x) + δ`, then minimize. Every
/// defining property is checked on the result.
pub fn descent_chain(m: &FiniteMetric, f: &HullPoint, x: usize, delta: Q) -> Result<DescentChain, HullError> {
    let n = m.n();
    check_len(m, &f.values)?;
    if x >= n {
        return Err(HullError::IndexOutOfRange { index: x, n });
    }
    if delta <= Q::zero() {
        return Err(HullError::NonpositiveDelta);
    }
    if let Some(bad) = (0..n).find(|&y| f.values[y] != lowest(m, &f.values, y)) {
        return Err(HullError::NotMinimal(bad));
    }
    let m_x = floor_i64(&(f.values[x] / delta)) as usize;
    let mut steps = vec![f.clone()];
    for k in 1..=m_x {
        let prev = &steps[k - 1].values;
        let mut bar = prev.clone();
        bar[x] = prev[x] - delta;
        let mut any_tight = false;
        for y in (0..n).filter(|&y| y != x) {
            if prev[y] + prev[x] - delta < m.d(x, y) {
                bar[y] = m.d(x, y) - prev[x] + delta;
                any_tight = true;
            }
        }
        if !any_tight {
            return Err(HullError::PropertyFailed { property: "tight coordinate exists", step: k });
        }
        let next = minimize_radius(m, &bar)?;
        if next.values[x] != bar[x] {
            return Err(HullError::PropertyFailed { property: "x coordinate drops by δ", step: k });
        }
        steps.push(next);
    }
    let chain = DescentChain { x, delta, m_x, steps };
    verify_descent(m, f, &chain)?;
    Ok(chain)
}

fn verify_descent(m: &FiniteMetric, f: &HullPoint, c: &DescentChain) -> Result<(), HullError> {
    let fail = |property, step| Err(HullError::PropertyFailed { property, step });
    if c.steps[0] != *f {
        return fail("f_x^0 = f", 0);
    }
    for (k, fk) in c.steps.iter().enumerate() {
        if !is_minimal(m, &fk.values) {
            return fail("minimality", k);
        }
        for (k2, fk2) in c.steps.iter().enumerate() {
            let expect = c.delta * q(k.abs_diff(k2) as i64);
            if hull_distance(&fk.values, &fk2.values)? != expect {
                return fail("d(f^k, f^k') = δ|k − k'|", k);
            }
        }
        let kd = c.delta * q(k as i64);
        for y in 0..m.n() {
            let l = ell(m, &f.values, c.x, y);
            let lower = f.values[y] + kd - l;
            let upper = f.values[y] + max_q(Q::zero(), kd - l);
            if fk.values[y] < lower || fk.values[y] > upper {
                return fail("f(y) + kδ − ℓ ≤ f^k(y) ≤ f(y) + max(0, kδ − ℓ)", k);
            }
        }
    }
    let end_dist = hull_distance(&c.end().values, &HullPoint::embed(m, c.x).values)?;
    let expect = f.values[c.x] - c.delta * q(c.m_x as i64);
    if end_dist != expect || end_dist >= c.delta {
        return fail("d(f^M, e(x)) = f(x) − Mδ < δ", c.m_x);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeMode {
    /// Pairwise condition `d(u, v) ≤ n_u + n_v`.
    Integer,
    /// Pairwise condition `d(u, v) ≤ n_u + n_v + 1`: the supremum of real
    /// radii whose floors are `n_u`, `n_v`.
    RealSup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeReport {
    pub delta: Q,
    /// Radii of a family attaining `delta`; a radius equal to the point's
    /// eccentricity gives the whole space and stands for an excluded point.
    pub worst: Option<Vec<u32>>,
}

/// Least `δ` such that every pairwise-intersecting family of balls
/// `B(v, n_v)` has a point within `δ` of all of them, by exhaustion.
pub fn coarse_helly_gauge(m: &FiniteMetric, mode: GaugeMode) -> Result<GaugeReport, HullError> {
    let d = m.as_integer().ok_or(HullError::NonIntegerMetric)?;
    let n = m.n();
    let diam = d.diameter();
    if n > 8 || diam > 12 {
        return Err(HullError::TooLarge);
    }
    let ecc: Vec<u32> = (0..n).map(|v| d.row(v).iter().copied().max().unwrap()).collect();
    let slack = match mode {
        GaugeMode::Integer => 0,
        GaugeMode::RealSup => 1,
    };
    // to_ball[(v * (diam+1) + r) * n + p] = d(p, B(v, r))
    let radii = diam as usize + 1;
    let mut to_ball = vec![0u32; n * radii * n];
    for v in 0..n {
        for r in 0..radii {
            let ball: Vec<usize> = (0..n).filter(|&b| d.get(v, b) <= r as u32).collect();
            for p in 0..n {
                to_ball[(v * radii + r) * n + p] = ball.iter().map(|&b| d.get(p, b)).min().unwrap();
            }
        }
    }
    let mut search = GaugeSearch {
        n,
        radii,
        slack,
        d: &d,
        ecc: &ecc,
        to_ball: &to_ball,
        assigned: Vec::with_capacity(n),
        best: 0,
        worst: None,
    };
    search.run(&[0u32; 8][..n]);
    Ok(GaugeReport { delta: q(search.best as i64), worst: search.worst })
}

struct GaugeSearch<'a> {
    n: usize,
    radii: usize,
    slack: u32,
    d: &'a crate::graph::GraphDistances,
    ecc: &'a [u32],
    to_ball: &'a [u32],
    assigned: Vec<u32>,
    best: u32,
    worst: Option<Vec<u32>>,
}

impl GaugeSearch<'_> {
    /// `reach[p]` is the largest distance from `p` to an assigned ball.
    fn run(&mut self, reach: &[u32]) {
        let v = self.assigned.len();
        if v == self.n {
            let family = reach.iter().copied().min().unwrap_or(0);
            if family > self.best || self.worst.is_none() {
                self.best = family.max(self.best);
                self.worst = Some(self.assigned.clone());
            }
            return;
        }
        for r in 0..=self.ecc[v] {
            let fits = self
                .assigned
                .iter()
                .enumerate()
                .all(|(u, &ru)| self.d.get(u, v) <= ru + r + self.slack);
            if !fits {
                continue;
            }
            let row = &self.to_ball[(v * self.radii + r as usize) * self.n..][..self.n];
            let mut next = [0u32; 8];
            for p in 0..self.n {
                next[p] = reach[p].max(row[p]);
            }
            self.assigned.push(r);
            self.run(&next[..self.n]);
            self.assigned.pop();
        }
    }
}
