//! Quasi-isometric circles and the ball-counting witness.
//!
//! A circle of length `|S|` is sampled at strictly increasing arc positions
//! in `[0, |S|)`, with the cyclic arc metric `min(|a − b|, |S| − |a − b|)`.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::hull::{minimize_radius, HullError};
use crate::metric::{is_qi_embedding, FiniteMetric, MetricError, QiParams};
use crate::rational::{floor_i64, min_q, q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShortcutError {
    #[error("arc positions must be strictly increasing in [0, |S|)")]
    BadArcOrder,
    #[error("circle has no samples")]
    EmptyCircle,
    #[error("circle map does not verify")]
    NotVerified,
    #[error("delta must be positive")]
    NonpositiveDelta,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Hull(#[from] HullError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleMap {
    pub length: Q,
    /// `(arc position, target point)` in cyclic order.
    pub samples: Vec<(Q, usize)>,
    pub params: QiParams,
}

impl CircleMap {
    /// Samples at the integer arcs `0, 1, …, len − 1`.
    pub fn integer(targets: &[usize], params: QiParams) -> Self {
        CircleMap {
            length: q(targets.len() as i64),
            samples: targets.iter().enumerate().map(|(i, &v)| (q(i as i64), v)).collect(),
            params,
        }
    }

    pub fn arc_distance(&self, a: Q, b: Q) -> Q {
        let gap = (a - b).abs();
        min_q(gap, self.length - gap)
    }

    pub fn targets(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.1).collect()
    }

    fn check(&self, m: &FiniteMetric) -> Result<(), ShortcutError> {
        if self.samples.is_empty() {
            return Err(ShortcutError::EmptyCircle);
        }
        let ordered = self.samples.windows(2).all(|w| w[0].0 < w[1].0);
        let first = self.samples[0].0;
        let last = self.samples[self.samples.len() - 1].0;
        if !ordered || first < Q::zero() || last >= self.length {
            return Err(ShortcutError::BadArcOrder);
        }
        for s in &self.samples {
            m.check_index(s.1)?;
        }
        Ok(())
    }

    /// The sampled circle as a finite metric on sample indices.
    pub fn source_metric(&self) -> FiniteMetric {
        let n = self.samples.len();
        FiniteMetric::from_fn_unchecked(n, |i, j| self.arc_distance(self.samples[i].0, self.samples[j].0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleCheck {
    pub holds: bool,
    /// Sample indices and excess of the worst violated pair.
    pub worst: Option<(usize, usize, Q)>,
}

pub fn verify_circle(m: &FiniteMetric, cm: &CircleMap) -> Result<CircleCheck, ShortcutError> {
    cm.check(m)?;
    let check = is_qi_embedding(&cm.source_metric(), m, &cm.targets(), cm.params)?;
    Ok(CircleCheck { holds: check.holds, worst: check.worst })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircleSearch {
    /// Longest verified circle with `|S| > 2KC`, if any.
    pub best: Option<CircleMap>,
    /// The search finished within budget without sampling.
    pub exhaustive: bool,
    pub nodes: u64,
}

/// Above this many points candidate orders are shuffled.
const EXHAUSTIVE_POINTS: usize = 12;

struct CircleDfs<'a> {
    m: &'a FiniteMetric,
    p: QiParams,
    len: usize,
    seq: Vec<usize>,
    order: Vec<usize>,
    budget: u64,
    nodes: u64,
    cut: bool,
}

impl CircleDfs<'_> {
    fn fits(&self, i: usize, v: usize) -> bool {
        self.seq.iter().enumerate().all(|(j, &u)| {
            let gap = i - j;
            let ds = q(gap.min(self.len - gap) as i64);
            let d = self.m.d(u, v);
            d >= ds / self.p.k - self.p.c && d <= self.p.k * ds + self.p.c
        })
    }

    /// Sequences start at their least point, which fixes rotations.
    fn run(&mut self) -> bool {
        let i = self.seq.len();
        if i == self.len {
            return true;
        }
        for idx in 0..self.order.len() {
            let v = self.order[idx];
            if i > 0 && v < self.seq[0] {
                continue;
            }
            if self.nodes >= self.budget {
                self.cut = true;
                return false;
            }
            self.nodes += 1;
            if self.fits(i, v) {
                self.seq.push(v);
                if self.run() {
                    return true;
                }
                self.seq.pop();
            }
        }
        false
    }
}

/// Longest verified circle sampled at integer arcs, trying lengths from
/// `max_len` down to just above `2KC`, where the constant map stops
/// verifying. `budget` bounds the number of search nodes per length.
pub fn search_circles<R: Rng>(
    m: &FiniteMetric,
    p: QiParams,
    max_len: usize,
    budget: u64,
    rng: &mut R,
) -> CircleSearch {
    let floor = floor_i64(&(q(2) * p.k * p.c)).max(0) as usize + 1;
    let mut nodes = 0;
    let mut exhaustive = m.n() <= EXHAUSTIVE_POINTS;
    for len in (floor..=max_len).rev() {
        let mut order: Vec<usize> = (0..m.n()).collect();
        if m.n() > EXHAUSTIVE_POINTS {
            order.shuffle(rng);
        }
        let mut dfs = CircleDfs { m, p, len, seq: Vec::new(), order, budget, nodes: 0, cut: false };
        let found = dfs.run();
        nodes += dfs.nodes;
        exhaustive &= !dfs.cut;
        if found {
            let best = CircleMap::integer(&dfs.seq, p);
            debug_assert!(verify_circle(m, &best).map(|c| c.holds).unwrap_or(false));
            return CircleSearch { best: Some(best), exhaustive, nodes };
        }
    }
    CircleSearch { best: None, exhaustive, nodes }
}

/// Longest circle found for each `K`, made nondecreasing since a circle
/// verifying at `K` verifies at every larger `K`.
pub fn shortcut_profile<R: Rng>(
    m: &FiniteMetric,
    k_grid: &[Q],
    c: Q,
    max_len: usize,
    budget: u64,
    rng: &mut R,
) -> Vec<(Q, usize)> {
    let mut grid = k_grid.to_vec();
    grid.sort();
    let mut best = 0;
    grid.into_iter()
        .map(|k| {
            let p = QiParams::new(k, c).expect("K >= 1 and C >= 0");
            let found = search_circles(m, p, max_len, budget, rng).best.map_or(0, |cm| cm.samples.len());
            best = best.max(found);
            (k, best)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    /// `r(f)`, a point of the space nearest to `f` in the hull.
    pub center: usize,
    pub delta: Q,
    pub radius: Q,
    pub ball_size: usize,
    pub n_bound: u64,
    /// The minimal radius function `f` on the whole space.
    pub f: Vec<Q>,
    pub lower: Q,
    pub upper: Q,
    /// Samples where `f` leaves `[lower, upper]`.
    pub sandwich_failures: Vec<usize>,
    pub holds: bool,
}

/// `⌊(2(K² − 1)/K² + (4δ + 10C)/(K|S|))⁻¹⌋`.
pub fn witness_bound(k: Q, c: Q, delta: Q, length: Q) -> u64 {
    let k2 = k * k;
    let denom = q(2) * (k2 - Q::one()) / k2 + (q(4) * delta + q(10) * c) / (k * length);
    floor_i64(&denom.recip()).max(0) as u64
}

pub fn witness_center(m: &FiniteMetric, cm: &CircleMap, delta: Q) -> Result<WitnessReport, ShortcutError> {
    if delta <= Q::zero() {
        return Err(ShortcutError::NonpositiveDelta);
    }
    if !verify_circle(m, cm)?.holds {
        return Err(ShortcutError::NotVerified);
    }
    let QiParams { k, c } = cm.params;
    let len = cm.length;
    let mut image = cm.targets();
    image.sort_unstable();
    image.dedup();

    let upper = k * len / q(4) + c;
    let on_image = m.restrict(&image);
    let f1 = minimize_radius(&on_image, &alloc::vec![upper; image.len()])?.values;
    // Extend to the whole space by the cheapest route through the image.
    let extended: Vec<Q> = (0..m.n())
        .map(|y| match image.binary_search(&y) {
            Ok(i) => f1[i],
            Err(_) => image.iter().zip(&f1).map(|(&a, &fa)| fa + m.d(a, y)).min().unwrap(),
        })
        .collect();
    let f = minimize_radius(m, &extended)?.values;

    let center = (0..m.n()).min_by_key(|&x| f[x]).unwrap();
    let radius = q(5) * delta;
    let ball_size = (0..m.n()).filter(|&y| m.d(center, y) <= radius).count();
    let n_bound = witness_bound(k, c, delta, len);

    let lower = (q(2) - k * k) / (q(4) * k) * len - q(2) * c;
    let sandwich_failures: Vec<usize> = cm
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| f[s.1] < lower || f[s.1] > upper)
        .map(|(i, _)| i)
        .collect();
    let holds = sandwich_failures.is_empty() && (n_bound == 0 || ball_size as u64 >= n_bound);
    Ok(WitnessReport { center, delta, radius, ball_size, n_bound, f, lower, upper, sandwich_failures, holds })
}
