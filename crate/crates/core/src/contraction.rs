//! K-contractions on finite coarse median data and the σ metric.
//!
//! A K-contraction is a map `Φ: X → ℝ` that is `(1, K)`-coarsely Lipschitz
//! and a K-quasi-median homomorphism. `σ(a, b)` is the largest `Φ(b)` over
//! K-contractions with `Φ(a) = 0`.
//!
//! Every constraint in that optimization is a difference constraint once
//! each triple's value-median is fixed: `Φx − Φy ≤ d(x, y) + K`, orderings
//! `Φp ≤ Φq`, and `|Φ(μ) − Φq| ≤ K`. A branch is therefore solved exactly
//! by shortest paths, and [`sigma`] branches only on triples violated by the
//! current optimum.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::median::{halfspace_hull, ChainContraction, MedianError, MedianGraph, Side};
use crate::graph::GraphDistances;
use crate::metric::{weak_rough_constant, FiniteMetric, MetricError};
use crate::rational::{ceil_i64, floor_i64, max_q, median3, min_q, q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    #[error("K must be positive on general coarse median data")]
    NonpositiveK,
    #[error("median map is not symmetric at ({0}, {1}, {2})")]
    AsymmetricMedian(usize, usize, usize),
    #[error("median map violates μ(a,a,b) = a at ({0}, {1})")]
    UnnormalizedMedian(usize, usize),
    #[error("median map sends ({0}, {1}, {2}) outside the point set")]
    MedianOutOfRange(usize, usize, usize),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("value at point {0} outside the admissible range")]
    RangeViolation(usize),
    #[error("t outside [0, {max}]")]
    TOutOfRange { max: Q },
    #[error("not quasi-median at ({0}, {1}, {2})")]
    NotQuasiMedian(usize, usize, usize),
    #[error("not coarsely Lipschitz at ({0}, {1})")]
    NotCoarselyLipschitz(usize, usize),
    #[error("construction invariant failed: {0}")]
    InvariantViolated(&'static str),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Median(#[from] MedianError),
}

/// A finite metric with a ternary map `μ` normalized to be symmetric and
/// to satisfy `μ(a, a, b) = a`.
#[derive(Debug, Clone)]
pub struct CoarseMedianData {
    metric: FiniteMetric,
    mu: Vec<u32>,
    exact: bool,
    h0: Option<Q>,
    h5: Option<Q>,
}

impl CoarseMedianData {
    /// Takes `mu` as a flat `n³` table indexed `(a·n + b)·n + c`.
    pub fn new(metric: FiniteMetric, mu: Vec<usize>) -> Result<Self, ContractionError> {
        let n = metric.n();
        if mu.len() != n * n * n {
            return Err(ContractionError::LengthMismatch { expected: n * n * n, got: mu.len() });
        }
        let at = |a: usize, b: usize, c: usize| mu[(a * n + b) * n + c];
        for a in 0..n {
            for b in 0..n {
                if at(a, a, b) != a {
                    return Err(ContractionError::UnnormalizedMedian(a, b));
                }
                for c in 0..n {
                    let m = at(a, b, c);
                    if m >= n {
                        return Err(ContractionError::MedianOutOfRange(a, b, c));
                    }
                    if m != at(b, a, c) || m != at(a, c, b) {
                        return Err(ContractionError::AsymmetricMedian(a, b, c));
                    }
                }
            }
        }
        Ok(CoarseMedianData {
            metric,
            mu: mu.into_iter().map(|m| m as u32).collect(),
            exact: false,
            h0: None,
            h5: None,
        })
    }

    /// Exact median data of a median graph; `K = 0` is admissible for it.
    pub fn from_median_graph(g: &MedianGraph) -> Self {
        let n = g.n();
        let mut mu = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    mu.push(g.median(a, b, c) as u32);
                }
            }
        }
        CoarseMedianData { metric: g.l1_metric(), mu, exact: true, h0: None, h5: None }
    }

    /// `μ(x, y, z) = argmin_w d(w,x) + d(w,y) + d(w,z)`, least index on ties.
    pub fn centroid(metric: FiniteMetric) -> Self {
        let n = metric.n();
        let mut mu = vec![0u32; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let m = (0..n)
                        .min_by_key(|&w| metric.d(w, a) + metric.d(w, b) + metric.d(w, c))
                        .expect("nonempty");
                    mu[(a * n + b) * n + c] = m as u32;
                }
            }
        }
        CoarseMedianData { metric, mu, exact: false, h0: None, h5: None }
    }

    /// Copy with `μ` replaced on every permutation of `{a, b, c}`.
    pub fn with_planted_median(&self, a: usize, b: usize, c: usize, m: usize) -> Self {
        let n = self.n();
        let mut out = self.clone();
        for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            out.mu[(x * n + y) * n + z] = m as u32;
        }
        out.exact = false;
        out.h0 = None;
        out.h5 = None;
        out
    }

    pub fn n(&self) -> usize {
        self.metric.n()
    }

    pub fn metric(&self) -> &FiniteMetric {
        &self.metric
    }

    pub fn is_exact_median(&self) -> bool {
        self.exact
    }

    #[inline]
    pub fn mu(&self, a: usize, b: usize, c: usize) -> usize {
        let n = self.n();
        self.mu[(a * n + b) * n + c] as usize
    }

    #[inline]
    pub fn d(&self, x: usize, y: usize) -> Q {
        self.metric.d(x, y)
    }

    /// `{ μ(a, b, x) : x }`, sorted.
    pub fn interval(&self, a: usize, b: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.n()).map(|x| self.mu(a, b, x)).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Least `h0` with `d(μ(a,b,c), μ(a',b',c')) ≤ h0·(d(a,a') + d(b,b') + d(c,c')) + h0`.
    /// Costs `n⁶`; the value is cached by [`Self::measure_constants`].
    pub fn h0(&self) -> Q {
        if let Some(h) = self.h0 {
            return h;
        }
        if let Some(d) = self.metric.as_integer() {
            return self.h0_integer(&d);
        }
        let n = self.n();
        let mut best = Q::zero();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let m = self.mu(a, b, c);
                    for a2 in 0..n {
                        let da = self.d(a, a2) + 1;
                        for b2 in 0..n {
                            let dab = da + self.d(b, b2);
                            for c2 in 0..n {
                                let num = self.d(m, self.mu(a2, b2, c2));
                                if num.is_zero() {
                                    continue;
                                }
                                let ratio = num / (dab + self.d(c, c2));
                                if ratio > best {
                                    best = ratio;
                                }
                            }
                        }
                    }
                }
            }
        }
        best
    }

    /// `h0` with integer cross-multiplication in place of rational division.
    fn h0_integer(&self, d: &GraphDistances) -> Q {
        let n = self.n();
        let (mut num_best, mut den_best) = (0u64, 1u64);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let m = self.mu(a, b, c);
                    let row_m = d.row(m);
                    for a2 in 0..n {
                        let da = d.get(a, a2) as u64 + 1;
                        for b2 in 0..n {
                            let dab = da + d.get(b, b2) as u64;
                            for c2 in 0..n {
                                let num = row_m[self.mu(a2, b2, c2)] as u64;
                                let den = dab + d.get(c, c2) as u64;
                                if num * den_best > num_best * den {
                                    num_best = num;
                                    den_best = den;
                                }
                            }
                        }
                    }
                }
            }
        }
        Q::new(num_best as i64, den_best as i64)
    }

    /// Least `H5` bounding both five-point defects
    /// `d(μ(a,b,μ(x,y,z)), μ(μ(a,b,x), μ(a,b,y), z))` and
    /// `d(μ(a,b,μ(x,y,z)), μ(μ(a,b,x), μ(a,b,y), μ(a,b,z)))`.
    pub fn h5(&self) -> Q {
        if let Some(h) = self.h5 {
            return h;
        }
        let n = self.n();
        let mut best = Q::zero();
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    let abx = self.mu(a, b, x);
                    for y in 0..n {
                        let aby = self.mu(a, b, y);
                        for z in 0..n {
                            let left = self.mu(a, b, self.mu(x, y, z));
                            let r1 = self.mu(abx, aby, z);
                            let r2 = self.mu(abx, aby, self.mu(a, b, z));
                            best = max_q(best, max_q(self.d(left, r1), self.d(left, r2)));
                        }
                    }
                }
            }
        }
        best
    }

    /// Caches `h0`, `H5` and the weak rough-geodesicity constant.
    pub fn measure_constants(&mut self) {
        self.h0 = Some(self.h0());
        self.h5 = Some(self.h5());
        if self.metric.c_weak().is_none() {
            self.metric = self.metric.clone().with_weak_constant();
        }
    }

    /// Weak rough-geodesicity constant, cached by `measure_constants`.
    pub fn c_weak(&self) -> Q {
        self.metric.c_weak().unwrap_or_else(|| weak_rough_constant(&self.metric))
    }

    fn check_k(&self, k: Q) -> Result<(), ContractionError> {
        if k < Q::zero() || (k.is_zero() && !self.exact) {
            Err(ContractionError::NonpositiveK)
        } else {
            Ok(())
        }
    }

    fn check_values(&self, phi: &[Q]) -> Result<(), ContractionError> {
        if phi.len() != self.n() {
            return Err(ContractionError::LengthMismatch { expected: self.n(), got: phi.len() });
        }
        Ok(())
    }
}

/// A real-valued K-contraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionMap {
    pub values: Vec<Q>,
    pub k: Q,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContractionReport {
    /// Pairs `x < y` with `|Φx − Φy| > d(x, y) + K`.
    pub lipschitz: Vec<(usize, usize)>,
    /// Triples `x < y < z` with `|Φ(μ) − med(Φx, Φy, Φz)| > K`.
    pub quasi_median: Vec<(usize, usize, usize)>,
}

impl ContractionReport {
    pub fn is_empty(&self) -> bool {
        self.lipschitz.is_empty() && self.quasi_median.is_empty()
    }
}

pub fn validate_contraction(
    cm: &CoarseMedianData,
    phi: &[Q],
    k: Q,
) -> Result<ContractionReport, ContractionError> {
    cm.check_values(phi)?;
    let n = cm.n();
    let mut report = ContractionReport::default();
    for x in 0..n {
        for y in x + 1..n {
            if (phi[x] - phi[y]).abs() > cm.d(x, y) + k {
                report.lipschitz.push((x, y));
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let m = cm.mu(x, y, z);
                if (phi[m] - median3(phi[x], phi[y], phi[z])).abs() > k {
                    report.quasi_median.push((x, y, z));
                }
            }
        }
    }
    Ok(report)
}

/// Difference-constraint closure: `w[i·n + j]` bounds `Φj − Φi`.
struct Closure {
    n: usize,
    w: Vec<Q>,
}

impl Closure {
    /// Adds `Φv − Φu ≤ c`; false when that makes the system infeasible.
    fn add(&mut self, u: usize, v: usize, c: Q) -> bool {
        let n = self.n;
        if self.w[v * n + u] + c < Q::zero() {
            return false;
        }
        if self.w[u * n + v] <= c {
            return true;
        }
        let to_u: Vec<Q> = (0..n).map(|i| self.w[i * n + u]).collect();
        let from_v: Vec<Q> = self.w[v * n..(v + 1) * n].to_vec();
        for i in 0..n {
            let head = to_u[i] + c;
            let row = &mut self.w[i * n..(i + 1) * n];
            for j in 0..n {
                let cand = head + from_v[j];
                if cand < row[j] {
                    row[j] = cand;
                }
            }
        }
        true
    }
}

struct SigmaSearch<'a> {
    triples: &'a [[usize; 4]],
    k: Q,
    a: usize,
    b: usize,
    best: Option<Q>,
}

impl SigmaSearch<'_> {
    fn run(&mut self, c: Closure) {
        let n = c.n;
        let bound = c.w[self.a * n + self.b];
        if self.best.is_some_and(|best| bound <= best) {
            return;
        }
        let phi = &c.w[self.a * n..(self.a + 1) * n];
        let violated = self.triples.iter().find(|&&[x, y, z, m]| {
            (phi[m] - median3(phi[x], phi[y], phi[z])).abs() > self.k
        });
        let Some(&[x, y, z, m]) = violated else {
            self.best = Some(bound);
            return;
        };
        let mut orders = [
            [x, y, z],
            [z, y, x],
            [y, x, z],
            [z, x, y],
            [x, z, y],
            [y, z, x],
        ];
        // Try orderings consistent with the current optimum first.
        orders.sort_by_key(|o| {
            let mut inversions = 0;
            if phi[o[0]] > phi[o[1]] {
                inversions += 1;
            }
            if phi[o[1]] > phi[o[2]] {
                inversions += 1;
            }
            inversions
        });
        for [p, mid, r] in orders {
            let mut child = Closure { n, w: c.w.clone() };
            let ok = child.add(mid, p, Q::zero())
                && child.add(r, mid, Q::zero())
                && child.add(mid, m, self.k)
                && child.add(m, mid, self.k);
            if ok {
                self.run(child);
            }
        }
    }
}

/// Exact `sup Φ(b)` over K-contractions on `points` with `Φ(a) = 0`; only
/// triples whose median stays inside `points` constrain `Φ`.
fn sigma_on(cm: &CoarseMedianData, points: &[usize], a: usize, b: usize, k: Q) -> Q {
    if a == b {
        return Q::zero();
    }
    let n = points.len();
    let local = |v: usize| points.iter().position(|&p| p == v);
    let mut w = vec![Q::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                w[i * n + j] = cm.d(points[i], points[j]) + k;
            }
        }
    }
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                if let Some(m) = local(cm.mu(points[i], points[j], points[l])) {
                    triples.push([i, j, l, m]);
                }
            }
        }
    }
    let mut search = SigmaSearch {
        triples: &triples,
        k,
        a: local(a).expect("a in points"),
        b: local(b).expect("b in points"),
        best: None,
    };
    search.run(Closure { n, w });
    search.best.expect("constant maps are feasible")
}

/// `σ(a, b)`: the supremum of `Φ(b)` over K-contractions with `Φ(a) = 0`.
///
/// `K = 0` is accepted only for data coming from a median graph.
pub fn sigma(cm: &CoarseMedianData, a: usize, b: usize, k: Q) -> Result<Q, ContractionError> {
    cm.metric.check_index(a)?;
    cm.metric.check_index(b)?;
    cm.check_k(k)?;
    let all: Vec<usize> = (0..cm.n()).collect();
    Ok(sigma_on(cm, &all, a, b, k))
}

/// All-pairs `σ` as a metric space.
pub fn sigma_table(cm: &CoarseMedianData, k: Q) -> Result<FiniteMetric, ContractionError> {
    cm.check_k(k)?;
    let n = cm.n();
    let all: Vec<usize> = (0..n).collect();
    let mut table = vec![Q::zero(); n * n];
    for a in 0..n {
        for b in a + 1..n {
            let v = sigma_on(cm, &all, a, b, k);
            table[a * n + b] = v;
            table[b * n + a] = v;
        }
    }
    Ok(FiniteMetric::from_fn_unchecked(n, |i, j| table[i * n + j]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedSigma {
    /// `σ′(a, b)`, optimized over contractions on `[a, b]` only.
    pub value: Q,
    pub sigma: Q,
    /// `max{h0, 1 + h0/K, 2 + H5/K}`, defined for `K > 0`.
    pub l: Option<Q>,
}

impl RestrictedSigma {
    /// `σ ≤ σ′ ≤ L·σ`, the upper half checked only when `L` is defined.
    pub fn sandwich_holds(&self) -> bool {
        self.sigma <= self.value && self.l.is_none_or(|l| self.value <= l * self.sigma)
    }
}

/// `σ′(a, b)` over K-contractions defined on the interval
/// `[a, b] = { μ(a, b, x) }`. Triples whose median leaves the interval do
/// not constrain `Φ`.
pub fn sigma_restricted(
    cm: &CoarseMedianData,
    a: usize,
    b: usize,
    k: Q,
) -> Result<RestrictedSigma, ContractionError> {
    let sigma_ab = sigma(cm, a, b, k)?;
    let interval = cm.interval(a, b);
    let value = sigma_on(cm, &interval, a, b, k);
    let l = (k > Q::zero()).then(|| {
        let h0 = cm.h0();
        max_q(h0, max_q(q(1) + h0 / k, q(2) + cm.h5() / k))
    });
    Ok(RestrictedSigma { value, sigma: sigma_ab, l })
}

/// The three-set partition of the gluing construction and its constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GluePartition {
    pub y01: Vec<usize>,
    pub y02: Vec<usize>,
    pub y: Vec<usize>,
    pub z1: Vec<usize>,
    pub z2: Vec<usize>,
    pub t: Q,
    pub d: Q,
    pub e: Q,
    pub r: Q,
    pub s: Q,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlueResult {
    pub map: ContractionMap,
    pub partition: GluePartition,
    pub report: ContractionReport,
    /// `Φ(b) − Φ(a) ≥ r + s − 2t − 2D − 2E`.
    pub gap_bound_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlueOutcome {
    Glued(GlueResult),
    /// `Z1 ∩ Z2` is nonempty; `witness` lies in both.
    HypothesisFailed { witness: usize, partition: GluePartition },
}

/// Scalars of a gluing run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlueParams {
    pub a: usize,
    pub b: usize,
    pub r: Q,
    pub s: Q,
    pub t: Q,
    pub e: Q,
    pub k: Q,
}

/// `D = h0·(3K + 4C) + 4K + h0`, with `C` the weak rough-geodesicity
/// constant of the underlying metric.
pub fn glue_constant(cm: &CoarseMedianData, k: Q) -> Q {
    let h0 = cm.h0();
    h0 * (q(3) * k + q(4) * cm.c_weak()) + q(4) * k + h0
}

/// Glues `Φ1: X → [0, r]` and `Φ2: X → [r, r + s]` into a single
/// K-contraction that is `Φ1` on `Y01`, `Φ2 − 2t − 2D` on `Y02` and the
/// constant `r − t − D` in between.
pub fn glue_contractions(
    cm: &CoarseMedianData,
    phi1: &[Q],
    phi2: &[Q],
    p: GlueParams,
) -> Result<GlueOutcome, ContractionError> {
    cm.check_values(phi1)?;
    cm.check_values(phi2)?;
    cm.metric.check_index(p.a)?;
    cm.metric.check_index(p.b)?;
    cm.check_k(p.k)?;
    let GlueParams { a, b, r, s, t, e, k } = p;
    if r < e || s < e {
        return Err(ContractionError::RangeViolation(if r < e { a } else { b }));
    }
    if let Some(x) = (0..cm.n()).find(|&x| phi1[x] < Q::zero() || phi1[x] > r) {
        return Err(ContractionError::RangeViolation(x));
    }
    if let Some(x) = (0..cm.n()).find(|&x| phi2[x] < r || phi2[x] > r + s) {
        return Err(ContractionError::RangeViolation(x));
    }
    if phi1[a] > e {
        return Err(ContractionError::RangeViolation(a));
    }
    if phi2[b] < r + s - e {
        return Err(ContractionError::RangeViolation(b));
    }
    let d = glue_constant(cm, k);
    let t_max = min_q(r, s) - d + k - e;
    if t < Q::zero() || t > t_max {
        return Err(ContractionError::TOutOfRange { max: t_max });
    }
    let n = cm.n();
    let select = |f: &dyn Fn(usize) -> bool| -> Vec<usize> { (0..n).filter(|&x| f(x)).collect() };
    let z1 = select(&|x| phi1[x] <= r - t - k);
    let z2 = select(&|x| phi2[x] >= r + t + k);
    let y01 = select(&|x| phi1[x] <= r - t - d);
    let y02 = select(&|x| phi2[x] >= r + t + d);
    let y = select(&|x| !y01.contains(&x) && !y02.contains(&x));
    let partition = GluePartition { y01, y02, y, z1, z2, t, d, e, r, s };
    if let Some(&w) = partition.z1.iter().find(|x| partition.z2.contains(x)) {
        return Ok(GlueOutcome::HypothesisFailed { witness: w, partition });
    }
    let values: Vec<Q> = (0..n)
        .map(|x| {
            if partition.y01.contains(&x) {
                phi1[x]
            } else if partition.y02.contains(&x) {
                phi2[x] - q(2) * t - q(2) * d
            } else {
                r - t - d
            }
        })
        .collect();
    let report = validate_contraction(cm, &values, k)?;
    let gap_bound_holds = values[b] - values[a] >= r + s - q(2) * t - q(2) * d - q(2) * e;
    Ok(GlueOutcome::Glued(GlueResult {
        map: ContractionMap { values, k },
        partition,
        report,
        gap_bound_holds,
    }))
}

/// A chain contraction approximating a coarse median map on a median graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedChain {
    /// Chain `H_u, …, H_v`, each oriented towards larger values.
    pub psi: ChainContraction,
    pub u: i64,
    pub v: i64,
    /// `Ψ(x) = u − 1 + #{passed hyperplanes}`.
    pub values: Vec<i64>,
    /// `4K′ν`.
    pub scale: Q,
}

/// Approximates a `K′`-quasi-median, `(K′, K′)`-coarsely Lipschitz map by
/// `4K′ν·Ψ` for a chain contraction `Ψ`, up to additive error `4K′ν`.
///
/// With `A = 2K′ν`, `H_n` separates the hull of `{Φ ≤ 2A(n−1)}` from the
/// hull of `{Φ > 2An − A}`; the halfspaces are chosen nested.
pub fn extract_chain(g: &MedianGraph, phi: &[Q], kp: Q) -> Result<ExtractedChain, ContractionError> {
    let n = g.n();
    if phi.len() != n {
        return Err(ContractionError::LengthMismatch { expected: n, got: phi.len() });
    }
    if kp <= Q::zero() {
        return Err(ContractionError::NonpositiveK);
    }
    let d = g.d1();
    for x in 0..n {
        for y in x + 1..n {
            if (phi[x] - phi[y]).abs() > kp * q(d.get(x, y) as i64) + kp {
                return Err(ContractionError::NotCoarselyLipschitz(x, y));
            }
        }
    }
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let m = g.median(x, y, z);
                if (phi[m] - median3(phi[x], phi[y], phi[z])).abs() > kp {
                    return Err(ContractionError::NotQuasiMedian(x, y, z));
                }
            }
        }
    }
    let nu = q(g.nu().max(1) as i64);
    let a = q(2) * kp * nu;
    let width = q(2) * a;
    let band = |v: Q| -> Option<i64> {
        let k = ceil_i64(&(v / width));
        (v > width * q(k) - a).then_some(k)
    };
    let bands: Vec<i64> = phi.iter().filter_map(|&v| band(v)).collect();
    let (lo, hi) = match (bands.iter().min(), bands.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => {
            let m = phi.iter().copied().min().expect("nonempty graph");
            let f = floor_i64(&(m / width));
            (f, f)
        }
    };

    // Candidate separators per level, stored with their low halfspace.
    let mut candidates: Vec<Vec<(usize, Side)>> = Vec::new();
    for level in lo + 1..=hi {
        let low: Vec<usize> = (0..n).filter(|&x| phi[x] <= width * q(level - 1)).collect();
        let high: Vec<usize> = (0..n).filter(|&x| phi[x] > width * q(level) - a).collect();
        let low_hull = halfspace_hull(g, &low)?;
        let high_hull = halfspace_hull(g, &high)?;
        let mut level_cands = Vec::new();
        for h in 0..g.hyperplane_count() {
            let s = g.side(h, low_hull[0]);
            if low_hull.iter().all(|&x| g.side(h, x) == s)
                && high_hull.iter().all(|&x| g.side(h, x) != s)
            {
                level_cands.push((h, s));
            }
        }
        candidates.push(level_cands);
    }
    let mut picked: Vec<(usize, Side)> = Vec::new();
    if !pick_nested(g, &candidates, &mut picked) {
        return Err(ContractionError::InvariantViolated("no nested separating hyperplanes"));
    }
    let chain = picked.iter().map(|&(h, _)| h).collect();
    let passed = picked.iter().map(|&(_, s)| s.flip()).collect();
    let psi = ChainContraction::new(g, chain, passed)?;
    let values: Vec<i64> = (0..n).map(|x| lo + psi.value(g, x)).collect();
    let scale = width;
    for x in 0..n {
        if (phi[x] - scale * q(values[x])).abs() > scale {
            return Err(ContractionError::InvariantViolated("approximation bound"));
        }
    }
    Ok(ExtractedChain { psi, u: lo + 1, v: hi, values, scale })
}

/// Depth-first choice of one candidate per level with strictly growing low
/// halfspaces.
fn pick_nested(g: &MedianGraph, candidates: &[Vec<(usize, Side)>], picked: &mut Vec<(usize, Side)>) -> bool {
    let level = picked.len();
    if level == candidates.len() {
        return true;
    }
    for &(h, s) in &candidates[level] {
        let ok = match picked.last() {
            None => true,
            Some(&(ph, ps)) => {
                ph != h && (0..g.n()).all(|x| g.side(ph, x) != ps || g.side(h, x) == s)
            }
        };
        if ok {
            picked.push((h, s));
            if pick_nested(g, candidates, picked) {
                return true;
            }
            picked.pop();
        }
    }
    false
}

/// Least `M` such that `d(B_σ(w, R), μ(x, y, z)) ≤ M` whenever `y, z` lie in
/// the σ-ball `B_σ(w, R)`. Balls only change at attained radii, and for a
/// fixed pair the worst radius is `max{σ(w, y), σ(w, z)}`.
pub fn ball_convexity_constant(cm: &CoarseMedianData, sigma: &FiniteMetric) -> Q {
    let n = cm.n();
    assert_eq!(sigma.n(), n, "σ table size");
    let mut worst = Q::zero();
    for w in 0..n {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| sigma.d(w, v));
        let mut dist_to_ball: Vec<Option<Q>> = vec![None; n];
        let mut start = 0;
        while start < n {
            let radius = sigma.d(w, order[start]);
            let mut end = start;
            while end < n && sigma.d(w, order[end]) == radius {
                end += 1;
            }
            for &y in &order[start..end] {
                for (p, slot) in dist_to_ball.iter_mut().enumerate() {
                    let dp = cm.d(y, p);
                    if slot.is_none_or(|cur| dp < cur) {
                        *slot = Some(dp);
                    }
                }
            }
            for &y in &order[start..end] {
                for &z in &order[..end] {
                    for x in 0..n {
                        let gap = dist_to_ball[cm.mu(x, y, z)].expect("ball is nonempty");
                        worst = max_q(worst, gap);
                    }
                }
            }
            start = end;
        }
    }
    worst
}

/// Least `ε` with `d(x, μ(x, y, z)) ≤ ε` for every `x ∈ [y, z]`.
pub fn interval_stability_constant(cm: &CoarseMedianData) -> Q {
    let n = cm.n();
    let mut worst = Q::zero();
    for y in 0..n {
        for z in 0..n {
            for x in cm.interval(y, z) {
                worst = max_q(worst, cm.d(x, cm.mu(x, y, z)));
            }
        }
    }
    worst
}
