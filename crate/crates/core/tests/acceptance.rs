//! Acceptance gate: one line per criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use common::*;
use helly_core::contraction::{
    ball_convexity_constant, extract_chain, glue_constant, glue_contractions, sigma, sigma_table, GlueOutcome,
};
use helly_core::generate::{
    king_grid, random_cactus, random_close_family, random_glue_instance, random_median_graph, random_metric,
    random_quasi_median_map, random_radius_function, random_tree, MedianKind,
};
use helly_core::hull::{
    check_dom_distance, coarse_helly_gauge, descent_chain, hull_distance, is_minimal, minimize_radius, GaugeMode,
    HullPoint,
};
use helly_core::hyperbolic::{cdv_point, HyperbolicGraph};
use helly_core::median::{
    convex_hull_bruteforce, iterated_median_hull, linf_chain, linf_distance, ChainContraction,
};
use helly_core::shortcut::{witness_center, CircleMap};
use helly_core::{CoarseMedianData, FiniteMetric, Graph, MedianGraph, QiParams, Q};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frac(a: i64, b: i64) -> Q {
    Ratio::new(a, b)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(failures: usize, detail: String) -> Self {
        Outcome { pass: failures == 0, detail }
    }
}

fn abs(v: Q) -> Q {
    if v < q(0) {
        -v
    } else {
        v
    }
}

fn median_corpus(count: usize, max_n: usize, seed: u64) -> Vec<MedianGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [MedianKind::Tree, MedianKind::Grid, MedianKind::CubeRetract, MedianKind::Box];
    (0..count).map(|i| random_median_graph(kinds[i % kinds.len()], max_n, &mut rng)).collect()
}

fn criterion_1(corpus: &[MedianGraph]) -> Outcome {
    let mut failures = 0;
    let mut triples = 0u64;
    for g in corpus {
        let d = bfs_all(g.graph());
        let n = g.n();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    triples += 1;
                    if median_oracle(&d, x, y, z) != Some(g.median(x, y, z)) {
                        failures += 1;
                    }
                }
            }
        }
    }
    Outcome::new(failures, format!("{} graphs, {triples} triples, {failures} mismatches", corpus.len()))
}

fn criterion_2(corpus: &[MedianGraph]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let mut sets = 0;
    for g in corpus {
        let d = bfs_all(g.graph());
        for _ in 0..4 {
            let size = rng.gen_range(1..=4.min(g.n()));
            let a: Vec<usize> = (0..size).map(|_| rng.gen_range(0..g.n())).collect();
            let ih = iterated_median_hull(g, &a).unwrap();
            let brute = convex_hull_bruteforce(g, &a).unwrap();
            let bound = 1.max(g.nu().saturating_sub(1));
            sets += 1;
            if ih.hull() != brute.as_slice() || brute != convex_hull_oracle(&d, &a) || ih.step > bound {
                failures += 1;
            }
        }
    }
    let cube = MedianGraph::recognize(&Graph::hypercube(3)).unwrap();
    let star = iterated_median_hull(&cube, &[0, 1, 2, 4]).unwrap();
    let star_ok = star.step == 2 && star.levels[1] == [0, 1, 2, 3, 4, 5, 6] && star.hull().len() == 8;
    if !star_ok {
        failures += 1;
    }
    Outcome::new(failures, format!("{sets} sets, 3-cube star step {}, {failures} failures", star.step))
}

fn criterion_3(corpus: &[MedianGraph]) -> Outcome {
    let mut failures = 0;
    let mut pairs = 0;
    let mut graphs = 0;
    for g in corpus.iter().filter(|g| g.n() <= 20) {
        graphs += 1;
        let d = bfs_all(g.graph());
        let halves = halfspaces_oracle(g.graph(), &d);
        let nu = g.nu().max(1) as u32;
        for x in 0..g.n() {
            for y in 0..g.n() {
                pairs += 1;
                let linf = linf_distance(g, x, y);
                let oracle = linf_oracle(&halves, x, y);
                let chain = linf_chain(g, x, y);
                let attained = if chain.is_empty() {
                    0
                } else {
                    let psi = ChainContraction::oriented(g, chain).unwrap();
                    (psi.value(g, x) - psi.value(g, y)).unsigned_abs() as u32
                };
                let d1 = d[x][y];
                if linf != oracle || attained != linf || linf > d1 || d1 > nu * linf {
                    failures += 1;
                }
            }
        }
    }
    Outcome::new(failures, format!("{graphs} graphs, {pairs} pairs, {failures} failures"))
}

fn criterion_4() -> Outcome {
    let mut failures = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let kinds = [MedianKind::Tree, MedianKind::Grid, MedianKind::CubeRetract, MedianKind::Box];
    let mut exact_pairs = 0;
    for i in 0..24 {
        let g = random_median_graph(kinds[i % 4], 12, &mut rng);
        let cm = CoarseMedianData::from_median_graph(&g);
        for a in 0..g.n() {
            for b in a + 1..g.n() {
                exact_pairs += 1;
                if sigma(&cm, a, b, q(0)).unwrap() != q(linf_distance(&g, a, b) as i64) {
                    failures += 1;
                }
            }
        }
    }
    let mut positive = 0;
    for i in 0..16 {
        let g = random_median_graph(kinds[i % 4], 8, &mut rng);
        let cm = CoarseMedianData::from_median_graph(&g);
        for k in [frac(1, 2), q(1)] {
            positive += 1;
            let s = sigma_table(&cm, k).unwrap();
            let ok = metric_axioms(&s)
                && (0..g.n()).all(|a| {
                    (0..g.n()).all(|b| {
                        let d1 = q(g.d1().get(a, b) as i64);
                        s.d(a, b) <= d1 + k && s.d(a, b) >= q(linf_distance(&g, a, b) as i64)
                    })
                });
            if !ok {
                failures += 1;
            }
        }
    }
    for _ in 0..6 {
        let n = rng.gen_range(3..=5);
        let cm = CoarseMedianData::centroid(random_metric(n, 3, &mut rng));
        let k = q(1);
        positive += 1;
        let s = sigma_table(&cm, k).unwrap();
        let ok = metric_axioms(&s) && (0..n).all(|a| (0..n).all(|b| s.d(a, b) <= cm.d(a, b) + k));
        if !ok {
            failures += 1;
        }
    }
    Outcome::new(
        failures,
        format!("{exact_pairs} pairs at K = 0, {positive} tables at K > 0, {failures} failures"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kinds = [MedianKind::Tree, MedianKind::Grid, MedianKind::CubeRetract, MedianKind::Box];
    let mut failures = 0;
    let mut largest = 0;
    let count = 24;
    for i in 0..count {
        let g = random_median_graph(kinds[i % 4], 60, &mut rng);
        largest = largest.max(g.n());
        let cm = CoarseMedianData::from_median_graph(&g);
        if ball_convexity_constant(&cm, &g.linf_metric()) != q(0) {
            failures += 1;
        }
    }
    Outcome::new(failures, format!("{count} graphs up to n = {largest}, {failures} nonzero"))
}

fn criterion_6(corpus: &[MedianGraph]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = 0;
    let mut instances = 0;
    let graphs: Vec<(&MedianGraph, CoarseMedianData)> = corpus
        .iter()
        .filter(|g| (8..=16).contains(&g.n()))
        .take(40)
        .map(|g| {
            let mut cm = CoarseMedianData::from_median_graph(g);
            cm.measure_constants();
            (g, cm)
        })
        .collect();
    'outer: for _ in 0..100 {
        for (g, cm) in &graphs {
            if instances >= 150 {
                break 'outer;
            }
            let Some(inst) = random_glue_instance(g, |k| glue_constant(cm, k), &mut rng) else {
                continue;
            };
            instances += 1;
            let p = inst.params;
            match glue_contractions(cm, &inst.phi1, &inst.phi2, p) {
                Ok(GlueOutcome::Glued(res)) => {
                    let d = glue_constant(cm, p.k);
                    let phi = &res.map.values;
                    let gap = phi[p.b] - phi[p.a] >= p.r + p.s - q(2) * p.t - q(2) * d - q(2) * p.e;
                    let valid = is_k_contraction(|x, y| q(g.d1().get(x, y) as i64), |x, y, z| g.median(x, y, z), phi, p.k);
                    if !(gap && valid && res.report.is_empty() && res.gap_bound_holds) {
                        failures += 1;
                    }
                }
                _ => failures += 1,
            }
        }
    }
    if instances < 100 {
        failures += 1;
    }
    Outcome::new(failures, format!("{instances} instances on {} graphs, {failures} failures", graphs.len()))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let kinds = [MedianKind::Tree, MedianKind::Grid, MedianKind::Box, MedianKind::CubeRetract];
    let mut failures = 0;
    let mut instances = 0;
    let mut i = 0;
    while instances < 120 {
        let g = random_median_graph(kinds[i % 4], 40, &mut rng);
        i += 1;
        if g.nu() > 3 {
            continue;
        }
        let kp = [frac(1, 2), q(1), q(2)][rng.gen_range(0..3)];
        let phi = random_quasi_median_map(&g, kp, &mut rng);
        instances += 1;
        match extract_chain(&g, &phi, kp) {
            Ok(ex) => {
                let scale = q(4) * kp * q(g.nu().max(1) as i64);
                let chain_ok = ex.psi.validate(&g).is_ok()
                    && (0..g.n()).all(|x| ex.values[x] == ex.u - 1 + ex.psi.value(&g, x));
                let bound_ok = (0..g.n()).all(|x| abs(phi[x] - scale * q(ex.values[x])) <= scale);
                if !(chain_ok && bound_ok && ex.scale == scale) {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    Outcome::new(failures, format!("{instances} maps, {failures} failures"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = 0;
    let count = 600;
    for _ in 0..count {
        let n = rng.gen_range(2..=10);
        let m = random_metric(n, 5, &mut rng);
        let g = minimize_radius(&m, &random_radius_function(&m, &mut rng)).unwrap();
        let fbar = random_radius_function(&m, &mut rng);
        let f = minimize_radius(&m, &fbar).unwrap();
        let minimal = is_minimal_oracle(&m, &g.values)
            && is_minimal_oracle(&m, &f.values)
            && is_minimal(&m, &f.values)
            && (0..n).all(|x| f.values[x] <= fbar[x]);
        let embed = (0..n).all(|x| {
            (0..n).all(|y| {
                let (ex, ey) = (HullPoint::embed(&m, x), HullPoint::embed(&m, y));
                hull_distance(&ex.values, &ey.values).unwrap() == m.d(x, y) && sup_dist(&ex.values, &ey.values) == m.d(x, y)
            })
        });
        let dom = check_dom_distance(&m, &g, &fbar).unwrap();
        let dom_ok = dom.holds && sup_dist(&g.values, &f.values) <= sup_dist(&g.values, &fbar);
        if !(minimal && embed && dom_ok) {
            failures += 1;
        }
    }
    Outcome::new(failures, format!("{count} (g, f̄) pairs, {failures} failures"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0;
    let mut count = 0;
    let mut steps = 0;
    while count < 250 {
        let n = rng.gen_range(2..=20);
        let m = random_metric(n, 4, &mut rng);
        let f = minimize_radius(&m, &random_radius_function(&m, &mut rng)).unwrap();
        let x = rng.gen_range(0..n);
        let delta = [frac(1, 3), frac(1, 2), q(1), frac(3, 2), q(2)][rng.gen_range(0..5)];
        if f.values[x] < delta {
            continue;
        }
        count += 1;
        let Ok(chain) = descent_chain(&m, &f, x, delta) else {
            failures += 1;
            continue;
        };
        steps += chain.steps.len();
        let fx = f.values[x];
        let m_x = (fx / delta).to_integer() as usize;
        let mut ok = chain.steps.len() == m_x + 1 && chain.steps[0] == f;
        for (k, fk) in chain.steps.iter().enumerate() {
            ok &= is_minimal_oracle(&m, &fk.values);
            for (k2, fk2) in chain.steps.iter().enumerate() {
                ok &= sup_dist(&fk.values, &fk2.values) == delta * q(k.abs_diff(k2) as i64);
            }
            let kd = delta * q(k as i64);
            for y in 0..n {
                let ell = fx + f.values[y] - m.d(x, y);
                let fy = f.values[y];
                ok &= fy + kd - ell <= fk.values[y];
                ok &= fk.values[y] <= fy + if kd > ell { kd - ell } else { q(0) };
            }
        }
        let end = chain.steps.last().unwrap().values[x];
        ok &= end == fx - delta * q(m_x as i64) && end < delta;
        if !ok {
            failures += 1;
        }
    }
    Outcome::new(failures, format!("{count} chains, {steps} hull points, {failures} failures"))
}

fn criterion_10() -> Outcome {
    let mut failures = 0;
    let c6 = FiniteMetric::from_graph(&Graph::cycle(6)).unwrap();
    let c6_delta = coarse_helly_gauge(&c6, GaugeMode::Integer).unwrap().delta;
    if c6_delta != q(1) {
        failures += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut graphs: Vec<Graph> = Vec::new();
    for n in 1..=8 {
        graphs.push(Graph::path(n));
    }
    for leaves in 2..=7 {
        graphs.push(Graph::star(leaves));
    }
    for _ in 0..12 {
        let n = rng.gen_range(4..=8);
        graphs.push(random_tree(n, &mut rng));
    }
    for (r, c) in [(2, 2), (2, 3), (2, 4)] {
        graphs.push(Graph::grid(r, c));
    }
    graphs.push(Graph::hypercube(3));
    let mut retracts = 0;
    while retracts < 6 {
        let g = random_median_graph(MedianKind::CubeRetract, 8, &mut rng);
        graphs.push(g.graph().clone());
        retracts += 1;
    }
    let mut slowest = Duration::ZERO;
    for g in &graphs {
        let mg = MedianGraph::recognize(g).unwrap();
        let start = Instant::now();
        let delta = coarse_helly_gauge(&mg.linf_metric(), GaugeMode::Integer).map(|r| r.delta);
        slowest = slowest.max(start.elapsed());
        if delta != Ok(q(0)) {
            failures += 1;
        }
    }
    if slowest > Duration::from_secs(300) {
        failures += 1;
    }
    Outcome::new(
        failures,
        format!("C6 gauge {c6_delta}, {} median graphs at 0, slowest {:.2?}, {failures} failures", graphs.len(), slowest),
    )
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut failures = 0;
    let mut instances = 0;
    let mut runs = 0;
    // family size -> (largest d(c, Q′), largest r′)
    let mut maxima: BTreeMap<usize, (u32, Q)> = BTreeMap::new();
    let mut attempt = 0;
    while instances < 320 {
        attempt += 1;
        let graph = match attempt % 3 {
            0 => random_tree(rng.gen_range(6..=40), &mut rng),
            1 => random_cactus(rng.gen_range(4..=12), rng.gen_range(1..=4), &mut rng),
            _ => king_grid(rng.gen_range(2..=5), rng.gen_range(2..=6)),
        };
        let hg = if attempt % 3 == 0 {
            HyperbolicGraph::with_constant(&graph, q(1)).unwrap()
        } else {
            let measured = HyperbolicGraph::measured(&graph, q(0)).unwrap();
            let e = if measured.e() < q(1) { q(1) } else { measured.e() };
            HyperbolicGraph::with_constant(&graph, e).unwrap()
        };
        let r = q(rng.gen_range(1..=3));
        let size = rng.gen_range(2..=10);
        let family = random_close_family(&hg, size, r, &mut rng);
        if family.len() < 2 {
            continue;
        }
        instances += 1;
        let ys: Vec<usize> = if hg.n() <= 30 { (0..hg.n()).collect() } else { vec![rng.gen_range(0..hg.n())] };
        for y in ys {
            runs += 1;
            match cdv_point(&hg, &family, y, r) {
                Ok(res) => {
                    let d = hg.distances();
                    let worst = family.iter().map(|s| d.to_set(res.c, s)).max().unwrap();
                    if q(worst as i64) > res.bound || !res.holds {
                        failures += 1;
                    }
                    let entry = maxima.entry(family.len()).or_insert((0, q(0)));
                    entry.0 = entry.0.max(worst);
                    if res.rprime > entry.1 {
                        entry.1 = res.rprime;
                    }
                }
                Err(_) => failures += 1,
            }
        }
    }
    let mut detail = format!("{instances} families, {runs} centers, {failures} failures; max d(c, Q′) / r′ by size:");
    for (size, (worst, rp)) in &maxima {
        let _ = write!(detail, " {size}:{worst}/{rp}");
    }
    Outcome::new(failures, detail)
}

fn criterion_12() -> Outcome {
    let mut failures = 0;
    let mut slowest = Duration::ZERO;
    for n in 12..=48usize {
        let start = Instant::now();
        let m = FiniteMetric::from_graph(&Graph::cycle(n)).unwrap();
        let params = QiParams::new(q(1), q(1)).unwrap();
        let cm = CircleMap::integer(&(0..n).collect::<Vec<_>>(), params);
        let Ok(rep) = witness_center(&m, &cm, q(1)) else {
            failures += 1;
            continue;
        };
        slowest = slowest.max(start.elapsed());
        let len = q(n as i64);
        let lower = len / q(4) - q(2);
        let upper = len / q(4) + q(1);
        let sandwich = (0..n).all(|x| lower <= rep.f[x] && rep.f[x] <= upper);
        let ball = (0..n).filter(|&y| m.d(rep.center, y) <= q(5)).count();
        let bound = (n / 14) as u64;
        let centered = (0..n).all(|x| rep.f[rep.center] <= rep.f[x]);
        let ok = rep.holds
            && sandwich
            && rep.n_bound == bound
            && ball == rep.ball_size
            && ball as u64 >= bound
            && centered
            && is_minimal_oracle(&m, &rep.f);
        if !ok {
            failures += 1;
        }
    }
    if slowest > Duration::from_secs(120) {
        failures += 1;
    }
    Outcome::new(failures, format!("n = 12..=48, slowest {slowest:.2?}, {failures} failures"))
}

fn main() {
    let corpus = median_corpus(220, 24, 1);
    let titles = [
        "median oracle equivalence",
        "iterated median hull",
        "l-infinity duality",
        "sigma equals l-infinity at K = 0",
        "ball convexity",
        "gluing",
        "chain extraction",
        "injective hull",
        "descent chains",
        "coarse Helly gauge",
        "CDV coarse Helly point",
        "shortcut witness",
    ];
    let corpus = &corpus;
    let jobs: Vec<Box<dyn Fn() -> Outcome + '_>> = vec![
        Box::new(move || criterion_1(corpus)),
        Box::new(move || criterion_2(corpus)),
        Box::new(move || criterion_3(corpus)),
        Box::new(criterion_4),
        Box::new(criterion_5),
        Box::new(move || criterion_6(corpus)),
        Box::new(criterion_7),
        Box::new(criterion_8),
        Box::new(criterion_9),
        Box::new(criterion_10),
        Box::new(criterion_11),
        Box::new(criterion_12),
    ];
    // ACCEPTANCE_ONLY=3,4 runs a subset.
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut all = true;
    for (i, (job, title)) in jobs.iter().zip(titles).enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let start = Instant::now();
        let out = job();
        all &= out.pass;
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{verdict}] {title}: {} ({:.2?})", i + 1, out.detail, start.elapsed());
    }
    if !all {
        std::process::exit(1);
    }
}
