use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helly_core::contraction::{
    extract_chain, glue_constant, glue_contractions, sigma, GlueOutcome, GlueParams,
};
use helly_core::hull::{
    check_dom_distance, coarse_helly_gauge, descent_chain, is_minimal, minimize_radius, GaugeMode, HullError,
};
use helly_core::hyperbolic::{cdv_point, packing_experiment};
use helly_core::median::{convex_hull_bruteforce, iterated_median_hull, linf_distance, MedianError};
use helly_core::metric::{four_point_delta, weak_rough_constant, MetricError};
use helly_core::rational::{abs, max_q, parse_rational};
use helly_core::shortcut::{search_circles, shortcut_profile, verify_circle, witness_center, ShortcutError};
use helly_core::{
    CoarseMedianData, FiniteMetric, Graph, HullPoint, HyperbolicGraph, MedianGraph, QiParams, Q,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use crate::io::{
    parse_csv_matrix, parse_edge_list, q_str, q_strs, write_csv_matrix, CirclePayload, DescentPayload,
    FamilyPayload, GluePayload, SetPayload, ValuesPayload,
};
use crate::report::{InputDigest, Inputs, RunReport, Timing, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "helly", version, about = "Exact experiments on median, injective and hyperbolic metric spaces")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Edge list, one `u v` pair per line, 0-indexed.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Distance matrix of rationals (`p/q` or integers).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Typed JSON payload for the subcommand.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for exhaustive kernels.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    mode: Option<Mode>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Integer,
    Real,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the metric axioms and measure four-point and rough-geodesic constants.
    MetricValidate,
    /// Recognize a median graph and export its hyperplanes.
    MedianRecognize,
    /// Iterate medians from a vertex set (`{"set": [..]}`) to its convex hull.
    HullIterate,
    /// All-pairs ℓ∞ distance of a median graph.
    Linf,
    /// All-pairs σ at contraction constant K.
    Sigma {
        #[arg(long, default_value = "0", value_parser = rational_arg)]
        k: Q,
        /// Also write the table as CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Glue two contractions.
    Glue,
    /// Approximate a quasi-median map (`{"values": [..], "k": K′}`) by a chain contraction.
    ExtractChain,
    /// Minimize a radius function (`{"values": [..]}`) to a point of the injective hull.
    HullMinimize,
    /// Exhaustive coarse Helly gauge; `--mode integer|real`.
    HullGauge,
    /// Descent chain from a minimal f towards x.
    Descent,
    /// Coarse Helly point of a pairwise-close family of vertex sets.
    Cdv,
    /// Ball-size bound for a disjoint pairwise-close family.
    Packing,
    /// Check a circle map as a quasi-isometric embedding.
    ShortcutVerify,
    /// Search for the longest quasi-isometric circle.
    ShortcutSearch {
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        k: Q,
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        c: Q,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        /// Search nodes per circle length.
        #[arg(long, default_value_t = 2_000_000)]
        budget: u64,
        /// Comma separated K values; adds a profile of longest circle per K.
        #[arg(long, value_delimiter = ',', value_parser = rational_arg)]
        k_grid: Vec<Q>,
        /// Write the profile as CSV.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Ball-size witness for a circle; defaults to the identity circle on all points.
    Witness {
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        k: Q,
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        c: Q,
        #[arg(long, default_value = "1", value_parser = rational_arg)]
        delta: Q,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::MetricValidate => "metric-validate",
            Command::MedianRecognize => "median-recognize",
            Command::HullIterate => "hull-iterate",
            Command::Linf => "linf",
            Command::Sigma { .. } => "sigma",
            Command::Glue => "glue",
            Command::ExtractChain => "extract-chain",
            Command::HullMinimize => "hull-minimize",
            Command::HullGauge => "hull-gauge",
            Command::Descent => "descent",
            Command::Cdv => "cdv",
            Command::Packing => "packing",
            Command::ShortcutVerify => "shortcut-verify",
            Command::ShortcutSearch { .. } => "shortcut-search",
            Command::Witness { .. } => "witness",
        }
    }
}

fn rational_arg(s: &str) -> Result<Q, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Bad input: unreadable files, parse errors, unmet hypotheses.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Step = Result<(), InputError>;

struct Run<'a> {
    common: &'a Common,
    digest: InputDigest,
    files: Map<String, Value>,
    options: Map<String, Value>,
    constants: Map<String, Value>,
    results: Map<String, Value>,
    witnesses: Vec<Value>,
}

impl<'a> Run<'a> {
    fn new(common: &'a Common) -> Self {
        Run {
            common,
            digest: InputDigest::default(),
            files: Map::new(),
            options: Map::new(),
            constants: Map::new(),
            results: Map::new(),
            witnesses: Vec::new(),
        }
    }

    fn read(&mut self, label: &str, path: &Path) -> Result<String, InputError> {
        let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        self.digest.add(label, text.as_bytes());
        self.files.insert(label.into(), json!(path.display().to_string()));
        Ok(text)
    }

    fn option(&mut self, key: &str, value: Value) {
        self.options.insert(key.into(), value);
    }

    fn result(&mut self, key: &str, value: Value) {
        self.results.insert(key.into(), value);
    }

    fn constant(&mut self, key: &str, value: Value) {
        self.constants.insert(key.into(), value);
    }

    fn violated(&mut self, witness: Value) {
        self.witnesses.push(witness);
    }

    fn graph(&mut self) -> Result<Graph, InputError> {
        let path = self.common.graph.clone().ok_or_else(|| InputError("--graph is required".into()))?;
        let text = self.read("graph", &path)?;
        parse_edge_list(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn median_graph(&mut self) -> Result<MedianGraph, InputError> {
        Ok(MedianGraph::recognize(&self.graph()?)?)
    }

    fn csv_rows(&mut self) -> Result<Vec<Vec<Q>>, InputError> {
        let path = self.common.csv.clone().expect("checked by caller");
        let text = self.read("csv", &path)?;
        parse_csv_matrix(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    /// The metric from `--csv`, or the graph metric of `--graph`.
    fn metric(&mut self) -> Result<FiniteMetric, InputError> {
        match (&self.common.csv, &self.common.graph) {
            (Some(_), None) => Ok(FiniteMetric::validate(&self.csv_rows()?)?),
            (None, Some(_)) => Ok(FiniteMetric::from_graph(&self.graph()?)?),
            _ => Err(InputError("give exactly one of --csv or --graph".into())),
        }
    }

    /// Exact median data for a median graph, the centroid median otherwise.
    fn coarse_median(&mut self) -> Result<CoarseMedianData, InputError> {
        let cm = match (&self.common.csv, &self.common.graph) {
            (None, Some(_)) => {
                let g = self.graph()?;
                match MedianGraph::recognize(&g) {
                    Ok(mg) => CoarseMedianData::from_median_graph(&mg),
                    Err(MedianError::NotMedian(..)) => CoarseMedianData::centroid(FiniteMetric::from_graph(&g)?),
                    Err(e) => return Err(e.into()),
                }
            }
            _ => CoarseMedianData::centroid(self.metric()?),
        };
        let kind = if cm.is_exact_median() { "median graph" } else { "centroid" };
        self.constant("median", json!(kind));
        Ok(cm)
    }

    fn payload<T: DeserializeOwned>(&mut self) -> Result<T, InputError> {
        let path = self.common.json.clone().ok_or_else(|| InputError("--json is required".into()))?;
        let text = self.read("json", &path)?;
        serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
    }

    fn optional_payload<T: DeserializeOwned>(&mut self) -> Result<Option<T>, InputError> {
        if self.common.json.is_none() {
            return Ok(None);
        }
        self.payload().map(Some)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, InputError> {
        Ok(rayon::ThreadPoolBuilder::new().num_threads(self.common.jobs.unwrap_or(1).max(1)).build()?)
    }

    fn finish(mut self, command: &str, elapsed: f64) -> RunReport {
        self.options.insert("seed".into(), json!(self.common.seed));
        self.digest.add("command", command.as_bytes());
        self.digest.add("options", serde_json::to_string(&self.options).unwrap().as_bytes());
        self.options.remove("seed");
        let holds = self.witnesses.is_empty();
        RunReport {
            v: SCHEMA_VERSION,
            command: command.into(),
            inputs: Inputs {
                digest: self.digest.finish(),
                files: self.files,
                seed: self.common.seed,
                options: self.options,
            },
            constants: self.constants,
            results: self.results,
            witnesses: self.witnesses,
            holds,
            timing: Timing { elapsed_ms: elapsed },
        }
    }
}

/// Parses `argv` (program name first), runs the subcommand and writes the
/// report. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
            let written = match &cli.common.out {
                Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) if report.holds => EXIT_OK,
                Ok(()) => EXIT_VIOLATED,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

/// Runs the parsed command and builds its report without writing it.
fn execute(cli: &Cli) -> Result<RunReport, InputError> {
    let start = Instant::now();
    let mut run = Run::new(&cli.common);
    match &cli.command {
        Command::MetricValidate => metric_validate(&mut run)?,
        Command::MedianRecognize => median_recognize(&mut run)?,
        Command::HullIterate => hull_iterate(&mut run)?,
        Command::Linf => linf(&mut run)?,
        Command::Sigma { k, table } => sigma_cmd(&mut run, *k, table.as_deref())?,
        Command::Glue => glue(&mut run)?,
        Command::ExtractChain => extract(&mut run)?,
        Command::HullMinimize => hull_minimize(&mut run)?,
        Command::HullGauge => hull_gauge(&mut run)?,
        Command::Descent => descent(&mut run)?,
        Command::Cdv => cdv(&mut run)?,
        Command::Packing => packing(&mut run)?,
        Command::ShortcutVerify => shortcut_verify(&mut run)?,
        Command::ShortcutSearch { k, c, max_len, budget, k_grid, table } => {
            shortcut_search(&mut run, *k, *c, *max_len, *budget, k_grid, table.as_deref())?
        }
        Command::Witness { k, c, delta } => witness(&mut run, *k, *c, *delta)?,
    }
    Ok(run.finish(cli.command.name(), start.elapsed().as_secs_f64() * 1e3))
}

fn metric_validate(run: &mut Run) -> Step {
    let m = if run.common.csv.is_some() && run.common.graph.is_none() {
        match FiniteMetric::validate(&run.csv_rows()?) {
            Ok(m) => m,
            Err(e @ (MetricError::NotSquare { .. } | MetricError::Empty)) => return Err(e.into()),
            Err(e) => {
                run.result("metric", json!(false));
                run.violated(metric_witness(&e));
                return Ok(());
            }
        }
    } else {
        run.metric()?
    };
    run.result("metric", json!(true));
    run.result("n", json!(m.n()));
    run.result("diameter", json!(q_str(&m.diameter())));
    run.result("integer", json!(m.as_integer().is_some()));
    run.constant("four_point_delta", json!(q_str(&four_point_delta(&m))));
    run.constant("c_weak", json!(q_str(&weak_rough_constant(&m))));
    Ok(())
}

fn metric_witness(e: &MetricError) -> Value {
    let points = match *e {
        MetricError::AsymmetricEntry(a, b) | MetricError::NegativeEntry(a, b) | MetricError::ZeroDistance(a, b) => {
            vec![a, b]
        }
        MetricError::NonzeroDiagonal(a) => vec![a],
        MetricError::TriangleViolation(a, b, c) => vec![a, b, c],
        _ => vec![],
    };
    json!({ "error": e.to_string(), "points": points })
}

fn median_recognize(run: &mut Run) -> Step {
    let g = run.graph()?;
    match MedianGraph::recognize(&g) {
        Ok(mg) => {
            run.result("median", json!(true));
            run.result("n", json!(mg.n()));
            run.result("nu", json!(mg.nu()));
            let planes: Vec<Value> = mg
                .hyperplanes()
                .iter()
                .map(|h| json!({ "id": h.id, "edges": h.edges, "minus": h.minus, "plus": h.plus }))
                .collect();
            run.result("hyperplanes", json!(planes));
            let coords: Vec<String> = (0..mg.n())
                .map(|v| mg.coords(v).iter().map(|&b| if b { '1' } else { '0' }).collect())
                .collect();
            run.result("coords", json!(coords));
        }
        Err(MedianError::NotMedian(a, b, c)) => {
            run.result("median", json!(false));
            run.violated(json!({ "kind": "NotMedian", "triple": [a, b, c] }));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn hull_iterate(run: &mut Run) -> Step {
    let g = run.median_graph()?;
    let p: SetPayload = run.payload()?;
    let it = iterated_median_hull(&g, &p.set)?;
    run.constant("nu", json!(g.nu()));
    run.result("levels", json!(it.levels));
    run.result("step", json!(it.step));
    run.result("hull", json!(it.hull()));
    if !it.matches_bruteforce {
        let brute = convex_hull_bruteforce(&g, &p.set)?;
        run.violated(json!({ "kind": "HullMismatch", "iterated": it.hull(), "bruteforce": brute }));
    }
    if !it.within_bound {
        run.violated(json!({ "kind": "StepAboveBound", "step": it.step, "bound": g.nu().saturating_sub(1).max(1) }));
    }
    Ok(())
}

fn linf(run: &mut Run) -> Step {
    let g = run.median_graph()?;
    let n = g.n();
    let table: Vec<Vec<u32>> =
        run.pool()?.install(|| (0..n).into_par_iter().map(|x| (0..n).map(|y| linf_distance(&g, x, y)).collect()).collect());
    let nu = g.nu().max(1) as u32;
    run.constant("nu", json!(g.nu()));
    for x in 0..n {
        for y in x + 1..n {
            let (l, d) = (table[x][y], g.d1().get(x, y));
            if !(l <= d && d <= nu * l) {
                run.violated(json!({ "kind": "Sandwich", "pair": [x, y], "linf": l, "d": d }));
            }
        }
    }
    run.result("table", json!(table));
    Ok(())
}

fn sigma_cmd(run: &mut Run, k: Q, table_out: Option<&Path>) -> Step {
    run.option("k", json!(q_str(&k)));
    let cm = run.coarse_median()?;
    let n = cm.n();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let values = run.pool()?.install(|| {
        pairs.par_iter().map(|&(a, b)| sigma(&cm, a, b, k)).collect::<Result<Vec<_>, _>>()
    })?;
    let mut table = vec![vec![Q::from_integer(0); n]; n];
    for (&(a, b), v) in pairs.iter().zip(values) {
        table[a][b] = v;
        table[b][a] = v;
    }
    for a in 0..n {
        for b in 0..n {
            if table[a][b] > cm.d(a, b) + k {
                run.violated(json!({ "kind": "AboveDPlusK", "pair": [a, b], "sigma": q_str(&table[a][b]) }));
            }
            for c in 0..n {
                if table[a][c] > table[a][b] + table[b][c] {
                    run.violated(json!({ "kind": "Triangle", "points": [a, b, c] }));
                }
            }
        }
    }
    if cm.is_exact_median() && k == Q::from_integer(0) {
        if let Some(path) = &run.common.graph {
            let g = MedianGraph::recognize(&parse_edge_list(&fs::read_to_string(path)?)?)?;
            for (a, b) in pairs.iter().copied() {
                let l = linf_distance(&g, a, b);
                if table[a][b] != Q::from_integer(l as i64) {
                    run.violated(json!({ "kind": "NotLinf", "pair": [a, b], "sigma": q_str(&table[a][b]), "linf": l }));
                }
            }
        }
    }
    if let Some(path) = table_out {
        fs::write(path, write_csv_matrix(&table)).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    run.result("table", json!(table.iter().map(|r| q_strs(r)).collect::<Vec<_>>()));
    Ok(())
}

fn glue(run: &mut Run) -> Step {
    let mut cm = run.coarse_median()?;
    let p: GluePayload = run.payload()?;
    cm.measure_constants();
    let d = glue_constant(&cm, p.k);
    run.constant("h0", json!(q_str(&cm.h0())));
    run.constant("c_weak", json!(q_str(&cm.c_weak())));
    run.constant("D", json!(q_str(&d)));
    let params = GlueParams { a: p.a, b: p.b, r: p.r, s: p.s, t: p.t, e: p.e, k: p.k };
    match glue_contractions(&cm, &p.phi1, &p.phi2, params)? {
        GlueOutcome::Glued(res) => {
            let part = &res.partition;
            run.result("map", json!({ "values": q_strs(&res.map.values), "k": q_str(&res.map.k) }));
            run.result(
                "partition",
                json!({ "y01": part.y01, "y02": part.y02, "y": part.y, "z1": part.z1, "z2": part.z2 }),
            );
            run.result("gap", json!(q_str(&(res.map.values[p.b] - res.map.values[p.a]))));
            run.result("gap_bound", json!(q_str(&(p.r + p.s - Q::from_integer(2) * (p.t + d + p.e)))));
            for (x, y) in &res.report.lipschitz {
                run.violated(json!({ "kind": "NotCoarselyLipschitz", "pair": [x, y] }));
            }
            for (x, y, z) in &res.report.quasi_median {
                run.violated(json!({ "kind": "NotQuasiMedian", "triple": [x, y, z] }));
            }
            if !res.gap_bound_holds {
                run.violated(json!({ "kind": "GapBound", "a": p.a, "b": p.b }));
            }
        }
        GlueOutcome::HypothesisFailed { witness, .. } => {
            run.violated(json!({ "kind": "Overlap", "point": witness }));
        }
    }
    Ok(())
}

fn extract(run: &mut Run) -> Step {
    let g = run.median_graph()?;
    let p: ValuesPayload = run.payload()?;
    let kp = p.k.ok_or_else(|| InputError("payload needs `k`".into()))?;
    let ex = extract_chain(&g, &p.values, kp)?;
    run.constant("nu", json!(g.nu()));
    run.constant("scale", json!(q_str(&ex.scale)));
    run.result("chain", json!(ex.psi.chain));
    run.result("u", json!(ex.u));
    run.result("v", json!(ex.v));
    run.result("values", json!(ex.values));
    for x in 0..g.n() {
        let err = p.values[x] - ex.scale * Q::from_integer(ex.values[x]);
        if abs(err) > ex.scale {
            run.violated(json!({ "kind": "Approximation", "point": x, "error": q_str(&err) }));
        }
    }
    Ok(())
}

fn hull_minimize(run: &mut Run) -> Step {
    let m = run.metric()?;
    let p: ValuesPayload = run.payload()?;
    let g = minimize_radius(&m, &p.values)?;
    run.result("values", json!(q_strs(&g.values)));
    if !is_minimal(&m, &g.values) {
        run.violated(json!({ "kind": "NotMinimal" }));
    }
    if let Some(x) = (0..m.n()).find(|&x| g.values[x] > p.values[x]) {
        run.violated(json!({ "kind": "NotDominated", "point": x }));
    }
    for x in 0..m.n() {
        let dom = check_dom_distance(&m, &HullPoint::embed(&m, x), &p.values)?;
        if !dom.holds {
            run.violated(json!({ "kind": "DomDistance", "point": x, "left": q_str(&dom.left), "right": q_str(&dom.right) }));
        }
    }
    Ok(())
}

fn hull_gauge(run: &mut Run) -> Step {
    let m = run.metric()?;
    let mode = run.common.mode.unwrap_or(Mode::Integer);
    run.option("mode", json!(if mode == Mode::Integer { "integer" } else { "real" }));
    let gm = if mode == Mode::Integer { GaugeMode::Integer } else { GaugeMode::RealSup };
    let rep = coarse_helly_gauge(&m, gm)?;
    run.result("delta", json!(q_str(&rep.delta)));
    run.result("worst", json!(rep.worst));
    Ok(())
}

fn descent(run: &mut Run) -> Step {
    let m = run.metric()?;
    let p: DescentPayload = run.payload()?;
    if !is_minimal(&m, &p.f) {
        return Err(InputError("f is not a minimal radius function".into()));
    }
    match descent_chain(&m, &HullPoint { values: p.f }, p.x, p.delta) {
        Ok(chain) => {
            run.result("m_x", json!(chain.m_x));
            run.result("steps", json!(chain.steps.iter().map(|s| q_strs(&s.values)).collect::<Vec<_>>()));
        }
        Err(HullError::PropertyFailed { property, step }) => {
            run.violated(json!({ "kind": "PropertyFailed", "property": property, "step": step }));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn hyperbolic(run: &mut Run, e: Option<Q>) -> Result<HyperbolicGraph, InputError> {
    let g = run.graph()?;
    let measured = HyperbolicGraph::measured(&g, Q::from_integer(0))?.measured_delta();
    let e = e.unwrap_or_else(|| max_q(Q::from_integer(1), measured));
    run.constant("four_point_delta", json!(q_str(&measured)));
    run.constant("E", json!(q_str(&e)));
    Ok(HyperbolicGraph::with_constant(&g, e)?)
}

fn cdv_json(c: &helly_core::CdvResult) -> Value {
    json!({
        "c": c.c, "far_set": c.far_set, "z": c.z, "k0": c.k0, "rprime": q_str(&c.rprime),
        "rounded": c.rounded, "bound": q_str(&c.bound), "distances": c.distances, "holds": c.holds,
    })
}

fn cdv(run: &mut Run) -> Step {
    let p: FamilyPayload = run.payload()?;
    let hg = hyperbolic(run, p.e)?;
    let ys: Vec<usize> = match p.y {
        Some(y) => vec![y],
        None => (0..hg.n()).collect(),
    };
    let mut out = Vec::new();
    for y in ys {
        let res = cdv_point(&hg, &p.family, y, p.r)?;
        if !res.holds {
            run.violated(json!({ "kind": "FarFromSet", "y": y, "c": res.c, "bound": q_str(&res.bound), "distances": res.distances }));
        }
        let mut v = cdv_json(&res);
        v.as_object_mut().unwrap().insert("y".into(), json!(y));
        out.push(v);
    }
    run.result("centers", json!(out));
    Ok(())
}

fn packing(run: &mut Run) -> Step {
    let p: FamilyPayload = run.payload()?;
    let hg = hyperbolic(run, p.e)?;
    let rep = packing_experiment(&hg, &p.family, p.r)?;
    run.result("cdv", cdv_json(&rep.cdv));
    run.result("radius", json!(rep.radius));
    run.result("ball_size", json!(rep.ball_size));
    run.result("family_size", json!(rep.family_size));
    run.result("disjoint", json!(rep.disjoint));
    if !rep.holds {
        run.violated(json!({ "kind": "Packing", "ball_size": rep.ball_size, "family_size": rep.family_size }));
    }
    Ok(())
}

fn shortcut_verify(run: &mut Run) -> Step {
    let m = run.metric()?;
    let p: CirclePayload = run.payload()?;
    let cm = p.to_map().map_err(InputError)?;
    let check = verify_circle(&m, &cm).map_err(shortcut_input)?;
    run.constant("K", json!(q_str(&cm.params.k)));
    run.constant("C", json!(q_str(&cm.params.c)));
    run.result("length", json!(q_str(&cm.length)));
    if let Some((a, b, excess)) = check.worst {
        run.violated(json!({ "kind": "NotQuasiIsometric", "samples": [a, b], "excess": q_str(&excess) }));
    }
    Ok(())
}

fn shortcut_input(e: ShortcutError) -> InputError {
    InputError(e.to_string())
}

#[allow(clippy::too_many_arguments)]
fn shortcut_search(
    run: &mut Run,
    k: Q,
    c: Q,
    max_len: usize,
    budget: u64,
    k_grid: &[Q],
    table_out: Option<&Path>,
) -> Step {
    let m = run.metric()?;
    let p = QiParams::new(k, c).ok_or_else(|| InputError("need K ≥ 1 and C ≥ 0".into()))?;
    run.option("k", json!(q_str(&k)));
    run.option("c", json!(q_str(&c)));
    run.option("max_len", json!(max_len));
    run.option("budget", json!(budget));
    let mut rng = ChaCha8Rng::seed_from_u64(run.common.seed);
    let found = search_circles(&m, p, max_len, budget, &mut rng);
    run.result("length", json!(found.best.as_ref().map(|b| q_str(&b.length))));
    run.result("circle", json!(found.best.as_ref().map(CirclePayload::from_map)));
    run.result("exhaustive", json!(found.exhaustive));
    run.result("nodes", json!(found.nodes));
    if !k_grid.is_empty() {
        if k_grid.iter().any(|k| QiParams::new(*k, c).is_none()) {
            return Err(InputError("every K in --k-grid must be ≥ 1".into()));
        }
        run.option("k_grid", json!(q_strs(k_grid)));
        let profile = shortcut_profile(&m, k_grid, c, max_len, budget, &mut rng);
        if let Some(path) = table_out {
            let mut text = String::from("k,length\n");
            for (k, len) in &profile {
                text += &format!("{},{len}\n", q_str(k));
            }
            fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
        }
        run.result("profile", json!(profile.iter().map(|(k, l)| json!([q_str(k), l])).collect::<Vec<_>>()));
    }
    Ok(())
}

fn witness(run: &mut Run, k: Q, c: Q, delta: Q) -> Step {
    let m = run.metric()?;
    let payload: Option<CirclePayload> = run.optional_payload()?;
    let (cm, delta) = match payload {
        Some(p) => (p.to_map().map_err(InputError)?, p.delta.unwrap_or(delta)),
        None => {
            let p = QiParams::new(k, c).ok_or_else(|| InputError("need K ≥ 1 and C ≥ 0".into()))?;
            run.option("k", json!(q_str(&k)));
            run.option("c", json!(q_str(&c)));
            let targets: Vec<usize> = (0..m.n()).collect();
            (helly_core::CircleMap::integer(&targets, p), delta)
        }
    };
    run.option("delta", json!(q_str(&delta)));
    let rep = witness_center(&m, &cm, delta).map_err(shortcut_input)?;
    run.constant("K", json!(q_str(&cm.params.k)));
    run.constant("C", json!(q_str(&cm.params.c)));
    run.constant("delta", json!(q_str(&rep.delta)));
    run.result("center", json!(rep.center));
    run.result("radius", json!(q_str(&rep.radius)));
    run.result("ball_size", json!(rep.ball_size));
    run.result("n_bound", json!(rep.n_bound));
    run.result("f", json!(q_strs(&rep.f)));
    run.result("lower", json!(q_str(&rep.lower)));
    run.result("upper", json!(q_str(&rep.upper)));
    if (rep.ball_size as u64) < rep.n_bound {
        run.violated(json!({ "kind": "BallTooSmall", "ball_size": rep.ball_size, "n_bound": rep.n_bound }));
    }
    for &x in &rep.sandwich_failures {
        run.violated(json!({ "kind": "Sandwich", "point": x, "f": q_str(&rep.f[x]) }));
    }
    if !rep.holds && run.witnesses.is_empty() {
        run.violated(json!({ "kind": "WitnessFailed" }));
    }
    Ok(())
}
