//! Benchmark grid: algorithms by instances by stretch factors, one CSV row per run.
//!
//! A configuration is a TOML document; every key is optional:
//!
//! ```toml
//! algorithms = ["bucketing", "wspd-greedy"]   # original, wspd-greedy, bucketing, test
//! sizes = [1000, 2000]
//! seeds = [0, 1, 2]
//! distributions = ["uniform"]                 # uniform, clustered, normal
//! t = [2.0]
//! datasets = ["pcb3038.tsp"]                  # TSPLIB or point files
//! verification_cap = 2000
//! lambda_factor = 1.1                         # or: lambda = 5.0
//! svg_dir = "svg"
//! parallel = false
//! ```

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use spanner_core::{
    brute_force_test, greedy_bucketing, greedy_original, test_spanner, wspd_greedy, GreedyConfig, PhaseReport,
    PointSet, SpannerGraph, StretchFactor,
};

use crate::error::{CliError, Result};
use crate::generate::{generate, Distribution, GeneratorSpec, RNG_NAME};
use crate::io::{parse_points, read_text, write_text};
use crate::mem;
use crate::svg::{render_svg, SvgOptions};
use crate::tsplib::parse_tsplib;

pub const CSV_HEADER: [&str; 17] = [
    "schema",
    "algo",
    "n",
    "t",
    "seed",
    "dataset",
    "edges",
    "max_edge",
    "time_ms",
    "mem_bytes",
    "pairs_total",
    "pairs_skipped",
    "pairs_discounted",
    "points_discounted_frac",
    "phase1_ms",
    "phase2_ms",
    "phase3_ms",
];

/// Value of the `schema` column: format version and point generator.
pub fn schema_tag() -> String {
    format!("1+{RNG_NAME}")
}

/// Factor on the empirical threshold used by the tester when none is given.
pub const TEST_LAMBDA_FACTOR: f64 = GreedyConfig::PARANOID_LAMBDA_FACTOR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Algorithm {
    Original,
    WspdGreedy,
    Bucketing,
    /// Times the tester on the bucketing output.
    Test,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Original => "original",
            Algorithm::WspdGreedy => "wspd-greedy",
            Algorithm::Bucketing => "bucketing",
            Algorithm::Test => "test",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Algorithm::Original),
            "wspd-greedy" => Ok(Algorithm::WspdGreedy),
            "bucketing" => Ok(Algorithm::Bucketing),
            "test" => Ok(Algorithm::Test),
            other => Err(CliError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// How the short-edge threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LambdaChoice {
    #[default]
    Default,
    Factor(f64),
    Absolute(f64),
}

impl LambdaChoice {
    pub fn config(self, t: StretchFactor) -> GreedyConfig {
        match self {
            LambdaChoice::Default => GreedyConfig::new(t),
            LambdaChoice::Factor(f) => GreedyConfig::new(t).with_lambda_factor(f),
            LambdaChoice::Absolute(l) => GreedyConfig::new(t).with_lambda(l),
        }
    }

    /// Threshold for the tester; the default is the larger preset.
    pub fn test_lambda(self, points: &PointSet, t: StretchFactor) -> Result<f64> {
        let cfg = match self {
            LambdaChoice::Default => GreedyConfig::new(t).with_lambda_factor(TEST_LAMBDA_FACTOR),
            other => other.config(t),
        };
        Ok(cfg.effective_lambda(points)?)
    }
}

/// Runs one construction algorithm. `Algorithm::Test` is not a construction.
pub fn construct(
    algo: Algorithm,
    points: &PointSet,
    t: StretchFactor,
    lambda: LambdaChoice,
) -> Result<(SpannerGraph, Option<PhaseReport>)> {
    match algo {
        Algorithm::Original => Ok((greedy_original(points, t), None)),
        Algorithm::WspdGreedy => Ok((wspd_greedy(points, t, t.one_edge_separation())?, None)),
        Algorithm::Bucketing => {
            let (g, r) = greedy_bucketing(points, &lambda.config(t))?;
            Ok((g, Some(r)))
        }
        Algorithm::Test => Err(CliError::UnknownAlgorithm("test is not a construction".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub schema: String,
    pub algo: String,
    pub n: usize,
    pub t: f64,
    pub seed: Option<u64>,
    pub dataset: Option<String>,
    pub edges: usize,
    pub max_edge: f64,
    pub time_ms: f64,
    pub mem_bytes: Option<u64>,
    pub pairs_total: Option<usize>,
    pub pairs_skipped: Option<usize>,
    pub pairs_discounted: Option<usize>,
    pub points_discounted_frac: Option<f64>,
    pub phase1_ms: Option<f64>,
    pub phase2_ms: Option<f64>,
    pub phase3_ms: Option<f64>,
}

impl BenchRecord {
    fn new(algo: Algorithm, source: &Source, n: usize, t: f64, g: &SpannerGraph, time_ms: f64) -> Self {
        BenchRecord {
            schema: schema_tag(),
            algo: algo.name().to_string(),
            n,
            t,
            seed: source.seed(),
            dataset: Some(source.dataset()),
            edges: g.edge_count(),
            max_edge: g.max_edge_length(),
            time_ms,
            mem_bytes: None,
            pairs_total: None,
            pairs_skipped: None,
            pairs_discounted: None,
            points_discounted_frac: None,
            phase1_ms: None,
            phase2_ms: None,
            phase3_ms: None,
        }
    }

    fn with_report(mut self, r: &PhaseReport) -> Self {
        self.pairs_total = Some(r.pairs_total);
        self.pairs_skipped = Some(r.pairs_skipped_phase1);
        self.pairs_discounted = Some(r.pairs_discounted);
        self.points_discounted_frac = Some(r.points_discounted_fraction);
        self.phase1_ms = Some(r.phase1_ms);
        self.phase2_ms = Some(r.phase2_ms);
        self.phase3_ms = Some(r.phase3_ms);
        self
    }
}

/// Where the points of a cell come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Generated(GeneratorSpec),
    Dataset(PathBuf),
}

impl Source {
    fn seed(&self) -> Option<u64> {
        match self {
            Source::Generated(s) => Some(s.seed),
            Source::Dataset(_) => None,
        }
    }

    /// Distribution name for generated points, file stem for datasets.
    fn dataset(&self) -> String {
        match self {
            Source::Generated(s) => s.distribution.name().to_string(),
            Source::Dataset(p) => p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into()),
        }
    }

    fn label(&self) -> String {
        match self {
            Source::Generated(s) => format!("{}-n{}-s{}", s.distribution, s.n, s.seed),
            Source::Dataset(_) => self.dataset(),
        }
    }

    pub fn load(&self) -> Result<PointSet> {
        match self {
            Source::Generated(s) => Ok(generate(s)),
            Source::Dataset(p) => load_dataset(p),
        }
    }
}

/// A TSPLIB file if it has a coordinate section, a point file otherwise.
pub fn load_dataset(path: &Path) -> Result<PointSet> {
    let text = read_text(path)?;
    if text.contains("NODE_COORD_SECTION") {
        Ok(parse_tsplib(&text)?.points)
    } else {
        parse_points(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub algorithms: Vec<String>,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub distributions: Vec<Distribution>,
    pub t: Vec<f64>,
    pub datasets: Vec<PathBuf>,
    /// Outputs on at most this many points are checked with the all-pairs test.
    pub verification_cap: usize,
    pub lambda_factor: Option<f64>,
    pub lambda: Option<f64>,
    pub svg_dir: Option<PathBuf>,
    /// Run cells on several threads. Timings stay per cell; memory is not sampled.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            algorithms: Vec::new(),
            sizes: Vec::new(),
            seeds: vec![0],
            distributions: vec![Distribution::Uniform],
            t: vec![2.0],
            datasets: Vec::new(),
            verification_cap: 2000,
            lambda_factor: None,
            lambda: None,
            svg_dir: None,
            parallel: false,
        }
    }
}

impl BenchConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&read_text(path)?)
    }

    fn lambda_choice(&self) -> Result<LambdaChoice> {
        match (self.lambda_factor, self.lambda) {
            (Some(_), Some(_)) => Err(CliError::Config("set at most one of lambda_factor and lambda".into())),
            (Some(f), None) => Ok(LambdaChoice::Factor(f)),
            (None, Some(l)) => Ok(LambdaChoice::Absolute(l)),
            (None, None) => Ok(LambdaChoice::Default),
        }
    }

    /// Every cell of the grid, instance-major so that rows of one instance stay together.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let algos = self.algorithms.iter().map(|a| a.parse()).collect::<Result<Vec<Algorithm>>>()?;
        let ts = self.t.iter().map(|&t| StretchFactor::new(t)).collect::<spanner_core::Result<Vec<_>>>()?;
        let mut sources = Vec::new();
        for &d in &self.distributions {
            for &n in &self.sizes {
                for &seed in &self.seeds {
                    sources.push(Source::Generated(GeneratorSpec::new(d, n, seed)));
                }
            }
        }
        sources.extend(self.datasets.iter().cloned().map(Source::Dataset));
        let mut cells = Vec::new();
        for source in &sources {
            for &t in &ts {
                for &algo in &algos {
                    cells.push(Cell { algo, t, source: source.clone() });
                }
            }
        }
        Ok(cells)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub algo: Algorithm,
    pub t: StretchFactor,
    pub source: Source,
}

/// Options of a single cell run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOptions<'a> {
    pub lambda: LambdaChoice,
    pub verification_cap: usize,
    pub sample_memory: bool,
    pub svg_dir: Option<&'a Path>,
}

/// Runs one cell. The timed region covers only the algorithm; verification
/// and rendering come afterwards.
pub fn run_cell(cell: &Cell, points: &PointSet, opts: &CellOptions<'_>) -> Result<BenchRecord> {
    let n = points.len();
    let t = cell.t;
    let fail = |verdict: String| CliError::Verification {
        algo: cell.algo.name().to_string(),
        instance: cell.source.label(),
        verdict,
    };
    if opts.sample_memory {
        mem::reset_peak();
    }
    let (record, g) = match cell.algo {
        Algorithm::Test => {
            let (g, _) = construct(Algorithm::Bucketing, points, t, opts.lambda)?;
            let start = Instant::now();
            let lambda = if n > 0 { opts.lambda.test_lambda(points, t)? } else { 1.0 };
            let verdict = test_spanner(points, &g, t, lambda)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if n <= opts.verification_cap {
                let brute = brute_force_test(points, &g, t)?;
                if brute.is_spanner != verdict.is_spanner {
                    return Err(fail(format!("tester says {verdict}, all-pairs check says {brute}")));
                }
            }
            (BenchRecord::new(cell.algo, &cell.source, n, t.get(), &g, ms), g)
        }
        algo => {
            let start = Instant::now();
            let (g, report) = construct(algo, points, t, opts.lambda)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            if n <= opts.verification_cap {
                let verdict = brute_force_test(points, &g, t)?;
                if !verdict.is_spanner {
                    return Err(fail(verdict.to_string()));
                }
            }
            let mut record = BenchRecord::new(algo, &cell.source, n, t.get(), &g, ms);
            if let Some(r) = report {
                record = record.with_report(&r);
            }
            (record, g)
        }
    };
    let mut record = record;
    if opts.sample_memory {
        record.mem_bytes = mem::peak_rss_bytes();
    }
    if let Some(dir) = opts.svg_dir {
        let name = format!("{}-{}-t{}.svg", cell.algo, cell.source.label(), t.get());
        write_text(&dir.join(name), &render_svg(points, Some(&g), &SvgOptions::default()))?;
    }
    Ok(record)
}

/// Runs every cell of `config` and returns the rows in cell order.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    let cells = config.cells()?;
    let opts = CellOptions {
        lambda: config.lambda_choice()?,
        verification_cap: config.verification_cap,
        sample_memory: !config.parallel,
        svg_dir: config.svg_dir.as_deref(),
    };
    if let Some(dir) = opts.svg_dir {
        std::fs::create_dir_all(dir).map_err(crate::error::io_err(dir))?;
    }
    if !config.parallel {
        let mut out = Vec::with_capacity(cells.len());
        let mut cached: Option<(Source, PointSet)> = None;
        for cell in &cells {
            if cached.as_ref().is_none_or(|(s, _)| *s != cell.source) {
                cached = Some((cell.source.clone(), cell.source.load()?));
            }
            out.push(run_cell(cell, &cached.as_ref().unwrap().1, &opts)?);
        }
        return Ok(out);
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<BenchRecord>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let r = cells[i].source.load().and_then(|ps| run_cell(&cells[i], &ps, &opts));
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_inner().unwrap().into_iter().map(|r| r.expect("every cell ran")).collect()
}

/// Header plus one row per record.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: f64) -> StretchFactor {
        StretchFactor::new(v).unwrap()
    }

    #[test]
    fn empty_config_gives_header_only() {
        let cfg = BenchConfig::from_toml("").unwrap();
        let rows = run_bench(&cfg).unwrap();
        assert!(rows.is_empty());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            BenchConfig::from_toml("algorithms = [\"fast\"]\nsizes = [10]").unwrap().cells(),
            Err(CliError::UnknownAlgorithm(_))
        ));
        assert!(matches!(BenchConfig::from_toml("colour = 3"), Err(CliError::Config(_))));
        let both = BenchConfig::from_toml("lambda = 2.0\nlambda_factor = 1.0").unwrap();
        assert!(both.lambda_choice().is_err());
        let cfg = BenchConfig::from_toml("algorithms = [\"bucketing\"]\ndatasets = [\"/nonexistent/x.tsp\"]").unwrap();
        assert!(matches!(run_bench(&cfg), Err(CliError::Io { .. })));
    }

    #[test]
    fn row_layout() {
        let ps = generate(&GeneratorSpec::new(Distribution::Uniform, 50, 1));
        let cell = Cell { algo: Algorithm::Bucketing, t: t(2.0), source: Source::Generated(GeneratorSpec::new(Distribution::Uniform, 50, 1)) };
        let opts = CellOptions { lambda: LambdaChoice::Default, verification_cap: 2000, sample_memory: true, svg_dir: None };
        let r = run_cell(&cell, &ps, &opts).unwrap();
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), CSV_HEADER.len());
        assert_eq!(row[0], schema_tag());
        assert_eq!(row[1], "bucketing");
        assert_eq!(row[2], "50");
        assert_eq!(row[4], "1");
        assert_eq!(row[5], "uniform");
        assert_eq!(row[6], r.edges.to_string());
        assert!(!row[13].is_empty());
    }

    #[test]
    fn test_cells_and_parallel_mode() {
        let cfg = BenchConfig::from_toml(
            "algorithms = [\"test\", \"original\"]\nsizes = [60]\nseeds = [3, 4]\nt = [1.5]\nparallel = true",
        )
        .unwrap();
        let rows = run_bench(&cfg).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].algo, "test");
        assert_eq!(rows[0].edges, rows[1].edges);
        assert!(rows.iter().all(|r| r.mem_bytes.is_none()));
    }

    #[test]
    fn algorithm_names() {
        for a in [Algorithm::Original, Algorithm::WspdGreedy, Algorithm::Bucketing, Algorithm::Test] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
    }
}
