use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use spanner_cli::io::{read_graph, read_points, read_text, write_edges, write_points, write_text};
use spanner_cli::{
    construct, generate, parse_tsplib, render_svg, run_bench, write_csv, Algorithm, BenchConfig, BenchRecord,
    CliError, Distribution, GeneratorSpec, LambdaChoice, Result, SvgOptions, CSV_HEADER,
};
use spanner_core::{test_spanner, StretchFactor};

#[derive(Parser)]
#[command(name = "spanner", version, about = "Greedy geometric t-spanners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random point set.
    Generate {
        #[arg(long, value_enum)]
        dist: Distribution,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the greedy spanner of a point file.
    Build {
        #[arg(long, value_enum, default_value_t = Algorithm::Bucketing)]
        algo: Algorithm,
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        lambda: LambdaArgs,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out_edges: PathBuf,
        /// Append-free CSV with a single benchmark row.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check whether an edge file is a t-spanner. Exits with 1 if it is not.
    Test {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        edges: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Draw points and edges as SVG.
    Render {
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        edges: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
    },
    /// Run a benchmark grid described by a TOML file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a TSPLIB EUC_2D instance to a point file.
    TsplibImport {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct LambdaArgs {
    /// Multiplier on the empirical short-edge threshold.
    #[arg(long)]
    lambda_factor: Option<f64>,
    /// Absolute short-edge threshold.
    #[arg(long)]
    lambda: Option<f64>,
}

impl LambdaArgs {
    fn choice(&self) -> LambdaChoice {
        match (self.lambda_factor, self.lambda) {
            (Some(f), _) => LambdaChoice::Factor(f),
            (None, Some(l)) => LambdaChoice::Absolute(l),
            (None, None) => LambdaChoice::Default,
        }
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io { path: path.clone(), source })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { dist, n, seed, out } => {
            let ps = generate(&GeneratorSpec::new(dist, n, seed));
            write_points(&out, &ps)?;
        }
        Command::Build { algo, t, lambda, points, out_edges, report } => {
            if algo == Algorithm::Test {
                return Err(CliError::UnknownAlgorithm("test is not a construction".into()));
            }
            let t = StretchFactor::new(t)?;
            let ps = read_points(&points)?;
            let start = Instant::now();
            let (g, phases) = construct(algo, &ps, t, lambda.choice())?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            write_edges(&out_edges, &g)?;
            println!("edges={} max_edge={} time_ms={:.1}", g.edge_count(), g.max_edge_length(), ms);
            if let Some(r) = &phases {
                println!(
                    "lambda={} short_edges={} pairs_total={} pairs_skipped={} pairs_discounted={} phase3_pairs={} phase3_edges={}",
                    r.lambda, r.short_edges, r.pairs_total, r.pairs_skipped_phase1, r.pairs_discounted, r.phase3_pairs, r.phase3_edges
                );
            }
            if let Some(path) = report {
                let dataset = points.file_stem().map(|s| s.to_string_lossy().into_owned());
                let record = BenchRecord {
                    schema: spanner_cli::bench::schema_tag(),
                    algo: algo.name().into(),
                    n: ps.len(),
                    t: t.get(),
                    seed: None,
                    dataset,
                    edges: g.edge_count(),
                    max_edge: g.max_edge_length(),
                    time_ms: ms,
                    mem_bytes: spanner_cli::mem::peak_rss_bytes(),
                    pairs_total: phases.map(|r| r.pairs_total),
                    pairs_skipped: phases.map(|r| r.pairs_skipped_phase1),
                    pairs_discounted: phases.map(|r| r.pairs_discounted),
                    points_discounted_frac: phases.map(|r| r.points_discounted_fraction),
                    phase1_ms: phases.map(|r| r.phase1_ms),
                    phase2_ms: phases.map(|r| r.phase2_ms),
                    phase3_ms: phases.map(|r| r.phase3_ms),
                };
                write_csv(&[record], create(&path)?)?;
            }
        }
        Command::Test { points, edges, t, lambda } => {
            let t = StretchFactor::new(t)?;
            let ps = read_points(&points)?;
            let g = read_graph(&edges, &ps)?;
            let lambda = match lambda {
                Some(l) => l,
                None if ps.is_empty() => 1.0,
                None => LambdaChoice::Default.test_lambda(&ps, t)?,
            };
            let verdict = test_spanner(&ps, &g, t, lambda)?;
            println!("{verdict}");
            if !verdict.is_spanner {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Render { points, edges, out, width } => {
            let ps = read_points(&points)?;
            let g = edges.map(|e| read_graph(&e, &ps)).transpose()?;
            let opts = SvgOptions { width_px: width, ..SvgOptions::default() };
            write_text(&out, &render_svg(&ps, g.as_ref(), &opts))?;
        }
        Command::Bench { config, out } => {
            let cfg = BenchConfig::load(&config)?;
            let records = run_bench(&cfg)?;
            write_csv(&records, create(&out)?)?;
            eprintln!("{} rows ({} columns) written to {}", records.len(), CSV_HEADER.len(), out.display());
        }
        Command::TsplibImport { input, out } => {
            let inst = parse_tsplib(&read_text(&input)?)?;
            write_points(&out, &inst.points)?;
            eprintln!("{} points", inst.points.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
