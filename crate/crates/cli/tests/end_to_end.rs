use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use spanner_cli::io::{format_points, parse_points, read_graph, read_points};
use spanner_cli::{
    format_tsplib, generate, parse_tsplib, render_svg, run_bench, BenchConfig, Distribution, GeneratorSpec, SvgOptions,
};
use spanner_core::{brute_force_test, greedy_original, PointSet, SpannerGraph, StretchFactor};

fn spanner(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_spanner")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_build_test_render() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    let pts2 = dir.path().join("pts2.txt");
    let edges = dir.path().join("edges.txt");
    let report = dir.path().join("report.csv");
    let svg = dir.path().join("out.svg");

    for out in [&pts, &pts2] {
        let o = spanner(&["generate", "--dist", "clustered", "--n", "300", "--seed", "5", "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&pts).unwrap(), std::fs::read(&pts2).unwrap());

    let o = spanner(&[
        "build", "--algo", "bucketing", "--t", "1.5", "--lambda-factor", "1.1", "--points", s(&pts), "--out-edges",
        s(&edges), "--report", s(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ps = read_points(&pts).unwrap();
    let g = read_graph(&edges, &ps).unwrap();
    let t = StretchFactor::new(1.5).unwrap();
    assert_eq!(g.edges(), greedy_original(&ps, t).edges());
    let csv = std::fs::read_to_string(&report).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().contains(&format!(",{},", g.edge_count())));

    let o = spanner(&["test", "--points", s(&pts), "--edges", s(&edges), "--t", "1.5"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("status=spanner"));

    // Drop the last edge: the tester must reject.
    let text = std::fs::read_to_string(&edges).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    std::fs::write(&edges, lines.join("\n")).unwrap();
    let o = spanner(&["test", "--points", s(&pts), "--edges", s(&edges), "--t", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("status=not_spanner"));

    let o = spanner(&["render", "--points", s(&pts), "--edges", s(&edges), "--out", s(&svg)]);
    assert!(o.status.success());
    let doc = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(doc.matches("<line").count(), lines.len());
    assert_eq!(doc.matches("<circle").count(), 300);
}

#[test]
fn lambda_flags_are_exclusive_and_errors_exit_with_2() {
    let o = spanner(&["build", "--t", "2", "--lambda", "1", "--lambda-factor", "1", "--points", "a", "--out-edges", "b"]);
    assert!(!o.status.success());
    let o = spanner(&["build", "--t", "2", "--points", "/nonexistent/p.txt", "--out-edges", "/tmp/x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = spanner(&["build", "--t", "0.5", "--points", "/nonexistent/p.txt", "--out-edges", "/tmp/x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tsplib_import_and_bench_commands() {
    let dir = tempfile::tempdir().unwrap();
    let tsp = dir.path().join("tiny.tsp");
    std::fs::write(&tsp, "NAME : tiny\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 0\n3 0 4\nEOF\n")
        .unwrap();
    let pts = dir.path().join("tiny.txt");
    let o = spanner(&["tsplib-import", "--in", s(&tsp), "--out", s(&pts)]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&pts).unwrap(), "0 0\n3 0\n0 4\n");

    let cfg = dir.path().join("bench.toml");
    std::fs::write(&cfg, format!("algorithms = [\"original\", \"bucketing\"]\ndatasets = [\"{}\"]\n", s(&tsp))).unwrap();
    let out = dir.path().join("bench.csv");
    let o = spanner(&["bench", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains(",tiny,2,4.0,"), "{}", rows[1]);

    std::fs::write(&cfg, "algorithms = [\"greedy\"]\nsizes = [5]\n").unwrap();
    let o = spanner(&["bench", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown algorithm"));
}

#[test]
fn bench_rows_are_verified_and_consistent() {
    let cfg = BenchConfig::from_toml("algorithms = [\"bucketing\"]\nsizes = [1000]\nseeds = [0, 1, 2]\nt = [2.0]").unwrap();
    let rows = run_bench(&cfg).unwrap();
    assert_eq!(rows.len(), 3);
    let t = StretchFactor::new(2.0).unwrap();
    for r in &rows {
        let ps = generate(&GeneratorSpec::new(Distribution::Uniform, 1000, r.seed.unwrap()));
        let g = greedy_original(&ps, t);
        assert!(brute_force_test(&ps, &g, t).unwrap().is_spanner);
        assert_eq!(r.edges, g.edge_count());
        let longest = g.edges().iter().map(|&(u, v, _)| ps.distance(u, v)).fold(0.0, f64::max);
        assert_eq!(r.max_edge, longest);
    }

    let cfg = BenchConfig::from_toml("algorithms = [\"original\", \"bucketing\"]\nsizes = [500]\nseeds = [0, 1, 2]").unwrap();
    let rows = run_bench(&cfg).unwrap();
    for pair in rows.chunks(2) {
        assert_eq!((pair[0].algo.as_str(), pair[1].algo.as_str()), ("original", "bucketing"));
        assert_eq!(pair[0].seed, pair[1].seed);
        assert_eq!(pair[0].edges, pair[1].edges);
    }
}

#[test]
fn rendering_counts_every_edge() {
    let ps = generate(&GeneratorSpec::new(Distribution::Uniform, 100, 2));
    let g = greedy_original(&ps, StretchFactor::new(2.0).unwrap());
    let doc = render_svg(&ps, Some(&g), &SvgOptions::default());
    assert!(doc.starts_with("<svg") && doc.trim_end().ends_with("</svg>"));
    assert_eq!(doc.matches("<line").count(), g.edge_count());
    assert_eq!(doc.matches("<circle").count(), 100);
    let empty = render_svg(&PointSet::default(), Some(&SpannerGraph::new(PointSet::default())), &SvgOptions::default());
    assert!(!empty.contains("<line"));
}

proptest! {
    #[test]
    fn tsplib_and_point_files_round_trip(coords in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 0..40)) {
        let ps = PointSet::new(coords).unwrap();
        if !ps.is_empty() {
            prop_assert_eq!(&parse_tsplib(&format_tsplib("p", &ps)).unwrap().points, &ps);
        }
        prop_assert_eq!(&parse_points(&format_points(&ps)).unwrap(), &ps);
    }

    #[test]
    fn generation_is_a_function_of_its_spec(n in 0usize..400, seed in any::<u64>(), d in 0usize..3) {
        let dist = [Distribution::Uniform, Distribution::Clustered, Distribution::Normal][d];
        let spec = GeneratorSpec::new(dist, n, seed);
        prop_assert_eq!(format_points(&generate(&spec)), format_points(&generate(&spec)));
        prop_assert_eq!(generate(&spec).len(), n);
    }
}
