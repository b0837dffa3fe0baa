//! File formats, point generators, SVG output and benchmarks around
//! `spanner-core`, plus the library side of the `spanner` command.

pub mod bench;
mod error;
pub mod generate;
pub mod io;
pub mod mem;
pub mod svg;
pub mod tsplib;

pub use bench::{
    construct, load_dataset, run_bench, run_cell, write_csv, Algorithm, BenchConfig, BenchRecord, Cell, CellOptions,
    LambdaChoice, Source, CSV_HEADER,
};
pub use error::{CliError, Result};
pub use generate::{generate, Distribution, GeneratorSpec};
pub use svg::{render_svg, SvgOptions};
pub use tsplib::{format_tsplib, parse_tsplib, TspInstance};
