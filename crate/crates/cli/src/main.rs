mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::Outcome;

/// Affine-plane colorings, bound calculators, and pairing-model constants for
/// multicolor size Ramsey numbers of paths.
#[derive(Debug, Parser)]
#[command(name = "size-ramsey", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the affine plane of order q and write it as JSON.
    Plane {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a certifying adversarial coloring of a host graph, or replay a stored one.
    Color(ColorArgs),
    /// Evaluate the lower bounds for a general graph or a path power.
    Bounds {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: f64,
        /// Average-degree bound of the forbidden graph.
        #[arg(long, conflicts_with = "k", required_unless_present = "k")]
        d: Option<f64>,
        /// Power of the path.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "C", default_value_t = 0.0)]
        c: f64,
    },
    /// Minimize c·d subject to a non-positive first-moment rate.
    Optimize {
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        /// Write the golden-section trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Sample a bipartite regular graph from the pairing model.
    Sample {
        #[arg(long)]
        side_size: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep the first pairing and write its simple support instead of rejecting non-simple ones.
        #[arg(long)]
        multigraph: bool,
        #[arg(long, default_value_t = 100_000)]
        max_attempts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that every pair of s-sets across a balanced bipartite graph is joined by an edge.
    Expand {
        #[arg(long)]
        graph: PathBuf,
        /// Subset size; if absent it is derived from --r, --c and --n.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide by exhaustive search whether a small graph arrows a path.
    ArrowOracle {
        #[arg(long, conflicts_with_all = ["complete", "path"])]
        graph: Option<PathBuf>,
        /// Use the complete graph on this many vertices.
        #[arg(long, conflicts_with = "path")]
        complete: Option<usize>,
        /// Use the path on this many vertices.
        #[arg(long)]
        path: Option<usize>,
        /// Number of vertices of the target path.
        #[arg(long)]
        path_vertices: usize,
        #[arg(long, default_value_t = 2)]
        colors: usize,
    },
    /// Emit g(c, d) on a grid as CSV.
    GSurface {
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[arg(long)]
        c_min: f64,
        #[arg(long)]
        c_max: f64,
        #[arg(long)]
        d_min: f64,
        #[arg(long)]
        d_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the exact log-moment with g(c, d) across n.
    MomentConverge {
        #[arg(long, default_value_t = 3)]
        r: u32,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [1_000u64, 10_000, 100_000])]
        n: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, clap::Args)]
struct ColorArgs {
    /// Host graph edge list.
    #[arg(long, required_unless_present = "replay")]
    graph: Option<PathBuf>,
    /// Verify a stored coloring file instead of searching.
    #[arg(long, conflicts_with = "graph")]
    replay: Option<PathBuf>,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    d: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    /// Order of the forbidden graph; defaults to the host graph's vertex count.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial cap; defaults to ⌈10/margin⌉ from the union bound.
    #[arg(long)]
    trials: Option<usize>,
    /// Directory for coloring.txt, line_counts.csv and certificate.txt.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plane { q, out } => commands::plane(q, out.as_deref()),
        Command::Color(args) => commands::color(&args),
        Command::Bounds { r, n, d, k, c } => commands::bounds(r, n, d, k, c),
        Command::Optimize {
            r,
            tolerance,
            trace,
        } => commands::optimize(r, tolerance, trace.as_deref()),
        Command::Sample {
            side_size,
            degree,
            seed,
            multigraph,
            max_attempts,
            out,
        } => commands::sample(
            side_size,
            degree,
            seed,
            multigraph,
            max_attempts,
            out.as_deref(),
        ),
        Command::Expand {
            graph,
            s,
            r,
            c,
            n,
            mode,
            samples,
            seed,
        } => commands::expand(&graph, s, r, c, n, mode, samples, seed),
        Command::ArrowOracle {
            graph,
            complete,
            path,
            path_vertices,
            colors,
        } => commands::arrow(graph.as_deref(), complete, path, path_vertices, colors),
        Command::GSurface {
            r,
            c_min,
            c_max,
            d_min,
            d_max,
            steps,
            out,
        } => commands::g_surface(r, (c_min, c_max), (d_min, d_max), steps, out.as_deref()),
        Command::MomentConverge { r, c, d, n, out } => {
            commands::moment_converge(r, c, d, &n, out.as_deref())
        }
    };
    match result {
        Ok(outcome) => outcome.code(),
        Err(err) => {
            eprintln!("error: {err:#}");
            Outcome::InputError.code()
        }
    }
}
