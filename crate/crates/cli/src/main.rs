//! `shepp` - tables, figure data and Monte Carlo runs for boundary
//! non-crossing probabilities of the Slepian process.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::OutputFormat;

#[derive(Parser)]
#[command(
    name = "shepp",
    version,
    about = "Boundary non-crossing probabilities and Shepp's constants of the Slepian process",
    after_help = "Grids are written a:b:step (inclusive). Output is CSV by default; every file \
                  carries a provenance header and is byte-identical for identical parameters."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonOpts {
    /// Single level h (overrides the command's default grid).
    #[arg(long)]
    h: Option<f64>,

    /// Level grid a:b:step.
    #[arg(long = "h-grid", value_parser = commands::parse_grid)]
    h_grid: Option<Vec<f64>>,

    /// Horizon T for F_T evaluations.
    #[arg(long = "T")]
    horizon: Option<f64>,

    /// Gauss-Legendre nodes per tensor axis (uniform override).
    #[arg(long)]
    nodes: Option<usize>,

    /// Nystrom discretization size for eigenvalue computations.
    #[arg(long)]
    eigen_nodes: Option<usize>,

    /// Lower truncation c: integrals over (-inf, h) run on [-c, h].
    #[arg(long)]
    trunc: Option<f64>,

    /// Monte Carlo replications.
    #[arg(long)]
    reps: Option<u64>,

    /// Monte Carlo grid spacing.
    #[arg(long)]
    step: Option<f64>,

    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Enable the expensive F5-based computations (A8).
    #[arg(long)]
    expensive: bool,

    /// Output format.
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,

    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Approximation ids to leave out (e.g. --skip A5 A6 A7).
    #[arg(long, num_args = 0..)]
    skip: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lambda approximations A0..A7 over the level grid.
    Table1(CommonOpts),
    /// Relative errors of A0..A6 against A7.
    Table2(CommonOpts),
    /// Lambda(h) over the fine grid (A7; h=0 uses A8 with --expensive).
    Table3(CommonOpts),
    /// F2(h): one-dimensional-integral form vs. its closed-form approximation.
    Table4(CommonOpts),
    /// F2(h|x_h): exact appendix form vs. its closed-form approximation.
    Table5(CommonOpts),
    /// Lower/upper bounds on Lambda(h) from F_n, long format.
    BoundsFigure {
        #[command(flatten)]
        common: CommonOpts,
        /// Largest n for the bounds (n <= 4).
        #[arg(long, default_value_t = 3)]
        n_max: usize,
    },
    /// Relative-error curves (or lambda curves with --curves), long format.
    RelerrFigure {
        #[command(flatten)]
        common: CommonOpts,
        /// Emit lambda(h) curves for A0, A1, A6 instead of relative errors.
        #[arg(long)]
        curves: bool,
    },
    /// Upper-tail comparison across processes (or correlations with --correlation).
    CompareFigure {
        #[command(flatten)]
        common: CommonOpts,
        /// Emit the correlation functions instead of the Lambda comparison.
        #[arg(long)]
        correlation: bool,
        /// Broken-line parameter a.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Broken-line parameter c.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Evaluate one approximation at one level.
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        /// Approximation id A0..A8.
        #[arg(long)]
        approx: String,
    },
    /// Monte Carlo estimate of F_T(h) (or of Lambda with --lambda-j).
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        /// Process: slepian | ou | broken-a | broken-c.
        #[arg(long, default_value = "slepian")]
        process: String,
        /// Broken-line parameter a.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Broken-line parameter c.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Estimate Lambda via the paired ratio F_j/F_{j-1} with this j.
        #[arg(long)]
        lambda_j: Option<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Table1(c) => commands::table1(&c),
        Command::Table2(c) => commands::table2(&c),
        Command::Table3(c) => commands::table3(&c),
        Command::Table4(c) => commands::table4(&c),
        Command::Table5(c) => commands::table5(&c),
        Command::BoundsFigure { common, n_max } => commands::bounds_figure(&common, n_max),
        Command::RelerrFigure { common, curves } => commands::relerr_figure(&common, curves),
        Command::CompareFigure {
            common,
            correlation,
            a,
            c,
        } => commands::compare_figure(&common, correlation, a, c),
        Command::Eval { common, approx } => commands::eval(&common, &approx),
        Command::Simulate {
            common,
            process,
            a,
            c,
            lambda_j,
        } => commands::simulate(&common, &process, a, c, lambda_j),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
