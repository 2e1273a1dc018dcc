mod commands;
mod mesh_spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use mesh_spec::{parse_mesh_spec, MeshSpec};

/// Convergence studies for ε²Δ²u − Δu = f with clamped boundary conditions,
/// solved by the interior penalty virtual element method.
#[derive(Debug, Parser)]
#[command(name = "ipvem", version, arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one example on a mesh sequence and report the energy errors.
    Run(RunArgs),
    /// Generate a mesh and write it to a file.
    Mesh(MeshArgs),
    /// Assemble one system and write its matrix in coordinate format.
    DumpSystem(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Square,
    LShape,
}

fn parse_degree(s: &str) -> Result<usize, String> {
    let k: usize = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if k < 2 {
        return Err("k ≥ 2 required".into());
    }
    Ok(k)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

/// Parameters of the mesh generators.
#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    /// Seed for the random Voronoi seeds.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Lloyd iterations for Voronoi meshes.
    #[arg(long, default_value_t = 200)]
    pub lloyd_iters: usize,
    /// Amplitude of the distorted-grid map.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Penalty parameter on every edge.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub lambda: f64,
    /// Relative residual target of the linear solver.
    #[arg(long, default_value_t = 1e-12, value_parser = parse_positive)]
    pub tol: f64,
    /// Worker threads for assembly and error integration.
    #[arg(long, env = "IPVEM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Example number.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub example: u8,
    /// Comma-separated ε values (default depends on the example).
    #[arg(long, value_delimiter = ',', value_parser = parse_positive)]
    pub eps: Vec<f64>,
    /// Polynomial degree (default depends on the example).
    #[arg(long, value_parser = parse_degree)]
    pub k: Option<usize>,
    /// Mesh sequence: cvt:N,..., distorted:N,..., grid:N,... or files:PATH,...
    #[arg(long, value_parser = parse_mesh_spec)]
    pub mesh: Option<MeshSpec>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for the table, per-ε CSV files and plot data.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the report printed to standard output.
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,
    /// Write samples of the finest-level solution for the first ε.
    #[arg(long)]
    pub field_dump: Option<PathBuf>,
    /// Raster size of the field dump.
    #[arg(long, default_value_t = 101)]
    pub field_resolution: usize,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["cvt", "distorted", "grid"])))]
pub struct MeshArgs {
    /// Centroidal Voronoi mesh with this many cells.
    #[arg(long)]
    pub cvt: Option<usize>,
    /// Distorted n × n grid of the unit square.
    #[arg(long)]
    pub distorted: Option<usize>,
    /// Uniform n × n grid of the unit square.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, value_enum, default_value_t = DomainArg::Square)]
    pub domain: DomainArg,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub example: u8,
    #[arg(long, default_value_t = 1e-6, value_parser = parse_positive)]
    pub eps: f64,
    #[arg(long, default_value_t = 2, value_parser = parse_degree)]
    pub k: usize,
    /// A single mesh, in the same syntax as `run --mesh`.
    #[arg(long, value_parser = parse_mesh_spec)]
    pub mesh: MeshSpec,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub lambda: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(&args),
        Command::Mesh(args) => commands::mesh(&args),
        Command::DumpSystem(args) => commands::dump_system(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
