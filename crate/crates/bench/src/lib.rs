//! Command-line front end for the solver benchmarks.

pub mod config;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use maxlab_core::bench::{
    emit_grid, emit_table, run_cases, suite, BenchCase, Layout, Suite, SuiteResult, TableFormat, SUITE_NAMES,
};
use maxlab_core::fem::{assemble, Material, SourceSpec};
use maxlab_core::mesh::{build_cube_mesh, MeshConfig};
use maxlab_core::strategy::StrategyRegistry;
use maxlab_core::{Error, Result};

use crate::config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "bench", about = "Time-harmonic Maxwell solver benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named suite or the cases of a TOML file.
    Run(RunArgs),
    /// Run a single case.
    Solve(SolveArgs),
    /// Assemble a problem and write its matrices in Matrix Market format.
    ExportMatrices(ExportArgs),
    /// List suites and solver strategies.
    List,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads for running cases concurrently.
    #[arg(long, env = "BENCH_THREADS")]
    pub threads: Option<usize>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: TableFormat,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct Overrides {
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub ppw: Option<f64>,
    #[arg(long)]
    pub scale: Option<f64>,
    /// Strategy spec such as `hx:precond`, `ras:4:2` or `spai:0.01:0.05:3`.
    #[arg(long)]
    pub solver: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub suite: Option<String>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub k: f64,
    #[arg(long, required_unless_present = "n")]
    pub ppw: Option<f64>,
    /// Subdivisions per side; overrides `--ppw`.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub solver: String,
    /// Mesh the full cube without the central scatterer.
    #[arg(long)]
    pub no_scatterer: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub no_scatterer: bool,
    #[arg(long)]
    pub dir: PathBuf,
}

/// Runs a parsed command; returns whether every case behaved as expected.
pub fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Solve(args) => solve(args),
        Command::ExportMatrices(args) => export(args).map(|_| true),
        Command::List => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "suites: {}", SUITE_NAMES.join(", "))?;
            writeln!(out, "solvers: {}", StrategyRegistry::with_defaults().names().collect::<Vec<_>>().join(", "))?;
            Ok(true)
        }
    }
}

fn run(args: RunArgs) -> Result<bool> {
    let (mut suite, file_threads) = match (&args.suite, &args.config) {
        (Some(name), _) => (suite(name)?, None),
        (None, Some(path)) => {
            let cfg = ConfigFile::load(path)?;
            let cases = cfg.to_cases()?;
            if cases.is_empty() {
                return Err(Error::Config(format!("{} defines no cases", path.display())));
            }
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            (Suite { name, cases, layout: Layout::List }, cfg.threads)
        }
        (None, None) => return Err(Error::Config("give --suite or --config".into())),
    };
    for case in &mut suite.cases {
        apply_overrides(case, &args.overrides, &args.common);
    }
    let threads = args.common.threads.or(file_threads).unwrap_or(1);
    let result = finish(suite, threads, &args.common)?;
    Ok(result.all_ok())
}

fn solve(args: SolveArgs) -> Result<bool> {
    let mut case = match args.n {
        Some(n) => BenchCase::with_n(args.k, n, args.scale, &args.solver),
        None => BenchCase::new(args.k, args.ppw.unwrap_or_default(), args.scale, &args.solver),
    };
    case.scatterer = !args.no_scatterer;
    apply_overrides(&mut case, &Overrides { k: None, ppw: None, scale: None, solver: None }, &args.common);
    let suite = Suite { name: "solve".into(), cases: vec![case], layout: Layout::List };
    Ok(finish(suite, 1, &args.common)?.all_ok())
}

fn apply_overrides(case: &mut BenchCase, o: &Overrides, c: &Common) {
    if let Some(k) = o.k {
        case.k = k;
    }
    if let Some(ppw) = o.ppw {
        case.ppw = ppw;
        case.n = None;
    }
    if let Some(scale) = o.scale {
        case.scale = scale;
    }
    if let Some(s) = &o.solver {
        case.solver = s.clone();
    }
    if let Some(r) = c.rtol {
        case.krylov.rtol = r;
    }
    if let Some(m) = c.max_iter {
        case.krylov.max_iter = m;
    }
}

/// Runs the cases, writes the long table to `--out` or stdout and, for grid
/// suites, the grid to stderr.
fn finish(suite: Suite, threads: usize, common: &Common) -> Result<SuiteResult> {
    let registry = StrategyRegistry::with_defaults();
    let results = run_cases(&registry, &suite.cases, threads);
    let result = SuiteResult { suite, results };
    let table = emit_table(&result.results, common.format);
    match &common.out {
        Some(path) => std::fs::write(path, &table)?,
        None => std::io::stdout().lock().write_all(table.as_bytes())?,
    }
    if result.suite.layout == Layout::Grid {
        eprintln!("{}", emit_grid(&result, TableFormat::Markdown));
    }
    for r in &result.results {
        if let Some(e) = &r.error {
            eprintln!("{} on {}: {e}", r.case.solver, r.case.row);
        }
    }
    Ok(result)
}

fn export(args: ExportArgs) -> Result<()> {
    let mesh = build_cube_mesh(MeshConfig::new(args.n, args.scale, !args.no_scatterer))?;
    let material = Material::homogeneous(&mesh, args.k);
    let ap = assemble(&mesh, &material, &SourceSpec::default_plane_wave())?;
    std::fs::create_dir_all(&args.dir)?;
    ap.export_matrix_market(&args.dir)?;
    eprintln!("wrote {} edge and {} vertex unknowns to {}", ap.n_edges(), ap.maps.n_vertices(), args.dir.display());
    Ok(())
}
