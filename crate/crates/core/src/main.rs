use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use macflow::analytic::Problem;
use macflow::convection::ConvectionScheme;
use macflow::harness::{
    run_convergence, run_single, run_verify, ConvergenceConfig, DtLaw, GridFamily, RunConfig, RunSource,
};
use macflow::solver::SolverConfig;

#[derive(Parser)]
#[command(name = "macflow", version, about = "MAC scheme for Stokes and Navier-Stokes on non-uniform grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the property catalog on random non-uniform grids.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = usize_list, default_value = "2")]
        dims: UsizeList,
        /// Cells per axis (an empty list runs nothing and passes).
        #[arg(long, value_parser = usize_list, default_value = "4,8,16")]
        sizes: UsizeList,
        /// Write the results table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refinement study against a built-in analytic solution.
    Converge(ConvergeArgs),
    /// One solve with CSV dumps.
    Run(RunArgs),
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "centred")]
    scheme: ConvectionScheme,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Cells per axis on the coarsest level.
    #[arg(long, default_value_t = 8)]
    base: usize,
    /// Geometric width ratio for graded grids (uniform when absent).
    #[arg(long)]
    graded: Option<f64>,
    /// Convection coefficient (defaults to the problem's own).
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    unsteady: bool,
    #[arg(long, default_value = "0.5*h")]
    dt_law: DtLaw,
    #[arg(long, default_value_t = 0.25)]
    horizon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "problem", required_unless_present = "problem")]
    grid: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Forcing from this problem when a grid file is given.
    #[arg(long, requires = "grid")]
    forcing: Option<String>,
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Solve Navier-Stokes with this scheme (Stokes when absent).
    #[arg(long)]
    convection: Option<ConvectionScheme>,
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 0.1)]
    horizon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    export_matrix: bool,
}

type UsizeList = Vec<usize>;

/// Comma-separated counts; the empty string is the empty list.
fn usize_list(s: &str) -> Result<UsizeList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

fn problem(name: &str, kappa: Option<f64>, amplitude: Option<f64>) -> macflow::Result<Problem> {
    let mut p = Problem::by_name(name)?;
    if let Some(k) = kappa {
        p = p.with_convection(k);
    }
    if let Some(a) = amplitude {
        p = p.with_amplitude(a);
    }
    Ok(p)
}

fn emit(out: &Option<PathBuf>, write: impl FnOnce(&mut Vec<u8>) -> macflow::Result<()>) -> macflow::Result<()> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    match out {
        Some(path) => std::fs::write(path, buf)?,
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }
    Ok(())
}

fn run(cli: Cli) -> macflow::Result<bool> {
    match cli.command {
        Command::Verify { seed, dims, sizes, out } => {
            let res = run_verify(seed, &sizes, &dims)?;
            emit(&out, |b| res.write_csv(b))?;
            let failed = res.records.iter().filter(|r| !r.passed).count();
            eprintln!("seed {seed}: {} checks, {failed} failed", res.records.len());
            Ok(res.passed())
        }
        Command::Converge(a) => {
            let p = problem(&a.problem, a.kappa, a.amplitude)?;
            let mut cfg = ConvergenceConfig::new(p, a.scheme, a.levels);
            cfg.base = a.base;
            cfg.horizon = a.horizon;
            if a.unsteady || p.is_unsteady() {
                cfg.dt_law = Some(a.dt_law);
            }
            if let Some(r) = a.graded {
                cfg.family = GridFamily::Graded(r);
            }
            let table = run_convergence(&cfg)?;
            emit(&a.out, |b| table.write_csv(b))?;
            if let Some(f) = &table.failure {
                eprintln!("stopped: {f}");
            }
            Ok(table.passed())
        }
        Command::Run(a) => {
            let source = match (&a.grid, &a.problem) {
                (Some(g), _) => RunSource::GridFile(g.clone(), a.forcing.as_deref().map(Problem::by_name).transpose()?),
                (None, Some(p)) => RunSource::Problem(Problem::by_name(p)?, a.n),
                (None, None) => unreachable!("clap requires one of --grid/--problem"),
            };
            let solver = SolverConfig { dt: a.dt, horizon: a.horizon, ..Default::default() };
            let cfg = RunConfig { source, convection: a.convection, solver, out: a.out.clone(), export_matrix: a.export_matrix };
            let out = run_single(&cfg)?;
            if a.out.is_none() {
                macflow::io::write_report(&out.report, std::io::stdout().lock())?;
            }
            for f in &out.files {
                eprintln!("wrote {}", f.display());
            }
            Ok(out.report.converged)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
