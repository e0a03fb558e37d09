use std::fs;
use std::path::{Path, PathBuf};

use crate::analytic::Problem;
use crate::convection::ConvectionScheme;
use crate::error::Result;
use crate::fields::{PressureField, VelocityField};
use crate::interpolation::dual_cell_mean;
use crate::io::{write_history_csv, write_pressure_csv, write_report, write_velocity_csv};
use crate::macgrid::{GridSpec, MacGrid};
use crate::solver::{
    run_unsteady, solve_steady_ns, solve_steady_stokes_with, MomentumTerms, SaddleSystem, SolveReport, SolverConfig,
};

#[derive(Clone, Debug)]
pub enum RunSource {
    /// Grid from a spec file; with a problem its forcing is used, otherwise zero forcing.
    GridFile(PathBuf, Option<Problem>),
    /// Built-in problem on a uniform `n x n` unit-square grid.
    Problem(Problem, usize),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub source: RunSource,
    /// `None` solves Stokes (unless the problem carries convection).
    pub convection: Option<ConvectionScheme>,
    pub solver: SolverConfig,
    pub out: Option<PathBuf>,
    pub export_matrix: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub grid: MacGrid,
    pub velocity: VelocityField,
    pub pressure: PressureField,
    pub report: SolveReport,
    pub files: Vec<PathBuf>,
}

/// One solve, optionally dumping `grid.txt`, `velocity.csv`, `pressure.csv`,
/// `report.txt`, `history.csv` (and `matrix.coo`) into `out`.
pub fn run_single(config: &RunConfig) -> Result<RunOutput> {
    let (grid, problem) = match &config.source {
        RunSource::GridFile(path, p) => {
            let text = fs::read_to_string(path)?;
            (MacGrid::new(&GridSpec::parse(&text)?)?, *p)
        }
        RunSource::Problem(p, n) => (MacGrid::new(&GridSpec::unit(2, *n)?)?, Some(*p)),
    };
    let mut solver = config.solver.clone();
    let navier_stokes = config.convection.is_some() || problem.is_some_and(|p| p.convection != 0.0);
    if let Some(s) = config.convection {
        solver.scheme = s;
    }
    let (velocity, pressure, report, f) = match problem {
        Some(p) if p.is_unsteady() => {
            let (series, rep) = run_unsteady(&grid, &p.velocity_field(), &p.forcing_field(), &solver)?;
            let u = series.snapshots.last().cloned().unwrap_or_else(|| VelocityField::zeros(&grid));
            let q = series.pressures.last().cloned().unwrap_or_else(|| PressureField::zeros(&grid));
            (u, q, rep, None)
        }
        _ => {
            let f = match problem {
                Some(p) => dual_cell_mean(&grid, &p.forcing_field())?,
                None => VelocityField::zeros(&grid),
            };
            let (u, q, rep) = if navier_stokes {
                solve_steady_ns(&grid, &f, &solver)?
            } else {
                solve_steady_stokes_with(&grid, &f, &solver)?
            };
            (u, q, rep, Some(f))
        }
    };
    let mut files = Vec::new();
    if let Some(dir) = &config.out {
        fs::create_dir_all(dir)?;
        let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
            let path = Path::new(dir).join(name);
            fs::write(&path, bytes)?;
            files.push(path);
            Ok(())
        };
        put("grid.txt", grid.spec().to_text().into_bytes())?;
        let mut buf = Vec::new();
        write_velocity_csv(&grid, &velocity, &mut buf)?;
        put("velocity.csv", buf)?;
        let mut buf = Vec::new();
        write_pressure_csv(&grid, &pressure, &mut buf)?;
        put("pressure.csv", buf)?;
        let mut buf = Vec::new();
        write_report(&report, &mut buf)?;
        put("report.txt", buf)?;
        let mut buf = Vec::new();
        write_history_csv(&report, &mut buf)?;
        put("history.csv", buf)?;
        if config.export_matrix {
            let f = f.unwrap_or_else(|| VelocityField::zeros(&grid));
            let sys = SaddleSystem::assemble(&grid, &MomentumTerms::stokes(), &f, None)?;
            let mut buf = Vec::new();
            sys.matrix().write_coo(&mut buf)?;
            put("matrix.coo", buf)?;
        }
    }
    Ok(RunOutput { grid, velocity, pressure, report, files })
}
