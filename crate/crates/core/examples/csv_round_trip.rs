//! Dump a solution to CSV, read it back, and export the saddle matrix.

use macflow::analytic::{Problem, ProblemKind};
use macflow::interpolation::dual_cell_mean;
use macflow::io::{read_pressure_csv, read_velocity_csv, write_pressure_csv, write_report, write_velocity_csv};
use macflow::solver::{solve_steady_stokes, MomentumTerms, SaddleSystem};
use macflow::{GridSpec, MacGrid};

fn main() -> macflow::Result<()> {
    let g = MacGrid::new(&GridSpec::unit(2, 4)?)?;
    let f = dual_cell_mean(&g, &Problem::new(ProblemKind::PolyCavity).forcing_field())?;
    let (u, p, rep) = solve_steady_stokes(&g, &f)?;

    let mut vel = Vec::new();
    write_velocity_csv(&g, &u, &mut vel)?;
    let mut pre = Vec::new();
    write_pressure_csv(&g, &p, &mut pre)?;
    let text = String::from_utf8_lossy(&vel).into_owned();
    for line in text.lines().take(5) {
        println!("{line}");
    }
    let u2 = read_velocity_csv(&g, &text)?;
    let p2 = read_pressure_csv(&g, &String::from_utf8_lossy(&pre))?;
    println!("velocity identical: {}, pressure identical: {}", u2.comps == u.comps, p2.values == p.values);

    // another grid's dump is refused
    let other = MacGrid::new(&GridSpec::unit(2, 5)?)?;
    if let Err(e) = read_velocity_csv(&other, &text) {
        println!("reading on the wrong grid: {e}");
    }

    write_report(&rep, std::io::stdout().lock())?;
    let sys = SaddleSystem::assemble(&g, &MomentumTerms::stokes(), &f, None)?;
    let m = sys.matrix();
    println!("saddle matrix {}x{} with {} entries", m.nrows, m.ncols, m.compressed().len());
    Ok(())
}
