//! Steady Navier-Stokes by Picard iteration with both convection schemes.

use macflow::analytic::{Problem, ProblemKind};
use macflow::convection::ConvectionScheme;
use macflow::interpolation::dual_cell_mean;
use macflow::solver::{solve_steady_ns, SolverConfig};
use macflow::{GridSpec, MacGrid};

fn main() -> macflow::Result<()> {
    let g = MacGrid::new(&GridSpec::unit(2, 24)?)?;
    for amplitude in [1.0, 10.0, 40.0] {
        let p = Problem::new(ProblemKind::PolyCavity).with_amplitude(amplitude).with_convection(1.0);
        let f = dual_cell_mean(&g, &p.forcing_field())?;
        for scheme in [ConvectionScheme::Centred, ConvectionScheme::Upwind] {
            let cfg = SolverConfig { scheme, ..Default::default() };
            let (_, _, rep) = solve_steady_ns(&g, &f, &cfg)?;
            println!(
                "A={amplitude:5} {scheme:8} converged={} iterations={} |u|_1={:.4} increments {:?}",
                rep.converged,
                rep.picard_iterations[0],
                rep.velocity_h1,
                rep.nonlinear_residuals.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>()
            );
        }
    }
    Ok(())
}
