//! Unsteady no-slip vortex: implicit Euler with inner Picard, energy
//! history and the discrete energy inequality.

use macflow::analytic::{Problem, ProblemKind};
use macflow::convection::ConvectionScheme;
use macflow::solver::{run_unsteady, SolverConfig};
use macflow::{GridSpec, MacGrid};

fn main() -> macflow::Result<()> {
    let g = MacGrid::new(&GridSpec::unit(2, 32)?)?;
    let p = Problem::new(ProblemKind::TaylorGreen);
    let zero = macflow::interpolation::AnalyticField::vector(|_, _| [0.0; 3]);
    for scheme in [ConvectionScheme::Centred, ConvectionScheme::Upwind] {
        let cfg = SolverConfig { scheme, dt: 0.01, horizon: 0.2, ..Default::default() };
        // free decay: no forcing
        let (_, rep) = run_unsteady(&g, &p.velocity_field(), &zero, &cfg)?;
        let e = &rep.energy;
        println!("{scheme}: energy {:.4e} -> {:.4e} over {} steps", e[0], e[e.len() - 1], rep.steps);
        let lhs = rep.estimate("l2_final_sq").unwrap() + rep.estimate("sum_dt_h1_sq").unwrap();
        println!("  |u^M|^2 + sum dt |u^n|_1^2 = {lhs:.6} <= |u^0|^2 = {:.6}", rep.estimate("l2_initial_sq").unwrap());
        println!("  Picard iterations per step {:?}", rep.picard_iterations);
    }
    Ok(())
}
