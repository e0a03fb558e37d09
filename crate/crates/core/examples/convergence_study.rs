//! Refinement study on uniform and graded grids, printed as CSV.

use macflow::analytic::{Problem, ProblemKind};
use macflow::convection::ConvectionScheme;
use macflow::harness::{run_convergence, ConvergenceConfig, GridFamily};

fn main() -> macflow::Result<()> {
    for family in [GridFamily::Uniform, GridFamily::Graded(1.2)] {
        let mut cfg = ConvergenceConfig::new(Problem::new(ProblemKind::StokesMs), ConvectionScheme::Centred, 4);
        cfg.family = family;
        let table = run_convergence(&cfg)?;
        println!("# {family:?}");
        table.write_csv(std::io::stdout().lock())?;
        let fmt = |v: Vec<f64>| v.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>().join(" ");
        println!("# u L2 orders: {}", fmt(table.orders(|r| r.err_u_l2)));
        println!("# u H1 orders: {}", fmt(table.orders(|r| r.err_u_h1)));
    }
    Ok(())
}
