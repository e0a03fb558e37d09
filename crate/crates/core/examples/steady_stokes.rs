//! Steady Stokes on a graded grid against a manufactured solution.

use macflow::analytic::{Problem, ProblemKind};
use macflow::fields::{h1_norm, l2_norm};
use macflow::interpolation::{dual_cell_mean, point_interpolate_pressure, point_interpolate_velocity};
use macflow::solver::solve_steady_stokes;
use macflow::spatial_ops::divergence;
use macflow::{GridSpec, MacGrid};

/// Geometric widths, largest over smallest equal to `ratio`.
fn graded(n: usize, ratio: f64) -> Vec<f64> {
    let r = ratio.powf(1.0 / (n - 1) as f64);
    let w: Vec<f64> = (0..n).map(|k| r.powi(k as i32)).collect();
    let s: f64 = w.iter().sum();
    let mut c = vec![0.0];
    for wk in &w {
        c.push(c.last().unwrap() + wk / s);
    }
    *c.last_mut().unwrap() = 1.0;
    c
}

fn main() -> macflow::Result<()> {
    let p = Problem::new(ProblemKind::StokesMs);
    for n in [8, 16, 32] {
        let g = MacGrid::new(&GridSpec::new(vec![graded(n, 4.0), graded(n, 0.25)])?)?;
        let f = dual_cell_mean(&g, &p.forcing_field())?;
        let (u, q, rep) = solve_steady_stokes(&g, &f)?;
        let eu = u.sub(&point_interpolate_velocity(&g, &p.velocity_field()));
        let mut pe = point_interpolate_pressure(&g, &p.pressure_field());
        pe.project_zero_mean(&g);
        let ep: Vec<f64> = q.values.iter().zip(&pe.values).map(|(a, b)| a - b).collect();
        let ep = macflow::fields::PressureField { values: ep, zero_mean: true };
        println!(
            "n={n:3} h={:.4} |u-u_h|={:.3e} |u-u_h|_1={:.3e} |p-p_h|={:.3e} max|div|={:.1e} res={:.1e}",
            g.h(),
            l2_norm(&g, &eu)?,
            h1_norm(&g, &eu)?,
            l2_norm(&g, &ep)?,
            divergence(&g, &u)?.max_abs(),
            rep.final_residual
        );
    }
    Ok(())
}
