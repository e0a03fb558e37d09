use std::io::Write;

use crate::analytic::Problem;
use crate::convection::ConvectionScheme;
use crate::error::{MacError, Result};
use crate::fields::{h1_norm, l2_norm, PressureField, VelocityField};
use crate::interpolation::{dual_cell_mean, point_interpolate_pressure, point_interpolate_velocity};
use crate::io::fmt_f64;
use crate::macgrid::{GridSpec, MacGrid};
use crate::solver::{run_unsteady, solve_steady_ns, solve_steady_stokes_with, solve_unsteady_stokes, SolverConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GridFamily {
    Uniform,
    /// Geometric widths with the given ratio on the coarsest level, refined
    /// by halving every cell.
    Graded(f64),
}

/// `δt = c h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DtLaw {
    pub c: f64,
}

impl std::str::FromStr for DtLaw {
    type Err = MacError;

    /// Accepts `c*h` with a number for `c`, or a bare number.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let num = t.strip_suffix("*h").unwrap_or(t).trim();
        let c: f64 = num
            .parse()
            .map_err(|_| MacError::InvalidArgument(format!("time-step law `{s}` is not of the form c*h")))?;
        if !(c > 0.0) {
            return Err(MacError::InvalidArgument("time-step constant must be positive".into()));
        }
        Ok(DtLaw { c })
    }
}

#[derive(Clone, Debug)]
pub struct ConvergenceConfig {
    pub problem: Problem,
    pub scheme: ConvectionScheme,
    pub family: GridFamily,
    /// Cells per axis on the coarsest level.
    pub base: usize,
    pub levels: usize,
    pub dt_law: Option<DtLaw>,
    pub horizon: f64,
}

impl ConvergenceConfig {
    pub fn new(problem: Problem, scheme: ConvectionScheme, levels: usize) -> Self {
        ConvergenceConfig {
            problem,
            scheme,
            family: GridFamily::Uniform,
            base: 8,
            levels,
            dt_law: problem.is_unsteady().then_some(DtLaw { c: 0.5 }),
            horizon: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub h: f64,
    pub dt: Option<f64>,
    pub err_u_l2: f64,
    pub err_u_h1: f64,
    pub err_p_l2: f64,
    /// `ℓ²`-in-time of the L² plus H¹ velocity error (unsteady only).
    pub err_combined: Option<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub problem: String,
    pub scheme: ConvectionScheme,
    pub rows: Vec<ConvergenceRow>,
    /// Set when a level failed; the rows above it are kept.
    pub failure: Option<String>,
}

pub fn observed_order(e0: f64, e1: f64, h0: f64, h1: f64) -> f64 {
    (e0 / e1).ln() / (h0 / h1).ln()
}

impl ConvergenceTable {
    /// Orders between consecutive rows for the selected error.
    pub fn orders(&self, err: impl Fn(&ConvergenceRow) -> f64) -> Vec<f64> {
        self.rows.windows(2).map(|w| observed_order(err(&w[0]), err(&w[1]), w[0].h, w[1].h)).collect()
    }

    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.rows.iter().all(|r| r.converged)
    }

    /// One row per level; order columns only when there are two or more rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let with_orders = self.rows.len() > 1;
        let mut head = String::from("cells,h,dt,err_u_l2,err_u_h1,err_p_l2,err_combined");
        if with_orders {
            head.push_str(",order_u_l2,order_u_h1,order_p_l2,order_combined");
        }
        writeln!(w, "{head}")?;
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        for (k, r) in self.rows.iter().enumerate() {
            let mut line = format!(
                "{},{},{},{},{},{},{}",
                r.cells,
                fmt_f64(r.h),
                opt(r.dt),
                fmt_f64(r.err_u_l2),
                fmt_f64(r.err_u_h1),
                fmt_f64(r.err_p_l2),
                opt(r.err_combined)
            );
            if with_orders {
                if k == 0 {
                    line.push_str(",,,,");
                } else {
                    let p = &self.rows[k - 1];
                    let o = |a: f64, b: f64| fmt_f64(observed_order(a, b, p.h, r.h));
                    line.push_str(&format!(
                        ",{},{},{},{}",
                        o(p.err_u_l2, r.err_u_l2),
                        o(p.err_u_h1, r.err_u_h1),
                        o(p.err_p_l2, r.err_p_l2),
                        match (p.err_combined, r.err_combined) {
                            (Some(a), Some(b)) => o(a, b),
                            _ => String::new(),
                        }
                    ));
                }
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Unit-square grid with `n = base 2^level` cells per axis whose coarse
/// widths grow geometrically with `ratio`, each coarse cell split evenly.
pub fn graded_spec(base: usize, level: usize, ratio: f64) -> Result<GridSpec> {
    let w: Vec<f64> = (0..base).map(|k| ratio.powi(k as i32)).collect();
    let total: f64 = w.iter().sum();
    let split = 1usize << level;
    let mut axis = vec![0.0];
    let mut x0 = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let x1 = if k + 1 == base { 1.0 } else { x0 + wk / total };
        for m in 1..=split {
            axis.push(if m == split { x1 } else { x0 + (x1 - x0) * m as f64 / split as f64 });
        }
        x0 = x1;
    }
    GridSpec::new(vec![axis.clone(), axis])
}

fn level_grid(config: &ConvergenceConfig, level: usize) -> Result<MacGrid> {
    let spec = match config.family {
        GridFamily::Uniform => GridSpec::unit(2, config.base << level)?,
        GridFamily::Graded(r) => graded_spec(config.base, level, r)?,
    };
    MacGrid::new(&spec)
}

/// Velocity and pressure errors against the face/cell-centre interpolants.
pub fn discrete_errors(grid: &MacGrid, problem: &Problem, t: f64, u: &VelocityField, p: &PressureField) -> Result<(f64, f64, f64)> {
    let ue = point_interpolate_velocity(grid, &problem.velocity_field().at_time(t));
    let mut pe = point_interpolate_pressure(grid, &problem.pressure_field().at_time(t));
    pe.project_zero_mean(grid);
    let eu = u.sub(&ue);
    let mut ep = p.clone();
    ep.values.iter_mut().zip(&pe.values).for_each(|(a, b)| *a -= b);
    Ok((l2_norm(grid, &eu)?, h1_norm(grid, &eu)?, l2_norm(grid, &ep)?))
}

fn steady_row(config: &ConvergenceConfig, grid: &MacGrid) -> Result<ConvergenceRow> {
    let pr = &config.problem;
    let f = dual_cell_mean(grid, &pr.forcing_field())?;
    let solver = SolverConfig { scheme: config.scheme, ..Default::default() };
    let (u, p, rep) = if pr.convection == 0.0 {
        solve_steady_stokes_with(grid, &f, &solver)?
    } else {
        solve_steady_ns(grid, &f, &solver)?
    };
    let (a, b, c) = discrete_errors(grid, pr, 0.0, &u, &p)?;
    Ok(ConvergenceRow {
        cells: grid.n()[0],
        h: grid.h(),
        dt: None,
        err_u_l2: a,
        err_u_h1: b,
        err_p_l2: c,
        err_combined: None,
        converged: rep.converged,
    })
}

fn unsteady_row(config: &ConvergenceConfig, law: DtLaw, grid: &MacGrid) -> Result<ConvergenceRow> {
    let pr = &config.problem;
    let dt0 = law.c * grid.h();
    let steps = (config.horizon / dt0).ceil().max(1.0);
    let dt = config.horizon / steps;
    let solver = SolverConfig { scheme: config.scheme, dt, horizon: config.horizon, ..Default::default() };
    let u0 = pr.velocity_field();
    let f = pr.forcing_field();
    let (series, rep) = if pr.convection == 0.0 {
        solve_unsteady_stokes(grid, &u0, &f, &solver)?
    } else {
        run_unsteady(grid, &u0, &f, &solver)?
    };
    let mut comb = 0.0;
    let mut last = (0.0, 0.0, 0.0);
    for n in 1..series.snapshots.len() {
        let t = series.time(n);
        let e = discrete_errors(grid, pr, t, &series.snapshots[n], &series.pressures[n])?;
        comb += dt * (e.0 * e.0 + e.1 * e.1);
        last = e;
    }
    Ok(ConvergenceRow {
        cells: grid.n()[0],
        h: grid.h(),
        dt: Some(dt),
        err_u_l2: last.0,
        err_u_h1: last.1,
        err_p_l2: last.2,
        err_combined: Some(comb.sqrt()),
        converged: rep.converged,
    })
}

/// Solve on `levels` nested grids and tabulate the errors. A failing level
/// stops the study and is recorded in `failure`.
pub fn run_convergence(config: &ConvergenceConfig) -> Result<ConvergenceTable> {
    if config.levels == 0 {
        return Err(MacError::InvalidArgument("need at least one level".into()));
    }
    if config.base < 2 {
        return Err(MacError::InvalidArgument("base grid needs at least 2 cells per axis".into()));
    }
    if config.problem.is_unsteady() && config.dt_law.is_none() {
        return Err(MacError::InvalidArgument(format!("{} is unsteady and needs a time-step law", config.problem.name())));
    }
    let mut table =
        ConvergenceTable { problem: config.problem.name().to_string(), scheme: config.scheme, rows: Vec::new(), failure: None };
    for level in 0..config.levels {
        let row = level_grid(config, level).and_then(|g| match config.dt_law {
            Some(law) => unsteady_row(config, law, &g),
            None => steady_row(config, &g),
        });
        match row {
            Ok(r) => table.rows.push(r),
            Err(e) => {
                table.failure = Some(format!("level {level}: {e}"));
                break;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_grid_is_nested() {
        let a = graded_spec(4, 0, 1.2).unwrap();
        let b = graded_spec(4, 1, 1.2).unwrap();
        assert_eq!(a.coords[0].len(), 5);
        assert_eq!(b.coords[0].len(), 9);
        for k in 0..5 {
            assert!((a.coords[0][k] - b.coords[0][2 * k]).abs() < 1e-15);
        }
        let w: Vec<f64> = a.coords[0].windows(2).map(|p| p[1] - p[0]).collect();
        assert!((w[1] / w[0] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn dt_law_parsing() {
        assert_eq!("0.5*h".parse::<DtLaw>().unwrap(), DtLaw { c: 0.5 });
        assert_eq!("2".parse::<DtLaw>().unwrap(), DtLaw { c: 2.0 });
        assert!("h*h".parse::<DtLaw>().is_err());
        assert!("-1*h".parse::<DtLaw>().is_err());
    }

    #[test]
    fn order_formula() {
        assert!((observed_order(4.0, 1.0, 0.2, 0.1) - 2.0).abs() < 1e-15);
    }
}
