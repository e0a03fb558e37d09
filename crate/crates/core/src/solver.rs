//! Saddle-point assembly and the steady/unsteady Stokes and Navier-Stokes
//! drivers.
//!
//! Unknowns are ordered as interior velocity faces (component by component),
//! then cells, then one multiplier enforcing `Σ |K| p_K = 0`. Momentum rows
//! are multiplied by `|D_σ|` and mass rows by `-|K|`, which makes the Stokes
//! block symmetric.

use std::time::Instant;

use faer::linalg::solvers::Solve;

use crate::convection::{convection_apply, mass_fluxes, ConvectionScheme};
use crate::error::{MacError, Result};
use crate::fields::{h1_norm, l2_norm, PressureField, TimeSeriesField, VelocityField};
use crate::interpolation::{dual_cell_slab_mean, fortin_interpolate, AnalyticField, Quadrature};
use crate::macgrid::MacGrid;
use crate::spatial_ops::{divergence, laplacian, pressure_gradient};
use crate::sparse::CooMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum LinearSolver {
    /// Sparse LU factorization.
    #[default]
    Direct,
    /// Sparse LU followed by iterative refinement until the relative
    /// residual drops below `tol` (at most `max_iter` sweeps).
    Refined { tol: f64, max_iter: usize },
}

impl LinearSolver {
    /// Two refinement sweeps; keeps divergence rows at round-off on fine grids.
    pub const REFINED: LinearSolver = LinearSolver::Refined { tol: 1e-15, max_iter: 2 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PressureGauge {
    /// One scalar multiplier for the volume-weighted mean.
    #[default]
    MeanMultiplier,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub linear: LinearSolver,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Bound on the relative momentum residual checked after Picard stops.
    pub residual_tol: f64,
    pub scheme: ConvectionScheme,
    pub dt: f64,
    pub horizon: f64,
    pub gauge: PressureGauge,
    pub seed: Option<u64>,
    /// Evaluate the dual norm of the discrete time derivative at every step.
    pub dual_norm_estimate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            linear: LinearSolver::REFINED,
            picard_tol: 1e-10,
            picard_max_iter: 50,
            residual_tol: 1e-8,
            scheme: ConvectionScheme::Centred,
            dt: 0.01,
            horizon: 0.1,
            gauge: PressureGauge::MeanMultiplier,
            seed: None,
            dual_norm_estimate: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.picard_tol > 0.0) || !(self.residual_tol > 0.0) {
            return Err(MacError::InvalidArgument("tolerances must be positive".into()));
        }
        if self.picard_max_iter == 0 {
            return Err(MacError::InvalidArgument("picard_max_iter must be at least 1".into()));
        }
        if let LinearSolver::Refined { tol, max_iter } = self.linear {
            if !(tol > 0.0) || max_iter == 0 {
                return Err(MacError::InvalidArgument("refinement needs tol > 0 and max_iter >= 1".into()));
            }
        }
        Ok(())
    }

    fn validate_unsteady(&self) -> Result<usize> {
        self.validate()?;
        if !(self.dt > 0.0) || !(self.horizon > 0.0) {
            return Err(MacError::InvalidArgument("time step and horizon must be positive".into()));
        }
        let n = (self.horizon / self.dt).round();
        if (n * self.dt - self.horizon).abs() > 1e-9 * self.horizon {
            return Err(MacError::InvalidArgument(format!(
                "horizon {} is not a whole number of steps of {}",
                self.horizon, self.dt
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveReport {
    pub kind: String,
    pub converged: bool,
    pub steps: usize,
    pub picard_iterations: Vec<usize>,
    pub linear_residuals: Vec<f64>,
    /// Relative H¹ increments of the Picard iterates.
    pub nonlinear_residuals: Vec<f64>,
    /// Relative momentum residual of the returned state.
    pub final_residual: f64,
    pub velocity_h1: f64,
    pub velocity_l2: f64,
    pub pressure_l2: f64,
    /// `½ ‖u^n‖²` for `n = 0..`.
    pub energy: Vec<f64>,
    pub estimates: Vec<(String, f64)>,
    pub seed: Option<u64>,
    pub wall_time: f64,
}

impl SolveReport {
    pub fn estimate(&self, name: &str) -> Option<f64> {
        self.estimates.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn set(&mut self, name: &str, v: f64) {
        match self.estimates.iter_mut().find(|(k, _)| k == name) {
            Some(e) => e.1 = v,
            None => self.estimates.push((name.to_string(), v)),
        }
    }
}

/// Mapping between faces/cells and system unknowns.
#[derive(Clone, Debug)]
pub struct Layout {
    pub face_unknown: Vec<Vec<Option<usize>>>,
    pub unknown_face: Vec<(usize, usize)>,
    pub n_vel: usize,
    pub n_cells: usize,
}

impl Layout {
    pub fn new(grid: &MacGrid) -> Self {
        let mut face_unknown = Vec::with_capacity(grid.dim());
        let mut unknown_face = Vec::new();
        for i in 0..grid.dim() {
            let map = grid.faces[i]
                .interior
                .iter()
                .enumerate()
                .map(|(s, int)| {
                    int.then(|| {
                        unknown_face.push((i, s));
                        unknown_face.len() - 1
                    })
                })
                .collect();
            face_unknown.push(map);
        }
        let n_vel = unknown_face.len();
        Layout { face_unknown, unknown_face, n_vel, n_cells: grid.num_cells() }
    }

    pub fn total(&self) -> usize {
        self.n_vel + self.n_cells + 1
    }

    pub fn gather(&self, u: &VelocityField) -> Vec<f64> {
        self.unknown_face.iter().map(|&(i, s)| u.comps[i][s]).collect()
    }

    pub fn scatter(&self, grid: &MacGrid, x: &[f64]) -> VelocityField {
        let mut u = VelocityField::zeros(grid);
        for (r, &(i, s)) in self.unknown_face.iter().enumerate() {
            u.comps[i][s] = x[r];
        }
        u
    }
}

/// What enters the velocity block.
#[derive(Clone, Copy, Debug)]
pub struct MomentumTerms<'a> {
    pub diffusion: bool,
    /// Coefficient of the mass term `|D_σ| u_σ` (e.g. `1/δt`).
    pub mass: f64,
    pub convecting: Option<(&'a VelocityField, ConvectionScheme)>,
}

impl MomentumTerms<'_> {
    pub fn stokes() -> Self {
        MomentumTerms { diffusion: true, mass: 0.0, convecting: None }
    }
}

/// Scaled velocity block: row `σ` holds `|D_σ|` times the momentum operator.
pub fn assemble_momentum(grid: &MacGrid, layout: &Layout, terms: &MomentumTerms) -> CooMatrix {
    let mut a = CooMatrix::new(layout.n_vel, layout.n_vel);
    for i in 0..grid.dim() {
        let map = &layout.face_unknown[i];
        if terms.mass != 0.0 {
            for (s, r) in map.iter().enumerate() {
                if let Some(r) = r {
                    a.push(*r, *r, terms.mass * grid.faces[i].dual_measure[s]);
                }
            }
        }
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let flux = terms.convecting.map(|(w, _)| mass_fluxes(grid, w, i, j));
            for e in 0..d.len() {
                let lo = d.lo[e].and_then(|s| map[s]);
                let hi = d.hi[e].and_then(|s| map[s]);
                if terms.diffusion {
                    let c = d.area[e] / d.dist[e];
                    for (row, other) in [(lo, hi), (hi, lo)] {
                        if let Some(r) = row {
                            a.push(r, r, c);
                            if let Some(q) = other {
                                a.push(r, q, -c);
                            }
                        }
                    }
                }
                if let (Some(flux), Some((_, scheme))) = (&flux, terms.convecting) {
                    let f = flux[e];
                    let (wl, wh) = match scheme {
                        ConvectionScheme::Centred => (0.5, 0.5),
                        ConvectionScheme::Upwind if f >= 0.0 => (1.0, 0.0),
                        ConvectionScheme::Upwind => (0.0, 1.0),
                    };
                    for (row, sign) in [(lo, 1.0), (hi, -1.0)] {
                        if let Some(r) = row {
                            if let Some(q) = lo {
                                a.push(r, q, sign * f * wl);
                            }
                            if let Some(q) = hi {
                                a.push(r, q, sign * f * wh);
                            }
                        }
                    }
                }
            }
        }
    }
    a
}

/// Scaled gradient block `|D_σ| (∇p)_σ`, rows velocity unknowns, columns cells.
pub fn assemble_scaled_gradient(grid: &MacGrid, layout: &Layout) -> CooMatrix {
    let mut g = CooMatrix::new(layout.n_vel, layout.n_cells);
    for (r, &(i, s)) in layout.unknown_face.iter().enumerate() {
        let fs = &grid.faces[i];
        if let (Some(k), Some(l)) = fs.cells[s] {
            g.push(r, l, fs.measure[s]);
            g.push(r, k, -fs.measure[s]);
        }
    }
    g
}

/// Scaled divergence block `-|K| (div u)_K`, rows cells, columns velocity unknowns.
pub fn assemble_scaled_divergence(grid: &MacGrid, layout: &Layout) -> CooMatrix {
    let mut b = CooMatrix::new(layout.n_cells, layout.n_vel);
    for (r, &(i, s)) in layout.unknown_face.iter().enumerate() {
        let fs = &grid.faces[i];
        let (k, l) = fs.cells[s];
        if let Some(k) = k {
            b.push(k, r, -fs.measure[s]);
        }
        if let Some(l) = l {
            b.push(l, r, fs.measure[s]);
        }
    }
    b
}

#[derive(Clone, Debug)]
pub struct SaddleSystem {
    pub layout: Layout,
    pub a: CooMatrix,
    pub b: CooMatrix,
    pub bt: CooMatrix,
    /// Cell volumes: coefficients of the mean constraint.
    pub mean: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl SaddleSystem {
    /// Assemble `terms` with right-hand side `|D_σ| (f_σ + mass * u_prev_σ)`.
    pub fn assemble(
        grid: &MacGrid,
        terms: &MomentumTerms,
        f: &VelocityField,
        u_prev: Option<&VelocityField>,
    ) -> Result<Self> {
        f.check(grid)?;
        let layout = Layout::new(grid);
        let a = assemble_momentum(grid, &layout, terms);
        let bt = assemble_scaled_gradient(grid, &layout);
        let b = assemble_scaled_divergence(grid, &layout);
        let mut rhs = vec![0.0; layout.total()];
        for (r, &(i, s)) in layout.unknown_face.iter().enumerate() {
            let mut v = f.comps[i][s];
            if let Some(up) = u_prev {
                v += terms.mass * up.comps[i][s];
            }
            rhs[r] = grid.faces[i].dual_measure[s] * v;
        }
        Ok(SaddleSystem { layout, a, b, bt, mean: grid.cell_volume.clone(), rhs })
    }

    /// The full square system matrix.
    pub fn matrix(&self) -> CooMatrix {
        let nv = self.layout.n_vel;
        let nc = self.layout.n_cells;
        let lam = nv + nc;
        let mut m = CooMatrix::new(self.layout.total(), self.layout.total());
        m.entries.extend(self.a.entries.iter().cloned());
        m.entries.extend(self.bt.entries.iter().map(|&(r, c, v)| (r, nv + c, v)));
        m.entries.extend(self.b.entries.iter().map(|&(r, c, v)| (nv + r, c, v)));
        for (k, v) in self.mean.iter().enumerate() {
            m.push(nv + k, lam, *v);
            m.push(lam, nv + k, *v);
        }
        m
    }

    /// Solve; returns the unknown vector and the relative linear residual.
    pub fn solve_raw(&self, linear: LinearSolver) -> Result<(Vec<f64>, f64)> {
        let m = self.matrix();
        let sp = m.to_faer()?;
        let lu = sp.sp_lu().map_err(|e| MacError::LinearSolver(format!("LU failed: {e:?}")))?;
        let n = self.layout.total();
        let solve = |r: &[f64]| {
            let mut x = faer::Mat::<f64>::from_fn(n, 1, |i, _| r[i]);
            lu.solve_in_place(x.as_mut());
            (0..n).map(|i| x[(i, 0)]).collect::<Vec<f64>>()
        };
        let mut x = solve(&self.rhs);
        let scale = self.rhs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let residual = |x: &[f64]| -> (Vec<f64>, f64) {
            let ax = m.matvec(x);
            let r: Vec<f64> = self.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
            let rn = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let rel = if scale > 0.0 { rn / scale } else { rn };
            (r, rel)
        };
        let (mut r, mut rel) = residual(&x);
        if let LinearSolver::Refined { tol, max_iter } = linear {
            for _ in 0..max_iter {
                if rel <= tol {
                    break;
                }
                let dx = solve(&r);
                x.iter_mut().zip(&dx).for_each(|(a, b)| *a += b);
                (r, rel) = residual(&x);
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(MacError::LinearSolver("non-finite solution (singular system?)".into()));
        }
        Ok((x, rel))
    }

    pub fn solve(&self, grid: &MacGrid, linear: LinearSolver) -> Result<(VelocityField, PressureField, f64)> {
        let (x, rel) = self.solve_raw(linear)?;
        let u = self.layout.scatter(grid, &x);
        let nv = self.layout.n_vel;
        let mut p = PressureField { values: x[nv..nv + self.layout.n_cells].to_vec(), zero_mean: true };
        // the multiplier formulation already yields zero mean; remove round-off
        let m = p.mean(grid);
        p.values.iter_mut().for_each(|v| *v -= m);
        Ok((u, p, rel))
    }
}

/// Matrix-free momentum residual
/// `mass (u - u_prev) - Δu + C(w)u + ∇p - f` on interior faces.
pub fn momentum_residual(
    grid: &MacGrid,
    u: &VelocityField,
    p: &PressureField,
    f: &VelocityField,
    mass: f64,
    u_prev: Option<&VelocityField>,
    convecting: Option<(&VelocityField, ConvectionScheme)>,
) -> Result<VelocityField> {
    let mut r = laplacian(grid, u)?;
    r.axpy(1.0, &pressure_gradient(grid, p)?);
    r.axpy(-1.0, f);
    if let Some((w, scheme)) = convecting {
        r.axpy(1.0, &convection_apply(grid, w, u, scheme)?);
    }
    if mass != 0.0 {
        r.axpy(mass, u);
        if let Some(up) = u_prev {
            r.axpy(-mass, up);
        }
    }
    r.enforce_boundary(grid);
    Ok(r)
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

pub fn solve_steady_stokes(grid: &MacGrid, f: &VelocityField) -> Result<(VelocityField, PressureField, SolveReport)> {
    solve_steady_stokes_with(grid, f, &SolverConfig::default())
}

pub fn solve_steady_stokes_with(
    grid: &MacGrid,
    f: &VelocityField,
    config: &SolverConfig,
) -> Result<(VelocityField, PressureField, SolveReport)> {
    config.validate()?;
    let t0 = Instant::now();
    let sys = SaddleSystem::assemble(grid, &MomentumTerms::stokes(), f, None)?;
    let (u, p, rel) = sys.solve(grid, config.linear)?;
    let r = momentum_residual(grid, &u, &p, f, 0.0, None, None)?;
    let fl2 = l2_norm(grid, f)?;
    let mut rep = SolveReport {
        kind: "steady-stokes".into(),
        converged: true,
        linear_residuals: vec![rel],
        final_residual: relative(l2_norm(grid, &r)?, fl2),
        seed: config.seed,
        ..Default::default()
    };
    finish_steady(grid, &u, &p, f, &mut rep)?;
    rep.wall_time = t0.elapsed().as_secs_f64();
    Ok((u, p, rep))
}

fn finish_steady(grid: &MacGrid, u: &VelocityField, p: &PressureField, f: &VelocityField, rep: &mut SolveReport) -> Result<()> {
    rep.velocity_h1 = h1_norm(grid, u)?;
    rep.velocity_l2 = l2_norm(grid, u)?;
    rep.pressure_l2 = l2_norm(grid, p)?;
    rep.energy = vec![0.5 * rep.velocity_l2 * rep.velocity_l2];
    let fl2 = l2_norm(grid, f)?;
    rep.set("h1_velocity", rep.velocity_h1);
    rep.set("stability_bound", grid.diameter() * fl2);
    rep.set("max_abs_divergence", divergence(grid, u)?.max_abs());
    Ok(())
}

/// Picard iteration for `mass (u - u_prev) - Δu + C(u)u + ∇p = f`, starting from `guess`.
fn picard(
    grid: &MacGrid,
    f: &VelocityField,
    mass: f64,
    u_prev: Option<&VelocityField>,
    guess: &VelocityField,
    config: &SolverConfig,
    rep: &mut SolveReport,
) -> Result<(VelocityField, PressureField, usize, bool, f64)> {
    let mut w = guess.clone();
    let mut last = None;
    let mut ok = false;
    let mut iters = 0;
    for _ in 0..config.picard_max_iter {
        iters += 1;
        let terms = MomentumTerms { diffusion: true, mass, convecting: Some((&w, config.scheme)) };
        let sys = SaddleSystem::assemble(grid, &terms, f, u_prev)?;
        let (u, p, rel) = sys.solve(grid, config.linear)?;
        rep.linear_residuals.push(rel);
        let inc = h1_norm(grid, &u.sub(&w))?;
        let nrm = h1_norm(grid, &u)?;
        let rinc = relative(inc, nrm);
        rep.nonlinear_residuals.push(rinc);
        w = u;
        last = Some(p);
        if inc <= config.picard_tol * nrm || (inc == 0.0 && nrm == 0.0) {
            ok = true;
            break;
        }
        if !inc.is_finite() {
            break;
        }
    }
    let p = last.expect("at least one iteration");
    let r = momentum_residual(grid, &w, &p, f, mass, u_prev, Some((&w, config.scheme)))?;
    let mut scale = l2_norm(grid, f)?;
    if let Some(up) = u_prev {
        scale += mass * l2_norm(grid, up)?;
    }
    let res = relative(l2_norm(grid, &r)?, scale);
    let ok = ok && res <= config.residual_tol;
    Ok((w, p, iters, ok, res))
}

pub fn solve_steady_ns(
    grid: &MacGrid,
    f: &VelocityField,
    config: &SolverConfig,
) -> Result<(VelocityField, PressureField, SolveReport)> {
    config.validate()?;
    let t0 = Instant::now();
    let mut rep = SolveReport { kind: format!("steady-ns-{}", config.scheme), seed: config.seed, ..Default::default() };
    let (u, p, iters, ok, res) = picard(grid, f, 0.0, None, &VelocityField::zeros(grid), config, &mut rep)?;
    rep.picard_iterations.push(iters);
    rep.converged = ok;
    rep.final_residual = res;
    finish_steady(grid, &u, &p, f, &mut rep)?;
    rep.wall_time = t0.elapsed().as_secs_f64();
    Ok((u, p, rep))
}

/// Outcome of one implicit Euler step.
#[derive(Clone, Debug)]
pub struct StepInfo {
    pub picard_iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

/// One implicit Euler step of the Navier-Stokes scheme with inner Picard.
pub fn step_unsteady(
    grid: &MacGrid,
    u_n: &VelocityField,
    f_slab: &VelocityField,
    config: &SolverConfig,
) -> Result<(VelocityField, PressureField, StepInfo)> {
    config.validate()?;
    if !(config.dt > 0.0) {
        return Err(MacError::InvalidArgument("time step must be positive".into()));
    }
    u_n.check(grid)?;
    let mut scratch = SolveReport::default();
    let (u, p, iters, ok, res) = picard(grid, f_slab, 1.0 / config.dt, Some(u_n), u_n, config, &mut scratch)?;
    Ok((u, p, StepInfo { picard_iterations: iters, converged: ok, residual: res }))
}

/// One implicit Euler step of the Stokes scheme (single linear solve).
pub fn step_unsteady_stokes(
    grid: &MacGrid,
    u_n: &VelocityField,
    f_slab: &VelocityField,
    config: &SolverConfig,
) -> Result<(VelocityField, PressureField, f64)> {
    let mass = 1.0 / config.dt;
    let terms = MomentumTerms { diffusion: true, mass, convecting: None };
    let sys = SaddleSystem::assemble(grid, &terms, f_slab, Some(u_n))?;
    sys.solve(grid, config.linear)
}

/// `∫_{t0}^{t1} ‖f‖²_{L²}` by tensor Gauss quadrature over the cells.
fn forcing_slab_sq(grid: &MacGrid, f: &AnalyticField, t0: f64, t1: f64) -> Result<f64> {
    let q = Quadrature::gauss(f.order)?;
    let dim = grid.dim();
    let mut s = 0.0;
    for (t, wt) in q.interval(t0, t1) {
        for c in 0..grid.num_cells() {
            s += wt * q.integrate(dim, &grid.cell_box(c), |x| {
                let v = f.eval_at(x, t);
                (0..dim).map(|i| v[i] * v[i]).sum::<f64>()
            });
        }
    }
    Ok(s)
}

fn time_loop(
    grid: &MacGrid,
    u0: &AnalyticField,
    f: &AnalyticField,
    config: &SolverConfig,
    navier_stokes: bool,
) -> Result<(TimeSeriesField, SolveReport)> {
    let steps = config.validate_unsteady()?;
    let t0 = Instant::now();
    let dt = config.dt;
    let mut rep = SolveReport {
        kind: if navier_stokes { format!("unsteady-ns-{}", config.scheme) } else { "unsteady-stokes".into() },
        converged: true,
        seed: config.seed,
        ..Default::default()
    };
    let init = AnalyticField::vector(|x, _| u0.eval_at(x, 0.0)).with_order(u0.order);
    let mut u = fortin_interpolate(grid, &init)?;
    let u_init = u.clone();
    let l2_0 = l2_norm(grid, &u)?;
    rep.energy.push(0.5 * l2_0 * l2_0);
    let mut series = TimeSeriesField { dt, snapshots: vec![u.clone()], pressures: vec![PressureField::zeros(grid)] };

    let mut sum_dt_h1 = 0.0;
    let mut sum_dt_dtu = 0.0;
    let mut sum_dt_f = 0.0;
    let mut sum_dt_p = 0.0;
    let mut sum_dt_dual = 0.0;
    let mut forcing_exact = 0.0;
    let mut max_div_inc: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for n in 0..steps {
        let (ta, tb) = (n as f64 * dt, (n + 1) as f64 * dt);
        let fs = dual_cell_slab_mean(grid, f, ta, tb)?;
        let (un, p) = if navier_stokes {
            let (un, p, info) = step_unsteady(grid, &u, &fs, config)?;
            rep.picard_iterations.push(info.picard_iterations);
            rep.nonlinear_residuals.push(info.residual);
            worst_res = worst_res.max(info.residual);
            rep.converged &= info.converged;
            (un, p)
        } else {
            let (un, p, rel) = step_unsteady_stokes(grid, &u, &fs, config)?;
            rep.linear_residuals.push(rel);
            let r = momentum_residual(grid, &un, &p, &fs, 1.0 / dt, Some(&u), None)?;
            let scale = l2_norm(grid, &fs)? + l2_norm(grid, &u)? / dt;
            let res = relative(l2_norm(grid, &r)?, scale);
            worst_res = worst_res.max(res);
            (un, p)
        };
        let mut inc = un.sub(&u);
        max_div_inc = max_div_inc.max(divergence(grid, &inc)?.max_abs());
        inc.scale(1.0 / dt);
        let dtu = l2_norm(grid, &inc)?;
        sum_dt_dtu += dt * dtu * dtu;
        if config.dual_norm_estimate {
            let dn = crate::fields::dual_norm(grid, &inc)?;
            sum_dt_dual += dt * dn * dn;
        }
        let h1 = h1_norm(grid, &un)?;
        sum_dt_h1 += dt * h1 * h1;
        let fl2 = l2_norm(grid, &fs)?;
        sum_dt_f += dt * fl2 * fl2;
        if !navier_stokes {
            forcing_exact += forcing_slab_sq(grid, f, ta, tb)?;
        }
        let pl2 = l2_norm(grid, &p)?;
        sum_dt_p += dt * pl2 * pl2;
        let l2 = l2_norm(grid, &un)?;
        rep.energy.push(0.5 * l2 * l2);
        u = un;
        series.snapshots.push(u.clone());
        series.pressures.push(p);
    }
    rep.steps = steps;
    rep.final_residual = worst_res;
    rep.velocity_h1 = h1_norm(grid, &u)?;
    rep.velocity_l2 = l2_norm(grid, &u)?;
    rep.pressure_l2 = series.pressures.last().map(|p| l2_norm(grid, p)).transpose()?.unwrap_or(0.0);
    let h1_0 = h1_norm(grid, &u_init)?;
    rep.set("l2_initial_sq", l2_0 * l2_0);
    rep.set("h1_initial_sq", h1_0 * h1_0);
    rep.set("l2_final_sq", rep.velocity_l2 * rep.velocity_l2);
    rep.set("h1_final_sq", rep.velocity_h1 * rep.velocity_h1);
    rep.set("sum_dt_h1_sq", sum_dt_h1);
    rep.set("sum_dt_dtu_sq", sum_dt_dtu);
    rep.set("sum_dt_forcing_sq", sum_dt_f);
    rep.set("pressure_l2l2", sum_dt_p.sqrt());
    rep.set("max_abs_divergence_increment", max_div_inc);
    if config.dual_norm_estimate {
        rep.set("sum_dt_dual_dtu_sq", sum_dt_dual);
    }
    if !navier_stokes {
        rep.set("forcing_l2l2_sq", forcing_exact);
    }
    rep.wall_time = t0.elapsed().as_secs_f64();
    Ok((series, rep))
}

/// Implicit Euler Navier-Stokes run from `u⁰ = P̃_E u₀` with slab-mean forcing.
pub fn run_unsteady(
    grid: &MacGrid,
    u0: &AnalyticField,
    f: &AnalyticField,
    config: &SolverConfig,
) -> Result<(TimeSeriesField, SolveReport)> {
    time_loop(grid, u0, f, config, true)
}

/// Implicit Euler Stokes run (no convection, one linear solve per step).
pub fn solve_unsteady_stokes(
    grid: &MacGrid,
    u0: &AnalyticField,
    f: &AnalyticField,
    config: &SolverConfig,
) -> Result<(TimeSeriesField, SolveReport)> {
    time_loop(grid, u0, f, config, false)
}

/// Discrete Helmholtz projection: the divergence-free field closest to `v`
/// in the dual-cell L² norm.
pub fn project_divergence_free(grid: &MacGrid, v: &VelocityField) -> Result<VelocityField> {
    let terms = MomentumTerms { diffusion: false, mass: 1.0, convecting: None };
    let sys = SaddleSystem::assemble(grid, &terms, &VelocityField::zeros(grid), Some(v))?;
    let (w, _, _) = sys.solve(grid, LinearSolver::REFINED)?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macgrid::GridSpec;

    fn grid() -> MacGrid {
        MacGrid::new(&GridSpec::new(vec![vec![0.0, 0.15, 0.4, 0.7, 1.0], vec![0.0, 0.3, 0.5, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn zero_forcing_gives_zero() {
        let g = grid();
        let f = VelocityField::zeros(&g);
        let (u, p, rep) = solve_steady_stokes(&g, &f).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(p.max_abs(), 0.0);
        assert!(rep.converged);
        let (u, _, rep) = solve_steady_ns(&g, &f, &SolverConfig::default()).unwrap();
        assert_eq!(u.max_abs(), 0.0);
        assert_eq!(rep.picard_iterations, vec![1]);
    }

    #[test]
    fn gradient_forcing_is_absorbed_by_pressure() {
        let g = grid();
        let q = PressureField::from_fn(&g, |c| (c as f64 * 0.37).sin());
        let f = pressure_gradient(&g, &q).unwrap();
        let (u, p, _) = solve_steady_stokes(&g, &f).unwrap();
        assert!(u.max_abs() < 1e-12);
        let mut q0 = q.clone();
        q0.project_zero_mean(&g);
        for (a, b) in p.values.iter().zip(&q0.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_block_is_transpose_of_divergence_block() {
        let g = grid();
        let l = Layout::new(&g);
        let gt = assemble_scaled_gradient(&g, &l).compressed();
        let b = assemble_scaled_divergence(&g, &l).transpose().compressed();
        assert_eq!(gt.len(), b.len());
        for (k, v) in &gt {
            assert_eq!(b[k], *v);
        }
    }

    #[test]
    fn projection_is_divergence_free() {
        let g = grid();
        let v = VelocityField::from_fn(&g, |i, s| ((i * 31 + s * 7) as f64).cos());
        let w = project_divergence_free(&g, &v).unwrap();
        assert!(divergence(&g, &w).unwrap().max_abs() < 1e-11);
        assert!(w.is_admissible(&g));
    }

    #[test]
    fn config_validation() {
        let c = SolverConfig { picard_max_iter: 0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SolverConfig { dt: 0.03, horizon: 0.1, ..Default::default() };
        assert!(c.validate_unsteady().is_err());
    }
}
