//! Individual verification checks. Each one draws its own random fields
//! and returns a normalized violation, compared against a tolerance by the
//! suite runner. Identities report `|lhs - rhs| / scale` with `scale` the sum
//! of absolute values of the summed terms; inequalities report the relative
//! excess (zero when the bound holds).

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::convection::{
    convection_sums, dual_cell_mass_balance, mass_fluxes, trilinear_b, trilinear_b_reconstructed, upwind_dissipation,
    ConvectionScheme,
};
use crate::error::Result;
use crate::fields::{h1_inner, h1_norm, l2_inner, l2_norm, partial_derivative, VelocityField};
use crate::interpolation::{cell_mean, fortin_raw, AnalyticField};
use crate::macgrid::MacGrid;
use crate::random::{random_divergence_free, random_pressure, random_velocity};
use crate::solver::{solve_steady_ns, solve_steady_stokes, step_unsteady, SolverConfig};
use crate::spatial_ops::{
    assemble_laplacian, divergence, divergence_from_partials, laplacian, mixed_integral, partition_integral,
    pressure_gradient, reconstruct, reconstruction_constant, FaceNumbering, ReconstructionWeights,
};

pub type CheckFn = fn(&mut ChaCha8Rng, &MacGrid) -> Result<f64>;

/// Catalog of properties the suite must cover: `(key, statement)`.
pub const CATALOG: &[(&str, &str)] = &[
    ("div-grad-duality", "∫ q div v + ∫ ∇q·v = 0 for admissible v"),
    ("laplacian-adjoint", "∫ -Δu·v equals the discrete H¹₀ product"),
    ("skew-symmetry", "centred b(u,v,v) = 0 and upwind b(u,v,v) >= 0 for discretely div-free u"),
    ("reconstruction-stability", "‖R v‖₂ <= (2 C_V)^½ ‖v‖₂"),
    ("b-reformulation", "flux form of b equals the reconstruction form"),
    ("integration-by-parts", "∫ ∂_j u v = -∫ R u ∂_j v with volume weights"),
    ("fortin", "div P̃φ = P div φ"),
    ("energy-estimates", "discrete stability and energy inequalities"),
];

#[derive(Clone, Copy, Debug)]
pub struct Check {
    pub name: &'static str,
    pub lemma: &'static str,
    pub tolerance: f64,
    pub run: CheckFn,
}

pub fn registry() -> Vec<Check> {
    let c = |name, lemma, tolerance, run| Check { name, lemma, tolerance, run };
    vec![
        c("duality", "div-grad-duality", 1e-12, duality as CheckFn),
        c("divergence-partials", "div-grad-duality", 1e-13, divergence_partials),
        c("laplacian-adjoint", "laplacian-adjoint", 1e-12, laplacian_adjoint),
        c("laplacian-assembly", "laplacian-adjoint", 1e-12, laplacian_assembly),
        c("dual-mass-balance", "skew-symmetry", 1e-13, dual_mass_balance),
        c("centred-skew", "skew-symmetry", 1e-11, centred_skew),
        c("upwind-nonnegative", "skew-symmetry", 1e-12, upwind_nonnegative),
        c("upwind-excess", "skew-symmetry", 1e-12, upwind_excess),
        c("reconstruction-stability", "reconstruction-stability", 1e-12, reconstruction_stability),
        c("b-reformulation-centred", "b-reformulation", 1e-12, b_reformulation_centred),
        c("b-reformulation-upwind", "b-reformulation", 1e-12, b_reformulation_upwind),
        c("integration-by-parts", "integration-by-parts", 1e-12, integration_by_parts),
        c("fortin-polynomial", "fortin", 1e-12, fortin_polynomial),
        c("fortin-trigonometric", "fortin", 1e-8, fortin_trigonometric),
        c("steady-stability", "energy-estimates", 1e-10, steady_stability),
        c("energy-step-centred", "energy-estimates", 1e-10, energy_step_centred),
        c("energy-step-upwind", "energy-estimates", 1e-10, energy_step_upwind),
    ]
}

/// Catalog keys without a registered check.
pub fn uncovered(registry: &[Check]) -> Vec<&'static str> {
    CATALOG
        .iter()
        .map(|(k, _)| *k)
        .filter(|k| !registry.iter().any(|c| c.lemma == *k))
        .collect()
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff.abs() / scale
    } else {
        diff.abs()
    }
}

fn excess(lhs: f64, rhs: f64) -> f64 {
    if lhs <= rhs {
        0.0
    } else if rhs > 0.0 {
        (lhs - rhs) / rhs
    } else {
        lhs - rhs
    }
}

fn opt(v: &[f64], s: Option<usize>) -> f64 {
    s.map_or(0.0, |k| v[k].abs())
}

/// `∫ q div v` and `∫ ∇q·v` for random q, v, plus the absolute term sum.
pub fn duality_terms(grid: &MacGrid, q: &crate::fields::PressureField, v: &VelocityField) -> Result<(f64, f64, f64)> {
    let div = divergence(grid, v)?;
    let a: f64 = (0..grid.num_cells()).map(|c| grid.cell_volume[c] * q.values[c] * div.values[c]).sum();
    let b = l2_inner(grid, &pressure_gradient(grid, q)?, v)?;
    let mut scale = 0.0;
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            let (k, l) = fs.cells[s];
            scale += fs.measure[s] * v.comps[i][s].abs() * (opt(&q.values, k) + opt(&q.values, l));
        }
    }
    Ok((a, b, scale))
}

pub fn duality(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let q = random_pressure(rng, grid);
    let v = random_velocity(rng, grid);
    let (a, b, scale) = duality_terms(grid, &q, &v)?;
    Ok(rel(a + b, scale))
}

pub fn divergence_partials(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let v = random_velocity(rng, grid);
    let a = divergence(grid, &v)?;
    let b = divergence_from_partials(grid, &v)?;
    let mut worst: f64 = 0.0;
    for c in 0..grid.num_cells() {
        let scale: f64 = grid
            .cell_faces(c)
            .iter()
            .map(|&(i, s, _)| grid.faces[i].measure[s] * v.comps[i][s].abs())
            .sum::<f64>()
            / grid.cell_volume[c];
        worst = worst.max(rel(a.values[c] - b.values[c], scale));
    }
    Ok(worst)
}

/// `(∫ -Δu·v, [u, v], scale)`.
pub fn laplacian_terms(grid: &MacGrid, u: &VelocityField, v: &VelocityField) -> Result<(f64, f64, f64)> {
    let a = l2_inner(grid, &laplacian(grid, u)?, v)?;
    let b = h1_inner(grid, u, v)?;
    let mut scale = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            for e in 0..d.len() {
                let du = opt(&u.comps[i], d.lo[e]) + opt(&u.comps[i], d.hi[e]);
                let dv = opt(&v.comps[i], d.lo[e]) + opt(&v.comps[i], d.hi[e]);
                scale += d.area[e] / d.dist[e] * du * dv;
            }
        }
    }
    Ok((a, b, scale))
}

pub fn laplacian_adjoint(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let u = random_velocity(rng, grid);
    let v = random_velocity(rng, grid);
    let (a, b, scale) = laplacian_terms(grid, &u, &v)?;
    let (c, _, _) = laplacian_terms(grid, &v, &u)?;
    Ok(rel(a - b, scale).max(rel(a - c, scale)))
}

pub fn laplacian_assembly(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let u = random_velocity(rng, grid);
    let num = FaceNumbering::new(grid);
    let y = num.unflatten(grid, &assemble_laplacian(grid).matvec(&num.flatten(&u)));
    let z = laplacian(grid, &u)?;
    let scale = z.max_abs().max(u.max_abs());
    Ok(rel(y.sub(&z).max_abs(), scale))
}

pub fn dual_mass_balance(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let u = random_divergence_free(rng, grid)?;
    let bal = dual_cell_mass_balance(grid, &u)?;
    let mut abs = VelocityField::zeros(grid);
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let f = mass_fluxes(grid, &u, i, j);
            for e in 0..d.len() {
                for s in [d.lo[e], d.hi[e]].into_iter().flatten() {
                    abs.comps[i][s] += f[e].abs();
                }
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..grid.dim() {
        for s in 0..grid.num_faces(i) {
            if grid.faces[i].interior[s] {
                worst = worst.max(rel(bal.comps[i][s], abs.comps[i][s]));
            }
        }
    }
    Ok(worst)
}

/// `Σ_ε |F_ε| (|v_lo| + |v_hi|)(|w_lo| + |w_hi|)`: bounds every term of `b(u, v, w)`.
pub fn trilinear_scale(grid: &MacGrid, u: &VelocityField, v: &VelocityField, w: &VelocityField) -> f64 {
    let mut s = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let f = mass_fluxes(grid, u, i, j);
            for e in 0..d.len() {
                let a = opt(&v.comps[i], d.lo[e]) + opt(&v.comps[i], d.hi[e]);
                let b = opt(&w.comps[i], d.lo[e]) + opt(&w.comps[i], d.hi[e]);
                s += f[e].abs() * a * b;
            }
        }
    }
    s
}

pub fn centred_skew(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let u = random_divergence_free(rng, grid)?;
    let v = random_velocity(rng, grid);
    let w = random_velocity(rng, grid);
    let c = ConvectionScheme::Centred;
    let bvv = trilinear_b(grid, &u, &v, &v, c)?;
    let sym = trilinear_b(grid, &u, &v, &w, c)? + trilinear_b(grid, &u, &w, &v, c)?;
    Ok(rel(bvv, trilinear_scale(grid, &u, &v, &v)).max(rel(sym, trilinear_scale(grid, &u, &v, &w))))
}

pub fn upwind_nonnegative(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let u = random_divergence_free(rng, grid)?;
    let v = random_velocity(rng, grid);
    let b = trilinear_b(grid, &u, &v, &v, ConvectionScheme::Upwind)?;
    Ok(if b >= 0.0 { 0.0 } else { rel(b, trilinear_scale(grid, &u, &v, &v)) })
}

/// Upwind minus centred equals `½ Σ |F| (v_lo - v_hi)²`.
pub fn upwind_excess(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let u = random_divergence_free(rng, grid)?;
    let v = random_velocity(rng, grid);
    let up = trilinear_b(grid, &u, &v, &v, ConvectionScheme::Upwind)?;
    let ce = trilinear_b(grid, &u, &v, &v, ConvectionScheme::Centred)?;
    let t2 = upwind_dissipation(grid, &u, &v)?;
    Ok(rel(up - ce - t2, trilinear_scale(grid, &u, &v, &v)))
}

/// Worst relative excess of `‖R v‖₂` over `(2 C_V)^½ ‖v‖₂` across the
/// centred, upwind, volume-weighted, half-boundary and mass-flux weights.
pub fn reconstruction_stability(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let v = random_velocity(rng, grid);
            let vi = &v.comps[i];
            let flux: Vec<f64> = (0..d.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let random_alpha: Vec<f64> = (0..d.len()).map(|_| rng.random::<f64>()).collect();
            let nv: f64 = vi.iter().zip(&grid.faces[i].dual_measure).map(|(a, m)| m * a * a).sum::<f64>().sqrt();
            let bound = (2.0 * reconstruction_constant(grid, i, j)).sqrt() * nv;
            for w in [
                ReconstructionWeights::centred(grid, i, j),
                ReconstructionWeights::upwind(grid, &flux, i, j),
                ReconstructionWeights::integration_by_parts(grid, i, j),
                ReconstructionWeights::half_boundary(grid, i, j),
                ReconstructionWeights::custom(i, j, random_alpha.clone()),
            ] {
                let r = reconstruct(grid, vi, &w)?;
                let nr = partition_integral(grid, i, j, &r, &r).sqrt();
                worst = worst.max(excess(nr, bound));
            }
            if i != j {
                // mass-flux weights live on the (j, i) partition and act on component j
                let vj = &v.comps[j];
                let r = reconstruct(grid, vj, &ReconstructionWeights::mass_flux(grid, i, j))?;
                let nr = partition_integral(grid, j, i, &r, &r).sqrt();
                let nvj: f64 = vj.iter().zip(&grid.faces[j].dual_measure).map(|(a, m)| m * a * a).sum::<f64>().sqrt();
                worst = worst.max(excess(nr, (2.0 * reconstruction_constant(grid, j, i)).sqrt() * nvj));
            }
        }
    }
    Ok(worst)
}

fn b_reformulation(rng: &mut ChaCha8Rng, grid: &MacGrid, scheme: ConvectionScheme) -> Result<f64> {
    let u = random_velocity(rng, grid);
    let v = random_velocity(rng, grid);
    let w = random_velocity(rng, grid);
    let a = trilinear_b(grid, &u, &v, &w, scheme)?;
    let b = trilinear_b_reconstructed(grid, &u, &v, &w, scheme)?;
    Ok(rel(a - b, trilinear_scale(grid, &u, &v, &w)))
}

pub fn b_reformulation_centred(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    b_reformulation(rng, grid, ConvectionScheme::Centred)
}

pub fn b_reformulation_upwind(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    b_reformulation(rng, grid, ConvectionScheme::Upwind)
}

/// `(∫ ∂_j u v, -∫ R u ∂_j v, scale)` for components `i` of `u`, `v`.
pub fn integration_by_parts_terms(grid: &MacGrid, u: &[f64], v: &[f64], i: usize, j: usize) -> Result<(f64, f64, f64)> {
    let du = partial_derivative(grid, u, i, j);
    let dv = partial_derivative(grid, v, i, j);
    let lhs = mixed_integral(grid, i, j, &du, v);
    let ru = reconstruct(grid, u, &ReconstructionWeights::integration_by_parts(grid, i, j))?;
    let rhs = -partition_integral(grid, i, j, &ru, &dv);
    let d = grid.dual(i, j);
    let scale = (0..d.len())
        .map(|e| d.area[e] * (opt(u, d.lo[e]) + opt(u, d.hi[e])) * (opt(v, d.lo[e]) + opt(v, d.hi[e])))
        .sum();
    Ok((lhs, rhs, scale))
}

pub fn integration_by_parts(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let u = random_velocity(rng, grid);
            let v = random_velocity(rng, grid);
            let (a, b, s) = integration_by_parts_terms(grid, &u.comps[i], &v.comps[i], i, j)?;
            worst = worst.max(rel(a - b, s));
        }
    }
    Ok(worst)
}

/// Largest cell-wise `|div P̃φ - P div φ|` relative to the face-flux scale.
pub fn fortin_violation(grid: &MacGrid, phi: &AnalyticField, div_phi: &AnalyticField) -> Result<f64> {
    let u = fortin_raw(grid, phi)?;
    let a = divergence(grid, &u)?;
    let b = cell_mean(grid, div_phi)?;
    let mut worst: f64 = 0.0;
    for c in 0..grid.num_cells() {
        let scale: f64 = grid
            .cell_faces(c)
            .iter()
            .map(|&(i, s, _)| grid.faces[i].measure[s] * u.comps[i][s].abs())
            .sum::<f64>()
            / grid.cell_volume[c];
        worst = worst.max(rel(a.values[c] - b.values[c], scale.max(1.0)));
    }
    Ok(worst)
}

/// Random polynomial vector field of degree <= 3 per variable with its divergence.
pub fn random_polynomial(rng: &mut ChaCha8Rng, dim: usize) -> (AnalyticField<'static>, AnalyticField<'static>) {
    let terms: Vec<(usize, f64, [i32; 3])> = (0..dim)
        .flat_map(|i| (0..4).map(move |_| i))
        .map(|i| {
            let mut p = [0; 3];
            for l in 0..dim {
                p[l] = rng.random_range(0..=3);
            }
            (i, rng.random_range(-1.0..=1.0), p)
        })
        .collect();
    let t2 = terms.clone();
    let phi = AnalyticField::vector(move |x, _| {
        let mut v = [0.0; 3];
        for (i, a, p) in &terms {
            v[*i] += a * x[0].powi(p[0]) * x[1].powi(p[1]) * x[2].powi(p[2]);
        }
        v
    });
    let div = AnalyticField::scalar(move |x, _| {
        let mut s = 0.0;
        for (i, a, p) in &t2 {
            if p[*i] == 0 {
                continue;
            }
            let mut q = *p;
            q[*i] -= 1;
            s += a * p[*i] as f64 * x[0].powi(q[0]) * x[1].powi(q[1]) * x[2].powi(q[2]);
        }
        s
    });
    (phi, div)
}

pub fn fortin_polynomial(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let (phi, div) = random_polynomial(rng, grid.dim());
    fortin_violation(grid, &phi, &div)
}

/// Random plane-wave field `φ_i = a_i sin(k·x + c_i)` with its divergence.
pub fn random_trigonometric(rng: &mut ChaCha8Rng, dim: usize) -> (AnalyticField<'static>, AnalyticField<'static>) {
    let mut k = [0.0; 3];
    let mut a = [0.0; 3];
    let mut c = [0.0; 3];
    for l in 0..dim {
        k[l] = rng.random_range(-1.0..=1.0) * std::f64::consts::PI;
        a[l] = rng.random_range(-1.0..=1.0);
        c[l] = rng.random_range(0.0..std::f64::consts::TAU);
    }
    let kx = move |x: [f64; 3]| k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
    let phi = AnalyticField::vector(move |x, _| {
        let t = kx(x);
        [a[0] * (t + c[0]).sin(), a[1] * (t + c[1]).sin(), a[2] * (t + c[2]).sin()]
    });
    let div = AnalyticField::scalar(move |x, _| {
        let t = kx(x);
        (0..3).map(|l| a[l] * k[l] * (t + c[l]).cos()).sum()
    });
    (phi, div)
}

/// Cells wider than this leave Gauss order 5 short of 1e-8 on the catalog
/// fields, whose profiles oscillate at wavenumber 2π.
pub const CATALOG_MAX_WIDTH: f64 = 0.4;

pub fn fortin_trigonometric(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let (phi, div) = random_trigonometric(rng, grid.dim());
    let worst = fortin_violation(grid, &phi, &div)?;
    if grid.max_width() <= CATALOG_MAX_WIDTH {
        return Ok(worst.max(fortin_catalog(grid)?));
    }
    Ok(worst)
}

/// Fortin violation over the 2D problem catalog velocities (zero in 3D).
pub fn fortin_catalog(grid: &MacGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    if grid.dim() == 2 {
        for kind in crate::analytic::ProblemKind::ALL {
            let p = crate::analytic::Problem::new(kind);
            let v = p.velocity_field().at_time(0.01);
            let zero = AnalyticField::scalar(|_, _| 0.0);
            worst = worst.max(fortin_violation(grid, &v, &zero)?);
        }
    }
    Ok(worst)
}

/// `‖u‖₁ <= diam(Ω) ‖f‖` for the Stokes and centred Navier-Stokes solutions.
pub fn steady_stability(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    let f = random_velocity(rng, grid);
    let bound = grid.diameter() * l2_norm(grid, &f)?;
    let (u, _, _) = solve_steady_stokes(grid, &f)?;
    let mut worst = excess(h1_norm(grid, &u)?, bound);
    let mut small = f.clone();
    small.scale(0.2);
    let (u, _, _) = solve_steady_ns(grid, &small, &SolverConfig::default())?;
    worst = worst.max(excess(h1_norm(grid, &u)?, 0.2 * bound));
    Ok(worst)
}

/// One implicit step with `f = 0`: `‖u¹‖² + δt ‖u¹‖₁² <= ‖u⁰‖²`.
fn energy_step(rng: &mut ChaCha8Rng, grid: &MacGrid, scheme: ConvectionScheme) -> Result<f64> {
    let u0 = random_divergence_free(rng, grid)?;
    let dt = rng.random_range(0.01..0.1);
    let config = SolverConfig { dt, scheme, ..Default::default() };
    let (u1, _, _) = step_unsteady(grid, &u0, &VelocityField::zeros(grid), &config)?;
    let l0 = l2_norm(grid, &u0)?;
    let l1 = l2_norm(grid, &u1)?;
    let h1 = h1_norm(grid, &u1)?;
    Ok(excess(l1 * l1 + dt * h1 * h1, l0 * l0))
}

pub fn energy_step_centred(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    energy_step(rng, grid, ConvectionScheme::Centred)
}

pub fn energy_step_upwind(rng: &mut ChaCha8Rng, grid: &MacGrid) -> Result<f64> {
    energy_step(rng, grid, ConvectionScheme::Upwind)
}

/// Per-face `Σ_ε |ε| u_{σ,ε} v*_ε` agrees with `|D_σ| C(u) v` (used by tests).
pub fn convection_consistency(grid: &MacGrid, u: &VelocityField, v: &VelocityField, scheme: ConvectionScheme) -> Result<f64> {
    let sums = convection_sums(grid, u, v, scheme)?;
    let app = crate::convection::convection_apply(grid, u, v, scheme)?;
    let mut worst: f64 = 0.0;
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            if fs.interior[s] {
                worst = worst.max((sums.comps[i][s] - fs.dual_measure[s] * app.comps[i][s]).abs());
            }
        }
    }
    Ok(worst)
}
