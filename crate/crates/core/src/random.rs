//! Seeded generators for random non-uniform grids and discrete fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{MacError, Result};
use crate::fields::{make_stream_function_field, make_vector_potential_field, PressureField, VelocityField};
use crate::macgrid::{GridSpec, MacGrid, Shape};

pub const DEFAULT_WIDTH_RATIO: f64 = 4.0;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-box spec whose cell widths are log-uniform in `[1, ratio]` before
/// normalization, so the widest cell on an axis is at most `ratio` times the
/// narrowest.
pub fn random_grid_spec<R: Rng>(rng: &mut R, cells: &[usize], ratio: f64) -> Result<GridSpec> {
    if !(ratio >= 1.0) {
        return Err(MacError::InvalidArgument(format!("width ratio {ratio} must be >= 1")));
    }
    let lr = ratio.ln();
    let coords = cells
        .iter()
        .map(|&n| {
            let w: Vec<f64> = (0..n).map(|_| (lr * rng.random::<f64>()).exp()).collect();
            let total: f64 = w.iter().sum();
            let mut c = Vec::with_capacity(n + 1);
            let mut x = 0.0;
            c.push(0.0);
            for wi in &w[..n.saturating_sub(1)] {
                x += wi / total;
                c.push(x);
            }
            c.push(1.0);
            c
        })
        .collect();
    GridSpec::new(coords)
}

/// Random grid with between 2 and `max_cells` cells per axis.
pub fn random_grid<R: Rng>(rng: &mut R, dim: usize, max_cells: usize) -> Result<MacGrid> {
    if max_cells < 2 {
        return Err(MacError::InvalidArgument("need at least 2 cells per axis".into()));
    }
    let cells: Vec<usize> = (0..dim).map(|_| rng.random_range(2..=max_cells)).collect();
    MacGrid::new(&random_grid_spec(rng, &cells, DEFAULT_WIDTH_RATIO)?)
}

/// Admissible velocity with interior values uniform in `[-1, 1]`.
pub fn random_velocity<R: Rng>(rng: &mut R, grid: &MacGrid) -> VelocityField {
    VelocityField::from_fn(grid, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn random_pressure<R: Rng>(rng: &mut R, grid: &MacGrid) -> PressureField {
    PressureField::from_fn(grid, |_| rng.random_range(-1.0..=1.0))
}

/// Vertex stream function, zero on the boundary (2D).
pub fn random_stream_function<R: Rng>(rng: &mut R, grid: &MacGrid) -> Vec<f64> {
    let [nx, ny, _] = grid.n();
    let mut psi = vec![0.0; (nx + 1) * (ny + 1)];
    for b in 1..ny {
        for a in 1..nx {
            psi[a + (nx + 1) * b] = rng.random_range(-1.0..=1.0);
        }
    }
    psi
}

/// Edge circulations (3D), zero on edges lying in the boundary.
pub fn random_vector_potential<R: Rng>(rng: &mut R, grid: &MacGrid) -> [Vec<f64>; 3] {
    let n = grid.n();
    let mut out: [Vec<f64>; 3] = Default::default();
    for (l, g) in out.iter_mut().enumerate() {
        let mut s = [n[0] + 1, n[1] + 1, n[2] + 1];
        s[l] = n[l];
        let shape = Shape(s);
        *g = (0..shape.len())
            .map(|e| {
                let m = shape.multi(e);
                let on_wall = (0..3).any(|a| a != l && (m[a] == 0 || m[a] == n[a]));
                if on_wall {
                    0.0
                } else {
                    rng.random_range(-1.0..=1.0)
                }
            })
            .collect();
    }
    out
}

/// Discretely divergence-free admissible velocity from a random stream
/// function (2D) or vector potential (3D), scaled to unit max-norm.
pub fn random_divergence_free<R: Rng>(rng: &mut R, grid: &MacGrid) -> Result<VelocityField> {
    let mut u = if grid.dim() == 2 {
        let psi = random_stream_function(rng, grid);
        make_stream_function_field(grid, &psi)?
    } else {
        let gamma = random_vector_potential(rng, grid);
        make_vector_potential_field(grid, &gamma)?
    };
    let m = u.max_abs();
    if m > 0.0 {
        u.scale(1.0 / m);
    }
    Ok(u)
}
