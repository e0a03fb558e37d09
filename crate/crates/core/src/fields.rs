//! Discrete velocity and pressure spaces, their norms, and test-field
//! generators.

use crate::error::{MacError, Result};
use crate::macgrid::{MacGrid, Shape};

/// One array per velocity component, over all faces of `E^(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub comps: Vec<Vec<f64>>,
}

impl VelocityField {
    pub fn zeros(grid: &MacGrid) -> Self {
        VelocityField { comps: (0..grid.dim()).map(|i| vec![0.0; grid.num_faces(i)]).collect() }
    }

    /// Build from a per-face closure; exterior faces are forced to zero.
    pub fn from_fn(grid: &MacGrid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut u = VelocityField::zeros(grid);
        for i in 0..grid.dim() {
            for s in 0..grid.num_faces(i) {
                if grid.faces[i].interior[s] {
                    u.comps[i][s] = f(i, s);
                }
            }
        }
        u
    }

    pub fn check(&self, grid: &MacGrid) -> Result<()> {
        if self.comps.len() != grid.dim() {
            return Err(MacError::GridMismatch(format!(
                "velocity has {} components, grid dimension is {}",
                self.comps.len(),
                grid.dim()
            )));
        }
        for (i, c) in self.comps.iter().enumerate() {
            if c.len() != grid.num_faces(i) {
                return Err(MacError::GridMismatch(format!(
                    "component {i} has {} values, grid has {} faces",
                    c.len(),
                    grid.num_faces(i)
                )));
            }
        }
        Ok(())
    }

    /// True when every exterior face value is exactly zero.
    pub fn is_admissible(&self, grid: &MacGrid) -> bool {
        self.comps
            .iter()
            .enumerate()
            .all(|(i, c)| c.iter().zip(&grid.faces[i].interior).all(|(v, int)| *int || *v == 0.0))
    }

    pub fn enforce_boundary(&mut self, grid: &MacGrid) {
        for (i, c) in self.comps.iter_mut().enumerate() {
            for (v, int) in c.iter_mut().zip(&grid.faces[i].interior) {
                if !*int {
                    *v = 0.0;
                }
            }
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.comps.iter_mut().flatten().for_each(|v| *v *= a);
    }

    pub fn axpy(&mut self, a: f64, x: &VelocityField) {
        for (c, xc) in self.comps.iter_mut().zip(&x.comps) {
            for (v, w) in c.iter_mut().zip(xc) {
                *v += a * w;
            }
        }
    }

    pub fn sub(&self, x: &VelocityField) -> VelocityField {
        let mut out = self.clone();
        out.axpy(-1.0, x);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cell-centred pressure. `zero_mean` tags membership in the zero-mean subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    pub values: Vec<f64>,
    pub zero_mean: bool,
}

impl PressureField {
    pub fn zeros(grid: &MacGrid) -> Self {
        PressureField { values: vec![0.0; grid.num_cells()], zero_mean: true }
    }

    pub fn from_fn(grid: &MacGrid, f: impl FnMut(usize) -> f64) -> Self {
        PressureField { values: (0..grid.num_cells()).map(f).collect(), zero_mean: false }
    }

    pub fn check(&self, grid: &MacGrid) -> Result<()> {
        if self.values.len() != grid.num_cells() {
            return Err(MacError::GridMismatch(format!(
                "pressure has {} values, grid has {} cells",
                self.values.len(),
                grid.num_cells()
            )));
        }
        Ok(())
    }

    pub fn mean(&self, grid: &MacGrid) -> f64 {
        let s: f64 = self.values.iter().zip(&grid.cell_volume).map(|(p, v)| p * v).sum();
        s / grid.volume()
    }

    /// Subtract the volume-weighted mean and tag the field as zero-mean.
    pub fn project_zero_mean(&mut self, grid: &MacGrid) {
        let m = self.mean(grid);
        self.values.iter_mut().for_each(|p| *p -= m);
        self.zero_mean = true;
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Snapshots at `t_n = n * dt`; snapshot 0 is the discrete initial datum.
#[derive(Clone, Debug)]
pub struct TimeSeriesField {
    pub dt: f64,
    pub snapshots: Vec<VelocityField>,
    pub pressures: Vec<PressureField>,
}

impl TimeSeriesField {
    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }
}

/// Piecewise-constant fields that can be integrated over their own partition.
pub trait DiscreteField {
    /// `(measure, value)` pairs of the owning partition.
    fn weighted_values<'a>(&'a self, grid: &'a MacGrid) -> Box<dyn Iterator<Item = (f64, f64)> + 'a>;
    fn check_grid(&self, grid: &MacGrid) -> Result<()>;
}

impl DiscreteField for VelocityField {
    fn weighted_values<'a>(&'a self, grid: &'a MacGrid) -> Box<dyn Iterator<Item = (f64, f64)> + 'a> {
        Box::new(
            self.comps
                .iter()
                .enumerate()
                .flat_map(move |(i, c)| grid.faces[i].dual_measure.iter().cloned().zip(c.iter().cloned())),
        )
    }

    fn check_grid(&self, grid: &MacGrid) -> Result<()> {
        self.check(grid)
    }
}

impl DiscreteField for PressureField {
    fn weighted_values<'a>(&'a self, grid: &'a MacGrid) -> Box<dyn Iterator<Item = (f64, f64)> + 'a> {
        Box::new(grid.cell_volume.iter().cloned().zip(self.values.iter().cloned()))
    }

    fn check_grid(&self, grid: &MacGrid) -> Result<()> {
        self.check(grid)
    }
}

pub fn lp_norm<F: DiscreteField>(grid: &MacGrid, f: &F, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(MacError::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
    }
    f.check_grid(grid)?;
    let s: f64 = f.weighted_values(grid).map(|(m, v)| m * v.abs().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

pub fn l2_norm<F: DiscreteField>(grid: &MacGrid, f: &F) -> Result<f64> {
    f.check_grid(grid)?;
    Ok(f.weighted_values(grid).map(|(m, v)| m * v * v).sum::<f64>().sqrt())
}

/// `∫ u·v` for piecewise-constant velocities on the dual cells.
pub fn l2_inner(grid: &MacGrid, u: &VelocityField, v: &VelocityField) -> Result<f64> {
    u.check(grid)?;
    v.check(grid)?;
    let mut s = 0.0;
    for i in 0..grid.dim() {
        for (k, m) in grid.faces[i].dual_measure.iter().enumerate() {
            s += m * u.comps[i][k] * v.comps[i][k];
        }
    }
    Ok(s)
}

#[inline]
pub(crate) fn side(vals: &[f64], s: Option<usize>) -> f64 {
    s.map_or(0.0, |k| vals[k])
}

/// Discrete H¹₀ inner product as a sum over all dual faces.
pub fn h1_inner(grid: &MacGrid, u: &VelocityField, v: &VelocityField) -> Result<f64> {
    u.check(grid)?;
    v.check(grid)?;
    let mut s = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let (uc, vc) = (&u.comps[i], &v.comps[i]);
            for e in 0..d.len() {
                let ju = side(uc, d.hi[e]) - side(uc, d.lo[e]);
                let jv = side(vc, d.hi[e]) - side(vc, d.lo[e]);
                s += d.area[e] / d.dist[e] * ju * jv;
            }
        }
    }
    Ok(s)
}

pub fn h1_norm(grid: &MacGrid, u: &VelocityField) -> Result<f64> {
    Ok(h1_inner(grid, u, u)?.max(0.0).sqrt())
}

/// Piecewise-constant discrete gradient: entry `i * dim + j` holds
/// `∂_j u_i` on the cells of the `(i, j)` partition.
#[derive(Clone, Debug)]
pub struct VelocityGradient {
    pub dim: usize,
    pub parts: Vec<Vec<f64>>,
}

impl VelocityGradient {
    pub fn part(&self, i: usize, j: usize) -> &[f64] {
        &self.parts[i * self.dim + j]
    }
}

/// Discrete partial derivative `∂_j` of one component on the `(i, j)` partition.
pub fn partial_derivative(grid: &MacGrid, ui: &[f64], i: usize, j: usize) -> Vec<f64> {
    let d = grid.dual(i, j);
    (0..d.len()).map(|e| (side(ui, d.hi[e]) - side(ui, d.lo[e])) / d.dist[e]).collect()
}

pub fn velocity_gradient(grid: &MacGrid, u: &VelocityField) -> Result<VelocityGradient> {
    u.check(grid)?;
    let dim = grid.dim();
    let mut parts = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            parts.push(partial_derivative(grid, &u.comps[i], i, j));
        }
    }
    Ok(VelocityGradient { dim, parts })
}

/// `∫ ∇u : ∇v` for two discrete gradients.
pub fn gradient_inner(grid: &MacGrid, a: &VelocityGradient, b: &VelocityGradient) -> f64 {
    let dim = grid.dim();
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let vol = &grid.dual(i, j).volume;
            for ((x, y), m) in a.part(i, j).iter().zip(b.part(i, j)).zip(vol) {
                s += m * x * y;
            }
        }
    }
    s
}

/// Velocity from a vertex stream function (2D). `psi` is indexed over the
/// `(nx+1) x (ny+1)` vertices with x fastest and must vanish on the boundary.
pub fn make_stream_function_field(grid: &MacGrid, psi: &[f64]) -> Result<VelocityField> {
    if grid.dim() != 2 {
        return Err(MacError::InvalidArgument("stream-function fields are 2D only".into()));
    }
    let [nx, ny, _] = grid.n();
    if psi.len() != (nx + 1) * (ny + 1) {
        return Err(MacError::GridMismatch(format!(
            "stream function has {} values, grid has {} vertices",
            psi.len(),
            (nx + 1) * (ny + 1)
        )));
    }
    let at = |a: usize, b: usize| psi[a + (nx + 1) * b];
    let mut u = VelocityField::zeros(grid);
    let f0 = &grid.faces[0];
    for s in 0..f0.len() {
        let [a, b, _] = f0.shape.multi(s);
        u.comps[0][s] = (at(a, b + 1) - at(a, b)) / f0.measure[s];
    }
    let f1 = &grid.faces[1];
    for s in 0..f1.len() {
        let [a, b, _] = f1.shape.multi(s);
        u.comps[1][s] = -(at(a + 1, b) - at(a, b)) / f1.measure[s];
    }
    Ok(u)
}

/// Velocity from edge circulations of a vector potential (3D): the flux
/// through each face is the circulation around its boundary, so every cell
/// balances exactly. `gamma[l]` lives on the edges along axis `l`, shaped
/// like the vertices except `n_l` (not `n_l + 1`) along `l`, x fastest.
/// Circulations on boundary edges must vanish for the field to be admissible.
pub fn make_vector_potential_field(grid: &MacGrid, gamma: &[Vec<f64>; 3]) -> Result<VelocityField> {
    if grid.dim() != 3 {
        return Err(MacError::InvalidArgument("vector-potential fields are 3D only".into()));
    }
    let n = grid.n();
    let shape = |l: usize| {
        let mut s = [n[0] + 1, n[1] + 1, n[2] + 1];
        s[l] = n[l];
        Shape(s)
    };
    for l in 0..3 {
        if gamma[l].len() != shape(l).len() {
            return Err(MacError::GridMismatch(format!(
                "edge array {l} has {} values, expected {}",
                gamma[l].len(),
                shape(l).len()
            )));
        }
    }
    let mut u = VelocityField::zeros(grid);
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (sj, sk) = (shape(j), shape(k));
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            let idx = fs.shape.multi(s);
            let mut pj = idx;
            pj[j] += 1;
            let mut pk = idx;
            pk[k] += 1;
            let flux = gamma[k][sk.index(pj)] - gamma[k][sk.index(idx)] - gamma[j][sj.index(pk)] + gamma[j][sj.index(idx)];
            u.comps[i][s] = flux / fs.measure[s];
        }
    }
    Ok(u)
}

/// Dual norm of `v` over discretely divergence-free test fields, via the
/// Riesz representative `w` of `φ ↦ ∫ v·φ` in the discrete H¹₀ product.
pub fn dual_norm(grid: &MacGrid, v: &VelocityField) -> Result<f64> {
    v.check(grid)?;
    let (w, _, _) = crate::solver::solve_steady_stokes(grid, v)?;
    h1_norm(grid, &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macgrid::GridSpec;

    fn unit(n: usize) -> MacGrid {
        MacGrid::new(&GridSpec::unit(2, n).unwrap()).unwrap()
    }

    #[test]
    fn single_face_h1_by_hand() {
        let g = unit(2);
        // interior E^(1) face in the bottom row: x = 0.5, y in (0, 0.5)
        let s = g.faces[0].shape.index([1, 0, 0]);
        let u = VelocityField::from_fn(&g, |i, k| if i == 0 && k == s { 1.0 } else { 0.0 });
        // two normal dual faces through cell centres: |ε| = 0.5, d = 0.5
        // bottom wall: |ε| = 0.5, d = 0.25; top neighbour: |ε| = 0.5, d = 0.5
        let hand = 0.5 / 0.5 + 0.5 / 0.5 + 0.5 / 0.25 + 0.5 / 0.5;
        assert!((h1_inner(&g, &u, &u).unwrap() - hand).abs() < 1e-14);
    }

    #[test]
    fn constant_pressure_norm() {
        let g = unit(3);
        let p = PressureField::from_fn(&g, |_| 1.0);
        assert!((l2_norm(&g, &p).unwrap() - 1.0).abs() < 1e-15);
        assert!(lp_norm(&g, &p, 0.5).is_err());
    }

    #[test]
    fn stream_function_single_vertex() {
        let g = unit(3);
        let mut psi = vec![0.0; 16];
        psi[1 + 4 * 1] = 1.0;
        let u = make_stream_function_field(&g, &psi).unwrap();
        let nz = u.comps.iter().flatten().filter(|v| **v != 0.0).count();
        assert_eq!(nz, 4);
        assert!(u.is_admissible(&g));
    }

    #[test]
    fn gradient_of_linear_field_is_one() {
        let g = unit(4);
        let u = VelocityField::from_fn(&g, |i, s| g.face_center(i, s)[0]);
        let d = partial_derivative(&g, &u.comps[0], 0, 0);
        // cells not touching x = 0 or x = 1 have both faces interior
        for (c, v) in d.iter().enumerate() {
            let [a, _, _] = g.cell_shape.multi(c);
            if a > 0 && a < 3 {
                assert!((v - 1.0).abs() < 1e-14);
            }
        }
    }
}
