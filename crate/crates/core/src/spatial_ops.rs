//! Linear discrete operators: diffusion, divergence, pressure gradient, and
//! the velocity reconstructions on the dual-face partitions.

use crate::error::{MacError, Result};
use crate::fields::{side, PressureField, VelocityField};
use crate::macgrid::MacGrid;
use crate::sparse::CooMatrix;

/// Diffusion flux `φ_{σ,ε}` out of the `lo` dual cell of dual face `e`.
/// The flux out of `hi` is its exact negation.
#[inline]
pub fn diffusion_flux(grid: &MacGrid, ui: &[f64], i: usize, j: usize, e: usize) -> f64 {
    let d = grid.dual(i, j);
    d.area[e] / d.dist[e] * (side(ui, d.lo[e]) - side(ui, d.hi[e]))
}

/// `-Δ_E u`, zero on exterior faces.
pub fn laplacian(grid: &MacGrid, u: &VelocityField) -> Result<VelocityField> {
    u.check(grid)?;
    let mut out = VelocityField::zeros(grid);
    for i in 0..grid.dim() {
        let acc = &mut out.comps[i];
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            for e in 0..d.len() {
                let phi = diffusion_flux(grid, &u.comps[i], i, j, e);
                if let Some(lo) = d.lo[e] {
                    acc[lo] += phi;
                }
                if let Some(hi) = d.hi[e] {
                    acc[hi] -= phi;
                }
            }
        }
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            acc[s] = if fs.interior[s] { acc[s] / fs.dual_measure[s] } else { 0.0 };
        }
    }
    Ok(out)
}

pub fn divergence(grid: &MacGrid, u: &VelocityField) -> Result<PressureField> {
    u.check(grid)?;
    let mut div = vec![0.0; grid.num_cells()];
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            let flux = fs.measure[s] * u.comps[i][s];
            let (k, l) = fs.cells[s];
            if let Some(k) = k {
                div[k] += flux;
            }
            if let Some(l) = l {
                div[l] -= flux;
            }
        }
    }
    for (d, v) in div.iter_mut().zip(&grid.cell_volume) {
        *d /= v;
    }
    Ok(PressureField { values: div, zero_mean: false })
}

/// `Σ_i ∂_i u_i` on the cells, from the diagonal partitions.
pub fn divergence_from_partials(grid: &MacGrid, u: &VelocityField) -> Result<PressureField> {
    u.check(grid)?;
    let mut div = vec![0.0; grid.num_cells()];
    for i in 0..grid.dim() {
        let d = crate::fields::partial_derivative(grid, &u.comps[i], i, i);
        for (a, b) in div.iter_mut().zip(d) {
            *a += b;
        }
    }
    Ok(PressureField { values: div, zero_mean: false })
}

pub fn pressure_gradient(grid: &MacGrid, p: &PressureField) -> Result<VelocityField> {
    p.check(grid)?;
    let mut out = VelocityField::zeros(grid);
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            if let (Some(k), Some(l)) = fs.cells[s] {
                out.comps[i][s] = fs.measure[s] / fs.dual_measure[s] * (p.values[l] - p.values[k]);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReconstructionVariant {
    Centred,
    /// Upwind with respect to the mass fluxes of a convecting field.
    Upwind,
    /// `α = |D_{K,σ'}| / |K|` on the diagonal partitions.
    VolumeWeightedIi,
    /// `α = |D_σ'| / (2 |D_ε|)` inside, zero weight on boundary dual faces.
    VolumeWeightedIj,
    /// As `VolumeWeightedIj` but with boundary value `u_σ / 2`.
    HalfBoundary,
    /// Weights reproducing the dual mass flux `u_{σ,ε}` from the faces of the other component.
    MassFlux,
    Custom,
}

/// Convex weights `α_e` for the cells of one `(i, j)` partition: interior
/// cells get `α v_lo + (1 - α) v_hi`, boundary cells get `α v_σ`.
#[derive(Clone, Debug)]
pub struct ReconstructionWeights {
    pub variant: ReconstructionVariant,
    pub comp: usize,
    pub dir: usize,
    pub alpha: Vec<f64>,
}

impl ReconstructionWeights {
    pub fn centred(grid: &MacGrid, i: usize, j: usize) -> Self {
        let d = grid.dual(i, j);
        let alpha = (0..d.len()).map(|e| if d.is_interior(e) { 0.5 } else { 1.0 }).collect();
        ReconstructionWeights { variant: ReconstructionVariant::Centred, comp: i, dir: j, alpha }
    }

    /// Upwind choice driven by the mass fluxes `flux` through the `(i, j)` dual faces.
    pub fn upwind(grid: &MacGrid, flux: &[f64], i: usize, j: usize) -> Self {
        let d = grid.dual(i, j);
        let alpha = (0..d.len())
            .map(|e| if !d.is_interior(e) || flux[e] >= 0.0 { 1.0 } else { 0.0 })
            .collect();
        ReconstructionWeights { variant: ReconstructionVariant::Upwind, comp: i, dir: j, alpha }
    }

    /// The volume weights that make the discrete integration by parts exact.
    pub fn integration_by_parts(grid: &MacGrid, i: usize, j: usize) -> Self {
        let d = grid.dual(i, j);
        let alpha = (0..d.len())
            .map(|e| if d.is_interior(e) { d.hi_part[e] / d.volume[e] } else { 0.0 })
            .collect();
        let variant = if i == j { ReconstructionVariant::VolumeWeightedIi } else { ReconstructionVariant::VolumeWeightedIj };
        ReconstructionWeights { variant, comp: i, dir: j, alpha }
    }

    /// Interior volume weights with the boundary value `u_σ / 2`.
    pub fn half_boundary(grid: &MacGrid, i: usize, j: usize) -> Self {
        let mut w = Self::integration_by_parts(grid, i, j);
        let d = grid.dual(i, j);
        for e in 0..d.len() {
            if !d.is_interior(e) {
                w.alpha[e] = 0.5;
            }
        }
        w.variant = ReconstructionVariant::HalfBoundary;
        w
    }

    /// Weights on the `(j, i)` partition reproducing `u_{σ,ε}` of the
    /// `(i, j)` dual faces from component `j` (case of tangential dual faces).
    pub fn mass_flux(grid: &MacGrid, i: usize, j: usize) -> Self {
        let d = grid.dual(j, i);
        let alpha = (0..d.len())
            .map(|e| if d.is_interior(e) { d.lo_part[e] / d.volume[e] } else { 1.0 })
            .collect();
        ReconstructionWeights { variant: ReconstructionVariant::MassFlux, comp: j, dir: i, alpha }
    }

    pub fn custom(comp: usize, dir: usize, alpha: Vec<f64>) -> Self {
        ReconstructionWeights { variant: ReconstructionVariant::Custom, comp, dir, alpha }
    }
}

/// `R^(i,j) v` on the cells of the `(i, j)` partition.
pub fn reconstruct(grid: &MacGrid, v: &[f64], w: &ReconstructionWeights) -> Result<Vec<f64>> {
    let (i, j) = (w.comp, w.dir);
    if i >= grid.dim() || j >= grid.dim() {
        return Err(MacError::InvalidArgument(format!("partition ({i},{j}) out of range")));
    }
    if v.len() != grid.num_faces(i) {
        return Err(MacError::GridMismatch(format!("component {i} has {} values", v.len())));
    }
    let d = grid.dual(i, j);
    if w.alpha.len() != d.len() {
        return Err(MacError::GridMismatch(format!("{} weights for {} dual faces", w.alpha.len(), d.len())));
    }
    if let Some(a) = w.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(MacError::InvalidArgument(format!("reconstruction weight {a} outside [0, 1]")));
    }
    Ok((0..d.len())
        .map(|e| {
            let a = w.alpha[e];
            match (d.lo[e], d.hi[e]) {
                (Some(lo), Some(hi)) => a * v[lo] + (1.0 - a) * v[hi],
                (Some(s), None) | (None, Some(s)) => a * v[s],
                (None, None) => 0.0,
            }
        })
        .collect())
}

/// `C_V = max_σ |V_σ| / |D_σ|`, with `V_σ` the union of the `(i, j)` cells
/// having a face on `D_σ`.
pub fn reconstruction_constant(grid: &MacGrid, i: usize, j: usize) -> f64 {
    let d = grid.dual(i, j);
    let mut v = vec![0.0; grid.num_faces(i)];
    for e in 0..d.len() {
        for s in [d.lo[e], d.hi[e]].into_iter().flatten() {
            v[s] += d.volume[e];
        }
    }
    v.iter().zip(&grid.faces[i].dual_measure).map(|(a, b)| a / b).fold(0.0, f64::max)
}

/// `∫ f g` for `f` piecewise constant on the `(i, j)` partition and `g` on the dual cells of `E^(i)`.
pub fn mixed_integral(grid: &MacGrid, i: usize, j: usize, f: &[f64], g: &[f64]) -> f64 {
    let d = grid.dual(i, j);
    (0..d.len())
        .map(|e| f[e] * (d.lo_part[e] * side(g, d.lo[e]) + d.hi_part[e] * side(g, d.hi[e])))
        .sum()
}

/// `∫ f g` for two piecewise constants on the same `(i, j)` partition.
pub fn partition_integral(grid: &MacGrid, i: usize, j: usize, f: &[f64], g: &[f64]) -> f64 {
    grid.dual(i, j).volume.iter().zip(f).zip(g).map(|((m, a), b)| m * a * b).sum()
}

/// Global numbering of all faces: component `i`, face `s` maps to `offset[i] + s`.
#[derive(Clone, Debug)]
pub struct FaceNumbering {
    pub offset: Vec<usize>,
    pub total: usize,
}

impl FaceNumbering {
    pub fn new(grid: &MacGrid) -> Self {
        let mut offset = Vec::with_capacity(grid.dim());
        let mut total = 0;
        for i in 0..grid.dim() {
            offset.push(total);
            total += grid.num_faces(i);
        }
        FaceNumbering { offset, total }
    }

    pub fn flatten(&self, u: &VelocityField) -> Vec<f64> {
        u.comps.iter().flatten().cloned().collect()
    }

    pub fn unflatten(&self, grid: &MacGrid, x: &[f64]) -> VelocityField {
        VelocityField {
            comps: (0..grid.dim()).map(|i| x[self.offset[i]..self.offset[i] + grid.num_faces(i)].to_vec()).collect(),
        }
    }
}

/// `-Δ_E` over all faces; rows of exterior faces are empty.
pub fn assemble_laplacian(grid: &MacGrid) -> CooMatrix {
    let num = FaceNumbering::new(grid);
    let mut a = CooMatrix::new(num.total, num.total);
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        let o = num.offset[i];
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            for e in 0..d.len() {
                let c = d.area[e] / d.dist[e];
                let (lo, hi) = (d.lo[e], d.hi[e]);
                for (row, other) in [(lo, hi), (hi, lo)] {
                    if let Some(r) = row {
                        if fs.interior[r] {
                            let m = fs.dual_measure[r];
                            a.push(o + r, o + r, c / m);
                            if let Some(q) = other {
                                a.push(o + r, o + q, -c / m);
                            }
                        }
                    }
                }
            }
        }
    }
    a
}

pub fn assemble_divergence(grid: &MacGrid) -> CooMatrix {
    let num = FaceNumbering::new(grid);
    let mut a = CooMatrix::new(grid.num_cells(), num.total);
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            let (k, l) = fs.cells[s];
            if let Some(k) = k {
                a.push(k, num.offset[i] + s, fs.measure[s] / grid.cell_volume[k]);
            }
            if let Some(l) = l {
                a.push(l, num.offset[i] + s, -fs.measure[s] / grid.cell_volume[l]);
            }
        }
    }
    a
}

pub fn assemble_gradient(grid: &MacGrid) -> CooMatrix {
    let num = FaceNumbering::new(grid);
    let mut a = CooMatrix::new(num.total, grid.num_cells());
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            if let (Some(k), Some(l)) = fs.cells[s] {
                let c = fs.measure[s] / fs.dual_measure[s];
                a.push(num.offset[i] + s, l, c);
                a.push(num.offset[i] + s, k, -c);
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macgrid::GridSpec;

    fn unit(n: usize) -> MacGrid {
        MacGrid::new(&GridSpec::unit(2, n).unwrap()).unwrap()
    }

    #[test]
    fn divergence_two_by_two() {
        let g = unit(2);
        let s = g.faces[0].shape.index([1, 0, 0]);
        let u = VelocityField::from_fn(&g, |i, k| if i == 0 && k == s { 1.0 } else { 0.0 });
        let div = divergence(&g, &u).unwrap();
        // outward normal of the bottom-left cell on this face is +e1
        assert_eq!(div.values, vec![2.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn gradient_two_by_two() {
        let g = unit(2);
        let p = PressureField::from_fn(&g, |c| if g.cell_shape.multi(c)[0] == 0 { 1.0 } else { 0.0 });
        let gp = pressure_gradient(&g, &p).unwrap();
        for s in 0..g.num_faces(0) {
            let want = if g.faces[0].interior[s] { -2.0 } else { 0.0 };
            assert_eq!(gp.comps[0][s], want);
        }
        assert!(gp.comps[1].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn laplacian_single_face_three_by_three() {
        let g = unit(3);
        let s = g.faces[0].shape.index([1, 1, 0]);
        let u = VelocityField::from_fn(&g, |i, k| if i == 0 && k == s { 1.0 } else { 0.0 });
        let lap = laplacian(&g, &u).unwrap();
        let h = 1.0 / 3.0;
        // four dual faces, each with |ε| = h and d_ε = h
        let hand = 4.0 * (h / h) / (h * h);
        assert!((lap.comps[0][s] - hand).abs() < 1e-12 * hand);
    }

    #[test]
    fn reconstruction_rejects_bad_weights() {
        let g = unit(2);
        let v = vec![0.0; g.num_faces(0)];
        let mut w = ReconstructionWeights::centred(&g, 0, 1);
        w.alpha[0] = 1.5;
        assert!(reconstruct(&g, &v, &w).is_err());
    }

    #[test]
    fn constant_reconstruction_is_constant_inside() {
        let g = unit(4);
        let v = vec![3.0; g.num_faces(0)];
        for j in 0..2 {
            let w = ReconstructionWeights::integration_by_parts(&g, 0, j);
            let r = reconstruct(&g, &v, &w).unwrap();
            let d = g.dual(0, j);
            for e in 0..d.len() {
                if d.is_interior(e) {
                    assert!((r[e] - 3.0).abs() < 1e-15);
                }
            }
        }
    }
}
