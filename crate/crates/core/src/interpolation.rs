//! Maps from analytic fields to discrete ones: face means (Fortin), cell
//! means, dual-cell and time-slab means, and point interpolation.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{MacError, Result};
use crate::fields::{PressureField, VelocityField};
use crate::macgrid::MacGrid;

pub const DEFAULT_ORDER: usize = 5;

type VecFn<'a> = Box<dyn Fn([f64; 3], f64) -> [f64; 3] + Sync + 'a>;
type ScalarFn<'a> = Box<dyn Fn([f64; 3], f64) -> f64 + Sync + 'a>;

/// A vector (or scalar, stored in component 0) function of position and time.
pub struct AnalyticField<'a> {
    value: VecFn<'a>,
    divergence: Option<ScalarFn<'a>>,
    pub order: usize,
    pub time: f64,
}

impl<'a> AnalyticField<'a> {
    pub fn vector(f: impl Fn([f64; 3], f64) -> [f64; 3] + Sync + 'a) -> Self {
        AnalyticField { value: Box::new(f), divergence: None, order: DEFAULT_ORDER, time: 0.0 }
    }

    pub fn scalar(f: impl Fn([f64; 3], f64) -> f64 + Sync + 'a) -> Self {
        AnalyticField::vector(move |x, t| [f(x, t), 0.0, 0.0])
    }

    pub fn with_divergence(mut self, d: impl Fn([f64; 3], f64) -> f64 + Sync + 'a) -> Self {
        self.divergence = Some(Box::new(d));
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }

    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> [f64; 3] {
        (self.value)(x, self.time)
    }

    #[inline]
    pub fn eval_at(&self, x: [f64; 3], t: f64) -> [f64; 3] {
        (self.value)(x, t)
    }

    pub fn divergence(&self) -> Option<&ScalarFn<'a>> {
        self.divergence.as_ref()
    }
}

/// Gauss-Legendre rule on `[-1, 1]`, optionally composite.
#[derive(Clone, Debug)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    pub subdivisions: usize,
}

impl Quadrature {
    pub fn gauss(order: usize) -> Result<Self> {
        let n = NonZeroUsize::new(order).ok_or_else(|| MacError::InvalidArgument("quadrature order must be >= 1".into()))?;
        let rule = GaussLegendre::new(n);
        let (nodes, weights) = rule.as_node_weight_pairs().iter().cloned().unzip();
        Ok(Quadrature { nodes, weights, subdivisions: 1 })
    }

    pub fn composite(order: usize, subdivisions: usize) -> Result<Self> {
        let mut q = Quadrature::gauss(order)?;
        q.subdivisions = subdivisions.max(1);
        Ok(q)
    }

    /// Nodes and weights mapped to `[a, b]`; a degenerate interval gives one unit-weight point.
    pub fn interval(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        if a == b {
            return vec![(a, 1.0)];
        }
        let m = self.subdivisions;
        let mut out = Vec::with_capacity(m * self.nodes.len());
        for k in 0..m {
            let lo = a + (b - a) * k as f64 / m as f64;
            let hi = a + (b - a) * (k + 1) as f64 / m as f64;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((mid + half * x, half * w));
            }
        }
        out
    }

    /// Visit the tensor points of a box over the first `dim` axes.
    pub fn for_each_point(&self, dim: usize, b: &[[f64; 2]; 3], mut f: impl FnMut([f64; 3], f64)) {
        let ax: Vec<Vec<(f64, f64)>> = (0..3)
            .map(|l| if l < dim { self.interval(b[l][0], b[l][1]) } else { vec![(0.0, 1.0)] })
            .collect();
        for &(z, wz) in &ax[2] {
            for &(y, wy) in &ax[1] {
                for &(x, wx) in &ax[0] {
                    f([x, y, z], wx * wy * wz);
                }
            }
        }
    }

    /// Integral of `f` over the box (a face when one axis is degenerate).
    pub fn integrate(&self, dim: usize, b: &[[f64; 2]; 3], mut f: impl FnMut([f64; 3]) -> f64) -> f64 {
        let mut s = 0.0;
        self.for_each_point(dim, b, |x, w| s += w * f(x));
        s
    }
}

fn box_measure(dim: usize, b: &[[f64; 2]; 3]) -> f64 {
    (0..dim).map(|l| if b[l][1] > b[l][0] { b[l][1] - b[l][0] } else { 1.0 }).product()
}

/// Face means of every component on every face, boundary faces included.
pub fn fortin_raw(grid: &MacGrid, phi: &AnalyticField) -> Result<VelocityField> {
    let q = Quadrature::gauss(phi.order)?;
    let dim = grid.dim();
    let mut u = VelocityField::zeros(grid);
    for i in 0..dim {
        for s in 0..grid.num_faces(i) {
            let b = grid.face_box(i, s);
            u.comps[i][s] = q.integrate(dim, &b, |x| phi.eval(x)[i]) / box_measure(dim, &b);
        }
    }
    Ok(u)
}

/// Fortin interpolate: face means, with exterior faces set to exactly zero.
pub fn fortin_interpolate(grid: &MacGrid, phi: &AnalyticField) -> Result<VelocityField> {
    let mut u = fortin_raw(grid, phi)?;
    u.enforce_boundary(grid);
    Ok(u)
}

pub fn cell_mean(grid: &MacGrid, q: &AnalyticField) -> Result<PressureField> {
    let rule = Quadrature::gauss(q.order)?;
    let dim = grid.dim();
    Ok(PressureField::from_fn(grid, |c| {
        let b = grid.cell_box(c);
        rule.integrate(dim, &b, |x| q.eval(x)[0]) / grid.cell_volume[c]
    }))
}

/// Means over the dual cells of interior faces; exterior faces get 0.
pub fn dual_cell_mean(grid: &MacGrid, f: &AnalyticField) -> Result<VelocityField> {
    let q = Quadrature::gauss(f.order)?;
    let dim = grid.dim();
    let mut out = VelocityField::zeros(grid);
    for i in 0..dim {
        for s in 0..grid.num_faces(i) {
            if !grid.faces[i].interior[s] {
                continue;
            }
            let mut acc = 0.0;
            for b in grid.dual_cell_boxes(i, s) {
                acc += q.integrate(dim, &b, |x| f.eval(x)[i]);
            }
            out.comps[i][s] = acc / grid.faces[i].dual_measure[s];
        }
    }
    Ok(out)
}

/// Space-time means over `D_σ × (t0, t1)`.
pub fn dual_cell_slab_mean(grid: &MacGrid, f: &AnalyticField, t0: f64, t1: f64) -> Result<VelocityField> {
    if !(t1 > t0) {
        return Err(MacError::InvalidArgument(format!("empty time slab ({t0}, {t1})")));
    }
    let q = Quadrature::gauss(f.order)?;
    let times = q.interval(t0, t1);
    let dim = grid.dim();
    let mut out = VelocityField::zeros(grid);
    for i in 0..dim {
        for s in 0..grid.num_faces(i) {
            if !grid.faces[i].interior[s] {
                continue;
            }
            let mut acc = 0.0;
            for b in grid.dual_cell_boxes(i, s) {
                for &(t, wt) in &times {
                    acc += wt * q.integrate(dim, &b, |x| f.eval_at(x, t)[i]);
                }
            }
            out.comps[i][s] = acc / (grid.faces[i].dual_measure[s] * (t1 - t0));
        }
    }
    Ok(out)
}

/// Face-centre values of each component; exterior faces set to zero.
pub fn point_interpolate_velocity(grid: &MacGrid, phi: &AnalyticField) -> VelocityField {
    VelocityField::from_fn(grid, |i, s| phi.eval(grid.face_center(i, s))[i])
}

/// Cell-centre values.
pub fn point_interpolate_pressure(grid: &MacGrid, q: &AnalyticField) -> PressureField {
    PressureField::from_fn(grid, |c| q.eval(grid.cell_center(c))[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macgrid::GridSpec;
    use crate::spatial_ops::divergence;

    fn grid() -> MacGrid {
        MacGrid::new(&GridSpec::new(vec![vec![0.0, 0.2, 0.45, 1.0], vec![0.0, 0.3, 0.4, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn constants_are_reproduced() {
        let g = grid();
        let c = AnalyticField::vector(|_, _| [2.5, -1.0, 0.0]);
        let raw = fortin_raw(&g, &c).unwrap();
        assert!(raw.comps[0].iter().all(|v| (v - 2.5).abs() < 1e-14));
        let u = fortin_interpolate(&g, &c).unwrap();
        assert!(u.is_admissible(&g));
        let m = dual_cell_mean(&g, &c).unwrap();
        for s in 0..g.num_faces(1) {
            let want = if g.faces[1].interior[s] { -1.0 } else { 0.0 };
            assert!((m.comps[1][s] - want).abs() < 1e-14);
        }
        let p = cell_mean(&g, &AnalyticField::scalar(|_, _| 4.0)).unwrap();
        assert!(p.values.iter().all(|v| (v - 4.0).abs() < 1e-14));
    }

    #[test]
    fn linear_cell_mean_is_centre_value() {
        let g = grid();
        let p = cell_mean(&g, &AnalyticField::scalar(|x, _| x[0])).unwrap();
        for c in 0..g.num_cells() {
            assert!((p.values[c] - g.cell_center(c)[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn fortin_commutes_with_divergence_for_polynomials() {
        let g = grid();
        let phi = AnalyticField::vector(|x, _| [x[1] * (1.0 - x[1]) * x[0] * (1.0 - x[0]), 0.0, 0.0])
            .with_divergence(|x, _| x[1] * (1.0 - x[1]) * (1.0 - 2.0 * x[0]))
            .with_order(2);
        let u = fortin_raw(&g, &phi).unwrap();
        let div = divergence(&g, &u).unwrap();
        let d = phi.divergence().unwrap();
        let pm = cell_mean(&g, &AnalyticField::scalar(|x, t| d(x, t)).with_order(3)).unwrap();
        for c in 0..g.num_cells() {
            assert!((div.values[c] - pm.values[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn slab_mean_of_linear_in_time() {
        let g = grid();
        let f = AnalyticField::vector(|_, t| [t, 2.0 * t, 0.0]);
        let m = dual_cell_slab_mean(&g, &f, 0.1, 0.3).unwrap();
        for s in 0..g.num_faces(0) {
            if g.faces[0].interior[s] {
                assert!((m.comps[0][s] - 0.2).abs() < 1e-14);
            }
        }
        assert!(dual_cell_slab_mean(&g, &f, 0.3, 0.3).is_err());
        assert!(Quadrature::gauss(0).is_err());
    }
}
