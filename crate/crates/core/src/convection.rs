//! Dual mass fluxes, the convection operator and the trilinear form.

use std::fmt;
use std::str::FromStr;

use crate::error::{MacError, Result};
use crate::fields::{partial_derivative, side, VelocityField};
use crate::macgrid::MacGrid;
use crate::spatial_ops::{reconstruct, ReconstructionWeights};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ConvectionScheme {
    #[default]
    Centred,
    Upwind,
}

impl FromStr for ConvectionScheme {
    type Err = MacError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "centred" | "centered" => Ok(ConvectionScheme::Centred),
            "upwind" => Ok(ConvectionScheme::Upwind),
            other => Err(MacError::InvalidArgument(format!("unknown convection scheme `{other}`"))),
        }
    }
}

impl fmt::Display for ConvectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConvectionScheme::Centred => "centred",
            ConvectionScheme::Upwind => "upwind",
        })
    }
}

/// Mass fluxes `|ε| u_{σ,ε}` through the `(i, j)` dual faces, oriented
/// along `+e^(j)` (i.e. outward for the `lo` dual cell).
pub fn mass_fluxes(grid: &MacGrid, u: &VelocityField, i: usize, j: usize) -> Vec<f64> {
    (0..grid.dual(i, j).len()).map(|e| mass_flux_at(grid, u, i, j, e)).collect()
}

/// Flux `|ε| u_{σ,ε}` through dual face `e` of `Ẽ^(i)` normal to `e^(j)`,
/// seen from the dual cell of face `sigma`.
pub fn dual_mass_flux(grid: &MacGrid, u: &VelocityField, i: usize, j: usize, e: usize, sigma: usize) -> Result<f64> {
    u.check(grid)?;
    if i >= grid.dim() || j >= grid.dim() || e >= grid.dual(i, j).len() {
        return Err(MacError::InvalidArgument(format!("dual face {e} not in partition ({i},{j})")));
    }
    let d = grid.dual(i, j);
    let f = mass_flux_at(grid, u, i, j, e);
    if d.lo[e] == Some(sigma) {
        Ok(f)
    } else if d.hi[e] == Some(sigma) {
        Ok(-f)
    } else {
        Err(MacError::InvalidArgument(format!("face {sigma} is not a side of dual face {e}")))
    }
}

#[inline]
fn mass_flux_at(grid: &MacGrid, u: &VelocityField, i: usize, j: usize, e: usize) -> f64 {
    let d = grid.dual(i, j);
    if i == j {
        let fs = &grid.faces[i];
        let (lo, hi) = (d.lo[e].unwrap(), d.hi[e].unwrap());
        0.5 * (fs.measure[lo] * u.comps[i][lo] + fs.measure[hi] * u.comps[i][hi])
    } else {
        // the two faces of E^(j) crossing this dual face are the sides of the
        // (j, i) dual face carrying the same multi-index
        let t = grid.dual(j, i);
        let fs = &grid.faces[j];
        let a = t.lo[e].map_or(0.0, |s| fs.measure[s] * u.comps[j][s]);
        let b = t.hi[e].map_or(0.0, |s| fs.measure[s] * u.comps[j][s]);
        0.5 * (a + b)
    }
}

/// Convected value on a dual face. Ties at zero flux take the `lo` value.
#[inline]
pub fn convected_value(scheme: ConvectionScheme, flux: f64, lo: f64, hi: f64) -> f64 {
    match scheme {
        ConvectionScheme::Centred => 0.5 * (lo + hi),
        ConvectionScheme::Upwind => {
            if flux >= 0.0 {
                lo
            } else {
                hi
            }
        }
    }
}

/// Per dual cell `Σ_ε |ε| u_{σ,ε} v*_ε` (not divided by `|D_σ|`), over all faces.
pub fn convection_sums(grid: &MacGrid, u: &VelocityField, v: &VelocityField, scheme: ConvectionScheme) -> Result<VelocityField> {
    u.check(grid)?;
    v.check(grid)?;
    let mut out = VelocityField::zeros(grid);
    for i in 0..grid.dim() {
        let vi = &v.comps[i];
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let flux = mass_fluxes(grid, u, i, j);
            for e in 0..d.len() {
                let vs = convected_value(scheme, flux[e], side(vi, d.lo[e]), side(vi, d.hi[e]));
                let t = flux[e] * vs;
                if let Some(lo) = d.lo[e] {
                    out.comps[i][lo] += t;
                }
                if let Some(hi) = d.hi[e] {
                    out.comps[i][hi] -= t;
                }
            }
        }
    }
    Ok(out)
}

/// `C_E(u) v`, zero on exterior faces.
pub fn convection_apply(grid: &MacGrid, u: &VelocityField, v: &VelocityField, scheme: ConvectionScheme) -> Result<VelocityField> {
    let mut out = convection_sums(grid, u, v, scheme)?;
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            out.comps[i][s] = if fs.interior[s] { out.comps[i][s] / fs.dual_measure[s] } else { 0.0 };
        }
    }
    Ok(out)
}

/// `b_E(u, v, w) = Σ_i Σ_σ w_σ Σ_ε |ε| u_{σ,ε} v*_ε`.
pub fn trilinear_b(grid: &MacGrid, u: &VelocityField, v: &VelocityField, w: &VelocityField, scheme: ConvectionScheme) -> Result<f64> {
    w.check(grid)?;
    let sums = convection_sums(grid, u, v, scheme)?;
    let mut b = 0.0;
    for i in 0..grid.dim() {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            if fs.interior[s] {
                b += sums.comps[i][s] * w.comps[i][s];
            }
        }
    }
    Ok(b)
}

/// Reconstruction form `-Σ_i Σ_j ∫ R(v_i) R(u_j) ∂_j w_i`, built from the
/// reconstruction operators and the discrete partial derivatives only.
pub fn trilinear_b_reconstructed(
    grid: &MacGrid,
    u: &VelocityField,
    v: &VelocityField,
    w: &VelocityField,
    scheme: ConvectionScheme,
) -> Result<f64> {
    u.check(grid)?;
    v.check(grid)?;
    w.check(grid)?;
    let mut b = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let uj = if i == j {
                reconstruct(grid, &u.comps[i], &ReconstructionWeights::centred(grid, i, i))?
            } else {
                reconstruct(grid, &u.comps[j], &ReconstructionWeights::mass_flux(grid, i, j))?
            };
            let wv = match scheme {
                ConvectionScheme::Centred => ReconstructionWeights::centred(grid, i, j),
                ConvectionScheme::Upwind => {
                    let flux: Vec<f64> = uj.iter().zip(&d.area).map(|(a, m)| a * m).collect();
                    ReconstructionWeights::upwind(grid, &flux, i, j)
                }
            };
            let vi = reconstruct(grid, &v.comps[i], &wv)?;
            let dw = partial_derivative(grid, &w.comps[i], i, j);
            for e in 0..d.len() {
                b -= d.volume[e] * vi[e] * uj[e] * dw[e];
            }
        }
    }
    Ok(b)
}

/// Upwind excess `½ Σ_ε |ε| |u_{σ,ε}| (v_σ - v_σ')²` over interior dual faces.
pub fn upwind_dissipation(grid: &MacGrid, u: &VelocityField, v: &VelocityField) -> Result<f64> {
    u.check(grid)?;
    v.check(grid)?;
    let mut t = 0.0;
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let flux = mass_fluxes(grid, u, i, j);
            for e in 0..d.len() {
                if let (Some(lo), Some(hi)) = (d.lo[e], d.hi[e]) {
                    t += 0.5 * flux[e].abs() * (v.comps[i][lo] - v.comps[i][hi]).powi(2);
                }
            }
        }
    }
    Ok(t)
}

/// Net outward mass flux of every dual cell, `Σ_ε |ε| u_{σ,ε}`.
pub fn dual_cell_mass_balance(grid: &MacGrid, u: &VelocityField) -> Result<VelocityField> {
    u.check(grid)?;
    let mut out = VelocityField::zeros(grid);
    for i in 0..grid.dim() {
        for j in 0..grid.dim() {
            let d = grid.dual(i, j);
            let flux = mass_fluxes(grid, u, i, j);
            for e in 0..d.len() {
                if let Some(lo) = d.lo[e] {
                    out.comps[i][lo] += flux[e];
                }
                if let Some(hi) = d.hi[e] {
                    out.comps[i][hi] -= flux[e];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macgrid::GridSpec;

    fn unit(n: usize) -> MacGrid {
        MacGrid::new(&GridSpec::unit(2, n).unwrap()).unwrap()
    }

    #[test]
    fn uniform_flow_fluxes() {
        let g = unit(3);
        // raw face values of (1, 0) including walls, to probe the two formulas
        let mut u = VelocityField::zeros(&g);
        u.comps[0].iter_mut().for_each(|v| *v = 1.0);
        let h = 1.0 / 3.0;
        // normal dual faces: |ε| u_{σ,ε} = mean of |σ| u_σ = h, equal and
        // opposite for the two sides of each interior dual cell
        let f00 = mass_fluxes(&g, &u, 0, 0);
        assert!(f00.iter().all(|f| (f - h).abs() < 1e-15));
        let bal = dual_cell_mass_balance(&g, &u).unwrap();
        for s in 0..g.num_faces(0) {
            if g.faces[0].interior[s] {
                assert!(bal.comps[0][s].abs() < 1e-15);
            }
        }
        // the x-component carried across y-normal dual faces of E^(2): |ε| * 1
        let f10 = mass_fluxes(&g, &u, 1, 0);
        let d = g.dual(1, 0);
        for e in 0..d.len() {
            let k = d.shape.multi(e)[0];
            if k > 0 && k < 3 {
                assert!((f10[e] - d.area[e]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_stencil_by_hand() {
        let g = unit(3);
        let h = 1.0 / 3.0;
        let s = g.faces[0].shape.index([1, 1, 0]);
        let r = g.faces[0].shape.index([2, 1, 0]);
        let mut u = VelocityField::zeros(&g);
        u.comps[0][s] = 2.0;
        u.comps[0][r] = 4.0;
        let mut v = VelocityField::zeros(&g);
        v.comps[0][s] = 1.0;
        // left normal dual face: flux h*(0+2)/2 = h entering, v* = 1/2
        // right normal dual face: flux h*(2+4)/2 = 3h leaving, v* = 1/2
        // tangential dual faces carry no flux (u_2 = 0)
        let c = convection_apply(&g, &u, &v, ConvectionScheme::Centred).unwrap();
        let hand = (-h * 0.5 + 3.0 * h * 0.5) / (h * h);
        assert!((c.comps[0][s] - hand).abs() < 1e-12 * hand);
        // upwind: left takes v of the left face (0), right takes v_σ = 1
        let cu = convection_apply(&g, &u, &v, ConvectionScheme::Upwind).unwrap();
        let hand_up = 3.0 * h / (h * h);
        assert!((cu.comps[0][s] - hand_up).abs() < 1e-12 * hand_up);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("upwind".parse::<ConvectionScheme>().unwrap(), ConvectionScheme::Upwind);
        assert_eq!("centered".parse::<ConvectionScheme>().unwrap(), ConvectionScheme::Centred);
        assert!("quick".parse::<ConvectionScheme>().is_err());
    }
}
