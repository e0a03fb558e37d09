//! Divergence, gradient and Laplacian on a random 3D grid, with the duality
//! and symmetry identities they satisfy.

use macflow::harness::checks::{duality_terms, laplacian_terms};
use macflow::random::{random_grid, random_pressure, random_velocity, seeded};
use macflow::spatial_ops::{divergence, laplacian, pressure_gradient};

fn main() -> macflow::Result<()> {
    let mut rng = seeded(1);
    let g = random_grid(&mut rng, 3, 7)?;
    let u = random_velocity(&mut rng, &g);
    let v = random_velocity(&mut rng, &g);
    let q = random_pressure(&mut rng, &g);

    println!("grid {:?}, eta {:.2}", g.n(), g.eta());
    println!("max |div u| = {:.3e}", divergence(&g, &u)?.max_abs());
    println!("max |grad q| = {:.3e}", pressure_gradient(&g, &q)?.max_abs());
    println!("max |lap u| = {:.3e}", laplacian(&g, &u)?.max_abs());

    let (a, b, s) = duality_terms(&g, &q, &v)?;
    println!("(div v, q) + (v, grad q) = {:.3e}  (scale {s:.3e})", a + b);
    let (a, b, s) = laplacian_terms(&g, &u, &v)?;
    println!("(lap u, v) - (u, lap v) = {:.3e}  (scale {s:.3e})", a - b);
    Ok(())
}
