//! Convection trilinear forms: the centred form is skew in its last two
//! arguments, the upwind one adds a nonnegative dissipation.

use macflow::convection::{trilinear_b, upwind_dissipation, ConvectionScheme};
use macflow::random::{random_divergence_free, random_grid, random_velocity, seeded};

fn main() -> macflow::Result<()> {
    let mut rng = seeded(2);
    for dim in [2, 3] {
        let g = random_grid(&mut rng, dim, 8)?;
        let u = random_divergence_free(&mut rng, &g)?;
        let v = random_velocity(&mut rng, &g);
        let w = random_velocity(&mut rng, &g);
        let c = |a, b| trilinear_b(&g, &u, a, b, ConvectionScheme::Centred);
        println!("{dim}D grid {:?}", &g.n()[..dim]);
        println!("  b_c(u; v, w) + b_c(u; w, v) = {:.3e}", c(&v, &w)? + c(&w, &v)?);
        println!("  b_c(u; v, v)               = {:.3e}", c(&v, &v)?);
        let up = trilinear_b(&g, &u, &v, &v, ConvectionScheme::Upwind)?;
        println!("  b_up(u; v, v)              = {up:.6e}");
        println!("  upwind dissipation         = {:.6e}", upwind_dissipation(&g, &u, &v)?);
    }
    Ok(())
}
