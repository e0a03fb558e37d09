//! Face-mean interpolation of a smooth field keeps its divergence: the
//! discrete divergence equals the cell mean of the exact one.

use std::f64::consts::PI;

use macflow::interpolation::{cell_mean, fortin_interpolate, AnalyticField};
use macflow::random::{random_grid, seeded};
use macflow::spatial_ops::divergence;

fn main() -> macflow::Result<()> {
    let mut rng = seeded(3);
    for order in [2, 3, 5, 8] {
        // normal components vanish on the walls
        let phi = AnalyticField::vector(|x, _| [(PI * x[0]).sin() * (1.0 + x[1] * x[1]), x[1] * (1.0 - x[1]) * x[0].exp(), 0.0])
            .with_order(order);
        let div = AnalyticField::scalar(|x, _| PI * (PI * x[0]).cos() * (1.0 + x[1] * x[1]) + (1.0 - 2.0 * x[1]) * x[0].exp())
            .with_order(order);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let g = random_grid(&mut rng, 2, 12)?;
            let u = fortin_interpolate(&g, &phi)?;
            let d = divergence(&g, &u)?;
            let m = cell_mean(&g, &div)?;
            let e = d.values.iter().zip(&m.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(e);
        }
        println!("Gauss order {order}: max |div Pu - mean div u| = {worst:.3e}");
    }
    Ok(())
}
