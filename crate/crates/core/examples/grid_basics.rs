//! Build a graded grid from a spec string and query its geometry.

use macflow::{GridSpec, MacGrid};

fn main() -> macflow::Result<()> {
    let spec = GridSpec::parse(
        "dim: 2\n\
         coords_x: 0, 0.05, 0.15, 0.35, 0.65, 1\n\
         coords_y: 0, 0.5, 1   # two rows\n",
    )?;
    let g = MacGrid::new(&spec)?;
    println!("cells {:?}  h = {:.4}  eta = {:.3}  hash = {:016x}", &g.n()[..2], g.h(), g.eta(), g.hash());
    for i in 0..g.dim() {
        println!("direction {i}: {} faces, {} interior", g.num_faces(i), g.num_interior_faces(i));
    }
    let total: f64 = g.faces[0].dual_measure.iter().sum();
    println!("dual cells of x-faces cover {total:.15}");
    for (i, f, sign) in g.cell_faces(0) {
        println!("cell 0: face ({i}, {f}) at {:?}, outward {sign:+}", &g.face_center(i, f)[..2]);
    }
    print!("{}", g.spec().to_text());
    Ok(())
}
