//! The randomized property suite on 2D and 3D grids.

use macflow::harness::run_verify;

fn main() -> macflow::Result<()> {
    let res = run_verify(7, &[4, 6], &[2, 3])?;
    for r in &res.records {
        println!("{:28} {:24} {:>3} grids  {:.2e} <= {:.0e}  {}", r.name, r.lemma, r.grids, r.max_violation, r.tolerance, r.passed);
    }
    println!("all passed: {}", res.passed());
    Ok(())
}
