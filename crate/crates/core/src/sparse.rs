//! Coordinate-list sparse matrices: assembly target, matrix-vector product,
//! text export, and conversion to faer for factorization.

use std::collections::BTreeMap;
use std::io::Write;

use faer::sparse::{SparseColMat, Triplet};

use crate::error::{MacError, Result};

#[derive(Clone, Debug, Default)]
pub struct CooMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        CooMatrix { nrows, ncols, entries: Vec::new() }
    }

    #[inline]
    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(r < self.nrows && c < self.ncols);
        if v != 0.0 {
            self.entries.push((r, c, v));
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Sum duplicates; entries come out sorted by (row, col).
    pub fn compressed(&self) -> BTreeMap<(usize, usize), f64> {
        let mut m = BTreeMap::new();
        for &(r, c, v) in &self.entries {
            *m.entry((r, c)).or_insert(0.0) += v;
        }
        m
    }

    pub fn transpose(&self) -> CooMatrix {
        CooMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    pub fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let trip: Vec<Triplet<usize, usize, f64>> =
            self.compressed().into_iter().map(|((r, c), v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &trip)
            .map_err(|e| MacError::LinearSolver(format!("matrix creation failed: {e:?}")))
    }

    /// One `row col value` line per stored (summed) entry.
    pub fn write_coo<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.compressed().len())?;
        for ((r, c), v) in self.compressed() {
            writeln!(w, "{r} {c} {}", crate::io::fmt_f64(v))?;
        }
        Ok(())
    }
}
