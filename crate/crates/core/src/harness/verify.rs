use std::io::Write;

use crate::error::{MacError, Result};
use crate::io::fmt_f64;
use crate::random::{random_grid_spec, seeded, DEFAULT_WIDTH_RATIO};
use crate::MacGrid;

use super::checks::{registry, uncovered, Check, CATALOG};

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub dims: Vec<usize>,
    /// Random grids drawn per (dimension, size) pair.
    pub grids_per_size: usize,
    pub width_ratio: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 42, sizes: vec![4, 8, 16], dims: vec![2], grids_per_size: 3, width_ratio: DEFAULT_WIDTH_RATIO }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub lemma: String,
    pub statement: String,
    pub grids: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySuiteResult {
    pub seed: u64,
    pub records: Vec<CheckRecord>,
}

impl VerifySuiteResult {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "check,lemma,grids,max_violation,tolerance,status")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.name,
                r.lemma,
                r.grids,
                fmt_f64(r.max_violation),
                fmt_f64(r.tolerance),
                if r.passed { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

pub fn run_verify(seed: u64, sizes: &[usize], dims: &[usize]) -> Result<VerifySuiteResult> {
    let config = VerifyConfig { seed, sizes: sizes.to_vec(), dims: dims.to_vec(), ..Default::default() };
    run_verify_with(&config, &registry())
}

/// Run `checks` on random grids. Every grid and every check get their own
/// generator derived from the seed, so results do not depend on the order
/// of execution. A catalog entry without a registered check is a failure.
pub fn run_verify_with(config: &VerifyConfig, checks: &[Check]) -> Result<VerifySuiteResult> {
    if let Some(s) = config.sizes.iter().find(|s| **s < 2) {
        return Err(MacError::InvalidArgument(format!("size {s} is below 2 cells per axis")));
    }
    if let Some(d) = config.dims.iter().find(|d| **d != 2 && **d != 3) {
        return Err(MacError::UnsupportedDimension(*d));
    }
    let mut grids = Vec::new();
    for &dim in &config.dims {
        for &n in &config.sizes {
            for k in 0..config.grids_per_size {
                let tag = (dim as u64) << 48 ^ (n as u64) << 24 ^ k as u64;
                let mut rng = seeded(config.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15));
                grids.push(MacGrid::new(&random_grid_spec(&mut rng, &vec![n; dim], config.width_ratio)?)?);
            }
        }
    }
    let mut records = Vec::new();
    if !grids.is_empty() {
        for (ci, check) in checks.iter().enumerate() {
            let mut worst: f64 = 0.0;
            for (gi, g) in grids.iter().enumerate() {
                let mut rng = seeded(config.seed.wrapping_add(((ci as u64) << 32) + gi as u64 + 1));
                let v = (check.run)(&mut rng, g)?;
                worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
            }
            let statement = CATALOG.iter().find(|(k, _)| *k == check.lemma).map_or("", |(_, s)| *s);
            records.push(CheckRecord {
                name: check.name.to_string(),
                lemma: check.lemma.to_string(),
                statement: statement.to_string(),
                grids: grids.len(),
                max_violation: worst,
                tolerance: check.tolerance,
                passed: worst <= check.tolerance,
            });
        }
    }
    for lemma in uncovered(checks) {
        records.push(CheckRecord {
            name: format!("coverage:{lemma}"),
            lemma: lemma.to_string(),
            statement: "no registered check".into(),
            grids: 0,
            max_violation: f64::INFINITY,
            tolerance: 0.0,
            passed: false,
        });
    }
    records.sort_by(|a, b| (&a.lemma, &a.name).cmp(&(&b.lemma, &b.name)));
    Ok(VerifySuiteResult { seed: config.seed, records })
}
