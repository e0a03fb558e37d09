//! CSV field dumps, report serialization, and number formatting.
//!
//! Field files start with a `# grid=<hash> dim=<d>` line followed by a
//! header row; every face (or cell) gets one row.

use std::io::Write;

use crate::error::{MacError, Result};
use crate::fields::{PressureField, VelocityField};
use crate::macgrid::MacGrid;
use crate::solver::SolveReport;

/// 17 significant digits; parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn index_header(dim: usize) -> String {
    ["ix", "iy", "iz"][..dim].join(",")
}

fn grid_line(grid: &MacGrid) -> String {
    format!("# grid={:016x} dim={}", grid.hash(), grid.dim())
}

fn multi_cols(m: [usize; 3], dim: usize) -> String {
    m[..dim].iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn write_velocity_csv<W: Write>(grid: &MacGrid, u: &VelocityField, mut w: W) -> Result<()> {
    u.check(grid)?;
    let dim = grid.dim();
    writeln!(w, "{}", grid_line(grid))?;
    writeln!(w, "kind,direction,{},value", index_header(dim))?;
    for i in 0..dim {
        let fs = &grid.faces[i];
        for s in 0..fs.len() {
            writeln!(w, "face,{i},{},{}", multi_cols(fs.shape.multi(s), dim), fmt_f64(u.comps[i][s]))?;
        }
    }
    Ok(())
}

pub fn write_pressure_csv<W: Write>(grid: &MacGrid, p: &PressureField, mut w: W) -> Result<()> {
    p.check(grid)?;
    let dim = grid.dim();
    writeln!(w, "{}", grid_line(grid))?;
    writeln!(w, "kind,direction,{},value", index_header(dim))?;
    for c in 0..grid.num_cells() {
        writeln!(w, "cell,-,{},{}", multi_cols(grid.cell_shape.multi(c), dim), fmt_f64(p.values[c]))?;
    }
    Ok(())
}

struct Row {
    line: usize,
    kind: String,
    dir: Option<usize>,
    idx: [usize; 3],
    value: f64,
}

fn read_rows(grid: &MacGrid, text: &str) -> Result<Vec<Row>> {
    let dim = grid.dim();
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, first) = lines.next().ok_or(MacError::Parse { line: 1, msg: "empty file".into() })?;
    let want = grid_line(grid);
    if first.trim() != want {
        return Err(MacError::GridMismatch(format!("file header `{}` does not match `{want}`", first.trim())));
    }
    let header = format!("kind,direction,{},value", index_header(dim));
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        Some((n, h)) => return Err(MacError::Parse { line: n, msg: format!("expected header `{header}`, got `{h}`") }),
        None => return Err(MacError::Parse { line: 2, msg: "missing header row".into() }),
    }
    let mut rows = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let err = |msg: String| MacError::Parse { line, msg };
        let cols: Vec<&str> = raw.split(',').map(str::trim).collect();
        if cols.len() != dim + 3 {
            return Err(err(format!("expected {} columns, found {}", dim + 3, cols.len())));
        }
        let dir = match cols[1] {
            "-" => None,
            d => Some(d.parse::<usize>().map_err(|e| err(format!("bad direction `{d}` ({e})")))?),
        };
        let mut idx = [0; 3];
        for l in 0..dim {
            idx[l] = cols[2 + l].parse().map_err(|e| err(format!("bad index `{}` ({e})", cols[2 + l])))?;
        }
        let value = cols[dim + 2].parse::<f64>().map_err(|e| err(format!("bad value `{}` ({e})", cols[dim + 2])))?;
        rows.push(Row { line, kind: cols[0].to_string(), dir, idx, value });
    }
    Ok(rows)
}

pub fn read_velocity_csv(grid: &MacGrid, text: &str) -> Result<VelocityField> {
    let mut u = VelocityField::zeros(grid);
    let mut seen: Vec<Vec<bool>> = u.comps.iter().map(|c| vec![false; c.len()]).collect();
    for r in read_rows(grid, text)? {
        let err = |msg: String| MacError::Parse { line: r.line, msg };
        let i = match (r.kind.as_str(), r.dir) {
            ("face", Some(i)) if i < grid.dim() => i,
            _ => return Err(err(format!("not a velocity row (`{}`)", r.kind))),
        };
        let sh = grid.faces[i].shape;
        if (0..3).any(|l| r.idx[l] >= sh.0[l]) {
            return Err(err("face index out of range".into()));
        }
        let s = sh.index(r.idx);
        if seen[i][s] {
            return Err(err("duplicate face".into()));
        }
        seen[i][s] = true;
        u.comps[i][s] = r.value;
    }
    if seen.iter().flatten().any(|v| !v) {
        return Err(MacError::GridMismatch("velocity dump does not cover every face".into()));
    }
    Ok(u)
}

pub fn read_pressure_csv(grid: &MacGrid, text: &str) -> Result<PressureField> {
    let mut p = PressureField::zeros(grid);
    let mut seen = vec![false; grid.num_cells()];
    for r in read_rows(grid, text)? {
        let err = |msg: String| MacError::Parse { line: r.line, msg };
        if r.kind != "cell" || r.dir.is_some() {
            return Err(err(format!("not a pressure row (`{}`)", r.kind)));
        }
        if (0..3).any(|l| r.idx[l] >= grid.cell_shape.0[l]) {
            return Err(err("cell index out of range".into()));
        }
        let c = grid.cell_shape.index(r.idx);
        if seen[c] {
            return Err(err("duplicate cell".into()));
        }
        seen[c] = true;
        p.values[c] = r.value;
    }
    if seen.iter().any(|v| !v) {
        return Err(MacError::GridMismatch("pressure dump does not cover every cell".into()));
    }
    p.zero_mean = p.mean(grid).abs() <= 1e-12 * p.max_abs().max(1.0);
    Ok(p)
}

fn join(v: &[impl ToString]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `key=value` lines.
pub fn write_report<W: Write>(rep: &SolveReport, mut w: W) -> Result<()> {
    let f = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",");
    writeln!(w, "kind={}", rep.kind)?;
    writeln!(w, "converged={}", rep.converged)?;
    writeln!(w, "steps={}", rep.steps)?;
    writeln!(w, "picard_iterations={}", join(&rep.picard_iterations))?;
    writeln!(w, "final_residual={}", fmt_f64(rep.final_residual))?;
    writeln!(w, "velocity_l2={}", fmt_f64(rep.velocity_l2))?;
    writeln!(w, "velocity_h1={}", fmt_f64(rep.velocity_h1))?;
    writeln!(w, "pressure_l2={}", fmt_f64(rep.pressure_l2))?;
    writeln!(w, "linear_residuals={}", f(&rep.linear_residuals))?;
    writeln!(w, "nonlinear_residuals={}", f(&rep.nonlinear_residuals))?;
    writeln!(w, "energy={}", f(&rep.energy))?;
    for (k, v) in &rep.estimates {
        writeln!(w, "estimate.{k}={}", fmt_f64(*v))?;
    }
    match rep.seed {
        Some(s) => writeln!(w, "seed={s}")?,
        None => writeln!(w, "seed=")?,
    }
    writeln!(w, "wall_time={}", fmt_f64(rep.wall_time))?;
    Ok(())
}

/// Residual and energy histories as `series,index,value` rows.
pub fn write_history_csv<W: Write>(rep: &SolveReport, mut w: W) -> Result<()> {
    writeln!(w, "series,index,value")?;
    for (name, v) in [
        ("linear_residual", &rep.linear_residuals),
        ("nonlinear_residual", &rep.nonlinear_residuals),
        ("energy", &rep.energy),
    ] {
        for (k, x) in v.iter().enumerate() {
            writeln!(w, "{name},{k},{}", fmt_f64(*x))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::macgrid::GridSpec;

    fn grid() -> MacGrid {
        MacGrid::new(&GridSpec::new(vec![vec![0.0, 0.3, 1.0], vec![0.0, 0.6, 0.8, 1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn velocity_round_trip() {
        let g = grid();
        let u = VelocityField::from_fn(&g, |i, s| (i as f64 + 0.1) / (s as f64 + 3.0));
        let mut buf = Vec::new();
        write_velocity_csv(&g, &u, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(read_velocity_csv(&g, &text).unwrap(), u);
    }

    #[test]
    fn bad_rows_name_the_line() {
        let g = grid();
        let p = PressureField::from_fn(&g, |c| c as f64);
        let mut buf = Vec::new();
        write_pressure_csv(&g, &p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replacen("cell,-,1,0,", "cell,-,1,0,abc", 1);
        match read_pressure_csv(&g, &text) {
            Err(MacError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
