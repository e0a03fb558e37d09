//! Geometry of a MAC grid on a box: primal cells, faces per direction,
//! dual cells, and the (i,j) dual-face partitions used for velocity
//! derivatives.
//!
//! Every entity class is indexed lexicographically with the x index running
//! fastest. In 2D a dummy third axis of one cell of unit width is kept so
//! that all measure products can be written uniformly.

use crate::error::{MacError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shape(pub [usize; 3]);

impl Shape {
    pub fn len(&self) -> usize {
        self.0.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.0[0] * (idx[1] + self.0[1] * idx[2])
    }

    #[inline]
    pub fn multi(&self, lin: usize) -> [usize; 3] {
        let a = lin % self.0[0];
        let r = lin / self.0[0];
        [a, r % self.0[1], r / self.0[1]]
    }

    /// Shift `idx` by `delta` along `axis`, returning `None` when it leaves the shape.
    #[inline]
    pub fn shift(&self, mut idx: [usize; 3], axis: usize, delta: isize) -> Option<[usize; 3]> {
        let v = idx[axis] as isize + delta;
        if v < 0 || v >= self.0[axis] as isize {
            return None;
        }
        idx[axis] = v as usize;
        Some(idx)
    }
}

/// Per-axis coordinate data.
#[derive(Clone, Debug)]
pub struct Axis {
    pub nodes: Vec<f64>,
    pub widths: Vec<f64>,
    pub centers: Vec<f64>,
    /// `spans[k] = (h[k-1] + h[k]) / 2` for node `k`, with missing widths taken as 0.
    pub spans: Vec<f64>,
}

impl Axis {
    fn new(nodes: &[f64]) -> Self {
        let n = nodes.len() - 1;
        let widths: Vec<f64> = (0..n).map(|k| nodes[k + 1] - nodes[k]).collect();
        let centers = (0..n).map(|k| 0.5 * (nodes[k] + nodes[k + 1])).collect();
        let spans = (0..=n)
            .map(|k| {
                let a = if k > 0 { widths[k - 1] } else { 0.0 };
                let b = if k < n { widths[k] } else { 0.0 };
                0.5 * (a + b)
            })
            .collect();
        Axis { nodes: nodes.to_vec(), widths, centers, spans }
    }

    pub fn n(&self) -> usize {
        self.widths.len()
    }

    pub fn length(&self) -> f64 {
        self.nodes[self.n()] - self.nodes[0]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub coords: Vec<Vec<f64>>,
}

impl GridSpec {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self> {
        let spec = GridSpec { coords };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform grid with `n[i]` cells on `[lo_i, hi_i]`.
    pub fn uniform(n: &[usize], bounds: &[(f64, f64)]) -> Result<Self> {
        if n.len() != bounds.len() {
            return Err(MacError::MalformedSpec("cell counts and box bounds differ in length".into()));
        }
        let coords = n
            .iter()
            .zip(bounds)
            .map(|(&k, &(a, b))| (0..=k).map(|m| a + (b - a) * m as f64 / k as f64).collect())
            .collect();
        GridSpec::new(coords)
    }

    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        GridSpec::uniform(&vec![n; dim], &vec![(0.0, 1.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.coords.len();
        if d != 2 && d != 3 {
            return Err(MacError::UnsupportedDimension(d));
        }
        for (i, c) in self.coords.iter().enumerate() {
            if c.len() < 2 {
                return Err(MacError::MalformedSpec(format!("axis {i} needs at least two coordinates")));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(MacError::MalformedSpec(format!("axis {i} has a non-finite coordinate")));
            }
            if let Some(k) = c.windows(2).position(|w| w[1] <= w[0]) {
                return Err(MacError::MalformedSpec(format!(
                    "axis {i} coordinates not strictly increasing at position {}",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// Parse the grid text format: `key: value` lines, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dim: Option<(usize, usize)> = None;
        let mut coords: [Option<(usize, Vec<f64>)>; 3] = [None, None, None];
        let mut uniform: Option<(usize, Vec<usize>)> = None;
        let mut bbox: Option<(usize, Vec<f64>)> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = no + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| MacError::Parse { line, msg: format!("{msg} in `{}`", raw.trim()) };
            let (key, value) = body
                .split_once(':')
                .or_else(|| body.split_once('='))
                .ok_or_else(|| err("expected `key: value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            let floats = || -> Result<Vec<f64>> {
                value
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|e| err(format!("bad number `{}` ({e})", s.trim()))))
                    .collect()
            };
            match key {
                "dim" => {
                    let d = value.parse::<usize>().map_err(|e| err(format!("bad dimension ({e})")))?;
                    if d != 2 && d != 3 {
                        return Err(err(format!("unsupported dimension {d}")));
                    }
                    dim = Some((line, d));
                }
                "coords_x" | "coords_y" | "coords_z" => {
                    let axis = match key {
                        "coords_x" => 0,
                        "coords_y" => 1,
                        _ => 2,
                    };
                    let c = floats()?;
                    if c.len() < 2 {
                        return Err(err("need at least two coordinates".into()));
                    }
                    if c.iter().any(|v| !v.is_finite()) {
                        return Err(err("non-finite coordinate".into()));
                    }
                    if c.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(err("coordinates not strictly increasing".into()));
                    }
                    coords[axis] = Some((line, c));
                }
                "uniform" => {
                    let n: Vec<usize> = value
                        .split(',')
                        .map(|s| s.trim().parse::<usize>().map_err(|e| err(format!("bad cell count ({e})"))))
                        .collect::<Result<_>>()?;
                    if n.len() != 2 && n.len() != 3 {
                        return Err(err("uniform needs 2 or 3 cell counts".into()));
                    }
                    if n.contains(&0) {
                        return Err(err("cell counts must be positive".into()));
                    }
                    uniform = Some((line, n));
                }
                "box" => {
                    let b = floats()?;
                    if b.len() != 4 && b.len() != 6 {
                        return Err(err("box needs 4 or 6 numbers".into()));
                    }
                    if b.chunks(2).any(|p| !(p[1] > p[0])) {
                        return Err(err("box bounds must satisfy lo < hi".into()));
                    }
                    bbox = Some((line, b));
                }
                _ => return Err(err(format!("unknown key `{key}`"))),
            }
        }
        let last = text.lines().count().max(1);
        if let Some((uline, n)) = uniform {
            if coords.iter().any(|c| c.is_some()) {
                return Err(MacError::Parse { line: uline, msg: "`uniform` cannot be combined with coords_*".into() });
            }
            let d = n.len();
            if let Some((dline, dd)) = dim {
                if dd != d {
                    return Err(MacError::Parse { line: dline, msg: format!("dim {dd} disagrees with uniform ({d} counts)") });
                }
            }
            let bounds: Vec<(f64, f64)> = match bbox {
                Some((bline, b)) => {
                    if b.len() != 2 * d {
                        return Err(MacError::Parse { line: bline, msg: format!("box needs {} numbers for dim {d}", 2 * d) });
                    }
                    b.chunks(2).map(|p| (p[0], p[1])).collect()
                }
                None => vec![(0.0, 1.0); d],
            };
            return GridSpec::uniform(&n, &bounds);
        }
        if let Some((bline, _)) = bbox {
            return Err(MacError::Parse { line: bline, msg: "`box` requires `uniform`".into() });
        }
        let d = match dim {
            Some((_, d)) => d,
            None => {
                if coords[2].is_some() {
                    3
                } else {
                    2
                }
            }
        };
        let mut out = Vec::new();
        for (axis, c) in coords.iter().enumerate().take(d) {
            match c {
                Some((_, v)) => out.push(v.clone()),
                None => {
                    let name = ["coords_x", "coords_y", "coords_z"][axis];
                    return Err(MacError::Parse { line: last, msg: format!("missing `{name}`") });
                }
            }
        }
        if d == 2 {
            if let Some((zline, _)) = &coords[2] {
                return Err(MacError::Parse { line: *zline, msg: "coords_z given for a 2D grid".into() });
            }
        }
        GridSpec::new(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("dim: {}\n", self.dim());
        for (i, c) in self.coords.iter().enumerate() {
            let name = ["coords_x", "coords_y", "coords_z"][i];
            let vals: Vec<String> = c.iter().map(|v| crate::io::fmt_f64(*v)).collect();
            s.push_str(&format!("{name}: {}\n", vals.join(",")));
        }
        s
    }
}

/// Faces normal to one axis.
#[derive(Clone, Debug)]
pub struct FaceSet {
    pub dir: usize,
    pub shape: Shape,
    pub measure: Vec<f64>,
    pub dual_measure: Vec<f64>,
    pub interior: Vec<bool>,
    /// Oriented neighbours `(K, L)` with `L` on the positive side.
    pub cells: Vec<(Option<usize>, Option<usize>)>,
}

impl FaceSet {
    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }
}

/// Dual faces of the velocity component `comp` normal to direction `dir`.
///
/// Entry `e` separates dual cells `lo[e]` and `hi[e]` (faces of `E^(comp)`),
/// with `hi` on the positive `dir` side. A missing side marks a dual face on
/// the domain boundary. `volume[e]` is the measure of the cell `D_e` of the
/// `(comp, dir)` partition; `lo_part`/`hi_part` are the measures of its
/// intersections with the dual cells of `lo` and `hi`.
#[derive(Clone, Debug)]
pub struct DualFaceSet {
    pub comp: usize,
    pub dir: usize,
    pub shape: Shape,
    pub lo: Vec<Option<usize>>,
    pub hi: Vec<Option<usize>>,
    pub area: Vec<f64>,
    pub dist: Vec<f64>,
    pub volume: Vec<f64>,
    pub lo_part: Vec<f64>,
    pub hi_part: Vec<f64>,
}

impl DualFaceSet {
    pub fn len(&self) -> usize {
        self.area.len()
    }

    pub fn is_empty(&self) -> bool {
        self.area.is_empty()
    }

    pub fn is_interior(&self, e: usize) -> bool {
        self.lo[e].is_some() && self.hi[e].is_some()
    }
}

#[derive(Clone, Debug)]
pub struct MacGrid {
    dim: usize,
    pub axes: [Axis; 3],
    pub cell_shape: Shape,
    pub cell_volume: Vec<f64>,
    pub faces: Vec<FaceSet>,
    dual: Vec<DualFaceSet>,
    h: f64,
    eta: f64,
    hash: u64,
}

pub fn build_grid(spec: &GridSpec) -> Result<MacGrid> {
    MacGrid::new(spec)
}

impl MacGrid {
    pub fn new(spec: &GridSpec) -> Result<Self> {
        spec.validate()?;
        let dim = spec.dim();
        let unit = [0.0, 1.0];
        let axes = [
            Axis::new(&spec.coords[0]),
            Axis::new(&spec.coords[1]),
            Axis::new(if dim == 3 { &spec.coords[2] } else { &unit }),
        ];
        let n = [axes[0].n(), axes[1].n(), axes[2].n()];
        let cell_shape = Shape(n);
        let cell_volume: Vec<f64> = (0..cell_shape.len())
            .map(|c| {
                let idx = cell_shape.multi(c);
                (0..3).map(|l| axes[l].widths[idx[l]]).product()
            })
            .collect();

        let mut faces = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut s = n;
            s[i] += 1;
            let shape = Shape(s);
            let len = shape.len();
            let mut measure = Vec::with_capacity(len);
            let mut dual_measure = Vec::with_capacity(len);
            let mut interior = Vec::with_capacity(len);
            let mut cells = Vec::with_capacity(len);
            for f in 0..len {
                let idx = shape.multi(f);
                let m: f64 = (0..3).filter(|&l| l != i).map(|l| axes[l].widths[idx[l]]).product();
                measure.push(m);
                dual_measure.push(m * axes[i].spans[idx[i]]);
                interior.push(idx[i] > 0 && idx[i] < n[i]);
                let k = (idx[i] > 0).then(|| {
                    let mut c = idx;
                    c[i] -= 1;
                    cell_shape.index(c)
                });
                let l = (idx[i] < n[i]).then(|| cell_shape.index(idx));
                cells.push((k, l));
            }
            faces.push(FaceSet { dir: i, shape, measure, dual_measure, interior, cells });
        }

        let mut dual = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                dual.push(Self::build_dual(&axes, n, &faces[i], i, j));
            }
        }

        let h = (0..cell_shape.len())
            .map(|c| {
                let idx = cell_shape.multi(c);
                (0..dim).map(|l| axes[l].widths[idx[l]].powi(2)).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max);
        let mut eta: f64 = 1.0;
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    let mx = faces[i].measure.iter().cloned().fold(0.0, f64::max);
                    let mn = faces[j].measure.iter().cloned().fold(f64::INFINITY, f64::min);
                    eta = eta.max(mx / mn);
                }
            }
        }

        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |bytes: &[u8]| {
            for b in bytes {
                hash ^= *b as u64;
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        feed(&(dim as u64).to_le_bytes());
        for c in &spec.coords {
            feed(&(c.len() as u64).to_le_bytes());
            for v in c {
                feed(&v.to_bits().to_le_bytes());
            }
        }

        Ok(MacGrid { dim, axes, cell_shape, cell_volume, faces, dual, h, eta, hash })
    }

    fn build_dual(axes: &[Axis; 3], n: [usize; 3], fs: &FaceSet, i: usize, j: usize) -> DualFaceSet {
        let mut s = n;
        if i != j {
            s[i] += 1;
            s[j] += 1;
        }
        let shape = Shape(s);
        let len = shape.len();
        let mut d = DualFaceSet {
            comp: i,
            dir: j,
            shape,
            lo: Vec::with_capacity(len),
            hi: Vec::with_capacity(len),
            area: Vec::with_capacity(len),
            dist: Vec::with_capacity(len),
            volume: Vec::with_capacity(len),
            lo_part: Vec::with_capacity(len),
            hi_part: Vec::with_capacity(len),
        };
        for e in 0..len {
            let idx = shape.multi(e);
            if i == j {
                // dual face through the centre of cell idx, between its two i-faces
                let lo = fs.shape.index(idx);
                let mut up = idx;
                up[i] += 1;
                let hi = fs.shape.index(up);
                let area: f64 = (0..3).filter(|&l| l != i).map(|l| axes[l].widths[idx[l]]).product();
                let dist = axes[i].widths[idx[i]];
                let vol = area * dist;
                d.lo.push(Some(lo));
                d.hi.push(Some(hi));
                d.area.push(area);
                d.dist.push(dist);
                d.volume.push(vol);
                d.lo_part.push(0.5 * vol);
                d.hi_part.push(0.5 * vol);
            } else {
                // idx[i]: face index along i, idx[j]: node index along j
                let m = idx[j];
                let nj = n[j];
                let lo = (m > 0).then(|| {
                    let mut c = idx;
                    c[j] -= 1;
                    fs.shape.index(c)
                });
                let hi = (m < nj).then(|| fs.shape.index(idx));
                let rest: f64 = (0..3).filter(|&l| l != i && l != j).map(|l| axes[l].widths[idx[l]]).product();
                let ext = axes[i].spans[idx[i]];
                let area = ext * rest;
                let dist = axes[j].spans[m];
                d.lo.push(lo);
                d.hi.push(hi);
                d.area.push(area);
                d.dist.push(dist);
                d.volume.push(area * dist);
                d.lo_part.push(if m > 0 { 0.5 * area * axes[j].widths[m - 1] } else { 0.0 });
                d.hi_part.push(if m < nj { 0.5 * area * axes[j].widths[m] } else { 0.0 });
            }
        }
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> [usize; 3] {
        self.cell_shape.0
    }

    pub fn num_cells(&self) -> usize {
        self.cell_volume.len()
    }

    pub fn num_faces(&self, i: usize) -> usize {
        self.faces[i].len()
    }

    pub fn num_interior_faces(&self, i: usize) -> usize {
        self.faces[i].interior.iter().filter(|b| **b).count()
    }

    pub fn dual(&self, i: usize, j: usize) -> &DualFaceSet {
        &self.dual[i * self.dim + j]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Widest cell edge over all axes.
    pub fn max_width(&self) -> f64 {
        self.axes[..self.dim]
            .iter()
            .flat_map(|a| a.nodes.windows(2).map(|w| w[1] - w[0]))
            .fold(0.0, f64::max)
    }

    pub fn hash(&self) -> u64 {
        self.hash
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec { coords: (0..self.dim).map(|l| self.axes[l].nodes.clone()).collect() }
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim).map(|l| self.axes[l].length()).product()
    }

    pub fn diameter(&self) -> f64 {
        (0..self.dim).map(|l| self.axes[l].length().powi(2)).sum::<f64>().sqrt()
    }

    pub fn cell_center(&self, c: usize) -> [f64; 3] {
        let idx = self.cell_shape.multi(c);
        let mut x = [0.0; 3];
        for l in 0..self.dim {
            x[l] = self.axes[l].centers[idx[l]];
        }
        x
    }

    pub fn face_center(&self, i: usize, f: usize) -> [f64; 3] {
        let idx = self.faces[i].shape.multi(f);
        let mut x = [0.0; 3];
        for l in 0..self.dim {
            x[l] = if l == i { self.axes[l].nodes[idx[l]] } else { self.axes[l].centers[idx[l]] };
        }
        x
    }

    /// Bounds of a face as `[lo, hi]` per axis (degenerate along its normal).
    pub fn face_box(&self, i: usize, f: usize) -> [[f64; 2]; 3] {
        let idx = self.faces[i].shape.multi(f);
        let mut b = [[0.0; 2]; 3];
        for l in 0..self.dim {
            b[l] = if l == i {
                [self.axes[l].nodes[idx[l]]; 2]
            } else {
                [self.axes[l].nodes[idx[l]], self.axes[l].nodes[idx[l] + 1]]
            };
        }
        b
    }

    pub fn cell_box(&self, c: usize) -> [[f64; 2]; 3] {
        let idx = self.cell_shape.multi(c);
        let mut b = [[0.0; 2]; 3];
        for l in 0..self.dim {
            b[l] = [self.axes[l].nodes[idx[l]], self.axes[l].nodes[idx[l] + 1]];
        }
        b
    }

    /// The (up to two) half-cell boxes whose union is the dual cell of a face.
    pub fn dual_cell_boxes(&self, i: usize, f: usize) -> Vec<[[f64; 2]; 3]> {
        let fs = &self.faces[i];
        let x = self.axes[i].nodes[fs.shape.multi(f)[i]];
        let mut out = Vec::with_capacity(2);
        for c in [fs.cells[f].0, fs.cells[f].1].into_iter().flatten() {
            let mut b = self.cell_box(c);
            let mid = 0.5 * (b[i][0] + b[i][1]);
            b[i] = if mid < x { [mid, x] } else { [x, mid] };
            out.push(b);
        }
        out
    }

    /// Faces of cell `c` as `(direction, face, outward sign)`.
    pub fn cell_faces(&self, c: usize) -> Vec<(usize, usize, f64)> {
        let idx = self.cell_shape.multi(c);
        let mut out = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            let fs = &self.faces[i];
            out.push((i, fs.shape.index(idx), -1.0));
            let mut up = idx;
            up[i] += 1;
            out.push((i, fs.shape.index(up), 1.0));
        }
        out
    }

    /// Outward normal component `n_{K,σ}·e^(i)` for face `f` of `E^(i)` seen from cell `c`.
    pub fn orientation(&self, i: usize, f: usize, c: usize) -> Option<f64> {
        match self.faces[i].cells[f] {
            (Some(k), _) if k == c => Some(1.0),
            (_, Some(l)) if l == c => Some(-1.0),
            _ => None,
        }
    }

    /// Foot of the perpendicular from the centre of the face owning a boundary
    /// dual face onto that dual face.
    pub fn projection_point(&self, i: usize, j: usize, e: usize) -> Option<[f64; 3]> {
        let d = self.dual(i, j);
        if d.is_interior(e) {
            return None;
        }
        let f = d.lo[e].or(d.hi[e])?;
        let mut x = self.face_center(i, f);
        let m = d.shape.multi(e)[j];
        x[j] = self.axes[j].nodes[m];
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(coords: Vec<Vec<f64>>) -> MacGrid {
        MacGrid::new(&GridSpec::new(coords).unwrap()).unwrap()
    }

    #[test]
    fn two_by_two_counts() {
        let m = MacGrid::new(&GridSpec::unit(2, 2).unwrap()).unwrap();
        assert_eq!(m.num_cells(), 4);
        assert!(m.cell_volume.iter().all(|v| (*v - 0.25).abs() < 1e-15));
        for i in 0..2 {
            assert_eq!(m.num_faces(i), 6);
            assert_eq!(m.num_interior_faces(i), 2);
        }
        assert!((m.h() - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(m.eta(), 1.0);
    }

    #[test]
    fn eta_matches_enumeration() {
        let m = g(vec![vec![0.0, 0.25, 1.0], vec![0.0, 0.5, 1.0]]);
        let mut brute: f64 = 0.0;
        for a in &m.faces[0].measure {
            for b in &m.faces[1].measure {
                brute = brute.max(a / b).max(b / a);
            }
        }
        assert_eq!(m.eta(), brute);
        assert_eq!(m.eta(), 2.0);
    }

    #[test]
    fn dual_partitions_cover_box() {
        let m = g(vec![vec![0.0, 0.1, 0.4, 1.0], vec![0.0, 0.7, 1.0], vec![-1.0, 0.0, 0.5, 2.0]]);
        let vol = m.volume();
        for i in 0..3 {
            let s: f64 = m.faces[i].dual_measure.iter().sum();
            assert!((s - vol).abs() < 1e-12 * vol);
            for j in 0..3 {
                let d = m.dual(i, j);
                let s: f64 = d.volume.iter().sum();
                assert!((s - vol).abs() < 1e-12 * vol);
                let parts: f64 = d.lo_part.iter().chain(&d.hi_part).sum();
                assert!((parts - vol).abs() < 1e-12 * vol);
            }
        }
    }

    #[test]
    fn ij_and_ji_partitions_coincide() {
        let m = g(vec![vec![0.0, 0.3, 1.0], vec![0.0, 0.2, 0.6, 1.0]]);
        let a = m.dual(0, 1);
        let b = m.dual(1, 0);
        assert_eq!(a.shape, b.shape);
        for e in 0..a.len() {
            assert!((a.volume[e] - b.volume[e]).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_distance_is_half_width() {
        let m = g(vec![vec![0.0, 0.3, 1.0], vec![0.0, 0.2, 0.6, 1.0]]);
        let d = m.dual(0, 1);
        for e in 0..d.len() {
            let idx = d.shape.multi(e);
            if idx[1] == 0 {
                assert!(d.lo[e].is_none());
                assert!((d.dist[e] - 0.1).abs() < 1e-15);
                let p = m.projection_point(0, 1, e).unwrap();
                assert_eq!(p[1], 0.0);
            }
        }
    }

    #[test]
    fn parse_shorthand_and_errors() {
        let s = GridSpec::parse("# test\nuniform: 4,2\nbox: 0,2,0,1\n").unwrap();
        assert_eq!(s.coords[0], vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let s2 = GridSpec::parse(&s.to_text()).unwrap();
        assert_eq!(s, s2);
        match GridSpec::parse("dim: 2\ncoords_x: 0, 0.5, 1\ncoords_y: 0, 0.7, 0.3\n") {
            Err(MacError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match GridSpec::parse("dim: 2\nfoo: 1\n") {
            Err(MacError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(GridSpec::new(vec![vec![0.0, 1.0]]), Err(MacError::UnsupportedDimension(1))));
        assert!(matches!(GridSpec::new(vec![vec![0.0, 1.0], vec![1.0, 1.0]]), Err(MacError::MalformedSpec(_))));
    }
}
