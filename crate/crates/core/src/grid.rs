//! Uniform structured grids, cell-centred fields, norms and block averaging.
//!
//! Storage order is axis-major with the first axis varying fastest: cell
//! `(i, j, k)` lives at `i + n0 * (j + n1 * k)`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::format::fmt17;

/// Ghost layers needed on each side by a six-point interface stencil.
pub const GHOST_WIDTH: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    n_cells: Vec<usize>,
    dx: Vec<f64>,
}

impl UniformGrid {
    pub fn new(lower: &[f64], upper: &[f64], n_cells: &[usize]) -> Result<Self> {
        let dim = lower.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if upper.len() != dim || n_cells.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "axis count mismatch: lower {}, upper {}, n_cells {}",
                dim,
                upper.len(),
                n_cells.len()
            )));
        }
        let mut dx = Vec::with_capacity(dim);
        for axis in 0..dim {
            let (lo, hi, n) = (lower[axis], upper[axis], n_cells[axis]);
            if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: upper {hi} must exceed lower {lo}"
                )));
            }
            if n == 0 {
                return Err(Error::InvalidGrid(format!("axis {axis}: zero cells")));
            }
            dx.push((hi - lo) / n as f64);
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            n_cells: n_cells.to_vec(),
            dx,
        })
    }

    /// Same domain and resolution on every axis.
    pub fn cube(dim: usize, lower: f64, upper: f64, n: usize) -> Result<Self> {
        Self::new(&vec![lower; dim], &vec![upper; dim], &vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn n_cells(&self) -> &[usize] {
        &self.n_cells
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    pub fn len(&self) -> usize {
        self.n_cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of cell `j` (zero-based, may lie in the ghost region) on `axis`.
    pub fn center(&self, axis: usize, j: isize) -> f64 {
        self.lower[axis] + (j as f64 + 0.5) * self.dx[axis]
    }

    pub fn centers(&self, axis: usize) -> Vec<f64> {
        (0..self.n_cells[axis] as isize).map(|j| self.center(axis, j)).collect()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.n_cells[..axis].iter().product()
    }

    pub fn unravel(&self, mut index: usize) -> [usize; 3] {
        let mut out = [0; 3];
        for (axis, &n) in self.n_cells.iter().enumerate() {
            out[axis] = index % n;
            index /= n;
        }
        out
    }

    pub fn ravel(&self, idx: [usize; 3]) -> usize {
        let mut flat = 0;
        for axis in (0..self.dim()).rev() {
            flat = flat * self.n_cells[axis] + idx[axis];
        }
        flat
    }

    /// Cell-centre coordinates of a flat index; unused axes are zero.
    pub fn cell_center(&self, index: usize) -> [f64; 3] {
        let idx = self.unravel(index);
        let mut x = [0.0; 3];
        for axis in 0..self.dim() {
            x[axis] = self.center(axis, idx[axis] as isize);
        }
        x
    }

    /// Grid lines along `axis`, one per combination of the other indices.
    pub fn lines(&self, axis: usize) -> impl Iterator<Item = Line> + '_ {
        let stride = self.stride(axis);
        let len = self.n_cells[axis];
        let total = self.len();
        (0..total)
            .filter(move |&c| (c / stride) % len == 0)
            .map(move |start| Line { start, stride, len })
    }

    pub fn same_shape(&self, other: &UniformGrid) -> bool {
        self.n_cells == other.n_cells
            && self
                .lower
                .iter()
                .zip(&other.lower)
                .chain(self.upper.iter().zip(&other.upper))
                .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + a.abs()))
    }

    /// Coarse grid over the same domain with every axis divided by `factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("coarsening factor must be positive".into()));
        }
        let mut n = Vec::with_capacity(self.dim());
        for (axis, &nc) in self.n_cells.iter().enumerate() {
            if nc % factor != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: {nc} cells not divisible by {factor}"
                )));
            }
            n.push(nc / factor);
        }
        Self::new(&self.lower, &self.upper, &n)
    }

    pub fn csv_header(&self) -> String {
        let n: Vec<String> = self.n_cells.iter().map(|n| n.to_string()).collect();
        let dom: Vec<String> = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| format!("{}:{}", fmt17(*l), fmt17(*u)))
            .collect();
        format!("# grid dim={} n={} domain={}", self.dim(), n.join(","), dom.join(","))
    }
}

/// A line of cells along one axis: cell `k` is at `start + k * stride`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Line {
    pub start: usize,
    pub stride: usize,
    pub len: usize,
}

impl Line {
    pub fn cell(&self, k: usize) -> usize {
        self.start + k * self.stride
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhostKind {
    Periodic,
    /// Ghost cells take the exact solution evaluated at their centres.
    DirichletExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhostPolicy {
    pub kind: GhostKind,
    pub width: usize,
}

impl GhostPolicy {
    pub const fn periodic() -> Self {
        Self { kind: GhostKind::Periodic, width: GHOST_WIDTH }
    }

    pub const fn dirichlet() -> Self {
        Self { kind: GhostKind::DirichletExact, width: GHOST_WIDTH }
    }
}

/// Copy one grid line into `out` (length `len + 2 * GHOST_WIDTH`), filling
/// the ghost layers either by periodic wrap or from `exact`, which receives
/// ghost-cell centre coordinates.
pub fn pad_line(
    grid: &UniformGrid,
    axis: usize,
    line: Line,
    values: &[f64],
    kind: GhostKind,
    exact: Option<&dyn Fn([f64; 3]) -> f64>,
    out: &mut Vec<f64>,
) {
    let n = line.len as isize;
    let g = GHOST_WIDTH as isize;
    out.clear();
    for k in -g..n + g {
        let v = if (0..n).contains(&k) {
            values[line.cell(k as usize)]
        } else {
            match (kind, exact) {
                (GhostKind::DirichletExact, Some(f)) => {
                    let mut x = grid.cell_center(line.start);
                    x[axis] = grid.center(axis, k);
                    f(x)
                }
                _ => values[line.cell(k.rem_euclid(n) as usize)],
            }
        };
        out.push(v);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} values", grid.len()),
                found: format!("{} values", values.len()),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|c| f(grid.cell_center(c))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: UniformGrid, c: f64) -> Self {
        let n = grid.len();
        Self { grid, values: vec![c; n] }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Root-mean-square difference over cells.
pub fn l2_error(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    if !a.grid.same_shape(&b.grid) {
        return Err(Error::GridMismatch(format!(
            "{:?} vs {:?}",
            a.grid.n_cells, b.grid.n_cells
        )));
    }
    Ok(rms_diff(&a.values, &b.values))
}

pub(crate) fn rms_diff(a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sum / a.len() as f64).sqrt()
}

/// Average `factor^dim` blocks of a flat array laid out on `fine`.
pub fn block_average(fine: &UniformGrid, values: &[f64], factor: usize) -> Result<(UniformGrid, Vec<f64>)> {
    let coarse = fine.coarsen(factor)?;
    let mut out = vec![0.0; coarse.len()];
    for (c, &v) in values.iter().enumerate() {
        let mut idx = fine.unravel(c);
        for i in idx.iter_mut().take(fine.dim()) {
            *i /= factor;
        }
        out[coarse.ravel(idx)] += v;
    }
    let scale = 1.0 / (factor.pow(fine.dim() as u32)) as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok((coarse, out))
}

pub fn downsample_block_average(fine: &ScalarField, factor: usize) -> Result<ScalarField> {
    let (grid, values) = block_average(&fine.grid, &fine.values, factor)?;
    Ok(ScalarField { grid, values })
}

/// Write one row per cell: centre coordinates followed by each column's value.
pub fn write_fields_csv<W: Write>(out: &mut W, grid: &UniformGrid, columns: &[&[f64]]) -> Result<()> {
    for col in columns {
        if col.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} values", grid.len()),
                found: format!("{} values", col.len()),
            });
        }
    }
    writeln!(out, "{}", grid.csv_header())?;
    for c in 0..grid.len() {
        let x = grid.cell_center(c);
        let mut row: Vec<String> = x[..grid.dim()].iter().map(|v| fmt17(*v)).collect();
        row.extend(columns.iter().map(|col| fmt17(col[c])));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_centers() {
        let g = UniformGrid::new(&[0.0], &[1.0], &[4]).unwrap();
        assert_eq!(g.centers(0), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn paper_resolutions() {
        let g = UniformGrid::new(&[-2.0], &[2.0], &[60]).unwrap();
        assert!((g.dx()[0] - 1.0 / 15.0).abs() < 1e-15);
        let tau = 2.0 * std::f64::consts::PI;
        let g = UniformGrid::cube(3, 0.0, tau, 32).unwrap();
        for axis in 0..3 {
            assert!((g.dx()[axis] - std::f64::consts::PI / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_domain_rejected() {
        assert!(UniformGrid::new(&[1.0], &[1.0], &[4]).is_err());
        assert!(UniformGrid::new(&[1.0], &[0.0], &[4]).is_err());
        assert!(UniformGrid::new(&[0.0], &[1.0], &[0]).is_err());
    }

    #[test]
    fn l2_examples() {
        let g = UniformGrid::new(&[0.0], &[1.0], &[2]).unwrap();
        let a = ScalarField::new(g.clone(), vec![3.0, 4.0]).unwrap();
        let z = ScalarField::constant(g.clone(), 0.0);
        assert_eq!(l2_error(&a, &a).unwrap(), 0.0);
        assert!((l2_error(&a, &z).unwrap() - (12.5f64).sqrt()).abs() < 1e-15);
        let c = ScalarField::new(g.clone(), vec![3.5, 4.5]).unwrap();
        assert!((l2_error(&a, &c).unwrap() - 0.5).abs() < 1e-15);
        let other = ScalarField::constant(UniformGrid::new(&[0.0], &[1.0], &[3]).unwrap(), 0.0);
        assert!(matches!(l2_error(&a, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn downsample_examples() {
        let g = UniformGrid::new(&[0.0], &[1.0], &[4]).unwrap();
        let f = ScalarField::new(g, vec![1.0, 1.0, 3.0, 3.0]).unwrap();
        assert_eq!(downsample_block_average(&f, 2).unwrap().values(), &[1.0, 3.0]);
        assert!(downsample_block_average(&f, 3).is_err());

        let g = UniformGrid::cube(2, 0.0, 10.0, 80).unwrap();
        let x = ScalarField::from_fn(g, |p| p[0]);
        let coarse = downsample_block_average(&x, 4).unwrap();
        assert_eq!(coarse.grid().n_cells(), &[20, 20]);
        for c in 0..coarse.grid().len() {
            let expected = coarse.grid().cell_center(c)[0];
            assert!((coarse.values()[c] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_padding_wraps() {
        let g = UniformGrid::new(&[0.0], &[1.0], &[5]).unwrap();
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        let line = g.lines(0).next().unwrap();
        let mut out = Vec::new();
        pad_line(&g, 0, line, &v, GhostKind::Periodic, None, &mut out);
        assert_eq!(out, vec![2.0, 3.0, 4.0, 0.0, 1.0, 2.0, 3.0, 4.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn dirichlet_padding_uses_exact_centres() {
        let g = UniformGrid::new(&[0.0], &[1.0], &[4]).unwrap();
        let v = [9.0; 4];
        let line = g.lines(0).next().unwrap();
        let mut out = Vec::new();
        let exact = |x: [f64; 3]| x[0];
        pad_line(&g, 0, line, &v, GhostKind::DirichletExact, Some(&exact), &mut out);
        assert_eq!(&out[..3], &[-0.625, -0.375, -0.125]);
        assert_eq!(&out[7..], &[1.125, 1.375, 1.625]);
    }

    #[test]
    fn lines_cover_every_cell_once() {
        let g = UniformGrid::new(&[0.0; 3], &[1.0; 3], &[3, 4, 5]).unwrap();
        for axis in 0..3 {
            let mut seen = vec![0; g.len()];
            for line in g.lines(axis) {
                for k in 0..line.len {
                    seen[line.cell(k)] += 1;
                }
            }
            assert!(seen.iter().all(|&s| s == 1));
        }
    }

    #[test]
    fn csv_dump_layout() {
        let g = UniformGrid::new(&[0.0, 0.0], &[1.0, 2.0], &[2, 1]).unwrap();
        let mut buf = Vec::new();
        write_fields_csv(&mut buf, &g, &[&[1.0, 2.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# grid dim=2 n=2,1 domain="));
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[1],
            "2.5000000000000000e-1,1.0000000000000000e0,1.0000000000000000e0"
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn downsample_conserves_mean(vals in proptest::collection::vec(-10.0f64..10.0, 64)) {
                let g = UniformGrid::cube(2, 0.0, 1.0, 8).unwrap();
                let f = ScalarField::new(g, vals).unwrap();
                let c = downsample_block_average(&f, 2).unwrap();
                prop_assert!((c.mean() - f.mean()).abs() < 1e-12);
            }

            #[test]
            fn l2_is_symmetric_and_nonnegative(
                a in proptest::collection::vec(-5.0f64..5.0, 16),
                b in proptest::collection::vec(-5.0f64..5.0, 16),
            ) {
                let g = UniformGrid::new(&[0.0], &[1.0], &[16]).unwrap();
                let fa = ScalarField::new(g.clone(), a).unwrap();
                let fb = ScalarField::new(g, b).unwrap();
                let ab = l2_error(&fa, &fb).unwrap();
                prop_assert!(ab >= 0.0);
                prop_assert_eq!(ab, l2_error(&fb, &fa).unwrap());
            }
        }
    }
}
