//! Compressible Euler equations in conserved variables on periodic grids,
//! with the isentropic-vortex and Taylor-Green initial states and the
//! kinetic-energy and enstrophy diagnostics.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{pad_line, GhostKind, ScalarField, UniformGrid, GHOST_WIDTH};

use super::assembly::gather_euler;
use super::scheme::Scheme;

pub const DEFAULT_GAMMA: f64 = 1.4;

/// Conserved state `(rho, rho u, rho v[, rho w], E)`, stored component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    grid: UniformGrid,
    gamma: f64,
    data: Vec<f64>,
}

impl EulerState {
    pub fn new(grid: UniformGrid, gamma: f64, data: Vec<f64>) -> Result<Self> {
        let expected = (grid.dim() + 2) * grid.len();
        if grid.dim() < 2 {
            return Err(Error::InvalidGrid("Euler states need a 2D or 3D grid".into()));
        }
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected: format!("{expected} conserved values"),
                found: data.len().to_string(),
            });
        }
        Ok(Self { grid, gamma, data })
    }

    /// Assemble conserved variables from `(rho, velocity, p)` at cell centres.
    pub fn from_primitives(grid: UniformGrid, gamma: f64, prim: impl Fn([f64; 3]) -> (f64, [f64; 3], f64)) -> Result<Self> {
        let dim = grid.dim();
        let n = grid.len();
        let mut data = vec![0.0; (dim + 2) * n];
        for c in 0..n {
            let (rho, vel, p) = prim(grid.cell_center(c));
            data[c] = rho;
            let mut ke = 0.0;
            for a in 0..dim {
                data[(1 + a) * n + c] = rho * vel[a];
                ke += 0.5 * rho * vel[a] * vel[a];
            }
            data[(dim + 1) * n + c] = p / (gamma - 1.0) + ke;
        }
        Self::new(grid, gamma, data)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_components(&self) -> usize {
        self.grid.dim() + 2
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.gamma, data)
    }

    pub fn component(&self, m: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[m * n..(m + 1) * n]
    }

    pub fn density(&self) -> ScalarField {
        ScalarField::new(self.grid.clone(), self.component(0).to_vec()).unwrap()
    }

    pub fn velocity(&self, axis: usize, c: usize) -> f64 {
        self.component(1 + axis)[c] / self.component(0)[c]
    }

    pub fn pressure(&self, c: usize) -> f64 {
        let dim = self.grid.dim();
        let rho = self.component(0)[c];
        let ke: f64 = (0..dim).map(|a| self.component(1 + a)[c].powi(2)).sum::<f64>() * 0.5 / rho;
        (self.gamma - 1.0) * (self.component(dim + 1)[c] - ke)
    }

    pub fn check_positivity(&self) -> Result<()> {
        for c in 0..self.grid.len() {
            let rho = self.component(0)[c];
            let p = self.pressure(c);
            if !(rho > 0.0 && p > 0.0) {
                return Err(Error::Positivity { cell: c, rho, pressure: p });
            }
        }
        Ok(())
    }

    /// Largest `|u_axis| + c` over cells and axes.
    pub fn max_wave_speed(&self) -> f64 {
        let dim = self.grid.dim();
        let mut best = 0.0f64;
        for c in 0..self.grid.len() {
            let rho = self.component(0)[c];
            let sound = (self.gamma * self.pressure(c) / rho).sqrt();
            for a in 0..dim {
                best = best.max(self.velocity(a, c).abs() + sound);
            }
        }
        best
    }

    /// Sum of each conserved component over cells.
    pub fn totals(&self) -> Vec<f64> {
        (0..self.n_components()).map(|m| self.component(m).iter().sum()).collect()
    }
}

/// Physical flux along `axis` for one conserved vector; returns `|u_axis| + c`.
#[inline]
pub fn physical_flux(u: &[f64], dim: usize, axis: usize, gamma: f64, f: &mut [f64]) -> f64 {
    let rho = u[0];
    let inv_rho = 1.0 / rho;
    let e = u[dim + 1];
    let mut ke = 0.0;
    for a in 0..dim {
        ke += u[1 + a] * u[1 + a];
    }
    ke *= 0.5 * inv_rho;
    let p = (gamma - 1.0) * (e - ke);
    let vn = u[1 + axis] * inv_rho;
    f[0] = u[1 + axis];
    for b in 0..dim {
        f[1 + b] = u[1 + b] * vn;
    }
    f[1 + axis] += p;
    f[dim + 1] = vn * (e + p);
    vn.abs() + (gamma * p * inv_rho).sqrt()
}

/// Semi-discrete right side `-(dF/dx + dG/dy [+ dH/dz])`, component-major.
pub fn rhs_euler(state: &EulerState, scheme: &Scheme) -> Result<Vec<f64>> {
    let problem = gather_euler(state)?;
    problem.evaluate(scheme)
}

/// Mean of `rho |u|^2 / 2` over cells.
pub fn kinetic_energy(state: &EulerState) -> f64 {
    let dim = state.grid.dim();
    let n = state.grid.len();
    let mut sum = 0.0;
    for c in 0..n {
        let rho = state.component(0)[c];
        let m2: f64 = (0..dim).map(|a| state.component(1 + a)[c].powi(2)).sum();
        sum += 0.5 * m2 / rho;
    }
    sum / n as f64
}

/// Sixth-order central first derivative along `axis` on a periodic grid.
pub fn central_derivative6(grid: &UniformGrid, values: &[f64], axis: usize) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    let mut pad = Vec::new();
    let inv = 1.0 / (60.0 * grid.dx()[axis]);
    let g = GHOST_WIDTH;
    for line in grid.lines(axis) {
        pad_line(grid, axis, line, values, GhostKind::Periodic, None, &mut pad);
        for k in 0..line.len {
            let j = k + g;
            out[line.cell(k)] = (-pad[j - 3] + 9.0 * pad[j - 2] - 45.0 * pad[j - 1] + 45.0 * pad[j + 1]
                - 9.0 * pad[j + 2]
                + pad[j + 3])
                * inv;
        }
    }
    out
}

/// Mean of `rho |curl u|^2 / 2` with sixth-order central derivatives.
pub fn enstrophy(state: &EulerState) -> Result<f64> {
    let grid = &state.grid;
    if grid.dim() != 3 {
        return Err(Error::InvalidGrid("enstrophy needs a 3D state".into()));
    }
    let n = grid.len();
    let vel: Vec<Vec<f64>> = (0..3).map(|a| (0..n).map(|c| state.velocity(a, c)).collect()).collect();
    let d = |comp: usize, axis: usize| central_derivative6(grid, &vel[comp], axis);
    let (dw_dy, dv_dz) = (d(2, 1), d(1, 2));
    let (du_dz, dw_dx) = (d(0, 2), d(2, 0));
    let (dv_dx, du_dy) = (d(1, 0), d(0, 1));
    let mut sum = 0.0;
    for c in 0..n {
        let wx = dw_dy[c] - dv_dz[c];
        let wy = du_dz[c] - dw_dx[c];
        let wz = dv_dx[c] - du_dy[c];
        sum += 0.5 * state.component(0)[c] * (wx * wx + wy * wy + wz * wz);
    }
    Ok(sum / n as f64)
}

/// Parameters of the convected isentropic vortex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexParams {
    pub x_vc: f64,
    pub y_vc: f64,
    pub u0: f64,
    pub v0: f64,
    pub beta: f64,
}

impl VortexParams {
    /// The evaluation case on `[0, 10]^2`.
    pub const TEST: VortexParams = VortexParams { x_vc: 5.0, y_vc: 5.0, u0: 1.0, v0: 1.0, beta: 5.0 };

    /// Primitive variables at `(x, y)` and time `t` on the periodic box
    /// `[lower, upper]^2`: the initial vortex translated by `(u0 t, v0 t)`,
    /// measured with the nearest periodic image of its centre.
    pub fn primitives(&self, grid: &UniformGrid, x: [f64; 3], t: f64, gamma: f64) -> (f64, [f64; 3], f64) {
        let wrap = |d: f64, axis: usize| {
            let len = grid.upper()[axis] - grid.lower()[axis];
            d - len * (d / len).round()
        };
        let xb = wrap(x[0] - self.x_vc - self.u0 * t, 0);
        let yb = wrap(x[1] - self.y_vc - self.v0 * t, 1);
        let r2 = xb * xb + yb * yb;
        let rho = (1.0 - (gamma - 1.0) * self.beta * self.beta / (8.0 * gamma * PI * PI) * (1.0 - r2).exp())
            .powf(1.0 / (gamma - 1.0));
        let amp = self.beta / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
        let vel = [self.u0 - amp * yb, self.v0 + amp * xb, 0.0];
        (rho, vel, rho.powf(gamma))
    }
}

pub fn init_isentropic_vortex(grid: &UniformGrid, params: &VortexParams, gamma: f64) -> Result<EulerState> {
    isentropic_vortex_at(grid, params, gamma, 0.0)
}

/// Exact vortex solution at time `t` (pure translation).
pub fn isentropic_vortex_at(grid: &UniformGrid, params: &VortexParams, gamma: f64, t: f64) -> Result<EulerState> {
    if grid.dim() != 2 {
        return Err(Error::InvalidGrid("the isentropic vortex is two-dimensional".into()));
    }
    EulerState::from_primitives(grid.clone(), gamma, |x| params.primitives(grid, x, t, gamma))
}

/// Inviscid Taylor-Green vortex on `[0, 2 pi]^3`.
pub fn init_taylor_green(grid: &UniformGrid, gamma: f64) -> Result<EulerState> {
    if grid.dim() != 3 {
        return Err(Error::InvalidGrid("the Taylor-Green vortex is three-dimensional".into()));
    }
    EulerState::from_primitives(grid.clone(), gamma, taylor_green_primitives)
}

pub fn taylor_green_primitives(x: [f64; 3]) -> (f64, [f64; 3], f64) {
    let [x, y, z] = x;
    let u = x.sin() * y.cos() * z.cos();
    let v = -x.cos() * y.sin() * z.cos();
    let p = 100.0 + ((2.0 * x).cos() + (2.0 * y).cos()) * ((2.0 * z).cos() + 2.0) / 16.0 - 2.0 / 16.0;
    (1.0, [u, v, 0.0], p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tg_grid(n: usize) -> UniformGrid {
        UniformGrid::cube(3, 0.0, 2.0 * PI, n).unwrap()
    }

    #[test]
    fn uniform_state_has_zero_rhs() {
        let grid = UniformGrid::cube(2, 0.0, 1.0, 12).unwrap();
        let s = EulerState::from_primitives(grid, 1.4, |_| (1.0, [0.0; 3], 1.0)).unwrap();
        for scheme in [Scheme::Ce6, Scheme::Up5, Scheme::Weno5Js] {
            let r = rhs_euler(&s, &scheme).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-13), "{scheme:?}");
        }
    }

    #[test]
    fn vortex_rhs_conserves_mass() {
        let grid = UniformGrid::cube(2, 0.0, 10.0, 20).unwrap();
        let s = init_isentropic_vortex(&grid, &VortexParams::TEST, 1.4).unwrap();
        for scheme in [Scheme::Ce6, Scheme::Up5, Scheme::Weno5Js] {
            let r = rhs_euler(&s, &scheme).unwrap();
            let n = grid.len();
            for m in 0..4 {
                let total: f64 = r[m * n..(m + 1) * n].iter().sum();
                let scale: f64 = r[m * n..(m + 1) * n].iter().map(|v| v.abs()).sum();
                assert!(total.abs() <= 1e-13 * scale.max(1.0), "{scheme:?} comp {m}: {total}");
            }
        }
    }

    #[test]
    fn vortex_centre_density() {
        let grid = UniformGrid::cube(2, 0.0, 10.0, 20).unwrap();
        let (rho, vel, p) = VortexParams::TEST.primitives(&grid, [5.0, 5.0, 0.0], 0.0, 1.4);
        let expected = (1.0 - 0.4 * 25.0 * std::f64::consts::E / (8.0 * 1.4 * PI * PI)).powf(2.5);
        assert!((rho - expected).abs() < 1e-14);
        assert_eq!(vel, [1.0, 1.0, 0.0]);
        assert!((p - rho.powf(1.4)).abs() < 1e-15);
        // Far field.
        let (rho, vel, p) = VortexParams::TEST.primitives(&grid, [0.0, 0.0, 0.0], 0.0, 1.4);
        assert!((rho - 1.0).abs() < 1e-9 && (p - 1.0).abs() < 1e-9);
        assert!((vel[0] - 1.0).abs() < 1e-9 && (vel[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn vortex_exact_solution_is_periodic_translation() {
        let grid = UniformGrid::cube(2, 0.0, 10.0, 20).unwrap();
        let s0 = init_isentropic_vortex(&grid, &VortexParams::TEST, 1.4).unwrap();
        let s10 = isentropic_vortex_at(&grid, &VortexParams::TEST, 1.4, 10.0).unwrap();
        for (a, b) in s0.data().iter().zip(s10.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn taylor_green_point_values() {
        let (rho, vel, p) = taylor_green_primitives([PI / 2.0, 0.0, 0.0]);
        assert_eq!(rho, 1.0);
        assert!((vel[0] - 1.0).abs() < 1e-15 && vel[1].abs() < 1e-15);
        assert!((p - (100.0 - 0.125)).abs() < 1e-13);
    }

    #[test]
    fn taylor_green_means() {
        let s = init_taylor_green(&tg_grid(16), 1.4).unwrap();
        let mean_p: f64 = (0..s.grid().len()).map(|c| s.pressure(c)).sum::<f64>() / s.grid().len() as f64;
        assert!((mean_p - 99.875).abs() < 1e-12);
        assert!((kinetic_energy(&s) - 0.125).abs() < 1e-14);
    }

    #[test]
    fn taylor_green_divergence_free() {
        let s = init_taylor_green(&tg_grid(32), 1.4).unwrap();
        let g = s.grid();
        let n = g.len();
        let vel: Vec<Vec<f64>> = (0..3).map(|a| (0..n).map(|c| s.velocity(a, c)).collect()).collect();
        let div: Vec<f64> = (0..n)
            .map(|c| {
                (0..3).map(|a| central_derivative6(g, &vel[a], a)[c]).sum::<f64>()
            })
            .take(64)
            .collect();
        assert!(div.iter().all(|d| d.abs() < 1e-10));
    }

    #[test]
    fn enstrophy_of_shear_flow() {
        let g = tg_grid(64);
        let s = EulerState::from_primitives(g, 1.4, |x| (1.0, [x[1].sin(), 0.0, 0.0], 1.0)).unwrap();
        assert!((enstrophy(&s).unwrap() - 0.25).abs() < 1e-7);
        let still = EulerState::from_primitives(tg_grid(8), 1.4, |_| (1.0, [0.3, -0.2, 0.1], 1.0)).unwrap();
        assert!(enstrophy(&still).unwrap().abs() < 1e-24);
        assert_eq!(kinetic_energy(&EulerState::from_primitives(tg_grid(4), 1.4, |_| (2.0, [0.0; 3], 1.0)).unwrap()), 0.0);
    }

    #[test]
    fn taylor_green_enstrophy_matches_analytic_curl() {
        // Analytic curl of the initial velocity integrated on a fine midpoint grid.
        let n = 64;
        let s = init_taylor_green(&tg_grid(n), 1.4).unwrap();
        let discrete = enstrophy(&s).unwrap();
        let m = 128;
        let h = 2.0 * PI / m as f64;
        let mut sum = 0.0;
        for k in 0..m {
            for j in 0..m {
                for i in 0..m {
                    let (x, y, z) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h, (k as f64 + 0.5) * h);
                    let wx = -x.cos() * y.sin() * z.sin();
                    let wy = -x.sin() * y.cos() * z.sin();
                    let wz = 2.0 * x.sin() * y.sin() * z.cos();
                    sum += 0.5 * (wx * wx + wy * wy + wz * wz);
                }
            }
        }
        let quad = sum / (m * m * m) as f64;
        assert!((discrete - quad).abs() < 1e-6, "{discrete} vs {quad}");
    }
}
