//! Interface stencils and the conservative difference that turns interface
//! fluxes into cell residuals. The solver and the training loss share this
//! layout, so a network sees exactly the stencils it will meet at run time.

use crate::error::{Error, Result};
use crate::grid::{pad_line, GhostKind, UniformGrid, GHOST_WIDTH};
use crate::schemes::{reversed, STENCIL};

use super::euler::EulerState;
use super::scalar::ScalarFlux;
use super::scheme::Scheme;

/// Split-flux stencils for every interface plus the face connectivity of
/// every output (cell, or cell-component for systems).
///
/// Interface `k` owns stencils `2k` (right-going part) and `2k + 1`
/// (left-going part, mirrored); its flux is the sum of both reconstructions.
#[derive(Debug, Clone, Default)]
pub struct FluxProblem {
    pub stencils: Vec<[f64; STENCIL]>,
    pub dim: usize,
    pub inv_dx: Vec<f64>,
    /// `n_outputs * dim` entries of `[left face, right face]`.
    pub faces: Vec<[u32; 2]>,
}

impl FluxProblem {
    pub fn n_interfaces(&self) -> usize {
        self.stencils.len() / 2
    }

    pub fn n_outputs(&self) -> usize {
        self.faces.len() / self.dim
    }

    pub fn interface_fluxes(&self, recon: &[f64]) -> Vec<f64> {
        recon.chunks_exact(2).map(|p| p[0] + p[1]).collect()
    }

    /// `out[c] = sum_axis (F_left - F_right) / dx_axis`.
    pub fn divergence(&self, flux: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for axis in 0..self.dim {
                let [l, r] = self.faces[c * self.dim + axis];
                acc += (flux[l as usize] - flux[r as usize]) * self.inv_dx[axis];
            }
            *o = acc;
        }
    }

    /// Reconstruct with `scheme` and return `-div F` per output.
    pub fn evaluate(&self, scheme: &Scheme) -> Result<Vec<f64>> {
        let mut recon = vec![0.0; self.stencils.len()];
        scheme.reconstruct(&self.stencils, &mut recon);
        let flux = self.interface_fluxes(&recon);
        if let Some(k) = flux.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "interface flux", cell: k });
        }
        let mut out = vec![0.0; self.n_outputs()];
        self.divergence(&flux, &mut out);
        Ok(out)
    }

    fn push_split(&mut self, f: &[f64; STENCIL], u: &[f64; STENCIL], alpha: f64) {
        let mut plus = [0.0; STENCIL];
        let mut minus = [0.0; STENCIL];
        for j in 0..STENCIL {
            plus[j] = 0.5 * (f[j] + alpha * u[j]);
            minus[j] = 0.5 * (f[j] - alpha * u[j]);
        }
        self.stencils.push(plus);
        self.stencils.push(reversed(&minus));
    }
}

fn window(line: &[f64], k: usize) -> [f64; STENCIL] {
    let mut w = [0.0; STENCIL];
    w.copy_from_slice(&line[k..k + STENCIL]);
    w
}

/// Interface count on a line of `n` cells and the face indices of cell `k`.
fn line_faces(kind: GhostKind, n: usize, k: usize) -> (usize, usize, usize) {
    match kind {
        GhostKind::Periodic => (n, k, (k + 1) % n),
        GhostKind::DirichletExact => (n + 1, k, k + 1),
    }
}

/// Stencils for a scalar conservation law with per-axis flux `flux`.
///
/// With `DirichletExact` ghosts, `exact` supplies the solution at ghost
/// centres; periodic ghosts wrap.
pub fn gather_scalar(
    grid: &UniformGrid,
    u: &[f64],
    flux: ScalarFlux,
    kind: GhostKind,
    exact: Option<&dyn Fn([f64; 3]) -> f64>,
) -> FluxProblem {
    let dim = grid.dim();
    let mut p = FluxProblem {
        stencils: Vec::with_capacity(2 * dim * (grid.len() + grid.len() / grid.n_cells()[0])),
        dim,
        inv_dx: grid.dx().iter().map(|d| 1.0 / d).collect(),
        faces: vec![[0, 0]; grid.len() * dim],
    };
    let mut padded = Vec::new();
    let mut fpad = Vec::new();
    let mut speed = Vec::new();
    for axis in 0..dim {
        for line in grid.lines(axis) {
            pad_line(grid, axis, line, u, kind, exact, &mut padded);
            fpad.clear();
            fpad.extend(padded.iter().map(|&v| flux.flux(v)));
            speed.clear();
            speed.extend(padded.iter().map(|&v| flux.dfdu(v).abs()));
            let base = p.n_interfaces();
            let (n_faces, _, _) = line_faces(kind, line.len, 0);
            for k in 0..n_faces {
                let uw = window(&padded, k);
                let fw = window(&fpad, k);
                let alpha = speed[k..k + STENCIL].iter().cloned().fold(0.0, f64::max);
                p.push_split(&fw, &uw, alpha);
            }
            for k in 0..line.len {
                let (_, l, r) = line_faces(kind, line.len, k);
                p.faces[line.cell(k) * dim + axis] = [(base + l) as u32, (base + r) as u32];
            }
        }
    }
    p
}

/// Componentwise LLF stencils for the Euler equations on a periodic grid,
/// with one splitting speed `max(|u_axis| + c)` per interface stencil.
pub fn gather_euler(state: &EulerState) -> Result<FluxProblem> {
    state.check_positivity()?;
    let grid = state.grid();
    let dim = grid.dim();
    let n_comp = state.n_components();
    let n_cells = grid.len();
    let gamma = state.gamma();
    let mut p = FluxProblem {
        stencils: Vec::with_capacity(2 * dim * n_comp * n_cells),
        dim,
        inv_dx: grid.dx().iter().map(|d| 1.0 / d).collect(),
        faces: vec![[0, 0]; n_comp * n_cells * dim],
    };
    let g = GHOST_WIDTH;
    let mut comps: Vec<Vec<f64>> = vec![Vec::new(); n_comp];
    let mut fluxes: Vec<Vec<f64>> = vec![Vec::new(); n_comp];
    let mut speed = Vec::new();
    for axis in 0..dim {
        for line in grid.lines(axis) {
            for (m, buf) in comps.iter_mut().enumerate() {
                pad_line(grid, axis, line, state.component(m), GhostKind::Periodic, None, buf);
            }
            let len = line.len + 2 * g;
            for f in fluxes.iter_mut() {
                f.resize(len, 0.0);
            }
            speed.resize(len, 0.0);
            let mut u = [0.0; 5];
            let mut f = [0.0; 5];
            for j in 0..len {
                for m in 0..n_comp {
                    u[m] = comps[m][j];
                }
                speed[j] = super::euler::physical_flux(&u[..n_comp], dim, axis, gamma, &mut f[..n_comp]);
                for m in 0..n_comp {
                    fluxes[m][j] = f[m];
                }
            }
            let base = p.n_interfaces();
            for k in 0..line.len {
                let alpha = speed[k..k + STENCIL].iter().cloned().fold(0.0, f64::max);
                for m in 0..n_comp {
                    p.push_split(&window(&fluxes[m], k), &window(&comps[m], k), alpha);
                }
            }
            for k in 0..line.len {
                let (l, r) = (k, (k + 1) % line.len);
                let cell = line.cell(k);
                for m in 0..n_comp {
                    p.faces[(m * n_cells + cell) * dim + axis] =
                        [(base + l * n_comp + m) as u32, (base + r * n_comp + m) as u32];
                }
            }
        }
    }
    Ok(p)
}
