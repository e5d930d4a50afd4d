use crate::error::{Error, Result};
use crate::grid::{GhostKind, ScalarField};

use super::assembly::gather_scalar;
use super::scheme::Scheme;

/// Scalar flux functions used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarFlux {
    /// `f(u) = c u`.
    Linear { speed: f64 },
    /// `f(u) = gamma u^2`.
    Quadratic { gamma: f64 },
}

impl ScalarFlux {
    pub fn burgers() -> Self {
        ScalarFlux::Quadratic { gamma: 1.0 }
    }

    #[inline]
    pub fn flux(&self, u: f64) -> f64 {
        match *self {
            ScalarFlux::Linear { speed } => speed * u,
            ScalarFlux::Quadratic { gamma } => gamma * u * u,
        }
    }

    #[inline]
    pub fn dfdu(&self, u: f64) -> f64 {
        match *self {
            ScalarFlux::Linear { speed } => speed,
            ScalarFlux::Quadratic { gamma } => 2.0 * gamma * u,
        }
    }
}

/// A closed-form solution with the forcing that makes it exact.
pub trait ExactSolution: Sync {
    fn value(&self, x: [f64; 3], t: f64) -> f64;
    fn forcing(&self, x: [f64; 3], t: f64) -> f64;
}

/// Boundary treatment and source term for a scalar run.
#[derive(Clone, Copy)]
pub struct ScalarProblem<'a> {
    pub flux: ScalarFlux,
    pub ghosts: GhostKind,
    /// Supplies Dirichlet ghost values and the forcing; `None` means an
    /// unforced problem (ghosts must then be periodic).
    pub exact: Option<&'a dyn ExactSolution>,
}

impl<'a> ScalarProblem<'a> {
    pub fn periodic(flux: ScalarFlux) -> Self {
        Self { flux, ghosts: GhostKind::Periodic, exact: None }
    }

    pub fn manufactured(flux: ScalarFlux, exact: &'a dyn ExactSolution) -> Self {
        Self { flux, ghosts: GhostKind::DirichletExact, exact: Some(exact) }
    }
}

/// Semi-discrete right side `-div f_hat + g` at time `t`.
pub fn rhs_scalar(u: &ScalarField, scheme: &Scheme, problem: &ScalarProblem<'_>, t: f64) -> Result<ScalarField> {
    let values = rhs_scalar_values(u.grid(), u.values(), scheme, problem, t)?;
    ScalarField::new(u.grid().clone(), values)
}

pub fn rhs_scalar_values(
    grid: &crate::grid::UniformGrid,
    u: &[f64],
    scheme: &Scheme,
    problem: &ScalarProblem<'_>,
    t: f64,
) -> Result<Vec<f64>> {
    if problem.ghosts == GhostKind::DirichletExact && problem.exact.is_none() {
        return Err(Error::InvalidArgument("Dirichlet ghosts need an exact solution".into()));
    }
    let ghost_fn = problem.exact.map(|e| move |x: [f64; 3]| e.value(x, t));
    let ghost_ref = ghost_fn.as_ref().map(|f| f as &dyn Fn([f64; 3]) -> f64);
    let fp = gather_scalar(grid, u, problem.flux, problem.ghosts, ghost_ref);
    let mut out = fp.evaluate(scheme)?;
    if let Some(exact) = problem.exact {
        for (c, o) in out.iter_mut().enumerate() {
            *o += exact.forcing(grid.cell_center(c), t);
        }
    }
    if let Some(c) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "scalar rhs", cell: c });
    }
    Ok(out)
}

/// Largest `|f'(u)|` over the field.
pub fn max_wave_speed_scalar(u: &[f64], flux: ScalarFlux) -> f64 {
    u.iter().map(|&v| flux.dfdu(v).abs()).fold(0.0, f64::max)
}
