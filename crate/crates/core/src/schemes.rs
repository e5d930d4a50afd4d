//! Six-point interface-flux reconstruction: consistency-constrained weights,
//! the classical CE6/UP5 weight sets, local Lax-Friedrichs splitting and the
//! WENO5-JS reconstruction used for reference data.
//!
//! Stencils are ordered by cell, `f[0..6]` holding the values at cells
//! `i-2 ..= i+3` around interface `i+1/2`.

use crate::error::{Error, Result};

pub const STENCIL: usize = 6;

/// Tolerance on `sum(w) = 1`.
pub const SUM_TOL: f64 = 1e-12;
/// Tolerance on the first-moment constraint.
pub const MOMENT_TOL: f64 = 1e-11;

/// Coefficients of the first-moment constraint `-5w1 - 3w2 - w3 + w4 + 3w5 + 5w6 = 0`.
pub const MOMENT_COEFFS: [f64; STENCIL] = [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilWeights([f64; STENCIL]);

impl StencilWeights {
    /// Checked constructor; rejects weights violating either consistency constraint.
    pub fn new(w: [f64; STENCIL]) -> Result<Self> {
        let (sum, moment) = constraint_residuals(&w);
        if !(sum.abs() <= SUM_TOL && moment.abs() <= MOMENT_TOL) {
            return Err(Error::InvalidArgument(format!(
                "weights violate consistency: sum-1 = {sum:e}, moment = {moment:e}"
            )));
        }
        Ok(Self(w))
    }

    /// Wrap weights produced by a construction that satisfies the constraints
    /// by design (the hard-constraint layer).
    pub(crate) fn from_constructed(w: [f64; STENCIL]) -> Self {
        Self(w)
    }

    pub fn as_array(&self) -> &[f64; STENCIL] {
        &self.0
    }

    /// `(sum(w) - 1, moment(w))`.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        constraint_residuals(&self.0)
    }

    pub fn is_consistent(&self) -> bool {
        let (s, m) = self.constraint_residuals();
        s.abs() <= SUM_TOL && m.abs() <= MOMENT_TOL
    }
}

pub fn constraint_residuals(w: &[f64; STENCIL]) -> (f64, f64) {
    let sum: f64 = w.iter().sum();
    let moment: f64 = w.iter().zip(MOMENT_COEFFS).map(|(a, b)| a * b).sum();
    (sum - 1.0, moment)
}

/// Sixth-order central weights.
pub fn ce6_weights() -> StencilWeights {
    StencilWeights([
        1.0 / 60.0,
        -8.0 / 60.0,
        37.0 / 60.0,
        37.0 / 60.0,
        -8.0 / 60.0,
        1.0 / 60.0,
    ])
}

/// Fifth-order upwind weights.
pub fn up5_weights() -> StencilWeights {
    StencilWeights([
        1.0 / 30.0,
        -13.0 / 60.0,
        47.0 / 60.0,
        9.0 / 20.0,
        -1.0 / 20.0,
        0.0,
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Right-going part, upwind side is the left.
    Plus,
    /// Left-going part, reconstructed on the mirrored stencil.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitFluxStencil {
    pub plus: [f64; STENCIL],
    pub minus: [f64; STENCIL],
    pub alpha: f64,
}

/// Local Lax-Friedrichs splitting `f± = (f ± αu) / 2`.
pub fn llf_split(f: &[f64; STENCIL], u: &[f64; STENCIL], alpha: f64) -> Result<SplitFluxStencil> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidArgument(format!("splitting speed must be >= 0, got {alpha}")));
    }
    let mut plus = [0.0; STENCIL];
    let mut minus = [0.0; STENCIL];
    for j in 0..STENCIL {
        plus[j] = 0.5 * (f[j] + alpha * u[j]);
        minus[j] = 0.5 * (f[j] - alpha * u[j]);
    }
    Ok(SplitFluxStencil { plus, minus, alpha })
}

/// Largest `|f'(u)|` over the six stencil cells.
pub fn local_alpha_scalar(u: &[f64; STENCIL], dfdu: impl Fn(f64) -> f64) -> f64 {
    u.iter().map(|&v| dfdu(v).abs()).fold(0.0, f64::max)
}

/// `Plus`: `sum_l w_l f[l]`; `Minus`: `sum_j w_j f[5 - j]` (mirror ordering).
pub fn reconstruct_interface(weights: &StencilWeights, f: &[f64; STENCIL], direction: Direction) -> f64 {
    let w = weights.as_array();
    match direction {
        Direction::Plus => dot6(w, f),
        Direction::Minus => dot6(w, &reversed(f)),
    }
}

#[inline]
pub fn dot6(a: &[f64; STENCIL], b: &[f64; STENCIL]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4] + a[5] * b[5]
}

#[inline]
pub fn reversed(f: &[f64; STENCIL]) -> [f64; STENCIL] {
    [f[5], f[4], f[3], f[2], f[1], f[0]]
}

pub const WENO_EPS: f64 = 1e-6;
const WENO_LINEAR: [f64; 3] = [0.1, 0.6, 0.3];

/// WENO5-JS value at `i+1/2`.
///
/// `Plus` takes cells `i-2 ..= i+2`; `Minus` takes cells `i-1 ..= i+3` and
/// reconstructs from the right.
pub fn weno5js_interface(f: &[f64; 5], direction: Direction) -> f64 {
    match direction {
        Direction::Plus => weno5js_upwind(f),
        Direction::Minus => weno5js_upwind(&[f[4], f[3], f[2], f[1], f[0]]),
    }
}

/// WENO5-JS with the upwind cell first: `f = [i-2, i-1, i, i+1, i+2]`.
#[inline]
pub fn weno5js_upwind(f: &[f64; 5]) -> f64 {
    let [a, b, c, d, e] = *f;
    let q0 = (2.0 * a - 7.0 * b + 11.0 * c) / 6.0;
    let q1 = (-b + 5.0 * c + 2.0 * d) / 6.0;
    let q2 = (2.0 * c + 5.0 * d - e) / 6.0;

    let s0 = 13.0 / 12.0 * (a - 2.0 * b + c).powi(2) + 0.25 * (a - 4.0 * b + 3.0 * c).powi(2);
    let s1 = 13.0 / 12.0 * (b - 2.0 * c + d).powi(2) + 0.25 * (b - d).powi(2);
    let s2 = 13.0 / 12.0 * (c - 2.0 * d + e).powi(2) + 0.25 * (3.0 * c - 4.0 * d + e).powi(2);

    let a0 = WENO_LINEAR[0] / (WENO_EPS + s0).powi(2);
    let a1 = WENO_LINEAR[1] / (WENO_EPS + s1).powi(2);
    let a2 = WENO_LINEAR[2] / (WENO_EPS + s2).powi(2);
    (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
}

/// The fifth-order linear reconstruction WENO5-JS reduces to on smooth data.
pub fn upwind5_linear(f: &[f64; 5]) -> f64 {
    (2.0 * f[0] - 13.0 * f[1] + 47.0 * f[2] + 27.0 * f[3] - 3.0 * f[4]) / 60.0
}
