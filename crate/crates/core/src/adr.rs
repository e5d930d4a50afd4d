//! Approximate dispersion relation: modified wavenumbers of a scheme,
//! measured by one short step of the full solver on a single Fourier mode,
//! with the closed form for linear weights as an oracle.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::join17;
use crate::grid::UniformGrid;
use crate::schemes::StencilWeights;
use crate::solver::{rhs_scalar_values, tvd_rk3_step, ScalarFlux, ScalarProblem, Scheme};

/// Cells on the periodic ADR domain; probed wavenumbers are `2 pi m / ADR_CELLS`.
pub const ADR_CELLS: usize = 64;
pub const DEFAULT_NU: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct AdrResult {
    pub scheme: String,
    pub phi: Vec<f64>,
    pub re_phi: Vec<f64>,
    pub im_phi: Vec<f64>,
}

impl AdrResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phi,re_phi,im_phi,re_exact,im_exact\n");
        for i in 0..self.phi.len() {
            let _ = writeln!(out, "{}", join17(&[self.phi[i], self.re_phi[i], self.im_phi[i], self.phi[i], 0.0], ","));
        }
        out
    }
}

/// `2 pi m / ADR_CELLS` for `m = 1..=ADR_CELLS / 2`.
pub fn adr_phis() -> Vec<f64> {
    (1..=ADR_CELLS / 2).map(|m| 2.0 * PI * m as f64 / ADR_CELLS as f64).collect()
}

/// Modified wavenumber of fixed weights for unit-speed advection with
/// upwind splitting: `-i (1 - e^{-i phi}) sum_l w_l e^{i (l - 3) phi}`.
pub fn linear_transfer(weights: &StencilWeights, phi: f64) -> Complex64 {
    let i = Complex64::i();
    let sum: Complex64 = weights
        .as_array()
        .iter()
        .enumerate()
        .map(|(l, w)| *w * (i * ((l as f64 - 2.0) * phi)).exp())
        .sum();
    -i * (1.0 - (-i * phi).exp()) * sum
}

fn mode_index(phi: f64) -> Result<usize> {
    let m = phi * ADR_CELLS as f64 / (2.0 * PI);
    let mr = m.round();
    if !(phi > 0.0 && phi <= PI + 1e-12) || (m - mr).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "phi = {phi} is not a resolved wavenumber 2 pi m / {ADR_CELLS} in (0, pi]"
        )));
    }
    Ok(mr as usize)
}

/// One RK3 step of size `nu` (unit speed, unit spacing) applied separately
/// to the cosine and sine parts of `e^{i phi j}`; the modified wavenumber
/// follows from the change of the Fourier coefficient at `phi`.
pub fn adr_numeric(scheme: &Scheme, phis: &[f64], nu: f64) -> Result<AdrResult> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!("nu must be positive, got {nu}")));
    }
    let n = ADR_CELLS;
    let grid = UniformGrid::new(&[0.0], &[n as f64], &[n])?;
    let problem = ScalarProblem::periodic(ScalarFlux::Linear { speed: 1.0 });
    let mut out = AdrResult { scheme: scheme.name().to_string(), phi: vec![], re_phi: vec![], im_phi: vec![] };
    let mut prev = 0.0;
    for &phi in phis {
        let m = mode_index(phi)?;
        if phi <= prev {
            return Err(Error::InvalidArgument("phi values must be strictly increasing".into()));
        }
        prev = phi;
        let theta = |j: usize| 2.0 * PI * (m * j % n) as f64 / n as f64;
        let step = |u0: Vec<f64>| {
            tvd_rk3_step(&u0, 0.0, nu, &mut |u: &[f64], t| rhs_scalar_values(&grid, u, scheme, &problem, t))
        };
        let re = step((0..n).map(|j| theta(j).cos()).collect())?;
        let im = step((0..n).map(|j| theta(j).sin()).collect())?;
        let coeff: Complex64 = (0..n)
            .map(|j| Complex64::new(re[j], im[j]) * Complex64::from_polar(1.0, -theta(j)))
            .sum::<Complex64>()
            / n as f64;
        if !(coeff.norm() > 1e-300) || !coeff.is_finite() {
            return Err(Error::NonFinite { context: "ADR Fourier coefficient", cell: m });
        }
        let big_phi = Complex64::i() / nu * coeff.ln();
        out.phi.push(phi);
        out.re_phi.push(big_phi.re);
        out.im_phi.push(big_phi.im);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{ce6_weights, up5_weights};

    #[test]
    fn consistency_limit() {
        for w in [ce6_weights(), up5_weights()] {
            let phi = 1e-4;
            let z = linear_transfer(&w, phi) / phi;
            assert!((z.re - 1.0).abs() < 1e-7 && z.im.abs() < 1e-7, "{z}");
        }
    }

    #[test]
    fn ce6_is_non_dissipative_and_up5_dissipates() {
        for phi in adr_phis() {
            assert!(linear_transfer(&ce6_weights(), phi).im.abs() < 1e-14);
        }
        assert!(linear_transfer(&up5_weights(), PI).im < 0.0);
    }

    #[test]
    fn numeric_matches_closed_form() {
        let phis = adr_phis();
        for (scheme, w) in [(Scheme::Ce6, ce6_weights()), (Scheme::Up5, up5_weights())] {
            let r = adr_numeric(&scheme, &phis, DEFAULT_NU).unwrap();
            for i in 0..phis.len() {
                let exact = linear_transfer(&w, phis[i]);
                assert!((r.re_phi[i] - exact.re).abs() < 1e-3 && (r.im_phi[i] - exact.im).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn rejects_unresolved_phi() {
        assert!(adr_numeric(&Scheme::Ce6, &[0.3], DEFAULT_NU).is_err());
        assert!(adr_numeric(&Scheme::Ce6, &[0.5, 0.4], DEFAULT_NU).is_err());
    }

    #[test]
    fn csv_layout() {
        let r = adr_numeric(&Scheme::Up5, &adr_phis()[..2], DEFAULT_NU).unwrap();
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("phi,re_phi,im_phi,re_exact,im_exact\n"));
    }
}
