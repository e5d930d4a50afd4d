//! Gaussian manufactured solutions and parameter sampling.

use rand::Rng;

use crate::error::{Error, Result};
use crate::solver::{ExactSolution, ScalarFlux, VortexParams};

/// `u = A exp(-((x + k t) / sigma)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution1D {
    pub a: f64,
    pub k: f64,
    pub sigma: f64,
}

/// `u = A exp(-((x + k1 t)^2 + (y + k2 t)^2 + (z + k3 t)^2) / sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedSolution3D {
    pub a: f64,
    pub k: [f64; 3],
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gaussian {
    OneD(ManufacturedSolution1D),
    ThreeD(ManufacturedSolution3D),
}

impl Gaussian {
    pub fn one_d(a: f64, k: f64, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Gaussian::OneD(ManufacturedSolution1D { a, k, sigma }))
    }

    pub fn three_d(a: f64, k: [f64; 3], sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Gaussian::ThreeD(ManufacturedSolution3D { a, k, sigma }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Gaussian::OneD(_) => 1,
            Gaussian::ThreeD(_) => 3,
        }
    }

    /// Value and spatial gradient (unused axes zero).
    fn value_and_gradient(&self, x: [f64; 3], t: f64) -> (f64, [f64; 3], f64) {
        match *self {
            Gaussian::OneD(s) => {
                let xi = (x[0] + s.k * t) / s.sigma;
                let u = s.a * (-xi * xi).exp();
                let ux = -2.0 * xi / s.sigma * u;
                (u, [ux, 0.0, 0.0], s.k * ux)
            }
            Gaussian::ThreeD(s) => {
                let d: [f64; 3] = std::array::from_fn(|i| x[i] + s.k[i] * t);
                let s2 = s.sigma * s.sigma;
                let u = s.a * (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / s2).exp();
                let grad: [f64; 3] = std::array::from_fn(|i| -2.0 * d[i] / s2 * u);
                let ut = (0..3).map(|i| s.k[i] * grad[i]).sum();
                (u, grad, ut)
            }
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")))
    }
}

/// `(u, du/dt, g)` with `g = du/dt + sum_axes d f(u) / dx_axis`.
pub fn manufactured_eval(sol: &Gaussian, flux: ScalarFlux, x: [f64; 3], t: f64) -> (f64, f64, f64) {
    let (u, grad, ut) = sol.value_and_gradient(x, t);
    let dfdu = flux.dfdu(u);
    let div: f64 = grad[..sol.dim()].iter().map(|g| dfdu * g).sum();
    (u, ut, ut + div)
}

/// A manufactured solution paired with the flux its forcing is built for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub solution: Gaussian,
    pub flux: ScalarFlux,
}

impl ExactSolution for Manufactured {
    fn value(&self, x: [f64; 3], t: f64) -> f64 {
        self.solution.value_and_gradient(x, t).0
    }

    fn forcing(&self, x: [f64; 3], t: f64) -> f64 {
        manufactured_eval(&self.solution, self.flux, x, t).2
    }
}

/// Half-open sampling interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

const fn iv(lo: f64, hi: f64) -> Interval {
    Interval { lo, hi }
}

/// Training families and their default parameter ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Scalar1d,
    Scalar3d,
    Euler2d,
    Euler3d,
}

impl Family {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "scalar1d" => Ok(Family::Scalar1d),
            "scalar3d" => Ok(Family::Scalar3d),
            "euler2d" => Ok(Family::Euler2d),
            "euler3d" => Ok(Family::Euler3d),
            other => Err(Error::InvalidArgument(format!("unknown dataset family `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Scalar1d => "scalar1d",
            Family::Scalar3d => "scalar3d",
            Family::Euler2d => "euler2d",
            Family::Euler3d => "euler3d",
        }
    }

    /// `(A, k, sigma)`, `(A, k1, k2, k3, sigma)` or `(x_vc, y_vc, u0, v0, beta)`.
    /// The Taylor-Green family has no free parameters.
    pub fn default_ranges(&self) -> Vec<Interval> {
        match self {
            Family::Scalar1d => vec![iv(0.5, 1.0), iv(0.0, 0.5), iv(0.2, 0.3)],
            Family::Scalar3d => vec![iv(0.5, 1.0), iv(0.0, 0.5), iv(0.0, 0.5), iv(0.0, 0.5), iv(0.2, 0.3)],
            Family::Euler2d => vec![iv(4.0, 6.0), iv(4.0, 6.0), iv(-1.0, 1.0), iv(-1.0, 1.0), iv(2.0, 5.0)],
            Family::Euler3d => vec![],
        }
    }
}

/// One uniform draw per interval.
pub fn sample_lambda<R: Rng + ?Sized>(rng: &mut R, ranges: &[Interval]) -> Result<Vec<f64>> {
    ranges
        .iter()
        .map(|r| {
            if r.lo < r.hi && r.lo.is_finite() && r.hi.is_finite() {
                Ok(rng.gen_range(r.lo..r.hi))
            } else {
                Err(Error::InvalidArgument(format!("empty sampling interval [{}, {})", r.lo, r.hi)))
            }
        })
        .collect()
}

pub fn gaussian_from_lambda(lambda: &[f64]) -> Result<Gaussian> {
    match *lambda {
        [a, k, sigma] => Gaussian::one_d(a, k, sigma),
        [a, k1, k2, k3, sigma] => Gaussian::three_d(a, [k1, k2, k3], sigma),
        _ => Err(Error::InvalidArgument(format!("expected 3 or 5 parameters, got {}", lambda.len()))),
    }
}

pub fn vortex_from_lambda(lambda: &[f64]) -> Result<VortexParams> {
    match *lambda {
        [x_vc, y_vc, u0, v0, beta] => Ok(VortexParams { x_vc, y_vc, u0, v0, beta }),
        _ => Err(Error::InvalidArgument(format!("expected 5 vortex parameters, got {}", lambda.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn peak_has_zero_forcing() {
        let sol = Gaussian::one_d(0.75, 0.25, 0.25).unwrap();
        let t = 0.4;
        let (u, ut, g) = manufactured_eval(&sol, ScalarFlux::burgers(), [-0.25 * t, 0.0, 0.0], t);
        assert!((u - 0.75).abs() < 1e-15);
        assert!(ut.abs() < 1e-15 && g.abs() < 1e-15);
        let sol = Gaussian::one_d(1.0, 0.0, 1.0).unwrap();
        assert_eq!(manufactured_eval(&sol, ScalarFlux::burgers(), [0.0; 3], 0.0).0, 1.0);
    }

    #[test]
    fn forcing_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for gamma in [1.0, 0.1, 5.0] {
            let flux = ScalarFlux::Quadratic { gamma };
            for sol in [
                Gaussian::one_d(0.8, 0.3, 0.25).unwrap(),
                Gaussian::three_d(0.7, [0.1, 0.2, 0.4], 0.27).unwrap(),
            ] {
                let m = Manufactured { solution: sol, flux };
                for _ in 0..20 {
                    let mut x = [0.0; 3];
                    for xi in x.iter_mut().take(sol.dim()) {
                        *xi = rng.gen_range(-0.4..0.4);
                    }
                    let t = rng.gen_range(0.0..1.0);
                    let ut = (m.value(x, t + h) - m.value(x, t - h)) / (2.0 * h);
                    let mut fx = 0.0;
                    for a in 0..sol.dim() {
                        let (mut xp, mut xm) = (x, x);
                        xp[a] += h;
                        xm[a] -= h;
                        fx += (flux.flux(m.value(xp, t)) - flux.flux(m.value(xm, t))) / (2.0 * h);
                    }
                    let fd = ut + fx;
                    let g = m.forcing(x, t);
                    let scale = g.abs().max(1.0);
                    assert!((fd - g).abs() / scale < 1e-7, "{g} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn samples_stay_in_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (family, count) in [(Family::Scalar1d, 50), (Family::Scalar3d, 10), (Family::Euler2d, 20)] {
            let ranges = family.default_ranges();
            for _ in 0..count {
                let l = sample_lambda(&mut rng, &ranges).unwrap();
                for (v, r) in l.iter().zip(&ranges) {
                    assert!(*v >= r.lo && *v < r.hi);
                }
            }
        }
        assert!(sample_lambda(&mut rng, &[Interval { lo: 1.0, hi: 1.0 }]).is_err());
    }
}
