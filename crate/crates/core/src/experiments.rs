//! Experiment recipes: the scalar manufactured-solution tests, the convected
//! isentropic vortex and the Taylor-Green vortex.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{block_average, rms_diff, UniformGrid};
use crate::solver::{
    advance, enstrophy, isentropic_vortex_at, kinetic_energy, max_wave_speed_scalar, rhs_euler, rhs_scalar_values,
    EulerState, ExactSolution, ScalarFlux, ScalarProblem, Scheme, Stepping, VortexParams, DEFAULT_GAMMA,
};
use crate::training::{uniform_times, Gaussian, Manufactured};

pub const DEFAULT_CFL: f64 = 0.4;

/// L2 error history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries {
    pub scheme: String,
    pub times: Vec<f64>,
    pub errors: Vec<f64>,
}

impl ErrorSeries {
    pub fn mean(&self) -> f64 {
        self.errors.iter().sum::<f64>() / self.errors.len() as f64
    }
}

/// Manufactured-solution run with Dirichlet ghosts and forcing.
#[derive(Debug, Clone)]
pub struct ScalarExperiment {
    pub exact: Manufactured,
    pub grid: UniformGrid,
    pub t_end: f64,
    /// Errors are recorded at `t_end * n / n_times` for `n = 1..=n_times`.
    pub n_times: usize,
    pub cfl: f64,
}

impl ScalarExperiment {
    /// 1D family on `[-2, 2]`, `t in [0, 1]`.
    pub fn one_d(a: f64, k: f64, sigma: f64, gamma: f64, n: usize) -> Result<Self> {
        Ok(Self {
            exact: Manufactured {
                solution: Gaussian::one_d(a, k, sigma)?,
                flux: ScalarFlux::Quadratic { gamma },
            },
            grid: UniformGrid::new(&[-2.0], &[2.0], &[n])?,
            t_end: 1.0,
            n_times: 40,
            cfl: DEFAULT_CFL,
        })
    }

    /// 3D family on `[-2, 2]^3`, `t in [0, 1]`.
    pub fn three_d(a: f64, k: [f64; 3], sigma: f64, n: usize, n_times: usize) -> Result<Self> {
        Ok(Self {
            exact: Manufactured {
                solution: Gaussian::three_d(a, k, sigma)?,
                flux: ScalarFlux::burgers(),
            },
            grid: UniformGrid::cube(3, -2.0, 2.0, n)?,
            t_end: 1.0,
            n_times,
            cfl: DEFAULT_CFL,
        })
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        (1..=self.n_times).map(|n| self.t_end * n as f64 / self.n_times as f64).collect()
    }

    pub fn exact_at(&self, t: f64) -> Vec<f64> {
        (0..self.grid.len()).map(|c| self.exact.value(self.grid.cell_center(c), t)).collect()
    }

    pub fn run(&self, scheme: &Scheme) -> Result<ErrorSeries> {
        self.run_with(scheme, |_, _| Ok(()))
    }

    /// Run and hand each snapshot `(t, u)` to `on_snapshot` as well.
    pub fn run_with(&self, scheme: &Scheme, mut on_snapshot: impl FnMut(f64, &[f64]) -> Result<()>) -> Result<ErrorSeries> {
        let problem = ScalarProblem::manufactured(self.exact.flux, &self.exact);
        let dx_min = self.grid.dx().iter().cloned().fold(f64::INFINITY, f64::min);
        let stepping = Stepping::new(self.cfl, dx_min)?;
        let flux = self.exact.flux;
        let grid = &self.grid;
        // CFL speed: sum over axes of the largest |f'(u)|, as every axis advects.
        let dim = grid.dim() as f64;
        let mut series = ErrorSeries { scheme: scheme.name().to_string(), times: vec![], errors: vec![] };
        advance(
            self.exact_at(0.0),
            0.0,
            self.t_end,
            stepping,
            &self.snapshot_times(),
            |u, t| rhs_scalar_values(grid, u, scheme, &problem, t),
            |u| dim * max_wave_speed_scalar(u, flux),
            |t, u| {
                series.times.push(t);
                series.errors.push(rms_diff(u, &self.exact_at(t)));
                on_snapshot(t, u)
            },
        )?;
        Ok(series)
    }
}

/// March an Euler state from `t0` to `t_end` with `scheme`, calling
/// `observer` at each of `times`.
pub fn run_euler(
    initial: &EulerState,
    scheme: &Scheme,
    t0: f64,
    t_end: f64,
    times: &[f64],
    cfl: f64,
    mut observer: impl FnMut(f64, &EulerState) -> Result<()>,
) -> Result<EulerState> {
    let dx_min = initial.grid().dx().iter().cloned().fold(f64::INFINITY, f64::min);
    let stepping = Stepping::new(cfl, dx_min)?;
    let out = advance(
        initial.data().to_vec(),
        t0,
        t_end,
        stepping,
        times,
        |u, _| rhs_euler(&initial.with_data(u.to_vec())?, scheme),
        |u| initial.with_data(u.to_vec()).map(|s| s.max_wave_speed()).unwrap_or(f64::NAN),
        |t, u| observer(t, &initial.with_data(u.to_vec())?),
    )?;
    initial.with_data(out.state)
}

/// Convected isentropic vortex on a periodic `[0, 10]^2` box. Initial and
/// reference fields are `factor x factor` block averages of the exact
/// solution sampled on a finer grid, as in the training data.
#[derive(Debug, Clone)]
pub struct VortexExperiment {
    pub params: VortexParams,
    pub gamma: f64,
    pub grid: UniformGrid,
    pub factor: usize,
    pub times: Vec<f64>,
    pub cfl: f64,
}

impl VortexExperiment {
    /// `n x n` cells, density errors recorded every `t_end / n_times`.
    pub fn new(n: usize, t_end: f64, n_times: usize) -> Result<Self> {
        Ok(Self {
            params: VortexParams::TEST,
            gamma: DEFAULT_GAMMA,
            grid: UniformGrid::cube(2, 0.0, 10.0, n)?,
            factor: 4,
            times: uniform_times(t_end, n_times),
            cfl: DEFAULT_CFL,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn exact_at(&self, t: f64) -> Result<EulerState> {
        let n: Vec<usize> = self.grid.n_cells().iter().map(|n| n * self.factor).collect();
        let fine = UniformGrid::new(self.grid.lower(), self.grid.upper(), &n)?;
        let exact = isentropic_vortex_at(&fine, &self.params, self.gamma, t)?;
        let mut data = Vec::with_capacity(self.grid.len() * exact.n_components());
        for m in 0..exact.n_components() {
            data.extend(block_average(&fine, exact.component(m), self.factor)?.1);
        }
        EulerState::new(self.grid.clone(), self.gamma, data)
    }

    pub fn run(&self, scheme: &Scheme) -> Result<ErrorSeries> {
        self.run_with(scheme, |_, _| Ok(()))
    }

    /// Density L2 error at each recorded time.
    pub fn run_with(&self, scheme: &Scheme, mut on_snapshot: impl FnMut(f64, &EulerState) -> Result<()>) -> Result<ErrorSeries> {
        let mut series = ErrorSeries { scheme: scheme.name().to_string(), times: vec![], errors: vec![] };
        run_euler(&self.exact_at(0.0)?, scheme, 0.0, self.t_end(), &self.times, self.cfl, |t, s| {
            series.times.push(t);
            series.errors.push(rms_diff(s.component(0), self.exact_at(t)?.component(0)));
            on_snapshot(t, s)
        })?;
        Ok(series)
    }
}

/// Kinetic energy, enstrophy and conserved-total drift sampled along one run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    pub scheme: String,
    pub times: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub enstrophy: Vec<f64>,
    /// Largest relative change of any conserved total seen so far.
    pub total_drift: f64,
    /// Time of the last good sample when the run broke down.
    pub failed_at: Option<f64>,
    pub wall_seconds: f64,
}

impl DiagnosticSeries {
    /// Values divided by the first sample.
    pub fn normalized(values: &[f64]) -> Vec<f64> {
        let v0 = values.first().copied().unwrap_or(1.0);
        values.iter().map(|v| v / v0).collect()
    }

    /// `t,K,Omega`, both normalized by their first sample.
    pub fn to_csv(&self) -> String {
        let k = Self::normalized(&self.kinetic);
        let o = Self::normalized(&self.enstrophy);
        let mut out = String::from("t,K,Omega\n");
        for i in 0..self.times.len() {
            let row = [self.times[i], k[i], o[i]];
            out.push_str(&crate::format::join17(&row, ","));
            out.push('\n');
        }
        out
    }
}

/// Largest change of a conserved total, relative to the larger of that
/// component's initial absolute sum and the total mass (momenta may start
/// at zero).
pub fn total_drift(initial: &EulerState, current: &EulerState) -> f64 {
    let t0 = initial.totals();
    let t1 = current.totals();
    let abs_sum = |m: usize| initial.component(m).iter().map(|v| v.abs()).sum::<f64>();
    let mass = abs_sum(0).max(f64::MIN_POSITIVE);
    (0..t0.len())
        .map(|m| {
            let scale = abs_sum(m).max(mass);
            (t1[m] - t0[m]).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// Taylor-Green diagnostics from `initial` at `t0` to `t_end`, sampled at
/// `times`. Numerical breakdown ends the series and is reported through
/// `failed_at` instead of an error.
pub fn taylor_green_series(
    initial: &EulerState,
    scheme: &Scheme,
    t0: f64,
    t_end: f64,
    times: &[f64],
    cfl: f64,
) -> Result<DiagnosticSeries> {
    let mut series = DiagnosticSeries {
        scheme: scheme.name().to_string(),
        times: vec![],
        kinetic: vec![],
        enstrophy: vec![],
        total_drift: 0.0,
        failed_at: None,
        wall_seconds: 0.0,
    };
    let clock = Instant::now();
    let result = run_euler(initial, scheme, t0, t_end, times, cfl, |t, s| {
        let k = kinetic_energy(s);
        let o = enstrophy(s)?;
        if !(k.is_finite() && o.is_finite()) {
            return Err(Error::NonFinite { context: "diagnostics", cell: 0 });
        }
        series.times.push(t);
        series.kinetic.push(k);
        series.enstrophy.push(o);
        series.total_drift = series.total_drift.max(total_drift(initial, s));
        Ok(())
    });
    series.wall_seconds = clock.elapsed().as_secs_f64();
    match result {
        Ok(_) => Ok(series),
        Err(e) if e.is_numerical() => {
            series.failed_at = Some(series.times.last().copied().unwrap_or(t0));
            Ok(series)
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::init_taylor_green;

    #[test]
    fn vortex_reference_is_periodic_translation() {
        let e = VortexExperiment::new(20, 10.0, 2).unwrap();
        let a = e.exact_at(0.0).unwrap();
        let b = e.exact_at(10.0).unwrap();
        assert!(rms_diff(a.data(), b.data()) < 1e-12);
    }

    #[test]
    fn vortex_short_run_is_accurate() {
        let mut e = VortexExperiment::new(20, 0.5, 1).unwrap();
        e.factor = 1;
        let up5 = e.run(&Scheme::Up5).unwrap();
        assert_eq!(up5.times, vec![0.5]);
        assert!(up5.errors[0] > 0.0 && up5.errors[0] < 5e-2, "{:?}", up5.errors);
    }

    #[test]
    fn taylor_green_short_run_conserves() {
        let g = UniformGrid::cube(3, 0.0, 2.0 * std::f64::consts::PI, 8).unwrap();
        let s = init_taylor_green(&g, 1.4).unwrap();
        let times = [0.0, 0.05, 0.1];
        let d = taylor_green_series(&s, &Scheme::Ce6, 0.0, 0.1, &times, 0.4).unwrap();
        assert_eq!(d.times, times);
        assert!(d.failed_at.is_none());
        assert!(d.total_drift < 1e-13, "{}", d.total_drift);
        assert!((d.kinetic[0] - 0.125).abs() < 1e-12);
        let csv = d.to_csv();
        assert!(csv.lines().nth(1).unwrap().ends_with("1.0000000000000000e0,1.0000000000000000e0"));
    }
}
