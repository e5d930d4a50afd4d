use crate::error::{Error, Result};

/// One third-order TVD Runge-Kutta step. `rhs(u, t)` is evaluated at the
/// stage times `t`, `t + dt` and `t + dt / 2`.
pub fn tvd_rk3_step<F>(u: &[f64], t: f64, dt: f64, rhs: &mut F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], f64) -> Result<Vec<f64>>,
{
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let r0 = rhs(u, t)?;
    let u1: Vec<f64> = u.iter().zip(&r0).map(|(a, r)| a + dt * r).collect();
    let r1 = rhs(&u1, t + dt)?;
    let u2: Vec<f64> = u
        .iter()
        .zip(&u1)
        .zip(&r1)
        .map(|((a, b), r)| 0.25 * (3.0 * a + b + dt * r))
        .collect();
    let r2 = rhs(&u2, t + 0.5 * dt)?;
    Ok(u.iter()
        .zip(&u2)
        .zip(&r2)
        .map(|((a, b), r)| (a + 2.0 * b + 2.0 * dt * r) / 3.0)
        .collect())
}

/// CFL time-stepping settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepping {
    pub cfl: f64,
    /// Smallest cell width over all axes.
    pub dx_min: f64,
}

impl Stepping {
    pub fn new(cfl: f64, dx_min: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= 1.0) {
            return Err(Error::InvalidArgument(format!("cfl must lie in (0, 1], got {cfl}")));
        }
        Ok(Self { cfl, dx_min })
    }

    /// `cfl * dx_min / speed`; unbounded when nothing moves.
    pub fn dt(&self, speed: f64) -> f64 {
        if speed > 0.0 {
            self.cfl * self.dx_min / speed
        } else {
            f64::INFINITY
        }
    }
}

/// Outcome of [`advance`].
#[derive(Debug, Clone)]
pub struct Advanced {
    pub state: Vec<f64>,
    pub t: f64,
    pub steps: usize,
}

/// March from `t0` to `t_end`, shortening steps so that every time in
/// `snapshots` (sorted, within `[t0, t_end]`) is landed on exactly. The
/// observer runs at each snapshot, including one at `t0`.
pub fn advance<R, W, O>(
    u0: Vec<f64>,
    t0: f64,
    t_end: f64,
    stepping: Stepping,
    snapshots: &[f64],
    mut rhs: R,
    wave_speed: W,
    mut observer: O,
) -> Result<Advanced>
where
    R: FnMut(&[f64], f64) -> Result<Vec<f64>>,
    W: Fn(&[f64]) -> f64,
    O: FnMut(f64, &[f64]) -> Result<()>,
{
    let tol = 1e-12 * t_end.abs().max(1.0);
    // (time, observe?) sorted; the horizon itself is always a target.
    let mut targets: Vec<(f64, bool)> = snapshots
        .iter()
        .filter(|&&s| s >= t0 - tol && s <= t_end + tol)
        .map(|&s| (s, true))
        .collect();
    if !targets.iter().any(|&(s, _)| (s - t_end).abs() <= tol) {
        targets.push((t_end, false));
    }
    let mut u = u0;
    let mut t = t0;
    let mut steps = 0;
    let mut next = 0;
    loop {
        while next < targets.len() && targets[next].0 <= t + tol {
            if targets[next].1 {
                observer(targets[next].0, &u)?;
            }
            next += 1;
        }
        if t >= t_end - tol || next == targets.len() {
            break;
        }
        let target = targets[next].0;
        let mut dt = stepping.dt(wave_speed(&u));
        let lands = t + dt >= target - tol;
        if lands {
            dt = target - t;
        }
        u = tvd_rk3_step(&u, t, dt, &mut rhs)?;
        steps += 1;
        t = if lands { target } else { t + dt };
    }
    Ok(Advanced { state: u, t, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rhs_is_identity() {
        let u = vec![1.0, -2.0, 3.5];
        let out = tvd_rk3_step(&u, 0.0, 0.3, &mut |x: &[f64], _| Ok(vec![0.0; x.len()])).unwrap();
        assert_eq!(out, u);
    }

    #[test]
    fn linear_decay_amplification() {
        let out = tvd_rk3_step(&[1.0], 0.0, 0.1, &mut |x: &[f64], _| Ok(vec![-x[0]])).unwrap();
        let expected = 1.0 - 0.1 + 0.005 - 1.0 / 6000.0;
        assert!((out[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn third_order_in_time() {
        // u' = cos(t) u  =>  u = exp(sin t).
        let solve = |n: usize| {
            let dt = 1.0 / n as f64;
            let mut u = vec![1.0];
            for s in 0..n {
                u = tvd_rk3_step(&u, s as f64 * dt, dt, &mut |x: &[f64], t| Ok(vec![t.cos() * x[0]])).unwrap();
            }
            (u[0] - 1f64.sin().exp()).abs()
        };
        let ratio = solve(40) / solve(80);
        assert!((ratio - 8.0).abs() < 0.8, "ratio {ratio}");
    }

    #[test]
    fn cfl_step_size() {
        let s = Stepping::new(0.4, 1.0 / 60.0).unwrap();
        assert!((s.dt(1.0) - 1.0 / 150.0).abs() < 1e-16);
        assert!(Stepping::new(0.0, 1.0).is_err());
        assert!(Stepping::new(1.5, 1.0).is_err());
    }

    #[test]
    fn zero_horizon_takes_no_steps() {
        let s = Stepping::new(0.4, 0.1).unwrap();
        let out = advance(vec![1.0], 0.0, 0.0, s, &[], |x, _| Ok(vec![-x[0]]), |_| 1.0, |_, _| Ok(())).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, vec![1.0]);
    }

    #[test]
    fn snapshots_hit_exactly() {
        let s = Stepping::new(0.4, 0.3).unwrap();
        let snaps: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
        let mut seen = Vec::new();
        let out = advance(
            vec![1.0],
            0.0,
            10.0,
            s,
            &snaps,
            |x, _| Ok(vec![-0.01 * x[0]]),
            |_| 1.0,
            |t, _| {
                seen.push(t);
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(seen, snaps);
        assert_eq!(out.t, 10.0);
    }
}
