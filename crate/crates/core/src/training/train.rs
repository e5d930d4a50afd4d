//! Residual-matching training: the network's weights enter the conservative
//! flux difference, and the loss compares the resulting residual with the
//! recorded one.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::Dataset;
use super::manufactured::{gaussian_from_lambda, manufactured_eval, Family};
use crate::error::{Error, Result};
use crate::format::fmt17;
use crate::grid::GhostKind;
use crate::schemes::{dot6, STENCIL};
use crate::solver::{gather_euler, gather_scalar, EulerState, FluxProblem, ScalarFlux};
use crate::wlnn::{AdamState, Batch, WlnnModel};

/// Rows pushed through the network in one batched call.
const ROW_BUDGET: usize = 1 << 16;

/// One snapshot prepared for residual evaluation: split-flux stencils,
/// the additive source per output and the target residual.
#[derive(Debug, Clone)]
pub struct ResidualUnit {
    pub group: usize,
    pub problem: FluxProblem,
    pub base: Vec<f64>,
    pub target: Vec<f64>,
}

impl ResidualUnit {
    pub fn n_outputs(&self) -> usize {
        self.target.len()
    }
}

/// Scalar units use Burgers' flux with exact Dirichlet ghosts and the
/// manufactured forcing; Euler units use periodic componentwise splitting.
pub fn residual_units(ds: &Dataset) -> Result<Vec<ResidualUnit>> {
    let flux = ScalarFlux::burgers();
    let grid = &ds.grid;
    ds.samples
        .iter()
        .map(|s| {
            let lambda = &ds.lambdas[s.lambda_id];
            let (problem, base) = match ds.family {
                Family::Scalar1d | Family::Scalar3d => {
                    let sol = gaussian_from_lambda(lambda)?;
                    let t = s.t;
                    let exact = move |x: [f64; 3]| manufactured_eval(&sol, flux, x, t).0;
                    let problem = gather_scalar(grid, &s.snapshot, flux, GhostKind::DirichletExact, Some(&exact as &dyn Fn([f64; 3]) -> f64));
                    let base = (0..grid.len()).map(|c| manufactured_eval(&sol, flux, grid.cell_center(c), t).2).collect();
                    (problem, base)
                }
                Family::Euler2d | Family::Euler3d => {
                    let state = EulerState::new(grid.clone(), ds.gamma, s.snapshot.clone())?;
                    (gather_euler(&state)?, vec![0.0; s.snapshot.len()])
                }
            };
            if problem.n_outputs() != s.targets.len() {
                return Err(Error::ShapeMismatch { expected: format!("{} targets", problem.n_outputs()), found: s.targets.len().to_string() });
            }
            Ok(ResidualUnit { group: s.lambda_id, problem, base, target: s.targets.clone() })
        })
        .collect()
}

#[derive(Default)]
struct Work {
    batch: Batch,
    stencils: Vec<[f64; STENCIL]>,
    recon: Vec<f64>,
    d_recon: Vec<f64>,
    d_w: Vec<f64>,
    resid: Vec<f64>,
    d_flux: Vec<f64>,
}

fn chunks<'a>(units: &'a [&'a ResidualUnit]) -> impl Iterator<Item = &'a [[f64; STENCIL]]> + 'a {
    units.iter().flat_map(|u| u.problem.stencils.chunks(ROW_BUDGET))
}

/// Sum of squared residual errors over `units`. With `grad`, accumulates
/// `scale * d(sse)/d(params)` into it.
fn eval_group(model: &WlnnModel, units: &[&ResidualUnit], grad: Option<&mut [f64]>, scale: f64, w: &mut Work) -> Result<f64> {
    let total: usize = units.iter().map(|u| u.problem.stencils.len()).sum();
    let single_pass = total <= ROW_BUDGET;
    w.recon.clear();
    if single_pass {
        w.stencils.clear();
        for u in units {
            w.stencils.extend_from_slice(&u.problem.stencils);
        }
        model.forward_batch(&w.stencils, &mut w.batch);
        let weights = w.batch.weights();
        w.recon.extend(w.stencils.iter().enumerate().map(|(r, f)| dot6(weights[r * STENCIL..(r + 1) * STENCIL].try_into().expect("row of six"), f)));
    } else {
        for chunk in chunks(units) {
            model.forward_batch(chunk, &mut w.batch);
            let weights = w.batch.weights();
            w.recon.extend(chunk.iter().enumerate().map(|(r, f)| dot6(weights[r * STENCIL..(r + 1) * STENCIL].try_into().expect("row of six"), f)));
        }
    }

    let want_grad = grad.is_some();
    if want_grad {
        w.d_recon.clear();
        w.d_recon.resize(total, 0.0);
    }
    let mut sse = 0.0;
    let mut offset = 0;
    for u in units {
        let p = &u.problem;
        let n = p.stencils.len();
        let flux = p.interface_fluxes(&w.recon[offset..offset + n]);
        w.resid.resize(u.n_outputs(), 0.0);
        p.divergence(&flux, &mut w.resid);
        for (c, r) in w.resid.iter_mut().enumerate() {
            *r += u.base[c] - u.target[c];
            sse += *r * *r;
        }
        if !sse.is_finite() {
            return Err(Error::NonFinite { context: "training residual", cell: 0 });
        }
        if want_grad {
            w.d_flux.clear();
            w.d_flux.resize(n / 2, 0.0);
            for (c, r) in w.resid.iter().enumerate() {
                let g = 2.0 * r * scale;
                for axis in 0..p.dim {
                    let [l, rt] = p.faces[c * p.dim + axis];
                    let gi = g * p.inv_dx[axis];
                    w.d_flux[l as usize] += gi;
                    w.d_flux[rt as usize] -= gi;
                }
            }
            for (k, d) in w.d_flux.iter().enumerate() {
                w.d_recon[offset + 2 * k] = *d;
                w.d_recon[offset + 2 * k + 1] = *d;
            }
        }
        offset += n;
    }

    if let Some(grad) = grad {
        let mut row = 0;
        let mut fill = |w_rows: &[[f64; STENCIL]], d_w: &mut Vec<f64>, d_recon: &[f64]| {
            d_w.clear();
            for f in w_rows {
                let d = d_recon[row];
                d_w.extend(f.iter().map(|v| d * v));
                row += 1;
            }
        };
        if single_pass {
            fill(&w.stencils, &mut w.d_w, &w.d_recon);
            model.backward_batch(&mut w.batch, &w.d_w, grad)?;
        } else {
            for chunk in chunks(units) {
                fill(chunk, &mut w.d_w, &w.d_recon);
                model.forward_batch(chunk, &mut w.batch);
                model.backward_batch(&mut w.batch, &w.d_w, grad)?;
            }
        }
    }
    Ok(sse)
}

/// Split `units` into evaluation groups that either fit the row budget
/// or hold a single unit.
fn row_groups<'a>(units: &[&'a ResidualUnit]) -> Vec<Vec<&'a ResidualUnit>> {
    let mut groups: Vec<Vec<&ResidualUnit>> = Vec::new();
    let mut rows = 0;
    for &u in units {
        let n = u.problem.stencils.len();
        if groups.is_empty() || rows + n > ROW_BUDGET {
            groups.push(Vec::new());
            rows = 0;
        }
        groups.last_mut().expect("just pushed").push(u);
        rows += n;
    }
    groups
}

fn sse_and_grad(model: &WlnnModel, units: &[&ResidualUnit], grad: Option<&mut [f64]>, w: &mut Work) -> Result<(f64, usize)> {
    let outputs: usize = units.iter().map(|u| u.n_outputs()).sum();
    if outputs == 0 {
        return Err(Error::InvalidArgument("no training samples".into()));
    }
    let scale = 1.0 / outputs as f64;
    let mut sse = 0.0;
    match grad {
        Some(g) => {
            for group in row_groups(units) {
                sse += eval_group(model, &group, Some(&mut *g), scale, w)?;
            }
        }
        None => {
            for group in row_groups(units) {
                sse += eval_group(model, &group, None, scale, w)?;
            }
        }
    }
    Ok((sse, outputs))
}

/// Mean squared residual mismatch over all cells, components and samples.
pub fn loss_residual(model: &WlnnModel, units: &[ResidualUnit]) -> Result<f64> {
    let refs: Vec<&ResidualUnit> = units.iter().collect();
    let (sse, n) = sse_and_grad(model, &refs, None, &mut Work::default())?;
    Ok(sse / n as f64)
}

/// Loss and its gradient with respect to the flat parameter vector.
pub fn loss_and_gradient(model: &WlnnModel, units: &[ResidualUnit]) -> Result<(f64, Vec<f64>)> {
    let refs: Vec<&ResidualUnit> = units.iter().collect();
    let mut grad = vec![0.0; model.n_params()];
    let (sse, n) = sse_and_grad(model, &refs, Some(&mut grad), &mut Work::default())?;
    Ok((sse / n as f64, grad))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub stop_loss: f64,
    /// Sample families (lambda groups) per mini-batch.
    pub batch_size: usize,
    pub seed: u64,
    pub lr0: f64,
    pub decay: f64,
}

impl TrainConfig {
    pub fn for_family(family: Family) -> Self {
        let (epochs, stop_loss, batch_size) = match family {
            Family::Scalar1d => (1000, 1.3e-7, 10),
            Family::Scalar3d => (1000, 1.501e-8, usize::MAX),
            // Full-batch Adam makes one step per epoch, too few to move far
            // from the initial scheme in 600 epochs.
            Family::Euler2d => (600, 1.25e-5, 2),
            Family::Euler3d => (1000, 8.109e-6, usize::MAX),
        };
        Self { epochs, stop_loss, batch_size, seed: 0, lr0: 1e-3, decay: 0.99 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be at least 1".into()));
        }
        if !(self.lr0 > 0.0 && self.decay > 0.0) || self.stop_loss.is_nan() {
            return Err(Error::InvalidArgument("invalid learning-rate schedule or stop loss".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub lr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub history: Vec<EpochRecord>,
    pub reached_stop_loss: bool,
}

impl TrainReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,loss,lr\n");
        for r in &self.history {
            let _ = writeln!(out, "{},{},{}", r.epoch, fmt17(r.loss), fmt17(r.lr));
        }
        out
    }
}

pub fn train(config: &TrainConfig, units: &[ResidualUnit], model: &mut WlnnModel) -> Result<TrainReport> {
    train_with(config, units, model, |_| {})
}

/// Adam over shuffled mini-batches of sample families. The reported epoch
/// loss is the mean over the epoch's batches, each taken before its update.
/// An infinite `stop_loss` disables early stopping.
/// On a non-finite loss the model is restored to its state at the start of
/// the failing epoch.
pub fn train_with(
    config: &TrainConfig,
    units: &[ResidualUnit],
    model: &mut WlnnModel,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainReport> {
    config.validate()?;
    if units.is_empty() {
        return Err(Error::InvalidArgument("no training samples".into()));
    }
    let n_groups = units.iter().map(|u| u.group).max().unwrap_or(0) + 1;
    let mut by_group: Vec<Vec<&ResidualUnit>> = vec![Vec::new(); n_groups];
    for u in units {
        by_group[u.group].push(u);
    }
    let mut order: Vec<usize> = (0..n_groups).filter(|&g| !by_group[g].is_empty()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut adam = AdamState::new(model.n_params()).with_schedule(config.lr0, config.decay);
    let mut grad = vec![0.0; model.n_params()];
    let mut work = Work::default();
    let mut history = Vec::with_capacity(config.epochs);
    let mut reached = false;

    for epoch in 0..config.epochs {
        let checkpoint = model.mlp.params().to_vec();
        order.shuffle(&mut rng);
        let lr = adam.learning_rate(epoch);
        let mut sse = 0.0;
        let mut count = 0;
        for batch in order.chunks(config.batch_size.min(order.len())) {
            let members: Vec<&ResidualUnit> = batch.iter().flat_map(|&g| by_group[g].iter().copied()).collect();
            grad.iter_mut().for_each(|g| *g = 0.0);
            let step = sse_and_grad(model, &members, Some(&mut grad), &mut work);
            let (s, n) = match step {
                Ok(v) => v,
                Err(e) if e.is_numerical() => {
                    model.mlp.params_mut().copy_from_slice(&checkpoint);
                    return Err(Error::TrainingDiverged { epoch });
                }
                Err(e) => return Err(e),
            };
            if grad.iter().any(|g| !g.is_finite()) {
                model.mlp.params_mut().copy_from_slice(&checkpoint);
                return Err(Error::TrainingDiverged { epoch });
            }
            adam.step(model.mlp.params_mut(), &grad, epoch);
            sse += s;
            count += n;
        }
        let record = EpochRecord { epoch, loss: sse / count as f64, lr };
        on_epoch(&record);
        history.push(record);
        if config.stop_loss.is_finite() && record.loss <= config.stop_loss {
            reached = true;
            break;
        }
    }
    Ok(TrainReport { history, reached_stop_loss: reached })
}
