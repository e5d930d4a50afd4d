//! Training snapshots: exact manufactured data for the scalar families and
//! block-averaged WENO5-JS reference runs for the Euler families.
//!
//! File layout (`wlnn-dataset v1`):
//!
//! ```text
//! wlnn-dataset v1 kind=<family> grid=<n1,..> domain=<l1:u1,..> times=<t1,..> lambdas=<count> gamma=<g>
//! lambda <id> <parameters...>
//! sample <lambda id> <t>
//! u <snapshot values, component-major, storage order>
//! r <target residual values, same layout>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::manufactured::{gaussian_from_lambda, manufactured_eval, vortex_from_lambda, Family};
use crate::error::{Error, Result};
use crate::format::{fmt17, join17};
use crate::grid::{block_average, UniformGrid};
use crate::solver::{
    advance, init_isentropic_vortex, init_taylor_green, rhs_euler, EulerState, ScalarFlux, Scheme, Stepping,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub lambda_id: usize,
    pub t: f64,
    pub snapshot: Vec<f64>,
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub family: Family,
    pub grid: UniformGrid,
    pub times: Vec<f64>,
    pub gamma: f64,
    pub lambdas: Vec<Vec<f64>>,
    pub samples: Vec<TrainingSample>,
}

impl Dataset {
    pub fn components(&self) -> usize {
        match self.family {
            Family::Scalar1d | Family::Scalar3d => 1,
            Family::Euler2d | Family::Euler3d => self.grid.dim() + 2,
        }
    }
}

/// Snapshot times `t_end * n / n_times`, `n = 1..=n_times`.
pub fn uniform_times(t_end: f64, n_times: usize) -> Vec<f64> {
    (1..=n_times).map(|n| t_end * n as f64 / n_times as f64).collect()
}

/// Exact snapshots and analytic targets `R = du/dt` on cell centres.
pub fn build_dataset_scalar(family: Family, lambdas: &[Vec<f64>], grid: &UniformGrid, times: &[f64]) -> Result<Dataset> {
    if !matches!(family, Family::Scalar1d | Family::Scalar3d) {
        return Err(Error::InvalidArgument(format!("{} is not a scalar family", family.name())));
    }
    let mut samples = Vec::with_capacity(lambdas.len() * times.len());
    for (id, lambda) in lambdas.iter().enumerate() {
        let sol = gaussian_from_lambda(lambda)?;
        if sol.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!("{}D solution on a {}D grid", sol.dim(), grid.dim())));
        }
        for &t in times {
            let mut snapshot = Vec::with_capacity(grid.len());
            let mut targets = Vec::with_capacity(grid.len());
            for c in 0..grid.len() {
                let (u, ut, _) = manufactured_eval(&sol, ScalarFlux::burgers(), grid.cell_center(c), t);
                snapshot.push(u);
                targets.push(ut);
            }
            samples.push(TrainingSample { lambda_id: id, t, snapshot, targets });
        }
    }
    Ok(Dataset {
        family,
        grid: grid.clone(),
        times: times.to_vec(),
        gamma: 1.0,
        lambdas: lambdas.to_vec(),
        samples,
    })
}

/// Fine-grid WENO5-JS runs recorded at `times` (state and instantaneous
/// right side), block-averaged by `factor` onto the coarse grid.
pub fn build_dataset_euler(
    family: Family,
    lambdas: &[Vec<f64>],
    fine: &UniformGrid,
    factor: usize,
    times: &[f64],
    gamma: f64,
    cfl: f64,
) -> Result<Dataset> {
    let coarse = fine.coarsen(factor)?;
    let initial = |lambda: &[f64]| -> Result<EulerState> {
        match family {
            Family::Euler2d => init_isentropic_vortex(fine, &vortex_from_lambda(lambda)?, gamma),
            Family::Euler3d => init_taylor_green(fine, gamma),
            _ => Err(Error::InvalidArgument(format!("{} is not an Euler family", family.name()))),
        }
    };
    let t_end = times.iter().cloned().fold(0.0, f64::max);
    let dx_min = fine.dx().iter().cloned().fold(f64::INFINITY, f64::min);
    let stepping = Stepping::new(cfl, dx_min)?;

    let per_lambda: Vec<Result<Vec<TrainingSample>>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(id, lambda)| {
            let s0 = initial(lambda)?;
            let template = s0.clone();
            let mut out = Vec::with_capacity(times.len());
            let scheme = Scheme::Weno5Js;
            advance(
                s0.into_data(),
                0.0,
                t_end,
                stepping,
                times,
                |u, _| rhs_euler(&template.with_data(u.to_vec())?, &scheme),
                |u| template.with_data(u.to_vec()).map(|s| s.max_wave_speed()).unwrap_or(f64::NAN),
                |t, u| {
                    if u.iter().any(|v| !v.is_finite()) {
                        return Err(Error::NonFinite { context: "reference solve", cell: 0 });
                    }
                    let state = template.with_data(u.to_vec())?;
                    let r = rhs_euler(&state, &scheme)?;
                    out.push(TrainingSample {
                        lambda_id: id,
                        t,
                        snapshot: average_components(fine, u, factor)?,
                        targets: average_components(fine, &r, factor)?,
                    });
                    Ok(())
                },
            )?;
            Ok(out)
        })
        .collect();

    let mut samples = Vec::new();
    for r in per_lambda {
        samples.extend(r?);
    }
    Ok(Dataset {
        family,
        grid: coarse,
        times: times.to_vec(),
        gamma,
        lambdas: lambdas.to_vec(),
        samples,
    })
}

fn average_components(fine: &UniformGrid, data: &[f64], factor: usize) -> Result<Vec<f64>> {
    let n = fine.len();
    let mut out = Vec::with_capacity(data.len() / factor.pow(fine.dim() as u32));
    for comp in data.chunks(n) {
        out.extend(block_average(fine, comp, factor)?.1);
    }
    Ok(out)
}

pub fn dataset_to_string(ds: &Dataset) -> String {
    let g = &ds.grid;
    let n: Vec<String> = g.n_cells().iter().map(|v| v.to_string()).collect();
    let dom: Vec<String> = g.lower().iter().zip(g.upper()).map(|(l, u)| format!("{}:{}", fmt17(*l), fmt17(*u))).collect();
    let mut out = format!(
        "wlnn-dataset v1 kind={} grid={} domain={} times={} lambdas={} gamma={}\n",
        ds.family.name(),
        n.join(","),
        dom.join(","),
        join17(&ds.times, ","),
        ds.lambdas.len(),
        fmt17(ds.gamma)
    );
    for (id, l) in ds.lambdas.iter().enumerate() {
        let _ = writeln!(out, "lambda {id} {}", join17(l, " "));
    }
    for s in &ds.samples {
        let _ = writeln!(out, "sample {} {}", s.lambda_id, fmt17(s.t));
        let _ = writeln!(out, "u {}", join17(&s.snapshot, " "));
        let _ = writeln!(out, "r {}", join17(&s.targets, " "));
    }
    out
}

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    fs::write(path, dataset_to_string(ds))?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    parse_dataset(&text).map_err(|message| Error::Format { path: path.to_path_buf(), message })
}

fn parse_list<T: std::str::FromStr>(s: &str, sep: char) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    s.split(sep)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|e| format!("`{t}`: {e}")))
        .collect()
}

pub fn parse_dataset(text: &str) -> std::result::Result<Dataset, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("empty dataset file")?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("wlnn-dataset") {
        return Err("not a dataset file".into());
    }
    if fields.next() != Some("v1") {
        return Err("unsupported dataset version".into());
    }
    let mut kv = std::collections::HashMap::new();
    for f in fields {
        let (k, v) = f.split_once('=').ok_or_else(|| format!("bad header field `{f}`"))?;
        kv.insert(k, v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| format!("header missing {k}="));
    let family = Family::parse(get("kind")?).map_err(|e| e.to_string())?;
    let n: Vec<usize> = parse_list(get("grid")?, ',')?;
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for d in get("domain")?.split(',') {
        let (l, u) = d.split_once(':').ok_or("bad domain")?;
        lower.push(l.parse::<f64>().map_err(|e| e.to_string())?);
        upper.push(u.parse::<f64>().map_err(|e| e.to_string())?);
    }
    let grid = UniformGrid::new(&lower, &upper, &n).map_err(|e| e.to_string())?;
    let times: Vec<f64> = parse_list(get("times")?, ',')?;
    let n_lambdas: usize = get("lambdas")?.parse().map_err(|_| "bad lambdas=")?;
    let gamma: f64 = get("gamma")?.parse().map_err(|_| "bad gamma=")?;

    let mut ds = Dataset { family, grid, times, gamma, lambdas: Vec::new(), samples: Vec::new() };
    let width = ds.components() * ds.grid.len();
    for _ in 0..n_lambdas {
        let line = lines.next().ok_or("missing lambda line")?;
        let rest = line.strip_prefix("lambda ").ok_or_else(|| format!("expected lambda line, got `{line}`"))?;
        let vals: Vec<f64> = parse_list(rest, ' ')?;
        ds.lambdas.push(vals[1..].to_vec());
    }
    while let Some(line) = lines.next() {
        if line.is_empty() {
            continue;
        }
        let rest = line.strip_prefix("sample ").ok_or_else(|| format!("expected sample line, got `{line}`"))?;
        let (id, t) = rest.split_once(' ').ok_or("bad sample line")?;
        let lambda_id: usize = id.parse().map_err(|_| "bad lambda id")?;
        if lambda_id >= ds.lambdas.len() {
            return Err(format!("sample refers to unknown lambda {lambda_id}"));
        }
        let t: f64 = t.parse().map_err(|_| "bad sample time")?;
        let mut block = |tag: &str| -> std::result::Result<Vec<f64>, String> {
            let l = lines.next().ok_or("truncated sample")?;
            let vals: Vec<f64> = parse_list(l.strip_prefix(tag).ok_or("bad sample block")?, ' ')?;
            if vals.len() != width {
                return Err(format!("sample block has {} values, expected {width}", vals.len()));
            }
            Ok(vals)
        };
        let snapshot = block("u ")?;
        let targets = block("r ")?;
        ds.samples.push(TrainingSample { lambda_id, t, snapshot, targets });
    }
    Ok(ds)
}
