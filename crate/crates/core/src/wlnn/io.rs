//! Plain-text model files.
//!
//! ```text
//! wlnn-model v1 layers=6,50,50,4
//! <w* : 6 values>
//! <v_1 .. v_4 : 6 values each, one per line>
//! <per layer: one line per weight-matrix row, then one bias line>
//! ```

use std::fs;
use std::path::Path;

use super::basis::{ConstraintBasis, FREE_PARAMS};
use super::mlp::{MlpModel, WlnnModel};
use crate::error::{Error, Result};
use crate::format::join17;
use crate::schemes::{constraint_residuals, MOMENT_TOL, STENCIL, SUM_TOL};

const MAGIC: &str = "wlnn-model";
const VERSION: &str = "v1";

pub fn model_to_string(model: &WlnnModel) -> String {
    let mlp = &model.mlp;
    let sizes: Vec<String> = mlp.layer_sizes().iter().map(|s| s.to_string()).collect();
    let mut out = format!("{MAGIC} {VERSION} layers={}\n", sizes.join(","));
    out.push_str(&join17(&model.basis.w_star, " "));
    out.push('\n');
    for v in &model.basis.v {
        out.push_str(&join17(v, " "));
        out.push('\n');
    }
    for s in 0..mlp.n_layers() {
        let fan_in = mlp.layer_sizes()[s];
        for row in mlp.weights(s).chunks(fan_in) {
            out.push_str(&join17(row, " "));
            out.push('\n');
        }
        out.push_str(&join17(mlp.bias(s), " "));
        out.push('\n');
    }
    out
}

pub fn save_model(model: &WlnnModel, path: &Path) -> Result<()> {
    fs::write(path, model_to_string(model))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<WlnnModel> {
    let text = fs::read_to_string(path)?;
    parse_model(&text).map_err(|message| Error::Format { path: path.to_path_buf(), message })
}

pub fn parse_model(text: &str) -> std::result::Result<WlnnModel, String> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or("empty model file")?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(format!("not a model file (header `{header}`)"));
    }
    match parts.next() {
        Some(VERSION) => {}
        other => return Err(format!("unsupported model version {other:?}, expected {VERSION}")),
    }
    let sizes: Vec<usize> = parts
        .next()
        .and_then(|p| p.strip_prefix("layers="))
        .ok_or("missing layers= in header")?
        .split(',')
        .map(|s| s.parse::<usize>().map_err(|e| format!("bad layer size `{s}`: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if sizes.first() != Some(&STENCIL) || sizes.last() != Some(&FREE_PARAMS) {
        return Err(format!("layers must map {STENCIL} inputs to {FREE_PARAMS} outputs, got {sizes:?}"));
    }
    let mut mlp = MlpModel::zeros(&sizes).map_err(|e| e.to_string())?;

    let mut row = |expected: usize| -> std::result::Result<Vec<f64>, String> {
        let (no, line) = lines.next().ok_or("unexpected end of file")?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| format!("line {}: `{t}`: {e}", no + 1)))
            .collect::<std::result::Result<_, _>>()?;
        if vals.len() != expected {
            return Err(format!("line {}: expected {expected} values, found {}", no + 1, vals.len()));
        }
        Ok(vals)
    };

    let mut basis = ConstraintBasis { w_star: [0.0; STENCIL], v: [[0.0; STENCIL]; FREE_PARAMS] };
    basis.w_star.copy_from_slice(&row(STENCIL)?);
    for j in 0..FREE_PARAMS {
        basis.v[j].copy_from_slice(&row(STENCIL)?);
    }
    let (s, m) = constraint_residuals(&basis.w_star);
    if !(s.abs() <= SUM_TOL && m.abs() <= MOMENT_TOL) {
        return Err(format!("w* violates the consistency constraints (sum - 1 = {s:e}, moment = {m:e})"));
    }
    for (j, v) in basis.v.iter().enumerate() {
        let (s, m) = constraint_residuals(v);
        if !((s + 1.0).abs() <= SUM_TOL && m.abs() <= MOMENT_TOL) {
            return Err(format!("basis vector v{} is not in the constraint null space", j + 1));
        }
    }
    for s in 0..mlp.n_layers() {
        let (fan_in, fan_out) = (sizes[s], sizes[s + 1]);
        for r in 0..fan_out {
            let vals = row(fan_in)?;
            mlp.weights_mut(s)[r * fan_in..(r + 1) * fan_in].copy_from_slice(&vals);
        }
        let b = row(fan_out)?;
        mlp.bias_mut(s).copy_from_slice(&b);
    }
    Ok(WlnnModel { mlp, basis })
}
