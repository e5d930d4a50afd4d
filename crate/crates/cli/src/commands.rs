use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wlnn_core::adr::{adr_numeric, adr_phis};
use wlnn_core::experiments::{run_euler, taylor_green_series, ErrorSeries, ScalarExperiment, VortexExperiment};
use wlnn_core::format::{fmt17, join17};
use wlnn_core::grid::{block_average, write_fields_csv};
use wlnn_core::solver::{init_taylor_green, ScalarFlux, VortexParams, DEFAULT_GAMMA};
use wlnn_core::training::{
    load_dataset, residual_units, save_dataset, times_from_zero, train_with, uniform_times, DatasetRecipe, Family,
    TrainConfig, TrainReport,
};
use wlnn_core::wlnn::save_model;
use wlnn_core::{Error, EulerState, Scheme, UniformGrid, WlnnModel};

use crate::args::{AdrArgs, DatasetArgs, Experiment, FamilyArg, RunArgs, SchemeArgs, TrainArgs};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            _ if e.is_numerical() => 3,
            Error::Io(_) => 1,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn family(arg: FamilyArg) -> Family {
    match arg {
        FamilyArg::Scalar1d => Family::Scalar1d,
        FamilyArg::Scalar3d => Family::Scalar3d,
        FamilyArg::Euler2d => Family::Euler2d,
        FamilyArg::Euler3d => Family::Euler3d,
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| CliError::from(e).with_path(path))
}

impl CliError {
    fn with_path(mut self, path: &Path) -> Self {
        self.message = format!("{}: {}", path.display(), self.message);
        self
    }
}

fn ensure_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| CliError::from(e).with_path(dir))
}

pub fn dataset(a: &DatasetArgs) -> CliResult {
    let fam = family(a.family);
    let mut recipe = DatasetRecipe::paper(fam);
    if let Some(n) = a.lambdas {
        recipe.n_lambdas = n;
    }
    if let Some(n) = a.n {
        recipe.n = n;
    }
    recipe.cfl = a.cfl;
    if a.times.is_some() || a.t_end.is_some() {
        let last = recipe.times.last().copied().unwrap_or(1.0);
        let t_end = a.t_end.unwrap_or(last);
        recipe.times = match fam {
            Family::Scalar1d | Family::Scalar3d => uniform_times(t_end, a.times.unwrap_or(recipe.times.len())),
            Family::Euler2d | Family::Euler3d => times_from_zero(t_end, a.times.unwrap_or(recipe.times.len() - 1)),
        };
    }
    if recipe.n == 0 || recipe.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(CliError::config("grid size and snapshot times must be positive"));
    }
    let ds = recipe.build(a.seed)?;
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    save_dataset(&ds, &a.out)?;
    eprintln!(
        "wrote {}: {} samples, {} parameter sets, grid {:?}",
        a.out.display(),
        ds.samples.len(),
        ds.lambdas.len(),
        ds.grid.n_cells()
    );
    Ok(())
}

pub fn train(a: &TrainArgs) -> CliResult {
    let ds = load_dataset(&a.dataset)?;
    let mut config = TrainConfig::for_family(ds.family);
    if let Some(e) = a.epochs {
        config.epochs = e;
    }
    if let Some(s) = a.batch_size {
        config.batch_size = s;
    }
    if let Some(l) = a.stop_loss {
        config.stop_loss = l;
    }
    config.lr0 = a.lr0;
    config.decay = a.decay;
    config.seed = a.seed;
    ensure_dir(&a.out)?;
    let model_path = a.out.join("model.txt");
    let mut model = WlnnModel::init(&mut ChaCha8Rng::seed_from_u64(a.seed));
    if config.epochs == 0 {
        save_model(&model, &model_path)?;
        write_file(&a.out.join("loss.csv"), &TrainReport { history: vec![], reached_stop_loss: false }.to_csv())?;
        eprintln!("epochs = 0: wrote the initial network to {}", model_path.display());
        return Ok(());
    }
    config.validate().map_err(CliError::from)?;
    let units = residual_units(&ds)?;
    let result = train_with(&config, &units, &mut model, |r| {
        if r.epoch % 50 == 0 || r.epoch + 1 == config.epochs {
            eprintln!("epoch {:>5}  loss {:.6e}  lr {:.3e}", r.epoch, r.loss, r.lr);
        }
    });
    // On divergence the model holds the last good parameters; keep them.
    save_model(&model, &model_path)?;
    let report = result?;
    write_file(&a.out.join("loss.csv"), &report.to_csv())?;
    let last = report.history.last().expect("at least one epoch");
    eprintln!(
        "trained {} epochs, final loss {:.6e}{}; wrote {}",
        report.history.len(),
        last.loss,
        if report.reached_stop_loss { " (stop loss reached)" } else { "" },
        model_path.display()
    );
    Ok(())
}

/// Schemes named on the command line, each once.
fn resolve_schemes(s: &SchemeArgs, defaults: &[&str]) -> CliResult<Vec<Scheme>> {
    let mut names: Vec<String> = s.schemes.clone();
    if names.is_empty() {
        names = defaults.iter().map(|d| d.to_string()).collect();
        if s.model.is_some() {
            names.push("wlnn".into());
        }
    }
    let mut out: Vec<Scheme> = Vec::new();
    for name in names {
        let scheme = if name == "wlnn" {
            let model = s.model.as_ref().ok_or_else(|| CliError::config("scheme `wlnn` needs --model <file>"))?;
            Scheme::parse(&format!("wlnn:{}", model.display()))?
        } else {
            Scheme::parse(&name)?
        };
        if out.iter().any(|o| o.name() == scheme.name()) {
            return Err(CliError::config(format!("scheme `{}` listed twice", scheme.name())));
        }
        out.push(scheme);
    }
    Ok(out)
}

struct Outcome {
    scheme: &'static str,
    result: Result<ErrorSeries, Error>,
}

fn write_error_outputs(dir: &Path, outcomes: &[Outcome]) -> CliResult {
    let mut summary = String::from("scheme,mean_l2,status\n");
    for o in outcomes {
        match &o.result {
            Ok(series) => {
                let mut csv = String::from("t,l2_error\n");
                for (t, e) in series.times.iter().zip(&series.errors) {
                    csv.push_str(&join17(&[*t, *e], ","));
                    csv.push('\n');
                }
                write_file(&dir.join(format!("errors_{}.csv", o.scheme)), &csv)?;
                summary.push_str(&format!("{},{},ok\n", o.scheme, fmt17(series.mean())));
                println!("{:<8} mean L2 {:.4e}", o.scheme, series.mean());
            }
            Err(e) => {
                summary.push_str(&format!("{},nan,\"failed: {}\"\n", o.scheme, e.to_string().replace('"', "'")));
                println!("{:<8} failed: {e}", o.scheme);
            }
        }
    }
    write_file(&dir.join("summary.csv"), &summary)
}

fn failures(outcomes: &[Outcome]) -> CliResult {
    let failed: Vec<&str> = outcomes.iter().filter(|o| o.result.is_err()).map(|o| o.scheme).collect();
    if failed.is_empty() {
        Ok(())
    } else if outcomes.iter().all(|o| o.result.as_ref().err().map_or(true, |e| e.is_numerical())) {
        Err(CliError::numerical(format!("numerical failure for: {}", failed.join(", "))))
    } else {
        let first = outcomes.iter().find_map(|o| o.result.as_ref().err()).expect("a failure");
        Err(CliError::config(first.to_string()))
    }
}

fn dump_fields(path: &Path, grid: &UniformGrid, columns: &[&[f64]]) -> CliResult {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::from(e).with_path(path))?);
    write_fields_csv(&mut w, grid, columns)?;
    w.flush()?;
    Ok(())
}

pub fn run(a: &RunArgs) -> CliResult {
    let schemes = resolve_schemes(&a.schemes, &["ce6", "up5"])?;
    if !(a.cfl > 0.0 && a.cfl <= 1.0) {
        return Err(CliError::config(format!("cfl must lie in (0, 1], got {}", a.cfl)));
    }
    ensure_dir(&a.out)?;
    match a.experiment {
        Experiment::Test3 => run_vortex(a, &schemes),
        Experiment::Test4 => run_taylor_green(a, &schemes),
        _ => run_scalar(a, &schemes),
    }
}

fn run_scalar(a: &RunArgs, schemes: &[Scheme]) -> CliResult {
    let (lambda, n, times, gamma): (Vec<f64>, usize, usize, f64) = match a.experiment {
        Experiment::Test1_1 => (vec![0.75, 0.25, 0.25], 60, 40, 1.0),
        Experiment::Test1_2 => (vec![1.1, 0.7, 0.18], 60, 40, 1.0),
        Experiment::Test1_3 => (vec![0.75, 0.25, 0.25], 60, 40, 5.0),
        Experiment::Test2_1 => (vec![0.75, 0.25, 0.25, 0.25, 0.25], 40, 20, 1.0),
        Experiment::Test2_2 => (vec![1.1, 0.6, 0.6, 0.6, 0.32], 40, 20, 1.0),
        Experiment::Test3 | Experiment::Test4 => unreachable!("not a scalar test"),
    };
    let lambda = a.lambda.clone().unwrap_or(lambda);
    let n = a.n.unwrap_or(n);
    let mut e = match *lambda.as_slice() {
        [amp, k, sigma] if lambda.len() == 3 && matches!(a.experiment, Experiment::Test1_1 | Experiment::Test1_2 | Experiment::Test1_3) => {
            ScalarExperiment::one_d(amp, k, sigma, 1.0, n)?
        }
        [amp, k1, k2, k3, sigma] if matches!(a.experiment, Experiment::Test2_1 | Experiment::Test2_2) => {
            ScalarExperiment::three_d(amp, [k1, k2, k3], sigma, n, times)?
        }
        _ => return Err(CliError::config(format!("wrong number of --lambda values ({}) for this test", lambda.len()))),
    };
    e.exact.flux = ScalarFlux::Quadratic { gamma: a.gamma_flux.unwrap_or(gamma) };
    e.n_times = a.times.unwrap_or(times);
    e.t_end = a.t_end.unwrap_or(1.0);
    e.cfl = a.cfl;
    if e.n_times == 0 || !(e.t_end > 0.0) {
        return Err(CliError::config("need at least one recorded time and a positive horizon"));
    }
    let mut outcomes = Vec::new();
    for scheme in schemes {
        let mut last: Vec<f64> = Vec::new();
        let result = e.run_with(scheme, |_, u| {
            if a.dump {
                last = u.to_vec();
            }
            Ok(())
        });
        if a.dump && result.is_ok() {
            dump_fields(&a.out.join(format!("final_{}.csv", scheme.name())), &e.grid, &[&last])?;
        }
        outcomes.push(Outcome { scheme: scheme.name(), result });
    }
    write_error_outputs(&a.out, &outcomes)?;
    failures(&outcomes)
}

fn run_vortex(a: &RunArgs, schemes: &[Scheme]) -> CliResult {
    let n = a.n.unwrap_or(20);
    let mut e = VortexExperiment::new(n, a.t_end.unwrap_or(10.0), a.times.unwrap_or(20))?;
    e.cfl = a.cfl;
    if let Some(l) = &a.lambda {
        match *l.as_slice() {
            [x_vc, y_vc, u0, v0, beta] => e.params = VortexParams { x_vc, y_vc, u0, v0, beta },
            _ => return Err(CliError::config("test3 takes five --lambda values: x_vc,y_vc,u0,v0,beta")),
        }
    }
    if a.gamma_flux.is_some() {
        return Err(CliError::config("--gamma-flux applies to the scalar tests only"));
    }
    let mut outcomes = Vec::new();
    for scheme in schemes {
        let mut last: Option<EulerState> = None;
        let result = e.run_with(scheme, |_, s| {
            if a.dump {
                last = Some(s.clone());
            }
            Ok(())
        });
        if let Some(s) = last.filter(|_| result.is_ok()) {
            dump_state(&a.out.join(format!("final_{}.csv", scheme.name())), &s)?;
        }
        outcomes.push(Outcome { scheme: scheme.name(), result });
    }
    write_error_outputs(&a.out, &outcomes)?;
    failures(&outcomes)
}

fn dump_state(path: &Path, s: &EulerState) -> CliResult {
    let cols: Vec<&[f64]> = (0..s.n_components()).map(|m| s.component(m)).collect();
    dump_fields(path, s.grid(), &cols)
}

const TG_START: f64 = 0.8;
const TG_SAMPLE_DT: f64 = 0.1;

/// Coarse Taylor-Green state at `t = 0.8`: the last snapshot of a dataset,
/// or a fresh fine-grid WENO5-JS solve block-averaged by 4.
fn taylor_green_initial(a: &RunArgs) -> CliResult<(EulerState, f64)> {
    if let Some(path) = &a.dataset {
        let ds = load_dataset(path)?;
        if ds.family != Family::Euler3d {
            return Err(CliError::config(format!("{} is not an euler3d dataset", path.display())));
        }
        let s = ds
            .samples
            .iter()
            .max_by(|x, y| x.t.total_cmp(&y.t))
            .ok_or_else(|| CliError::config("dataset has no samples"))?;
        return Ok((EulerState::new(ds.grid.clone(), ds.gamma, s.snapshot.clone())?, s.t));
    }
    let n = a.n.unwrap_or(32);
    let factor = 4;
    let fine = UniformGrid::cube(3, 0.0, 2.0 * std::f64::consts::PI, n * factor)?;
    eprintln!("reference WENO5-JS solve on {}^3 to t = {TG_START}", n * factor);
    let s0 = init_taylor_green(&fine, DEFAULT_GAMMA)?;
    let end = run_euler(&s0, &Scheme::Weno5Js, 0.0, TG_START, &[TG_START], a.cfl, |_, _| Ok(()))?;
    let mut data = Vec::new();
    let mut coarse = fine.clone();
    for m in 0..end.n_components() {
        let (g, v) = block_average(&fine, end.component(m), factor)?;
        coarse = g;
        data.extend(v);
    }
    Ok((EulerState::new(coarse, DEFAULT_GAMMA, data)?, TG_START))
}

fn run_taylor_green(a: &RunArgs, schemes: &[Scheme]) -> CliResult {
    if a.gamma_flux.is_some() || a.lambda.is_some() {
        return Err(CliError::config("test4 takes neither --gamma-flux nor --lambda"));
    }
    let (initial, t0) = taylor_green_initial(a)?;
    let t_end = a.t_end.unwrap_or(4.0);
    if !(t_end > t0) {
        return Err(CliError::config(format!("--t-end must exceed the start time {t0}")));
    }
    let intervals = a.times.unwrap_or(((t_end - t0) / TG_SAMPLE_DT).round().max(1.0) as usize);
    let times: Vec<f64> = (0..=intervals).map(|i| t0 + (t_end - t0) * i as f64 / intervals as f64).collect();
    let mut summary = String::from("scheme,wall_seconds,failed_at,total_drift,kinetic_end,enstrophy_end\n");
    for scheme in schemes {
        let d = taylor_green_series(&initial, scheme, t0, t_end, &times, a.cfl)?;
        write_file(&a.out.join(format!("diagnostics_{}.csv", scheme.name())), &d.to_csv())?;
        let k = d.kinetic.last().copied().unwrap_or(f64::NAN);
        let o = d.enstrophy.last().copied().unwrap_or(f64::NAN);
        let failed = d.failed_at.map(fmt17).unwrap_or_default();
        summary.push_str(&format!(
            "{},{:.3},{},{},{},{}\n",
            scheme.name(),
            d.wall_seconds,
            failed,
            fmt17(d.total_drift),
            fmt17(k),
            fmt17(o)
        ));
        println!(
            "{:<8} {:>8.2}s  K(end)/K0 {:.6}  drift {:.2e}{}",
            scheme.name(),
            d.wall_seconds,
            k / d.kinetic.first().copied().unwrap_or(f64::NAN),
            d.total_drift,
            d.failed_at.map(|t| format!("  broke down after t = {t:.2}")).unwrap_or_default()
        );
    }
    write_file(&a.out.join("summary.csv"), &summary)
}

pub fn adr(a: &AdrArgs) -> CliResult {
    if a.schemes.schemes.is_empty() {
        return Err(CliError::config("adr needs at least one --scheme"));
    }
    let schemes = resolve_schemes(&a.schemes, &[])?;
    ensure_dir(&a.out)?;
    let phis = adr_phis();
    for scheme in &schemes {
        let r = adr_numeric(scheme, &phis, a.nu)?;
        let path: PathBuf = a.out.join(format!("adr_{}.csv", scheme.name()));
        write_file(&path, &r.to_csv())?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
