use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "wlnn", version, about = "Learned six-point flux reconstruction: datasets, training, experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a training dataset for one sample family.
    Dataset(DatasetArgs),
    /// Train a network on a dataset.
    Train(TrainArgs),
    /// Run one of the numerical tests with several schemes.
    Run(RunArgs),
    /// Approximate dispersion relation of each scheme.
    Adr(AdrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Scalar1d,
    Scalar3d,
    Euler2d,
    Euler3d,
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Number of sampled parameter sets.
    #[arg(long)]
    pub lambdas: Option<usize>,
    /// Cells per axis of the training grid (coarse grid for Euler families).
    #[arg(long)]
    pub n: Option<usize>,
    /// Snapshot count (scalar) or snapshot intervals after t = 0 (Euler).
    #[arg(long)]
    pub times: Option<usize>,
    /// Last snapshot time.
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    pub cfl: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Defaults to the family's recipe; 0 writes the initial network.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Parameter sets per mini-batch.
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub stop_loss: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub lr0: f64,
    #[arg(long, default_value_t = 0.99)]
    pub decay: f64,
    /// Seeds both the initial network and the mini-batch shuffling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for `model.txt` and `loss.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    #[value(name = "test1_1")]
    Test1_1,
    #[value(name = "test1_2")]
    Test1_2,
    #[value(name = "test1_3")]
    Test1_3,
    #[value(name = "test2_1")]
    Test2_1,
    #[value(name = "test2_2")]
    Test2_2,
    #[value(name = "test3")]
    Test3,
    #[value(name = "test4")]
    Test4,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// `ce6`, `up5`, `weno5js`, `wlnn` (with --model) or `wlnn:<file>`; repeatable.
    #[arg(long = "scheme")]
    pub schemes: Vec<String>,
    /// Model file used by a bare `wlnn` scheme entry.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    #[command(flatten)]
    pub schemes: SchemeArgs,
    /// Cells per axis (test4: the coarse grid).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.4)]
    pub cfl: f64,
    /// Flux coefficient in f = gamma u^2 (scalar tests).
    #[arg(long)]
    pub gamma_flux: Option<f64>,
    /// Solution parameters, comma separated, replacing the test's defaults.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Number of recorded times.
    #[arg(long)]
    pub times: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// test4: euler3d dataset whose last snapshot is the initial state,
    /// instead of a fresh fine-grid solve.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Write the final fields of each scheme as CSV.
    #[arg(long)]
    pub dump: bool,
    /// Accepted for symmetry with the other commands; runs are deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AdrArgs {
    #[command(flatten)]
    pub schemes: SchemeArgs,
    #[arg(long, default_value_t = 1e-2)]
    pub nu: f64,
    #[arg(long)]
    pub out: PathBuf,
}
