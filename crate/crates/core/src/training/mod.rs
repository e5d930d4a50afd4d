//! Training data and the residual-matching training loop.

mod dataset;
mod manufactured;
mod recipe;
mod train;

pub use dataset::{
    build_dataset_euler, build_dataset_scalar, dataset_to_string, load_dataset, parse_dataset, save_dataset,
    uniform_times, Dataset, TrainingSample,
};
pub use manufactured::{
    gaussian_from_lambda, manufactured_eval, sample_lambda, vortex_from_lambda, Family, Gaussian, Interval,
    Manufactured, ManufacturedSolution1D, ManufacturedSolution3D,
};
pub use recipe::{times_from_zero, DatasetRecipe};
pub use train::{
    loss_and_gradient, loss_residual, residual_units, train, train_with, EpochRecord, ResidualUnit, TrainConfig,
    TrainReport,
};
