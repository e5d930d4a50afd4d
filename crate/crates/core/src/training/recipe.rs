//! Default dataset recipes for the four sample families.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::{build_dataset_euler, build_dataset_scalar, uniform_times, Dataset};
use super::manufactured::{sample_lambda, Family};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::solver::DEFAULT_GAMMA;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecipe {
    pub family: Family,
    pub n_lambdas: usize,
    /// Cells per axis of the training grid (the coarse grid for Euler).
    pub n: usize,
    /// Fine-to-coarse refinement of the Euler reference solve.
    pub factor: usize,
    pub times: Vec<f64>,
    pub gamma: f64,
    pub cfl: f64,
}

/// `t_end * i / intervals` for `i = 0..=intervals`.
pub fn times_from_zero(t_end: f64, intervals: usize) -> Vec<f64> {
    (0..=intervals).map(|i| t_end * i as f64 / intervals as f64).collect()
}

impl DatasetRecipe {
    pub fn paper(family: Family) -> Self {
        let (n_lambdas, n, factor, times) = match family {
            Family::Scalar1d => (50, 60, 1, uniform_times(1.0, 40)),
            Family::Scalar3d => (10, 40, 1, uniform_times(1.0, 20)),
            Family::Euler2d => (20, 20, 4, times_from_zero(10.0, 20)),
            Family::Euler3d => (1, 32, 4, times_from_zero(0.8, 8)),
        };
        Self { family, n_lambdas, n, factor, times, gamma: DEFAULT_GAMMA, cfl: 0.4 }
    }

    pub fn domain(&self) -> (usize, f64, f64) {
        match self.family {
            Family::Scalar1d => (1, -2.0, 2.0),
            Family::Scalar3d => (3, -2.0, 2.0),
            Family::Euler2d => (2, 0.0, 10.0),
            Family::Euler3d => (3, 0.0, 2.0 * PI),
        }
    }

    /// The grid the training samples live on.
    pub fn grid(&self) -> Result<UniformGrid> {
        let (dim, lo, hi) = self.domain();
        UniformGrid::cube(dim, lo, hi, self.n)
    }

    pub fn fine_grid(&self) -> Result<UniformGrid> {
        let (dim, lo, hi) = self.domain();
        UniformGrid::cube(dim, lo, hi, self.n * self.factor)
    }

    /// Parameter sets drawn with ChaCha8 seeded by `seed`.
    pub fn sample_lambdas(&self, seed: u64) -> Result<Vec<Vec<f64>>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ranges = self.family.default_ranges();
        (0..self.n_lambdas).map(|_| sample_lambda(&mut rng, &ranges)).collect()
    }

    pub fn build(&self, seed: u64) -> Result<Dataset> {
        if self.n_lambdas == 0 || self.times.is_empty() {
            return Err(Error::InvalidArgument("a dataset needs at least one parameter set and one time".into()));
        }
        let lambdas = self.sample_lambdas(seed)?;
        match self.family {
            Family::Scalar1d | Family::Scalar3d => build_dataset_scalar(self.family, &lambdas, &self.grid()?, &self.times),
            Family::Euler2d | Family::Euler3d => {
                build_dataset_euler(self.family, &lambdas, &self.fine_grid()?, self.factor, &self.times, self.gamma, self.cfl)
            }
        }
    }
}
