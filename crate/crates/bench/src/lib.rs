//! Shared fixtures for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wlnn_core::schemes::STENCIL;
use wlnn_core::solver::{init_isentropic_vortex, init_taylor_green, VortexParams, DEFAULT_GAMMA};
use wlnn_core::{EulerState, UniformGrid, WlnnModel};

pub fn random_stencils(n: usize, seed: u64) -> Vec<[f64; STENCIL]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect()
}

/// A network with a non-zero output layer, so every weight is exercised.
pub fn perturbed_model(seed: u64) -> WlnnModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = WlnnModel::init(&mut rng);
    for p in model.mlp.params_mut() {
        *p += 0.01 * rng.gen_range(-1.0..1.0);
    }
    model
}

pub fn vortex(n: usize) -> EulerState {
    let grid = UniformGrid::cube(2, 0.0, 10.0, n).expect("valid grid");
    init_isentropic_vortex(&grid, &VortexParams::TEST, DEFAULT_GAMMA).expect("positive state")
}

pub fn taylor_green(n: usize) -> EulerState {
    let grid = UniformGrid::cube(3, 0.0, 2.0 * std::f64::consts::PI, n).expect("valid grid");
    init_taylor_green(&grid, DEFAULT_GAMMA).expect("positive state")
}
