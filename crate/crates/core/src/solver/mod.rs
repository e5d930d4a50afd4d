//! Conservative finite-difference right-hand sides, time stepping and
//! physics diagnostics.

pub mod assembly;
pub mod euler;
pub mod scalar;
pub mod scheme;
pub mod time;

pub use assembly::{gather_euler, gather_scalar, FluxProblem};
pub use euler::{
    enstrophy, init_isentropic_vortex, init_taylor_green, isentropic_vortex_at, kinetic_energy, rhs_euler,
    EulerState, VortexParams, DEFAULT_GAMMA,
};
pub use scalar::{max_wave_speed_scalar, rhs_scalar, rhs_scalar_values, ExactSolution, ScalarFlux, ScalarProblem};
pub use scheme::Scheme;
pub use time::{advance, tvd_rk3_step, Advanced, Stepping};
