//! The weight-learning network.

mod adam;
mod basis;
mod io;
mod mlp;

pub use adam::AdamState;
pub use basis::{ConstraintBasis, FREE_PARAMS};
pub use io::{load_model, model_to_string, parse_model, save_model};
pub use mlp::{normalize_stencil, Batch, MlpModel, WlnnModel, DEFAULT_LAYERS};
