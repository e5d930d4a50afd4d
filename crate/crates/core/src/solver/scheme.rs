use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::schemes::{ce6_weights, dot6, up5_weights, weno5js_upwind, StencilWeights, STENCIL};
use crate::wlnn::{load_model, Batch, WlnnModel};

const WLNN_CHUNK: usize = 4096;

/// An interface reconstruction rule, applied to upwind-oriented stencils.
#[derive(Clone)]
pub enum Scheme {
    Ce6,
    Up5,
    Weno5Js,
    Wlnn(Arc<WlnnModel>),
}

impl Scheme {
    /// Registry lookup: `ce6`, `up5`, `weno5js` or `wlnn:<model-file>`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "ce6" => Ok(Scheme::Ce6),
            "up5" => Ok(Scheme::Up5),
            "weno5js" => Ok(Scheme::Weno5Js),
            other => match other.strip_prefix("wlnn:") {
                Some(path) if !path.is_empty() => Ok(Scheme::Wlnn(Arc::new(load_model(Path::new(path))?))),
                _ => Err(Error::UnknownScheme(other.to_string())),
            },
        }
    }

    pub fn wlnn(model: WlnnModel) -> Self {
        Scheme::Wlnn(Arc::new(model))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Ce6 => "ce6",
            Scheme::Up5 => "up5",
            Scheme::Weno5Js => "weno5js",
            Scheme::Wlnn(_) => "wlnn",
        }
    }

    pub fn linear_weights(&self) -> Option<StencilWeights> {
        match self {
            Scheme::Ce6 => Some(ce6_weights()),
            Scheme::Up5 => Some(up5_weights()),
            _ => None,
        }
    }

    /// Reconstruct the interface value of each stencil. Stencils are ordered
    /// upwind first: cells `i-2 ..= i+3` for the right-going part and the
    /// mirrored `i+3 ..= i-2` for the left-going part.
    pub fn reconstruct(&self, stencils: &[[f64; STENCIL]], out: &mut [f64]) {
        debug_assert_eq!(stencils.len(), out.len());
        match self {
            Scheme::Ce6 | Scheme::Up5 => {
                let w = *self.linear_weights().unwrap().as_array();
                for (o, f) in out.iter_mut().zip(stencils) {
                    *o = dot6(&w, f);
                }
            }
            Scheme::Weno5Js => {
                for (o, f) in out.iter_mut().zip(stencils) {
                    *o = weno5js_upwind(&[f[0], f[1], f[2], f[3], f[4]]);
                }
            }
            Scheme::Wlnn(model) => {
                let mut batch = Batch::default();
                for (chunk, out_chunk) in stencils.chunks(WLNN_CHUNK).zip(out.chunks_mut(WLNN_CHUNK)) {
                    model.forward_batch(chunk, &mut batch);
                    for (r, (o, f)) in out_chunk.iter_mut().zip(chunk).enumerate() {
                        *o = dot6(&batch.row_weights(r), f);
                    }
                }
            }
        }
    }
}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        assert_eq!(Scheme::parse("ce6").unwrap().name(), "ce6");
        assert_eq!(Scheme::parse("up5").unwrap().name(), "up5");
        assert_eq!(Scheme::parse("weno5js").unwrap().name(), "weno5js");
        assert!(matches!(Scheme::parse("ce4"), Err(Error::UnknownScheme(_))));
        assert!(Scheme::parse("wlnn:").is_err());
        assert!(Scheme::parse("wlnn:/nonexistent/model.txt").is_err());
    }
}
