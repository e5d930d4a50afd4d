use crate::schemes::{ce6_weights, MOMENT_COEFFS, STENCIL};

pub const FREE_PARAMS: usize = 4;

/// Feasible point plus an orthonormal basis of the null space of the two
/// consistency constraints. Any `w* + sum s_j v_j` is a consistent weight set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintBasis {
    pub w_star: [f64; STENCIL],
    pub v: [[f64; STENCIL]; FREE_PARAMS],
}

impl ConstraintBasis {
    /// CE6 as the feasible point; null space from Gram-Schmidt on the
    /// projected unit vectors `P e_1 .. P e_6`, with
    /// `P = I - 11^T / 6 - c c^T / 70` (`c` the moment coefficients).
    pub fn build() -> Self {
        let project = |x: &mut [f64; STENCIL]| {
            let s: f64 = x.iter().sum::<f64>() / 6.0;
            let m: f64 = x.iter().zip(MOMENT_COEFFS).map(|(a, c)| a * c).sum::<f64>() / 70.0;
            for l in 0..STENCIL {
                x[l] -= s + m * MOMENT_COEFFS[l];
            }
        };

        let mut basis: Vec<[f64; STENCIL]> = Vec::with_capacity(FREE_PARAMS);
        for e in 0..STENCIL {
            if basis.len() == FREE_PARAMS {
                break;
            }
            let mut x = [0.0; STENCIL];
            x[e] = 1.0;
            project(&mut x);
            // Two passes of modified Gram-Schmidt.
            for _ in 0..2 {
                for b in &basis {
                    let d: f64 = x.iter().zip(b).map(|(p, q)| p * q).sum();
                    for l in 0..STENCIL {
                        x[l] -= d * b[l];
                    }
                }
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= norm);
            project(&mut x);
            basis.push(x);
        }

        Self {
            w_star: *ce6_weights().as_array(),
            v: [basis[0], basis[1], basis[2], basis[3]],
        }
    }

    /// `w* + sum_j s_j v_j`.
    pub fn combine(&self, s: &[f64]) -> [f64; STENCIL] {
        let mut w = self.w_star;
        for (j, &sj) in s.iter().enumerate().take(FREE_PARAMS) {
            for l in 0..STENCIL {
                w[l] += sj * self.v[j][l];
            }
        }
        w
    }

    /// Basis rows flattened as a 4x6 row-major matrix.
    pub(crate) fn v_flat(&self) -> [f64; FREE_PARAMS * STENCIL] {
        let mut out = [0.0; FREE_PARAMS * STENCIL];
        for j in 0..FREE_PARAMS {
            out[j * STENCIL..(j + 1) * STENCIL].copy_from_slice(&self.v[j]);
        }
        out
    }
}

impl Default for ConstraintBasis {
    fn default() -> Self {
        Self::build()
    }
}
