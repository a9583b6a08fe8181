//! Principal eigenvector of a PCM by power iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcm::Pcm;

pub const TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PriorityResult {
    /// Unit Euclidean norm, all components positive.
    pub eigenvector: Vec<f64>,
    pub lambda_max: f64,
    pub iterations: usize,
}

impl PriorityResult {
    /// `e_i / e_j`; independent of the normalization.
    pub fn ratio(&self, i: usize, j: usize) -> f64 {
        self.eigenvector[i] / self.eigenvector[j]
    }
}

pub fn principal_eigen(pcm: &Pcm) -> Result<PriorityResult> {
    power_iteration(&pcm.to_f64(), pcm.order())
}

/// Power iteration on a positive row-major `n x n` matrix.
///
/// Stops when successive unit-norm iterates differ by less than
/// [`TOLERANCE`] in max-norm; `lambda_max` is the Rayleigh quotient of the
/// final iterate.
pub fn power_iteration(matrix: &[f64], n: usize) -> Result<PriorityResult> {
    debug_assert_eq!(matrix.len(), n * n);
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for iteration in 1..=MAX_ITERATIONS {
        mat_vec(matrix, n, &v, &mut next);
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NoConvergence { iterations: iteration });
        }
        next.iter_mut().for_each(|x| *x /= norm);
        let delta = v
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut v, &mut next);
        if delta < TOLERANCE {
            mat_vec(matrix, n, &v, &mut next);
            let lambda_max = v.iter().zip(&next).map(|(a, b)| a * b).sum::<f64>()
                / v.iter().map(|x| x * x).sum::<f64>();
            return Ok(PriorityResult {
                eigenvector: v,
                lambda_max,
                iterations: iteration,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

fn mat_vec(matrix: &[f64], n: usize, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = matrix[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum();
    }
}
