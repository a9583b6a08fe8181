//! Consistency analysis for AHP pairwise comparison matrices.
//!
//! Besides Saaty's consistency ratio, a matrix is judged by how often the
//! ranking implied by each 3x3 sub-matrix (triad) disagrees with the ranking
//! from the full matrix. Two features of those disagreements, together with
//! the order, feed a logistic model that classifies the matrix.

// `!(x > 0.0)` style guards reject NaN as well; index loops mirror the maths.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bench;
pub mod consistency;
pub mod eigen;
pub mod error;
pub mod evaluate;
pub mod ml;
pub mod pcm;
pub mod registry;
pub mod reversal;
pub mod simulate;

pub use consistency::{consistency_ratio, koczkodaj_index, random_index, CrReport};
pub use eigen::{principal_eigen, PriorityResult};
pub use error::{Category, Error, Result};
pub use evaluate::{evaluate, EvaluationResponse};
pub use ml::{LogitModel, Verdict};
pub use pcm::{Format, Pcm, Rational};
pub use registry::Registry;
pub use reversal::{detect_reversals, reversal_features, ReversalFeatures, ReversalReport};
pub use simulate::{DatasetRow, SimConfig, Source};
