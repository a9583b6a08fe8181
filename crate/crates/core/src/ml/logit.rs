//! Binomial logistic regression on `(order, prop3Rev, max3Rev)` fitted by
//! Fisher scoring, plus the pretrained coefficients shipped with the crate.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reversal::ReversalFeatures;

pub const MAX_FISHER_ITERATIONS: usize = 50;
pub const DEVIANCE_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// A deviance below this share of the null deviance, together with a
/// degenerate information matrix or no convergence, is read as separation.
const SEPARATION_FRACTION: f64 = 1e-3;

const BUNDLED_MODEL: &str = include_str!("../../data/paper_model.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Paper,
    Trained,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: ModelSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
}

/// `p(consistent) = logistic(beta0 + betaOrder*order + betaProp3Rev*prop3Rev + betaMax3Rev*max3Rev)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogitModel {
    #[serde(default = "schema_v1")]
    pub schema: u32,
    pub beta0: f64,
    pub beta_order: f64,
    pub beta_prop3_rev: f64,
    pub beta_max3_rev: f64,
    pub threshold: f64,
    pub provenance: Provenance,
}

fn schema_v1() -> u32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

impl Verdict {
    pub fn from_consistent(consistent: bool) -> Self {
        if consistent {
            Verdict::Consistent
        } else {
            Verdict::Inconsistent
        }
    }

    pub fn is_consistent(self) -> bool {
        self == Verdict::Consistent
    }
}

/// Logistic function that neither overflows nor loses the tails.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

impl LogitModel {
    /// Reference coefficients fitted on a large batch of simulated logical PCMs.
    pub fn paper() -> LogitModel {
        LogitModel {
            schema: 1,
            beta0: 5.07370,
            beta_order: 4.32041,
            beta_prop3_rev: -113.39521,
            beta_max3_rev: -5.22824,
            threshold: DEFAULT_THRESHOLD,
            provenance: Provenance {
                source: ModelSource::Paper,
                seed: None,
                rows: None,
            },
        }
    }

    /// The model file shipped in `data/paper_model.json`.
    pub fn bundled() -> LogitModel {
        LogitModel::from_json(BUNDLED_MODEL).expect("bundled model is valid")
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.beta0, self.beta_order, self.beta_prop3_rev, self.beta_max3_rev]
    }

    pub fn score(&self, order: usize, prop3_rev: f64, max3_rev: f64) -> f64 {
        self.beta0 + self.beta_order * order as f64 + self.beta_prop3_rev * prop3_rev + self.beta_max3_rev * max3_rev
    }

    pub fn predict(&self, order: usize, prop3_rev: f64, max3_rev: f64) -> f64 {
        logistic(self.score(order, prop3_rev, max3_rev))
    }

    pub fn predict_features(&self, f: &ReversalFeatures) -> f64 {
        self.predict(f.order, f.prop3_rev, f.max3_rev)
    }

    pub fn classify_probability(&self, p: f64) -> Verdict {
        Verdict::from_consistent(p >= self.threshold)
    }

    pub fn classify(&self, order: usize, prop3_rev: f64, max3_rev: f64) -> Verdict {
        self.classify_probability(self.predict(order, prop3_rev, max3_rev))
    }

    pub fn validate(&self) -> Result<()> {
        if self.coefficients().iter().any(|c| !c.is_finite()) {
            return Err(Error::Format("model coefficients must be finite".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Format(format!("threshold {} outside (0, 1)", self.threshold)));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<LogitModel> {
        let model: LogitModel = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    /// Pretty JSON. Floats use the shortest representation that parses back
    /// to the identical bits.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

pub fn save_model(model: &LogitModel, path: &Path) -> Result<()> {
    std::fs::write(path, model.to_json() + "\n")?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LogitModel> {
    LogitModel::from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrlsFit {
    pub beta: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub deviance: f64,
    pub null_deviance: f64,
    pub iterations: usize,
}

fn deviance(x: &DMatrix<f64>, y: &[f64], beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    2.0 * eta
        .iter()
        .zip(y)
        .map(|(&e, &yi)| yi * softplus(-e) + (1.0 - yi) * softplus(e))
        .sum::<f64>()
}

/// Fisher scoring for the canonical logit link.
///
/// Starts from zero and stops once the deviance changes by less than
/// [`DEVIANCE_TOLERANCE`]. A vanishing deviance means the classes are
/// linearly separable and is reported as [`Error::PerfectSeparation`].
pub fn irls(x: &DMatrix<f64>, y: &[f64]) -> Result<IrlsFit> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::InvalidParameter("response length does not match design rows".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite design or response".into()));
    }
    let positives = y.iter().filter(|&&v| v == 1.0).count();
    if y.iter().any(|&v| v != 0.0 && v != 1.0) || positives == 0 || positives == n {
        return Err(Error::Fit("response must be binary with both classes present".into()));
    }

    let ybar = positives as f64 / n as f64;
    let null_deviance = -2.0 * n as f64 * (ybar * ybar.ln() + (1.0 - ybar) * (1.0 - ybar).ln());
    let mut beta = DVector::<f64>::zeros(k);
    let mut dev = deviance(x, y, &beta);
    let yv = DVector::from_column_slice(y);

    for iteration in 1..=MAX_FISHER_ITERATIONS {
        let eta = x * &beta;
        let p = eta.map(logistic);
        let w = p.map(|pi| pi * (1.0 - pi));
        let mut info = DMatrix::<f64>::zeros(k, k);
        for (r, &wr) in w.iter().enumerate() {
            let row = x.row(r);
            info += wr * row.transpose() * row;
        }
        let score = x.transpose() * (&yv - &p);
        let Some(chol) = info.clone().cholesky() else {
            // saturated fitted probabilities zero out the weights
            if dev < 1e-6 || dev < SEPARATION_FRACTION * null_deviance {
                return Err(Error::PerfectSeparation {
                    iterations: iteration,
                    norm: beta.norm(),
                });
            }
            return Err(Error::Fit("singular information matrix".into()));
        };
        beta += chol.solve(&score);
        let next = deviance(x, y, &beta);
        let change = (dev - next).abs();
        dev = next;
        if change < DEVIANCE_TOLERANCE {
            if dev < 1e-6 {
                return Err(Error::PerfectSeparation {
                    iterations: iteration,
                    norm: beta.norm(),
                });
            }
            let std_errors = standard_errors(x, &beta)?;
            return Ok(IrlsFit {
                beta: beta.iter().copied().collect(),
                std_errors,
                deviance: dev,
                null_deviance,
                iterations: iteration,
            });
        }
    }
    if dev < 1e-6 || dev < SEPARATION_FRACTION * null_deviance {
        return Err(Error::PerfectSeparation {
            iterations: MAX_FISHER_ITERATIONS,
            norm: beta.norm(),
        });
    }
    Err(Error::Fit(format!(
        "no convergence within {MAX_FISHER_ITERATIONS} Fisher scoring iterations"
    )))
}

fn standard_errors(x: &DMatrix<f64>, beta: &DVector<f64>) -> Result<Vec<f64>> {
    let k = x.ncols();
    let p = (x * beta).map(logistic);
    let mut info = DMatrix::<f64>::zeros(k, k);
    for (r, pi) in p.iter().enumerate() {
        let row = x.row(r);
        info += pi * (1.0 - pi) * row.transpose() * row;
    }
    let inv = info
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular information matrix at the optimum".into()))?;
    Ok((0..k).map(|i| inv[(i, i)].max(0.0).sqrt()).collect())
}

/// Input for [`fit_logit`]: features plus the ab-initio label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingExample {
    pub order: usize,
    pub prop3_rev: f64,
    pub max3_rev: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogitFit {
    pub model: LogitModel,
    pub std_errors: [f64; 4],
    pub deviance: f64,
    pub null_deviance: f64,
    pub iterations: usize,
}

/// Fit on raw (unstandardized) features with an intercept.
pub fn fit_logit(examples: &[TrainingExample]) -> Result<LogitFit> {
    let x = DMatrix::from_fn(examples.len(), 4, |r, c| match c {
        0 => 1.0,
        1 => examples[r].order as f64,
        2 => examples[r].prop3_rev,
        _ => examples[r].max3_rev,
    });
    let y: Vec<f64> = examples.iter().map(|e| f64::from(u8::from(e.consistent))).collect();
    let fit = irls(&x, &y)?;
    Ok(LogitFit {
        model: LogitModel {
            schema: 1,
            beta0: fit.beta[0],
            beta_order: fit.beta[1],
            beta_prop3_rev: fit.beta[2],
            beta_max3_rev: fit.beta[3],
            threshold: DEFAULT_THRESHOLD,
            provenance: Provenance {
                source: ModelSource::Trained,
                seed: None,
                rows: Some(examples.len()),
            },
        },
        std_errors: [fit.std_errors[0], fit.std_errors[1], fit.std_errors[2], fit.std_errors[3]],
        deviance: fit.deviance,
        null_deviance: fit.null_deviance,
        iterations: fit.iterations,
    })
}
