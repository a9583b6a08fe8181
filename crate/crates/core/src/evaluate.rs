//! One-shot analysis of a single PCM, shared by the CLI and the HTTP API.

use serde::{Deserialize, Serialize};

use crate::consistency::{cr_report, koczkodaj_index, random_index};
use crate::eigen::principal_eigen;
use crate::error::Result;
use crate::ml::{LogitModel, Provenance};
use crate::pcm::Pcm;
use crate::reversal::{detect_reversals_with, ReversalReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluationResponse {
    pub schema: u32,
    pub version: String,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub eigenvector: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub cr_threshold: f64,
    pub cr_consistent: bool,
    pub koczkodaj: f64,
    pub reversal_report: ReversalReport,
    pub probability_consistent: f64,
    pub pr_consistent: bool,
    pub model_provenance: Provenance,
}

pub fn evaluate(pcm: &Pcm, model: &LogitModel) -> Result<EvaluationResponse> {
    let n = pcm.order();
    let full = principal_eigen(pcm)?;
    let cr = cr_report(full.lambda_max, n, random_index(n)?);
    let reversal_report = detect_reversals_with(pcm, &full)?;
    let p = model.predict(n, reversal_report.prop3_rev, reversal_report.max3_rev);
    Ok(EvaluationResponse {
        schema: 1,
        version: VERSION.to_string(),
        order: n,
        labels: pcm.labels().map(<[String]>::to_vec),
        eigenvector: full.eigenvector,
        lambda_max: full.lambda_max,
        ci: cr.ci,
        ri: cr.ri,
        cr: cr.cr,
        cr_threshold: cr.threshold,
        cr_consistent: cr.cr_consistent,
        koczkodaj: koczkodaj_index(pcm),
        reversal_report,
        probability_consistent: p,
        pr_consistent: model.classify_probability(p).is_consistent(),
        model_provenance: model.provenance.clone(),
    })
}
