//! Ab-initio labelling and the logistic consistency classifier.

pub mod cluster;
pub mod kmeans;
pub mod logit;
pub mod standardize;

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::simulate::{DatasetRow, Source, DATASET_HEADER};

pub use cluster::{cluster_ab_initio, ClusterModel};
pub use logit::{fit_logit, load_model, save_model, LogitFit, LogitModel, ModelSource, Provenance, TrainingExample, Verdict};
pub use standardize::{fit_standardization, StandardizationParams};

pub const DEFAULT_SPLIT: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub row: DatasetRow,
    pub abinit_consistent: bool,
}

impl LabeledRow {
    pub fn example(&self) -> TrainingExample {
        TrainingExample {
            order: self.row.order,
            prop3_rev: self.row.prop3_rev,
            max3_rev: self.row.max3_rev,
            consistent: self.abinit_consistent,
        }
    }
}

pub fn label_rows(rows: &[DatasetRow], labels: &[bool]) -> Vec<LabeledRow> {
    rows.iter()
        .zip(labels)
        .map(|(r, &l)| LabeledRow {
            row: r.clone(),
            abinit_consistent: l,
        })
        .collect()
}

pub fn write_labeled<W: Write>(rows: &[LabeledRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = DATASET_HEADER.to_vec();
    header.push("abinitConsistent");
    w.write_record(&header)?;
    for l in rows {
        let r = &l.row;
        w.write_record([
            r.id.to_string(),
            r.order.to_string(),
            format!("{:.6}", r.prop3_rev),
            format!("{:.6}", r.max3_rev),
            format!("{:.6}", r.cr),
            r.source.as_str().to_string(),
            u8::from(l.abinit_consistent).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dataset CSV. Rows carry a label only when the
/// `abinitConsistent` column is present.
pub fn read_rows<R: Read>(input: R) -> Result<(Vec<DatasetRow>, Option<Vec<bool>>)> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Format(format!("dataset is missing column {name:?}")))
    };
    let cols: Vec<usize> = DATASET_HEADER.iter().map(|h| col(h)).collect::<Result<_>>()?;
    let label_col = headers.iter().position(|h| h == "abinitConsistent");
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).unwrap_or("").trim();
        let bad = |what: &str| Error::Format(format!("record {}: bad {what}", line + 1));
        rows.push(DatasetRow {
            id: field(cols[0]).parse().map_err(|_| bad("id"))?,
            order: field(cols[1]).parse().map_err(|_| bad("order"))?,
            prop3_rev: field(cols[2]).parse().map_err(|_| bad("prop3Rev"))?,
            max3_rev: field(cols[3]).parse().map_err(|_| bad("max3Rev"))?,
            cr: field(cols[4]).parse().map_err(|_| bad("cr"))?,
            source: field(cols[5]).parse::<Source>()?,
        });
        if let Some(c) = label_col {
            labels.push(match field(c) {
                "1" | "true" => true,
                "0" | "false" => false,
                _ => return Err(bad("abinitConsistent")),
            });
        }
    }
    Ok((rows, label_col.map(|_| labels)))
}

/// Seeded shuffle of `0..n` cut at `round(fraction * n)`.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("split fraction {fraction} outside (0, 1)")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (fraction * n as f64).round() as usize;
    let test = idx.split_off(cut);
    Ok((idx, test))
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub fit: LogitFit,
    pub clusters: Option<ClusterModel>,
    pub train: Vec<LabeledRow>,
    pub test: Vec<LabeledRow>,
    /// Held-out agreement between the fitted model and the ab-initio labels.
    pub holdout_accuracy: f64,
}

impl TrainOutcome {
    /// Held-out agreement between this fit and another model.
    pub fn holdout_agreement(&self, other: &LogitModel) -> f64 {
        let m = &self.fit.model;
        let same = self
            .test
            .iter()
            .filter(|l| {
                let r = &l.row;
                m.classify(r.order, r.prop3_rev, r.max3_rev) == other.classify(r.order, r.prop3_rev, r.max3_rev)
            })
            .count();
        same as f64 / self.test.len().max(1) as f64
    }
}

/// Label (unless labels are given) → seeded split → IRLS on the training part.
pub fn train_pipeline(rows: &[DatasetRow], labels: Option<&[bool]>, seed: u64, split: f64) -> Result<TrainOutcome> {
    let (labels, clusters) = match labels {
        Some(l) if l.len() == rows.len() => (l.to_vec(), None),
        Some(_) => return Err(Error::InvalidParameter("label count does not match rows".into())),
        None => {
            let (l, m) = cluster_ab_initio(rows, seed)?;
            (l, Some(m))
        }
    };
    let labeled = label_rows(rows, &labels);
    let (train_idx, test_idx) = split_indices(rows.len(), split, seed)?;
    let train: Vec<LabeledRow> = train_idx.iter().map(|&i| labeled[i].clone()).collect();
    let test: Vec<LabeledRow> = test_idx.iter().map(|&i| labeled[i].clone()).collect();
    let examples: Vec<TrainingExample> = train.iter().map(LabeledRow::example).collect();
    let mut fit = fit_logit(&examples)?;
    fit.model.provenance.seed = Some(seed);
    let model = &fit.model;
    let hits = test
        .iter()
        .filter(|l| model.classify(l.row.order, l.row.prop3_rev, l.row.max3_rev).is_consistent() == l.abinit_consistent)
        .count();
    let holdout_accuracy = hits as f64 / test.len().max(1) as f64;
    Ok(TrainOutcome {
        fit,
        clusters,
        train,
        test,
        holdout_accuracy,
    })
}
