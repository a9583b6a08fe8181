//! Benchmark experiments: ab-initio calibration, classifier comparison
//! against ab-initio labels, and scatter data for logical vs coerced PCMs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ml::cluster::cluster_ab_initio;
use crate::registry::{CoercedGenerator, Evidence, LogicalGenerator, PcmGenerator, Registry};
use crate::simulate::{generate_batch, DatasetRow, SimConfig};

/// Binary confusion counts where "positive" means inconsistent.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConfusionMetrics {
    /// Inconsistent, classified inconsistent.
    pub tp: usize,
    /// Consistent, classified consistent.
    pub tn: usize,
    /// Consistent, classified inconsistent.
    pub fp: usize,
    /// Inconsistent, classified consistent.
    #[serde(rename = "fn")]
    pub fn_: usize,
    /// `None` when the corresponding denominator is empty.
    pub accuracy: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl ConfusionMetrics {
    pub fn from_counts(tp: usize, tn: usize, fp: usize, fn_: usize) -> Self {
        ConfusionMetrics {
            tp,
            tn,
            fp,
            fn_,
            accuracy: ratio(tp + tn, tp + tn + fp + fn_),
            sensitivity: ratio(tp, tp + fn_),
            specificity: ratio(tn, tn + fp),
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn merge(&self, other: &ConfusionMetrics) -> ConfusionMetrics {
        ConfusionMetrics::from_counts(
            self.tp + other.tp,
            self.tn + other.tn,
            self.fp + other.fp,
            self.fn_ + other.fn_,
        )
    }
}

/// Compare predicted against reference labels (`true` = consistent).
pub fn confusion(truth: &[bool], predicted: &[bool]) -> Result<ConfusionMetrics> {
    if truth.len() != predicted.len() {
        return Err(Error::InvalidParameter(format!(
            "label sequences differ in length: {} vs {}",
            truth.len(),
            predicted.len()
        )));
    }
    let (mut tp, mut tn, mut fp, mut fn_) = (0, 0, 0, 0);
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (false, false) => tp += 1,
            (true, true) => tn += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
        }
    }
    Ok(ConfusionMetrics::from_counts(tp, tn, fp, fn_))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Calibration {
    pub seed: u64,
    pub count_per_order: usize,
    /// Ab-initio consistent share per order, in `[0, 1]`.
    pub consistent_fraction: BTreeMap<usize, f64>,
    pub overall: f64,
}

/// Fresh logical batch, features, order-wise clustering.
pub fn run_calibration(config: &SimConfig) -> Result<Calibration> {
    let rows = generate_batch(config, &LogicalGenerator)?;
    let (labels, _) = cluster_ab_initio(&rows, config.seed)?;
    let mut per_order: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (r, &l) in rows.iter().zip(&labels) {
        let e = per_order.entry(r.order).or_default();
        e.0 += usize::from(l);
        e.1 += 1;
    }
    let consistent = labels.iter().filter(|&&l| l).count();
    Ok(Calibration {
        seed: config.seed,
        count_per_order: config.count_per_order,
        consistent_fraction: per_order
            .into_iter()
            .map(|(o, (c, n))| (o, c as f64 / n as f64))
            .collect(),
        overall: consistent as f64 / labels.len() as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodSummary {
    pub consistent_pct: f64,
    pub metrics: ConfusionMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderSummary {
    pub count: usize,
    pub ab_initio_consistent_pct: f64,
    /// Keyed by classifier name (`cr`, `pr`).
    pub methods: BTreeMap<String, MethodSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BenchmarkReport {
    pub schema: u32,
    pub seed: u64,
    pub count_per_order: usize,
    pub orders: BTreeMap<usize, OrderSummary>,
    /// Sample-weighted aggregate over all orders.
    pub overall: OrderSummary,
}

impl BenchmarkReport {
    pub fn method(&self, order: usize, name: &str) -> Option<&MethodSummary> {
        self.orders.get(&order)?.methods.get(name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let names: Vec<&String> = self.overall.methods.keys().collect();
        let mut out = String::new();
        let _ = write!(out, "{:>7} {:>6} {:>9}", "order", "n", "abinit%");
        for n in &names {
            let u = n.to_uppercase();
            let _ = write!(out, " {:>8} {:>8} {:>8} {:>8}", format!("{u}%"), format!("{u}-acc"), format!("{u}-sens"), format!("{u}-spec"));
        }
        out.push('\n');
        let fmt_rate = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.4}"));
        let mut line = |label: String, s: &OrderSummary| {
            let _ = write!(out, "{label:>7} {:>6} {:>9.2}", s.count, s.ab_initio_consistent_pct);
            for n in &names {
                let m = &s.methods[*n];
                let _ = write!(
                    out,
                    " {:>8.2} {:>8} {:>8} {:>8}",
                    m.consistent_pct,
                    fmt_rate(m.metrics.accuracy),
                    fmt_rate(m.metrics.sensitivity),
                    fmt_rate(m.metrics.specificity)
                );
            }
            out.push('\n');
        };
        for (order, s) in &self.orders {
            line(order.to_string(), s);
        }
        line("all".to_string(), &self.overall);
        out
    }
}

fn summarize(truth: &[bool], predictions: &BTreeMap<String, Vec<bool>>, idx: &[usize]) -> Result<OrderSummary> {
    let t: Vec<bool> = idx.iter().map(|&i| truth[i]).collect();
    let pct = |v: &[bool]| 100.0 * v.iter().filter(|&&x| x).count() as f64 / v.len().max(1) as f64;
    let mut methods = BTreeMap::new();
    for (name, pred) in predictions {
        let p: Vec<bool> = idx.iter().map(|&i| pred[i]).collect();
        methods.insert(
            name.clone(),
            MethodSummary {
                consistent_pct: pct(&p),
                metrics: confusion(&t, &p)?,
            },
        );
    }
    Ok(OrderSummary {
        count: idx.len(),
        ab_initio_consistent_pct: pct(&t),
        methods,
    })
}

/// Fresh logical batch; ab-initio labels by clustering; every named
/// classifier is scored against them.
pub fn run_comparison(config: &SimConfig, registry: &Registry, methods: &[&str]) -> Result<BenchmarkReport> {
    let classifiers = methods
        .iter()
        .map(|m| registry.classifier(m))
        .collect::<Result<Vec<_>>>()?;
    let rows = generate_batch(config, &LogicalGenerator)?;
    let (truth, _) = cluster_ab_initio(&rows, config.seed)?;
    let evidence: Vec<Evidence> = rows.iter().map(evidence_of).collect();
    let predictions: BTreeMap<String, Vec<bool>> = classifiers
        .iter()
        .map(|c| {
            (
                c.name().to_string(),
                evidence.iter().map(|e| c.assess(e).verdict.is_consistent()).collect(),
            )
        })
        .collect();

    let mut orders = BTreeMap::new();
    for (order, idx) in crate::ml::standardize::group_by_order(&rows) {
        orders.insert(order, summarize(&truth, &predictions, &idx)?);
    }
    let all: Vec<usize> = (0..rows.len()).collect();
    let overall = summarize(&truth, &predictions, &all)?;
    Ok(BenchmarkReport {
        schema: 1,
        seed: config.seed,
        count_per_order: config.count_per_order,
        orders,
        overall,
    })
}

pub fn evidence_of(row: &DatasetRow) -> Evidence {
    Evidence {
        order: row.order,
        cr: row.cr,
        prop3_rev: row.prop3_rev,
        max3_rev: row.max3_rev,
    }
}

pub const SCATTER_ORDERS: [usize; 4] = [6, 8, 10, 12];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScatterRow {
    pub order: usize,
    pub source: String,
    #[serde(rename = "prop3Rev")]
    pub prop3_rev: f64,
    #[serde(rename = "max3Rev")]
    pub max3_rev: f64,
}

/// `count` logical and `count` Harker-coerced random PCMs for each order.
pub fn scatter_export(orders: &[usize], count: usize, seed: u64) -> Result<Vec<ScatterRow>> {
    if count < 1 {
        return Err(Error::InvalidParameter("scatter count must be >= 1".into()));
    }
    let generators: [&dyn PcmGenerator; 2] = [&LogicalGenerator, &CoercedGenerator::default()];
    let mut out = Vec::with_capacity(orders.len() * count * 2);
    for &order in orders {
        for (stream, g) in generators.iter().enumerate() {
            // distinct seed streams so logical and coerced draws are unrelated
            let cfg = SimConfig::new(order..=order, count, seed ^ ((stream as u64) << 56));
            for r in generate_batch(&cfg, *g)? {
                out.push(ScatterRow {
                    order,
                    source: g.name().to_string(),
                    prop3_rev: r.prop3_rev,
                    max3_rev: r.max3_rev,
                });
            }
        }
    }
    Ok(out)
}

pub fn write_scatter<W: Write>(rows: &[ScatterRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["order", "source", "prop3Rev", "max3Rev"])?;
    for r in rows {
        w.write_record([
            r.order.to_string(),
            r.source.clone(),
            format!("{:.6}", r.prop3_rev),
            format!("{:.6}", r.max3_rev),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}
