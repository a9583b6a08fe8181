use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulate::DatasetRow;

/// Mean and sample standard deviation of one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub std_dev: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Option<Moments> {
        if values.len() < 2 {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Some(Moments {
            mean,
            std_dev: var.sqrt(),
        })
    }

    pub fn apply(&self, x: f64) -> f64 {
        (x - self.mean) / self.std_dev
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderMoments {
    #[serde(rename = "prop3Rev")]
    pub prop3_rev: Moments,
    #[serde(rename = "max3Rev")]
    pub max3_rev: Moments,
}

impl OrderMoments {
    pub fn standardize(&self, prop3_rev: f64, max3_rev: f64) -> [f64; 2] {
        [self.prop3_rev.apply(prop3_rev), self.max3_rev.apply(max3_rev)]
    }
}

/// Per-order standardization of `(prop3Rev, max3Rev)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub orders: BTreeMap<usize, OrderMoments>,
}

impl StandardizationParams {
    pub fn get(&self, order: usize) -> Result<&OrderMoments> {
        self.orders
            .get(&order)
            .ok_or_else(|| Error::InvalidParameter(format!("no standardization parameters for order {order}")))
    }

    pub fn standardize(&self, row: &DatasetRow) -> Result<[f64; 2]> {
        Ok(self.get(row.order)?.standardize(row.prop3_rev, row.max3_rev))
    }
}

pub fn group_by_order(rows: &[DatasetRow]) -> BTreeMap<usize, Vec<usize>> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(r.order).or_default().push(i);
    }
    groups
}

pub fn fit_standardization(rows: &[DatasetRow]) -> Result<StandardizationParams> {
    let mut orders = BTreeMap::new();
    for (order, idx) in group_by_order(rows) {
        let degenerate = |what: &str| Error::Clustering(format!("order {order}: {what}"));
        let prop: Vec<f64> = idx.iter().map(|&i| rows[i].prop3_rev).collect();
        let max: Vec<f64> = idx.iter().map(|&i| rows[i].max3_rev).collect();
        let prop3_rev = Moments::of(&prop).ok_or_else(|| degenerate("fewer than 2 rows"))?;
        let max3_rev = Moments::of(&max).ok_or_else(|| degenerate("fewer than 2 rows"))?;
        if !(prop3_rev.std_dev > 0.0) {
            return Err(degenerate("prop3Rev has zero variance"));
        }
        if !(max3_rev.std_dev > 0.0) {
            return Err(degenerate("max3Rev has zero variance"));
        }
        orders.insert(order, OrderMoments { prop3_rev, max3_rev });
    }
    Ok(StandardizationParams { orders })
}
