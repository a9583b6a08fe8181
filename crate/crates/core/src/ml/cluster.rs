//! Order-wise ab-initio labelling: two-cluster k-means on standardized
//! `(prop3Rev, max3Rev)`, with the cluster of lower mean raw `prop3Rev`
//! declared consistent.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kmeans::{kmeans, Point, DEFAULT_RESTARTS};
use super::standardize::{fit_standardization, group_by_order, StandardizationParams};
use crate::error::{Error, Result};
use crate::simulate::{row_rng, DatasetRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderClusters {
    /// In standardized feature space.
    pub centroids: [Point; 2],
    pub consistent_cluster: usize,
    pub sizes: [usize; 2],
    pub wcss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterModel {
    pub schema: u32,
    pub params: StandardizationParams,
    pub orders: BTreeMap<usize, OrderClusters>,
}

impl ClusterModel {
    /// Nearest-centroid label for a row of an order this model was fit on.
    pub fn is_consistent(&self, row: &DatasetRow) -> Result<bool> {
        let z = self.params.standardize(row)?;
        let oc = self
            .orders
            .get(&row.order)
            .ok_or_else(|| Error::InvalidParameter(format!("no clusters for order {}", row.order)))?;
        let d = |c: &Point| (z[0] - c[0]).powi(2) + (z[1] - c[1]).powi(2);
        let cluster = if d(&oc.centroids[1]) < d(&oc.centroids[0]) { 1 } else { 0 };
        Ok(cluster == oc.consistent_cluster)
    }

    /// Share of rows per order labelled consistent.
    pub fn consistent_fraction(labels: &[bool], rows: &[DatasetRow]) -> BTreeMap<usize, f64> {
        group_by_order(rows)
            .into_iter()
            .map(|(order, idx)| {
                let c = idx.iter().filter(|&&i| labels[i]).count();
                (order, c as f64 / idx.len() as f64)
            })
            .collect()
    }
}

/// Cluster each order separately. Returns one label per input row
/// (`true` = consistent) and the fitted model. Order `n` uses the generator
/// seeded by `(seed, n, 0)` for k-means++.
pub fn cluster_ab_initio(rows: &[DatasetRow], seed: u64) -> Result<(Vec<bool>, ClusterModel)> {
    let params = fit_standardization(rows)?;
    let groups: Vec<(usize, Vec<usize>)> = group_by_order(rows).into_iter().collect();
    let fitted = groups
        .par_iter()
        .map(|(order, idx)| {
            let moments = params.get(*order)?;
            let points: Vec<Point> = idx
                .iter()
                .map(|&i| moments.standardize(rows[i].prop3_rev, rows[i].max3_rev))
                .collect();
            let mut rng = row_rng(seed, *order, 0);
            let fit = kmeans(&points, 2, DEFAULT_RESTARTS, &mut rng)?;
            let consistent_cluster = consistent_cluster(rows, idx, &fit.labels);
            let mut sizes = [0usize; 2];
            fit.labels.iter().for_each(|&l| sizes[l] += 1);
            let clusters = OrderClusters {
                centroids: [fit.centroids[0], fit.centroids[1]],
                consistent_cluster,
                sizes,
                wcss: fit.wcss,
            };
            Ok((*order, clusters, fit.labels))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut labels = vec![false; rows.len()];
    let mut orders = BTreeMap::new();
    for ((_, idx), (order, clusters, cluster_labels)) in groups.iter().zip(fitted) {
        for (&i, &l) in idx.iter().zip(&cluster_labels) {
            labels[i] = l == clusters.consistent_cluster;
        }
        orders.insert(order, clusters);
    }
    Ok((
        labels,
        ClusterModel {
            schema: 1,
            params,
            orders,
        },
    ))
}

/// Cluster whose members have the lower mean raw prop3Rev; ties fall back
/// to mean raw max3Rev.
pub fn consistent_cluster(rows: &[DatasetRow], idx: &[usize], labels: &[usize]) -> usize {
    let mut sum = [[0.0f64; 2]; 2];
    let mut count = [0usize; 2];
    for (&i, &l) in idx.iter().zip(labels) {
        sum[l][0] += rows[i].prop3_rev;
        sum[l][1] += rows[i].max3_rev;
        count[l] += 1;
    }
    let mean = |l: usize, f: usize| sum[l][f] / count[l] as f64;
    match mean(0, 0).total_cmp(&mean(1, 0)) {
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Equal => usize::from(mean(1, 1) < mean(0, 1)),
    }
}
