//! Triadic preference reversals.
//!
//! Every order-3 principal submatrix (triad) is solved for its own principal
//! eigenvector. For each pair inside the triad, the dominance direction from
//! the triad is compared with the direction from the full matrix; a strict
//! disagreement is a reversal. The number of reversals relative to the
//! maximum `3 * C(n, 3)` gives `prop3Rev`, and the largest ratio-of-ratios
//! over the reversed pairs gives `max3Rev`.

use std::cmp::Ordering;

use num_rational::Ratio;
use num_traits::{CheckedMul, One};
use serde::{Deserialize, Serialize};

use crate::eigen::{principal_eigen, PriorityResult};
use crate::error::{Error, Result};
use crate::pcm::Pcm;

pub type Triad = [usize; 3];

/// Full-matrix priority ratios this close to one count as ties, never as a
/// dominance direction.
pub const FULL_TIE_TOLERANCE: f64 = 1e-9;

/// All `C(n, 3)` index triples `i < j < k` in lexicographic order.
pub fn enumerate_triads(n: usize) -> Result<Vec<Triad>> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("triads need order >= 3, got {n}")));
    }
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                out.push([i, j, k]);
            }
        }
    }
    Ok(out)
}

pub fn max_possible_reversals(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        3 * (n * (n - 1) * (n - 2) / 6)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriadRecord {
    pub triple: Triad,
    /// Unit-norm principal eigenvector of the triad.
    pub eigenvector: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReversalEvent {
    pub pair: [usize; 2],
    pub triad: Triad,
    pub full_ratio: f64,
    pub triad_ratio: f64,
    /// Ratio-of-ratios oriented to be > 1.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReversalReport {
    pub order: usize,
    pub count: usize,
    pub max_possible: usize,
    pub prop3_rev: f64,
    pub max3_rev: f64,
    /// Sorted by (triad, pair).
    pub events: Vec<ReversalEvent>,
}

/// `(order, prop3Rev, max3Rev)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReversalFeatures {
    pub order: usize,
    pub prop3_rev: f64,
    pub max3_rev: f64,
}

impl ReversalReport {
    pub fn features(&self) -> ReversalFeatures {
        ReversalFeatures {
            order: self.order,
            prop3_rev: self.prop3_rev,
            max3_rev: self.max3_rev,
        }
    }

    /// Events whose magnitude equals `max3Rev`.
    pub fn max_events(&self) -> impl Iterator<Item = &ReversalEvent> {
        self.events.iter().filter(move |e| e.magnitude == self.max3_rev)
    }
}

pub fn triad_records(pcm: &Pcm) -> Result<Vec<TriadRecord>> {
    enumerate_triads(pcm.order())?
        .into_iter()
        .map(|t| {
            let ev = principal_eigen(&pcm.submatrix(&t))?.eigenvector;
            Ok(TriadRecord {
                triple: t,
                eigenvector: [ev[0], ev[1], ev[2]],
            })
        })
        .collect()
}

pub fn detect_reversals(pcm: &Pcm) -> Result<ReversalReport> {
    let full = principal_eigen(pcm)?;
    detect_reversals_with(pcm, &full)
}

/// Same as [`detect_reversals`] when the full eigenvector is already known.
pub fn detect_reversals_with(pcm: &Pcm, full: &PriorityResult) -> Result<ReversalReport> {
    let n = pcm.order();
    let mut events = Vec::new();
    for record in triad_records(pcm)? {
        let t = record.triple;
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let (p, q) = (t[a], t[b]);
            let full_ratio = full.ratio(p, q);
            let triad_ratio = match triad_row_order(pcm, t, p, q) {
                Some(Ordering::Equal) => 1.0,
                _ => record.eigenvector[a] / record.eigenvector[b],
            };
            if (full_ratio - 1.0).abs() > FULL_TIE_TOLERANCE && (full_ratio - 1.0) * (triad_ratio - 1.0) < 0.0 {
                let magnitude = (full_ratio / triad_ratio).max(triad_ratio / full_ratio);
                events.push(ReversalEvent {
                    pair: [p, q],
                    triad: t,
                    full_ratio,
                    triad_ratio,
                    magnitude,
                });
            }
        }
    }
    let max_possible = max_possible_reversals(n);
    let count = events.len();
    let max3_rev = events.iter().map(|e| e.magnitude).fold(1.0, f64::max);
    Ok(ReversalReport {
        order: n,
        count,
        max_possible,
        prop3_rev: count as f64 / max_possible as f64,
        max3_rev,
        events,
    })
}

/// A 3x3 reciprocal matrix has the row geometric means as principal
/// eigenvector, so two alternatives tie within a triad exactly when their row
/// products are equal. Compared in exact arithmetic; `None` on overflow.
fn triad_row_order(pcm: &Pcm, t: Triad, p: usize, q: usize) -> Option<Ordering> {
    let product = |i: usize| {
        t.iter().try_fold(Ratio::<i128>::one(), |acc, &j| {
            let e = pcm.entry(i, j);
            acc.checked_mul(&Ratio::new(i128::from(*e.numer()), i128::from(*e.denom())))
        })
    };
    Some(product(p)?.cmp(&product(q)?))
}

pub fn reversal_features(pcm: &Pcm) -> Result<ReversalFeatures> {
    Ok(detect_reversals(pcm)?.features())
}
