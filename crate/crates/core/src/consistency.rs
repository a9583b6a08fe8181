//! Saaty's Consistency Ratio, the Random Index table behind it, and the
//! triad-based Koczkodaj index.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::principal_eigen;
use crate::error::{Error, Result};
use num_rational::Ratio;
use num_traits::{CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive};

use crate::pcm::{check_order, Pcm, Rational, MAX_ORDER, MIN_ORDER};
use crate::simulate::{simulate_random, sub_seed};

/// Minimum sample count accepted by [`compute_random_index`].
pub const MIN_RI_SAMPLES: usize = 1000;

const BUNDLED_RI: &str = include_str!("../data/random_index.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CrReport {
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub threshold: f64,
    pub cr_consistent: bool,
}

/// CR acceptance threshold: 0.05 for orders 3 and 4, 0.10 above.
pub fn cr_threshold(order: usize) -> f64 {
    if order <= 4 {
        0.05
    } else {
        0.10
    }
}

pub fn consistency_index(lambda_max: f64, order: usize) -> f64 {
    (lambda_max - order as f64) / (order as f64 - 1.0)
}

pub fn consistency_ratio(pcm: &Pcm) -> Result<CrReport> {
    let n = pcm.order();
    let ri = random_index(n)?;
    let lambda_max = principal_eigen(pcm)?.lambda_max;
    Ok(cr_report(lambda_max, n, ri))
}

pub fn cr_report(lambda_max: f64, order: usize, ri: f64) -> CrReport {
    let ci = consistency_index(lambda_max, order);
    let cr = ci / ri;
    let threshold = cr_threshold(order);
    CrReport {
        lambda_max,
        ci,
        ri,
        cr,
        threshold,
        cr_consistent: cr <= threshold,
    }
}

/// Random Index table with the simulation parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomIndexTable {
    pub schema: u32,
    /// Order (as a decimal string key) to mean CI.
    pub values: BTreeMap<String, f64>,
    pub provenance: RiProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiProvenance {
    pub seed: u64,
    pub samples: usize,
}

impl RandomIndexTable {
    pub fn get(&self, order: usize) -> Option<f64> {
        self.values.get(&order.to_string()).copied()
    }

    /// Simulate every supported order.
    pub fn simulate(samples: usize, seed: u64) -> Result<Self> {
        let mut values = BTreeMap::new();
        for n in MIN_ORDER..=MAX_ORDER {
            values.insert(n.to_string(), compute_random_index(n, samples, seed)?);
        }
        Ok(RandomIndexTable {
            schema: 1,
            values,
            provenance: RiProvenance { seed, samples },
        })
    }
}

pub fn bundled_ri_table() -> &'static RandomIndexTable {
    static TABLE: OnceLock<RandomIndexTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(BUNDLED_RI).expect("bundled random index table is valid"))
}

/// Bundled Random Index for order `n`.
pub fn random_index(n: usize) -> Result<f64> {
    check_order(n)?;
    bundled_ri_table()
        .get(n)
        .ok_or(Error::UnsupportedOrder {
            order: n,
            min: MIN_ORDER,
            max: MAX_ORDER,
        })
}

/// Mean CI over `samples` uniformly random Fundamental-Scale PCMs of order
/// `n`. Sample `i` draws from its own sub-seed, so the result does not
/// depend on thread scheduling.
pub fn compute_random_index(n: usize, samples: usize, seed: u64) -> Result<f64> {
    check_order(n)?;
    if samples < MIN_RI_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "random index needs at least {MIN_RI_SAMPLES} samples, got {samples}"
        )));
    }
    let cis = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, n, i as u64));
            let pcm = simulate_random(n, &mut rng)?;
            Ok(consistency_index(principal_eigen(&pcm)?.lambda_max, n))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(cis.iter().sum::<f64>() / samples as f64)
}

/// Koczkodaj's index: the worst relative triad violation of
/// `a_ij * a_jk = a_ik`, in `[0, 1)`. Evaluated exactly in rational
/// arithmetic where it fits in `i128`, so consistent matrices give exactly 0.
pub fn koczkodaj_index(pcm: &Pcm) -> f64 {
    let n = pcm.order();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = triad_violation_exact(pcm.entry(i, j), pcm.entry(j, k), pcm.entry(i, k))
                    .unwrap_or_else(|| {
                        let through = pcm.value(i, j) * pcm.value(j, k);
                        let direct = pcm.value(i, k);
                        (1.0 - direct / through).abs().min((1.0 - through / direct).abs())
                    });
                worst = worst.max(v);
            }
        }
    }
    worst
}

fn triad_violation_exact(ij: Rational, jk: Rational, ik: Rational) -> Option<f64> {
    let wide = |r: Rational| Ratio::<i128>::new(i128::from(*r.numer()), i128::from(*r.denom()));
    let through = wide(ij).checked_mul(&wide(jk))?;
    let q = wide(ik).checked_div(&through)?;
    let one = Ratio::<i128>::one();
    let a = if q > one { q.checked_sub(&one)? } else { one.checked_sub(&q)? };
    let inv = q.recip();
    let b = if inv > one { inv.checked_sub(&one)? } else { one.checked_sub(&inv)? };
    a.min(b).to_f64()
}
