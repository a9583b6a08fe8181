//! Lloyd's k-means on 2-D points with k-means++ seeding and restarts.

use rand::Rng;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

pub const MAX_LLOYD_ITERATIONS: usize = 300;
pub const DEFAULT_RESTARTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub centroids: Vec<Point>,
    pub labels: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub iterations: usize,
}

fn dist2(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn nearest(p: &Point, centroids: &[Point]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = dist2(p, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

pub fn wcss(points: &[Point], labels: &[usize], centroids: &[Point]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| dist2(p, &centroids[l]))
        .sum()
}

/// Centroids of a labelling; `None` if some cluster is empty.
pub fn centroids_of(points: &[Point], labels: &[usize], k: usize) -> Option<Vec<Point>> {
    let mut sums = vec![[0.0, 0.0]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        sums[l][0] += p[0];
        sums[l][1] += p[1];
        counts[l] += 1;
    }
    if counts.contains(&0) {
        return None;
    }
    Some(
        sums.iter()
            .zip(&counts)
            .map(|(s, &c)| [s[0] / c as f64, s[1] / c as f64])
            .collect(),
    )
}

fn kmeans_plus_plus<R: Rng + ?Sized>(points: &[Point], k: usize, rng: &mut R) -> Option<Vec<Point>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        if !(total > 0.0) {
            return None;
        }
        let mut target = rng.random::<f64>() * total;
        let mut chosen = points.len() - 1;
        for (i, &d) in d2.iter().enumerate() {
            if target < d {
                chosen = i;
                break;
            }
            target -= d;
        }
        let c = points[chosen];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centroids.push(c);
    }
    Some(centroids)
}

/// One Lloyd run to an assignment fixpoint; `None` if a cluster empties.
fn lloyd(points: &[Point], mut centroids: Vec<Point>) -> Option<KMeansFit> {
    let k = centroids.len();
    let mut labels: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
    for iteration in 1..=MAX_LLOYD_ITERATIONS {
        centroids = centroids_of(points, &labels, k)?;
        let next: Vec<usize> = points.iter().map(|p| nearest(p, &centroids).0).collect();
        if next == labels {
            return Some(KMeansFit {
                wcss: wcss(points, &labels, &centroids),
                centroids,
                labels,
                iterations: iteration,
            });
        }
        labels = next;
    }
    let centroids = centroids_of(points, &labels, k)?;
    Some(KMeansFit {
        wcss: wcss(points, &labels, &centroids),
        centroids,
        labels,
        iterations: MAX_LLOYD_ITERATIONS,
    })
}

/// Best of `restarts` k-means++ seeded Lloyd runs by WCSS. Restarts that end
/// with an empty cluster are discarded.
pub fn kmeans<R: Rng + ?Sized>(points: &[Point], k: usize, restarts: usize, rng: &mut R) -> Result<KMeansFit> {
    if k < 1 || points.len() < k {
        return Err(Error::Clustering(format!("{} points cannot form {k} clusters", points.len())));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Clustering("non-finite coordinates".into()));
    }
    let mut best: Option<KMeansFit> = None;
    for _ in 0..restarts.max(1) {
        let Some(seeds) = kmeans_plus_plus(points, k, rng) else {
            return Err(Error::Clustering("all points coincide".into()));
        };
        if let Some(fit) = lloyd(points, seeds) {
            if best.as_ref().is_none_or(|b| fit.wcss < b.wcss) {
                best = Some(fit);
            }
        }
    }
    best.ok_or_else(|| Error::Clustering("every restart produced an empty cluster".into()))
}
