//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's numerical routines.

#![allow(dead_code, clippy::needless_range_loop)]

use ahp_core::pcm::{Format, Pcm, Rational};
use rand::Rng;

pub const GOLDEN_5: &str = "1,1/5,1/5,2,1/6\n5,1,4,1/3,4\n5,1/4,1,1,2\n1/2,3,1,1,1/9\n6,1/4,1/2,9,1\n";
pub const PCM_A: &str = "1,1,1,1/2,1/2,1\n1,1,1/3,1/2,1/2,1\n1,3,1,1/2,1/2,1/2\n2,2,2,1,1,7\n2,2,2,1,1,5\n1,1,2,1/7,1/5,1\n";
pub const PCM_B: &str = "1,9,6,1/3,2,1/2\n1/9,1,1/5,1/9,1/9,1/9\n1/6,5,1,1/2,1/3,1/5\n3,9,2,1,1/2,1/2\n1/2,9,3,2,1,1/2\n2,9,5,2,2,1\n";

pub fn csv(text: &str) -> Pcm {
    Pcm::parse(text, Format::Csv).expect("fixture parses")
}

pub fn dense(pcm: &Pcm) -> Vec<Vec<f64>> {
    let n = pcm.order();
    (0..n).map(|i| (0..n).map(|j| pcm.value(i, j)).collect()).collect()
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Closed form for 3x3 reciprocal matrices: the principal eigenvector is
/// proportional to the row geometric means.
pub fn triad_eigenvector(a: &[Vec<f64>], t: [usize; 3]) -> [f64; 3] {
    let g: Vec<f64> = t
        .iter()
        .map(|&i| t.iter().map(|&j| a[i][j]).product::<f64>().cbrt())
        .collect();
    let u = unit(g);
    [u[0], u[1], u[2]]
}

/// Principal eigenvector by repeated squaring: a positive matrix raised to
/// a high power is rank one, and every column is proportional to the
/// Perron vector. Returns `(eigenvector, lambda)`.
pub fn perron_by_squaring(a: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..64 {
        let mut sq = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    sq[i][j] += m[i][k] * m[k][j];
                }
            }
        }
        let scale = sq.iter().flatten().fold(0.0f64, |acc, &x| acc.max(x));
        m = sq.into_iter().map(|r| r.into_iter().map(|x| x / scale).collect()).collect();
    }
    let v = unit((0..n).map(|i| m[i].iter().sum()).collect());
    let av: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * v[j]).sum()).collect();
    let lambda = av.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
    (v, lambda)
}

/// `(p, q, triad, magnitude)` with `p < q`, found by walking pairs first and
/// then third alternatives; sorted so it can be compared with the library.
pub fn brute_force_reversals(pcm: &Pcm) -> Vec<(usize, usize, [usize; 3], f64)> {
    let a = dense(pcm);
    let n = a.len();
    let (e, _) = perron_by_squaring(&a);
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            for k in (0..n).filter(|&k| k != p && k != q) {
                let mut t = [p, q, k];
                t.sort_unstable();
                let e3 = triad_eigenvector(&a, t);
                let pos = |x: usize| t.iter().position(|&y| y == x).unwrap();
                let full = e[p] / e[q];
                let local = e3[pos(p)] / e3[pos(q)];
                let opposite = (full > 1.0 && local < 1.0) || (full < 1.0 && local > 1.0);
                if opposite {
                    out.push((p, q, t, (full / local).max(local / full)));
                }
            }
        }
    }
    out.sort_by_key(|x| (x.2, x.0, x.1));
    out
}

/// Exhaustive Koczkodaj index in f64 over all ordered triples.
pub fn brute_force_koczkodaj(pcm: &Pcm) -> f64 {
    let a = dense(pcm);
    let n = a.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                let r = a[i][k] / (a[i][j] * a[j][k]);
                worst = worst.max((1.0 - r).abs().min((1.0 - 1.0 / r).abs()));
            }
        }
    }
    worst
}

/// Solve `m x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| m[r][col].abs().total_cmp(&m[s][col].abs()))
            .unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    x
}

/// Plain Newton-Raphson on the logistic log-likelihood, iterated until the
/// step is negligible.
pub fn reference_logit(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut beta = vec![0.0; k];
    for _ in 0..200 {
        let mut grad = vec![0.0; k];
        let mut hess = vec![vec![0.0; k]; k];
        for (row, &yi) in x.iter().zip(y) {
            let eta: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let p = 1.0 / (1.0 + (-eta).exp());
            for a in 0..k {
                grad[a] += (yi - p) * row[a];
                for b in 0..k {
                    hess[a][b] += p * (1.0 - p) * row[a] * row[b];
                }
            }
        }
        let step = gauss_solve(hess, grad);
        beta.iter_mut().zip(&step).for_each(|(b, s)| *b += s);
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-13 {
            break;
        }
    }
    beta
}

/// Minimum within-cluster sum of squares over every split into two
/// non-empty groups.
pub fn exhaustive_two_means(points: &[[f64; 2]]) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    // fix point 0 in group A to skip mirrored splits
    for mask in 0u32..(1 << (n - 1)) {
        let in_b = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
        let mut total = 0.0;
        let mut empty = false;
        for side in [false, true] {
            let members: Vec<&[f64; 2]> = (0..n).filter(|&i| in_b(i) == side).map(|i| &points[i]).collect();
            if members.is_empty() {
                empty = true;
                break;
            }
            let m = members.len() as f64;
            let c = [
                members.iter().map(|p| p[0]).sum::<f64>() / m,
                members.iter().map(|p| p[1]).sum::<f64>() / m,
            ];
            total += members.iter().map(|p| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sum::<f64>();
        }
        if !empty {
            best = best.min(total);
        }
    }
    best
}

/// Consistent PCM from random integer weights, built without the library's
/// own constructor for consistent matrices.
pub fn consistent_pcm<R: Rng>(n: usize, rng: &mut R) -> Pcm {
    let w: Vec<i64> = (0..n).map(|_| rng.random_range(1..=30)).collect();
    let mut upper = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            upper.push(Rational::new(w[i], w[j]));
        }
    }
    Pcm::from_upper(n, upper).unwrap()
}

/// Permuted copy: entry `(i, j)` of the result is `(perm[i], perm[j])` of the input.
pub fn relabel(pcm: &Pcm, perm: &[usize]) -> Pcm {
    let n = pcm.order();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| pcm.entry(perm[i], perm[j])).collect())
        .collect();
    Pcm::from_rows(&rows).unwrap()
}
