use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{MgspError, Result};
use crate::rng;

pub const KMEANS_MAX_ITER: usize = 300;

#[derive(Debug, Clone)]
pub struct KMeansResult {
    /// Cluster of each row, renumbered in order of first appearance.
    pub labels: Vec<usize>,
    pub centroids: DMatrix<f64>,
    pub inertia: f64,
    pub iterations: usize,
}

fn sq_dist(points: &DMatrix<f64>, r: usize, centroids: &DMatrix<f64>, c: usize) -> f64 {
    (0..points.ncols())
        .map(|d| {
            let x = points[(r, d)] - centroids[(c, d)];
            x * x
        })
        .sum()
}

fn nearest(points: &DMatrix<f64>, r: usize, centroids: &DMatrix<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..centroids.nrows() {
        let d = sq_dist(points, r, centroids, c);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd iterations from a k-means++ start; rows of `points` are samples.
pub fn kmeans(points: &DMatrix<f64>, k: usize, seed: u64) -> Result<KMeansResult> {
    let (n, dim) = points.shape();
    if k == 0 || k > n {
        return Err(MgspError::InvalidArgument(format!(
            "k must be in 1..={n}, got {k}"
        )));
    }
    let mut g = rng::seeded(seed);
    let mut centroids = DMatrix::zeros(k, dim);
    let mut chosen = vec![false; n];
    let first = g.random_range(0..n);
    chosen[first] = true;
    centroids.set_row(0, &points.row(first));
    let mut d2: Vec<f64> = (0..n).map(|r| sq_dist(points, r, &centroids, 0)).collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = g.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (r, &w) in d2.iter().enumerate() {
                acc += w;
                if acc > target && w > 0.0 {
                    pick = r;
                    break;
                }
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|&r| !chosen[r]).collect();
            free[g.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.set_row(c, &points.row(pick));
        for (r, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(points, r, &centroids, c));
        }
    }

    let mut labels = vec![usize::MAX; n];
    let mut iterations = 0;
    loop {
        let mut changed = false;
        for (r, label) in labels.iter_mut().enumerate() {
            let (c, _) = nearest(points, r, &centroids);
            if *label != c {
                *label = c;
                changed = true;
            }
        }
        if !changed || iterations >= KMEANS_MAX_ITER {
            break;
        }
        iterations += 1;
        let mut sums = DMatrix::<f64>::zeros(k, dim);
        let mut counts = vec![0usize; k];
        for (r, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for d in 0..dim {
                sums[(c, d)] += points[(r, d)];
            }
        }
        for c in 0..k {
            // an emptied cluster keeps its previous centroid
            if counts[c] > 0 {
                for d in 0..dim {
                    centroids[(c, d)] = sums[(c, d)] / counts[c] as f64;
                }
            }
        }
    }
    let inertia = (0..n).map(|r| sq_dist(points, r, &centroids, labels[r])).sum();

    let mut remap = vec![usize::MAX; k];
    let mut next = 0;
    for l in labels.iter_mut() {
        if remap[*l] == usize::MAX {
            remap[*l] = next;
            next += 1;
        }
        *l = remap[*l];
    }
    let mut reordered = DMatrix::zeros(k, dim);
    let mut spare = next;
    for (old, &new) in remap.iter().enumerate() {
        let slot = if new == usize::MAX {
            spare += 1;
            spare - 1
        } else {
            new
        };
        reordered.set_row(slot, &centroids.row(old));
    }
    Ok(KMeansResult {
        labels,
        centroids: reordered,
        inertia,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_line() {
        let p = DMatrix::from_column_slice(4, 1, &[0.0, 0.1, 10.0, 10.1]);
        let r = kmeans(&p, 2, 1).unwrap();
        assert_eq!(r.labels, vec![0, 0, 1, 1]);
    }

    #[test]
    fn singletons_have_zero_inertia() {
        let p = DMatrix::from_column_slice(4, 1, &[0.0, 0.1, 10.0, 10.1]);
        let r = kmeans(&p, 4, 9).unwrap();
        let mut l = r.labels.clone();
        l.sort();
        l.dedup();
        assert_eq!(l.len(), 4);
        assert_eq!(r.inertia, 0.0);
    }

    #[test]
    fn deterministic_and_validated() {
        let p = DMatrix::from_fn(30, 2, |r, c| ((r * 7 + c * 3) % 11) as f64);
        let a = kmeans(&p, 3, 42).unwrap();
        let b = kmeans(&p, 3, 42).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.centroids, b.centroids);
        assert!(kmeans(&p, 0, 1).is_err());
        assert!(kmeans(&p, 31, 1).is_err());
    }
}
