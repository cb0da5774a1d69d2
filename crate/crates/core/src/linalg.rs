//! Small dense linear-algebra helpers shared by the analysis modules.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

/// Weighted inner product `uᵀ diag(w) v`.
pub fn weighted_dot(weights: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    u.iter().zip(v.iter()).zip(weights.iter()).map(|((a, b), w)| a * b * w).sum()
}

/// Largest absolute entry of `m` outside the diagonal blocks given by `ranges`
/// (which must partition the index set).
pub fn off_block_max(m: &DMatrix<f64>, ranges: &[Range<usize>]) -> f64 {
    let mut owner = vec![0; m.nrows()];
    for (b, r) in ranges.iter().enumerate() {
        for i in r.clone() {
            owner[i] = b;
        }
    }
    let mut worst: f64 = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if owner[r] != owner[c] {
                worst = worst.max(m[(r, c)].abs());
            }
        }
    }
    worst
}

/// Numerical rank from singular values above `tol · max(1, σ_max)`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let cut = tol * sv.max().max(1.0);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis (Euclidean) of the column space, from the SVD.
pub fn column_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    if m.is_empty() {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let cut = tol * svd.singular_values.max().max(1.0);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > cut).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    idx.into_iter().map(|i| u.column(i).into_owned()).collect()
}

/// 2-norm condition number from the singular values.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

/// Sign and natural log of |det m| via LU with partial pivoting.
pub fn log_det(m: DMatrix<f64>) -> (f64, f64) {
    let n = m.nrows();
    let lu = m.lu();
    let u = lu.u();
    let mut sign = if lu.p().determinant::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut log = 0.0;
    for i in 0..n {
        let d = u[(i, i)];
        if d == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if d < 0.0 {
            sign = -sign;
        }
        log += d.abs().ln();
    }
    (sign, log)
}

/// Inner product used while orthogonalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mass,
    Euclidean,
}

/// Gram–Schmidt helper bound to a mass diagonal.
pub struct Orthogonalizer<'a> {
    pub mass: &'a DVector<f64>,
}

/// Relative size below which a pivot counts as degenerate.
pub const DEGENERATE_PIVOT: f64 = 1e-10;

impl Orthogonalizer<'_> {
    pub fn dot(&self, metric: Metric, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        match metric {
            Metric::Mass => weighted_dot(self.mass, u, v),
            Metric::Euclidean => u.dot(v),
        }
    }

    /// Whether `v` has a usable norm in `metric`.
    pub fn is_regular(&self, metric: Metric, v: &DVector<f64>) -> bool {
        let e = v.norm_squared();
        e > 0.0 && self.dot(metric, v, v).abs() > DEGENERATE_PIVOT * e
    }

    /// Removes from `v` its components along each of `basis` (two passes).
    pub fn project_out(&self, metric: Metric, v: &mut DVector<f64>, basis: &[DVector<f64>]) {
        for _ in 0..2 {
            for b in basis {
                let bb = self.dot(metric, b, b);
                if bb != 0.0 {
                    let c = self.dot(metric, v, b) / bb;
                    v.axpy(-c, b, 1.0);
                }
            }
        }
    }

    /// Gram–Schmidt of `list` in order, after removing `against` in the mass
    /// metric. Falls back to the Euclidean metric within `list` when a mass
    /// pivot is degenerate; the returned flag reports the fallback.
    pub fn orthogonalize(&self, list: &[DVector<f64>], against: &[DVector<f64>]) -> (Vec<DVector<f64>>, bool) {
        let against: Vec<DVector<f64>> = against.iter().filter(|a| self.is_regular(Metric::Mass, a)).cloned().collect();
        for metric in [Metric::Mass, Metric::Euclidean] {
            let mut out: Vec<DVector<f64>> = Vec::with_capacity(list.len());
            let mut ok = true;
            for v in list {
                let mut w = v.clone();
                self.project_out(Metric::Mass, &mut w, &against);
                self.project_out(metric, &mut w, &out);
                if !self.is_regular(metric, &w) {
                    ok = false;
                    break;
                }
                out.push(w);
            }
            if ok {
                return (out, metric == Metric::Euclidean);
            }
        }
        (list.to_vec(), true)
    }

    /// Picks up to `count` vectors from `candidates` by pivoted Gram–Schmidt
    /// (largest remaining relative norm first), orthogonal to `against`.
    pub fn select(&self, candidates: &[DVector<f64>], against: &[DVector<f64>], count: usize) -> Vec<DVector<f64>> {
        let against: Vec<DVector<f64>> = against.iter().filter(|a| self.is_regular(Metric::Mass, a)).cloned().collect();
        let mut chosen: Vec<DVector<f64>> = Vec::new();
        while chosen.len() < count {
            let mut best: Option<(f64, DVector<f64>)> = None;
            for c in candidates {
                let scale = c.norm();
                if scale == 0.0 {
                    continue;
                }
                let mut w = c.clone();
                self.project_out(Metric::Mass, &mut w, &against);
                self.project_out(Metric::Euclidean, &mut w, &chosen);
                let rel = w.norm() / scale;
                if rel > 1e-8 && best.as_ref().map_or(true, |(r, _)| rel > *r) {
                    best = Some((rel, w));
                }
            }
            match best {
                Some((_, w)) => chosen.push(w),
                None => break,
            }
        }
        chosen
    }
}
