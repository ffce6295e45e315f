//! Grid scans for sign changes, used to seed and cross-check root finding.

use serde::{Deserialize, Serialize};

use crate::field::VectorField;
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NullclineScan<T: Real> {
    pub lo: [T; 2],
    pub hi: [T; 2],
    pub resolution: usize,
    /// Centres of cells where both components change sign.
    pub candidates: Vec<[T; 2]>,
}

fn changes_sign<T: Real>(v: &[T]) -> bool {
    let lo = v.iter().copied().fold(T::infinity(), T::min);
    let hi = v.iter().copied().fold(T::neg_infinity(), T::max);
    lo <= T::zero() && hi >= T::zero() && lo < hi
}

/// Marks the cells of a `resolution × resolution` grid on `[lo, hi]` where
/// both components of a planar field change sign. Cells touching a
/// non-finite value are skipped.
pub fn nullcline_scan<T: Real, F: VectorField<T> + ?Sized>(field: &F, lo: [T; 2], hi: [T; 2], resolution: usize) -> NullclineScan<T> {
    assert_eq!(field.dim(), 2, "nullcline scan needs a planar field");
    let n = resolution.max(1);
    let h = [
        (hi[0] - lo[0]) / T::of(n as f64),
        (hi[1] - lo[1]) / T::of(n as f64),
    ];
    let node = |i: usize, j: usize| [lo[0] + h[0] * T::of(i as f64), lo[1] + h[1] * T::of(j as f64)];
    let mut vals = vec![[T::nan(); 2]; (n + 1) * (n + 1)];
    let mut out = [T::zero(); 2];
    for i in 0..=n {
        for j in 0..=n {
            field.eval(&node(i, j), &mut out);
            vals[i * (n + 1) + j] = out;
        }
    }
    let mut candidates = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [
                vals[i * (n + 1) + j],
                vals[(i + 1) * (n + 1) + j],
                vals[i * (n + 1) + j + 1],
                vals[(i + 1) * (n + 1) + j + 1],
            ];
            if corners.iter().flatten().any(|v| !v.is_finite()) {
                continue;
            }
            let f1: Vec<T> = corners.iter().map(|c| c[0]).collect();
            let f2: Vec<T> = corners.iter().map(|c| c[1]).collect();
            if changes_sign(&f1) && changes_sign(&f2) {
                let a = node(i, j);
                candidates.push([a[0] + h[0] * T::of(0.5), a[1] + h[1] * T::of(0.5)]);
            }
        }
    }
    NullclineScan {
        lo,
        hi,
        resolution: n,
        candidates,
    }
}

/// Midpoints of the intervals of an `n`-point grid on `[lo, hi]` where
/// `f` changes sign (or vanishes at a node).
pub fn scalar_sign_changes<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, n: usize) -> Vec<T> {
    let n = n.max(2);
    let h = (hi - lo) / T::of((n - 1) as f64);
    let xs: Vec<T> = (0..n).map(|k| lo + h * T::of(k as f64)).collect();
    let vs: Vec<T> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for k in 0..n - 1 {
        let (a, b) = (vs[k], vs[k + 1]);
        if !(a.is_finite() && b.is_finite()) {
            continue;
        }
        if (a < T::zero()) != (b < T::zero()) || a == T::zero() {
            out.push((xs[k] + xs[k + 1]) * T::of(0.5));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    #[test]
    fn identity_field_has_one_candidate_region() {
        let f = FnField::new(2, |z: &[f64], out: &mut [f64]| out.copy_from_slice(z));
        let scan = nullcline_scan(&f, [-1.0, -1.0], [1.0, 1.0], 11);
        assert_eq!(scan.candidates.len(), 1);
        assert!(scan.candidates[0].iter().all(|v| v.abs() < 0.1));
    }

    #[test]
    fn scalar_scan() {
        let r = scalar_sign_changes(|x: f64| x * x - 0.25, -1.0, 1.0, 1000);
        assert_eq!(r.len(), 2);
    }
}
