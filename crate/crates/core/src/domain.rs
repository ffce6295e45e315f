//! Polyhedral domains: fixed polytopes, ε-dependent polytopes `D_ε`, and the
//! slow domain `U × V`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::system::State;

/// `{v : rows[i]·v ≤ rhs[i]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Polytope<T: Real> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Containment<T: Real> {
    pub inside: bool,
    /// `min_i (b_i − a_i·v)`; negative outside.
    pub margin: T,
}

impl<T: Real> Polytope<T> {
    pub fn new(rows: Vec<Vec<T>>, rhs: Vec<T>) -> Self {
        assert_eq!(rows.len(), rhs.len());
        if let Some(d) = rows.first().map(Vec::len) {
            assert!(rows.iter().all(|r| r.len() == d));
        }
        Self { rows, rhs }
    }

    /// Axis-aligned box `lo ≤ v ≤ hi`.
    pub fn from_box(lo: &[T], hi: &[T]) -> Self {
        let d = lo.len();
        let mut rows = Vec::with_capacity(2 * d);
        let mut rhs = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut up = vec![T::zero(); d];
            up[i] = T::one();
            rows.push(up);
            rhs.push(hi[i]);
            let mut down = vec![T::zero(); d];
            down[i] = -T::one();
            rows.push(down);
            rhs.push(-lo[i]);
        }
        Self { rows, rhs }
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.rows[i]
    }

    pub fn rhs(&self, i: usize) -> T {
        self.rhs[i]
    }

    /// Slack of constraint `i` at `v`.
    pub fn slack(&self, i: usize, v: &[T]) -> T {
        self.rhs[i] - dot(&self.rows[i], v)
    }

    pub fn margin(&self, v: &[T]) -> T {
        (0..self.rows.len())
            .map(|i| self.slack(i, v))
            .fold(T::infinity(), T::min)
    }

    pub fn contains(&self, v: &[T]) -> Containment<T> {
        let margin = self.margin(v);
        Containment {
            inside: margin >= T::zero(),
            margin,
        }
    }

    /// Vertices by brute-force enumeration of `dim`-subsets of active
    /// constraints. Only meant for the low-dimensional polytopes used here.
    pub fn vertices(&self) -> Vec<Vec<T>> {
        let d = self.dim();
        let m = self.rows.len();
        let tol = T::of(1e-9);
        let mut out: Vec<Vec<T>> = Vec::new();
        if d == 0 || m < d {
            return out;
        }
        let mut idx: Vec<usize> = (0..d).collect();
        loop {
            let sub: Vec<Vec<T>> = idx.iter().map(|&i| self.rows[i].clone()).collect();
            let a = crate::linalg::Matrix::from_rows(&sub);
            let b: Vec<T> = idx.iter().map(|&i| self.rhs[i]).collect();
            if let Ok(v) = a.solve(&b) {
                if self.margin(&v) >= -tol
                    && !out.iter().any(|w| crate::real::dist2(w, &v) < tol)
                {
                    out.push(v);
                }
            }
            // next combination
            let mut k = d;
            while k > 0 && idx[k - 1] == m - d + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..d {
                idx[j] = idx[j - 1] + 1;
            }
        }
        out
    }

    /// Tightest axis-aligned bounding box (from the vertices).
    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        let d = self.dim();
        let mut lo = vec![T::infinity(); d];
        let mut hi = vec![T::neg_infinity(); d];
        for v in self.vertices() {
            for i in 0..d {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// Mean of the vertices; an interior point for full-dimensional bounded
    /// polytopes.
    pub fn center(&self) -> Vec<T> {
        let verts = self.vertices();
        let d = self.dim();
        let mut c = vec![T::zero(); d];
        if verts.is_empty() {
            return c;
        }
        for v in &verts {
            for i in 0..d {
                c[i] += v[i];
            }
        }
        let k = T::of(verts.len() as f64);
        c.iter_mut().for_each(|x| *x /= k);
        c
    }

    /// Uniform samples by rejection from the bounding box. Returns the
    /// samples and the empirical acceptance rate.
    pub fn rejection_sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> (Vec<Vec<T>>, f64) {
        let (lo, hi) = self.bounding_box();
        let mut out = Vec::with_capacity(count);
        let mut tries = 0usize;
        while out.len() < count {
            tries += 1;
            let v: Vec<T> = lo
                .iter()
                .zip(&hi)
                .map(|(&a, &b)| a + (b - a) * T::of(rng.gen::<f64>()))
                .collect();
            if self.margin(&v) >= T::zero() {
                out.push(v);
            }
        }
        let rate = if tries == 0 { 1.0 } else { count as f64 / tries as f64 };
        (out, rate)
    }

    /// Orthogonal projection of `v` onto the hyperplane of constraint `i`.
    pub fn project_to_face(&self, i: usize, v: &[T]) -> Vec<T> {
        let a = &self.rows[i];
        let t = self.slack(i, v) / dot(a, a);
        v.iter().zip(a).map(|(&vi, &ai)| vi + t * ai).collect()
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `D_ε = {v : (A₀ + εA₁)·v ≤ b₀ + εb₁}` for `ε ∈ (0, ε₀]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EpsPolytope<T: Real> {
    rows0: Vec<Vec<T>>,
    rows1: Vec<Vec<T>>,
    rhs0: Vec<T>,
    rhs1: Vec<T>,
    eps_max: T,
}

impl<T: Real> EpsPolytope<T> {
    pub fn new(rows0: Vec<Vec<T>>, rows1: Vec<Vec<T>>, rhs0: Vec<T>, rhs1: Vec<T>, eps_max: T) -> Self {
        assert!(rows0.len() == rows1.len() && rows0.len() == rhs0.len() && rhs0.len() == rhs1.len());
        Self {
            rows0,
            rows1,
            rhs0,
            rhs1,
            eps_max,
        }
    }

    /// An ε-independent polytope valid for `ε ∈ (0, eps_max]`.
    pub fn constant(p: Polytope<T>, eps_max: T) -> Self {
        let d = p.dim();
        let k = p.len();
        Self {
            rows1: vec![vec![T::zero(); d]; k],
            rhs1: vec![T::zero(); k],
            rows0: p.rows,
            rhs0: p.rhs,
            eps_max,
        }
    }

    pub fn eps_max(&self) -> T {
        self.eps_max
    }

    pub fn dim(&self) -> usize {
        self.rows0.first().map_or(0, Vec::len)
    }

    pub fn check_eps(&self, eps: T) -> Result<()> {
        if eps > T::zero() && eps <= self.eps_max {
            Ok(())
        } else {
            Err(Error::DomainUndefined {
                eps: eps.as_f64(),
                eps_max: self.eps_max.as_f64(),
            })
        }
    }

    pub fn at(&self, eps: T) -> Result<Polytope<T>> {
        self.check_eps(eps)?;
        Ok(self.at_unchecked(eps))
    }

    /// Evaluates the family at any `ε`, including the limit `ε = 0`.
    pub fn at_unchecked(&self, eps: T) -> Polytope<T> {
        let rows = self
            .rows0
            .iter()
            .zip(&self.rows1)
            .map(|(r0, r1)| r0.iter().zip(r1).map(|(&a, &b)| a + eps * b).collect())
            .collect();
        let rhs = self
            .rhs0
            .iter()
            .zip(&self.rhs1)
            .map(|(&a, &b)| a + eps * b)
            .collect();
        Polytope::new(rows, rhs)
    }

    pub fn contains(&self, s: &State<T>, eps: T) -> Result<Containment<T>> {
        let p = self.at(eps)?;
        if p.dim() != s.dim() {
            return Err(Error::Dimension {
                expected: p.dim(),
                got: s.dim(),
            });
        }
        Ok(p.contains(&s.concat()))
    }
}

/// The open slow set `U` with its margin σ, and the bounding box `V` for the
/// fast variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SlowDomain<T: Real> {
    pub u: Polytope<T>,
    pub sigma: T,
    pub v_lo: Vec<T>,
    pub v_hi: Vec<T>,
}

impl<T: Real> SlowDomain<T> {
    /// `U` and σ as given; `V` is the tightest box around the fast
    /// projection of `D_ε` over the validity interval, padded by 10%.
    pub fn new(u: Polytope<T>, sigma: T, domain: &EpsPolytope<T>, n: usize) -> Self {
        let mut lo: Vec<T> = Vec::new();
        let mut hi: Vec<T> = Vec::new();
        for eps in [domain.eps_max() * T::of(1e-6), domain.eps_max()] {
            let (l, h) = domain.at_unchecked(eps).bounding_box();
            if lo.is_empty() {
                lo = l[n..].to_vec();
                hi = h[n..].to_vec();
            } else {
                for i in 0..lo.len() {
                    lo[i] = lo[i].min(l[n + i]);
                    hi[i] = hi[i].max(h[n + i]);
                }
            }
        }
        let pad = T::of(0.1);
        for i in 0..lo.len() {
            let w = (hi[i] - lo[i]).max(T::of(1e-3));
            lo[i] -= pad * w;
            hi[i] += pad * w;
        }
        Self {
            u,
            sigma,
            v_lo: lo,
            v_hi: hi,
        }
    }

    /// Strict membership in the open set `U`.
    pub fn contains_slow(&self, x: &[T]) -> bool {
        self.u.margin(x) > T::zero()
    }

    pub fn contains_fast(&self, y: &[T]) -> bool {
        y.iter()
            .zip(self.v_lo.iter().zip(&self.v_hi))
            .all(|(&v, (&l, &h))| v > l && v < h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Polytope<f64> {
        Polytope::new(
            vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
            vec![0.0, 0.0, 1.0],
        )
    }

    #[test]
    fn triangle_vertices_and_box() {
        let t = triangle();
        let mut v = t.vertices();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (lo, hi) = t.bounding_box();
        assert_eq!(lo, vec![0.0, 0.0]);
        assert_eq!(hi, vec![1.0, 1.0]);
    }

    #[test]
    fn margin_signs() {
        let t = triangle();
        assert!(t.contains(&[0.2, 0.2]).inside);
        assert!((t.margin(&[0.2, 0.2]) - 0.2).abs() < 1e-15);
        assert!(!t.contains(&[0.6, 0.6]).inside);
    }

    #[test]
    fn eps_outside_interval_is_rejected() {
        let p = EpsPolytope::constant(triangle(), 0.5);
        assert!(p.at(0.0).is_err());
        assert!(p.at(0.6).is_err());
        assert!(p.at(0.5).is_ok());
    }

    #[test]
    fn rejection_sampling_stays_inside() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (s, rate) = triangle().rejection_sample(&mut rng, 500);
        assert_eq!(s.len(), 500);
        assert!(s.iter().all(|v| triangle().contains(v).inside));
        assert!((rate - 0.5).abs() < 0.1);
    }
}
