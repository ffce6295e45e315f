//! Small dense linear algebra: row-major matrices, LU with partial pivoting,
//! and eigenvalues of unsymmetric matrices (Hessenberg + shifted QR).
//!
//! The systems handled here are at most a few dozen unknowns, so nothing is
//! blocked or vectorized.

use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    /// Builds a matrix from a row-major slice.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[T]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.to_vec(),
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[T]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn determinant(&self) -> T {
        assert!(self.is_square());
        match self.lu() {
            Ok(lu) => lu.determinant(),
            Err(_) => T::zero(),
        }
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self.clone())
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let lu = self.lu()?;
        let mut x = b.to_vec();
        lu.solve_in_place(&mut x);
        Ok(x)
    }

    /// Eigenvalues (unordered) of a square matrix.
    pub fn eigenvalues(&self) -> Result<Vec<Eigenvalue<T>>> {
        assert!(self.is_square());
        let n = self.rows;
        match n {
            0 => Ok(Vec::new()),
            1 => Ok(vec![Eigenvalue::real(self[(0, 0)])]),
            2 => Ok(eig2(self[(0, 0)], self[(0, 1)], self[(1, 0)], self[(1, 1)])),
            _ => {
                let mut a = self.clone();
                hessenberg(&mut a);
                hqr(&mut a)
            }
        }
    }

    /// Largest real part over the spectrum.
    pub fn spectral_abscissa(&self) -> Result<T> {
        Ok(self
            .eigenvalues()?
            .iter()
            .fold(T::neg_infinity(), |acc, e| acc.max(e.re)))
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P·A = L·U` stored in place.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Real> Lu<T> {
    pub fn factor(mut a: Matrix<T>) -> Result<Self> {
        assert!(a.is_square());
        let n = a.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let scale = a.max_abs();
        if !scale.is_finite() {
            return Err(Error::NonFinite("LU factorization"));
        }
        let tiny = scale * T::epsilon() * T::of(n as f64);
        for k in 0..n {
            let (mut p, mut best) = (k, a[(k, k)].abs());
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= tiny || best == T::zero() {
                return Err(Error::Singular);
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        let akj = a[(k, j)];
                        a[(i, j)] -= f * akj;
                    }
                }
            }
        }
        Ok(Self { lu: a, perm, sign })
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        let n = self.lu.rows;
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        b.copy_from_slice(&x);
    }

    pub fn determinant(&self) -> T {
        (0..self.lu.rows).fold(self.sign, |acc, i| acc * self.lu[(i, i)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Eigenvalue<T: Real> {
    pub re: T,
    pub im: T,
}

impl<T: Real> Eigenvalue<T> {
    pub fn real(re: T) -> Self {
        Self { re, im: T::zero() }
    }

    pub fn modulus(&self) -> T {
        self.re.hypot(self.im)
    }
}

fn eig2<T: Real>(a: T, b: T, c: T, d: T) -> Vec<Eigenvalue<T>> {
    let half = T::of(0.5);
    let mid = (a + d) * half;
    let p = (a - d) * half;
    let disc = p * p + b * c;
    if disc >= T::zero() {
        let r = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = if mid >= T::zero() { mid + r } else { mid - r };
        let det = a * d - b * c;
        let small = if big != T::zero() { det / big } else { mid - r };
        vec![Eigenvalue::real(big), Eigenvalue::real(small)]
    } else {
        let r = (-disc).sqrt();
        vec![
            Eigenvalue { re: mid, im: r },
            Eigenvalue { re: mid, im: -r },
        ]
    }
}

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transformations.
fn hessenberg<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows;
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in m - 1..n {
                let tmp = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = tmp;
            }
            for j in 0..n {
                let tmp = a[(j, piv)];
                a[(j, piv)] = a[(j, m)];
                a[(j, m)] = tmp;
            }
        }
        if x != T::zero() {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != T::zero() {
                    y /= x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        let amj = a[(m, j)];
                        a[(i, j)] -= y * amj;
                    }
                    for j in 0..n {
                        let aji = a[(j, i)];
                        a[(j, m)] += y * aji;
                    }
                }
            }
        }
    }
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = T::zero();
        }
    }
}

#[inline]
fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (destroys `a`).
fn hqr<T: Real>(a: &mut Matrix<T>) -> Result<Vec<Eigenvalue<T>>> {
    let n = a.rows;
    let eps = T::epsilon();
    let mut out = vec![Eigenvalue::real(T::zero()); n];
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[(i, j)].abs();
        }
    }
    let half = T::of(0.5);
    let mut t = T::zero();
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nu, nu)];
            if l == nu {
                out[nu] = Eigenvalue::real(x + t);
                nn -= 1;
                break;
            }
            let mut y = a[(nu - 1, nu - 1)];
            let mut w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nu - 1 {
                let p = half * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    let z = p + sign(z, p);
                    out[nu - 1] = Eigenvalue::real(x + z);
                    out[nu] = Eigenvalue::real(if z != T::zero() { x - w / z } else { x + z });
                } else {
                    out[nu] = Eigenvalue { re: x + p, im: -z };
                    out[nu - 1] = Eigenvalue { re: x + p, im: z };
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::Eigen);
            }
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=nu {
                    a[(i, i)] -= x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = T::of(0.75) * s;
                y = x;
                w = T::of(-0.4375) * s * s;
            }
            its += 1;
            let mut m = nu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nu - 1 {
                a[(i + 2, i)] = T::zero();
                if i != m {
                    a[(i + 2, i - 1)] = T::zero();
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = T::zero();
                    if k + 1 != nu {
                        r = a[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            pp += r * a[(k + 2, j)];
                            a[(k + 2, j)] -= pp * z;
                        }
                        a[(k + 1, j)] -= pp * y;
                        a[(k, j)] -= pp * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            pp += z * a[(i, k + 2)];
                            a[(i, k + 2)] -= pp * r;
                        }
                        a[(i, k + 1)] -= pp * q;
                        a[(i, k)] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(out)
}

/// `exp(A)` by scaling and squaring of a truncated Taylor series.
pub fn expm<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    assert!(a.is_square());
    let n = a.rows();
    let norm = a.max_abs() * T::of(n as f64);
    let mut squarings = 0;
    let mut scale = T::one();
    while norm * scale > T::of(0.5) {
        scale *= T::of(0.5);
        squarings += 1;
    }
    let b = a.scaled(scale);
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&b).scaled(T::one() / T::of(k as f64));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}
