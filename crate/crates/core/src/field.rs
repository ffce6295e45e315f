//! Autonomous vector fields `dz/dt = F(z)` on `R^N`.

use std::sync::Arc;

use crate::linalg::Matrix;
use crate::real::Real;

pub trait VectorField<T: Real>: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, z: &[T], out: &mut [T]);

    /// Jacobian `DF(z)`. The default is a central finite difference.
    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        fd_jacobian(|v, out| self.eval(v, out), z, self.dim())
    }

    fn call(&self, z: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.eval(z, &mut out);
        out
    }
}

impl<T: Real, F: VectorField<T> + ?Sized> VectorField<T> for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        (**self).eval(z, out)
    }

    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        (**self).jacobian(z)
    }
}

impl<T: Real, F: VectorField<T> + Send + ?Sized> VectorField<T> for Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        (**self).eval(z, out)
    }

    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        (**self).jacobian(z)
    }
}

/// Central-difference step for coordinate value `v`: `max(h, h|v|)`.
#[inline]
pub fn fd_step_for<T: Real>(v: T) -> T {
    let h = T::fd_step();
    h.max(h * v.abs())
}

/// Central finite-difference Jacobian of `f: R^n -> R^m` at `z`.
pub fn fd_jacobian<T: Real>(f: impl Fn(&[T], &mut [T]), z: &[T], out_dim: usize) -> Matrix<T> {
    let n = z.len();
    let mut jac = Matrix::zeros(out_dim, n);
    let mut zp = z.to_vec();
    let mut fp = vec![T::zero(); out_dim];
    let mut fm = vec![T::zero(); out_dim];
    let two = T::of(2.0);
    for j in 0..n {
        let h = fd_step_for(z[j]);
        zp[j] = z[j] + h;
        f(&zp, &mut fp);
        zp[j] = z[j] - h;
        f(&zp, &mut fm);
        zp[j] = z[j];
        for i in 0..out_dim {
            jac[(i, j)] = (fp[i] - fm[i]) / (two * h);
        }
    }
    jac
}

type EvalFn<T> = Arc<dyn Fn(&[T], &mut [T]) + Send + Sync>;
type JacFn<T> = Arc<dyn Fn(&[T]) -> Matrix<T> + Send + Sync>;

/// A vector field backed by closures.
#[derive(Clone)]
pub struct FnField<T: Real> {
    dim: usize,
    f: EvalFn<T>,
    jac: Option<JacFn<T>>,
}

impl<T: Real> FnField<T> {
    pub fn new(dim: usize, f: impl Fn(&[T], &mut [T]) + Send + Sync + 'static) -> Self {
        Self {
            dim,
            f: Arc::new(f),
            jac: None,
        }
    }

    pub fn with_jacobian(mut self, jac: impl Fn(&[T]) -> Matrix<T> + Send + Sync + 'static) -> Self {
        self.jac = Some(Arc::new(jac));
        self
    }

    /// `dz/dt = A z`.
    pub fn linear(a: Matrix<T>) -> Self {
        let n = a.rows();
        let a2 = a.clone();
        Self::new(n, move |z, out| out.copy_from_slice(&a.mul_vec(z))).with_jacobian(move |_| a2.clone())
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jac.is_some()
    }
}

impl<T: Real> VectorField<T> for FnField<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        (self.f)(z, out)
    }

    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        match &self.jac {
            Some(j) => j(z),
            None => fd_jacobian(|v, out| (self.f)(v, out), z, self.dim),
        }
    }
}

/// `F(z) + scale * P(z)`, used to probe robustness of monotonicity
/// certificates under small C¹ perturbations.
pub struct Perturbed<T: Real, F, P> {
    pub base: F,
    pub perturbation: P,
    pub scale: T,
}

impl<T: Real, F: VectorField<T>, P: VectorField<T>> VectorField<T> for Perturbed<T, F, P> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        self.base.eval(z, out);
        let p = self.perturbation.call(z);
        for (o, pi) in out.iter_mut().zip(p) {
            *o += self.scale * pi;
        }
    }

    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        self.base
            .jacobian(z)
            .add(&self.perturbation.jacobian(z).scaled(self.scale))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_jacobian_of_linear_field() {
        let a = Matrix::from_rows(&[vec![-1.0, 2.0], vec![0.0, -3.0]]);
        let f = FnField::new(2, {
            let a = a.clone();
            move |z: &[f64], out: &mut [f64]| out.copy_from_slice(&a.mul_vec(z))
        });
        let j = f.jacobian(&[0.3, -4.0]);
        for i in 0..2 {
            for k in 0..2 {
                assert!((j[(i, k)] - a[(i, k)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn fd_step_is_relative_for_large_values() {
        assert_eq!(fd_step_for(0.5_f64), 1e-6);
        assert!((fd_step_for(-300.0_f64) - 3e-4).abs() < 1e-18);
    }
}
