//! A planar slow–fast system whose reduced flow is a gradient-like scalar
//! equation but which, for ε large, carries a limit cycle:
//!
//! ```text
//!     dx/dt = y − (x³/3 − x)
//!   ε dy/dt = −y − 2 tanh x
//! ```

use serde::{Deserialize, Serialize};

use crate::domain::{EpsPolytope, Polytope};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::real::Real;
use crate::system::{Parameter, ParameterSet, SlowFastSystem};

/// `sup |α|` for `α(x) = 2 tanh x`.
const ALPHA_SUP: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CounterexampleParams<T: Real> {
    pub eps: T,
    /// Box half-width in `x`.
    pub a: T,
    /// Box half-width in `y`.
    pub b1: T,
}

pub fn beta<T: Real>(x: T) -> T {
    x * x * x / T::of(3.0) - x
}

fn alpha<T: Real>(x: T) -> T {
    T::of(2.0) * x.tanh()
}

/// Smallest `a ≥ 1` with `β(a) = target`, by bisection (β increases there).
fn beta_inverse<T: Real>(target: T) -> T {
    let (mut lo, mut hi) = (T::one(), T::of(2.0));
    while beta(hi) < target {
        hi *= T::of(2.0);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

impl<T: Real> CounterexampleParams<T> {
    /// `b1 = sup|α| + 1` and `a` the smallest value with `β(a) ≥ b1 + 1`.
    pub fn new(eps: T) -> Result<Self> {
        let b1 = T::of(ALPHA_SUP) + T::one();
        Self::with_box(eps, beta_inverse(b1 + T::one()), b1)
    }

    pub fn with_box(eps: T, a: T, b1: T) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::DegenerateTimescale(eps.as_f64()));
        }
        if !(b1 > T::of(ALPHA_SUP)) {
            return Err(Error::ParameterBound {
                name: "b1".into(),
                value: b1.as_f64(),
                bound: ALPHA_SUP,
            });
        }
        // sup of γ(y) = y over |y| ≤ b1
        if !(beta(a) > b1) {
            return Err(Error::ParameterBound {
                name: "a".into(),
                value: a.as_f64(),
                bound: beta_inverse(b1).as_f64(),
            });
        }
        Ok(Self { eps, a, b1 })
    }

    pub fn parameter_set(&self) -> Result<ParameterSet<T>> {
        let p = |name: &str, value: T| Parameter {
            name: name.into(),
            value,
            lower: T::zero(),
            inclusive: false,
        };
        ParameterSet::new(vec![p("eps", self.eps), p("a", self.a), p("b1", self.b1)])
    }

    pub fn m0(x: T) -> T {
        -alpha(x)
    }

    pub fn system(&self) -> SlowFastSystem<T> {
        SlowFastSystem::new(
            1,
            1,
            |x: &[T], y: &[T], _e: T, out: &mut [T]| out[0] = y[0] - beta(x[0]),
            |x: &[T], y: &[T], _e: T, out: &mut [T]| out[0] = -y[0] - alpha(x[0]),
        )
        .with_m0(|x: &[T]| Ok(vec![Self::m0(x[0])]))
        .with_fast_jacobian(|_x: &[T], _y: &[T], _e: T| Matrix::from_rows(&[vec![-T::one()]]))
        .with_full_jacobian(|x: &[T], _y: &[T], _e: T| {
            let sech = T::one() / x[0].cosh();
            Matrix::from_rows(&[
                vec![T::one() - x[0] * x[0], T::one()],
                vec![-T::of(2.0) * sech * sech, -T::one()],
            ])
        })
        .with_params(self.parameter_set().unwrap_or_default())
    }

    /// `{|x| ≤ a, |y| ≤ b1}`, valid for every ε.
    pub fn domain(&self) -> EpsPolytope<T> {
        let b = Polytope::from_box(&[-self.a, -self.b1], &[self.a, self.b1]);
        EpsPolytope::constant(b, T::max_value())
    }
}

/// The Jacobian of the slow-time field at the origin with its trace and
/// determinant.
pub fn jacobian_origin<T: Real>(eps: T) -> Result<(Matrix<T>, T, T)> {
    if !(eps > T::zero()) {
        return Err(Error::DegenerateTimescale(eps.as_f64()));
    }
    let j = Matrix::from_rows(&[
        vec![T::one(), T::one()],
        vec![-T::of(2.0) / eps, -T::one() / eps],
    ]);
    Ok((j, T::one() - T::one() / eps, T::one() / eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;
    use crate::system::State;
    use approx::assert_relative_eq;

    #[test]
    fn default_box() {
        let p = CounterexampleParams::<f64>::new(2.0).unwrap();
        assert_eq!(p.b1, 3.0);
        assert!(beta(p.a) >= 4.0 && beta(p.a - 1e-9) < 4.0);
        assert!(CounterexampleParams::with_box(2.0, 1.0, 3.0).is_err());
        assert!(CounterexampleParams::with_box(2.0, 3.0, 1.5).is_err());
        assert!(CounterexampleParams::new(0.0).is_err());
    }

    #[test]
    fn origin_is_rest_point() {
        let p = CounterexampleParams::new(0.5).unwrap();
        let d = p.system().eval_slow_time(&State::new(vec![0.0], vec![0.0]).unwrap(), 0.5).unwrap();
        assert_eq!((d.x[0], d.y[0]), (0.0, 0.0));
    }

    #[test]
    fn jacobian_origin_matches_field() {
        for eps in [0.1, 0.5, 2.0] {
            let p = CounterexampleParams::new(eps).unwrap();
            let sys = p.system();
            let field = sys.slow_time_field(eps).unwrap();
            let fd = crate::field::fd_jacobian(|z: &[f64], out: &mut [f64]| field.eval(z, out), &[0.0, 0.0], 2);
            let (j, tr, det) = jacobian_origin(eps).unwrap();
            assert!(fd.sub(&j).max_abs() < 1e-6);
            assert_relative_eq!(tr, 1.0 - 1.0 / eps);
            assert_relative_eq!(det, 1.0 / eps);
        }
    }

    #[test]
    fn box_edges_point_inward() {
        let p = CounterexampleParams::new(2.0).unwrap();
        let sys = p.system();
        for k in 0..=20 {
            let y = -p.b1 + 2.0 * p.b1 * k as f64 / 20.0;
            assert!(sys.f0(&[p.a], &[y], 2.0)[0] < 0.0);
            assert!(sys.f0(&[-p.a], &[y], 2.0)[0] > 0.0);
            let x = -p.a + 2.0 * p.a * k as f64 / 20.0;
            assert!(sys.g0(&[x], &[p.b1], 2.0)[0] < 0.0);
            assert!(sys.g0(&[x], &[-p.b1], 2.0)[0] > 0.0);
        }
    }
}
