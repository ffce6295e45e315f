//! Flow derivative `Dφ_t(z)` by integrating `M' = DF(z(t))·M`, `M(0) = I`,
//! alongside the state.

use serde::{Deserialize, Serialize};

use super::{integrate, IntegratorConfig, Output, Status};
use crate::error::Result;
use crate::field::VectorField;
use crate::linalg::Matrix;
use crate::real::Real;

struct Augmented<'a, F: ?Sized> {
    field: &'a F,
    n: usize,
}

impl<T: Real, F: VectorField<T> + ?Sized> VectorField<T> for Augmented<'_, F> {
    fn dim(&self) -> usize {
        self.n + self.n * self.n
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        let n = self.n;
        let (state, m) = z.split_at(n);
        self.field.eval(state, &mut out[..n]);
        let jac = self.field.jacobian(state);
        // row-major M; (J·M)[i][k] = Σ_j J[i][j] M[j][k]
        for i in 0..n {
            for k in 0..n {
                let mut acc = T::zero();
                for j in 0..n {
                    acc += jac[(i, j)] * m[j * n + k];
                }
                out[n + i * n + k] = acc;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct VariationalTrajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub derivatives: Vec<Matrix<T>>,
    pub status: Status,
}

/// Integrates the state and its flow derivative, sampling at `times`
/// (which should be positive and within `t_end`).
pub fn integrate_variational<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    s0: &[T],
    t_end: T,
    times: &[T],
    cfg: &IntegratorConfig<T>,
) -> Result<VariationalTrajectory<T>> {
    let n = field.dim();
    let aug = Augmented { field, n };
    let mut z0 = s0.to_vec();
    z0.extend_from_slice(Matrix::<T>::identity(n).as_slice());
    let tr = integrate(&aug, &z0, (T::zero(), t_end), cfg, None, &Output::Times(times.to_vec()))?;
    let mut out = VariationalTrajectory {
        times: Vec::with_capacity(tr.len()),
        states: Vec::with_capacity(tr.len()),
        derivatives: Vec::with_capacity(tr.len()),
        status: tr.status,
    };
    for (t, z) in tr.times.iter().zip(&tr.states) {
        out.times.push(*t);
        out.states.push(z[..n].to_vec());
        out.derivatives.push(Matrix::from_row_slice(n, n, &z[n..]));
    }
    Ok(out)
}
