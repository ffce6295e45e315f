//! Slow–fast systems
//!
//! ```text
//!     dx/dt = f0(x, y, ε)          (slow time t)
//!   ε dy/dt = g0(x, y, ε)
//! ```
//!
//! and the equivalent fast-time form obtained with `τ = t/ε`. A system can
//! optionally carry its critical manifold `y = m0(x)` and an analytic
//! `D_y g0`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fd_jacobian, fd_step_for, VectorField};
use crate::linalg::Matrix;
use crate::real::{all_finite, norm_inf, Real};

/// A point `(x, y)` split into slow and fast blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct State<T: Real> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

impl<T: Real> State<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidState("both blocks need at least one entry".into()));
        }
        if !all_finite(&x) || !all_finite(&y) {
            return Err(Error::NonFinite("state"));
        }
        Ok(Self { x, y })
    }

    pub fn from_concat(z: &[T], n: usize) -> Self {
        Self {
            x: z[..n].to_vec(),
            y: z[n..].to_vec(),
        }
    }

    pub fn concat(&self) -> Vec<T> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.y);
        z
    }

    pub fn dim(&self) -> usize {
        self.x.len() + self.y.len()
    }
}

/// A named parameter with a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Parameter<T: Real> {
    pub name: String,
    pub value: T,
    pub lower: T,
    /// `true` when the bound itself is admissible.
    pub inclusive: bool,
}

/// Validated set of named parameters. Construction fails on the first
/// parameter that violates its bound.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ParameterSet<T: Real> {
    params: Vec<Parameter<T>>,
}

impl<T: Real> ParameterSet<T> {
    pub fn new(params: Vec<Parameter<T>>) -> Result<Self> {
        for p in &params {
            let ok = p.value.is_finite()
                && if p.inclusive {
                    p.value >= p.lower
                } else {
                    p.value > p.lower
                };
            if !ok {
                return Err(Error::ParameterBound {
                    name: p.name.clone(),
                    value: p.value.as_f64(),
                    bound: p.lower.as_f64(),
                });
            }
        }
        Ok(Self { params })
    }

    /// All parameters strictly positive.
    pub fn positive(values: &[(&str, T)]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&(name, value)| Parameter {
                    name: name.to_string(),
                    value,
                    lower: T::zero(),
                    inclusive: false,
                })
                .collect(),
        )
    }

    pub fn get(&self, name: &str) -> Option<T> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Parameter<T>> {
        self.params.iter()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

pub type BlockFn<T> = Arc<dyn Fn(&[T], &[T], T, &mut [T]) + Send + Sync>;
pub type ManifoldFn<T> = Arc<dyn Fn(&[T]) -> Result<Vec<T>> + Send + Sync>;
pub type FastJacobianFn<T> = Arc<dyn Fn(&[T], &[T], T) -> Matrix<T> + Send + Sync>;

/// The pair `(f0, g0)` with dimensions and optional analytic hooks.
#[derive(Clone)]
pub struct SlowFastSystem<T: Real> {
    n: usize,
    m: usize,
    f0: BlockFn<T>,
    g0: BlockFn<T>,
    m0: Option<ManifoldFn<T>>,
    jac_y_g0: Option<FastJacobianFn<T>>,
    jac_full: Option<FastJacobianFn<T>>,
    params: ParameterSet<T>,
}

impl<T: Real> fmt::Debug for SlowFastSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlowFastSystem")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("m0", &self.m0.is_some())
            .field("jac_y_g0", &self.jac_y_g0.is_some())
            .field("params", &self.params)
            .finish()
    }
}

impl<T: Real> SlowFastSystem<T> {
    pub fn new(
        n: usize,
        m: usize,
        f0: impl Fn(&[T], &[T], T, &mut [T]) + Send + Sync + 'static,
        g0: impl Fn(&[T], &[T], T, &mut [T]) + Send + Sync + 'static,
    ) -> Self {
        assert!(n >= 1 && m >= 1, "slow and fast blocks must be non-empty");
        Self {
            n,
            m,
            f0: Arc::new(f0),
            g0: Arc::new(g0),
            m0: None,
            jac_y_g0: None,
            jac_full: None,
            params: ParameterSet::default(),
        }
    }

    pub fn with_m0(mut self, m0: impl Fn(&[T]) -> Result<Vec<T>> + Send + Sync + 'static) -> Self {
        self.m0 = Some(Arc::new(m0));
        self
    }

    pub fn with_fast_jacobian(mut self, jac: impl Fn(&[T], &[T], T) -> Matrix<T> + Send + Sync + 'static) -> Self {
        self.jac_y_g0 = Some(Arc::new(jac));
        self
    }

    /// Jacobian of the stacked map `(f0, g0)` with respect to `(x, y)`.
    pub fn with_full_jacobian(mut self, jac: impl Fn(&[T], &[T], T) -> Matrix<T> + Send + Sync + 'static) -> Self {
        self.jac_full = Some(Arc::new(jac));
        self
    }

    pub fn with_params(mut self, params: ParameterSet<T>) -> Self {
        self.params = params;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn params(&self) -> &ParameterSet<T> {
        &self.params
    }

    pub fn has_m0(&self) -> bool {
        self.m0.is_some()
    }

    pub fn has_fast_jacobian(&self) -> bool {
        self.jac_y_g0.is_some()
    }

    pub fn f0(&self, x: &[T], y: &[T], eps: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        (self.f0)(x, y, eps, &mut out);
        out
    }

    pub fn g0(&self, x: &[T], y: &[T], eps: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.m];
        (self.g0)(x, y, eps, &mut out);
        out
    }

    pub(crate) fn f0_into(&self, x: &[T], y: &[T], eps: T, out: &mut [T]) {
        (self.f0)(x, y, eps, out)
    }

    pub(crate) fn g0_into(&self, x: &[T], y: &[T], eps: T, out: &mut [T]) {
        (self.g0)(x, y, eps, out)
    }

    /// Closed-form critical manifold, when the system has one.
    pub fn m0(&self, x: &[T]) -> Result<Vec<T>> {
        match &self.m0 {
            Some(m0) => m0(x),
            None => Err(Error::Unsupported("system has no analytic m0")),
        }
    }

    fn check_dims(&self, s: &State<T>) -> Result<()> {
        if s.x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: s.x.len(),
            });
        }
        if s.y.len() != self.m {
            return Err(Error::Dimension {
                expected: self.m,
                got: s.y.len(),
            });
        }
        Ok(())
    }

    /// `(f0, g0/ε)`: the vector field in slow time.
    pub fn eval_slow_time(&self, s: &State<T>, eps: T) -> Result<State<T>> {
        if !(eps > T::zero()) {
            return Err(Error::DegenerateTimescale(eps.as_f64()));
        }
        self.check_dims(s)?;
        let dx = self.f0(&s.x, &s.y, eps);
        let dy: Vec<T> = self.g0(&s.x, &s.y, eps).into_iter().map(|g| g / eps).collect();
        if !all_finite(&dx) || !all_finite(&dy) {
            return Err(Error::NonFinite("eval_slow_time"));
        }
        Ok(State { x: dx, y: dy })
    }

    /// `(ε f0, g0)`: the vector field in fast time `τ = t/ε`.
    pub fn eval_fast_time(&self, s: &State<T>, eps: T) -> Result<State<T>> {
        if !(eps >= T::zero()) {
            return Err(Error::DegenerateTimescale(eps.as_f64()));
        }
        self.check_dims(s)?;
        let dx: Vec<T> = if eps == T::zero() {
            vec![T::zero(); self.n]
        } else {
            self.f0(&s.x, &s.y, eps).into_iter().map(|f| eps * f).collect()
        };
        let dy = self.g0(&s.x, &s.y, eps);
        if !all_finite(&dx) || !all_finite(&dy) {
            return Err(Error::NonFinite("eval_fast_time"));
        }
        Ok(State { x: dx, y: dy })
    }

    /// `(x, y) ↦ (x, z)` with `z = y − m0(x)`.
    pub fn to_deviation(&self, s: &State<T>) -> Result<State<T>> {
        self.check_dims(s)?;
        let m = self.m0(&s.x)?;
        Ok(State {
            x: s.x.clone(),
            y: s.y.iter().zip(&m).map(|(&y, &mi)| y - mi).collect(),
        })
    }

    /// `(x, z) ↦ (x, y)` with `y = z + m0(x)`.
    pub fn from_deviation(&self, s: &State<T>) -> Result<State<T>> {
        self.check_dims(s)?;
        let m = self.m0(&s.x)?;
        Ok(State {
            x: s.x.clone(),
            y: s.y.iter().zip(&m).map(|(&z, &mi)| z + mi).collect(),
        })
    }

    /// `D_y g0(x, y, ε)`: the analytic hook when present, otherwise a
    /// central finite difference with step `max(h, h|y_i|)` per column.
    pub fn jacobian_fast(&self, x: &[T], y: &[T], eps: T) -> Result<Matrix<T>> {
        let j = match &self.jac_y_g0 {
            Some(jac) => jac(x, y, eps),
            None => self.jacobian_fast_fd(x, y, eps),
        };
        if !j.is_finite() {
            return Err(Error::NonFinite("jacobian_fast"));
        }
        Ok(j)
    }

    pub fn jacobian_fast_fd(&self, x: &[T], y: &[T], eps: T) -> Matrix<T> {
        fd_jacobian(|v, out| self.g0_into(x, v, eps, out), y, self.m)
    }

    /// `D_x g0(x, y, ε)` by central differences.
    pub fn jacobian_fast_x(&self, x: &[T], y: &[T], eps: T) -> Matrix<T> {
        fd_jacobian(|v, out| self.g0_into(v, y, eps, out), x, self.m)
    }

    /// Jacobian of `(f0, g0)` with respect to the stacked `(x, y)`.
    pub fn jacobian_full(&self, x: &[T], y: &[T], eps: T) -> Matrix<T> {
        if let Some(j) = &self.jac_full {
            return j(x, y, eps);
        }
        let n = self.n;
        let mut z = x.to_vec();
        z.extend_from_slice(y);
        fd_jacobian(
            |v, out| {
                let (vx, vy) = v.split_at(n);
                let (ox, oy) = out.split_at_mut(n);
                self.f0_into(vx, vy, eps, ox);
                self.g0_into(vx, vy, eps, oy);
            },
            &z,
            self.n + self.m,
        )
    }

    /// `∂g0/∂ε` by a second-order one-sided difference (valid at `ε = 0`).
    pub fn g0_eps_derivative(&self, x: &[T], y: &[T], eps: T) -> Vec<T> {
        let h = fd_step_for(eps);
        let g_a = self.g0(x, y, eps);
        let g_b = self.g0(x, y, eps + h);
        let g_c = self.g0(x, y, eps + h + h);
        (0..self.m)
            .map(|i| (T::of(-3.0) * g_a[i] + T::of(4.0) * g_b[i] - g_c[i]) / (h + h))
            .collect()
    }

    /// Largest `|g0(x, m0(x), 0)|` over the given slow points.
    pub fn m0_residual(&self, xs: &[Vec<T>]) -> Result<T> {
        let mut worst = T::zero();
        for x in xs {
            let y = self.m0(x)?;
            worst = worst.max(norm_inf(&self.g0(x, &y, T::zero())));
        }
        Ok(worst)
    }

    pub fn slow_time_field(&self, eps: T) -> Result<SlowTimeField<'_, T>> {
        if !(eps > T::zero()) {
            return Err(Error::DegenerateTimescale(eps.as_f64()));
        }
        Ok(SlowTimeField { sys: self, eps })
    }

    pub fn fast_time_field(&self, eps: T) -> FastTimeField<'_, T> {
        FastTimeField { sys: self, eps }
    }
}

/// `d(x, y)/dt = (f0, g0/ε)` on the stacked state.
#[derive(Clone, Copy)]
pub struct SlowTimeField<'a, T: Real> {
    pub sys: &'a SlowFastSystem<T>,
    pub eps: T,
}

impl<T: Real> VectorField<T> for SlowTimeField<'_, T> {
    fn dim(&self) -> usize {
        self.sys.n + self.sys.m
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        let n = self.sys.n;
        let (x, y) = z.split_at(n);
        let (ox, oy) = out.split_at_mut(n);
        self.sys.f0_into(x, y, self.eps, ox);
        self.sys.g0_into(x, y, self.eps, oy);
        let inv = T::one() / self.eps;
        oy.iter_mut().for_each(|v| *v *= inv);
    }

    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        let n = self.sys.n;
        let mut j = self.sys.jacobian_full(&z[..n], &z[n..], self.eps);
        let inv = T::one() / self.eps;
        for i in n..j.rows() {
            for k in 0..j.cols() {
                j[(i, k)] *= inv;
            }
        }
        j
    }
}

/// `d(x, y)/dτ = (ε f0, g0)` on the stacked state.
#[derive(Clone, Copy)]
pub struct FastTimeField<'a, T: Real> {
    pub sys: &'a SlowFastSystem<T>,
    pub eps: T,
}

impl<T: Real> VectorField<T> for FastTimeField<'_, T> {
    fn dim(&self) -> usize {
        self.sys.n + self.sys.m
    }

    fn eval(&self, z: &[T], out: &mut [T]) {
        let n = self.sys.n;
        let (x, y) = z.split_at(n);
        let (ox, oy) = out.split_at_mut(n);
        self.sys.f0_into(x, y, self.eps, ox);
        ox.iter_mut().for_each(|v| *v *= self.eps);
        self.sys.g0_into(x, y, self.eps, oy);
    }

    fn jacobian(&self, z: &[T]) -> Matrix<T> {
        let n = self.sys.n;
        let mut j = self.sys.jacobian_full(&z[..n], &z[n..], self.eps);
        for i in 0..n {
            for k in 0..j.cols() {
                j[(i, k)] *= self.eps;
            }
        }
        j
    }
}
