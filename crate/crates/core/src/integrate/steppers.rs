//! Single-step kernels. Each kernel produces a candidate `y(t+h)` and an
//! embedded local error estimate.

use crate::field::VectorField;
use crate::linalg::{Lu, Matrix};
use crate::real::{all_finite, Real};

use super::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StepError {
    NonFinite,
    Singular,
}

pub(crate) enum Stepper<T: Real> {
    Dopri(Dopri<T>),
    Ros23(Rosenbrock23<T>),
    Ros4(Rosenbrock4<T>),
}

impl<T: Real> Stepper<T> {
    pub(crate) fn new(method: Method, dim: usize) -> Self {
        match method {
            Method::DormandPrince45 => Stepper::Dopri(Dopri::new(dim)),
            Method::Rosenbrock23 => Stepper::Ros23(Rosenbrock23::new(dim)),
            Method::Rosenbrock4 => Stepper::Ros4(Rosenbrock4::new(dim)),
        }
    }

    /// Order of the embedded error estimate plus one; the step-size
    /// controller uses `err^(-1/q)`.
    pub(crate) fn error_exponent(&self) -> T {
        match self {
            Stepper::Dopri(_) => T::of(1.0 / 5.0),
            Stepper::Ros23(_) => T::of(1.0 / 3.0),
            Stepper::Ros4(_) => T::of(1.0 / 4.0),
        }
    }

    pub(crate) fn step<F: VectorField<T> + ?Sized>(
        &mut self,
        f: &F,
        y: &[T],
        h: T,
        y_new: &mut [T],
        err: &mut [T],
    ) -> Result<(), StepError> {
        match self {
            Stepper::Dopri(s) => s.step(f, y, h, y_new, err),
            Stepper::Ros23(s) => s.step(f, y, h, y_new, err),
            Stepper::Ros4(s) => s.step(f, y, h, y_new, err),
        }
    }

    /// Called once a step is accepted; cached data for the old point becomes
    /// stale.
    pub(crate) fn accept(&mut self) {
        match self {
            Stepper::Dopri(s) => s.accept(),
            Stepper::Ros23(s) => s.jac = None,
            Stepper::Ros4(s) => s.jac = None,
        }
    }

    /// Drops all cached data (the state was changed externally).
    pub(crate) fn reset(&mut self) {
        match self {
            Stepper::Dopri(s) => s.k1_valid = false,
            Stepper::Ros23(s) => s.jac = None,
            Stepper::Ros4(s) => s.jac = None,
        }
    }

    pub(crate) fn jacobian_count(&self) -> usize {
        match self {
            Stepper::Dopri(_) => 0,
            Stepper::Ros23(s) => s.jac_evals,
            Stepper::Ros4(s) => s.jac_evals,
        }
    }

    pub(crate) fn eval_count(&self) -> usize {
        match self {
            Stepper::Dopri(s) => s.evals,
            Stepper::Ros23(s) => s.evals,
            Stepper::Ros4(s) => s.evals,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct Dopri<T: Real> {
    k: [Vec<T>; 7],
    tmp: Vec<T>,
    k1_valid: bool,
    evals: usize,
}

impl<T: Real> Dopri<T> {
    fn new(dim: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![T::zero(); dim]),
            tmp: vec![T::zero(); dim],
            k1_valid: false,
            evals: 0,
        }
    }

    fn accept(&mut self) {
        // FSAL: the last stage is f(y_new)
        let (head, tail) = self.k.split_at_mut(6);
        head[0].copy_from_slice(&tail[0]);
        self.k1_valid = true;
    }

    fn stage<F: VectorField<T> + ?Sized>(&mut self, f: &F, y: &[T], h: T, coeffs: &[f64], out: usize) {
        for i in 0..y.len() {
            let mut acc = T::zero();
            for (j, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    acc += T::of(c) * self.k[j][i];
                }
            }
            self.tmp[i] = y[i] + h * acc;
        }
        let (tmp, k) = (&self.tmp, &mut self.k[out]);
        f.eval(tmp, k);
        self.evals += 1;
    }

    fn step<F: VectorField<T> + ?Sized>(
        &mut self,
        f: &F,
        y: &[T],
        h: T,
        y_new: &mut [T],
        err: &mut [T],
    ) -> Result<(), StepError> {
        if !self.k1_valid {
            f.eval(y, &mut self.k[0]);
            self.evals += 1;
            self.k1_valid = true;
        }
        self.stage(f, y, h, &[A21], 1);
        self.stage(f, y, h, &[A31, A32], 2);
        self.stage(f, y, h, &[A41, A42, A43], 3);
        self.stage(f, y, h, &[A51, A52, A53, A54], 4);
        self.stage(f, y, h, &[A61, A62, A63, A64, A65], 5);
        for i in 0..y.len() {
            y_new[i] = y[i]
                + h * (T::of(B1) * self.k[0][i]
                    + T::of(B3) * self.k[2][i]
                    + T::of(B4) * self.k[3][i]
                    + T::of(B5) * self.k[4][i]
                    + T::of(B6) * self.k[5][i]);
        }
        {
            let k6 = &mut self.k[6];
            f.eval(y_new, k6);
            self.evals += 1;
        }
        for i in 0..y.len() {
            err[i] = h
                * (T::of(E1) * self.k[0][i]
                    + T::of(E3) * self.k[2][i]
                    + T::of(E4) * self.k[3][i]
                    + T::of(E5) * self.k[4][i]
                    + T::of(E6) * self.k[5][i]
                    + T::of(E7) * self.k[6][i]);
        }
        if !all_finite(y_new) || !all_finite(err) {
            return Err(StepError::NonFinite);
        }
        Ok(())
    }
}

/// `I/(γh) − J`, factored.
fn factor_shifted<T: Real>(jac: &Matrix<T>, gamma_h: T) -> Result<Lu<T>, StepError> {
    let n = jac.rows();
    let mut w = jac.scaled(-T::one());
    let d = T::one() / gamma_h;
    for i in 0..n {
        w[(i, i)] += d;
    }
    Lu::factor(w).map_err(|_| StepError::Singular)
}

/// Second-order L-stable Rosenbrock–W method with a third-order error
/// estimate (Shampine & Reichelt). Tolerates an inexact or reused Jacobian.
pub(crate) struct Rosenbrock23<T: Real> {
    jac: Option<Matrix<T>>,
    f0: Vec<T>,
    f1: Vec<T>,
    f2: Vec<T>,
    tmp: Vec<T>,
    jac_evals: usize,
    evals: usize,
}

impl<T: Real> Rosenbrock23<T> {
    fn new(dim: usize) -> Self {
        Self {
            jac: None,
            f0: vec![T::zero(); dim],
            f1: vec![T::zero(); dim],
            f2: vec![T::zero(); dim],
            tmp: vec![T::zero(); dim],
            jac_evals: 0,
            evals: 0,
        }
    }

    fn step<F: VectorField<T> + ?Sized>(
        &mut self,
        f: &F,
        y: &[T],
        h: T,
        y_new: &mut [T],
        err: &mut [T],
    ) -> Result<(), StepError> {
        let n = y.len();
        if self.jac.is_none() {
            self.jac = Some(f.jacobian(y));
            self.jac_evals += 1;
        }
        let jac = self.jac.as_ref().expect("jacobian cached");
        let d = T::one() / (T::of(2.0) + T::of(2.0).sqrt());
        let e32 = T::of(6.0) + T::of(2.0).sqrt();
        // W = I − h d J; solving W k = r is (I/(hd) − J) k = r/(hd)
        let lu = factor_shifted(jac, h * d)?;
        let inv_hd = T::one() / (h * d);

        f.eval(y, &mut self.f0);
        let mut k1: Vec<T> = self.f0.iter().map(|&v| v * inv_hd).collect();
        lu.solve_in_place(&mut k1);

        let half = T::of(0.5);
        for i in 0..n {
            self.tmp[i] = y[i] + half * h * k1[i];
        }
        f.eval(&self.tmp, &mut self.f1);
        let mut k2: Vec<T> = (0..n).map(|i| (self.f1[i] - k1[i]) * inv_hd).collect();
        lu.solve_in_place(&mut k2);
        for i in 0..n {
            k2[i] += k1[i];
            y_new[i] = y[i] + h * k2[i];
        }
        f.eval(y_new, &mut self.f2);
        let two = T::of(2.0);
        let mut k3: Vec<T> = (0..n)
            .map(|i| (self.f2[i] - e32 * (k2[i] - self.f1[i]) - two * (k1[i] - self.f0[i])) * inv_hd)
            .collect();
        lu.solve_in_place(&mut k3);
        let sixth = h / T::of(6.0);
        for i in 0..n {
            err[i] = sixth * (k1[i] - two * k2[i] + k3[i]);
        }
        self.evals += 3;
        if !all_finite(y_new) || !all_finite(err) {
            return Err(StepError::NonFinite);
        }
        Ok(())
    }
}

// Shampine's fourth-order Rosenbrock parameters with embedded third-order
// estimate (autonomous form).
const GAM: f64 = 0.5;
const RA21: f64 = 2.0;
const RA31: f64 = 48.0 / 25.0;
const RA32: f64 = 6.0 / 25.0;
const RC21: f64 = -8.0;
const RC31: f64 = 372.0 / 25.0;
const RC32: f64 = 12.0 / 5.0;
const RC41: f64 = -112.0 / 125.0;
const RC42: f64 = -54.0 / 125.0;
const RC43: f64 = -2.0 / 5.0;
const RB1: f64 = 19.0 / 9.0;
const RB2: f64 = 1.0 / 2.0;
const RB3: f64 = 25.0 / 108.0;
const RB4: f64 = 125.0 / 108.0;
const RE1: f64 = 17.0 / 54.0;
const RE2: f64 = 7.0 / 36.0;
const RE4: f64 = 125.0 / 108.0;

pub(crate) struct Rosenbrock4<T: Real> {
    jac: Option<Matrix<T>>,
    g: [Vec<T>; 4],
    tmp: Vec<T>,
    dy: Vec<T>,
    jac_evals: usize,
    evals: usize,
}

impl<T: Real> Rosenbrock4<T> {
    fn new(dim: usize) -> Self {
        Self {
            jac: None,
            g: std::array::from_fn(|_| vec![T::zero(); dim]),
            tmp: vec![T::zero(); dim],
            dy: vec![T::zero(); dim],
            jac_evals: 0,
            evals: 0,
        }
    }

    fn step<F: VectorField<T> + ?Sized>(
        &mut self,
        f: &F,
        y: &[T],
        h: T,
        y_new: &mut [T],
        err: &mut [T],
    ) -> Result<(), StepError> {
        let n = y.len();
        if self.jac.is_none() {
            self.jac = Some(f.jacobian(y));
            self.jac_evals += 1;
        }
        let jac = self.jac.as_ref().expect("jacobian cached");
        let lu = factor_shifted(jac, T::of(GAM) * h)?;
        let c = |v: f64| T::of(v);

        f.eval(y, &mut self.g[0]);
        lu.solve_in_place(&mut self.g[0]);

        for i in 0..n {
            self.tmp[i] = y[i] + c(RA21) * self.g[0][i];
        }
        f.eval(&self.tmp, &mut self.dy);
        for i in 0..n {
            self.g[1][i] = self.dy[i] + c(RC21) * self.g[0][i] / h;
        }
        lu.solve_in_place(&mut self.g[1]);

        for i in 0..n {
            self.tmp[i] = y[i] + c(RA31) * self.g[0][i] + c(RA32) * self.g[1][i];
        }
        f.eval(&self.tmp, &mut self.dy);
        for i in 0..n {
            self.g[2][i] = self.dy[i] + (c(RC31) * self.g[0][i] + c(RC32) * self.g[1][i]) / h;
        }
        lu.solve_in_place(&mut self.g[2]);
        for i in 0..n {
            self.g[3][i] = self.dy[i]
                + (c(RC41) * self.g[0][i] + c(RC42) * self.g[1][i] + c(RC43) * self.g[2][i]) / h;
        }
        lu.solve_in_place(&mut self.g[3]);

        for i in 0..n {
            y_new[i] = y[i]
                + c(RB1) * self.g[0][i]
                + c(RB2) * self.g[1][i]
                + c(RB3) * self.g[2][i]
                + c(RB4) * self.g[3][i];
            err[i] = c(RE1) * self.g[0][i] + c(RE2) * self.g[1][i] + c(RE4) * self.g[3][i];
        }
        self.evals += 3;
        if !all_finite(y_new) || !all_finite(err) {
            return Err(StepError::NonFinite);
        }
        Ok(())
    }
}

/// One step of size exactly `h` without error control.
pub(crate) fn single_step<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    method: Method,
    from: &[T],
    h: T,
) -> Option<Vec<T>> {
    let mut stepper = Stepper::new(method, from.len());
    let mut out = vec![T::zero(); from.len()];
    let mut err = vec![T::zero(); from.len()];
    stepper.step(field, from, h, &mut out, &mut err).ok().map(|_| out)
}
