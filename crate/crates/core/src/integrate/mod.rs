//! Adaptive integration of autonomous vector fields.
//!
//! Three kernels are available: Dormand–Prince 5(4) for non-stiff work and
//! two linearly implicit Rosenbrock methods for stiff slow–fast systems in
//! slow time. The method is chosen explicitly in [`IntegratorConfig`]; there
//! is no automatic stiffness switching.

mod events;
mod steppers;
mod variational;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use events::{integrate_with_events, integrate_with_events_until, Crossing, Direction, EventOutcome, EventSpec};
pub use variational::{integrate_variational, VariationalTrajectory};

use crate::domain::Polytope;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::real::{all_finite, norm_inf, Real};
use steppers::{StepError, Stepper};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Adaptive explicit Runge–Kutta 5(4).
    DormandPrince45,
    /// Linearly implicit, order 2, L-stable; tolerates Jacobian reuse.
    Rosenbrock23,
    /// Linearly implicit, order 4 with an order-3 embedded estimate.
    Rosenbrock4,
}

impl Method {
    pub fn is_stiff(self) -> bool {
        !matches!(self, Method::DormandPrince45)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct IntegratorConfig<T: Real> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; `None` selects one from the local scale of the field.
    pub h_init: Option<T>,
    pub h_max: T,
    pub max_steps: usize,
    pub method: Method,
    /// A domain is considered left once its margin drops below `-domain_slack`.
    pub domain_slack: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rtol: T::of(1e-8),
            atol: T::of(1e-10),
            h_init: None,
            h_max: T::infinity(),
            max_steps: 1_000_000,
            method: Method::DormandPrince45,
            domain_slack: T::of(1e-8),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn stiff() -> Self {
        Self {
            method: Method::Rosenbrock4,
            ..Self::default()
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerances(mut self, rtol: T, atol: T) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_h_max(mut self, h_max: T) -> Self {
        self.h_max = h_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > T::zero() && self.rtol <= T::of(1e-2)) {
            return Err(Error::Config(format!("rtol must lie in (0, 1e-2], got {}", self.rtol)));
        }
        if !(self.atol > T::zero()) {
            return Err(Error::Config(format!("atol must be positive, got {}", self.atol)));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be at least 1".into()));
        }
        if let Some(h) = self.h_init {
            if !(h > T::zero()) {
                return Err(Error::Config("h_init must be positive".into()));
            }
        }
        if !(self.h_max > T::zero()) {
            return Err(Error::Config("h_max must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Completed,
    LeftDomain,
    StepFailure,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrationStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
    pub jacobians: usize,
}

/// Time-stamped states from one integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub status: Status,
    pub stats: IntegrationStats,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[T] {
        self.states.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn final_time(&self) -> T {
        self.times.last().copied().unwrap_or_else(T::zero)
    }

    /// Writes `t,x1..xn,y1..ym` rows; `n` is the slow dimension.
    pub fn write_csv<W: Write>(&self, n: usize, mut w: W) -> io::Result<()> {
        let dim = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n.min(dim)).map(|i| format!("x{i}")));
        header.extend((1..=dim.saturating_sub(n)).map(|i| format!("y{i}")));
        writeln!(w, "{}", header.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            write!(w, "{t}")?;
            for v in s {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Which states end up in a [`Trajectory`].
#[derive(Debug, Clone, PartialEq)]
pub enum Output<T: Real> {
    /// Every accepted step.
    Steps,
    /// Exactly the listed times (steps are shortened to land on them).
    Times(Vec<T>),
    /// Only the final state.
    Final,
}

pub(crate) enum StepControl<T> {
    Continue,
    Stop,
    /// Stop and report this `(t, state)` as the final point.
    StopAt(T, Vec<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum AdvanceResult {
    Reached,
    Stopped,
    StepFailure,
    MaxSteps,
}

/// Stateful adaptive stepper; advances a single solution in time.
pub struct Integrator<'f, T: Real, F: VectorField<T> + ?Sized> {
    field: &'f F,
    cfg: IntegratorConfig<T>,
    stepper: Stepper<T>,
    t: T,
    y: Vec<T>,
    h: Option<T>,
    y_new: Vec<T>,
    err: Vec<T>,
    accepted: usize,
    rejected: usize,
}

impl<'f, T: Real, F: VectorField<T> + ?Sized> Integrator<'f, T, F> {
    pub fn new(field: &'f F, s0: &[T], t0: T, cfg: IntegratorConfig<T>) -> Result<Self> {
        cfg.validate()?;
        if s0.len() != field.dim() {
            return Err(Error::Dimension {
                expected: field.dim(),
                got: s0.len(),
            });
        }
        if !all_finite(s0) {
            return Err(Error::NonFinite("initial state"));
        }
        let n = s0.len();
        Ok(Self {
            field,
            stepper: Stepper::new(cfg.method, n),
            h: cfg.h_init,
            cfg,
            t: t0,
            y: s0.to_vec(),
            y_new: vec![T::zero(); n],
            err: vec![T::zero(); n],
            accepted: 0,
            rejected: 0,
        })
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn state(&self) -> &[T] {
        &self.y
    }

    pub fn config(&self) -> &IntegratorConfig<T> {
        &self.cfg
    }

    pub fn stats(&self) -> IntegrationStats {
        IntegrationStats {
            accepted: self.accepted,
            rejected: self.rejected,
            evals: self.stepper.eval_count(),
            jacobians: self.stepper.jacobian_count(),
        }
    }

    fn error_norm(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.y.len() {
            let scale = self.cfg.atol + self.cfg.rtol * self.y[i].abs().max(self.y_new[i].abs());
            worst = worst.max(self.err[i].abs() / scale);
        }
        worst
    }

    /// Hairer–Wanner starting step heuristic.
    fn initial_step(&self, span: T) -> T {
        let f0 = self.field.call(&self.y);
        let sc: Vec<T> = self
            .y
            .iter()
            .map(|&v| self.cfg.atol + self.cfg.rtol * v.abs())
            .collect();
        let d0 = self.y.iter().zip(&sc).fold(T::zero(), |a, (&v, &s)| a.max((v / s).abs()));
        let d1 = f0.iter().zip(&sc).fold(T::zero(), |a, (&v, &s)| a.max((v / s).abs()));
        let small = T::of(1e-5);
        let mut h0 = if d0 < small || d1 < small {
            T::of(1e-6)
        } else {
            T::of(0.01) * d0 / d1
        };
        h0 = h0.min(span.abs());
        let y1: Vec<T> = self.y.iter().zip(&f0).map(|(&v, &f)| v + h0 * f).collect();
        let f1 = self.field.call(&y1);
        let d2 = f1
            .iter()
            .zip(&f0)
            .zip(&sc)
            .fold(T::zero(), |a, ((&u, &v), &s)| a.max(((u - v) / s).abs()))
            / h0;
        let h1 = if d1.max(d2) <= T::of(1e-15) {
            (h0 * T::of(1e-3)).max(T::of(1e-6))
        } else {
            (T::of(0.01) / d1.max(d2)).powf(self.stepper.error_exponent())
        };
        (T::of(100.0) * h0).min(h1).min(self.cfg.h_max).min(span.abs())
    }

    /// Advances to `t_target`, invoking `on_step(t_prev, y_prev, t, y)` after
    /// every accepted step.
    pub(crate) fn advance_with<C>(&mut self, t_target: T, mut on_step: C) -> AdvanceResult
    where
        C: FnMut(T, &[T], T, &[T]) -> StepControl<T>,
    {
        if self.t >= t_target {
            return AdvanceResult::Reached;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(t_target - self.t),
        };
        let exponent = self.stepper.error_exponent();
        let (safety, fac_min, fac_max) = (T::of(0.9), T::of(0.2), T::of(5.0));
        let mut last_rejected = false;
        loop {
            if self.accepted >= self.cfg.max_steps {
                self.h = Some(h);
                return AdvanceResult::MaxSteps;
            }
            let remaining = t_target - self.t;
            h = h.min(self.cfg.h_max);
            let clipped = h >= remaining;
            let h_step = if clipped { remaining } else { h };
            let h_min = T::epsilon() * T::of(16.0) * self.t.abs().max(T::one());
            if h_step < h_min && !clipped {
                self.h = Some(h);
                return AdvanceResult::StepFailure;
            }
            let y = std::mem::take(&mut self.y);
            let res = self.stepper.step(self.field, &y, h_step, &mut self.y_new, &mut self.err);
            self.y = y;
            match res {
                Err(StepError::NonFinite) | Err(StepError::Singular) => {
                    self.rejected += 1;
                    last_rejected = true;
                    h = h_step * T::of(0.25);
                    if h < h_min {
                        self.h = Some(h);
                        return AdvanceResult::StepFailure;
                    }
                    continue;
                }
                Ok(()) => {}
            }
            let err = self.error_norm();
            if err <= T::one() {
                let t_prev = self.t;
                let t_new = if clipped { t_target } else { self.t + h_step };
                std::mem::swap(&mut self.y, &mut self.y_new);
                self.t = t_new;
                self.accepted += 1;
                self.stepper.accept();
                let mut fac = if err == T::zero() {
                    fac_max
                } else {
                    (safety * err.powf(-exponent)).min(fac_max).max(fac_min)
                };
                if last_rejected {
                    fac = fac.min(T::one());
                }
                last_rejected = false;
                let proposed = h_step * fac;
                h = if clipped { proposed.max(h) } else { proposed };
                // y_new now holds the previous state
                let ctrl = on_step(t_prev, &self.y_new, t_new, &self.y);
                match ctrl {
                    StepControl::Continue => {}
                    StepControl::Stop => {
                        self.h = Some(h);
                        return AdvanceResult::Stopped;
                    }
                    StepControl::StopAt(t, s) => {
                        self.t = t;
                        self.y = s;
                        self.stepper.reset();
                        self.h = Some(h);
                        return AdvanceResult::Stopped;
                    }
                }
                if clipped {
                    self.h = Some(h);
                    return AdvanceResult::Reached;
                }
            } else {
                self.rejected += 1;
                last_rejected = true;
                h = h_step * (safety * err.powf(-exponent)).max(fac_min).min(T::one());
            }
        }
    }

    /// Advances to `t_target` with no per-step hook.
    pub fn advance_to(&mut self, t_target: T) -> Status {
        match self.advance_with(t_target, |_, _, _, _| StepControl::Continue) {
            AdvanceResult::Reached | AdvanceResult::Stopped => Status::Completed,
            AdvanceResult::StepFailure => Status::StepFailure,
            AdvanceResult::MaxSteps => Status::MaxSteps,
        }
    }

}

/// Linear interpolation to the point where the domain margin reaches zero.
fn domain_exit<T: Real>(dom: &Polytope<T>, t0: T, y0: &[T], t1: T, y1: &[T]) -> (T, Vec<T>) {
    let m0 = dom.margin(y0);
    let m1 = dom.margin(y1);
    let theta = if m0 - m1 > T::zero() {
        (m0 / (m0 - m1)).max(T::zero()).min(T::one())
    } else {
        T::one()
    };
    let y = y0.iter().zip(y1).map(|(&a, &b)| a + theta * (b - a)).collect();
    (t0 + theta * (t1 - t0), y)
}

/// Integrates `dz/dt = F(z)` over `t_span`.
///
/// Step failures and domain exits are reported through
/// [`Trajectory::status`], not as errors. Errors are reserved for invalid
/// inputs.
pub fn integrate<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    s0: &[T],
    t_span: (T, T),
    cfg: &IntegratorConfig<T>,
    domain: Option<&Polytope<T>>,
    output: &Output<T>,
) -> Result<Trajectory<T>> {
    let (t0, t1) = t_span;
    if !(t0 < t1) {
        return Err(Error::Config(format!("t_span must be increasing, got ({t0}, {t1})")));
    }
    let mut integ = Integrator::new(field, s0, t0, *cfg)?;
    let mut times = vec![t0];
    let mut states = vec![s0.to_vec()];
    let slack = cfg.domain_slack;

    let mut targets: Vec<T> = match output {
        Output::Times(ts) => {
            let mut ts: Vec<T> = ts.iter().copied().filter(|&t| t > t0 && t <= t1).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).expect("finite output times"));
            ts.dedup();
            ts
        }
        Output::Steps | Output::Final => vec![t1],
    };
    if targets.last().is_none_or(|&t| t < t1) {
        targets.push(t1);
    }

    let mut status = Status::Completed;
    'outer: for &target in &targets {
        let mut exit: Option<(T, Vec<T>)> = None;
        let record_steps = matches!(output, Output::Steps);
        let res = integ.advance_with(target, |tp, yp, t, y| {
            if let Some(dom) = domain {
                if dom.margin(y) < -slack {
                    let (te, ye) = domain_exit(dom, tp, yp, t, y);
                    exit = Some((te, ye.clone()));
                    return StepControl::StopAt(te, ye);
                }
            }
            if record_steps && t < target {
                times.push(t);
                states.push(y.to_vec());
            }
            StepControl::Continue
        });
        match res {
            AdvanceResult::Reached => {
                if !matches!(output, Output::Final) || target == t1 {
                    times.push(integ.time());
                    states.push(integ.state().to_vec());
                }
            }
            AdvanceResult::Stopped => {
                if let Some((te, ye)) = exit.take() {
                    times.push(te);
                    states.push(ye);
                }
                status = Status::LeftDomain;
                break 'outer;
            }
            AdvanceResult::StepFailure => {
                times.push(integ.time());
                states.push(integ.state().to_vec());
                status = Status::StepFailure;
                break 'outer;
            }
            AdvanceResult::MaxSteps => {
                times.push(integ.time());
                states.push(integ.state().to_vec());
                status = Status::MaxSteps;
                break 'outer;
            }
        }
    }
    if matches!(output, Output::Final) && times.len() > 2 {
        let last_t = *times.last().expect("non-empty");
        let last_s = states.pop().expect("non-empty");
        times = vec![t0, last_t];
        states = vec![s0.to_vec(), last_s];
    }
    // drop duplicate timestamps (an exit exactly at an output time)
    let mut k = 1;
    while k < times.len() {
        if times[k] <= times[k - 1] {
            times.remove(k);
            states.remove(k);
        } else {
            k += 1;
        }
    }
    Ok(Trajectory {
        times,
        states,
        status,
        stats: integ.stats(),
    })
}

/// Largest `|F(z)|∞` along a set of states; convenience for tests and
/// convergence checks.
pub fn field_norm<T: Real, F: VectorField<T> + ?Sized>(field: &F, z: &[T]) -> T {
    norm_inf(&field.call(z))
}
