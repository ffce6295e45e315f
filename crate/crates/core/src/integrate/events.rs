//! Zero-crossing detection of a scalar event function along a trajectory.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::steppers::single_step;
use super::{AdvanceResult, IntegrationStats, Integrator, IntegratorConfig, Status, StepControl, Trajectory};
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Up,
    Down,
    Both,
}

impl Direction {
    fn matches<T: Real>(self, before: T, after: T) -> bool {
        let up = before < T::zero() && after >= T::zero();
        let down = before > T::zero() && after <= T::zero();
        match self {
            Direction::Up => up,
            Direction::Down => down,
            Direction::Both => up || down,
        }
    }
}

type EventFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

#[derive(Clone)]
pub struct EventSpec<T: Real> {
    func: EventFn<T>,
    pub direction: Direction,
    pub tol: T,
    label: String,
}

impl<T: Real> fmt::Debug for EventSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EventSpec")
            .field("label", &self.label)
            .field("direction", &self.direction)
            .field("tol", &self.tol)
            .finish()
    }
}

impl<T: Real> EventSpec<T> {
    pub fn new(func: impl Fn(&[T]) -> T + Send + Sync + 'static, direction: Direction, tol: T) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::Config("event refinement tolerance must be positive".into()));
        }
        Ok(Self {
            func: Arc::new(func),
            direction,
            tol,
            label: "custom".into(),
        })
    }

    /// The hyperplane `z[index] = value`.
    pub fn coordinate(index: usize, value: T, direction: Direction, tol: T) -> Result<Self> {
        let mut ev = Self::new(move |z: &[T]| z[index] - value, direction, tol)?;
        ev.label = format!("z{} = {}", index + 1, value);
        Ok(ev)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: &[T]) -> T {
        (self.func)(z)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Crossing<T: Real> {
    pub t: T,
    pub state: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EventOutcome<T: Real> {
    pub crossings: Vec<Crossing<T>>,
    pub status: Status,
    /// Accepted steps (for amplitude and convergence diagnostics).
    pub trajectory: Trajectory<T>,
}

/// Bisection on the sub-step length inside an accepted step `[0, h]`.
fn refine<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    cfg: &IntegratorConfig<T>,
    event: &EventSpec<T>,
    t_prev: T,
    y_prev: &[T],
    h: T,
    y_new: &[T],
) -> Crossing<T> {
    let g_lo = event.eval(y_prev);
    let (mut lo, mut hi) = (T::zero(), h);
    let mut best = Crossing {
        t: t_prev + h,
        state: y_new.to_vec(),
    };
    let half = T::of(0.5);
    for _ in 0..200 {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let Some(y_mid) = single_step(field, cfg.method, y_prev, mid) else {
            break;
        };
        let g = event.eval(&y_mid);
        best = Crossing {
            t: t_prev + mid,
            state: y_mid,
        };
        if g.abs() <= event.tol {
            break;
        }
        if (g < T::zero()) == (g_lo < T::zero()) && g != T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

/// Integrates until `max_crossings` crossings of `event` in the requested
/// direction have been found or `t_max` is reached.
pub fn integrate_with_events<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    s0: &[T],
    event: &EventSpec<T>,
    cfg: &IntegratorConfig<T>,
    t_max: T,
    max_crossings: usize,
) -> Result<EventOutcome<T>> {
    integrate_with_events_until(field, s0, event, cfg, t_max, max_crossings, |_| false)
}

/// As [`integrate_with_events`], but also stops as soon as `done` returns
/// true on the crossings collected so far.
pub fn integrate_with_events_until<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    s0: &[T],
    event: &EventSpec<T>,
    cfg: &IntegratorConfig<T>,
    t_max: T,
    max_crossings: usize,
    mut done: impl FnMut(&[Crossing<T>]) -> bool,
) -> Result<EventOutcome<T>> {
    let mut integ = Integrator::new(field, s0, T::zero(), *cfg)?;
    let mut crossings = Vec::new();
    let mut times = vec![T::zero()];
    let mut states = vec![s0.to_vec()];
    let res = if max_crossings == 0 {
        AdvanceResult::Stopped
    } else {
        integ.advance_with(t_max, |tp, yp, t, y| {
            times.push(t);
            states.push(y.to_vec());
            let (ga, gb) = (event.eval(yp), event.eval(y));
            if event.direction.matches(ga, gb) {
                crossings.push(refine(field, cfg, event, tp, yp, t - tp, y));
                if crossings.len() >= max_crossings || done(&crossings) {
                    return StepControl::Stop;
                }
            }
            StepControl::Continue
        })
    };
    let status = match res {
        AdvanceResult::Reached | AdvanceResult::Stopped => Status::Completed,
        AdvanceResult::StepFailure => Status::StepFailure,
        AdvanceResult::MaxSteps => Status::MaxSteps,
    };
    let stats: IntegrationStats = integ.stats();
    Ok(EventOutcome {
        crossings,
        status,
        trajectory: Trajectory {
            times,
            states,
            status,
            stats,
        },
    })
}
