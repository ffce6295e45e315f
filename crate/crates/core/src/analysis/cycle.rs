//! Limit-cycle detection from the return map of a Poincaré section.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::integrate::{integrate_with_events_until, Crossing, Direction, EventSpec, IntegratorConfig, Status};
use crate::real::{dist2, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CycleFound,
    ConvergedToEquilibrium,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CycleConfig<T: Real> {
    pub min_crossings: usize,
    pub max_crossings: usize,
    /// Number of trailing crossings that must agree pairwise.
    pub tail: usize,
    pub tol: T,
    /// Crossings this close to an equilibrium do not count as a cycle.
    pub clearance: T,
    pub t_max: T,
    pub integrator: IntegratorConfig<T>,
}

impl<T: Real> Default for CycleConfig<T> {
    fn default() -> Self {
        Self {
            min_crossings: 20,
            max_crossings: 400,
            tail: 5,
            tol: T::of(1e-6),
            clearance: T::of(1e-3),
            t_max: T::of(1e4),
            integrator: IntegratorConfig::default().with_tolerances(T::of(1e-11), T::of(1e-13)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SectionInfo<T: Real> {
    pub label: String,
    pub direction: Direction,
    pub tol: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LimitCycleReport<T: Real> {
    pub section: SectionInfo<T>,
    pub crossings: Vec<Crossing<T>>,
    pub fixed_point: Option<Vec<T>>,
    pub period: Option<T>,
    pub amplitude: Option<T>,
    /// Largest pairwise distance among the trailing crossings.
    pub tail_spread: Option<T>,
    pub verdict: Verdict,
    pub integration_status: Status,
    pub final_state: Vec<T>,
    pub final_time: T,
    pub config: CycleConfig<T>,
}

fn spread<T: Real>(cs: &[Crossing<T>]) -> T {
    let mut worst = T::zero();
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            worst = worst.max(dist2(&a.state, &b.state));
        }
    }
    worst
}

fn nearest_distance<T: Real>(eqs: &[Vec<T>], z: &[T]) -> Option<T> {
    eqs.iter().map(|e| dist2(e, z)).reduce(T::min)
}

/// Integrates from `s0`, collecting crossings of `section`. The run stops
/// once at least `min_crossings` are in hand and the last `tail` of them
/// agree pairwise to `tol` away from every known equilibrium.
pub fn detect_limit_cycle<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    s0: &[T],
    section: &EventSpec<T>,
    equilibria: &[Vec<T>],
    cfg: &CycleConfig<T>,
) -> Result<LimitCycleReport<T>> {
    if cfg.tail < 2 || cfg.min_crossings < cfg.tail || cfg.max_crossings < cfg.min_crossings {
        return Err(Error::Config("need 2 <= tail <= min_crossings <= max_crossings".into()));
    }
    if !(cfg.tol > T::zero()) || !(cfg.t_max > T::zero()) {
        return Err(Error::Config("cycle tolerance and horizon must be positive".into()));
    }
    let settled = |cs: &[Crossing<T>]| -> bool {
        if cs.len() < cfg.min_crossings {
            return false;
        }
        let tail = &cs[cs.len() - cfg.tail..];
        spread(tail) < cfg.tol
            && tail
                .iter()
                .all(|c| nearest_distance(equilibria, &c.state).is_none_or(|d| d > cfg.clearance))
    };
    let out = integrate_with_events_until(field, s0, section, &cfg.integrator, cfg.t_max, cfg.max_crossings, settled)?;
    let traj = &out.trajectory;
    let final_state = traj.last_state().to_vec();
    let final_time = traj.final_time();
    let cs = out.crossings;

    let mut report = LimitCycleReport {
        section: SectionInfo {
            label: section.label().to_string(),
            direction: section.direction,
            tol: section.tol,
        },
        crossings: Vec::new(),
        fixed_point: None,
        period: None,
        amplitude: None,
        tail_spread: None,
        verdict: Verdict::Inconclusive,
        integration_status: out.status,
        final_state,
        final_time,
        config: *cfg,
    };
    if cs.len() >= cfg.tail {
        report.tail_spread = Some(spread(&cs[cs.len() - cfg.tail..]));
    }
    if settled(&cs) {
        let tail = &cs[cs.len() - cfg.tail..];
        let t0 = tail[0].t;
        let period = (tail[cfg.tail - 1].t - t0) / T::of((cfg.tail - 1) as f64);
        // reference point: nearest equilibrium to the fixed point, else the
        // centroid of the last loop
        let fixed = tail[cfg.tail - 1].state.clone();
        let t_loop = tail[cfg.tail - 2].t;
        let orbit: Vec<&Vec<T>> = traj
            .times
            .iter()
            .zip(&traj.states)
            .filter(|(&t, _)| t >= t_loop)
            .map(|(_, s)| s)
            .collect();
        let centre = match equilibria
            .iter()
            .min_by(|a, b| dist2(a, &fixed).partial_cmp(&dist2(b, &fixed)).expect("finite"))
        {
            Some(e) => e.clone(),
            None => {
                let mut c = vec![T::zero(); fixed.len()];
                for s in &orbit {
                    for (ci, &v) in c.iter_mut().zip(s.iter()) {
                        *ci += v;
                    }
                }
                let k = T::of(orbit.len().max(1) as f64);
                c.iter_mut().for_each(|v| *v /= k);
                c
            }
        };
        let amplitude = orbit.iter().map(|s| dist2(s, &centre)).fold(T::zero(), T::max);
        report.period = Some(period);
        report.amplitude = Some(amplitude);
        report.fixed_point = Some(fixed);
        if amplitude > T::of(10.0) * cfg.tol {
            report.verdict = Verdict::CycleFound;
        }
    } else if out.status == Status::Completed
        && nearest_distance(equilibria, &report.final_state).is_some_and(|d| d < cfg.clearance)
    {
        report.verdict = Verdict::ConvergedToEquilibrium;
    }
    report.crossings = cs;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    #[test]
    fn rotation_period() {
        let rot = FnField::new(2, |z: &[f64], out: &mut [f64]| {
            out[0] = -z[1];
            out[1] = z[0];
        });
        let sec = EventSpec::coordinate(1, 0.0, Direction::Up, 1e-12).unwrap();
        let r = detect_limit_cycle(&rot, &[1.0, 0.0], &sec, &[vec![0.0, 0.0]], &CycleConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::CycleFound);
        assert!((r.period.unwrap() - std::f64::consts::TAU).abs() < 1e-4);
        assert!((r.amplitude.unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn decaying_spiral_converges() {
        let f = FnField::new(2, |z: &[f64], out: &mut [f64]| {
            out[0] = -0.5 * z[0] - z[1];
            out[1] = z[0] - 0.5 * z[1];
        });
        let sec = EventSpec::coordinate(1, 0.0, Direction::Up, 1e-12).unwrap();
        let cfg = CycleConfig {
            t_max: 200.0,
            ..CycleConfig::default()
        };
        let r = detect_limit_cycle(&f, &[1.0, 0.0], &sec, &[vec![0.0, 0.0]], &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::ConvergedToEquilibrium);
    }

    #[test]
    fn no_crossings_is_inconclusive() {
        let f = FnField::new(2, |_z: &[f64], out: &mut [f64]| {
            out[0] = 1.0;
            out[1] = 0.0;
        });
        let sec = EventSpec::coordinate(1, 0.0, Direction::Up, 1e-12).unwrap();
        let cfg = CycleConfig {
            t_max: 10.0,
            ..CycleConfig::default()
        };
        let r = detect_limit_cycle(&f, &[0.0, 1.0], &sec, &[], &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.crossings.is_empty());
    }
}
