//! Seeded Monte Carlo census of where trajectories started in `D_ε` end up.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equilibria::{Classification, Equilibrium};
use crate::domain::EpsPolytope;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::integrate::{AdvanceResult, Integrator, IntegratorConfig, StepControl};
use crate::real::{dist2, norm_inf, Real};
use crate::system::SlowFastSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CensusConfig<T: Real> {
    pub samples: usize,
    /// Slow-time horizon.
    pub horizon: T,
    /// Field-norm threshold; proximity to an equilibrium must be below
    /// `1000·tol`.
    pub tol: T,
    pub seed: u64,
    pub integrator: IntegratorConfig<T>,
}

impl<T: Real> CensusConfig<T> {
    pub fn proximity(&self) -> T {
        T::of(1e3) * self.tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Converged,
    Horizon,
    LeftDomain,
    StepFailure,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SampleOutcome<T: Real> {
    pub index: usize,
    pub initial: Vec<T>,
    pub outcome: Outcome,
    /// Index into the equilibrium list when converged.
    pub equilibrium: Option<usize>,
    pub terminal: Vec<T>,
    pub time: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BasinTally<T: Real> {
    pub location: Vec<T>,
    pub classification: Option<Classification>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NonConverged<T: Real> {
    pub index: usize,
    pub outcome: Outcome,
    pub terminal: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CensusReport<T: Real> {
    pub eps: T,
    pub samples: usize,
    pub converged: usize,
    pub converged_fraction: f64,
    pub basin_tallies: Vec<BasinTally<T>>,
    pub non_converged: Vec<NonConverged<T>>,
    pub horizon: T,
    pub tol: T,
    pub proximity: T,
    pub seed: u64,
    pub acceptance_rate: f64,
    pub rtol: T,
    pub atol: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Census<T: Real> {
    pub report: CensusReport<T>,
    pub outcomes: Vec<SampleOutcome<T>>,
}

impl<T: Real> Census<T> {
    /// `index,<initial…>,outcome,equilibrium,<terminal…>` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let d = self.outcomes.first().map_or(0, |o| o.initial.len());
        let mut head = vec!["index".to_string()];
        head.extend((1..=d).map(|i| format!("z{i}_0")));
        head.push("outcome".into());
        head.push("equilibrium".into());
        head.extend((1..=d).map(|i| format!("z{i}_end")));
        writeln!(w, "{}", head.join(","))?;
        for o in &self.outcomes {
            let mut row = vec![o.index.to_string()];
            row.extend(o.initial.iter().map(|v| v.to_string()));
            row.push(serde_json::to_value(o.outcome).map_or_else(|_| String::new(), |v| v.as_str().unwrap_or("").to_string()));
            row.push(o.equilibrium.map_or_else(String::new, |e| e.to_string()));
            row.extend(o.terminal.iter().map(|v| v.to_string()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn nearest<T: Real>(eqs: &[Equilibrium<T>], z: &[T]) -> Option<(usize, T)> {
    eqs.iter()
        .enumerate()
        .map(|(k, e)| (k, dist2(&e.location, z)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))
}

/// Integrates one sample until it settles at a listed equilibrium or the
/// horizon is reached.
fn run_sample<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    z0: &[T],
    eqs: &[Equilibrium<T>],
    cfg: &CensusConfig<T>,
    poly: &crate::domain::Polytope<T>,
) -> (Outcome, Option<usize>, Vec<T>, T) {
    let prox = cfg.proximity();
    let settled = |z: &[T]| -> Option<usize> {
        let (k, d) = nearest(eqs, z)?;
        (d < prox && norm_inf(&field.call(z)) < cfg.tol).then_some(k)
    };
    if let Some(k) = settled(z0) {
        return (Outcome::Converged, Some(k), z0.to_vec(), T::zero());
    }
    let Ok(mut integ) = Integrator::new(field, z0, T::zero(), cfg.integrator) else {
        return (Outcome::StepFailure, None, z0.to_vec(), T::zero());
    };
    let mut hit: Option<usize> = None;
    let mut left = false;
    let slack = cfg.integrator.domain_slack;
    let res = integ.advance_with(cfg.horizon, |_, _, _, z| {
        if poly.margin(z) < -slack {
            left = true;
            return StepControl::Stop;
        }
        if let Some(k) = settled(z) {
            hit = Some(k);
            return StepControl::Stop;
        }
        StepControl::Continue
    });
    let z = integ.state().to_vec();
    let t = integ.time();
    match res {
        AdvanceResult::Stopped if hit.is_some() => (Outcome::Converged, hit, z, t),
        AdvanceResult::Stopped if left => (Outcome::LeftDomain, None, z, t),
        AdvanceResult::Reached | AdvanceResult::Stopped => match settled(&z) {
            Some(k) => (Outcome::Converged, Some(k), z, t),
            None => (Outcome::Horizon, None, z, t),
        },
        AdvanceResult::StepFailure => (Outcome::StepFailure, None, z, t),
        AdvanceResult::MaxSteps => (Outcome::MaxSteps, None, z, t),
    }
}

/// Samples `D_ε` uniformly (rejection from its bounding box, fixed seed)
/// and integrates each sample in slow time.
///
/// Results are merged by sample index, so the report does not depend on
/// the number of worker threads.
pub fn convergence_census<T: Real>(
    sys: &SlowFastSystem<T>,
    domain: &EpsPolytope<T>,
    eps: T,
    equilibria: &[Equilibrium<T>],
    cfg: &CensusConfig<T>,
) -> Result<Census<T>> {
    cfg.integrator.validate()?;
    if !(cfg.horizon > T::zero()) || !(cfg.tol > T::zero()) {
        return Err(Error::Config("census horizon and tolerance must be positive".into()));
    }
    let poly = domain.at(eps)?;
    let field = sys.slow_time_field(eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (samples, acceptance) = poly.rejection_sample(&mut rng, cfg.samples);
    if samples.len() < cfg.samples {
        return Err(Error::InvalidState("rejection sampling of the domain failed".into()));
    }
    let outcomes: Vec<SampleOutcome<T>> = samples
        .par_iter()
        .enumerate()
        .map(|(index, z0)| {
            let (outcome, equilibrium, terminal, time) = run_sample(&field, z0, equilibria, cfg, &poly);
            SampleOutcome {
                index,
                initial: z0.clone(),
                outcome,
                equilibrium,
                terminal,
                time,
            }
        })
        .collect();
    let mut tallies: Vec<BasinTally<T>> = equilibria
        .iter()
        .map(|e| BasinTally {
            location: e.location.clone(),
            classification: e.classification,
            count: 0,
        })
        .collect();
    let mut non_converged = Vec::new();
    for o in &outcomes {
        match o.equilibrium {
            Some(k) => tallies[k].count += 1,
            None => non_converged.push(NonConverged {
                index: o.index,
                outcome: o.outcome,
                terminal: o.terminal.clone(),
            }),
        }
    }
    let converged = outcomes.len() - non_converged.len();
    Ok(Census {
        report: CensusReport {
            eps,
            samples: outcomes.len(),
            converged,
            converged_fraction: converged as f64 / outcomes.len().max(1) as f64,
            basin_tallies: tallies,
            non_converged,
            horizon: cfg.horizon,
            tol: cfg.tol,
            proximity: cfg.proximity(),
            seed: cfg.seed,
            acceptance_rate: acceptance,
            rtol: cfg.integrator.rtol,
            atol: cfg.integrator.atol,
        },
        outcomes,
    })
}
