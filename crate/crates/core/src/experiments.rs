//! Model-level workflows shared by the command-line tool and the tests.
//! These work on `f64` models only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    find_equilibria, lift_equilibria, planar_equilibria, reduced_field, scalar_equilibria, Equilibrium, NewtonConfig,
};
use crate::domain::Polytope;
use crate::error::{Error, Result};
use crate::field::{FnField, VectorField};
use crate::integrate::IntegratorConfig;
use crate::models::futile::k0_grid;
use crate::models::{FutileCycleParams, Model};
use crate::monotone::{
    eventually_positive_derivatives, kamke_check, monotone_order_preservation_test, EpdReport, KamkeReport,
    OrthantCone, PairOutcome, DEFAULT_T_GRID,
};
use crate::system::State;

/// `K0 = {x ≥ 0, x1 + x2 ≤ 1}`.
pub fn k0() -> Polytope<f64> {
    Polytope::new(
        vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]],
        vec![0.0, 0.0, 1.0],
    )
}

/// The reduced (ε = 0) field of a model and the slow region it is studied
/// on.
pub fn reduced_of(model: &Model<f64>) -> Result<(FnField<f64>, Polytope<f64>)> {
    match model {
        Model::Counterexample(cp) => {
            let sys = cp.system();
            Ok((reduced_field(&sys), Polytope::from_box(&[-cp.a], &[cp.a])))
        }
        _ => {
            let p = model.futile_params().expect("futile model");
            Ok((p.scaled().reduced_field(), k0()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriaReport {
    /// Roots of the reduced system.
    pub reduced: Vec<Equilibrium<f64>>,
    /// Roots of the full system at ε (species concentrations for the
    /// mass-action model); empty for the reduced model.
    pub full: Vec<Equilibrium<f64>>,
    pub scan_resolution: usize,
    pub newton: NewtonConfig<f64>,
}

/// Reduced roots from a sign-change scan, lifted through `m0` and refined
/// on the full system.
pub fn model_equilibria(model: &Model<f64>, resolution: usize, cfg: &NewtonConfig<f64>) -> Result<EquilibriaReport> {
    let eps = model.eps();
    let (reduced, full) = match model {
        Model::Counterexample(cp) => {
            let (red, _) = reduced_of(model)?;
            let roots = scalar_equilibria(&red, -cp.a, cp.a, resolution.max(2), cfg)?;
            let (sys, dom) = model.slow_fast().expect("slow-fast form");
            let seeds: Vec<Vec<f64>> = roots.iter().map(|e| e.location.clone()).collect();
            let full = lift_equilibria(&sys, eps, &seeds, Some(&dom.at(eps)?), cfg)?;
            (roots, full)
        }
        _ => {
            let p: &FutileCycleParams<f64> = model.futile_params().expect("futile model");
            let fc = p.scaled();
            let red = fc.reduced_field();
            let roots = planar_equilibria(&red, [0.0, 0.0], [1.0, 1.0], resolution, Some(&k0()), cfg)?;
            let seeds: Vec<Vec<f64>> = roots.iter().map(|e| e.location.clone()).collect();
            let full = match model {
                Model::FutileCycleReduced(_) => Vec::new(),
                Model::FutileCycle(_) => {
                    let (sys, dom) = model.slow_fast().expect("slow-fast form");
                    lift_equilibria(&sys, eps, &seeds, Some(&dom.at(eps)?), cfg)?
                }
                _ => {
                    let ma = p.mass_action();
                    let mut species = Vec::new();
                    for x in &seeds {
                        let s = State::new(x.clone(), fc.m0(x)?.to_vec())?;
                        species.push(ma.from_scaled(&fc, 0.0, &s).1.to_vec());
                    }
                    // residuals are in concentration units
                    let scaled = NewtonConfig {
                        residual_tol: cfg.residual_tol * p.e_tot,
                        dedupe_radius: cfg.dedupe_radius * p.s_tot,
                        ..*cfg
                    };
                    find_equilibria(&ma.field(), None, &species, &scaled)?
                }
            };
            (roots, full)
        }
    };
    Ok(EquilibriaReport {
        reduced,
        full,
        scan_resolution: resolution,
        newton: *cfg,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneConfig {
    pub cone: Option<String>,
    /// Cells per side of the Kamke grid on `K0`, or the point count in one
    /// dimension.
    pub kamke_grid: usize,
    pub epd_samples: usize,
    pub t_grid: Vec<f64>,
    pub pairs: usize,
    pub pair_time: f64,
    pub seed: u64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for MonotoneConfig {
    fn default() -> Self {
        Self {
            cone: None,
            kamke_grid: 46,
            epd_samples: 20,
            t_grid: DEFAULT_T_GRID.to_vec(),
            pairs: 100,
            pair_time: 5.0,
            seed: 7,
            rtol: 1e-9,
            atol: 1e-11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub pairs: usize,
    pub preserved: usize,
    pub time: f64,
    pub strong: bool,
    pub outcomes: Vec<PairOutcome<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCheckReport {
    pub cone: Vec<i8>,
    pub kamke: KamkeReport<f64>,
    pub epd: EpdReport<f64>,
    pub order_preservation: PairSummary,
    pub passed: bool,
    pub config: MonotoneConfig,
}

/// Uniform points strictly inside `region` (a polytope in one or two
/// dimensions).
fn interior_samples(region: &Polytope<f64>, n: usize, inset: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let (lo, hi) = region.bounding_box();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p: Vec<f64> = lo.iter().zip(&hi).map(|(&l, &h)| rng.gen_range(l..h)).collect();
        if region.margin(&p) > inset {
            out.push(p);
        }
    }
    out
}

/// Ordered pairs `u ≤ v` in the cone order, both inside `region`.
pub fn ordered_pairs(
    cone: &OrthantCone,
    region: &Polytope<f64>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u = interior_samples(region, 1, 0.02, rng).remove(0);
        let v: Vec<f64> = u
            .iter()
            .zip(cone.signs())
            .map(|(&a, &s)| a + f64::from(s) * rng.gen_range(0.0..0.05))
            .collect();
        if region.margin(&v) > 0.0 && cone.compare(&u, &v).is_ordered() {
            out.push((u, v));
        }
    }
    out
}

/// Kamke condition on a grid, eventually positive derivatives on random
/// samples and order preservation on random ordered pairs, all for the
/// reduced flow.
pub fn monotone_check(model: &Model<f64>, cfg: &MonotoneConfig) -> Result<MonotoneCheckReport> {
    let (field, region) = reduced_of(model)?;
    let cone = match (&cfg.cone, field.dim()) {
        (Some(s), _) => OrthantCone::parse(s)?,
        (None, 2) => OrthantCone::parse("(-,+)")?,
        (None, d) => OrthantCone::positive(d),
    };
    if cone.dim() != field.dim() {
        return Err(Error::Dimension {
            expected: field.dim(),
            got: cone.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let kamke_points: Vec<Vec<f64>> = if field.dim() == 2 {
        k0_grid::<f64>(cfg.kamke_grid)
            .into_iter()
            .map(|x| x.to_vec())
            .filter(|x| region.margin(x) > 0.0)
            .collect()
    } else {
        interior_samples(&region, cfg.kamke_grid, 0.0, &mut rng)
    };
    let kamke = kamke_check(&field, &kamke_points, &cone, true)?;
    let icfg = IntegratorConfig::default().with_tolerances(cfg.rtol, cfg.atol);
    let epd_points = interior_samples(&region, cfg.epd_samples, 1e-3, &mut rng);
    let epd = eventually_positive_derivatives(&field, &cone, &epd_points, &cfg.t_grid, &icfg, Some(&region))?;
    let pairs = ordered_pairs(&cone, &region, cfg.pairs, &mut rng);
    let outcomes = monotone_order_preservation_test(&field, &cone, &pairs, cfg.pair_time, true, &icfg)?;
    let preserved = outcomes.iter().filter(|o| o.preserved).count();
    let passed = kamke.passed() && epd.achieved && preserved == outcomes.len();
    Ok(MonotoneCheckReport {
        cone: cone.signs().to_vec(),
        kamke,
        epd,
        order_preservation: PairSummary {
            pairs: outcomes.len(),
            preserved,
            time: cfg.pair_time,
            strong: true,
            outcomes,
        },
        passed,
        config: cfg.clone(),
    })
}

/// A default starting state: for the futile-cycle forms a point off the
/// critical manifold, for the counterexample `(0.5, 0.5)`.
pub fn default_initial(model: &Model<f64>) -> Result<Vec<f64>> {
    Ok(match model {
        Model::Counterexample(_) => vec![0.5, 0.5],
        Model::FutileCycleReduced(_) => vec![0.8, 0.1],
        Model::FutileCycle(_) => vec![0.8, 0.1, 0.0, 0.0, 0.0, 0.0],
        Model::FutileCycleMassAction(p) => vec![0.8 * p.s_tot, 0.1 * p.s_tot, 0.0, 0.0, 0.0, 0.0],
    })
}
