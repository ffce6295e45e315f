//! Equilibria by damped Newton, with eigenvalue classification.

use serde::{Deserialize, Serialize};

use crate::domain::Polytope;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::linalg::Eigenvalue;
use crate::manifold::solve_m0;
use crate::real::{dist2, norm_inf, Real};
use crate::system::SlowFastSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StableNode,
    StableFocus,
    Saddle,
    UnstableNode,
    UnstableFocus,
    CenterMarginal,
}

impl Classification {
    pub fn is_stable(self) -> bool {
        matches!(self, Classification::StableNode | Classification::StableFocus)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Equilibrium<T: Real> {
    pub location: Vec<T>,
    pub residual: T,
    pub eigenvalues: Vec<Eigenvalue<T>>,
    pub classification: Option<Classification>,
    /// Singular Jacobian at the root.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NewtonConfig<T: Real> {
    pub residual_tol: T,
    pub max_iter: usize,
    pub dedupe_radius: T,
    /// Roots outside the domain by more than this are dropped.
    pub domain_slack: T,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        Self {
            residual_tol: T::of(1e-10),
            max_iter: 100,
            dedupe_radius: T::of(1e-6),
            domain_slack: T::of(1e-9),
        }
    }
}

/// Threshold on `|Re λ|` below which an eigenvalue counts as marginal.
pub const MARGINAL: f64 = 1e-8;

/// Damped Newton from one seed; `None` when it fails to converge.
pub fn newton_root<T: Real, F: VectorField<T> + ?Sized>(field: &F, seed: &[T], cfg: &NewtonConfig<T>) -> Option<Vec<T>> {
    let n = field.dim();
    let mut z = seed.to_vec();
    let mut f = field.call(&z);
    let mut r = norm_inf(&f);
    for _ in 0..cfg.max_iter {
        if !r.is_finite() {
            return None;
        }
        // keep polishing a little below the acceptance tolerance
        if r <= cfg.residual_tol * T::of(1e-2) {
            break;
        }
        let step = field.jacobian(&z).solve(&f).ok()?;
        let mut lambda = T::one();
        let mut improved = false;
        while lambda > T::of(1e-6) {
            let cand: Vec<T> = (0..n).map(|i| z[i] - lambda * step[i]).collect();
            let fc = field.call(&cand);
            let rc = norm_inf(&fc);
            if rc.is_finite() && rc < r {
                z = cand;
                f = fc;
                r = rc;
                improved = true;
                break;
            }
            lambda *= T::of(0.5);
        }
        if !improved {
            break;
        }
    }
    (r <= cfg.residual_tol).then_some(z)
}

/// Damped Newton from every seed; roots are deduplicated, re-verified and
/// classified.
pub fn find_equilibria<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    domain: Option<&Polytope<T>>,
    seeds: &[Vec<T>],
    cfg: &NewtonConfig<T>,
) -> Result<Vec<Equilibrium<T>>> {
    let mut roots: Vec<Vec<T>> = Vec::new();
    for s in seeds {
        if s.len() != field.dim() {
            return Err(Error::Dimension {
                expected: field.dim(),
                got: s.len(),
            });
        }
        let Some(z) = newton_root(field, s, cfg) else {
            continue;
        };
        if let Some(d) = domain {
            if d.margin(&z) < -cfg.domain_slack {
                continue;
            }
        }
        if roots.iter().all(|r| dist2(r, &z) > cfg.dedupe_radius) {
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    Ok(roots
        .into_iter()
        .map(|z| {
            let residual = norm_inf(&field.call(&z));
            classify(
                field,
                Equilibrium {
                    location: z,
                    residual,
                    eigenvalues: Vec::new(),
                    classification: None,
                    degenerate: false,
                },
            )
        })
        .collect())
}

/// Fills eigenvalues and the stability label.
pub fn classify<T: Real, F: VectorField<T> + ?Sized>(field: &F, mut eq: Equilibrium<T>) -> Equilibrium<T> {
    let j = field.jacobian(&eq.location);
    eq.degenerate = j.lu().is_err();
    let Ok(eigs) = j.eigenvalues() else {
        eq.classification = None;
        return eq;
    };
    eq.degenerate |= eigs.iter().any(|e| e.modulus() < T::of(MARGINAL));
    eq.classification = Some(classify_spectrum(&eigs));
    eq.eigenvalues = eigs;
    eq
}

pub fn classify_spectrum<T: Real>(eigs: &[Eigenvalue<T>]) -> Classification {
    let th = T::of(MARGINAL);
    if eigs.iter().any(|e| e.re.abs() < th) {
        return Classification::CenterMarginal;
    }
    let complex = eigs.iter().any(|e| e.im.abs() > th);
    let neg = eigs.iter().filter(|e| e.re < T::zero()).count();
    match (neg, complex) {
        (k, false) if k == eigs.len() => Classification::StableNode,
        (k, true) if k == eigs.len() => Classification::StableFocus,
        (0, false) => Classification::UnstableNode,
        (0, true) => Classification::UnstableFocus,
        _ => Classification::Saddle,
    }
}

/// Equilibria of the full slow-time field: slow roots lifted by `m0`, then
/// refined by Newton at the given ε.
pub fn lift_equilibria<T: Real>(
    sys: &SlowFastSystem<T>,
    eps: T,
    slow_roots: &[Vec<T>],
    domain: Option<&Polytope<T>>,
    cfg: &NewtonConfig<T>,
) -> Result<Vec<Equilibrium<T>>> {
    let field = sys.slow_time_field(eps)?;
    let mut seeds = Vec::with_capacity(slow_roots.len());
    for x in slow_roots {
        let mut z = x.clone();
        z.extend(solve_m0(sys, x)?);
        seeds.push(z);
    }
    find_equilibria(&field, domain, &seeds, cfg)
}
