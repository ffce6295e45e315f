//! Equilibria, convergence census and limit-cycle detection.

pub mod census;
pub mod cycle;
pub mod equilibria;
pub mod nullcline;

pub use census::{convergence_census, Census, CensusConfig, CensusReport, Outcome};
pub use cycle::{detect_limit_cycle, CycleConfig, LimitCycleReport, Verdict};
pub use equilibria::{classify, find_equilibria, lift_equilibria, Classification, Equilibrium, NewtonConfig};
pub use nullcline::{nullcline_scan, scalar_sign_changes, NullclineScan};

use crate::domain::Polytope;
use crate::error::Result;
use crate::field::{FnField, VectorField};
use crate::real::Real;
use crate::system::SlowFastSystem;

/// `x ↦ f0(x, m0(x), 0)`; NaN where `m0` is undefined.
pub fn reduced_field<T: Real>(sys: &SlowFastSystem<T>) -> FnField<T> {
    let sys = sys.clone();
    FnField::new(sys.n(), move |x: &[T], out: &mut [T]| match sys.m0(x) {
        Ok(y) => out.copy_from_slice(&sys.f0(x, &y, T::zero())),
        Err(_) => out.iter_mut().for_each(|v| *v = T::nan()),
    })
}

/// Roots of a planar field on a box: nullcline-scan candidates refined by
/// Newton.
pub fn planar_equilibria<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    lo: [T; 2],
    hi: [T; 2],
    resolution: usize,
    domain: Option<&Polytope<T>>,
    cfg: &NewtonConfig<T>,
) -> Result<Vec<Equilibrium<T>>> {
    let scan = nullcline_scan(field, lo, hi, resolution);
    let seeds: Vec<Vec<T>> = scan.candidates.iter().map(|c| c.to_vec()).collect();
    find_equilibria(field, domain, &seeds, cfg)
}

/// Roots of a scalar field on `[lo, hi]` from a sign-change scan.
pub fn scalar_equilibria<T: Real, F: VectorField<T> + ?Sized>(
    field: &F,
    lo: T,
    hi: T,
    points: usize,
    cfg: &NewtonConfig<T>,
) -> Result<Vec<Equilibrium<T>>> {
    let seeds: Vec<Vec<T>> = scalar_sign_changes(|x| field.call(&[x])[0], lo, hi, points)
        .into_iter()
        .map(|x| vec![x])
        .collect();
    find_equilibria(field, None, &seeds, cfg)
}
