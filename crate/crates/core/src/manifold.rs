//! Slow manifolds: the critical manifold `m0`, ε-corrections, and the two
//! numerical experiments (error scaling in ε and asymptotic phase).

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FnField;
use crate::integrate::{integrate, IntegratorConfig, Output, Status};
use crate::linalg::Matrix;
use crate::real::{dist2, norm_inf, Real};
use crate::system::SlowFastSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", bound = "")]
pub enum Seeding<T: Real> {
    /// Start Newton from the closed-form `m0` hook.
    Analytic,
    /// Start from the last point returned by this solver (or the given
    /// point on the first call).
    Continuation(Vec<T>),
    /// Relax `dy/dτ = g0(x, y, 0)` from the given point first.
    Relaxation(Vec<T>),
}

/// Newton solver for `g0(x, y, 0) = 0`.
#[derive(Debug, Clone)]
pub struct SlowManifoldSolver<'a, T: Real> {
    sys: &'a SlowFastSystem<T>,
    pub tol: T,
    pub max_iter: usize,
    pub seeding: Seeding<T>,
}

impl<'a, T: Real> SlowManifoldSolver<'a, T> {
    pub fn new(sys: &'a SlowFastSystem<T>) -> Self {
        let seeding = if sys.has_m0() {
            Seeding::Analytic
        } else {
            Seeding::Relaxation(vec![T::zero(); sys.m()])
        };
        Self {
            sys,
            tol: T::of(1e-12).max(T::of(100.0) * T::epsilon()),
            max_iter: 50,
            seeding,
        }
    }

    pub fn with_seeding(mut self, seeding: Seeding<T>) -> Self {
        self.seeding = seeding;
        self
    }

    fn seed(&self, x: &[T]) -> Result<Vec<T>> {
        match &self.seeding {
            Seeding::Analytic => self.sys.m0(x),
            Seeding::Continuation(y) => Ok(y.clone()),
            Seeding::Relaxation(y0) => {
                let sys = self.sys.clone();
                let xs = x.to_vec();
                let m = sys.m();
                let frozen = FnField::new(m, move |y: &[T], out: &mut [T]| sys.g0_into(&xs, y, T::zero(), out));
                let tr = integrate(
                    &frozen,
                    y0,
                    (T::zero(), T::of(50.0)),
                    &IntegratorConfig::default().with_tolerances(T::of(1e-6), T::of(1e-8)),
                    None,
                    &Output::Final,
                )?;
                Ok(tr.last_state().to_vec())
            }
        }
    }

    fn scale(y: &[T]) -> T {
        T::one() + norm_inf(y)
    }

    /// `y` with `g0(x, y, 0) = 0`. With continuation seeding the result
    /// becomes the next seed.
    pub fn solve(&mut self, x: &[T]) -> Result<Vec<T>> {
        let y0 = self.seed(x)?;
        let y = newton(self.sys, x, y0, T::zero(), None, self.tol, self.max_iter)?;
        if let Seeding::Continuation(prev) = &mut self.seeding {
            prev.clone_from(&y);
        }
        Ok(y)
    }
}

/// Damped Newton on `y ↦ g0(x, y, eps) − rhs`.
fn newton<T: Real>(
    sys: &SlowFastSystem<T>,
    x: &[T],
    mut y: Vec<T>,
    eps: T,
    rhs: Option<&[T]>,
    tol: T,
    max_iter: usize,
) -> Result<Vec<T>> {
    let m = sys.m();
    let resid = |y: &[T]| {
        let mut g = sys.g0(x, y, eps);
        if let Some(r) = rhs {
            g.iter_mut().zip(r).for_each(|(a, &b)| *a -= b);
        }
        g
    };
    let mut g = resid(&y);
    let mut r = norm_inf(&g);
    for it in 0..=max_iter {
        let scale = SlowManifoldSolver::scale(&y);
        if r.is_finite() && r <= tol * scale {
            return Ok(y);
        }
        if it == max_iter || !r.is_finite() {
            break;
        }
        let j = sys.jacobian_fast(x, &y, eps)?;
        let step = j.solve(&g)?;
        let mut lambda = T::one();
        loop {
            let cand: Vec<T> = (0..m).map(|i| y[i] - lambda * step[i]).collect();
            let gc = resid(&cand);
            let rc = norm_inf(&gc);
            if (rc.is_finite() && rc < r) || lambda < T::of(1e-4) {
                y = cand;
                g = gc;
                r = rc;
                break;
            }
            lambda *= T::of(0.5);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: r.as_f64(),
        last_iterate: y.iter().map(|v| v.as_f64()).collect(),
    })
}

/// `m0(x)` from the hook when present, otherwise by Newton with
/// relaxation seeding.
pub fn solve_m0<T: Real>(sys: &SlowFastSystem<T>, x: &[T]) -> Result<Vec<T>> {
    if sys.has_m0() {
        sys.m0(x)
    } else {
        SlowManifoldSolver::new(sys).solve(x)
    }
}

/// `D_x` of `h` by central differences with a fallible map.
fn fd_jacobian_fallible<T: Real>(h: impl Fn(&[T]) -> Result<Vec<T>>, x: &[T], step: T) -> Result<Matrix<T>> {
    let mut cols = Vec::with_capacity(x.len());
    let mut xp = x.to_vec();
    for k in 0..x.len() {
        let d = step.max(step * x[k].abs());
        xp[k] = x[k] + d;
        let a = h(&xp)?;
        xp[k] = x[k] - d;
        let b = h(&xp)?;
        xp[k] = x[k];
        cols.push(a.iter().zip(&b).map(|(&p, &q)| (p - q) / (d + d)).collect::<Vec<_>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    let mut j = Matrix::zeros(rows, x.len());
    for (k, c) in cols.iter().enumerate() {
        j.set_column(k, c);
    }
    Ok(j)
}

/// `m0(x) + ε m1(x)` with `D_y g0 · m1 = D_x m0 · f0 − ∂g0/∂ε`, all at
/// `(x, m0(x), 0)`.
pub fn first_order_manifold<T: Real>(sys: &SlowFastSystem<T>, x: &[T], eps: T) -> Result<Vec<T>> {
    let y0 = solve_m0(sys, x)?;
    if eps == T::zero() {
        return Ok(y0);
    }
    let b = sys.jacobian_fast(x, &y0, T::zero())?;
    let dm = fd_jacobian_fallible(|v| solve_m0(sys, v), x, T::fd_step())?;
    let f = sys.f0(x, &y0, T::zero());
    let dge = sys.g0_eps_derivative(x, &y0, T::zero());
    let rhs: Vec<T> = dm.mul_vec(&f).iter().zip(&dge).map(|(&a, &b)| a - b).collect();
    let m1 = b.solve(&rhs).map_err(|_| Error::Singular)?;
    Ok(y0.iter().zip(&m1).map(|(&a, &b)| a + eps * b).collect())
}

/// Iterates the invariance equation `g0(x, m, ε) = ε D_x m · f0(x, m, ε)`
/// `order` times starting from `m0`; each pass gains one power of ε.
pub fn invariant_manifold<T: Real>(sys: &SlowFastSystem<T>, x: &[T], eps: T, order: usize) -> Result<Vec<T>> {
    if order == 0 || eps == T::zero() {
        return solve_m0(sys, x);
    }
    let prev = invariant_manifold(sys, x, eps, order - 1)?;
    // larger steps at deeper levels keep nested-difference noise small
    let step = T::fd_step() * T::of(10.0);
    let dm = fd_jacobian_fallible(|v| invariant_manifold(sys, v, eps, order - 1), x, step)?;
    let f = sys.f0(x, &prev, eps);
    let rhs: Vec<T> = dm.mul_vec(&f).into_iter().map(|v| eps * v).collect();
    newton(sys, x, prev, eps, Some(&rhs), T::of(1e-13).max(T::of(100.0) * T::epsilon()), 50)
}

/// `min_x |max Re λ(D_y g0(x, m0(x), 0))|` over the samples.
pub fn estimate_mu<T: Real>(sys: &SlowFastSystem<T>, xs: &[Vec<T>]) -> Result<T> {
    let mut mu = T::infinity();
    for x in xs {
        let y = solve_m0(sys, x)?;
        let a = sys.jacobian_fast(x, &y, T::zero())?.spectral_abscissa()?;
        if a >= T::zero() {
            return Err(Error::InvalidState(format!("D_y g0 is not Hurwitz at x = {x:?}")));
        }
        mu = mu.min(-a);
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParameter("no sample points for the spectral margin".into()));
    }
    Ok(mu)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Relaxation<T: Real> {
    pub x_start: Vec<T>,
    /// Slow point at the end of the layer; it drifts by `O(ε τ_bl)`.
    pub x_final: Vec<T>,
    pub y: Vec<T>,
    pub slow_drift: T,
    pub tau_bl: T,
}

/// Integrates in fast time from `(x, m0(x))` over `τ_bl = 20/μ` and
/// returns the end state, a proxy for a point on the slow manifold.
pub fn relax_to_manifold<T: Real>(
    sys: &SlowFastSystem<T>,
    x: &[T],
    eps: T,
    mu: T,
    cfg: &IntegratorConfig<T>,
    domain: Option<&crate::domain::EpsPolytope<T>>,
) -> Result<Relaxation<T>> {
    if !(eps > T::zero()) {
        return Err(Error::DegenerateTimescale(eps.as_f64()));
    }
    if !(mu > T::zero()) {
        return Err(Error::InvalidParameter(format!("spectral margin must be positive, got {mu}")));
    }
    let tau_bl = T::of(20.0) / mu;
    let mut z0 = x.to_vec();
    z0.extend(solve_m0(sys, x)?);
    let poly = domain.map(|d| d.at(eps)).transpose()?;
    let field = sys.fast_time_field(eps);
    let tr = integrate(&field, &z0, (T::zero(), tau_bl), cfg, poly.as_ref(), &Output::Final)?;
    match tr.status {
        Status::Completed => {}
        Status::LeftDomain => return Err(Error::LeftDomain(tr.final_time().as_f64())),
        s => return Err(Error::Integration(format!("{s:?} during relaxation"))),
    }
    let n = sys.n();
    let end = tr.last_state();
    Ok(Relaxation {
        x_start: x.to_vec(),
        x_final: end[..n].to_vec(),
        y: end[n..].to_vec(),
        slow_drift: dist2(&end[..n], x),
        tau_bl,
    })
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn ols<T: Real>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    let n = T::of(xs.len() as f64);
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ys.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if !(sxx > T::zero()) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ManifoldErrorReport<T: Real> {
    pub eps: Vec<T>,
    /// `sup_x |y_relaxed − m0(x_final)|` per ε.
    pub sup_error: Vec<T>,
    pub slope: Option<T>,
    pub intercept: Option<T>,
    pub insufficient_points: bool,
    pub samples: usize,
    pub mu: T,
    pub tau_bl: T,
    pub max_slow_drift: T,
}

impl<T: Real> ManifoldErrorReport<T> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "eps,sup_error")?;
        for (e, s) in self.eps.iter().zip(&self.sup_error) {
            writeln!(w, "{e},{s}")?;
        }
        Ok(())
    }
}

/// Relaxation error against `m0` for each ε and the log–log slope.
pub fn manifold_error_scaling<T: Real>(
    sys: &SlowFastSystem<T>,
    eps_list: &[T],
    x_samples: &[Vec<T>],
    mu: T,
    cfg: &IntegratorConfig<T>,
) -> Result<ManifoldErrorReport<T>> {
    let mut eps: Vec<T> = eps_list.to_vec();
    if eps.iter().any(|&e| !(e > T::zero()) || !e.is_finite()) {
        return Err(Error::InvalidParameter("eps values must be positive".into()));
    }
    if x_samples.is_empty() {
        return Err(Error::InvalidParameter("no slow samples".into()));
    }
    eps.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    eps.dedup();
    let mut sup_error = Vec::with_capacity(eps.len());
    let mut max_drift = T::zero();
    for &e in &eps {
        let per: Vec<Result<(T, T)>> = x_samples
            .par_iter()
            .map(|x| {
                let r = relax_to_manifold(sys, x, e, mu, cfg, None)?;
                let m = solve_m0(sys, &r.x_final)?;
                Ok((dist2(&r.y, &m), r.slow_drift))
            })
            .collect();
        let mut worst = T::zero();
        for r in per {
            let (d, drift) = r?;
            worst = worst.max(d);
            max_drift = max_drift.max(drift);
        }
        sup_error.push(worst);
    }
    let lx: Vec<T> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<T> = sup_error.iter().map(|e| e.ln()).collect();
    let fit = if sup_error.iter().all(|&e| e > T::zero()) {
        ols(&lx, &ly)
    } else {
        None
    };
    Ok(ManifoldErrorReport {
        insufficient_points: fit.is_none(),
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        samples: x_samples.len(),
        mu,
        tau_bl: T::of(20.0) / mu,
        max_slow_drift: max_drift,
        eps,
        sup_error,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PhaseTrackingReport<T: Real> {
    /// Fast times τ.
    pub times: Vec<T>,
    pub distances: Vec<T>,
    pub initial_distance: T,
    /// `−d log(dist)/dτ` fitted over the window where `dist > 100·atol`.
    pub rate: Option<T>,
    pub fit_points: usize,
    /// First sample time with `dist` below the threshold.
    pub below_threshold_at: Option<T>,
    pub threshold: T,
    /// Decreasing from the first step up to the end of the fit window.
    pub monotone_after_first_step: bool,
    pub manifold_order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PhaseOptions<T: Real> {
    pub tau_end: T,
    pub samples: usize,
    /// Order of the invariance iteration used as the reference manifold.
    pub manifold_order: usize,
    pub threshold: T,
}

/// Tracks `|y(τ) − m(x(τ), ε)|` along a trajectory started off the manifold.
pub fn asymptotic_phase<T: Real>(
    sys: &SlowFastSystem<T>,
    s0: &[T],
    eps: T,
    cfg: &IntegratorConfig<T>,
    opts: &PhaseOptions<T>,
) -> Result<PhaseTrackingReport<T>> {
    if !(eps > T::zero()) {
        return Err(Error::DegenerateTimescale(eps.as_f64()));
    }
    if opts.samples < 2 || !(opts.tau_end > T::zero()) {
        return Err(Error::InvalidParameter("phase tracking needs samples ≥ 2 and τ_end > 0".into()));
    }
    let n = sys.n();
    let ts: Vec<T> = (1..=opts.samples)
        .map(|k| opts.tau_end * T::of(k as f64) / T::of(opts.samples as f64))
        .collect();
    let field = sys.fast_time_field(eps);
    let tr = integrate(&field, s0, (T::zero(), opts.tau_end), cfg, None, &Output::Times(ts))?;
    if tr.status != Status::Completed {
        return Err(Error::Integration(format!("{:?} during phase tracking", tr.status)));
    }
    let dists: Vec<T> = tr
        .states
        .par_iter()
        .map(|z| {
            let m = invariant_manifold(sys, &z[..n], eps, opts.manifold_order)?;
            Ok(dist2(&z[n..], &m))
        })
        .collect::<Result<_>>()?;
    let floor = T::of(100.0) * cfg.atol;
    let window: Vec<usize> = (1..dists.len()).take_while(|&k| dists[k] > floor).collect();
    let lx: Vec<T> = window.iter().map(|&k| tr.times[k]).collect();
    let ly: Vec<T> = window.iter().map(|&k| dists[k].ln()).collect();
    let rate = ols(&lx, &ly).map(|(s, _)| -s);
    let end = window.last().copied().unwrap_or(1).min(dists.len() - 1);
    let monotone = (2..=end).all(|k| dists[k] < dists[k - 1]);
    let below = tr
        .times
        .iter()
        .zip(&dists)
        .find(|(_, &d)| d < opts.threshold)
        .map(|(&t, _)| t);
    Ok(PhaseTrackingReport {
        initial_distance: dists[0],
        times: tr.times,
        distances: dists,
        rate,
        fit_points: window.len(),
        below_threshold_at: below,
        threshold: opts.threshold,
        monotone_after_first_step: monotone,
        manifold_order: opts.manifold_order,
    })
}

/// `|g0(x, m(x), 0)|` scaled by `1 + |m(x)|`, largest over the samples.
pub fn manifold_residual<T: Real>(sys: &SlowFastSystem<T>, xs: &[Vec<T>]) -> Result<T> {
    let mut worst = T::zero();
    for x in xs {
        let y = solve_m0(sys, x)?;
        let r = norm_inf(&sys.g0(x, &y, T::zero())) / (T::one() + norm_inf(&y));
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `f0 = −x`, `g0 = −(y − sin x) + ε`: `m(x, ε)` has an explicit
    /// expansion.
    fn shifted() -> SlowFastSystem<f64> {
        SlowFastSystem::new(
            1,
            1,
            |x: &[f64], _y: &[f64], _e: f64, out: &mut [f64]| out[0] = -x[0],
            |x: &[f64], y: &[f64], e: f64, out: &mut [f64]| out[0] = -(y[0] - x[0].sin()) + e,
        )
        .with_m0(|x: &[f64]| Ok(vec![x[0].sin()]))
    }

    #[test]
    fn newton_reproduces_hook() {
        let sys = shifted();
        let mut s = SlowManifoldSolver::new(&sys).with_seeding(Seeding::Continuation(vec![0.0]));
        for k in 0..10 {
            let x = [0.1 * k as f64];
            let y = s.solve(&x).unwrap();
            assert_relative_eq!(y[0], x[0].sin(), epsilon = 1e-12);
        }
        let mut s = SlowManifoldSolver::new(&sys).with_seeding(Seeding::Relaxation(vec![3.0]));
        assert_relative_eq!(s.solve(&[0.4]).unwrap()[0], 0.4f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn divergence_reports_last_iterate() {
        // g0 = 1 + y² has no root
        let sys = SlowFastSystem::new(
            1,
            1,
            |_x: &[f64], _y: &[f64], _e: f64, out: &mut [f64]| out[0] = 0.0,
            |_x: &[f64], y: &[f64], _e: f64, out: &mut [f64]| out[0] = 1.0 + y[0] * y[0],
        );
        let mut s = SlowManifoldSolver::new(&sys).with_seeding(Seeding::Continuation(vec![0.5]));
        match s.solve(&[0.0]) {
            Err(Error::NoConvergence { last_iterate, .. }) => assert_eq!(last_iterate.len(), 1),
            Err(Error::Singular) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn first_order_terms() {
        let sys = shifted();
        let x = [0.7];
        assert_eq!(first_order_manifold(&sys, &x, 0.0).unwrap(), vec![0.7f64.sin()]);
        // D_y g0 = −1, rhs = cos x·(−x) − 1
        let m1 = (0.7f64.cos() * -0.7 - 1.0) / -1.0;
        let got = first_order_manifold(&sys, &x, 1e-3).unwrap()[0];
        assert_relative_eq!(got, 0.7f64.sin() + 1e-3 * m1, epsilon = 1e-9);
    }

    #[test]
    fn zero_slow_flow_gives_zero_correction() {
        let sys = SlowFastSystem::new(
            1,
            1,
            |_x: &[f64], _y: &[f64], _e: f64, out: &mut [f64]| out[0] = 0.0,
            |x: &[f64], y: &[f64], _e: f64, out: &mut [f64]| out[0] = -(y[0] - x[0] * x[0]),
        )
        .with_m0(|x: &[f64]| Ok(vec![x[0] * x[0]]));
        let y = first_order_manifold(&sys, &[0.3], 0.1).unwrap();
        assert_relative_eq!(y[0], 0.09, epsilon = 1e-12);
    }

    #[test]
    fn linear_scaling_slope_is_one() {
        // g0 = −(y − x) + ε: m(x, ε) = x + ε(1 − x) + O(ε²) with f0 = −x
        let sys = SlowFastSystem::new(
            1,
            1,
            |_x: &[f64], _y: &[f64], _e: f64, out: &mut [f64]| out[0] = 0.0,
            |x: &[f64], y: &[f64], e: f64, out: &mut [f64]| out[0] = -(y[0] - x[0]) + e,
        )
        .with_m0(|x: &[f64]| Ok(vec![x[0]]));
        let xs: Vec<Vec<f64>> = (0..5).map(|k| vec![0.2 * k as f64]).collect();
        let cfg = IntegratorConfig::default().with_tolerances(1e-10, 1e-13);
        let rep = manifold_error_scaling(&sys, &[1e-1, 1e-2, 1e-3, 1e-4], &xs, 1.0, &cfg).unwrap();
        assert!((rep.slope.unwrap() - 1.0).abs() < 0.05, "{rep:?}");
        let one = manifold_error_scaling(&sys, &[1e-2], &xs, 1.0, &cfg).unwrap();
        assert!(one.insufficient_points && one.slope.is_none());
    }

    #[test]
    fn relaxation_of_linear_layer() {
        let sys = shifted();
        let cfg = IntegratorConfig::default().with_tolerances(1e-10, 1e-13);
        let r = relax_to_manifold(&sys, &[0.5], 1e-9, 1.0, &cfg, None).unwrap();
        assert_relative_eq!(r.tau_bl, 20.0);
        let m = sys.m0(&r.x_final).unwrap();
        // ε offset plus e^{-20}-decayed start; the start is on m0, so only ε remains
        assert!((r.y[0] - m[0]).abs() < 1e-8);
    }

    #[test]
    fn phase_rate_of_linear_layer() {
        // fast block dz/dτ = −2z around m = x
        let sys = SlowFastSystem::new(
            1,
            1,
            |x: &[f64], _y: &[f64], _e: f64, out: &mut [f64]| out[0] = -x[0],
            |x: &[f64], y: &[f64], _e: f64, out: &mut [f64]| out[0] = -2.0 * (y[0] - x[0]),
        )
        .with_m0(|x: &[f64]| Ok(vec![x[0]]));
        let cfg = IntegratorConfig::default().with_tolerances(1e-11, 1e-13);
        let opts = PhaseOptions {
            tau_end: 10.0,
            samples: 50,
            manifold_order: 3,
            threshold: 1e-6,
        };
        let rep = asymptotic_phase(&sys, &[0.5, 0.6], 1e-3, &cfg, &opts).unwrap();
        assert!(rep.rate.unwrap() >= 2.0 * 0.9, "{:?}", rep.rate);
        assert!(rep.monotone_after_first_step);
        let on = invariant_manifold(&sys, &[0.5], 1e-3, 3).unwrap();
        let rep = asymptotic_phase(&sys, &[0.5, on[0]], 1e-3, &cfg, &opts).unwrap();
        assert!(rep.distances.iter().all(|&d| d < 1e-8), "{:?}", rep.distances);
    }

    #[test]
    fn ols_exact_line() {
        let (s, c) = ols(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_relative_eq!(s, 2.0);
        assert_relative_eq!(c, 1.0);
        assert!(ols(&[1.0], &[1.0]).is_none());
    }
}
