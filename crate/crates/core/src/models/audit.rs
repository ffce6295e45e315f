//! Computational checks of the seven standing assumptions for the built-in
//! models.
//!
//! A1 smooth field on bounded open `U × V`; A2 a smooth critical manifold
//! `m0` on `U`; A3 the frozen fast system is globally attracted to `m0`;
//! A4 `D_y g0(x, m0(x), 0)` Hurwitz on `U`; A5 `D_ε` convex, compact and
//! forward invariant; A6 the reduced flow has eventually positive
//! derivatives on `K0`; A7 the equilibria are totally disconnected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::counterexample::CounterexampleParams;
use super::futile::{k0_grid, FutileCycle, FutileCycleParams};
use crate::analysis::{planar_equilibria, reduced_field, scalar_equilibria, NewtonConfig};
use crate::domain::{EpsPolytope, Polytope};
use crate::error::Result;
use crate::field::{FnField, VectorField};
use crate::integrate::IntegratorConfig;
use crate::manifold::{Seeding, SlowManifoldSolver};
use crate::monotone::{eventually_positive_derivatives, kamke_check, OrthantCone, DEFAULT_T_GRID};
use crate::real::{dist2, norm_inf, Real};
use crate::system::SlowFastSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssumptionStatus {
    VerifiedNumerically,
    VerifiedAnalytically,
    Cited,
    Failed,
}

impl AssumptionStatus {
    pub fn passed(self) -> bool {
        self != AssumptionStatus::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionEntry {
    pub id: String,
    pub status: AssumptionStatus,
    pub summary: String,
    pub evidence: Value,
    /// First offending point when the check failed.
    pub witness: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub model: String,
    pub eps: f64,
    pub entries: Vec<AssumptionEntry>,
    pub config: AuditConfig,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.status.passed())
    }

    pub fn get(&self, id: &str) -> Option<&AssumptionEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    /// Cells per side of the grid over `U` (A2, A4).
    pub grid: usize,
    /// Extra slow points appended to that grid.
    pub extra_points: Vec<Vec<f64>>,
    pub boundary_samples: usize,
    /// Cells per side of the `K0` grid for the Kamke test (A6).
    pub kamke_grid: usize,
    pub epd_samples: usize,
    pub t_grid: Vec<f64>,
    /// Resolution of the equilibrium scan (A7).
    pub scan_resolution: usize,
    pub seed: u64,
    /// Relative tolerance for the manifold residual.
    pub residual_tol: f64,
    /// Allowed outward component of the field on `∂D_ε`.
    pub boundary_tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            grid: 50,
            extra_points: Vec::new(),
            boundary_samples: 1000,
            kamke_grid: 46,
            epd_samples: 20,
            t_grid: DEFAULT_T_GRID.to_vec(),
            scan_resolution: 200,
            seed: 7,
            residual_tol: 1e-12,
            boundary_tol: 1e-12,
        }
    }
}

fn f64s<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

fn entry(id: &str, status: AssumptionStatus, summary: impl Into<String>, evidence: Value) -> AssumptionEntry {
    AssumptionEntry {
        id: id.into(),
        status,
        summary: summary.into(),
        evidence,
        witness: None,
        warnings: Vec::new(),
    }
}

fn numeric(ok: bool) -> AssumptionStatus {
    if ok {
        AssumptionStatus::VerifiedNumerically
    } else {
        AssumptionStatus::Failed
    }
}

/// Cell-centred `n × n` grid over the bounding box of `u`, keeping the
/// points strictly inside, followed by `extra`. Returns the kept points
/// and the extra points that were dropped.
fn grid_in<T: Real>(u: &Polytope<T>, n: usize, extra: &[Vec<f64>]) -> (Vec<Vec<T>>, Vec<Vec<f64>>) {
    let (lo, hi) = u.bounding_box();
    let n = n.max(1);
    let mut pts = Vec::new();
    let half = T::of(0.5);
    for i in 0..n {
        for j in 0..n {
            let p = vec![
                lo[0] + (hi[0] - lo[0]) * (T::of(i as f64) + half) / T::of(n as f64),
                lo[1] + (hi[1] - lo[1]) * (T::of(j as f64) + half) / T::of(n as f64),
            ];
            if u.margin(&p) > T::zero() {
                pts.push(p);
            }
        }
    }
    let mut dropped = Vec::new();
    for e in extra {
        let p: Vec<T> = e.iter().map(|&v| T::of(v)).collect();
        if p.len() == u.dim() && u.margin(&p) > T::zero() {
            pts.push(p);
        } else {
            dropped.push(e.clone());
        }
    }
    (pts, dropped)
}

/// A2: `|g0(x, m0(x), 0)|` relative to the size of the terms, and the
/// Newton solution from a neutral seed against the closed form.
fn check_a2<T: Real>(sys: &SlowFastSystem<T>, xs: &[Vec<T>], tol: f64, dropped: &[Vec<f64>]) -> AssumptionEntry {
    let mut worst = 0.0f64;
    let mut newton_gap = 0.0f64;
    let mut witness = None;
    let neutral = vec![T::zero(); sys.m()];
    for (k, x) in xs.iter().enumerate() {
        let y = match sys.m0(x) {
            Ok(y) => y,
            Err(_) => {
                witness.get_or_insert_with(|| f64s(x));
                continue;
            }
        };
        let r = norm_inf(&sys.g0(x, &y, T::zero())).as_f64() / (1.0 + norm_inf(&y).as_f64());
        worst = worst.max(r);
        if r > tol {
            witness.get_or_insert_with(|| f64s(x));
        }
        if k % 10 == 0 {
            let mut solver = SlowManifoldSolver::new(sys).with_seeding(Seeding::Relaxation(neutral.clone()));
            match solver.solve(x) {
                Ok(yn) => newton_gap = newton_gap.max(dist2(&yn, &y).as_f64()),
                Err(_) => newton_gap = f64::INFINITY,
            }
        }
    }
    let ok = witness.is_none() && newton_gap <= 1e-10;
    let mut e = entry(
        "A2",
        numeric(ok),
        "closed-form critical manifold solves g0(x, y, 0) = 0 on the grid over U",
        json!({
            "points": xs.len(),
            "max_relative_residual": worst,
            "residual_tol": tol,
            "max_newton_gap": newton_gap,
            "newton_gap_tol": 1e-10,
        }),
    );
    e.witness = witness;
    if !dropped.is_empty() {
        e.warnings.push(format!("{} grid point(s) outside U excluded", dropped.len()));
    }
    e
}

/// A3: if `g0(x, ·, 0)` is affine in `y`, attraction to `m0` is global
/// exactly when the constant matrix `D_y g0` is Hurwitz (checked under A4).
/// Otherwise the frozen fast system is relaxed from random starts.
fn check_a3<T: Real>(sys: &SlowFastSystem<T>, xs: &[Vec<T>], vbox: (&[T], &[T]), seed: u64) -> AssumptionEntry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = sys.m();
    let mut worst_curvature = 0.0f64;
    let probes: Vec<&Vec<T>> = xs.iter().step_by((xs.len() / 25).max(1)).collect();
    let rand_y = |rng: &mut ChaCha8Rng| -> Vec<T> {
        (0..m)
            .map(|i| vbox.0[i] + (vbox.1[i] - vbox.0[i]) * T::of(rng.gen::<f64>()))
            .collect()
    };
    for x in &probes {
        for _ in 0..4 {
            let (a, b) = (rand_y(&mut rng), rand_y(&mut rng));
            let mid: Vec<T> = a.iter().zip(&b).map(|(&p, &q)| (p + q) * T::of(0.5)).collect();
            let (ga, gb, gm) = (sys.g0(x, &a, T::zero()), sys.g0(x, &b, T::zero()), sys.g0(x, &mid, T::zero()));
            let scale = 1.0 + norm_inf(&ga).as_f64().max(norm_inf(&gb).as_f64());
            for i in 0..m {
                let c = (ga[i] + gb[i] - gm[i] - gm[i]).abs().as_f64() / scale;
                worst_curvature = worst_curvature.max(c);
            }
        }
    }
    if worst_curvature < 1e-10 {
        return entry(
            "A3",
            AssumptionStatus::VerifiedAnalytically,
            "fast system is affine in y for frozen x, so dz/dτ = B(x)z and global attraction follows from B Hurwitz (A4)",
            json!({ "probe_points": probes.len(), "max_second_difference": worst_curvature }),
        );
    }
    // sampled relaxation
    let mut worst = 0.0f64;
    let mut witness = None;
    let cfg = IntegratorConfig::<T>::stiff().with_tolerances(T::of(1e-8), T::of(1e-10));
    for x in &probes {
        let Ok(target) = sys.m0(x) else { continue };
        let xs_ = (*x).clone();
        let s = sys.clone();
        let frozen = FnField::new(m, move |y: &[T], out: &mut [T]| out.copy_from_slice(&s.g0(&xs_, y, T::zero())));
        for _ in 0..4 {
            let y0 = rand_y(&mut rng);
            let d = match crate::integrate::integrate(
                &frozen,
                &y0,
                (T::zero(), T::of(200.0)),
                &cfg,
                None,
                &crate::integrate::Output::Final,
            ) {
                Ok(tr) => dist2(tr.last_state(), &target).as_f64(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(d);
            if !(d < 1e-6) {
                witness.get_or_insert_with(|| f64s(x));
            }
        }
    }
    let mut e = entry(
        "A3",
        numeric(witness.is_none()),
        "frozen fast system relaxes to m0 from sampled starts",
        json!({ "probe_points": probes.len(), "max_final_distance": worst, "tol": 1e-6 }),
    );
    e.witness = witness;
    e
}

/// A4 on the grid; `blocks(x)` gives `(hurwitz by trace/det, hurwitz by
/// eigenvalues, margins, spectral abscissa)`.
fn check_a4(
    points: usize,
    results: Vec<(Vec<f64>, Option<(bool, bool, Vec<(f64, f64)>, f64)>)>,
    dropped: &[Vec<f64>],
    sigma: Option<f64>,
) -> AssumptionEntry {
    let mut witness = None;
    let mut disagree = 0usize;
    let mut min_neg_trace = f64::INFINITY;
    let mut min_det = f64::INFINITY;
    let mut mu = f64::INFINITY;
    for (x, r) in &results {
        match r {
            Some((td, eig, margins, abscissa)) => {
                if td != eig {
                    disagree += 1;
                }
                if !td || !eig {
                    witness.get_or_insert_with(|| x.clone());
                }
                for &(t, d) in margins {
                    min_neg_trace = min_neg_trace.min(t);
                    min_det = min_det.min(d);
                }
                mu = mu.min(-abscissa);
            }
            None => {
                witness.get_or_insert_with(|| x.clone());
            }
        }
    }
    let mut e = entry(
        "A4",
        numeric(witness.is_none() && disagree == 0),
        "fast Jacobian on the critical manifold is Hurwitz at every grid point of U",
        json!({
            "points": points,
            "sigma": sigma,
            "min_negative_trace": min_neg_trace,
            "min_determinant": min_det,
            "trace_det_eigen_disagreements": disagree,
            "mu_estimate": mu,
            "excluded_points": dropped,
        }),
    );
    e.witness = witness;
    if !dropped.is_empty() {
        e.warnings
            .push(format!("{} grid point(s) outside U excluded from the Hurwitz audit", dropped.len()));
    }
    e
}

/// Points on each face of `poly`: interior samples projected onto the
/// face, kept when they stay in the polytope.
fn face_samples<T: Real>(poly: &Polytope<T>, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, Vec<T>)> {
    let faces = poly.len();
    let per = count.div_ceil(faces.max(1));
    let mut out = Vec::new();
    let slack = T::of(-1e-12);
    for f in 0..faces {
        let mut got = 0;
        let mut tries = 0;
        while got < per && tries < 200 {
            tries += 1;
            let (pts, _) = poly.rejection_sample(rng, per);
            for p in pts {
                let q = poly.project_to_face(f, &p);
                if got < per && poly.margin(&q) >= slack {
                    out.push((f, q));
                    got += 1;
                }
            }
        }
    }
    out
}

/// A5: outward normal · field ≤ tol on sampled boundary points of `D_ε`.
fn check_a5<T: Real>(sys: &SlowFastSystem<T>, dom: &EpsPolytope<T>, eps: T, cfg: &AuditConfig) -> Result<AssumptionEntry> {
    let poly = dom.at(eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa5);
    let pts = face_samples(&poly, cfg.boundary_samples, &mut rng);
    let field = sys.fast_time_field(eps);
    let per: Vec<(usize, f64, Vec<f64>)> = pts
        .par_iter()
        .map(|(f, z)| {
            let v = field.call(z);
            let row = poly.row(*f);
            let n = row.iter().fold(T::zero(), |a, &r| a + r * r).sqrt();
            let dot = row.iter().zip(&v).fold(T::zero(), |a, (&r, &w)| a + r * w) / n;
            let scale = 1.0 + norm_inf(&v).as_f64();
            (*f, dot.as_f64() / scale, f64s(z))
        })
        .collect();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut per_face = vec![0usize; poly.len()];
    for (f, d, z) in &per {
        per_face[*f] += 1;
        worst = worst.max(*d);
        if *d > cfg.boundary_tol {
            witness.get_or_insert_with(|| z.clone());
        }
    }
    let mut e = entry(
        "A5",
        numeric(witness.is_none() && !per.is_empty()),
        "field points into D_eps on sampled boundary points",
        json!({
            "samples": per.len(),
            "samples_per_face": per_face,
            "max_normalized_outward_component": worst,
            "tol": cfg.boundary_tol,
            "faces": poly.len(),
        }),
    );
    e.witness = witness;
    Ok(e)
}

fn check_a6<F: VectorField<f64>>(
    field: &F,
    cone: &OrthantCone,
    kamke_points: &[Vec<f64>],
    epd_points: &[Vec<f64>],
    t_grid: &[f64],
    region: Option<&Polytope<f64>>,
) -> Result<AssumptionEntry> {
    let kamke = kamke_check(field, kamke_points, cone, true)?;
    let cfg = IntegratorConfig::default().with_tolerances(1e-9, 1e-11);
    let epd = eventually_positive_derivatives(field, cone, epd_points, t_grid, &cfg, region)?;
    let ok = kamke.passed() && epd.achieved && epd.excluded.is_empty();
    let mut e = entry(
        "A6",
        numeric(ok),
        "reduced flow is strongly monotone for the orthant cone and has eventually positive derivatives",
        json!({
            "cone": cone.signs(),
            "kamke_points": kamke_points.len(),
            "kamke_violations": kamke.violations.len(),
            "min_conjugated_off_diagonal": kamke.min_off_diagonal,
            "epd_samples": epd_points.len(),
            "epd_excluded": epd.excluded,
            "epd_t0": epd.t0,
            "epd_margin": epd.margin,
            "t_grid": t_grid,
        }),
    );
    if let Some(v) = kamke.violations.first() {
        e.witness = Some(kamke.points[v.point].clone());
    } else if !epd.achieved {
        e.witness = epd_points.first().cloned();
    }
    Ok(e)
}

fn a1_cited(summary: &str) -> AssumptionEntry {
    entry(
        "A1",
        AssumptionStatus::Cited,
        summary,
        json!({ "note": "smoothness follows from the closed form of the vector field" }),
    )
}

fn k0_random(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b): (f64, f64) = (rng.gen(), rng.gen());
        if a + b < 1.0 && a > 1e-3 && b > 1e-3 {
            out.push(vec![a, b]);
        }
    }
    out
}

/// Audit of the scaled futile cycle at the parameters' ε.
pub fn futile_cycle_audit(p: &FutileCycleParams<f64>, cfg: &AuditConfig) -> Result<AssumptionReport> {
    let p = p.validated()?;
    let fc: FutileCycle<f64> = p.scaled();
    let sys = fc.system();
    let dom = fc.domain();
    let slow = fc.slow_domain();
    let eps = p.eps();
    let (xs, dropped) = grid_in(&slow.u, cfg.grid, &cfg.extra_points);

    let a1 = a1_cited("mass-action kinetics give a rational field, smooth where the manifold denominators are positive");
    let a2 = check_a2(&sys, &xs, cfg.residual_tol, &dropped);
    let a3 = check_a3(&sys, &xs, (&slow.v_lo, &slow.v_hi), cfg.seed);
    let results: Vec<_> = xs
        .par_iter()
        .map(|x| {
            let r = fc.hurwitz_blocks(x).ok().map(|hb| {
                let margins = hb.margins.iter().map(|&(t, d)| (t, d)).collect();
                (hb.hurwitz, hb.hurwitz_by_eigenvalues(), margins, hb.spectral_abscissa())
            });
            (x.clone(), r)
        })
        .collect();
    let a4 = check_a4(xs.len(), results, &dropped, Some(p.sigma()));
    let a5 = check_a5(&sys, &dom, eps, cfg)?;

    let reduced = fc.reduced_field();
    let cone = OrthantCone::parse("(-,+)")?;
    let kamke_points: Vec<Vec<f64>> = k0_grid::<f64>(cfg.kamke_grid).into_iter().map(|x| x.to_vec()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa6);
    let epd_points = k0_random(cfg.epd_samples, &mut rng);
    let k0 = Polytope::new(vec![vec![-1.0, 0.0], vec![0.0, -1.0], vec![1.0, 1.0]], vec![0.0, 0.0, 1.0]);
    let a6 = check_a6(&reduced, &cone, &kamke_points, &epd_points, &cfg.t_grid, Some(&k0))?;

    let eqs = planar_equilibria(
        &reduced,
        [0.0, 0.0],
        [1.0, 1.0],
        cfg.scan_resolution,
        Some(&k0),
        &NewtonConfig::default(),
    )?;
    let degenerate = eqs.iter().filter(|e| e.degenerate).count();
    let mut a7 = entry(
        "A7",
        if !eqs.is_empty() && degenerate == 0 {
            AssumptionStatus::Cited
        } else {
            AssumptionStatus::Failed
        },
        "finitely many equilibria; the general finiteness result is cited, the scan count is evidence",
        json!({
            "scan_resolution": cfg.scan_resolution,
            "equilibria": eqs.iter().map(|e| &e.location).collect::<Vec<_>>(),
            "classifications": eqs.iter().map(|e| e.classification).collect::<Vec<_>>(),
            "degenerate": degenerate,
        }),
    );
    if let Some(e) = eqs.iter().find(|e| e.degenerate) {
        a7.witness = Some(e.location.clone());
    }

    Ok(AssumptionReport {
        model: "futile-cycle".into(),
        eps,
        entries: vec![a1, a2, a3, a4, a5, a6, a7],
        config: cfg.clone(),
    })
}

/// Audit of the planar counterexample.
pub fn counterexample_audit(cp: &CounterexampleParams<f64>, cfg: &AuditConfig) -> Result<AssumptionReport> {
    let cp = CounterexampleParams::with_box(cp.eps, cp.a, cp.b1)?;
    let sys = cp.system();
    let dom = cp.domain();
    // U is the open slow interval (−a − 1, a + 1)
    let u = Polytope::new(vec![vec![1.0], vec![-1.0]], vec![cp.a + 1.0, cp.a + 1.0]);
    let n = cfg.grid.max(1) * cfg.grid.max(1);
    let mut xs: Vec<Vec<f64>> = (0..n)
        .map(|k| vec![-(cp.a + 1.0) + 2.0 * (cp.a + 1.0) * (k as f64 + 0.5) / n as f64])
        .collect();
    let mut dropped = Vec::new();
    for e in &cfg.extra_points {
        if e.len() == 1 && u.margin(e) > 0.0 {
            xs.push(e.clone());
        } else {
            dropped.push(e.clone());
        }
    }
    let a1 = a1_cited("polynomial and tanh terms are smooth on every bounded set");
    let a2 = check_a2(&sys, &xs, cfg.residual_tol, &dropped);
    let vb = (vec![-cp.b1 - 1.0], vec![cp.b1 + 1.0]);
    let a3 = check_a3(&sys, &xs, (&vb.0, &vb.1), cfg.seed);
    let results: Vec<_> = xs
        .iter()
        .map(|x| {
            let r = sys.m0(x).ok().and_then(|y| sys.jacobian_fast(x, &y, 0.0).ok()).map(|j| {
                let d = j[(0, 0)];
                (d < 0.0, d < 0.0, vec![(-d, -d)], d)
            });
            (x.clone(), r)
        })
        .collect();
    let a4 = check_a4(xs.len(), results, &dropped, None);
    let a5 = check_a5(&sys, &dom, cp.eps, cfg)?;

    let reduced = reduced_field(&sys);
    let cone = OrthantCone::positive(1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa6);
    let kamke_points: Vec<Vec<f64>> = (0..cfg.kamke_grid).map(|_| vec![rng.gen_range(-cp.a..cp.a)]).collect();
    let epd_points: Vec<Vec<f64>> = (0..cfg.epd_samples).map(|_| vec![rng.gen_range(-cp.a..cp.a)]).collect();
    // the strict off-diagonal test is vacuous in one dimension
    let a6 = check_a6(&reduced, &cone, &kamke_points, &epd_points, &cfg.t_grid, None)?;

    let eqs = scalar_equilibria(&reduced, -5.0, 5.0, 10_000, &NewtonConfig::default())?;
    let ok = eqs.len() == 1 && eqs[0].location[0].abs() < 1e-8 && !eqs[0].degenerate;
    let mut a7 = entry(
        "A7",
        numeric(ok),
        "the reduced scalar equation has the single root x = 0 on [-5, 5]",
        json!({
            "grid_points": 10_000,
            "roots": eqs.iter().map(|e| e.location[0]).collect::<Vec<_>>(),
        }),
    );
    if !ok {
        a7.witness = eqs.first().map(|e| e.location.clone());
    }
    Ok(AssumptionReport {
        model: "counterexample".into(),
        eps: cp.eps,
        entries: vec![a1, a2, a3, a4, a5, a6, a7],
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_passes() {
        let p = FutileCycleParams::all_ones(1e-3).unwrap();
        let r = futile_cycle_audit(&p, &AuditConfig::default()).unwrap();
        let ids: Vec<_> = r.entries.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["A1", "A2", "A3", "A4", "A5", "A6", "A7"]);
        for e in &r.entries {
            assert!(e.status.passed(), "{}: {:?} {}", e.id, e.status, e.evidence);
        }
        assert_eq!(r.get("A3").unwrap().status, AssumptionStatus::VerifiedAnalytically);
    }

    #[test]
    fn outside_point_excluded_with_warning() {
        let p = FutileCycleParams::all_ones(1e-3).unwrap();
        let cfg = AuditConfig {
            grid: 10,
            extra_points: vec![vec![-5.0, 0.2]],
            boundary_samples: 50,
            kamke_grid: 5,
            epd_samples: 2,
            scan_resolution: 50,
            ..AuditConfig::default()
        };
        let r = futile_cycle_audit(&p, &cfg).unwrap();
        let a4 = r.get("A4").unwrap();
        assert!(a4.status.passed());
        assert_eq!(a4.warnings.len(), 1);
        assert_eq!(a4.evidence["excluded_points"][0][0], -5.0);
    }

    #[test]
    fn counterexample_passes() {
        let cp = CounterexampleParams::new(2.0).unwrap();
        let cfg = AuditConfig {
            grid: 20,
            ..AuditConfig::default()
        };
        let r = counterexample_audit(&cp, &cfg).unwrap();
        for e in &r.entries {
            assert!(e.status.passed(), "{}: {:?} {}", e.id, e.status, e.evidence);
        }
    }
}
