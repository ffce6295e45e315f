use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;
use slowfast::analysis::{
    convergence_census, detect_limit_cycle, CensusConfig, CycleConfig, NewtonConfig, Verdict,
};
use slowfast::experiments::{default_initial, model_equilibria, monotone_check, MonotoneConfig};
use slowfast::integrate::{integrate, Direction, EventSpec, IntegratorConfig, Method, Output, Status};
use slowfast::manifold::{asymptotic_phase, estimate_mu, manifold_error_scaling, PhaseOptions};
use slowfast::models::audit::{counterexample_audit, futile_cycle_audit, AuditConfig};
use slowfast::models::futile::k0_grid;
use slowfast::models::{ModelKey, ModelSpec};
use slowfast::{Error, Model};

use crate::output::{write_atomic, write_json, Envelope};
use crate::{Cli, Command, DirectionArg, MethodArg, ModelArgs, TolArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(PathBuf, io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(..) => 1,
            CliError::Lib(e) => match e {
                Error::DegenerateTimescale(_)
                | Error::DomainUndefined { .. }
                | Error::Unsupported(_)
                | Error::Dimension { .. }
                | Error::ParameterBound { .. }
                | Error::InvalidParameter(_)
                | Error::InvalidState(_)
                | Error::OutsideDomain(_)
                | Error::Config(_) => 2,
                Error::NonFinite(_)
                | Error::Singular
                | Error::NoConvergence { .. }
                | Error::LeftDomain(_)
                | Error::Integration(_)
                | Error::Eigen => 3,
            },
        }
    }
}

type Res<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load_model(args: &ModelArgs) -> Res<Model> {
    let mut file_spec = match &args.params {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            ModelSpec::from_json(&text)?
        }
        None => ModelSpec {
            model: args
                .model
                .clone()
                .ok_or_else(|| usage("one of --model or --params is required"))?,
            params: Default::default(),
            eps: None,
        },
    };
    if let Some(m) = &args.model {
        let key: ModelKey = m.parse()?;
        if args.params.is_some() && file_spec.model.parse::<ModelKey>()? != key {
            // the file's parameters are reused under the requested form
            let file_key: ModelKey = file_spec.model.parse()?;
            let compatible = key != ModelKey::Counterexample && file_key != ModelKey::Counterexample;
            if !compatible {
                return Err(usage(format!("--model {m} conflicts with the parameter file's model `{}`", file_spec.model)));
            }
        }
        file_spec.model = key.as_str().into();
    }
    let model = Model::from_spec(&file_spec)?;
    match args.eps {
        Some(eps) => Ok(model.with_eps(eps)?),
        None => Ok(model),
    }
}

fn out_path(args: &ModelArgs, name: &str) -> PathBuf {
    args.out_dir.join(name)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Io(path.to_path_buf(), e)
}

fn integrator(base: IntegratorConfig<f64>, tol: &TolArgs) -> Res<IntegratorConfig<f64>> {
    let cfg = base.with_tolerances(tol.rtol.unwrap_or(base.rtol), tol.atol.unwrap_or(base.atol));
    cfg.validate()?;
    Ok(cfg)
}

fn method_of(m: MethodArg) -> Method {
    match m {
        MethodArg::Dp45 => Method::DormandPrince45,
        MethodArg::Ros23 => Method::Rosenbrock23,
        MethodArg::Ros4 => Method::Rosenbrock4,
    }
}

fn needs_slow_fast(model: &Model, what: &str) -> Res<()> {
    match model.key() {
        ModelKey::FutileCycle | ModelKey::Counterexample => Ok(()),
        k => Err(usage(format!(
            "{what} needs a slow-fast model (futile-cycle or counterexample), got {k}"
        ))),
    }
}

pub fn run(cli: Cli) -> Res<u8> {
    let stamp = !cli.no_timestamp;
    match cli.command {
        Command::Simulate {
            model,
            tol,
            t_end,
            initial,
            method,
            points,
        } => simulate(&model, &tol, t_end, initial, method, points),
        Command::Equilibria { model, resolution } => equilibria(&model, resolution, stamp),
        Command::Census {
            model,
            tol,
            samples,
            seed,
            horizon,
            tol_field,
        } => census(&model, &tol, samples, seed, horizon, tol_field, stamp),
        Command::ManifoldError {
            model,
            tol,
            eps_list,
            grid,
        } => manifold_error(&model, &tol, &eps_list, grid, stamp),
        Command::PhaseTrack {
            model,
            tol,
            x,
            displacement,
            component,
            order,
            threshold,
            tau_factor,
            samples,
        } => phase_track(
            &model,
            &tol,
            x,
            displacement,
            component,
            PhaseOptions {
                tau_end: tau_factor,
                samples,
                manifold_order: order,
                threshold,
            },
            stamp,
        ),
        Command::MonotoneCheck {
            model,
            tol,
            cone,
            grid,
            epd_samples,
            pairs,
            pair_time,
            seed,
        } => {
            let base = MonotoneConfig::default();
            let cfg = MonotoneConfig {
                cone,
                kamke_grid: grid,
                epd_samples,
                pairs,
                pair_time,
                seed,
                rtol: tol.rtol.unwrap_or(base.rtol),
                atol: tol.atol.unwrap_or(base.atol),
                ..base
            };
            monotone(&model, cfg, stamp)
        }
        Command::CheckAssumptions {
            model,
            grid,
            boundary_samples,
            seed,
        } => check_assumptions(
            &model,
            AuditConfig {
                grid,
                boundary_samples,
                seed,
                ..AuditConfig::default()
            },
            stamp,
        ),
        Command::LimitCycle {
            model,
            tol,
            initial,
            section_index,
            section_value,
            direction,
            t_max,
            min_crossings,
            max_crossings,
            cycle_tol,
        } => {
            let base = CycleConfig::<f64>::default();
            let cfg = CycleConfig {
                min_crossings,
                max_crossings,
                tol: cycle_tol,
                t_max,
                integrator: integrator(base.integrator, &tol)?,
                ..base
            };
            limit_cycle(&model, initial, section_index, section_value, direction, cfg, stamp)
        }
    }
}

fn simulate(
    args: &ModelArgs,
    tol: &TolArgs,
    t_end: Option<f64>,
    initial: Option<Vec<f64>>,
    method: Option<MethodArg>,
    points: Option<usize>,
) -> Res<u8> {
    let model = load_model(args)?;
    let eps = model.eps();
    let s0 = match initial {
        Some(v) => v,
        None => default_initial(&model)?,
    };
    let stiff = match model.key() {
        ModelKey::FutileCycle | ModelKey::FutileCycleMassAction => true,
        ModelKey::Counterexample => eps < 0.05,
        ModelKey::FutileCycleReduced => false,
    };
    let method = method.map(method_of).unwrap_or(if stiff {
        Method::Rosenbrock4
    } else {
        Method::DormandPrince45
    });
    let cfg = integrator(IntegratorConfig::default().with_method(method), tol)?;
    let t_end = t_end.unwrap_or(match model.key() {
        ModelKey::FutileCycleMassAction => 50.0 / eps,
        _ => 50.0,
    });
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(usage("--t-end must be positive"));
    }
    let out = match points {
        Some(k) if k >= 2 => Output::Times((0..k).map(|i| t_end * i as f64 / (k - 1) as f64).collect()),
        Some(_) => return Err(usage("--points must be at least 2")),
        None => Output::Steps,
    };
    let (traj, n) = match &model {
        Model::FutileCycleReduced(p) => {
            let field = p.scaled().reduced_field();
            check_dim(&s0, 2)?;
            (integrate(&field, &s0, (0.0, t_end), &cfg, None, &out)?, 2)
        }
        Model::FutileCycleMassAction(p) => {
            let ma = p.mass_action();
            check_dim(&s0, 6)?;
            ma.validate_state(&s0)?;
            (integrate(&ma.field(), &s0, (0.0, t_end), &cfg, None, &out)?, 2)
        }
        _ => {
            let (sys, dom) = model.slow_fast().expect("slow-fast model");
            check_dim(&s0, sys.n() + sys.m())?;
            let poly = dom.at(eps)?;
            if poly.margin(&s0) < -cfg.domain_slack {
                return Err(Error::InvalidState(format!("initial state {s0:?} lies outside D_eps")).into());
            }
            let field = sys.slow_time_field(eps)?;
            (integrate(&field, &s0, (0.0, t_end), &cfg, None, &out)?, sys.n())
        }
    };
    let path = out_path(args, "trajectory.csv");
    write_atomic(&path, |w| traj.write_csv(n, w)).map_err(io_err(&path))?;
    println!(
        "{}: {} rows, status {:?}, t = {}",
        path.display(),
        traj.len(),
        traj.status,
        traj.final_time()
    );
    Ok(if traj.status == Status::Completed { 0 } else { 3 })
}

fn check_dim(s: &[f64], d: usize) -> Res<()> {
    if s.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: s.len(),
        }
        .into());
    }
    Ok(())
}

fn equilibria(args: &ModelArgs, resolution: Option<usize>, stamp: bool) -> Res<u8> {
    let model = load_model(args)?;
    let resolution = resolution.unwrap_or(if model.key() == ModelKey::Counterexample {
        10_000
    } else {
        200
    });
    let newton = NewtonConfig::default();
    let report = model_equilibria(&model, resolution, &newton)?;
    let path = out_path(args, "equilibria.json");
    let count = (report.reduced.len(), report.full.len());
    let env = Envelope::new(
        "equilibria",
        &model,
        json!({ "scan_resolution": resolution, "newton": newton }),
        report,
        stamp,
    );
    write_json(&path, &env).map_err(io_err(&path))?;
    println!("{}: {} reduced, {} full equilibria", path.display(), count.0, count.1);
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn census(args: &ModelArgs, tol: &TolArgs, samples: usize, seed: u64, horizon: f64, tol_field: f64, stamp: bool) -> Res<u8> {
    let model = load_model(args)?;
    needs_slow_fast(&model, "census")?;
    if samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let eps = model.eps();
    let (sys, dom) = model.slow_fast().expect("slow-fast model");
    let eqs = model_equilibria(&model, if model.key() == ModelKey::Counterexample { 10_000 } else { 200 }, &NewtonConfig::default())?;
    let cfg = CensusConfig {
        samples,
        horizon,
        tol: tol_field,
        seed,
        integrator: integrator(IntegratorConfig::stiff(), tol)?,
    };
    let c = convergence_census(&sys, &dom, eps, &eqs.full, &cfg)?;
    let json_path = out_path(args, "census.json");
    let csv_path = out_path(args, "census.csv");
    write_atomic(&csv_path, |w| c.write_csv(w)).map_err(io_err(&csv_path))?;
    let summary = (c.report.converged, c.report.samples, c.report.converged_fraction);
    let env = Envelope::new("census", &model, json!({ "census": cfg, "equilibria_scan": eqs.scan_resolution }), c.report, stamp);
    write_json(&json_path, &env).map_err(io_err(&json_path))?;
    println!(
        "{}: {}/{} converged (fraction {})",
        json_path.display(),
        summary.0,
        summary.1,
        summary.2
    );
    Ok(0)
}

/// Slow sample points for manifold experiments.
fn slow_samples(model: &Model, grid: usize) -> Vec<Vec<f64>> {
    match model {
        Model::Counterexample(cp) => (0..grid.max(2))
            .map(|k| vec![-cp.a + 2.0 * cp.a * (k as f64 + 0.5) / grid.max(2) as f64])
            .collect(),
        _ => k0_grid::<f64>(grid.max(1)).into_iter().map(|x| x.to_vec()).collect(),
    }
}

fn manifold_error(args: &ModelArgs, tol: &TolArgs, eps_list: &[f64], grid: usize, stamp: bool) -> Res<u8> {
    let model = load_model(args)?;
    needs_slow_fast(&model, "manifold-error")?;
    for &e in eps_list {
        if !(e > 0.0) || e > model.eps_max() {
            return Err(Error::DomainUndefined {
                eps: e,
                eps_max: model.eps_max(),
            }
            .into());
        }
    }
    let (sys, _) = model.slow_fast().expect("slow-fast model");
    let xs = slow_samples(&model, grid);
    let mu = estimate_mu(&sys, &xs)?;
    let cfg = integrator(IntegratorConfig::stiff().with_tolerances(1e-10, 1e-13), tol)?;
    let r = manifold_error_scaling(&sys, eps_list, &xs, mu, &cfg)?;
    let csv_path = out_path(args, "manifold-error.csv");
    write_atomic(&csv_path, |w| r.write_csv(w)).map_err(io_err(&csv_path))?;
    let json_path = out_path(args, "manifold-error.json");
    let slope = r.slope;
    let env = Envelope::new(
        "manifold-error",
        &model,
        json!({ "eps_list": eps_list, "grid": grid, "integrator": cfg }),
        r,
        stamp,
    );
    write_json(&json_path, &env).map_err(io_err(&json_path))?;
    println!("{}: log-log slope {:?}", json_path.display(), slope);
    Ok(0)
}

fn phase_track(
    args: &ModelArgs,
    tol: &TolArgs,
    x: Option<Vec<f64>>,
    displacement: f64,
    component: usize,
    mut opts: PhaseOptions<f64>,
    stamp: bool,
) -> Res<u8> {
    let model = load_model(args)?;
    needs_slow_fast(&model, "phase-track")?;
    let (sys, _) = model.slow_fast().expect("slow-fast model");
    let x = x.unwrap_or_else(|| if sys.n() == 1 { vec![0.5] } else { vec![0.3, 0.3] });
    check_dim(&x, sys.n())?;
    if component == 0 || component > sys.m() {
        return Err(usage(format!("--component must be in 1..={}", sys.m())));
    }
    let mu = match &model {
        Model::FutileCycle(p) => p.derived_constants(50).mu,
        _ => estimate_mu(&sys, &slow_samples(&model, 50))?,
    };
    let tau_factor = opts.tau_end;
    opts.tau_end = tau_factor / mu;
    let mut y = sys.m0(&x)?;
    y[component - 1] += displacement;
    let mut s0 = x.clone();
    s0.extend(y);
    let cfg = integrator(IntegratorConfig::stiff().with_tolerances(1e-10, 1e-13), tol)?;
    let r = asymptotic_phase(&sys, &s0, model.eps(), &cfg, &opts)?;
    let path = out_path(args, "phase-track.json");
    let summary = (r.rate, r.below_threshold_at);
    let env = Envelope::new(
        "phase-track",
        &model,
        json!({
            "x": x, "displacement": displacement, "component": component, "mu": mu,
            "tau_factor": tau_factor, "options": opts, "integrator": cfg,
        }),
        r,
        stamp,
    );
    write_json(&path, &env).map_err(io_err(&path))?;
    println!("{}: rate {:?}, below threshold at {:?}", path.display(), summary.0, summary.1);
    Ok(0)
}

fn monotone(args: &ModelArgs, cfg: MonotoneConfig, stamp: bool) -> Res<u8> {
    let model = load_model(args)?;
    if model.key() == ModelKey::FutileCycleMassAction {
        return Err(usage("monotone-check works on the reduced flow; use futile-cycle or futile-cycle-reduced"));
    }
    let r = monotone_check(&model, &cfg)?;
    let path = out_path(args, "monotone-check.json");
    let passed = r.passed;
    let env = Envelope::new("monotone-check", &model, json!(cfg), r, stamp);
    write_json(&path, &env).map_err(io_err(&path))?;
    println!("{}: passed = {passed}", path.display());
    Ok(0)
}

fn check_assumptions(args: &ModelArgs, cfg: AuditConfig, stamp: bool) -> Res<u8> {
    let model = load_model(args)?;
    let r = match &model {
        Model::Counterexample(cp) => counterexample_audit(cp, &cfg)?,
        _ => futile_cycle_audit(model.futile_params().expect("futile model"), &cfg)?,
    };
    let path = out_path(args, "assumptions.json");
    let statuses: Vec<String> = r.entries.iter().map(|e| format!("{}={:?}", e.id, e.status)).collect();
    let env = Envelope::new("check-assumptions", &model, json!(cfg), r, stamp);
    write_json(&path, &env).map_err(io_err(&path))?;
    println!("{}: {}", path.display(), statuses.join(" "));
    Ok(0)
}

fn limit_cycle(
    args: &ModelArgs,
    initial: Option<Vec<f64>>,
    section_index: usize,
    section_value: f64,
    direction: DirectionArg,
    cfg: CycleConfig<f64>,
    stamp: bool,
) -> Res<u8> {
    let model = load_model(args)?;
    needs_slow_fast(&model, "limit-cycle")?;
    let (sys, _) = model.slow_fast().expect("slow-fast model");
    let dim = sys.n() + sys.m();
    let s0 = match initial {
        Some(v) => v,
        None => default_initial(&model)?,
    };
    check_dim(&s0, dim)?;
    if section_index == 0 || section_index > dim {
        return Err(usage(format!("--section-index must be in 1..={dim}")));
    }
    let dir = match direction {
        DirectionArg::Up => Direction::Up,
        DirectionArg::Down => Direction::Down,
        DirectionArg::Both => Direction::Both,
    };
    let section = EventSpec::coordinate(section_index - 1, section_value, dir, 1e-12)?;
    let eqs = model_equilibria(
        &model,
        if model.key() == ModelKey::Counterexample { 10_000 } else { 200 },
        &NewtonConfig::default(),
    )?;
    let locs: Vec<Vec<f64>> = eqs.full.iter().map(|e| e.location.clone()).collect();
    let field = sys.slow_time_field(model.eps())?;
    let r = detect_limit_cycle(&field, &s0, &section, &locs, &cfg)?;
    let path = out_path(args, "limit-cycle.json");
    let verdict = r.verdict;
    let env = Envelope::new(
        "limit-cycle",
        &model,
        json!({
            "initial": s0, "section_index": section_index, "section_value": section_value,
            "direction": direction, "cycle": cfg, "equilibria": locs,
        }),
        r,
        stamp,
    );
    write_json(&path, &env).map_err(io_err(&path))?;
    let label = match verdict {
        Verdict::CycleFound => "cycle-found",
        Verdict::ConvergedToEquilibrium => "converged-to-equilibrium",
        Verdict::Inconclusive => "inconclusive",
    };
    println!("{}: {label}", path.display());
    Ok(0)
}
