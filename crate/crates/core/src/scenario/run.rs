use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::info;
use num_complex::Complex64;

use super::config::{
    build_grid, build_multipoint, build_operator_config, gap_relation, DataConfig, ScenarioConfig, ScenarioKind,
};
use super::csv::{kv, num, write_atomic, CsvTable};
use super::data::{gaussian_data, gaussian_source, load_field, single_mode, BumpSpec};
use crate::multipoint::{initial_pair, solve_linear, verify_solution, LinearProblem, SolverOptions, Source};
use crate::nonlinear::{continue_solution, solve_nonlinear, verify_nonlinear, Nonlinearity, PicardConfig};
use crate::operator::OperatorSpec;
use crate::oracle::{compare, relative_difference, rk4_integrate, shooting_multipoint, ShootingOptions};
use crate::spectral::snapshot::write_field;
use crate::spectral::{inverse_transform, lebesgue_norm, steps_for, Field, GridSpec, TimeGrid};
use crate::strichartz::{classify_pair, dispersive_ratio, strichartz_report, Exponent, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Directory for every artifact; created when missing.
    pub out_dir: PathBuf,
    /// Resolves relative data paths.
    pub base_dir: Option<PathBuf>,
    /// Residual check after every solve.
    pub verify: bool,
}

/// Files written and the summary rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub table: PathBuf,
    pub summary_file: PathBuf,
    pub snapshot: Option<PathBuf>,
    pub summary: Vec<(String, String)>,
}

/// 0 on success, 2 for numerical failures, 1 for everything else.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(_) => 0,
        Err(e) if e.is_numerical() => 2,
        Err(_) => 1,
    }
}

/// Single-line `code=<reason> ...` diagnostic.
pub fn reason_line(e: &Error) -> String {
    let detail = e.to_string().replace(['\n', '\r'], " ");
    match e {
        Error::Config { line, .. } => format!("code={} line={line} detail=\"{detail}\"", e.code()),
        _ => format!("code={} detail=\"{detail}\"", e.code()),
    }
}

fn rat(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

struct Setup {
    grid: GridSpec,
    op: OperatorSpec,
}

fn setup(cfg: &ScenarioConfig) -> Result<Setup> {
    let grid = build_grid(cfg.grid.as_ref().expect("validated: grid"))?;
    let op = build_operator_config(cfg.operator.as_ref().expect("validated: operator"))?;
    Ok(Setup { grid, op })
}

fn data_fields(cfg: &DataConfig, s: &Setup, seed_offset: u64, opts: &RunOptions) -> Result<(Field, Field)> {
    let d = s.op.hdim();
    match cfg {
        DataConfig::Gaussian { seed, bumps, amplitude, zero_mean, width } => {
            let spec = BumpSpec { count: *bumps, amplitude: *amplitude, zero_mean: *zero_mean, width: *width };
            gaussian_data(&s.grid, d, seed.wrapping_add(seed_offset), &spec)
        }
        DataConfig::SingleMode { frequency, component, amplitude } => {
            Ok((single_mode(&s.grid, d, frequency, *component, *amplitude)?, Field::zeros(&s.grid, d)))
        }
        DataConfig::File { phi, psi } => {
            let base = opts.base_dir.clone().unwrap_or_else(|| PathBuf::from("."));
            let phi = load_field(&base.join(phi), &s.grid)?;
            let psi = match psi {
                Some(p) => load_field(&base.join(p), &s.grid)?,
                None => Field::zeros(&s.grid, d),
            };
            Ok((phi, psi))
        }
    }
}

fn problem(cfg: &ScenarioConfig, s: &Setup, seed_offset: u64, opts: &RunOptions) -> Result<LinearProblem> {
    let (phi, psi) = data_fields(cfg.data.as_ref().expect("validated: data"), s, seed_offset, opts)?;
    let horizon = cfg.time.as_ref().map_or(1.0, |t| t.horizon);
    let source = match &cfg.source {
        None => Source::Zero,
        Some(src) => {
            let times = TimeGrid::covering(horizon, src.dt)?;
            let spec = BumpSpec { count: src.bumps, amplitude: src.amplitude, zero_mean: src.zero_mean, width: None };
            gaussian_source(&s.grid, s.op.hdim(), src.seed.wrapping_add(seed_offset), &spec, times)?
        }
    };
    LinearProblem::new(s.op.clone(), phi, psi, source, horizon)
}

fn time_grid(cfg: &ScenarioConfig) -> Result<TimeGrid> {
    let t = cfg.time.as_ref().expect("validated: time");
    TimeGrid::covering(t.horizon, t.dt)
}

fn residual_rows(summary: &mut Vec<(String, String)>, r: &crate::multipoint::ResidualReport) {
    summary.push(kv("pde_residual", num(r.pde_residual)));
    summary.push(kv("relative_pde_residual", num(r.relative_pde())));
    summary.push(kv("condition_u", num(r.condition_u)));
    summary.push(kv("condition_ut", num(r.condition_ut)));
    if let Some(e) = r.energy_drift {
        summary.push(kv("energy_drift", num(e)));
    }
}

struct Artifacts {
    table: CsvTable,
    summary: Vec<(String, String)>,
    snapshot: Option<Field>,
}

/// Runs one scenario and writes `<name>.csv`, `<name>.summary.csv` and the
/// optional snapshot into `opts.out_dir`. `<name>` is `output.csv` without
/// its extension, or the scenario kind.
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutcome> {
    info!("running {}", cfg.kind);
    let art = match cfg.kind {
        ScenarioKind::SolveLinear => run_linear(cfg, opts)?,
        ScenarioKind::SolveNlw => run_nlw(cfg, opts)?,
        ScenarioKind::CheckAdmissible => run_admissible(cfg)?,
        ScenarioKind::VerifyDispersive => run_dispersive(cfg, opts)?,
        ScenarioKind::VerifyStrichartz => run_strichartz(cfg, opts)?,
        ScenarioKind::OracleCompare => run_oracle(cfg, opts)?,
    };
    fs::create_dir_all(&opts.out_dir)?;
    let name = cfg.output.csv.clone().unwrap_or_else(|| format!("{}.csv", cfg.kind));
    let stem = Path::new(&name).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or(name.clone());
    let table = opts.out_dir.join(&name);
    let summary_file = opts.out_dir.join(format!("{stem}.summary.csv"));
    art.table.write_atomic(&table)?;
    CsvTable::summary(&art.summary).write_atomic(&summary_file)?;
    let snapshot = match (&cfg.output.snapshot, &art.snapshot) {
        (Some(n), Some(f)) => {
            let path = opts.out_dir.join(n);
            let mut bytes = Vec::new();
            write_field(BufWriter::new(&mut bytes), f)?;
            write_atomic(&path, &bytes)?;
            Some(path)
        }
        _ => None,
    };
    Ok(RunOutcome { table, summary_file, snapshot, summary: art.summary })
}

fn run_linear(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Artifacts> {
    let s = setup(cfg)?;
    let problem = problem(cfg, &s, 0, opts)?;
    let spec = build_multipoint(cfg.multipoint.as_ref())?;
    let times = time_grid(cfg)?;
    let sol = solve_linear(&problem, &spec, &times, &SolverOptions::default())?;
    let energies = crate::multipoint::energy(&sol.trajectory, &s.op);
    let mut table = CsvTable::new(&["t", "l2_u", "linf_u", "l2_ut", "energy"]);
    let dv = s.grid.cell_volume();
    let l2 = |g: &crate::spectral::SpectralField| (g.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt();
    for j in 0..sol.trajectory.len() {
        let u = sol.trajectory.value(j);
        let linf = lebesgue_norm(&inverse_transform(u), f64::INFINITY)?;
        table.push(vec![num(times.time(j)), num(l2(u)), num(linf), num(l2(sol.trajectory.rate(j))), num(energies[j])]);
    }
    let r = sol.report;
    let mut summary = vec![
        kv("modes", r.modes),
        kv("min_abs_det", num(r.min_abs_det)),
        kv("max_condition", num(r.max_condition)),
        kv("max_inverse_norm", num(r.max_inverse_norm)),
    ];
    if opts.verify {
        residual_rows(&mut summary, &verify_solution(&sol.trajectory, &problem, &spec)?);
    }
    let last = inverse_transform(sol.trajectory.value(sol.trajectory.len() - 1));
    Ok(Artifacts { table, summary, snapshot: Some(last) })
}

fn run_nlw(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Artifacts> {
    let s = setup(cfg)?;
    let problem = problem(cfg, &s, 0, opts)?;
    let spec = build_multipoint(cfg.multipoint.as_ref())?;
    let n = cfg.nonlinearity.as_ref().expect("validated: nonlinearity");
    let nl = Nonlinearity::new(n.kind, n.lambda, n.k)?;
    let picard = PicardConfig {
        max_iter: n.max_iter,
        tol: n.tol,
        contraction_target: n.target,
        radius: n.radius,
        window: n.window,
        dt: time_grid(cfg)?.dt(),
        initial_guess: n.guess,
        ..PicardConfig::default()
    };
    let mut table = CsvTable::new(&["window", "iteration", "difference", "ratio"]);
    let push = |table: &mut CsvTable, w: usize, rep: &crate::nonlinear::ConvergenceReport| {
        for (i, d) in rep.differences.iter().enumerate() {
            let ratio = if i == 0 { String::new() } else { num(rep.ratios[i - 1]) };
            table.push(vec![w.to_string(), (i + 1).to_string(), num(*d), ratio]);
        }
    };
    let mut summary = Vec::new();
    let trajectory = match n.t_star {
        Some(t_star) => {
            let res = continue_solution(&problem, &spec, &nl, &picard, t_star)?;
            for (w, rep) in res.reports.iter().enumerate() {
                push(&mut table, w, rep);
            }
            summary.push(kv("windows", res.windows.len()));
            summary.push(kv("max_ratio", num(res.reports.iter().map(|r| r.max_ratio()).fold(0.0, f64::max))));
            summary.push(kv("end_time", num(res.trajectory.times().horizon())));
            res.trajectory
        }
        None => {
            let sol = solve_nonlinear(&problem, &spec, &nl, &picard)?;
            let r = &sol.report;
            push(&mut table, 0, r);
            summary.extend([
                kv("window", num(r.window)),
                kv("radius", num(r.radius)),
                kv("holder", r.holder.map_or("none".into(), num)),
                kv("pair", format!("({} {})", r.pair.0, r.pair.1)),
                kv("iterations", r.iterations),
                kv("converged", r.converged),
                kv("max_ratio", num(r.max_ratio())),
                kv("final_norm", num(r.final_norm)),
            ]);
            if opts.verify {
                residual_rows(&mut summary, &verify_nonlinear(&sol.trajectory, &problem, &spec, &nl)?);
            }
            sol.trajectory
        }
    };
    let last = inverse_transform(trajectory.value(trajectory.len() - 1));
    Ok(Artifacts { table, summary, snapshot: Some(last) })
}

fn run_admissible(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let e = cfg.exponents.as_ref().expect("validated: exponents");
    let mut table = CsvTable::new(&["n", "q", "r", "verdict", "sharp", "endpoint"]);
    let mut admissible = 0usize;
    for &n in &e.dims {
        for &q in &e.values {
            for &r in &e.values {
                let v = classify_pair(n, q, r)?;
                let verdict = if v.excluded_triple {
                    "excluded"
                } else if v.admissible {
                    admissible += 1;
                    "admissible"
                } else {
                    "inadmissible"
                };
                table.push(vec![
                    n.to_string(),
                    q.to_string(),
                    r.to_string(),
                    verdict.into(),
                    v.sharp.to_string(),
                    v.endpoint.to_string(),
                ]);
            }
        }
    }
    let summary = vec![kv("pairs", table.rows.len()), kv("admissible", admissible)];
    Ok(Artifacts { table, summary, snapshot: None })
}

fn exponent_f64(e: Exponent) -> f64 {
    e.to_f64()
}

fn run_dispersive(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Artifacts> {
    let s = setup(cfg)?;
    let e = cfg.exponents.as_ref().expect("validated: exponents");
    let (phi, _) = data_fields(cfg.data.as_ref().expect("validated: data"), &s, 0, opts)?;
    let p = exponent_f64(e.p.expect("validated: p"));
    let alpha = rat(e.alpha);
    let rep = dispersive_ratio(&s.op, alpha, p, &phi, &e.times)?;
    let mut table = CsvTable::new(&["t", "norm", "ratio"]);
    for ((t, v), r) in rep.times.iter().zip(&rep.norms).zip(&rep.ratios) {
        table.push(vec![num(*t), num(*v), num(*r)]);
    }
    let n = s.grid.dim() as f64;
    let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
    let mut summary = vec![
        kv("expected_exponent", num(n * (0.5 - inv_p) + alpha)),
        kv("data_norm", num(rep.data_norm)),
        kv("wrap_bound", num(rep.wrap_bound)),
    ];
    if let Some(f) = rep.fit {
        summary.extend([
            kv("power_exponent", num(f.power_exponent)),
            kv("power_rms", num(f.power_rms)),
            kv("shifted_exponent", num(f.shifted_exponent)),
            kv("shifted_rms", num(f.shifted_rms)),
            kv("better_model", format!("{:?}", f.better).to_lowercase()),
        ]);
    }
    Ok(Artifacts { table, summary, snapshot: None })
}

fn run_strichartz(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Artifacts> {
    let s = setup(cfg)?;
    let e = cfg.exponents.as_ref().expect("validated: exponents");
    let gap = gap_relation(e, s.grid.dim() as u32)?;
    let spec = build_multipoint(cfg.multipoint.as_ref())?;
    let times = time_grid(cfg)?;
    let seeded = matches!(cfg.data, Some(DataConfig::Gaussian { .. }));
    let count = if seeded { e.ensemble.max(1) } else { 1 };
    let mut table = CsvTable::new(&[
        "instance", "lhs", "rhs", "ratio", "mixed", "energy", "rate", "data_phi", "data_psi", "source",
    ]);
    let mut max_ratio = 0.0f64;
    for i in 0..count {
        let problem = problem(cfg, &s, i as u64, opts)?;
        let rep = strichartz_report(&problem, &spec, &gap, &times, &SolverOptions::default())?;
        max_ratio = max_ratio.max(rep.ratio);
        let mut row = vec![i.to_string(), num(rep.lhs), num(rep.rhs), num(rep.ratio)];
        row.extend(rep.lhs_terms.iter().chain(&rep.rhs_terms).map(|v| num(*v)));
        table.push(row);
    }
    let summary = vec![
        kv("instances", count),
        kv("max_ratio", num(max_ratio)),
        kv("gamma", gap.gamma),
        kv("alpha", gap.alpha),
        kv("pair", format!("({} {})", gap.pair.0, gap.pair.1)),
        kv("dual", format!("({} {})", gap.dual.0, gap.dual.1)),
    ];
    Ok(Artifacts { table, summary, snapshot: None })
}

fn run_oracle(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Artifacts> {
    let s = setup(cfg)?;
    let problem = problem(cfg, &s, 0, opts)?;
    let spec = build_multipoint(cfg.multipoint.as_ref())?;
    let oracle = cfg.oracle.unwrap_or(super::config::OracleConfig { dt: 1e-3, max_step: 1e-3 });
    let options = SolverOptions::default();
    let (u0, u1, _) = initial_pair(&problem, &spec, &options)?;
    let shot =
        shooting_multipoint(&problem, &spec, &ShootingOptions { max_step: oracle.max_step, ..Default::default() })?;
    let fine = TimeGrid::covering(problem.horizon(), oracle.dt)?;
    let sol = solve_linear(&problem, &spec, &fine, &options)?;
    let rk = rk4_integrate(&problem, &inverse_transform(&u0), &inverse_transform(&u1), oracle.dt)?;
    let cmp = compare(&sol.trajectory, &rk, 2.0, 2.0)?;

    let stride = steps_for(time_grid(cfg)?.dt(), oracle.dt)?;
    let mut table = CsvTable::new(&["t", "l2_diff", "sup_diff"]);
    let minus = Complex64::new(-1.0, 0.0);
    let dv = s.grid.cell_volume();
    for j in (0..fine.len()).step_by(stride.max(1)) {
        let diff = rk.value(j).axpy(minus, sol.trajectory.value(j))?;
        let l2 = (diff.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * dv).sqrt();
        let sup = lebesgue_norm(&inverse_transform(&diff), f64::INFINITY)?;
        table.push(vec![num(fine.time(j)), num(l2), num(sup)]);
    }
    let mut summary = vec![
        kv("u0_relative", num(relative_difference(&u0, &shot.u0)?)),
        kv("u1_relative", num(relative_difference(&u1, &shot.u1)?)),
        kv("min_singular", num(shot.min_singular)),
        kv("sup", num(cmp.sup)),
        kv("l2", num(cmp.l2)),
        kv("mixed_l2l2", num(cmp.mixed)),
        kv("relative_l2", num(cmp.relative_l2)),
    ];
    if opts.verify {
        residual_rows(&mut summary, &verify_solution(&sol.trajectory, &problem, &spec)?);
    }
    Ok(Artifacts { table, summary, snapshot: None })
}
