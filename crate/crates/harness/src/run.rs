use std::time::Instant;

use mkdvb_core::estimates::{
    airy_l6_ratio, check_linear_fs_bound, random_shell_data, sweep_j_bound, BoundCase, BOUND_SPREAD_LIMIT,
};
use mkdvb_core::evolution::{evolve, inviscid_limit_sweep_partial, scaling_check_on, EquationSpec, SolverConfig, Trajectory};
use mkdvb_core::functionals::{miura_consistency, Functional, FunctionalReport};
use mkdvb_core::spectral::{forward_transform, sobolev_norm, PeriodicGrid, RealField};
use serde_json::Value;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, ExperimentKind};
use crate::report::{emit_tables, Cell, EmitError, RunReport, Series, Table};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] mkdvb_core::Error),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

type Result<T> = std::result::Result<T, RunError>;

/// Run the configured experiment and, when `config.out` is set, write its
/// files there. Member blow-ups make the report partial instead of failing it.
pub fn run(config: ExperimentConfig) -> Result<RunReport> {
    let config = config.resolve()?;
    let start = Instant::now();
    let mut report = RunReport::empty(config.clone());
    match config.experiment {
        ExperimentKind::Evolve => run_evolve(&config, &mut report)?,
        ExperimentKind::Conserve => run_conserve(&config, &mut report)?,
        ExperimentKind::InviscidSweep => run_sweep(&config, &mut report)?,
        ExperimentKind::Scaling => run_scaling(&config, &mut report)?,
        ExperimentKind::Miura => run_miura(&config, &mut report)?,
        ExperimentKind::Jbounds => run_jbounds(&config, &mut report)?,
        ExperimentKind::Linfs => run_linfs(&config, &mut report)?,
        ExperimentKind::Strichartz => run_strichartz(&config, &mut report)?,
    }
    report.wall_clock = Some(start.elapsed());
    if let Some(dir) = &config.out {
        emit_tables(&report, dir)?;
    }
    Ok(report)
}

fn initial(config: &ExperimentConfig) -> Result<RealField> {
    Ok(config.data.sample(&config.grid())?)
}

fn solver(config: &ExperimentConfig) -> SolverConfig {
    SolverConfig::new(config.dt()).record_every(config.time.record_every)
}

/// Step count `evolve` takes for `[0, T]` at `dt`.
fn planned_steps(final_time: f64, dt: f64) -> u64 {
    (final_time / dt - 1e-9).ceil().max(1.0) as u64
}

/// The configured trajectory, or what was recorded before a blow-up.
fn trajectory(config: &ExperimentConfig, report: &mut RunReport) -> Result<Trajectory> {
    let eq = config.equation_spec();
    let traj = match evolve(&initial(config)?, &eq, config.time.final_time, &solver(config)) {
        Ok(t) => t,
        Err(mkdvb_core::Error::BlowUp { time, reason, partial: Some(p) }) => {
            report.fail(format!("blow-up at t = {time}: {reason}"));
            *p
        }
        Err(e) => return Err(e.into()),
    };
    report.steps += traj.steps() as u64;
    report.note("dt", traj.dt());
    report.note("snapshots", traj.len());
    if eq.family().is_dissipative() {
        report.note_f64("l2_balance_residual", Some(traj.l2_balance_residual()));
    }
    Ok(traj)
}

fn norm(u: &RealField, s: f64) -> f64 {
    sobolev_norm(&forward_transform(u), s).unwrap_or(f64::NAN)
}

fn run_evolve(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let traj = trajectory(config, report)?;
    let mut snaps = Table::new(
        "snapshots",
        &[("time", "t"), ("l2_norm", "L2"), ("h1_norm", "H1"), ("h2_norm", "H2"), ("max_abs", "u")],
    );
    let mut l2 = Vec::new();
    let (mut sup_h1, mut sup_h2) = (0.0_f64, 0.0_f64);
    for (&t, u) in traj.times().iter().zip(traj.fields()) {
        let (n0, n1, n2) = (norm(u, 0.0), norm(u, 1.0), norm(u, 2.0));
        sup_h1 = sup_h1.max(n1);
        sup_h2 = sup_h2.max(n2);
        l2.push((t, n0));
        snaps.push(vec![Cell::num(t), Cell::num(n0), Cell::num(n1), Cell::num(n2), Cell::num(u.max_abs())]);
    }
    let last = traj.last();
    let mut profile = Table::new("final_profile", &[("x", "x"), ("u", "u")]);
    let xs = last.grid().xs();
    for (&x, &v) in xs.iter().zip(last.samples()) {
        profile.push(vec![Cell::num(x), Cell::num(v)]);
    }
    report.note("final_time", traj.final_time());
    report.note_f64("sup_h1", Some(sup_h1));
    report.note_f64("sup_h2", Some(sup_h2));
    report.series.push(Series::new("l2_norm", l2));
    report.series.push(Series::new("u_final", xs.into_iter().zip(last.samples().iter().copied()).collect()));
    report.tables.push(snaps);
    report.tables.push(profile);
    Ok(())
}

fn run_conserve(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let traj = trajectory(config, report)?;
    let functionals: &[Functional] = if config.equation.family.is_cubic() {
        &[Functional::L2Norm, Functional::H1Mkdv, Functional::H2Mkdv, Functional::H2pMkdv]
    } else {
        &[Functional::L2Norm, Functional::H1Kdv]
    };
    let reports = functionals.iter().map(|&f| FunctionalReport::along(&traj, f)).collect::<mkdvb_core::Result<Vec<_>>>()?;

    let mut columns = vec![("time", "t")];
    columns.extend(reports.iter().map(|r| (r.name.as_str(), "")));
    let mut values = Table::new("functionals", &columns);
    for (i, &t) in traj.times().iter().enumerate() {
        let mut row = vec![Cell::num(t)];
        row.extend(reports.iter().map(|r| Cell::num(r.values[i])));
        values.push(row);
    }
    let mut drift = Table::new("drift", &[("functional", ""), ("relative_drift", ""), ("boundary_decay", "u")]);
    let mut max_drift = 0.0_f64;
    for r in &reports {
        drift.push(vec![Cell::Text(r.name.clone()), Cell::num(r.drift), Cell::num(r.boundary_decay)]);
        report.note_f64(&format!("drift_{}", r.name), Some(r.drift));
        report.series.push(Series::new(&r.name, traj.times().iter().copied().zip(r.values.iter().copied()).collect()));
        max_drift = max_drift.max(r.drift);
    }
    report.note_f64("max_drift", Some(max_drift));
    report.tables.push(values);
    report.tables.push(drift);
    Ok(())
}

fn run_sweep(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let sw = &config.sweep;
    let sweep = inviscid_limit_sweep_partial(
        &initial(config)?,
        &sw.epsilons,
        config.equation.alpha,
        sw.s,
        config.time.final_time,
        &solver(config),
    )?;
    let slope = sweep.slope_dropping(sw.drop_largest);
    let mut table = Table::new("sweep", &[("epsilon", ""), ("sup_Hs_error", "H^s"), ("slope_fit", "")]);
    let mut points = Vec::new();
    let mut runs = 1;
    for row in &sweep.rows {
        table.push(vec![Cell::num(row.epsilon), Cell::opt(row.error), Cell::opt(slope)]);
        match (row.error, &row.failure) {
            (Some(e), _) => {
                runs += 1;
                points.push((row.epsilon, e));
            }
            (None, failure) => report.fail(format!(
                "ε = {}: {}",
                row.epsilon,
                failure.as_deref().unwrap_or("no error recorded")
            )),
        }
    }
    report.steps += runs * planned_steps(config.time.final_time, config.dt());
    report.note_f64("slope", slope);
    report.note("monotone", sweep.monotone);
    report.note("warnings", Value::from(sweep.warnings.clone()));
    report.series.push(Series::new("sup_Hs_error", points));
    report.tables.push(table);
    Ok(())
}

fn run_scaling(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let sc = &config.scaling;
    let points = sc.points.unwrap_or(config.grid.points);
    let r = scaling_check_on(
        &initial(config)?,
        sc.lambda,
        config.equation.epsilon,
        config.equation.alpha,
        config.time.final_time,
        &solver(config),
        points,
    )?;
    let mut table = Table::new("scaling", &[("time", "t"), ("discrepancy", "L2")]);
    for (&t, &d) in r.times.iter().zip(&r.discrepancies) {
        table.push(vec![Cell::num(t), Cell::num(d)]);
    }
    report.steps += 2 * planned_steps(config.time.final_time, config.dt());
    report.note("lambda", r.lambda);
    report.note("epsilon_scaled", r.epsilon_scaled);
    report.note_f64("sup_discrepancy", Some(r.sup));
    report.series.push(Series::new("discrepancy", r.times.iter().copied().zip(r.discrepancies.iter().copied()).collect()));
    report.tables.push(table);
    Ok(())
}

fn run_miura(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let phi = initial(config)?;
    let mut table = Table::new("miura", &[("dt", "t"), ("kdv_residual", "L2"), ("ratio", "")]);
    let mut prev: Option<f64> = None;
    let mut min_ratio = f64::INFINITY;
    let mut points = Vec::new();
    for &dt in &config.miura.dts {
        let traj = evolve(&phi, &EquationSpec::mkdv(), config.time.final_time, &SolverConfig::new(dt))?;
        report.steps += traj.steps() as u64;
        let r = miura_consistency(&traj)?;
        let ratio = prev.map(|p| p / r);
        if let Some(q) = ratio {
            min_ratio = min_ratio.min(q);
        }
        table.push(vec![Cell::num(dt), Cell::num(r), ratio.map_or(Cell::Text("-".into()), Cell::num)]);
        points.push((dt, r));
        prev = Some(r);
    }
    report.note_f64("min_ratio", min_ratio.is_finite().then_some(min_ratio));
    report.series.push(Series::new("kdv_residual", points));
    report.tables.push(table);
    Ok(())
}

fn run_jbounds(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let jb = &config.jbounds;
    let mut table = Table::new(
        "jbounds",
        &[
            ("case", ""),
            ("k1", ""),
            ("k2", ""),
            ("k3", ""),
            ("k4", ""),
            ("j1", ""),
            ("j2", ""),
            ("j3", ""),
            ("j4", ""),
            ("bound", ""),
            ("max_ratio", ""),
            ("max_path_gap", ""),
        ],
    );
    let mut spreads = Table::new("jbound_spread", &[("case", ""), ("tuples", ""), ("spread", ""), ("stable", "")]);
    let mut max_gap = 0.0_f64;
    let mut all_stable = true;
    for case in BoundCase::ALL {
        let tuples: Vec<_> = jb.tuples.iter().filter(|t| t.case == case).map(|t| t.indices()).collect();
        if tuples.is_empty() {
            continue;
        }
        let sweep = sweep_j_bound(case, &tuples, jb.trials, jb.nodes, config.seed)?;
        for r in &sweep.reports {
            let mut row = vec![Cell::Text(case.as_str().into())];
            row.extend(r.blocks.k.iter().map(|&k| Cell::Int(k.into())));
            row.extend(r.blocks.j.iter().map(|&j| Cell::Int(j.into())));
            row.extend([Cell::num(r.bound), Cell::num(r.max_ratio), Cell::num(r.max_path_gap)]);
            table.push(row);
            max_gap = max_gap.max(r.max_path_gap);
        }
        // A single tuple has no spread to speak of; it only needs a finite ratio.
        let stable = if tuples.len() == 1 { sweep.reports.iter().all(|r| r.is_finite()) } else { sweep.is_stable() };
        all_stable &= stable;
        spreads.push(vec![
            Cell::Text(case.as_str().into()),
            Cell::Int(tuples.len() as i64),
            Cell::opt(sweep.spread),
            Cell::Text(stable.to_string()),
        ]);
        report.note_f64(&format!("spread_{}", case.as_str()), sweep.spread);
    }
    report.note_f64("max_path_gap", Some(max_gap));
    report.note("spread_limit", BOUND_SPREAD_LIMIT);
    report.note("all_stable", all_stable);
    report.tables.push(table);
    report.tables.push(spreads);
    Ok(())
}

fn run_linfs(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let phi = forward_transform(&initial(config)?);
    let t = check_linear_fs_bound(&phi, &config.linfs.epsilons, config.equation.alpha, config.linfs.s)?;
    let mut table = Table::new("linfs", &[("epsilon", ""), ("fs_ratio", "")]);
    for (&e, &r) in t.epsilons.iter().zip(&t.ratios) {
        table.push(vec![Cell::num(e), Cell::opt(r)]);
    }
    report.note("time_samples", t.time_samples);
    report.note("window", t.window);
    report.note_f64("spread", t.spread);
    report.note("flagged", t.flagged);
    report.tables.push(table);
    Ok(())
}

fn run_strichartz(config: &ExperimentConfig, report: &mut RunReport) -> Result<()> {
    let st = &config.strichartz;
    let grid = PeriodicGrid::new(config.grid.length, st.points)?;
    let mut table = Table::new("strichartz", &[("k", ""), ("l6_ratio", "")]);
    let mut present = Vec::new();
    for &k in &st.shells {
        let f = random_shell_data(&grid, k, config.seed.wrapping_add(k.into()))?;
        let r = airy_l6_ratio(k, &f, st.window, st.samples, config.seed)?;
        table.push(vec![Cell::Int(k.into()), Cell::opt(r)]);
        if let Some(r) = r {
            present.push(r);
        }
    }
    let spread = (!present.is_empty()).then(|| {
        let max = present.iter().cloned().fold(f64::MIN, f64::max);
        let min = present.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    });
    report.note_f64("spread", spread);
    report.tables.push(table);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::report::RunStatus;

    #[test]
    fn identity_scaling_is_exact() {
        let cfg = parse_config(
            "experiment = \"scaling\"\n[grid]\npoints = 256\n[scaling]\nlambda = 1.0\n[time]\nfinal = 0.2\ndt = 0.02\n",
        )
        .unwrap();
        let r = run(cfg).unwrap();
        let d = r.table("scaling").unwrap().numbers("discrepancy");
        assert!(!d.is_empty());
        assert!(d.iter().all(|v| v.unwrap() < 1e-12), "{d:?}");
        assert_eq!(r.steps, 20);
    }

    #[test]
    fn blow_up_makes_a_partial_report() {
        // KdV from large-amplitude data on a coarse grid with an oversized step.
        let cfg = parse_config(
            "experiment = \"evolve\"\n[grid]\nlength = 6.283185307179586\npoints = 32\n\
             [equation]\nfamily = \"kdv\"\n[data]\nprofile = \"cosine\"\namplitude = 40.0\nmode = 1\n\
             [time]\nfinal = 5.0\ndt = 0.05\n",
        )
        .unwrap();
        let r = run(cfg).unwrap();
        assert!(matches!(r.status, RunStatus::Partial { .. }), "{:?}", r.status);
        assert!(!r.table("snapshots").unwrap().rows.is_empty());
    }

    #[test]
    fn miura_ratios_fill_from_second_row() {
        let cfg = parse_config(
            "experiment = \"miura\"\n[grid]\npoints = 256\n[time]\nfinal = 0.2\n[miura]\ndts = [0.04, 0.02]\n",
        )
        .unwrap();
        let r = run(cfg).unwrap();
        let t = r.table("miura").unwrap();
        assert_eq!(t.rows[0][2], Cell::Text("-".into()));
        assert!(matches!(t.rows[1][2], Cell::Num(_)));
    }
}
