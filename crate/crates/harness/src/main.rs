use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mkdvb_harness::{emit_tables, run, ExperimentConfig, ExperimentKind, RunStatus};

/// Run one experiment and write its manifest and tables.
///
/// Settings come from `--config` (TOML), then the flags below, which map to
/// config keys. Exit status: 0 complete, 2 partial, 1 error.
#[derive(Parser)]
#[command(name = "mkdvb-lab", version)]
struct Cli {
    #[command(subcommand)]
    experiment: Command,

    /// TOML experiment document.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out/<experiment>].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel members.
    #[arg(long, global = true, env = "MKDVB_WORKERS")]
    workers: Option<usize>,

    /// grid.length
    #[arg(long, global = true)]
    length: Option<f64>,
    /// grid.points
    #[arg(long, global = true)]
    points: Option<i64>,
    /// equation.family (kdv, kdv-b, mkdv, mkdv-b)
    #[arg(long, global = true)]
    family: Option<String>,
    /// equation.epsilon
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// equation.alpha
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// data.profile (gaussian, sech, cosine, random-bandlimited)
    #[arg(long, global = true)]
    profile: Option<String>,
    /// data.amplitude
    #[arg(long, global = true)]
    amplitude: Option<f64>,
    /// data.width
    #[arg(long, global = true)]
    width: Option<f64>,
    /// time.final
    #[arg(long, global = true)]
    final_time: Option<f64>,
    /// time.dt
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// time.record_every
    #[arg(long, global = true)]
    record_every: Option<i64>,
    /// sweep.epsilons or linfs.epsilons, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    /// sweep.s or linfs.s
    #[arg(long, global = true)]
    s: Option<f64>,
    /// scaling.lambda
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// jbounds.trials
    #[arg(long, global = true)]
    trials: Option<i64>,
    /// Any other key, as `section.key=value` with a TOML value.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Evolve the configured equation and record norms and the final profile.
    Evolve,
    /// Track conserved functionals along a trajectory.
    Conserve,
    /// Compare MKdV-B against MKdV over a list of ε.
    InviscidSweep,
    /// Compare a run with its rescaled counterpart.
    Scaling,
    /// KdV residual of the Miura image of MKdV trajectories.
    Miura,
    /// Random-trial check of the four-block bound.
    Jbounds,
    /// Linear F^s bound uniformly in ε.
    Linfs,
    /// L⁶ Strichartz ratio on dyadic shells.
    Strichartz,
}

impl Command {
    fn kind(self) -> ExperimentKind {
        match self {
            Command::Evolve => ExperimentKind::Evolve,
            Command::Conserve => ExperimentKind::Conserve,
            Command::InviscidSweep => ExperimentKind::InviscidSweep,
            Command::Scaling => ExperimentKind::Scaling,
            Command::Miura => ExperimentKind::Miura,
            Command::Jbounds => ExperimentKind::Jbounds,
            Command::Linfs => ExperimentKind::Linfs,
            Command::Strichartz => ExperimentKind::Strichartz,
        }
    }
}

fn set(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<(), String> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| format!("empty key in {path:?}"))?;
    let mut node = table;
    for p in parts {
        let entry = node.entry(p.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry.as_table_mut().ok_or_else(|| format!("{p} in {path:?} is not a section"))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(text: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {text}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(text.to_string()))
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let kind = cli.experiment.kind();
    let mut table = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            toml::from_str::<toml::Table>(&text).map_err(|e| format!("{}: {}", path.display(), e.message()))?
        }
        None => toml::Table::new(),
    };
    match table.get("experiment").and_then(toml::Value::as_str) {
        Some(k) if k != kind.as_str() => {
            return Err(format!("config is for experiment {k:?}, but the subcommand is {kind}"));
        }
        _ => {}
    }
    table.insert("experiment".into(), kind.as_str().into());

    let list_section = if kind == ExperimentKind::Linfs { "linfs" } else { "sweep" };
    let flags: Vec<(String, Option<toml::Value>)> = vec![
        ("seed".into(), cli.seed.map(|s| toml::Value::Integer(s as i64))),
        ("grid.length".into(), cli.length.map(Into::into)),
        ("grid.points".into(), cli.points.map(Into::into)),
        ("equation.family".into(), cli.family.clone().map(Into::into)),
        ("equation.epsilon".into(), cli.epsilon.map(Into::into)),
        ("equation.alpha".into(), cli.alpha.map(Into::into)),
        ("data.profile".into(), cli.profile.clone().map(Into::into)),
        ("data.amplitude".into(), cli.amplitude.map(Into::into)),
        ("data.width".into(), cli.width.map(Into::into)),
        ("time.final".into(), cli.final_time.map(Into::into)),
        ("time.dt".into(), cli.dt.map(Into::into)),
        ("time.record_every".into(), cli.record_every.map(Into::into)),
        (format!("{list_section}.epsilons"), cli.epsilons.clone().map(Into::into)),
        (format!("{list_section}.s"), cli.s.map(Into::into)),
        ("scaling.lambda".into(), cli.lambda.map(Into::into)),
        ("jbounds.trials".into(), cli.trials.map(Into::into)),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            set(&mut table, &key, v)?;
        }
    }
    for kv in &cli.set {
        let (key, value) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got {kv:?}"))?;
        set(&mut table, key.trim(), parse_value(value.trim()))?;
    }

    let mut cfg = ExperimentConfig::from_table(table).map_err(|e| e.to_string())?;
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from("out").join(kind.as_str()));
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} workers: {e}");
            return ExitCode::from(1);
        }
    }
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let out = cfg.out.clone().expect("output directory set");
    let report = match run(ExperimentConfig { out: None, ..cfg }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let files = match emit_tables(&report, &out) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for (k, v) in &report.summary {
        println!("{k} = {v}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    match &report.status {
        RunStatus::Complete => ExitCode::SUCCESS,
        RunStatus::Partial { failures } => {
            for f in failures {
                eprintln!("partial: {f}");
            }
            ExitCode::from(2)
        }
    }
}
