mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rshs::experiments::{self, DecayResult, SweepResult};
use rshs::{Config, Error as CoreError, Grid1D, Snapshot};
use serde::Serialize;
use serde_json::json;

use svg::{LineChart, Scale, Series};

#[derive(Debug, Parser)]
#[command(
    name = "rshs",
    version,
    about = "Relaxation model of viscous heat-conducting fluids: structural verification and 1D experiments"
)]
struct Cli {
    /// JSON run configuration; omitted keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: `output.path` of the config, else `rshs-out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the random verification directions (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Symmetrizer, symmetry, dissipativity and Kawashima checks at an equilibrium.
    Verify,
    /// Time integration with snapshot output.
    Simulate {
        #[arg(long, value_enum, default_value_t = ModelKind::Rshs)]
        model: ModelKind,
    },
    /// Relaxation runs for a decreasing list of epsilon against the NSF reference.
    RelaxSweep,
    /// Decay of a perturbed equilibrium.
    Decay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModelKind {
    Rshs,
    Nsf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                CoreError::Structural(_) => 1,
                CoreError::Config(_)
                | CoreError::Domain(_)
                | CoreError::Validation(_)
                | CoreError::Precondition(_) => 2,
                CoreError::Abort { .. } | CoreError::Inversion { .. } | CoreError::Numeric(_) => 3,
            },
            CliError::Io { .. } => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Returns whether every check of the command passed.
fn run(cli: &Cli) -> CliResult<bool> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rshs-out"));
    match &cli.command {
        Command::Verify => verify(&cfg, &out),
        Command::Simulate { model } => simulate(&cfg, *model, &out),
        Command::RelaxSweep => relax_sweep(&cfg, &out),
        Command::Decay => decay(&cfg, &out),
    }
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_report(out: &Path, report: &serde_json::Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(report).expect("report values are finite JSON");
    write(&out.join("report.json"), &(text + "\n"))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn verify(cfg: &Config, out: &Path) -> CliResult<bool> {
    let report = experiments::run_verify(cfg, cfg.seed)?;
    let v = report.verdicts;
    let mut rows = vec![
        (
            "symmetry".to_string(),
            format!("{:.3e}", report.symmetry_residual),
            v.symmetry,
        ),
        (
            "spd (min eig)".to_string(),
            format!("{:.6e}", report.min_eig_h0),
            v.spd,
        ),
        (
            "dissipativity".to_string(),
            format!("{:.3e}", report.dissipativity_max),
            v.dissipativity,
        ),
    ];
    for k in &report.kawashima {
        let n = k.direction;
        rows.push((
            format!("kawashima ({:+.3},{:+.3},{:+.3})", n[0], n[1], n[2]),
            format!("{:.3e}", k.margin),
            k.pass,
        ));
    }
    println!("{:<34} {:>12}  verdict", "check", "value");
    for (name, value, ok) in rows {
        println!("{name:<34} {value:>12}  {}", verdict(ok));
    }
    let pass = report.all_pass();
    println!("overall: {}", verdict(pass));
    write_report(
        out,
        &json!({
            "command": "verify",
            "seed": cfg.seed,
            "config": cfg,
            "pass": pass,
            "report": report,
        }),
    )?;
    Ok(pass)
}

fn write_snapshots(
    out: &Path,
    snaps: &[Snapshot],
    grid: &Grid1D,
) -> CliResult<Vec<serde_json::Value>> {
    snaps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let name = format!("snapshots/{i:04}.csv");
            write(&out.join(&name), &s.to_csv(grid))?;
            Ok(json!({ "file": name, "time": s.time }))
        })
        .collect()
}

fn simulate(cfg: &Config, model: ModelKind, out: &Path) -> CliResult<bool> {
    let (snaps, extra) = match model {
        ModelKind::Rshs => {
            let t = experiments::simulate_rshs(cfg)?;
            let worst = t
                .entropy_production
                .iter()
                .map(|e| e.1)
                .fold(f64::NEG_INFINITY, f64::max);
            let extra = json!({
                "steps": t.steps,
                "max_speed": t.max_speed,
                "max_entropy_production": worst,
            });
            (t.snapshots, extra)
        }
        ModelKind::Nsf => {
            let t = experiments::simulate_nsf(cfg)?;
            let extra = json!({
                "steps": t.steps,
                "entropy": t.entropy,
                "mu_eff": cfg.relax.effective_viscosity(),
                "kappa": cfg.relax.chi,
            });
            (t.snapshots, extra)
        }
    };
    let files = write_snapshots(out, &snaps, &cfg.grid)?;
    println!(
        "{:>14} {:>12} {:>12} {:>12}",
        "t", "min rho", "max rho", "max |u1|"
    );
    for s in &snaps {
        let rho = s.column(|c| c.rho);
        let u = s.column(|c| c.u[0].abs());
        println!(
            "{:>14.6e} {:>12.6} {:>12.6} {:>12.4e}",
            s.time,
            rho.iter().cloned().fold(f64::INFINITY, f64::min),
            rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            u.iter().cloned().fold(0.0, f64::max)
        );
    }
    write_report(
        out,
        &json!({
            "command": "simulate",
            "model": model,
            "config": cfg,
            "snapshots": files,
            "run": extra,
        }),
    )?;
    Ok(true)
}

fn sweep_chart(r: &SweepResult) -> String {
    let group = |name: &str, f: fn(&experiments::GroupDistance) -> f64| Series {
        name: name.into(),
        points: r
            .rows
            .iter()
            .map(|row| (row.epsilon, f(&row.distance)))
            .collect(),
        markers: true,
    };
    LineChart {
        title: format!("Distance to NSF at t = {}", r.t_end),
        x_label: "epsilon".into(),
        y_label: "L2 distance".into(),
        x_scale: Scale::Log,
        y_scale: Scale::Log,
        series: vec![
            group("total", |d| d.total),
            group("rho", |d| d.rho),
            group("u1", |d| d.u1),
            group("theta", |d| d.theta),
        ],
    }
    .render()
}

fn relax_sweep(cfg: &Config, out: &Path) -> CliResult<bool> {
    let r = experiments::relax_sweep(cfg)?;
    write(&out.join("sweep.csv"), &r.to_csv())?;
    write(&out.join("sweep.svg"), &sweep_chart(&r))?;
    println!(
        "{:>10} {:>12} {:>12} {:>12} {:>12} {:>8} {:>8}",
        "epsilon", "rho", "u1", "theta", "total", "order", "steps"
    );
    for row in &r.rows {
        let d = row.distance;
        println!(
            "{:>10.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>8} {:>8}",
            row.epsilon,
            d.rho,
            d.u1,
            d.theta,
            d.total,
            row.order.map_or("-".into(), |o| format!("{o:.3}")),
            row.steps
        );
    }
    let pass = r.monotone();
    println!(
        "NSF reference: {} steps, mu_eff = {}, kappa = {}",
        r.nsf_steps, r.mu_eff, r.kappa
    );
    println!("strictly decreasing: {}", verdict(pass));
    write_report(
        out,
        &json!({
            "command": "relax-sweep",
            "config": cfg,
            "pass": pass,
            "result": r,
            "files": ["sweep.csv", "sweep.svg"],
        }),
    )?;
    Ok(pass)
}

fn decay_chart(r: &DecayResult) -> String {
    let series = |name: &str, f: fn(&experiments::DecayRow) -> f64| Series {
        name: name.into(),
        points: r.rows.iter().map(|row| (row.t, f(row))).collect(),
        markers: false,
    };
    LineChart {
        title: "Deviation from the reference state".into(),
        x_label: "t".into(),
        y_label: "L2 deviation".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Log,
        series: vec![
            series("total", |d| d.total),
            series("dissipative", |d| d.dissipative),
            series("rho", |d| d.rho),
            series("velocity", |d| d.velocity),
            series("theta", |d| d.theta),
        ],
    }
    .render()
}

fn decay(cfg: &Config, out: &Path) -> CliResult<bool> {
    let r = experiments::decay(cfg)?;
    write(&out.join("decay.csv"), &r.to_csv())?;
    write(&out.join("decay.svg"), &decay_chart(&r))?;
    let (initial, last) = (r.initial(), r.last());
    let stride = (r.rows.len() / 10).max(1);
    println!("{:>12} {:>12} {:>12}", "t", "total", "dissipative");
    for (i, row) in r.rows.iter().enumerate() {
        if i % stride == 0 || i + 1 == r.rows.len() {
            println!(
                "{:>12.4} {:>12.4e} {:>12.4e}",
                row.t, row.total, row.dissipative
            );
        }
    }
    match r.fit_total {
        Some(f) => println!(
            "tail fit (t >= {}): rate {:.5}, R^2 {:.4}",
            r.tail_start, f.rate, f.r2
        ),
        None => println!("tail fit: not applicable (deviation vanishes)"),
    }
    println!(
        "window RMS decay factor: total {:.3}, dissipative {:.3}",
        r.window_decay.total, r.window_decay.dissipative
    );
    let pass = !r.blowup && last <= initial;
    println!(
        "final/initial = {}; blow-up: {}; decay: {}",
        if initial > 0.0 {
            format!("{:.4}", last / initial)
        } else {
            "-".into()
        },
        r.blowup,
        verdict(pass)
    );
    write_report(
        out,
        &json!({
            "command": "decay",
            "config": cfg,
            "pass": pass,
            "result": r,
            "files": ["decay.csv", "decay.svg"],
        }),
    )?;
    Ok(pass)
}
