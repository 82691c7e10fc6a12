use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fhs_cli::experiments::{default_init, run};
use fhs_cli::{selftest, Check, ExperimentConfig, ExperimentId, HarnessError, Result, Table};
use fhs_core::fields::read_csv;
use fhs_core::fields::write_csv;
use fhs_core::optimizer::{minimize_quotient, sobolev_estimate};
use fhs_core::quadform::{form_report, DEFAULT_PADDING};
use fhs_core::{ConstantsTable, Grid, Params};
use log::info;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "fhs", version, about = "Fractional Hardy–Sobolev experiments on half-spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Coarse node count per axis.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate H_s, C_{n,s}, γ_s and optionally the whole-space Sobolev constant.
    Constants {
        #[arg(long)]
        sobolev: bool,
    },
    /// Evaluate every form on a field stored as CSV.
    Quadform {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = DEFAULT_PADDING)]
        padding: usize,
    },
    /// Minimize the quotient for one parameter point.
    Minimize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: f64,
        /// Defaults to 2*_s.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// Run a named experiment.
    Experiment { id: ExperimentId },
    /// Run the quick invariant checks.
    Selftest,
}

fn s_grid() -> Vec<f64> {
    (1..20).map(|k| (k as f64 * 0.05 * 100.0).round() / 100.0).collect()
}

fn emit_text(global: &Global, name: &str, text: &[u8]) -> Result<()> {
    if let Some(dir) = &global.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    io::stdout().write_all(text)?;
    Ok(())
}

fn emit_value<T: Serialize>(
    global: &Global,
    stem: &str,
    value: &T,
    table: impl FnOnce() -> Result<Table>,
) -> Result<()> {
    if global.csv {
        emit_text(global, &format!("{stem}.csv"), &table()?.to_csv()?)
    } else {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        emit_text(global, &format!("{stem}.json"), &text)
    }
}

fn constants(global: &Global, sobolev: bool) -> Result<()> {
    let mut rows = Vec::new();
    for n in 1..=3 {
        for s in s_grid() {
            let mut row = ConstantsTable::new(n, s)?;
            if sobolev && (n as f64) > 2.0 * s {
                let grid = match global.resolution {
                    Some(m) => Grid::with_resolution(n, m)?,
                    None => Grid::default_for(n)?,
                };
                info!("sobolev estimate n = {n}, s = {s}");
                row = row.with_sobolev(sobolev_estimate(&grid, s)?);
            }
            rows.push(row);
        }
    }
    emit_value(global, "constants", &rows, || {
        let mut t = Table::new("constants");
        for r in &rows {
            let b = t.row().cell("n", r.n).cell("s", r.s).cell("hardy", r.hardy).cell("gagliardo", r.gagliardo);
            let b = b.cell("gamma", r.gamma);
            match (sobolev, r.sobolev_estimate) {
                (false, _) => b.finish(),
                (true, Some(e)) => b.estimate("sobolev", e).finish(),
                (true, None) => b.cell("sobolev", "").cell("sobolev_unc", "").finish(),
            }
        }
        Ok(t)
    })
}

fn quadform(global: &Global, field: &Path, s: f64, padding: usize) -> Result<()> {
    let u = read_csv(File::open(field)?)?;
    let report = form_report(&u, s, padding)?;
    emit_value(global, "quadform", &report, || {
        let mut t = Table::new("quadform");
        t.row()
            .cell("fourier", report.fourier_value)
            .cell("gagliardo", report.gagliardo_value)
            .cell("regional", report.regional_value)
            .cell("hardy", report.hardy_value)
            .cell("cross_check_defect", report.cross_check_defect)
            .cell("decomposition_residual", report.decomposition_residual)
            .finish();
        Ok(t)
    })
}

fn minimize(global: &Global, n: usize, s: f64, p: Option<f64>, lambda: f64) -> Result<()> {
    let p = match p {
        Some(p) => p,
        None => fhs_core::params::critical_exponent(n, s)?,
    };
    let params = Params::new(n, s, p, lambda)?;
    let cfg = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let grid = match global.resolution.or(cfg.grid.resolution) {
        Some(m) => Grid::with_resolution(n, m)?,
        None => Grid::default_for(n)?,
    };
    let opts = fhs_core::optimizer::MinimizeOptions { padding: cfg.grid.padding, ..cfg.optimizer };
    let report = minimize_quotient(&params, &default_init(&grid, s)?, &opts)?;
    if let Some(dir) = &global.out {
        std::fs::create_dir_all(dir)?;
        write_csv(&report.final_field, File::create(dir.join("minimizer_field.csv"))?)?;
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        params: &'a Params,
        best_quotient: f64,
        termination: fhs_core::optimizer::Termination,
        iterations: usize,
        gradient_norm: f64,
        euler_lagrange_residual: f64,
        diagnostics: fhs_core::optimizer::MassDiagnostics,
        quotient_trace: &'a [f64],
    }
    let summary = Summary {
        params: &report.params,
        best_quotient: report.best_quotient,
        termination: report.termination,
        iterations: report.iterations,
        gradient_norm: report.gradient_norm,
        euler_lagrange_residual: report.euler_lagrange_residual,
        diagnostics: report.diagnostics,
        quotient_trace: &report.quotient_trace,
    };
    emit_value(global, "minimize", &summary, || {
        let mut t = Table::new("trace");
        for (i, q) in report.quotient_trace.iter().enumerate() {
            t.row().cell("iteration", i).cell("quotient", *q).finish();
        }
        Ok(t)
    })
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
}

fn experiment(global: &Global, id: ExperimentId) -> Result<bool> {
    let mut cfg = match &global.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default_for(id),
    };
    if cfg.experiment != id {
        return Err(HarnessError::Config(format!(
            "config is for experiment {}, not {}",
            cfg.experiment.name(),
            id.name()
        )));
    }
    if let Some(m) = global.resolution {
        cfg.grid.resolution = Some(m);
    }
    let out =
        global.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("results").join(id.name()));
    let result = run(&cfg)?;
    let emitter = fhs_cli::emit::Emitter::new(&out)?;
    emitter.emit_result(&result)?;
    for w in &result.warnings {
        log::warn!("{w}");
    }
    if global.json {
        println!("{}", serde_json::to_string_pretty(&result)?);
    } else {
        for t in &result.tables {
            println!("== {} ==", t.name);
            io::stdout().write_all(&t.to_csv()?)?;
        }
        print_checks(&result.checks);
        println!("results written to {}", out.display());
    }
    Ok(result.failed_checks().is_empty())
}

fn main_inner(cli: Cli) -> Result<bool> {
    let g = &cli.global;
    match cli.command {
        Command::Constants { sobolev } => constants(g, sobolev).map(|_| true),
        Command::Quadform { field, s, padding } => quadform(g, &field, s, padding).map(|_| true),
        Command::Minimize { n, s, p, lambda } => minimize(g, n, s, p, lambda).map(|_| true),
        Command::Experiment { id } => experiment(g, id),
        Command::Selftest => {
            let checks = selftest::run(g.resolution)?;
            if g.json {
                println!("{}", serde_json::to_string_pretty(&checks)?);
            } else {
                print_checks(&checks);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
